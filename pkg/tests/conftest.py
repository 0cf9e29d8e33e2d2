import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"

sys.path.insert(0, str(Path(__file__).resolve().parent))


def run_pipeline(out_dir: Path, seed: int = 7, model: str = "logistic") -> Path:
    """Drive every stage of the CLI against the bundled fixture KB."""
    from setpred.cli import main

    steps = [
        ["ingest", "--input", str(FIXTURES / "kb.nt"), "--format", "ntriples",
         "--kb", "custom"],
        ["stats", "--min-count", "50"],
        ["profile", "--class-map", str(FIXTURES / "class_map.tsv"),
         "--samples", "100", "--seed", str(seed)],
        ["features", "--freq-table", str(FIXTURES / "frequencies.tsv")],
        ["train", "--kind", "enumerating", "--model", model,
         "--labels", str(FIXTURES / "class_judgments.jsonl"), "--seed", str(seed)],
        ["train", "--kind", "counting", "--model", model,
         "--labels", str(FIXTURES / "class_judgments.jsonl"), "--seed", str(seed)],
        ["classify"],
        ["align", "--min-support", "50", "--k", "3",
         "--embeddings", str(FIXTURES / "embeddings.txt")],
    ]
    for step in steps:
        rc = main(["--out", str(out_dir)] + step)
        assert rc == 0, f"stage failed: {step}"
    return out_dir


@pytest.fixture(scope="session")
def pipeline_artifacts(tmp_path_factory) -> Path:
    out = tmp_path_factory.mktemp("artifacts")
    return run_pipeline(out)
