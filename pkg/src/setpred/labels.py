"""Textual predicate-label features.

Tokenization at case/punctuation/digit boundaries, singular/plural
inflection of the label's final noun, corpus-frequency ratios, and mean
word-vector label embeddings with cosine similarity.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Optional, Protocol, Sequence

import numpy as np

from .kb import INVERSE_MARKER


class LabelError(Exception):
    pass


_CAMEL_1 = re.compile(r"(?<=[a-z0-9])(?=[A-Z])")
_CAMEL_2 = re.compile(r"(?<=[A-Z])(?=[A-Z][a-z])")
_DIGIT_LETTER = re.compile(r"(?<=[0-9])(?=[A-Za-z])|(?<=[A-Za-z])(?=[0-9])")
_NON_ALNUM = re.compile(r"[^A-Za-z0-9]+")


def tokenize_label(label: str) -> list[str]:
    """Lowercased tokens split at case, underscore/hyphen/punctuation and
    digit-letter boundaries. The inverse marker is stripped first so a
    predicate and its inverse tokenize identically.
    """
    s = label
    while s.endswith(INVERSE_MARKER):
        s = s[: -len(INVERSE_MARKER)]
    s = _CAMEL_1.sub(" ", s)
    s = _CAMEL_2.sub(" ", s)
    s = _DIGIT_LETTER.sub(" ", s)
    return [tok.lower() for tok in _NON_ALNUM.split(s) if tok]


# Irregular singular -> plural pairs (invariant nouns map to themselves).
IRREGULAR_PLURALS = {
    "child": "children", "person": "people", "man": "men", "woman": "women",
    "foot": "feet", "tooth": "teeth", "goose": "geese", "mouse": "mice",
    "ox": "oxen", "criterion": "criteria", "phenomenon": "phenomena",
    "alumnus": "alumni", "cactus": "cacti", "focus": "foci", "fungus": "fungi",
    "nucleus": "nuclei", "radius": "radii", "stimulus": "stimuli",
    "analysis": "analyses", "axis": "axes", "basis": "bases", "crisis": "crises",
    "diagnosis": "diagnoses", "thesis": "theses", "index": "indices",
    "matrix": "matrices", "vertex": "vertices", "appendix": "appendices",
    "datum": "data", "medium": "media", "curriculum": "curricula",
    "life": "lives", "wife": "wives", "knife": "knives", "leaf": "leaves",
    "half": "halves", "wolf": "wolves", "shelf": "shelves", "thief": "thieves",
    "loaf": "loaves", "calf": "calves",
    "staff": "staff", "series": "series", "species": "species", "deer": "deer",
    "sheep": "sheep", "fish": "fish", "aircraft": "aircraft",
    "offspring": "offspring",
}
IRREGULAR_SINGULARS = {}
for _s, _p in IRREGULAR_PLURALS.items():
    IRREGULAR_SINGULARS.setdefault(_p, _s)

# Small noun lexicon for the last-noun pass; singular forms only, plural
# membership is checked through singularization.
NOUN_LEXICON = frozenset("""
    actor airline airport album architect area artist assembly author award
    birthplace book building capacity cast child church circulation citizen
    city club coach code college company constituency council country county
    crew date daughter death destination developer director district doctor
    editor employee employer episode event facility family father film floor
    founder game goal governor graduate height home hub id inhabitant injury
    institution island journal king label lake language length location
    magazine match member mother mountain movie name nation neighborhood
    network newspaper number occupation office organization owner parent
    park partner party passenger person place player point population
    president prize producer product publisher race range region resident
    river role school season seat series show singer site size son song
    spouse stadium staff state station student team title total town
    university venue village weight win winner work writer year
""".split())


def _looks_plural(token: str) -> bool:
    if token in IRREGULAR_SINGULARS:
        return True
    if token in IRREGULAR_PLURALS:
        return False
    if token.endswith("ss") or len(token) < 2:
        return False
    return token.endswith("s")


def to_plural(singular: str) -> str:
    if singular in IRREGULAR_PLURALS:
        return IRREGULAR_PLURALS[singular]
    if singular.endswith("y") and len(singular) > 1 and singular[-2] not in "aeiou":
        return singular[:-1] + "ies"
    if singular.endswith(("s", "x", "z", "ch", "sh")):
        return singular + "es"
    return singular + "s"


def to_singular(plural: str) -> str:
    if plural in IRREGULAR_SINGULARS:
        return IRREGULAR_SINGULARS[plural]
    if plural.endswith("ies") and len(plural) > 3:
        return plural[:-3] + "y"
    if plural.endswith(("ses", "xes", "zes", "ches", "shes")):
        return plural[:-2]
    if plural.endswith("s") and not plural.endswith("ss"):
        return plural[:-1]
    return plural


def _is_noun(token: str) -> bool:
    return (
        token in NOUN_LEXICON
        or token in IRREGULAR_PLURALS
        or token in IRREGULAR_SINGULARS
        or to_singular(token) in NOUN_LEXICON
    )


@dataclass(frozen=True)
class InflectedForms:
    singular: str
    plural: str
    last_noun: str


def inflect(label: str) -> InflectedForms:
    """Singular and plural of the label's last noun.

    The last noun is found by a lexicon pass over the tokens (right to
    left), falling back to the final token.
    """
    tokens = tokenize_label(label)
    if not tokens:
        raise LabelError("no inflectable token")
    last_noun = next((t for t in reversed(tokens) if _is_noun(t)), tokens[-1])
    if _looks_plural(last_noun):
        return InflectedForms(to_singular(last_noun), last_noun, last_noun)
    return InflectedForms(last_noun, to_plural(last_noun), last_noun)


class FrequencyProvider(Protocol):
    """Estimated corpus frequency of a term; deterministic per snapshot."""

    def lookup(self, term: str) -> int: ...


class TsvFrequencyProvider:
    """Offline term<TAB>count snapshot; unknown terms have frequency 0."""

    def __init__(self, table: dict[str, int]):
        self._table = table

    @classmethod
    def load(cls, fh) -> "TsvFrequencyProvider":
        table: dict[str, int] = {}
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise LabelError(f"frequency table line {lineno}: expected 2 columns")
            table[parts[0].strip()] = int(parts[1])
        return cls(table)

    def lookup(self, term: str) -> int:
        return self._table.get(term, 0)


def plural_singular_ratio(provider: FrequencyProvider, forms: InflectedForms) -> float:
    """freq(plural) / freq(singular) with the denominator floored at 1."""
    return provider.lookup(forms.plural) / max(provider.lookup(forms.singular), 1)


class EmbeddingTable:
    """Word -> vector table loaded from the word-per-line text format."""

    def __init__(self, vectors: dict[str, np.ndarray], dimension: int):
        self.vectors = vectors
        self.dimension = dimension

    @classmethod
    def load(cls, fh) -> "EmbeddingTable":
        vectors: dict[str, np.ndarray] = {}
        dimension: Optional[int] = None
        for lineno, line in enumerate(fh, start=1):
            parts = line.rstrip("\n").split()
            if not parts:
                continue
            word, values = parts[0], parts[1:]
            if dimension is None:
                dimension = len(values)
                if dimension == 0:
                    raise LabelError(f"embedding line {lineno}: no vector components")
            elif len(values) != dimension:
                raise LabelError(
                    f"embedding line {lineno}: dimension {len(values)} != {dimension}"
                )
            vectors[word] = np.array([float(v) for v in values], dtype=np.float64)
        if dimension is None:
            raise LabelError("empty embedding file")
        return cls(vectors, dimension)

    def __contains__(self, word: str) -> bool:
        return word in self.vectors


def embed_label(tokens: Sequence[str], table: EmbeddingTable) -> Optional[np.ndarray]:
    """Mean vector of the in-vocabulary tokens; None when all are OOV."""
    vecs = [table.vectors[t] for t in tokens if t in table.vectors]
    if not vecs:
        return None
    return np.mean(vecs, axis=0)


def cosine_similarity(u: Optional[np.ndarray], v: Optional[np.ndarray]) -> float:
    """Cosine of the angle between two vectors; 0 for empty or zero-norm
    operands."""
    if u is None or v is None:
        return 0.0
    if u.shape != v.shape:
        raise LabelError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.dot(u, v) / (nu * nv))
