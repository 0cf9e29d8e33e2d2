"""Set-predicate identification and alignment for knowledge bases.

Pipeline: ingest triple dumps -> per-predicate statistics -> type profiles
-> label features -> supervised enumerating/counting classification ->
heuristic pair alignment -> evaluation/serving.
"""

__version__ = "0.1.0"
