"""Exact computations with rank-metric MRD codes, quasifields and semifields."""

from .errors import MRDError
from .gf import FieldSpec, FqElem, fq_make, gf
from .matgf import MatGF
from .code import RankCode, dual, is_mrd, min_distance, normalize, rank_distribution

__version__ = "0.1.0"

__all__ = [
    "MRDError",
    "FieldSpec",
    "FqElem",
    "fq_make",
    "gf",
    "MatGF",
    "RankCode",
    "dual",
    "is_mrd",
    "min_distance",
    "normalize",
    "rank_distribution",
    "__version__",
]
