"""Composition operators on weighted Hardy spaces: finite sections, Moebius
classification, spectral models and closed-range verdicts."""

from .moebius import MoebiusMap, classify, canonical_conjugator, iterate, special
from .series import TruncatedSeries, blaschke_taylor, mobius_taylor, polynomial
from .weights import WeightSequence, dirichlet, dn1, dn2, hardy, parse_weights

__all__ = [
    "MoebiusMap",
    "TruncatedSeries",
    "WeightSequence",
    "blaschke_taylor",
    "canonical_conjugator",
    "classify",
    "dirichlet",
    "dn1",
    "dn2",
    "hardy",
    "iterate",
    "mobius_taylor",
    "parse_weights",
    "polynomial",
    "special",
]

__version__ = "0.1.0"
