"""Weisfeiler-Leman refinement, k-th order invariant graph networks and C^k logic.

Submodules: :mod:`graphs`, :mod:`wl`, :mod:`patterns`, :mod:`ign`, :mod:`logic`,
:mod:`certify`, :mod:`jsonio` and :mod:`cli`.
"""

from .graphs import ColouredGraph, atomic_type, corpus, load_graph
from .ign import IgnModel, encode, encode_pair, forward, forward_trunc, sample_model
from .logic import evaluate, parse_formula
from .patterns import EqualityPattern, enumerate_patterns, pattern_of
from .wl import wl_equivalent_at, wl_pair, wl_run

__version__ = "0.1.0"

__all__ = [
    "ColouredGraph", "EqualityPattern", "IgnModel", "atomic_type", "corpus", "encode", "encode_pair",
    "enumerate_patterns", "evaluate", "forward", "forward_trunc", "load_graph", "parse_formula",
    "pattern_of", "sample_model", "wl_equivalent_at", "wl_pair", "wl_run",
]
