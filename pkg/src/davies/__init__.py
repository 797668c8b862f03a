"""Exact pointwise-finite rectangular representations f(x, y) = sum_n g(x, n) h(y, n)."""

from .builder import PairFunction, Point, Representation, new_builder
from .exactnum import Interval, exp_enclosure, interval_det
from .rank import certify_exp_matrix_nonsingular, exact_rank, lowerbound_check
from .theta import Row, check_lemma_conclusions, theta_new

__all__ = [
    "Interval",
    "PairFunction",
    "Point",
    "Representation",
    "Row",
    "certify_exp_matrix_nonsingular",
    "check_lemma_conclusions",
    "exact_rank",
    "exp_enclosure",
    "interval_det",
    "lowerbound_check",
    "new_builder",
    "theta_new",
]
