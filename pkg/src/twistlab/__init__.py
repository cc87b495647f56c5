"""Computational toolkit for SU(2) character varieties of bordered surfaces:
trace coordinates, twist flows, Dehn-twist dynamics and statistical
ergodicity experiments."""

from .su2 import (
    CentralElement,
    GroupElement,
    TangentElement,
    IDENTITY,
    haar_sample,
    make_rng,
    one_param,
    period,
    trace,
    twist_time,
    variation,
)
from .words import (
    IndexSet,
    SurfacePresentation,
    UnsupportedSurface,
    Word,
    curve_word,
    evaluate,
    free_reduce,
    index_sets,
    parse_word,
    surface_presentation,
)
from .traces import MissingVariable, TracePolynomial, reduce_trace, evaluate_polynomial, verify_reduction
__version__ = "0.1.0"
