"""Exact analysis of weighted shifts through signed atomic representing measures."""

from .charge import (
    Atom,
    Charge,
    Sign,
    SignPattern,
    SubnormalVerdict,
    TailBound,
    convolve,
    delta2_transform,
    delta_transform,
    is_subnormal_charge,
    moment,
    moment_error,
    normalize,
    scale_positions,
    sign_census,
)
from .seqcalc import MomentSeq, WeightSeq

__all__ = [
    "Atom",
    "Charge",
    "MomentSeq",
    "Sign",
    "SignPattern",
    "SubnormalVerdict",
    "TailBound",
    "WeightSeq",
    "convolve",
    "delta2_transform",
    "delta_transform",
    "is_subnormal_charge",
    "moment",
    "moment_error",
    "normalize",
    "scale_positions",
    "sign_census",
]
