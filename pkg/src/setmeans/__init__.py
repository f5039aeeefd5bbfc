"""Generalized means of bounded and unbounded subsets of the real line."""

from .extreal import ExtReal, NEG_INF, POS_INF
from .meanvalue import MeanValue
from .seqform import SeqForm, seq_const, seq_geom, seq_n
from .sets import (
    BlockFamily,
    FractalPart,
    FractalRow,
    Interval,
    MappedFamily,
    RealSet,
    SetBounds,
    affine,
    clip,
    empty_set,
    family_set,
    fractal_set,
    interval_set,
    normalize,
    point_set,
    reciprocal,
    union,
)
from .measures import (
    HARMONIC,
    LEBESGUE,
    MeasureSpec,
    ifs_invariant_stats,
    measure_of,
    moment_of,
)
from .means import Mean, get_mean, mean_set_hf
from .extension import (
    WindowSchedule,
    cesaro_average,
    extend_mean,
)

__all__ = [
    "ExtReal",
    "NEG_INF",
    "POS_INF",
    "MeanValue",
    "SeqForm",
    "seq_const",
    "seq_geom",
    "seq_n",
    "BlockFamily",
    "FractalPart",
    "FractalRow",
    "Interval",
    "MappedFamily",
    "RealSet",
    "SetBounds",
    "affine",
    "clip",
    "empty_set",
    "family_set",
    "fractal_set",
    "interval_set",
    "normalize",
    "point_set",
    "reciprocal",
    "union",
    "HARMONIC",
    "LEBESGUE",
    "MeasureSpec",
    "ifs_invariant_stats",
    "measure_of",
    "moment_of",
    "Mean",
    "get_mean",
    "mean_set_hf",
    "WindowSchedule",
    "cesaro_average",
    "extend_mean",
]

__version__ = "0.1.0"
