"""Anytime-valid testing with e-values and e-processes."""
from . import calibrate, compress, core, families, simlab
from .core import (
    EProcessTrace,
    EValueSample,
    FiniteSpace,
    StoppingRule,
    dominating_lr,
    e_to_p,
    ev_convex_mix,
    ev_product,
    first_crossing,
    stopped_value,
    stopping_time,
)

__version__ = "0.1.0"
