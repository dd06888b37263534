"""Numerics for Loewner hulls driven by complex-valued functions."""
from .config import RunConfig, load_config
from .driver import Axis, Driver, Form
from .errors import (DegenerateC, LipGuardExceeded, LoewnerError, NewtonDivergence,
                     OutOfDomain, SelfHit)
from .params import (PhaseKind, classify_phase, family1_params, family2_params,
                     phase_boundary)

__version__ = "0.1.0"
