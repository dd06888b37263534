"""Exception types raised by the library."""


class LoewnerError(Exception):
    """Base class for all library errors."""


class DegenerateC(LoewnerError, ValueError):
    """The parameter c makes the two roots coincide (c = +-4, or +-4i for the tau family)."""


class OutOfDomain(LoewnerError, ValueError):
    pass


class NoRootOnRay(LoewnerError):
    pass


class StepUnderflow(LoewnerError):
    pass


class BranchDiscontinuity(LoewnerError):
    pass


class NewtonDivergence(LoewnerError):
    pass


class SelfHit(LoewnerError):
    """The upper tip returned to its starting point before the end of the trace."""

    def __init__(self, t_hit, point, partial=None):
        super().__init__(f"trace returned to its start at t = {t_hit:.12g}")
        self.t_hit = t_hit
        self.point = point
        self.partial = partial


class BranchCutHit(LoewnerError):
    pass


class NoSelfHit(LoewnerError):
    pass


class InconsistentPhase(LoewnerError):
    pass


class LipGuardExceeded(UserWarning):
    """Warning: a zipper step has local Lip(1/2) constant above the guard."""
