"""Evaluable driving functions and the transformations behind the hull identities.

Closed forms are kept closed under every transformation::

    SqrtOneMinusT:  lambda(t) = offset + c * sqrt(S - t),    0 <= t <= T <= S
    SqrtTauPlusT:   lambda(t) = offset + c * sqrt(tau + t),  0 <= t <= T
    Sampled:        piecewise-linear through (times, values)

so downstream code can use the exact parameter algebra instead of sampling.
"""
from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import OutOfDomain


class Form(str, enum.Enum):
    SQRT_ONE_MINUS_T = "SqrtOneMinusT"
    SQRT_TAU_PLUS_T = "SqrtTauPlusT"
    SAMPLED = "Sampled"


class Axis(str, enum.Enum):
    REAL = "RealAxis"
    IMAG = "ImagAxis"
    BOTH = "Both"


_DOMAIN_SLACK = 1e-12


@dataclass(frozen=True, eq=False)
class Driver:
    form: Form
    horizon: float
    c: complex = 0j
    scale: float = 1.0          # S for SqrtOneMinusT
    tau: float = 0.0
    offset: complex = 0j
    times: np.ndarray | None = field(default=None, repr=False)
    values: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if not self.horizon > 0:
            raise ValueError("horizon must be positive")
        if self.form is Form.SQRT_ONE_MINUS_T and self.horizon > self.scale * (1 + _DOMAIN_SLACK):
            raise ValueError("c*sqrt(S - t) needs horizon T <= S")
        if self.form is Form.SQRT_TAU_PLUS_T and self.tau < 0:
            raise ValueError("tau must be nonnegative")
        if self.form is Form.SAMPLED:
            t = np.asarray(self.times, dtype=float)
            v = np.asarray(self.values, dtype=complex)
            if t.ndim != 1 or t.shape != v.shape or len(t) < 2:
                raise ValueError("sampled driver needs matching 1-d times/values, length >= 2")
            if t[0] != 0.0:
                raise ValueError("sampled times must start at 0")
            if np.any(np.diff(t) <= 0):
                raise ValueError("sampled times must be strictly increasing")
            object.__setattr__(self, "times", t)
            object.__setattr__(self, "values", v)

    # -- constructors ---------------------------------------------------------------
    @classmethod
    def sqrt_one_minus_t(cls, c, horizon: float = 1.0) -> "Driver":
        return cls(Form.SQRT_ONE_MINUS_T, float(horizon), c=complex(c), scale=1.0)

    @classmethod
    def sqrt_tau_plus_t(cls, c, tau: float = 0.0, horizon: float = 1.0) -> "Driver":
        return cls(Form.SQRT_TAU_PLUS_T, float(horizon), c=complex(c), tau=float(tau))

    @classmethod
    def constant(cls, value, horizon: float = 1.0) -> "Driver":
        return cls(Form.SQRT_TAU_PLUS_T, float(horizon), c=0j, tau=0.0, offset=complex(value))

    @classmethod
    def sampled(cls, times, values) -> "Driver":
        t = np.asarray(times, dtype=float)
        return cls(Form.SAMPLED, float(t[-1]), times=t, values=np.asarray(values, dtype=complex))

    @classmethod
    def from_function(cls, f, horizon: float, n: int = 1001) -> "Driver":
        t = np.linspace(0.0, horizon, n)
        return cls.sampled(t, [complex(f(s)) for s in t])

    # -- evaluation -------------------------------------------------------------------
    def _check(self, t):
        t = np.asarray(t, dtype=float)
        slack = _DOMAIN_SLACK * max(self.horizon, 1.0)
        if np.any(t < -slack) or np.any(t > self.horizon + slack):
            raise OutOfDomain(f"t outside [0, {self.horizon}]")
        return np.clip(t, 0.0, self.horizon)

    def __call__(self, t):
        return self.eval(t)

    def eval(self, t):
        """lambda(t); scalar in, complex out; array in, array out."""
        scalar = np.ndim(t) == 0
        t = self._check(t)
        out = self.eval_unchecked(t)
        return complex(out) if scalar else out

    def eval_unchecked(self, t):
        if self.form is Form.SQRT_ONE_MINUS_T:
            return self.offset + self.c * np.sqrt(np.maximum(self.scale - t, 0.0))
        if self.form is Form.SQRT_TAU_PLUS_T:
            return self.offset + self.c * np.sqrt(self.tau + t)
        re = np.interp(t, self.times, self.values.real)
        im = np.interp(t, self.times, self.values.imag)
        return re + 1j * im

    def derivative(self, t):
        """d lambda / dt (one-sided slopes for sampled drivers; may be infinite at a sqrt endpoint)."""
        t = np.asarray(self._check(t), dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.form is Form.SQRT_ONE_MINUS_T:
                return -self.c / (2 * np.sqrt(self.scale - t))
            if self.form is Form.SQRT_TAU_PLUS_T:
                if self.c == 0:
                    return np.zeros_like(t, dtype=complex)
                return self.c / (2 * np.sqrt(self.tau + t))
        slopes = np.diff(self.values) / np.diff(self.times)
        k = np.clip(np.searchsorted(self.times, t, side="right") - 1, 0, len(slopes) - 1)
        return slopes[k]

    @property
    def is_closed_form(self) -> bool:
        return self.form is not Form.SAMPLED

    # -- transformations --------------------------------------------------------------
    def _with(self, **kw) -> "Driver":
        base = dict(form=self.form, horizon=self.horizon, c=self.c, scale=self.scale,
                    tau=self.tau, offset=self.offset, times=self.times, values=self.values)
        base.update(kw)
        return Driver(**base)

    def translate(self, a) -> "Driver":
        a = complex(a)
        if self.form is Form.SAMPLED:
            return self._with(values=self.values + a)
        return self._with(offset=self.offset + a)

    def restrict(self, horizon: float) -> "Driver":
        if not 0 < horizon <= self.horizon * (1 + _DOMAIN_SLACK):
            raise OutOfDomain("restricted horizon must lie in (0, T]")
        horizon = min(horizon, self.horizon)
        if self.form is not Form.SAMPLED:
            return self._with(horizon=float(horizon))
        keep = self.times < horizon
        t = np.append(self.times[keep], horizon)
        return Driver.sampled(t, np.append(self.values[keep], self.eval(horizon)))

    def shift(self, t0: float) -> "Driver":
        """The driver ``lambda(t0 + .)`` on ``[0, T - t0]``."""
        if not 0 <= t0 < self.horizon:
            raise OutOfDomain("shift needs 0 <= t0 < T")
        if t0 == 0:
            return self
        T = self.horizon - t0
        if self.form is Form.SQRT_ONE_MINUS_T:
            return self._with(scale=self.scale - t0, horizon=T)
        if self.form is Form.SQRT_TAU_PLUS_T:
            return self._with(tau=self.tau + t0, horizon=T)
        keep = self.times > t0
        t = np.concatenate([[0.0], self.times[keep] - t0])
        v = np.concatenate([[self.eval(t0)], self.values[keep]])
        return Driver.sampled(t, v)

    def rescale(self, a: float) -> "Driver":
        """The driver ``a * lambda(. / a^2)`` on ``[0, a^2 T]``."""
        if not a > 0:
            raise ValueError("scale factor must be positive")
        a2 = a * a
        if self.form is Form.SQRT_ONE_MINUS_T:
            return self._with(scale=self.scale * a2, offset=self.offset * a, horizon=self.horizon * a2)
        if self.form is Form.SQRT_TAU_PLUS_T:
            return self._with(tau=self.tau * a2, offset=self.offset * a, horizon=self.horizon * a2)
        return Driver.sampled(self.times * a2, self.values * a)

    def reflect(self, axis: Axis | str) -> "Driver":
        """conj(lambda) for RealAxis, -conj(lambda) for ImagAxis, -lambda for Both."""
        axis = Axis(axis)
        f = {Axis.REAL: np.conj, Axis.IMAG: lambda z: -np.conj(z), Axis.BOTH: lambda z: -z}[axis]
        if self.form is Form.SAMPLED:
            return self._with(values=f(self.values))
        return self._with(c=complex(f(self.c)), offset=complex(f(self.offset)))

    def dual(self) -> "Driver":
        """The driver ``-i * lambda(T - .)`` on ``[0, T]``.

        Applying it twice gives ``-lambda``: the two rotations by -i compose to a half turn.
        """
        T = self.horizon
        if self.form is Form.SQRT_ONE_MINUS_T:
            return Driver(Form.SQRT_TAU_PLUS_T, T, c=-1j * self.c, tau=self.scale - T,
                          offset=-1j * self.offset)
        if self.form is Form.SQRT_TAU_PLUS_T:
            return Driver(Form.SQRT_ONE_MINUS_T, T, c=-1j * self.c, scale=self.tau + T,
                          offset=-1j * self.offset)
        t = T - self.times[::-1]
        t[0] = 0.0
        return Driver.sampled(t, -1j * self.values[::-1])

    def to_sampled(self, n: int = 1001) -> "Driver":
        t = np.linspace(0.0, self.horizon, n)
        return Driver.sampled(t, self.eval(t))

    def describe(self) -> dict:
        out = {"form": self.form.value, "horizon": self.horizon}
        if self.form is Form.SAMPLED:
            out["samples"] = len(self.times)
        else:
            out.update(c=[self.c.real, self.c.imag], offset=[self.offset.real, self.offset.imag])
            if self.form is Form.SQRT_ONE_MINUS_T:
                out["scale"] = self.scale
            else:
                out["tau"] = self.tau
        return out


@dataclass(frozen=True)
class LipEstimate:
    norm: float
    witness: tuple


def lip_half_norm(d: Driver, samples: int = 513) -> LipEstimate:
    """Largest |lambda(t) - lambda(s)| / sqrt|t - s| over a uniform grid of ``samples`` times.

    A lower bound on the true Lip(1/2) norm.  Grids with ``2n - 1`` points contain the
    ``n``-point grid, so doubling this way never decreases the estimate.
    """
    if samples < 2:
        raise ValueError("need at least two samples")
    t = np.linspace(0.0, d.horizon, samples)
    v = d.eval(t)
    best, pair = 0.0, (0.0, 0.0)
    for i in range(samples - 1):
        dt = t[i + 1:] - t[i]
        r = np.abs(v[i + 1:] - v[i]) / np.sqrt(dt)
        j = int(np.argmax(r))
        if r[j] > best:
            best, pair = float(r[j]), (float(t[i]), float(t[i + 1 + j]))
    return LipEstimate(best, pair)


def load_csv(path) -> Driver:
    """Read a sampled driver from CSV with header ``t,re,im``."""
    with open(Path(path), newline="") as fh:
        reader = csv.reader(fh)
        header = [h.strip().lower() for h in next(reader)]
        if header[:3] != ["t", "re", "im"]:
            raise ValueError(f"expected header t,re,im, got {header}")
        rows = [(float(r[0]), float(r[1]), float(r[2])) for r in reader if r]
    arr = np.array(rows, dtype=float)
    if np.any(np.diff(arr[:, 0]) <= 0):
        raise ValueError("driver times must be strictly increasing")
    return Driver.sampled(arr[:, 0], arr[:, 1] + 1j * arr[:, 2])


def save_csv(d: Driver, path, n: int = 1001) -> None:
    s = d if d.form is Form.SAMPLED else d.to_sampled(n)
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "re", "im"])
        for t, v in zip(s.times, s.values):
            w.writerow([repr(float(t)), repr(float(v.real)), repr(float(v.imag))])
