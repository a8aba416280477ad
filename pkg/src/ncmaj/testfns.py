"""Scalar test functions for spectral calculus.

Piecewise-linear functions are stored as ``a + b*x + sum_k c_k (x - t_k)_+``.
Their Gaussian mollification is closed form: smoothing ``(x - t)_+`` with
``N(0, lam^2)`` gives ``u Phi(u/lam) + lam phi(u/lam)`` with ``u = x - t``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import ndtr

from .errors import InvalidInputError

_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)


def _phi(z):
    return _INV_SQRT_2PI * np.exp(-0.5 * z * z)


@dataclass(frozen=True)
class ScalarTestFn:
    kind: str
    intercept: float = 0.0
    slope: float = 0.0
    knots: tuple = ()
    lam: Optional[float] = None
    power: Optional[int] = None
    params: tuple = ()

    @property
    def is_piecewise_linear(self) -> bool:
        return self.power is None and self.lam is None

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        if self.power is not None:
            return x ** self.power
        out = self.intercept + self.slope * x
        for t, c in self.knots:
            u = x - t
            if self.lam is None:
                out = out + c * np.maximum(u, 0.0)
            else:
                z = u / self.lam
                out = out + c * (u * ndtr(z) + self.lam * _phi(z))
        return out

    def derivative(self, x, k: int = 1):
        """k-th derivative, k in {1, 2, 3}; kinks of unsmoothed kinds read as 0."""
        if k not in (1, 2, 3):
            raise InvalidInputError("derivative order must be 1, 2 or 3")
        x = np.asarray(x, dtype=np.float64)
        if self.power is not None:
            K = self.power
            coef = np.prod([K - j for j in range(k)])
            return coef * x ** (K - k) if K >= k else np.zeros_like(x)
        out = np.full_like(x, self.slope if k == 1 else 0.0)
        for t, c in self.knots:
            u = x - t
            if self.lam is None:
                if k == 1:
                    out = out + c * (u > 0)
                continue
            z = u / self.lam
            if k == 1:
                out = out + c * ndtr(z)
            elif k == 2:
                out = out + c * _phi(z) / self.lam
            else:
                out = out - c * z * _phi(z) / self.lam**2
        return out


def chop() -> ScalarTestFn:
    """Clip to ``[-1, 1]``."""
    return ScalarTestFn("chop", intercept=-1.0, knots=((-1.0, 1.0), (1.0, -1.0)))


def psi_hinge() -> ScalarTestFn:
    """``max(0, |t| - 1)``."""
    return ScalarTestFn("psi_hinge", intercept=-1.0, slope=-1.0, knots=((-1.0, 1.0), (1.0, 1.0)))


def psi_ramp(r: float, s: float) -> ScalarTestFn:
    """0 below ``r - s``, 1 above ``r + s``, linear in between."""
    if s <= 0:
        raise InvalidInputError("ramp half-width s must be positive")
    c = 1.0 / (2.0 * s)
    return ScalarTestFn("psi_ramp", knots=((r - s, c), (r + s, -c)), params=(float(r), float(s)))


def polynomial_power(K: int) -> ScalarTestFn:
    if int(K) < 1:
        raise InvalidInputError("power must be a positive integer")
    return ScalarTestFn("power", power=int(K), params=(int(K),))


def identity() -> ScalarTestFn:
    return polynomial_power(1)


def mollified(base: ScalarTestFn, lam: float) -> ScalarTestFn:
    """Convolution of a piecewise-linear ``base`` with a centred Gaussian of width ``lam``."""
    if lam <= 0:
        raise InvalidInputError("smoothing width must be positive")
    if not base.is_piecewise_linear:
        raise InvalidInputError("only piecewise-linear functions can be mollified")
    return ScalarTestFn(
        f"mollified({base.kind})",
        intercept=base.intercept,
        slope=base.slope,
        knots=base.knots,
        lam=float(lam),
        params=base.params,
    )


def from_name(name: str, **kw) -> ScalarTestFn:
    """Build a test function from a config name such as ``"psi_hinge"``."""
    lam = kw.pop("lam", None)
    makers = {
        "chop": chop,
        "psi_hinge": psi_hinge,
        "psi_ramp": lambda: psi_ramp(kw["r"], kw["s"]),
        "power": lambda: polynomial_power(kw["K"]),
    }
    if name not in makers:
        raise InvalidInputError(f"unknown test function {name!r}")
    fn = makers[name]()
    return mollified(fn, lam) if lam is not None else fn
