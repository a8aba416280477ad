"""Generators of test functions on the cube with known influence and degree."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .ensembles import complex_gaussian, haar_unitary
from .errors import InvalidInputError
from .fourier import CubeFunction, dictator, from_function, max_influence
from .ncpoly import NCPoly, from_cube_function


@dataclass(frozen=True)
class FamilyMember:
    label: str
    f: CubeFunction
    tau: float
    degree: int

    @property
    def poly(self) -> NCPoly:
        return from_cube_function(self.f)

    def describe(self) -> dict:
        return {"label": self.label, "m": self.f.m, "n": self.f.n, "tau": self.tau, "degree": self.degree}


def _member(label: str, f: CubeFunction) -> FamilyMember:
    return FamilyMember(label, f, max_influence(f), f.degree)


def max_opnorm(f: CubeFunction) -> float:
    vals = f.values()
    return float(np.linalg.svd(vals, compute_uv=False)[:, 0].max())


def unit_ball_scaled(f: CubeFunction) -> CubeFunction:
    """Scale ``f`` so that ``max_sigma ||f(sigma)|| = 1``."""
    top = max_opnorm(f)
    if top == 0:
        return f
    return f.map_coeffs(lambda s, c: c / top)


def dictator_member(m: int, n: int, i: int = 0) -> FamilyMember:
    return _member(f"dictator(i={i})", dictator(m, i, n))


def spread_level1(m: int, n: int, gen: np.random.Generator, *, normalized: bool = False) -> FamilyMember:
    """``fhat({i}) = U_i / sqrt(m)`` with Haar ``U_i``; every influence is ``n/m``.

    With ``normalized=True`` the function is rescaled into the unit ball, which
    lowers the influences by the square of the scale.
    """
    U = haar_unitary(gen, n, (m,))
    f = CubeFunction(m, n, {1 << i: U[i] / np.sqrt(m) for i in range(m)})
    if normalized:
        f = unit_ball_scaled(f)
    return _member("spread level-1" + (" (unit ball)" if normalized else ""), f)


def random_degree(m: int, n: int, d: int, gen: np.random.Generator) -> FamilyMember:
    """Coefficient mass ``1/binom(m, d)`` on every level-``d`` subset, then scaled into the unit ball."""
    if not 1 <= d <= m:
        raise InvalidInputError("need 1 <= d <= m")
    w = 1.0 / np.sqrt(comb(m, d))
    coeffs = {}
    for idx in combinations(range(m), d):
        G = complex_gaussian(gen, (n, n))
        coeffs[sum(1 << i for i in idx)] = w * G / np.linalg.norm(G)
    return _member(f"random degree {d}", unit_ball_scaled(CubeFunction(m, n, coeffs)))


def majority(m: int) -> FamilyMember:
    """Scalar majority ``sign(sigma_1 + ... + sigma_m)`` for odd ``m``."""
    if m % 2 == 0:
        raise InvalidInputError("majority needs an odd number of variables")
    f = from_function(lambda s: np.array([[np.sign(s.sum())]]), m, 1)
    return _member(f"majority({m})", f)


def averaged_sum(m: int, n: int = 1) -> NCPoly:
    """``(X_1 + ... + X_m) / sqrt(m)`` with identity coefficients."""
    return NCPoly(m, n, {1 << i: np.eye(n) / np.sqrt(m) for i in range(m)})


def random_poly_member(m: int, n: int, d: int, gen: np.random.Generator) -> FamilyMember:
    """Dense random coefficients on every subset of size at most ``d``."""
    from .ncpoly import random_ncpoly

    Q = random_ncpoly(gen, m, n, d)
    return _member(f"random poly (deg <= {d})", Q.to_cube_function())


def family(name: str, m: int, n: int, gen: np.random.Generator, **kw) -> FamilyMember:
    """Look up a family by its config name."""
    if name == "dictator":
        return dictator_member(m, n, kw.get("i", 0))
    if name == "spread":
        return spread_level1(m, n, gen, normalized=kw.get("normalized", False))
    if name == "random":
        return random_degree(m, n, kw.get("d", 2), gen)
    if name == "majority":
        return majority(m)
    raise InvalidInputError(f"unknown family {name!r}; choose dictator, spread, random or majority")
