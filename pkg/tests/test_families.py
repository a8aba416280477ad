import numpy as np
import pytest

from ncmaj.errors import InvalidInputError
from ncmaj.estimators import max_opnorm_exact
from ncmaj.families import averaged_sum, family, majority, random_degree, spread_level1, unit_ball_scaled
from ncmaj.fourier import CubeFunction


def test_spread_influences():
    mem = spread_level1(8, 2, np.random.default_rng(0))
    np.testing.assert_allclose(mem.f.influences(), 2 / 8)
    assert mem.tau == pytest.approx(0.25) and mem.degree == 1
    unit = spread_level1(8, 2, np.random.default_rng(0), normalized=True)
    assert max_opnorm_exact(unit.f) == pytest.approx(1.0)
    assert unit.tau < mem.tau


def test_random_degree_in_unit_ball():
    mem = random_degree(6, 2, 2, np.random.default_rng(1))
    assert mem.degree == 2 and max_opnorm_exact(mem.f) == pytest.approx(1.0)
    with pytest.raises(InvalidInputError):
        random_degree(3, 2, 4, np.random.default_rng(0))


def test_majority_values():
    f = majority(5).f
    s = np.array([1, 1, -1, -1, 1])
    assert f(s)[0, 0] == pytest.approx(1.0)
    with pytest.raises(InvalidInputError):
        majority(4)


def test_unit_ball_scaling_and_lookup():
    f = CubeFunction(2, 1, {1: np.array([[3.0]])})
    assert max_opnorm_exact(unit_ball_scaled(f)) == pytest.approx(1.0)
    zero = CubeFunction(2, 1, {})
    assert unit_ball_scaled(zero) is zero
    gen = np.random.default_rng(2)
    assert family("dictator", 3, 2, gen).tau == pytest.approx(2.0)
    assert family("majority", 3, 1, gen).f.m == 3
    with pytest.raises(InvalidInputError):
        family("nope", 3, 1, gen)
    assert averaged_sum(4).coefficient(1)[0, 0] == pytest.approx(0.5)
