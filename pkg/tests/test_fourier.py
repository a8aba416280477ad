import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import cgauss
from helpers import all_signs, fourier_by_loops
from ncmaj.errors import EnumerationLimitError, InvalidInputError
from ncmaj.fourier import (
    CubeFunction,
    apply_trho,
    constant,
    convolve,
    dictator,
    fourier_transform,
    from_function,
    influence,
    inverse_transform,
    level_eq,
    level_gt,
    level_le,
    max_influence,
    noise_kernel,
    plancherel_inner,
    pointwise_inner,
    project_levels,
    sign_table,
)

seeds = st.integers(0, 2**32 - 1)


def random_cube(g, m, n, density=1.0):
    coeffs = {s: cgauss(g, (n, n)) for s in range(1 << m) if g.random() < density}
    return CubeFunction(m, n, coeffs)


def test_constant_and_dictator_transforms(gen):
    A = cgauss(gen, (2, 2))
    f = fourier_transform(np.stack([A] * 8))
    assert set(f.coeffs) == {0}
    np.testing.assert_allclose(f.coefficient(0), A, atol=1e-14)
    g = from_function(lambda s: s[1] * np.eye(3), 3, 3)
    assert set(g.coeffs) == {1 << 1}
    np.testing.assert_allclose(g.coefficient(2), np.eye(3), atol=1e-14)


def test_transform_matches_double_loop(gen):
    m, n = 3, 2
    table = {tuple(s): cgauss(gen, (n, n)) for s in all_signs(m)}
    f = from_function(lambda s: table[tuple(int(x) for x in s)], m, n)
    ref = fourier_by_loops(lambda s: table[tuple(s)], m)
    for s, c in ref.items():
        np.testing.assert_allclose(f.coefficient(s), c, atol=1e-12)
    for s in all_signs(m):
        np.testing.assert_allclose(inverse_transform(f, s), table[tuple(s)], atol=1e-12)


def test_inverse_transform_rejects_bad_signs(gen):
    f = dictator(2, 0, 1)
    with pytest.raises(InvalidInputError):
        inverse_transform(f, [1, 0])
    with pytest.raises(InvalidInputError):
        inverse_transform(f, [1, 1, 1])


def test_bad_tables():
    with pytest.raises(InvalidInputError):
        fourier_transform(np.zeros((3, 2, 2)))
    with pytest.raises(InvalidInputError):
        fourier_transform([np.zeros((2, 2)), np.zeros((3, 3))])
    with pytest.raises(EnumerationLimitError):
        dictator(21, 0, 1).values()


def test_sign_table_order():
    t = sign_table(2)
    np.testing.assert_array_equal(t, [[1, 1], [-1, 1], [1, -1], [-1, -1]])


def test_influence_examples(gen):
    f = dictator(4, 2, 3)
    np.testing.assert_allclose(f.influences(), [0, 0, 3, 0])
    assert influence(f, 2) == 3
    assert max_influence(constant(3, np.eye(2))) == 0
    with pytest.raises(InvalidInputError):
        influence(f, 4)


@given(seeds)
def test_influence_matches_derivative_form(seed):
    g = np.random.default_rng(seed)
    m, n = int(g.integers(1, 5)), int(g.integers(1, 3))
    f = random_cube(g, m, n, 0.7)
    signs = all_signs(m)
    for i in range(m):
        total = 0.0
        for s in signs:
            t = s.copy()
            t[i] = -t[i]
            d = (f(s) - f(t)) / 2
            total += np.trace(d @ d.conj().T).real
        assert influence(f, i) == pytest.approx(total / len(signs), abs=1e-10)
    deg_mass = sum(bin(s).count("1") * np.vdot(c, c).real for s, c in f.coeffs.items())
    assert f.influences().sum() == pytest.approx(deg_mass, abs=1e-10)


@given(seeds)
def test_plancherel(seed):
    g = np.random.default_rng(seed)
    m, n = int(g.integers(0, 7)), int(g.integers(1, 4))
    f, h = random_cube(g, m, n, 0.6), random_cube(g, m, n, 0.6)
    a, b = plancherel_inner(f, h), pointwise_inner(f, h)
    assert abs(a - b) <= 1e-9 * max(1.0, abs(a))
    assert pointwise_inner(f, f).real == pytest.approx(f.mass(), rel=1e-9, abs=1e-12)


@given(seeds, st.floats(0, 1), st.floats(0, 1))
def test_trho_semigroup(seed, r1, r2):
    g = np.random.default_rng(seed)
    f = random_cube(g, 3, 2)
    a = apply_trho(apply_trho(f, r1), r2)
    b = apply_trho(f, r1 * r2)
    for s in range(8):
        np.testing.assert_allclose(a.coefficient(s), b.coefficient(s), atol=1e-12)
    assert apply_trho(f, r1).mass() <= f.mass() + 1e-12


def test_trho_endpoints(gen):
    f = random_cube(gen, 3, 2)
    one = apply_trho(f, 1.0)
    for s in range(8):
        np.testing.assert_array_equal(one.coefficient(s), f.coefficient(s))
    zero = apply_trho(f, 0.0)
    for s in range(1, 8):
        np.testing.assert_array_equal(zero.coefficient(s), 0)
    with pytest.raises(InvalidInputError):
        apply_trho(f, 1.5)
    with pytest.raises(InvalidInputError):
        apply_trho(f, -0.1)


def test_level_projections(gen):
    f = random_cube(gen, 4, 2)
    full = project_levels(f, level_le(4))
    assert set(full.coeffs) == set(f.coeffs)
    d = dictator(4, 1, 2)
    assert set(project_levels(d, level_eq(1)).coeffs) == {2}
    lo, hi = project_levels(f, level_le(2)), project_levels(f, level_gt(2))
    assert lo.mass() + hi.mass() == pytest.approx(f.mass(), abs=1e-10)
    for s in range(16):
        np.testing.assert_array_equal(lo.coefficient(s) + hi.coefficient(s), f.coefficient(s))


def test_convolution(gen):
    m = 3
    f = random_cube(gen, m, 2)
    h = random_cube(gen, m, 2)
    conv = convolve(f, h)
    signs = all_signs(m)
    for s in signs:
        ref = sum(f(s * w) @ h(w) for w in signs) / 2**m
        np.testing.assert_allclose(conv(s), ref, atol=1e-11)
    kernel = noise_kernel(m, 0.3, 2)
    smoothed = convolve(f, kernel)
    target = apply_trho(f, 0.3)
    for s in range(1 << m):
        np.testing.assert_allclose(smoothed.coefficient(s), target.coefficient(s), atol=1e-10)
    ident = convolve(constant(m, np.eye(2)), h)
    assert set(ident.coeffs) <= {0}
    np.testing.assert_allclose(ident.coefficient(0), h.coefficient(0))


def test_noise_kernel_values():
    k = noise_kernel(2, 0.5)
    for s in all_signs(2):
        assert k(s)[0, 0].real == pytest.approx((1 + 0.5 * s[0]) * (1 + 0.5 * s[1]))


@given(seeds)
def test_bounded_functions_have_small_influence(seed):
    g = np.random.default_rng(seed)
    m, n = int(g.integers(1, 6)), int(g.integers(1, 4))
    vals = cgauss(g, (1 << m, n, n))
    norms = np.linalg.svd(vals, compute_uv=False)[:, 0]
    f = fourier_transform(vals / norms.max())
    assert max_influence(f) <= n + 1e-10


@given(seeds)
def test_influence_convex(seed):
    g = np.random.default_rng(seed)
    f, h = random_cube(g, 3, 2), random_cube(g, 3, 2)
    mid = CubeFunction(3, 2, {s: 0.5 * f.coefficient(s) + 0.5 * h.coefficient(s) for s in range(8)})
    assert np.all(mid.influences() <= 0.5 * f.influences() + 0.5 * h.influences() + 1e-12)


def test_json_roundtrip(gen):
    f = random_cube(gen, 3, 2, 0.5)
    back = CubeFunction.from_json(f.to_json())
    assert set(back.coeffs) == set(f.coeffs)
    for s in f.coeffs:
        np.testing.assert_array_equal(back.coefficient(s), f.coefficient(s))


def test_immutable(gen):
    f = random_cube(gen, 2, 2)
    with pytest.raises(ValueError):
        f.coefficient(0)[0, 0] = 1
    with pytest.raises(TypeError):
        f.coeffs[1] = np.eye(2)

