import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import cgauss
from helpers import all_signs, eval_terms_reversed
from ncmaj.errors import InvalidInputError
from ncmaj.fourier import CubeFunction, dictator, from_function
from ncmaj.linalg import embed_iota
from ncmaj.ncpoly import (
    NCPoly,
    embed,
    evaluate,
    evaluate_naive,
    evaluate_rowblocks,
    evaluate_top,
    from_cube_function,
    from_terms,
    random_ncpoly,
    variance,
)

seeds = st.integers(0, 2**32 - 1)


def test_dictator_polynomial():
    Q = from_cube_function(dictator(3, 1, 2))
    A = np.arange(4.0).reshape(2, 2)
    np.testing.assert_allclose(Q(np.eye(2), A, np.eye(2)), A)
    assert Q.degree == 1


def test_product_polynomial_is_ordered(gen):
    f = from_function(lambda s: np.array([[s[0] * s[1]]]), 2, 1)
    Q = from_cube_function(CubeFunction(2, 2, {3: np.eye(2)}))
    assert set(f.coeffs) == {3}
    A = np.array([[0, 1], [0, 0]], dtype=complex)
    B = np.array([[0, 0], [1, 0]], dtype=complex)
    np.testing.assert_allclose(Q(A, B), A @ B)
    assert not np.allclose(Q(A, B), B @ A)


def test_scalar_inputs():
    Q = NCPoly(2, 2, {1: np.eye(2) / np.sqrt(2), 2: np.eye(2) / np.sqrt(2)})
    for b in (1, -1):
        for c in (1, -1):
            np.testing.assert_allclose(Q(b, c), (b + c) / np.sqrt(2) * np.eye(2), atol=1e-14)


@given(seeds)
def test_evaluate_matches_reversed_term_oracle(seed):
    g = np.random.default_rng(seed)
    m, n = 3, int(g.integers(1, 4))
    Q = random_ncpoly(g, m, n, 3)
    xs = [cgauss(g, (n, n)) for _ in range(m)]
    ref = eval_terms_reversed(dict(Q.coeffs), xs)
    np.testing.assert_allclose(evaluate(Q, xs), ref, atol=1e-11 * max(1, np.abs(ref).max()))


@given(seeds)
def test_prefix_sharing_is_bit_exact_small_m(seed):
    g = np.random.default_rng(seed)
    m, n = int(g.integers(1, 5)), int(g.integers(1, 4))
    Q = random_ncpoly(g, m, n, m, density=0.7)
    xs = [cgauss(g, (n, n)) for _ in range(m)]
    np.testing.assert_array_equal(evaluate(Q, xs), evaluate_naive(Q, xs))


@given(seeds)
def test_scalar_roundtrip_with_cube_function(seed):
    g = np.random.default_rng(seed)
    m, n = int(g.integers(1, 5)), int(g.integers(1, 3))
    Q = random_ncpoly(g, m, n, m)
    f = Q.to_cube_function()
    for s in all_signs(m):
        np.testing.assert_allclose(Q(*[float(x) for x in s]), f(s), atol=1e-12)
    vals = Q.boolean_values()
    np.testing.assert_allclose(vals, f.values(), atol=1e-12)


def test_batched_evaluation(gen):
    Q = random_ncpoly(gen, 3, 2, 2)
    xs = [cgauss(gen, (5, 2, 2)) for _ in range(3)]
    out = evaluate(Q, xs)
    for b in range(5):
        np.testing.assert_allclose(out[b], evaluate(Q, [x[b] for x in xs]), atol=1e-12)


def test_wrong_inputs(gen):
    Q = random_ncpoly(gen, 2, 2, 1)
    with pytest.raises(InvalidInputError):
        Q(np.eye(2))
    with pytest.raises(InvalidInputError):
        Q(np.eye(3), np.eye(3))
    with pytest.raises(InvalidInputError):
        NCPoly(2, 2, {4: np.eye(2)})
    with pytest.raises(InvalidInputError):
        NCPoly(2, 2, {1: np.eye(3)})


def test_input_order_matters_only_for_noncommuting_inputs():
    Q = NCPoly(2, 2, {3: np.eye(2)})
    A = np.array([[0, 1], [0, 0]], dtype=complex)
    B = np.array([[0, 0], [1, 0]], dtype=complex)
    assert not np.allclose(Q(A, B), Q(B, A))
    D1, D2 = np.diag([1.0, 2.0]), np.diag([3.0, -1.0])
    np.testing.assert_allclose(Q(D1, D2), Q(D2, D1))


def test_embed_examples(gen):
    Q = random_ncpoly(gen, 3, 2, 2)
    P = embed(Q, 5)
    np.testing.assert_allclose(P.influences(), Q.influences(), rtol=0, atol=0)
    assert P.mass() == Q.mass()
    assert P.embedded and P.n_var == 5 and P.n_coeff == 5
    np.testing.assert_allclose(P.coefficient(1), embed_iota(Q.coeffs.get(1, np.zeros((2, 2))), 5))
    same = embed(Q, 2)
    assert not same.embedded
    for s in Q.coeffs:
        np.testing.assert_array_equal(same.coeffs[s], Q.coeffs[s])
    for s in all_signs(3):
        a = P(*[float(x) for x in s])
        b = Q(*[float(x) for x in s])
        assert np.trace(a @ a.conj().T).real / 2 == pytest.approx(np.trace(b @ b.conj().T).real / 2, abs=1e-12)
    with pytest.raises(InvalidInputError):
        embed(Q, 1)


@given(seeds)
def test_rowblock_evaluation_matches_dense(seed):
    g = np.random.default_rng(seed)
    m, n, p = 3, int(g.integers(1, 3)), int(g.integers(3, 6))
    Q = embed(random_ncpoly(g, m, n, 3), p)
    blocks = [cgauss(g, (n, p)) for _ in range(m)]
    dense = []
    for A in blocks:
        X = np.zeros((p, p), dtype=complex)
        X[:n] = A
        dense.append(X)
    full = evaluate(Q, dense)
    np.testing.assert_allclose(evaluate_rowblocks(Q, blocks), full[:n], atol=1e-11)
    np.testing.assert_allclose(full[n:], 0)
    np.testing.assert_allclose(evaluate_top(Q, dense), full[:n], atol=1e-12)


def test_variance_examples(gen):
    assert variance(NCPoly(2, 2, {0: np.eye(2)})) == 0
    assert variance(from_cube_function(dictator(3, 0, 4))) == pytest.approx(4)
    Q = random_ncpoly(gen, 3, 2, 3)
    vals = Q.boolean_values()
    mean = vals.mean(axis=0)
    ref = np.mean([np.trace((v - mean) @ (v - mean).conj().T).real for v in vals])
    assert variance(Q) == pytest.approx(ref, abs=1e-10)


def test_from_terms_and_json(gen):
    Q = from_terms(3, 2, [((0, 2), np.eye(2)), ((2, 0), np.eye(2)), ((1,), 2 * np.eye(2))])
    np.testing.assert_allclose(Q.coeffs[5], 2 * np.eye(2))
    P = embed(random_ncpoly(gen, 3, 2, 2), 4)
    back = NCPoly.from_json(P.to_json())
    assert back.p == 4 and back.embedded
    assert P.to_json()["embedded"] is True
    for s in P.coeffs:
        np.testing.assert_array_equal(back.coeffs[s], P.coeffs[s])
