import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.stats import ks_2samp

from conftest import random_unitary
from ncmaj.ensembles import (
    EnsembleSpec,
    check_moment_bound,
    embed_rotate_dense,
    haar_block_damping_check,
    haar_columns,
    haar_unitary,
    sample,
    sample_batch,
    standard_frame,
)
from ncmaj.errors import InvalidInputError
from ncmaj.linalg import dagger
from ncmaj.montecarlo import RngStream, mc_estimates


def test_rademacher_sample():
    vals = {sample(EnsembleSpec.rademacher(), RngStream(1, i)) for i in range(40)}
    assert vals == {1, -1}


@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_haar_draws_are_unitary(p, seed):
    H = haar_unitary(np.random.default_rng(seed), p, (4,))
    for h in H:
        assert np.abs(dagger(h) @ h - np.eye(p)).max() <= 1e-10


def test_haar_one_is_a_phase():
    H = sample(EnsembleSpec.haar(1), RngStream(3))
    assert abs(H[0, 0]) == pytest.approx(1.0, abs=1e-15)


def test_haar_invariance_ks():
    gen = np.random.default_rng(0)
    W = random_unitary(gen, 3)
    H1 = haar_unitary(np.random.default_rng(1), 3, (10_000,))
    H2 = haar_unitary(np.random.default_rng(2), 3, (10_000,))
    a = np.trace(W @ H1, axis1=1, axis2=2).real
    b = np.trace(H2, axis1=1, axis2=2).real
    assert ks_2samp(a, b).pvalue > 0.01


def test_frame_constructor_checks():
    with pytest.raises(InvalidInputError):
        EnsembleSpec.gaussian_frame(np.stack([np.eye(2), np.eye(2)]))
    V = standard_frame(2)
    spec = EnsembleSpec.gaussian_frame(V)
    assert spec.n == 2 and spec.frame.shape == (4, 2, 2)
    # one-sided frame: sum V V* = I but sum V* V != I
    W = np.zeros((2, 2, 2), dtype=complex)
    W[0, 0, 0] = W[1, 1, 0] = 1
    with pytest.raises(InvalidInputError):
        EnsembleSpec.gaussian_frame(W)
    with pytest.raises(InvalidInputError):
        EnsembleSpec("gaussian_frame", n=2)
    with pytest.raises(InvalidInputError):
        EnsembleSpec.embed_rotate(EnsembleSpec.gue(3), 2)
    with pytest.raises(InvalidInputError):
        EnsembleSpec("nope")
    with pytest.raises(InvalidInputError):
        EnsembleSpec.gaussian_frame(np.eye(2))


def test_frame_second_moment_and_mean():
    spec = EnsembleSpec.gaussian_frame(standard_frame(2))

    def kernel(stream, count):
        G = sample_batch(spec, stream.generator(), count)
        P = (G @ dagger(G)).reshape(count, -1)
        g = G.reshape(count, -1)
        return np.concatenate([P.real, P.imag, g.real, g.imag], axis=1)

    ests = mc_estimates(kernel, 100_000, RngStream(4), [str(i) for i in range(16)])
    target = np.concatenate([np.eye(2).ravel(), np.zeros(4), np.zeros(8)])
    for est, t in zip(ests, target):
        assert est.within(t), (est.mean, est.stderr, t)


def test_explicit_and_implicit_standard_frame_agree_in_law():
    a = sample_batch(EnsembleSpec.gaussian_frame(standard_frame(2)), np.random.default_rng(0), 20_000)
    b = sample_batch(EnsembleSpec.gaussian_frame(n=2), np.random.default_rng(1), 20_000)
    assert ks_2samp(a[:, 0, 1].real, b[:, 0, 1].real).pvalue > 0.01


def test_gue_is_hermitian_with_identity_second_moment():
    G = sample_batch(EnsembleSpec.gue(4), np.random.default_rng(0), 20_000)
    assert np.abs(G - dagger(G)).max() == 0
    np.testing.assert_allclose((G @ dagger(G)).mean(axis=0), np.eye(4), atol=0.03)


def test_embed_rotate_shape_and_norm():
    spec = EnsembleSpec.embed_rotate(EnsembleSpec.gaussian_frame(n=2), 5)
    X = sample(spec, RngStream(0))
    assert X.shape == (5, 5)
    np.testing.assert_array_equal(X[2:], 0)
    G = np.arange(4.0).reshape(2, 2)
    H = haar_unitary(np.random.default_rng(0), 5)
    D = embed_rotate_dense(G, H)
    np.testing.assert_allclose(np.linalg.svd(D, compute_uv=False)[:2], np.linalg.svd(G, compute_uv=False))


def test_spec_json_roundtrip():
    specs = [EnsembleSpec.rademacher(), EnsembleSpec.haar(3), EnsembleSpec.gue(2),
             EnsembleSpec.gaussian_frame(n=2), EnsembleSpec.gaussian_frame(standard_frame(2)),
             EnsembleSpec.embed_rotate(EnsembleSpec.gaussian_frame(n=2), 6)]
    for s in specs:
        back = EnsembleSpec.from_json(s.to_json())
        assert back.kind == s.kind and back.dim == s.dim
    assert EnsembleSpec.from_json({"kind": "haar", "p": 4}).dim == 4


def test_moment_constants():
    haar = check_moment_bound(EnsembleSpec.haar(3), 2, 500, RngStream(1))
    assert haar.mean == pytest.approx(1.0, abs=1e-12)
    frame = EnsembleSpec.gaussian_frame(n=2)
    c2 = check_moment_bound(frame, 2, 20_000, RngStream(2))
    assert c2.mean <= 2 + 3 * c2.stderr
    c3 = check_moment_bound(frame, 3, 20_000, RngStream(3))
    assert c3.mean <= 6 + 3 * c3.stderr
    with pytest.raises(InvalidInputError):
        check_moment_bound(frame, 0, 10, RngStream(0))


def test_haar_damping_examples():
    exact = haar_block_damping_check(np.eye(2), np.eye(2), 2, 100, RngStream(0))
    assert exact.mean == pytest.approx(1.0, abs=1e-12)
    d = haar_block_damping_check(np.eye(2), np.eye(2), 32, 20_000, RngStream(1))
    assert d.mean <= 4 / 32 + 3 * d.stderr
    scaled = haar_block_damping_check(3 * np.eye(2), np.eye(2), 32, 20_000, RngStream(1))
    assert scaled.mean == pytest.approx(9 * d.mean, rel=1e-12)
    with pytest.raises(InvalidInputError):
        haar_block_damping_check(np.diag([1.0, -1.0]), np.eye(2), 4, 10, RngStream(0))
    with pytest.raises(InvalidInputError):
        haar_block_damping_check(np.eye(2), np.eye(2), 1, 10, RngStream(0))


def test_haar_columns_orthonormal():
    C = haar_columns(np.random.default_rng(0), 6, 2, (3,))
    for c in C:
        np.testing.assert_allclose(dagger(c) @ c, np.eye(2), atol=1e-12)


def test_sampling_is_reproducible():
    spec = EnsembleSpec.embed_rotate(EnsembleSpec.gue(2), 4)
    np.testing.assert_array_equal(sample(spec, RngStream(9, 2)), sample(spec, RngStream(9, 2)))
