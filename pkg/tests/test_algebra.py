import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opalg.algebra import (
    Algebra,
    NotPositiveError,
    ShapeError,
    abs_power,
    lp_norm,
    pinv_sqrt,
    positive_power,
    support_projection,
    trace,
)
from opalg.sampling import random_element, random_positive, random_unitary, random_unit_vector, rng_for

P_VALUES = [1.0, 4.0 / 3.0, 2.0, 3.0, np.inf]


def schatten_oracle(mats, weights, p):
    """Weighted Schatten norm straight from numpy's singular values."""
    svals = [np.linalg.svd(m, compute_uv=False) for m in mats]
    if np.isinf(p):
        return max(s.max() for s in svals)
    return sum(w * np.sum(s**p) for w, s in zip(weights, svals)) ** (1 / p)


algebras = st.lists(
    st.tuples(st.integers(1, 3), st.floats(0.5, 2.0)), min_size=1, max_size=3
).map(lambda bs: Algebra.of(*[d for d, _ in bs], weights=[w for _, w in bs]))


# -- construction --------------------------------------------------------------


def test_algebra_invariants():
    a = Algebra.of(2, 3, weights=[1.0, 0.5])
    assert a.total_dim == 4 + 9
    assert a.unit_trace() == pytest.approx(2 * 1.0 + 3 * 0.5)


@pytest.mark.parametrize("dims,weights", [((), None), ((0,), None), ((2,), [0.0]), ((2,), [-1.0])])
def test_algebra_rejects_bad_blocks(dims, weights):
    with pytest.raises(ValueError):
        Algebra.of(*dims, weights=weights)


def test_element_shape_checked():
    a = Algebra.of(2)
    with pytest.raises(ShapeError):
        a.element(np.eye(3))
    with pytest.raises(ShapeError):
        trace(Algebra.of(3), a.one())


def test_vectorization_roundtrip():
    a = Algebra.of(2, 1, 3)
    x = random_element(a, rng_for(0))
    assert a.from_vec(x.vec()).allclose(x, atol=0)


# -- trace ---------------------------------------------------------------------


def test_trace_of_unit():
    assert trace(Algebra.of(2), Algebra.of(2).one()) == pytest.approx(2)
    a = Algebra.of(1, weights=[4.0])
    assert trace(a, a.one()) == pytest.approx(4)


def test_trace_is_tracial():
    a = Algebra.of(3)
    x, y = random_element(a, rng_for(1)), random_element(a, rng_for(2))
    assert abs(trace(a, x @ y) - trace(a, y @ x)) < 1e-12


# -- L^p norms -----------------------------------------------------------------


def test_lp_norm_examples():
    a = Algebra.of(2)
    assert lp_norm(a, a.element(np.diag([3.0, 4.0])), 2) == pytest.approx(5)
    proj = a.element(np.diag([1.0, 0.0]))
    for p in [1, 1.5, 3, 7]:
        assert lp_norm(a, proj, p) == pytest.approx(1)
    assert lp_norm(a, proj, np.inf) == pytest.approx(1)
    b = Algebra.of(1, weights=[4.0])
    assert lp_norm(b, b.one(), 2) == pytest.approx(2)


def test_lp_norm_rejects_small_p():
    a = Algebra.of(2)
    with pytest.raises(ValueError):
        lp_norm(a, a.one(), 0.5)


@pytest.mark.parametrize("p", P_VALUES)
def test_lp_norm_matches_numpy(p):
    a = Algebra.of(2, 3, weights=[0.7, 1.6])
    x = random_element(a, rng_for(3))
    assert lp_norm(a, x, p) == pytest.approx(schatten_oracle(x.blocks, a.weights, p), rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(algebras, st.integers(0, 10_000), st.sampled_from(P_VALUES))
def test_norm_unitary_and_adjoint_invariance(a, seed, p):
    x = random_element(a, rng_for(seed))
    u, v = random_unitary(a, rng_for(seed, 1)), random_unitary(a, rng_for(seed, 2))
    n = lp_norm(a, x, p)
    assert abs(lp_norm(a, x.adjoint(), p) - n) < 1e-9 * max(n, 1)
    assert abs(lp_norm(a, u @ x @ v, p) - n) < 1e-9 * max(n, 1)


@settings(max_examples=30, deadline=None)
@given(algebras, st.integers(0, 10_000))
def test_norm_monotone_in_p_for_normalized_trace(a, seed):
    # tau(1) = 1: Jensen makes ||x||_p non-decreasing in p
    a = a.normalized()
    x = random_element(a, rng_for(seed))
    norms = [lp_norm(a, x, p) for p in P_VALUES]
    assert all(lo <= hi * (1 + 1e-12) for lo, hi in zip(norms, norms[1:]))


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(1, 3), min_size=1, max_size=3), st.integers(0, 10_000))
def test_norm_non_increasing_in_p_for_unit_weights(dims, seed):
    # weights >= 1 and integer traces: the classical Schatten ordering
    a = Algebra.of(*dims)
    x = random_element(a, rng_for(seed))
    norms = [lp_norm(a, x, p) for p in P_VALUES]
    assert all(hi <= lo * (1 + 1e-12) for lo, hi in zip(norms, norms[1:]))


# -- spectral calculus ----------------------------------------------------------


def test_abs_power_examples():
    a = Algebra.of(2)
    assert abs_power(a.element(np.diag([-2.0, 3.0])), 1).allclose(a.element(np.diag([2.0, 3.0])))
    x = random_positive(a, rng_for(4))
    assert abs_power(x, 1).allclose(x, atol=1e-9)
    # e_12* e_12 = e_22 by hand
    assert abs_power(a.matrix_unit(0, 0, 1), 2).allclose(a.element(np.diag([0.0, 1.0])))


def test_support_projection_examples():
    a = Algebra.of(2)
    assert support_projection(a.element(np.diag([0.0, 5.0]))).allclose(a.element(np.diag([0.0, 1.0])))
    assert support_projection(a.one()).allclose(a.one())
    c = Algebra.of(3)
    v = random_unit_vector(rng_for(5), 3)
    vv = c.element(np.outer(v, v.conj()))
    assert support_projection(vv * 3.0).allclose(vv)


def test_support_projection_rejects_non_positive():
    a = Algebra.of(2)
    with pytest.raises(NotPositiveError):
        support_projection(a.element(np.diag([1.0, -1.0])))


def test_pinv_sqrt_examples():
    a = Algebra.of(2)
    assert pinv_sqrt(a.element(np.diag([4.0, 0.0]))).allclose(a.element(np.diag([0.5, 0.0])))
    assert pinv_sqrt(a.one()).allclose(a.one())
    assert pinv_sqrt(a.zero()).allclose(a.zero())


@pytest.mark.parametrize("seed", range(5))
def test_pinv_sqrt_inverts_on_support(seed):
    a = Algebra.of(3, 2)
    rng = rng_for(seed)
    # rank-deficient positive element
    g = rng.normal(size=(3, 2)) + 1j * rng.normal(size=(3, 2))
    b = a.element(g @ g.conj().T, np.diag([2.0, 0.0]))
    r = pinv_sqrt(b)
    assert (r @ r @ b).allclose(support_projection(b), atol=1e-9)
    assert (r @ b @ r).allclose(support_projection(b), atol=1e-9)


def test_positive_power_matches_eigh():
    a = Algebra.of(3)
    b = random_positive(a, rng_for(6))
    w, v = np.linalg.eigh(b.blocks[0])
    oracle = (v * w**1.5) @ v.conj().T
    assert np.allclose(positive_power(b, 1.5).blocks[0], oracle, atol=1e-10)


def test_predicates_idempotent():
    a = Algebra.of(2, 2)
    x = random_positive(a, rng_for(7))
    assert x.is_positive() == x.is_positive()
    p = support_projection(x)
    assert p.is_projection() and p.is_partial_isometry() and p.is_hermitian()
