import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opalg.algebra import Algebra, ShapeError
from opalg.maps import (
    LinMap,
    amplified_apply,
    amplify,
    compose,
    from_function,
    identity_map,
    is_adjoint_preserving,
    multiplication_map,
    opposite_transfer,
    transpose_map,
)
from opalg.positivity import choi
from opalg.sampling import ginibre, random_element, rng_for


def random_linmap(domain, codomain, seed):
    return LinMap(domain, codomain, ginibre(rng_for(seed), (codomain.total_dim, domain.total_dim)))


def omega(d):
    """sum_ij e_ij (x) e_ij as a (d*d) x (d*d) matrix."""
    v = np.zeros(d * d)
    for r in range(d):
        v[r * d + r] = 1.0
    return np.outer(v, v)


def swap(d):
    s = np.zeros((d * d, d * d))
    for r in range(d):
        for c in range(d):
            s[r * d + c, c * d + r] = 1.0
    return s


def test_linmap_shape_checked():
    with pytest.raises(ShapeError):
        LinMap(Algebra.of(2), Algebra.of(2), np.zeros((3, 4)))


def test_apply_is_linear():
    a, b = Algebra.of(2, 1), Algebra.of(3)
    t = random_linmap(a, b, 0)
    x, y = random_element(a, rng_for(1)), random_element(a, rng_for(2))
    lhs = t(x * (2 - 1j) + y * 0.5)
    rhs = t(x) * (2 - 1j) + t(y) * 0.5
    assert lhs.allclose(rhs, atol=1e-12)


def test_from_function_matches_direct_application():
    a = Algebra.of(2)
    u = random_element(a, rng_for(3))
    t = from_function(a, a, lambda x: u @ x @ u.adjoint())
    x = random_element(a, rng_for(4))
    assert t(x).allclose(u @ x @ u.adjoint(), atol=1e-12)
    assert multiplication_map(u, u.adjoint())(x).allclose(u @ x @ u.adjoint(), atol=1e-12)


def test_amplify_identity_and_level_one():
    a = Algebra.of(2, 1)
    amp = amplify(identity_map(a), 3)
    assert amp.domain == a.amplified(3)
    assert np.array_equal(amp.matrix, np.eye(a.amplified(3).total_dim))
    t = random_linmap(a, Algebra.of(3), 5)
    assert np.array_equal(amplify(t, 1).matrix, t.matrix)


def test_amplify_rejects_zero():
    with pytest.raises(ValueError):
        amplify(identity_map(Algebra.of(2)), 0)


def test_amplified_transpose_sends_omega_to_swap():
    a = Algebra.of(2)
    x = a.amplified(2).element(omega(2))
    assert np.array_equal(amplified_apply(transpose_map(a), 2, x).blocks[0], swap(2))
    assert np.array_equal(amplify(transpose_map(a), 2)(x).blocks[0], swap(2))


def test_amplified_weights_unchanged():
    a = Algebra.of(2, 3, weights=[0.5, 2.0])
    assert a.amplified(2).dims == (4, 6)
    assert a.amplified(2).weights == (0.5, 2.0)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 3))
def test_amplify_respects_composition(seed, k):
    a, b, c = Algebra.of(2), Algebra.of(1, 2), Algebra.of(3)
    s, t = random_linmap(b, c, seed), random_linmap(a, b, seed + 1)
    lhs = amplify(compose(s, t), k).matrix
    rhs = amplify(s, k).matrix @ amplify(t, k).matrix
    assert np.allclose(lhs, rhs, atol=1e-12)


def test_opposite_transfer_examples():
    abelian = Algebra.of(1, 1, 1)
    assert np.array_equal(opposite_transfer(abelian).matrix, np.eye(3))
    a = Algebra.of(2)
    assert opposite_transfer(a)(a.matrix_unit(0, 0, 1)).allclose(a.matrix_unit(0, 1, 0), atol=0)


@pytest.mark.parametrize("dims", [(1,), (2,), (2, 3), (1, 3, 2)])
def test_opposite_transfer_is_involution(dims):
    t = opposite_transfer(Algebra.of(*dims))
    assert np.array_equal(compose(t, t).matrix, np.eye(t.domain.total_dim))


def test_choi_of_transpose_is_swap():
    c = choi(transpose_map(Algebra.of(2)))
    assert np.array_equal(c.blocks[(0, 0)], swap(2))
    assert sorted(np.round(np.linalg.eigvalsh(c.matrix), 12)) == [-1.0, 1.0, 1.0, 1.0]


def adjoint_preserving_map(a, b, seed):
    """``x -> sum_i (u_i x_i u_i* + v_i x_i^T v_i*)`` into a single block of b."""
    e = b.dims[0]

    def fn(x):
        out = np.zeros((e, e), dtype=complex)
        for blk in x.blocks:
            d = blk.shape[0]
            u = ginibre(rng_for(seed, 1, d), (e, d))
            v = ginibre(rng_for(seed, 2, d), (e, d))
            out += u @ blk @ u.conj().T + v @ blk.T @ v.conj().T
        return b.element(out)

    return from_function(a, b, fn)


@pytest.mark.parametrize("seed", range(6))
def test_choi_hermitian_iff_adjoint_preserving(seed):
    a, b = Algebra.of(2, 1), Algebra.of(2)
    preserving = adjoint_preserving_map(a, b, seed)
    generic = random_linmap(a, b, seed + 100)
    assert is_adjoint_preserving(preserving)
    assert not is_adjoint_preserving(generic)
    for t in (preserving, generic):
        assert (choi(t).hermitian_residual() < 1e-9) == is_adjoint_preserving(t)
