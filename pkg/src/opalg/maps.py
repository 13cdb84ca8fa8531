"""Linear maps between block algebras and their matrix amplifications."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .algebra import Algebra, Element, ShapeError


@dataclass(frozen=True, eq=False)
class LinMap:
    """A linear map ``domain -> codomain`` acting on vectorized coordinates."""

    domain: Algebra
    codomain: Algebra
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        expected = (self.codomain.total_dim, self.domain.total_dim)
        if m.shape != expected:
            raise ShapeError(f"map matrix has shape {m.shape}, expected {expected}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __call__(self, x: Element) -> Element:
        return apply(self, x)

    def __add__(self, other: "LinMap") -> "LinMap":
        _same_type(self, other)
        return LinMap(self.domain, self.codomain, self.matrix + other.matrix)

    def __sub__(self, other: "LinMap") -> "LinMap":
        _same_type(self, other)
        return LinMap(self.domain, self.codomain, self.matrix - other.matrix)

    def __mul__(self, c) -> "LinMap":
        return LinMap(self.domain, self.codomain, c * self.matrix)

    __rmul__ = __mul__

    def hs_adjoint(self) -> "LinMap":
        """Adjoint for the unweighted Hilbert-Schmidt pairing."""
        return LinMap(self.codomain, self.domain, self.matrix.conj().T)

    def images(self) -> list[Element]:
        """Images of the domain matrix units, in coordinate order."""
        return [self.codomain.from_vec(col) for col in self.matrix.T]

    def is_zero(self, tol: float = 1e-9) -> bool:
        return float(np.abs(self.matrix).max(initial=0.0)) < tol


def _same_type(s: LinMap, t: LinMap):
    if s.domain != t.domain or s.codomain != t.codomain:
        raise ShapeError("maps have different domains or codomains")


def apply(t: LinMap, x: Element) -> Element:
    if x.parent.dims != t.domain.dims:
        raise ShapeError(f"element with dims {x.parent.dims} fed to a map on {t.domain.dims}")
    return t.codomain.from_vec(t.matrix @ x.vec())


def from_function(domain: Algebra, codomain: Algebra, fn: Callable[[Element], Element]) -> LinMap:
    cols = [fn(e).vec() for e in domain.basis()]
    return LinMap(domain, codomain, np.stack(cols, axis=1))


def identity_map(a: Algebra) -> LinMap:
    return LinMap(a, a, np.eye(a.total_dim))


def zero_map(domain: Algebra, codomain: Algebra) -> LinMap:
    return LinMap(domain, codomain, np.zeros((codomain.total_dim, domain.total_dim)))


def compose(s: LinMap, t: LinMap) -> LinMap:
    """``s o t`` (apply ``t`` first)."""
    if t.codomain.dims != s.domain.dims:
        raise ShapeError(f"cannot compose: {t.codomain.dims} -> {s.domain.dims}")
    return LinMap(t.domain, s.codomain, s.matrix @ t.matrix)


def multiplication_map(left: Element, right: Element) -> LinMap:
    """``x -> left @ x @ right`` on the algebra of ``left``."""
    a = left.parent
    n = a.total_dim
    m = np.zeros((n, n), dtype=complex)
    for i in range(len(a.blocks)):
        sl = a.block_slice(i)
        # row-major vec(L X R) = (L kron R^T) vec(X)
        m[sl, sl] = np.kron(left.blocks[i], right.blocks[i].T)
    return LinMap(a, a, m)


def compress(t: LinMap, left: Element, right: Element | None = None) -> LinMap:
    """``x -> left T(x) right`` (``right`` defaults to ``left``)."""
    right = left if right is None else right
    return compose(multiplication_map(left, right), t)


def precompose_multiplication(t: LinMap, left: Element, right: Element | None = None) -> LinMap:
    """``x -> T(left x right)``."""
    right = left if right is None else right
    return compose(t, multiplication_map(left, right))


def restrict_to_blocks(t: LinMap, indices) -> LinMap:
    """The map on the sub-algebra spanned by the given domain blocks."""
    indices = list(indices)
    sub = t.domain.subalgebra(indices)
    cols = np.concatenate([np.arange(t.domain.total_dim)[t.domain.block_slice(i)] for i in indices])
    return LinMap(sub, t.codomain, t.matrix[:, cols])


def inclusion_of_blocks(a: Algebra, indices) -> LinMap:
    """Embedding of the sub-algebra on ``indices`` into ``a``."""
    indices = list(indices)
    sub = a.subalgebra(indices)
    rows = np.concatenate([np.arange(a.total_dim)[a.block_slice(i)] for i in indices])
    m = np.zeros((a.total_dim, sub.total_dim), dtype=complex)
    m[rows, np.arange(sub.total_dim)] = 1.0
    return LinMap(sub, a, m)


@lru_cache(maxsize=256)
def _amplification_index(a: Algebra, k: int) -> np.ndarray:
    """``idx[ab, n]``: coordinate in ``M_k(a)`` of entry (a, b) of basis coordinate n."""
    amp = a.amplified(k)
    idx = np.empty((k * k, a.total_dim), dtype=np.intp)
    n = 0
    for i, d in enumerate(a.dims):
        off = amp.offsets[i]
        for r in range(d):
            for s in range(d):
                for aa in range(k):
                    for bb in range(k):
                        idx[aa * k + bb, n] = off + (aa * d + r) * (k * d) + (bb * d + s)
                n += 1
    idx.setflags(write=False)
    return idx


def amplify(t: LinMap, k: int) -> LinMap:
    """``id_{M_k} (x) T`` between ``M_k(domain)`` and ``M_k(codomain)``.

    An element of ``M_k(A)`` is a k-by-k matrix of elements of ``A``; in each
    block of dim d it is stored as the ``k*d`` square matrix ``sum_ab e_ab kron x_ab``.
    """
    if k < 1:
        raise ValueError("amplification level must be >= 1")
    if k == 1:
        return t
    di = _amplification_index(t.domain, k)
    ci = _amplification_index(t.codomain, k)
    big = np.zeros((ci.size, di.size), dtype=complex)
    for ab in range(k * k):
        big[np.ix_(ci[ab], di[ab])] = t.matrix
    return LinMap(t.domain.amplified(k), t.codomain.amplified(k), big)


def amplified_apply(t: LinMap, k: int, x: Element) -> Element:
    """Evaluate ``amplify(t, k)(x)`` without forming the big matrix."""
    return t.codomain.amplified(k).from_vec(amplified_apply_vec(t, k, x.vec()))


def amplified_apply_vec(t: LinMap, k: int, xvec: np.ndarray) -> np.ndarray:
    di = _amplification_index(t.domain, k)
    ci = _amplification_index(t.codomain, k)
    out = np.zeros(ci.size, dtype=complex)
    out[ci] = xvec[di] @ t.matrix.T
    return out


def entangled_witnesses(a: Algebra, k: int):
    """Per block i, the elements ``sum e_rs kron e_rs`` and ``sum e_rs kron e_sr`` of ``M_k(a)``.

    Indices run over ``r, s < min(k, d_i)``.  They are the extremal inputs for
    the transpose: the first is mapped to the swap, the swap to the first.
    """
    amp = a.amplified(k)
    for i, d in enumerate(a.dims):
        m = min(k, d)
        if m < 2:
            continue
        omega = np.zeros((k * d, k * d), dtype=complex)
        swap = np.zeros((k * d, k * d), dtype=complex)
        for r in range(m):
            for s in range(m):
                omega[r * d + r, s * d + s] = 1.0
                swap[r * d + s, s * d + r] = 1.0
        for mat in (omega, swap):
            mats = [np.zeros((k * e, k * e), dtype=complex) for e in a.dims]
            mats[i] = mat
            yield i, Element(amp, mats)


def embed_level(x: Element, base: Algebra, k_from: int, k_to: int) -> Element:
    """Place an element of ``M_{k_from}(base)`` in the top-left corner of ``M_{k_to}(base)``."""
    out = []
    for blk, d in zip(x.blocks, base.dims):
        y = np.zeros((k_to * d, k_to * d), dtype=complex)
        y[: k_from * d, : k_from * d] = blk
        out.append(y)
    return Element(base.amplified(k_to), out)


def transpose_map(a: Algebra) -> LinMap:
    """Blockwise transpose ``a -> a``."""
    n = a.total_dim
    perm = np.empty(n, dtype=np.intp)
    for i, d in enumerate(a.dims):
        off = a.offsets[i]
        for r in range(d):
            for s in range(d):
                perm[off + r * d + s] = off + s * d + r
    m = np.zeros((n, n))
    m[perm, np.arange(n)] = 1.0
    return LinMap(a, a, m)


def opposite_transfer(a: Algebra) -> LinMap:
    """``Id: A -> A^op`` realized on ``A`` itself through the blockwise transpose."""
    return transpose_map(a)


def is_adjoint_preserving(t: LinMap, tol: float = 1e-9) -> bool:
    worst = 0.0
    for x, y in zip(t.domain.basis(), t.images()):
        worst = max(worst, (apply(t, x.adjoint()) - y.adjoint()).max_abs())
    return worst < tol
