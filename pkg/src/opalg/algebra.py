"""Finite-dimensional von Neumann algebras and their elements.

An :class:`Algebra` is a direct sum of full matrix blocks ``M_{d_1} + ... + M_{d_m}``,
each carrying a positive trace weight ``mu_i``; the trace is
``tau(x) = sum_i mu_i * Tr(x_i)``.  Elements are tuples of square complex
matrices, one per block.

Coordinates: an element is vectorized by flattening every block row-major and
concatenating the results in block order.  Every linear map in the package
uses this convention, so composition is a plain matrix product.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

ATOL = 1e-9
PSD_TOL = 1e-9
RELATIVE_CUTOFF = 1e-10


class ShapeError(ValueError):
    """Raised when an element does not fit the algebra it is used with."""


class NotPositiveError(ValueError):
    """Raised when an operation requires a positive element and gets something else."""


@dataclass(frozen=True)
class Block:
    dim: int
    weight: float = 1.0


@dataclass(frozen=True)
class Algebra:
    blocks: tuple[Block, ...]

    def __post_init__(self):
        blocks = tuple(b if isinstance(b, Block) else Block(*b) for b in self.blocks)
        if not blocks:
            raise ValueError("an algebra needs at least one block")
        for b in blocks:
            if int(b.dim) != b.dim or b.dim < 1:
                raise ValueError(f"block dimension must be a positive integer, got {b.dim}")
            if not b.weight > 0:
                raise ValueError(f"block weight must be strictly positive, got {b.weight}")
        object.__setattr__(
            self, "blocks", tuple(Block(int(b.dim), float(b.weight)) for b in blocks)
        )

    @classmethod
    def of(cls, *dims: int, weights: Sequence[float] | None = None) -> "Algebra":
        """``Algebra.of(1, 3)`` is C + M_3 with unit weights."""
        if weights is None:
            weights = [1.0] * len(dims)
        return cls(tuple(Block(d, w) for d, w in zip(dims, weights)))

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(b.dim for b in self.blocks)

    @property
    def weights(self) -> tuple[float, ...]:
        return tuple(b.weight for b in self.blocks)

    @property
    def total_dim(self) -> int:
        return sum(d * d for d in self.dims)

    @property
    def offsets(self) -> tuple[int, ...]:
        out, acc = [], 0
        for d in self.dims:
            out.append(acc)
            acc += d * d
        return tuple(out)

    def block_slice(self, i: int) -> slice:
        start = self.offsets[i]
        return slice(start, start + self.dims[i] ** 2)

    def unit_trace(self) -> float:
        return sum(b.weight * b.dim for b in self.blocks)

    def amplified(self, k: int) -> "Algebra":
        """The algebra ``M_k(A)``: every block of dim d becomes dim k*d, weights kept."""
        if k < 1:
            raise ValueError("amplification level must be >= 1")
        return Algebra(tuple(Block(k * b.dim, b.weight) for b in self.blocks))

    def normalized(self) -> "Algebra":
        """Same blocks, weights rescaled so that the unit has trace one."""
        s = self.unit_trace()
        return Algebra(tuple(Block(b.dim, b.weight / s) for b in self.blocks))

    def subalgebra(self, indices: Sequence[int]) -> "Algebra":
        return Algebra(tuple(self.blocks[i] for i in indices))

    # element constructors

    def zero(self) -> "Element":
        return Element(self, tuple(np.zeros((d, d), dtype=complex) for d in self.dims))

    def one(self) -> "Element":
        return Element(self, tuple(np.eye(d, dtype=complex) for d in self.dims))

    def block_unit(self, i: int) -> "Element":
        """The minimal central projection ``1_i`` sitting on block ``i``."""
        mats = [np.zeros((d, d), dtype=complex) for d in self.dims]
        mats[i] = np.eye(self.dims[i], dtype=complex)
        return Element(self, tuple(mats))

    def matrix_unit(self, i: int, r: int, s: int) -> "Element":
        mats = [np.zeros((d, d), dtype=complex) for d in self.dims]
        mats[i][r, s] = 1.0
        return Element(self, tuple(mats))

    def basis(self) -> Iterator["Element"]:
        """Matrix units in coordinate order."""
        for i, d in enumerate(self.dims):
            for r in range(d):
                for s in range(d):
                    yield self.matrix_unit(i, r, s)

    def basis_labels(self) -> list[tuple[int, int, int]]:
        return [(i, r, s) for i, d in enumerate(self.dims) for r in range(d) for s in range(d)]

    def element(self, *mats) -> "Element":
        return Element(self, tuple(np.asarray(m, dtype=complex) for m in mats))

    def from_vec(self, vec: np.ndarray) -> "Element":
        vec = np.asarray(vec, dtype=complex).reshape(-1)
        if vec.size != self.total_dim:
            raise ShapeError(f"vector of length {vec.size} for algebra of dimension {self.total_dim}")
        return Element(
            self,
            tuple(vec[self.block_slice(i)].reshape(d, d) for i, d in enumerate(self.dims)),
        )


class Element:
    """A block-diagonal matrix tuple belonging to an :class:`Algebra`.

    Blocks are stored read-only; arithmetic returns new elements.
    """

    __slots__ = ("parent", "blocks")

    def __init__(self, parent: Algebra, blocks: Sequence[np.ndarray]):
        blocks = tuple(np.array(b, dtype=complex) for b in blocks)
        if len(blocks) != len(parent.blocks):
            raise ShapeError(f"expected {len(parent.blocks)} blocks, got {len(blocks)}")
        for b, d in zip(blocks, parent.dims):
            if b.shape != (d, d):
                raise ShapeError(f"block of shape {b.shape} where ({d}, {d}) was expected")
            b.setflags(write=False)
        self.parent = parent
        self.blocks = blocks

    def __repr__(self):
        return f"Element(dims={self.parent.dims}, blocks={[b.tolist() for b in self.blocks]})"

    def vec(self) -> np.ndarray:
        return np.concatenate([b.reshape(-1) for b in self.blocks])

    def _check(self, other: "Element"):
        if not isinstance(other, Element):
            return NotImplemented
        if other.parent.dims != self.parent.dims:
            raise ShapeError(f"elements of algebras {self.parent.dims} and {other.parent.dims}")
        return None

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return Element(self.parent, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return Element(self.parent, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __neg__(self):
        return Element(self.parent, [-a for a in self.blocks])

    def __mul__(self, c):
        if not np.isscalar(c):
            return NotImplemented
        return Element(self.parent, [c * a for a in self.blocks])

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self * (1.0 / c)

    def __matmul__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return Element(self.parent, [a @ b for a, b in zip(self.blocks, other.blocks)])

    def adjoint(self) -> "Element":
        return Element(self.parent, [a.conj().T for a in self.blocks])

    @property
    def H(self) -> "Element":
        return self.adjoint()

    def transpose(self) -> "Element":
        return Element(self.parent, [a.T for a in self.blocks])

    def frobenius(self) -> float:
        return float(np.sqrt(sum(np.vdot(a, a).real for a in self.blocks)))

    def max_abs(self) -> float:
        return max(float(np.abs(a).max()) for a in self.blocks)

    def allclose(self, other: "Element", atol: float = ATOL) -> bool:
        return (self - other).max_abs() <= atol

    def is_hermitian(self, tol: float = ATOL) -> bool:
        return (self - self.adjoint()).max_abs() < tol

    def is_positive(self, tol: float = PSD_TOL) -> bool:
        if not self.is_hermitian(tol):
            return False
        return min_eigenvalue(self) >= -tol

    def is_projection(self, tol: float = ATOL) -> bool:
        return self.is_hermitian(tol) and (self @ self - self).max_abs() < tol

    def is_partial_isometry(self, tol: float = ATOL) -> bool:
        return (self.adjoint() @ self).is_projection(tol)


def _herm(a: np.ndarray) -> np.ndarray:
    return (a + a.conj().T) / 2


def min_eigenvalue(x: Element) -> float:
    """Smallest eigenvalue of the Hermitian part of ``x`` over all blocks."""
    return min(float(np.linalg.eigvalsh(_herm(b))[0]) for b in x.blocks)


def max_eigenvalue(x: Element) -> float:
    return max(float(np.linalg.eigvalsh(_herm(b))[-1]) for b in x.blocks)


def _member(a: Algebra, x: Element):
    if x.parent.dims != a.dims:
        raise ShapeError(f"element with block dims {x.parent.dims} does not belong to {a.dims}")


def trace(a: Algebra, x: Element) -> complex:
    _member(a, x)
    return complex(sum(w * np.trace(b) for w, b in zip(a.weights, x.blocks)))


def singular_values(x: Element) -> list[np.ndarray]:
    return [np.linalg.svd(b, compute_uv=False) for b in x.blocks]


def lp_norm(a: Algebra, x: Element, p: float) -> float:
    """Noncommutative L^p norm ``tau(|x|^p)^(1/p)``; operator norm for ``p = inf``."""
    _member(a, x)
    p = float(p)
    if not p >= 1:
        raise ValueError(f"L^p norms need p >= 1, got {p}")
    svals = singular_values(x)
    if np.isinf(p):
        return float(max(s.max(initial=0.0) for s in svals))
    total = sum(w * np.sum(s**p) for w, s in zip(a.weights, svals))
    return float(total ** (1.0 / p))


def abs_power(x: Element, r: float) -> Element:
    """``|x|^r = (x* x)^(r/2)``, blockwise."""
    out = []
    for b in x.blocks:
        _, s, vh = np.linalg.svd(b)
        out.append((vh.conj().T * s**r) @ vh)
    return Element(x.parent, out)


def _positive_spectrum(b: Element, what: str):
    if not b.is_hermitian(ATOL * max(1.0, b.max_abs())):
        raise NotPositiveError(f"{what}: element is not Hermitian")
    spectra = [np.linalg.eigh(_herm(m)) for m in b.blocks]
    top = max((float(w[-1]) for w, _ in spectra), default=0.0)
    low = min(float(w[0]) for w, _ in spectra)
    if low < -PSD_TOL * max(1.0, top):
        raise NotPositiveError(f"{what}: element has eigenvalue {low:.3e}")
    return spectra, top


def _default_cutoff(top: float) -> float:
    return RELATIVE_CUTOFF * top if top > 0 else 0.0


def support_projection(b: Element, cutoff: float | None = None) -> Element:
    """Spectral projection of a positive element onto eigenvalues above ``cutoff``.

    The default cutoff is relative: 1e-10 times the largest eigenvalue.
    """
    spectra, top = _positive_spectrum(b, "support_projection")
    if cutoff is None:
        cutoff = _default_cutoff(top)
    out = []
    for w, v in spectra:
        keep = v[:, w > cutoff]
        out.append(keep @ keep.conj().T)
    return Element(b.parent, out)


def pinv_sqrt(b: Element, cutoff: float | None = None) -> Element:
    """Inverse square root of a positive element on its support, zero elsewhere."""
    spectra, top = _positive_spectrum(b, "pinv_sqrt")
    if cutoff is None:
        cutoff = _default_cutoff(top)
    out = []
    for w, v in spectra:
        mask = w > cutoff
        keep = v[:, mask]
        out.append((keep / np.sqrt(w[mask])) @ keep.conj().T)
    return Element(b.parent, out)


def positive_power(b: Element, r: float) -> Element:
    """``b^r`` for positive ``b`` (zero stays zero for r > 0)."""
    spectra, _ = _positive_spectrum(b, "positive_power")
    out = []
    for w, v in spectra:
        w = np.clip(w, 0.0, None)
        out.append((v * w**r) @ v.conj().T)
    return Element(b.parent, out)


def sqrt_positive(b: Element) -> Element:
    return positive_power(b, 0.5)


def commutator_norm(x: Element, y: Element) -> float:
    return (x @ y - y @ x).max_abs()


def hs_inner(x: Element, y: Element) -> complex:
    """Unweighted Hilbert-Schmidt inner product ``sum_i Tr(x_i^* y_i)``."""
    return complex(np.vdot(x.vec(), y.vec()))
