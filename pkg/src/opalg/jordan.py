"""Jordan *-homomorphisms: detection, generated algebras, central splitting.

A Jordan *-homomorphism J splits along two central projections g, f of the
algebra Z generated by its range, ``g + f = J(1)``, into a *-representation
``pi = J(.)g`` and an anti-*-representation ``sigma = J(.)f``.  Everything here
works on the finite-dimensional block algebras of :mod:`opalg.algebra`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import ATOL, Algebra, Element, ShapeError
from .maps import LinMap, apply, compose, multiplication_map, restrict_to_blocks
from .sampling import random_element, random_hermitian, rng_for

PIVOT = 1e-10


class NotJordanError(ValueError):
    """The map fails the Jordan *-homomorphism identities."""


class JordanInconsistencyError(ArithmeticError):
    """A central piece of J is neither multiplicative nor anti-multiplicative."""


class ClosureError(ArithmeticError):
    """Span closure of the generated algebra did not stabilise."""


class KernelRankError(ArithmeticError):
    """``ker sigma`` is not the ideal cut out by the detected central projection."""


# -- identities on the matrix-unit basis -------------------------------------


def _product_table(a: Algebra) -> np.ndarray:
    """``table[n, m]`` = coordinate of ``x_n x_m`` for matrix units, or -1 if zero."""
    labels = a.basis_labels()
    n = len(labels)
    table = -np.ones((n, n), dtype=np.intp)
    for p, (i, r, s) in enumerate(labels):
        for q, (i2, t, u) in enumerate(labels):
            if i == i2 and s == t:
                table[p, q] = a.offsets[i] + r * a.dims[i] + u
    return table


def _image_stacks(t: LinMap) -> list[np.ndarray]:
    """Per codomain block, the images of all domain matrix units, shape (N, e, e)."""
    out = []
    for j, e in enumerate(t.codomain.dims):
        out.append(t.matrix[t.codomain.block_slice(j), :].T.reshape(-1, e, e))
    return out


def product_residual(t: LinMap, kind: str = "hom") -> float:
    """Largest entry of the defect of a product identity over all basis pairs.

    ``kind`` is ``"hom"`` for ``T(xy) = T(x)T(y)``, ``"anti"`` for
    ``T(xy) = T(y)T(x)`` and ``"jordan"`` for ``T(x o y) = T(x) o T(y)``.
    """
    table = _product_table(t.domain)
    mask = table >= 0
    worst = 0.0
    for ys in _image_stacks(t):
        prods = np.einsum("nab,mbc->nmac", ys, ys)
        target = np.where(mask[:, :, None, None], ys[np.where(mask, table, 0)], 0.0)
        if kind == "hom":
            res = prods - target
        elif kind == "anti":
            res = prods.transpose(1, 0, 2, 3) - target
        elif kind == "jordan":
            res = (prods + prods.transpose(1, 0, 2, 3)) / 2 - (target + target.transpose(1, 0, 2, 3)) / 2
        else:
            raise ValueError(f"unknown identity {kind!r}")
        if res.size:
            worst = max(worst, float(np.abs(res).max()))
    return worst


def adjoint_residual(t: LinMap) -> float:
    a = t.domain
    labels = a.basis_labels()
    index = {lab: n for n, lab in enumerate(labels)}
    flipped = [index[(i, s, r)] for (i, r, s) in labels]
    worst = 0.0
    for ys in _image_stacks(t):
        res = ys[flipped] - ys.conj().transpose(0, 2, 1)
        if res.size:
            worst = max(worst, float(np.abs(res).max()))
    return worst


def is_multiplicative(t: LinMap, tol: float = ATOL) -> bool:
    return product_residual(t, "hom") < tol


def is_anti_multiplicative(t: LinMap, tol: float = ATOL) -> bool:
    return product_residual(t, "anti") < tol


def jordan_residual(t: LinMap) -> float:
    return max(product_residual(t, "jordan"), adjoint_residual(t))


def is_jordan_star_hom(t: LinMap, tol: float = ATOL) -> bool:
    """Symmetrized-product and adjoint identities on every pair of matrix units."""
    return jordan_residual(t) < tol


@dataclass
class CheckResult:
    ok: bool
    max_residual: float
    seed: int
    trials: int
    witness: dict | None = None

    def __bool__(self):
        return self.ok


def hxh_check(t: LinMap, trials: int = 20, seed: int = 0, tol: float = ATOL) -> CheckResult:
    """Sampled check of ``J(h x h) = J(h) J(x) J(h)`` for Hermitian h."""
    worst, witness = 0.0, None
    for n in range(trials):
        rng = rng_for(seed, n)
        h = random_hermitian(t.domain, rng)
        x = random_element(t.domain, rng)
        jh = apply(t, h)
        res = (apply(t, h @ x @ h) - jh @ apply(t, x) @ jh).max_abs()
        if res > worst:
            worst = res
            if res >= tol:
                witness = {"h": h, "x": x, "trial": n}
    return CheckResult(worst < tol, worst, seed, trials, witness)


# -- the generated *-algebra --------------------------------------------------


def _orthonormal_rows(vectors: np.ndarray) -> np.ndarray:
    if vectors.shape[0] == 0:
        return vectors
    _, s, vh = np.linalg.svd(vectors, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return vectors[:0]
    return vh[s > PIVOT * s[0]]


def _as_blocks(a: Algebra, rows: np.ndarray) -> list[np.ndarray]:
    return [rows[:, a.block_slice(j)].reshape(-1, e, e) for j, e in enumerate(a.dims)]


def _products(a: Algebra, left: np.ndarray, right: np.ndarray) -> np.ndarray:
    parts = []
    for lb, rb in zip(_as_blocks(a, left), _as_blocks(a, right)):
        pr = np.einsum("nab,kbc->nkac", lb, rb)
        parts.append(pr.reshape(lb.shape[0] * rb.shape[0], -1))
    return np.concatenate(parts, axis=1)


@dataclass
class GeneratedAlgebra:
    """The *-algebra Z generated by the range of a map, with its centre split."""

    ambient: Algebra
    basis: list[Element]
    unit: Element
    minimal_central_projections: list[Element]
    center_dim: int

    @property
    def dim(self) -> int:
        return len(self.basis)

    def closure_residual(self) -> float:
        """How far products and adjoints of basis elements stick out of the span."""
        rows = np.stack([b.vec() for b in self.basis])
        adj = np.stack([b.adjoint().vec() for b in self.basis])
        probe = np.concatenate([_products(self.ambient, rows, rows), adj])
        proj = (probe @ rows.conj().T) @ rows
        return float(np.abs(probe - proj).max())

    def contains(self, x: Element, tol: float = 1e-8) -> bool:
        rows = np.stack([b.vec() for b in self.basis])
        v = x.vec()
        return float(np.abs(v - (rows.conj() @ v) @ rows).max()) < tol


def _split_center(ambient: Algebra, gens: np.ndarray, rows: np.ndarray, unit: Element, seed: int):
    """Centre of span(rows) and its minimal projections by eigen-splitting."""
    r = rows.shape[0]
    gb = _as_blocks(ambient, gens)
    vb = _as_blocks(ambient, rows)
    cols = []
    for k in range(r):
        parts = []
        for g, v in zip(gb, vb):
            parts.append((v[k][None] @ g - g @ v[k][None]).reshape(len(g), -1))
        cols.append(np.concatenate(parts, axis=1).reshape(-1))
    comm = np.stack(cols, axis=1)
    _, s, vh = np.linalg.svd(comm, full_matrices=True)
    # generators and span are orthonormal, so commutators are O(1) when nonzero
    scale = max(s[0], 1.0) if s.size else 1.0
    rank = int(np.sum(s > 1e-9 * scale))
    null = vh[rank:].conj()
    center = null @ rows  # rows of central elements
    center_dim = center.shape[0]
    one = ambient.one()
    for attempt in range(12):
        rng = rng_for(seed, attempt)
        # complex coefficients: the null-space basis may mix Hermitian and skew parts
        coef = rng.uniform(1.0, 2.0, center_dim) + 1j * rng.uniform(1.0, 2.0, center_dim)
        c = ambient.from_vec(coef @ center)
        h = (c + c.adjoint()) * 0.5
        spec = [np.linalg.eigh((b + b.conj().T) / 2) for b in h.blocks]
        top = max(float(np.abs(w).max(initial=0.0)) for w, _ in spec)
        shift = 2 * top + 1.0
        shifted = h + (one - unit) * shift
        entries = []
        for j, b in enumerate(shifted.blocks):
            w, v = np.linalg.eigh((b + b.conj().T) / 2)
            entries += [(float(w[m]), j, v[:, m]) for m in range(len(w))]
        entries.sort(key=lambda e: e[0])
        clusters, current = [], [entries[0]]
        gap_tol = 1e-7 * shift
        for e in entries[1:]:
            if e[0] - current[-1][0] <= gap_tol:
                current.append(e)
            else:
                clusters.append(current)
                current = [e]
        clusters.append(current)
        clusters = [c for c in clusters if abs(c[0][0] - shift) > 0.25]
        means = [np.mean([e[0] for e in c]) for c in clusters]
        gaps = np.diff(sorted(means)) if len(means) > 1 else np.array([np.inf])
        if len(clusters) != center_dim or gaps.min() < 1e-6 * shift:
            continue
        projections = []
        for cl in clusters:
            mats = [np.zeros((d, d), dtype=complex) for d in ambient.dims]
            for _, j, v in cl:
                mats[j] += np.outer(v, v.conj())
            projections.append(Element(ambient, mats))
        return center_dim, sorted(projections, key=_projection_key)
    raise ClosureError("could not separate the centre into minimal projections")


def _projection_key(z: Element):
    diag = np.concatenate([np.diag(b).real for b in z.blocks])
    v = z.vec()
    return (tuple(-np.round(diag, 6)), tuple(np.round(v.real, 6)), tuple(np.round(v.imag, 6)))


def generated_star_algebra(t: LinMap, seed: int = 0) -> GeneratedAlgebra:
    """Close the range of ``t`` under products and adjoints.

    Each round multiplies the current span on the left by the generators and
    re-orthonormalizes (Hilbert-Schmidt, relative pivot 1e-10) until the
    dimension stops growing.
    """
    ambient = t.codomain
    gens = np.concatenate([t.matrix.T, np.stack([y.adjoint().vec() for y in t.images()])])
    gens = _orthonormal_rows(gens)
    unit = ambient.from_vec(t.matrix @ t.domain.one().vec())
    rows = gens
    cap = 2 * ambient.total_dim
    for _ in range(cap):
        grown = _orthonormal_rows(np.concatenate([rows, _products(ambient, gens, rows)]))
        if grown.shape[0] == rows.shape[0]:
            break
        rows = grown
    else:
        raise ClosureError(f"span closure did not stabilise within {cap} rounds")
    if rows.shape[0] == 0:
        return GeneratedAlgebra(ambient, [], unit, [], 0)
    center_dim, projections = _split_center(ambient, gens, rows, unit, seed)
    basis = [ambient.from_vec(r) for r in rows]
    return GeneratedAlgebra(ambient, basis, unit, projections, center_dim)


# -- the central splitting J = pi + sigma -------------------------------------


@dataclass
class JordanDecomposition:
    J: LinMap
    Z: GeneratedAlgebra
    g: Element
    f: Element
    pi: LinMap
    sigma: LinMap
    assignments: list[tuple[int, str]] = field(default_factory=list)

    def block_kinds(self, tol: float = 1e-8) -> list[set[str]]:
        """For each domain block, which of ``hom``/``anti`` parts it reaches."""
        out = []
        for i in range(len(self.J.domain.blocks)):
            u = self.J.domain.block_unit(i)
            kinds = set()
            if apply(self.pi, u).max_abs() > tol:
                kinds.add("hom")
            if apply(self.sigma, u).max_abs() > tol:
                kinds.add("anti")
            out.append(kinds)
        return out


def _right_multiplied(t: LinMap, z: Element) -> LinMap:
    return compose(multiplication_map(z.parent.one(), z), t)


def stormer_decompose(t: LinMap, tol: float = ATOL, seed: int = 0) -> JordanDecomposition:
    """Assign every minimal central projection of Z to the hom part g or the anti part f.

    Blocks where ``J(.)z`` is both multiplicative and anti-multiplicative
    (commutative range) go to g.
    """
    res = jordan_residual(t)
    if res >= tol:
        raise NotJordanError(f"not a Jordan *-homomorphism (residual {res:.3e})")
    z_alg = generated_star_algebra(t, seed=seed)
    g = t.codomain.zero()
    assignments = []
    for idx, z in enumerate(z_alg.minimal_central_projections):
        piece = _right_multiplied(t, z)
        mult = product_residual(piece, "hom") < tol
        anti = product_residual(piece, "anti") < tol
        if mult and anti:
            kind = "both"
        elif mult:
            kind = "hom"
        elif anti:
            kind = "anti"
        else:
            raise JordanInconsistencyError(f"central piece {idx} is neither multiplicative nor anti-multiplicative")
        assignments.append((idx, kind))
        if kind != "anti":
            g = g + z
    f = z_alg.unit - g
    return JordanDecomposition(
        J=t,
        Z=z_alg,
        g=g,
        f=f,
        pi=_right_multiplied(t, g),
        sigma=_right_multiplied(t, f),
        assignments=assignments,
    )


def sigma_kernel_projection(d: JordanDecomposition, tol: float = 1e-8) -> Element:
    """Central projection q of the domain with ``ker sigma = qM``."""
    a = d.J.domain
    killed = [i for i in range(len(a.blocks)) if apply(d.sigma, a.block_unit(i)).max_abs() < tol]
    q = a.zero()
    for i in killed:
        q = q + a.block_unit(i)
    rest = [i for i in range(len(a.blocks)) if i not in killed]
    if rest:
        sub = restrict_to_blocks(d.sigma, rest).matrix
        s = np.linalg.svd(sub, compute_uv=False)
        rank = int(np.sum(s > 1e-9 * s[0]))
        if rank != sub.shape[1]:
            raise KernelRankError(f"sigma has rank {rank} on a complement of dimension {sub.shape[1]}")
    return q


@dataclass(frozen=True)
class SubAlgebra:
    """A direct summand of ``parent`` made of the listed blocks (possibly none)."""

    parent: Algebra
    indices: tuple[int, ...]

    @property
    def is_zero(self) -> bool:
        return not self.indices

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(self.parent.dims[i] for i in self.indices)

    @property
    def algebra(self) -> Algebra | None:
        return None if self.is_zero else self.parent.subalgebra(self.indices)

    @property
    def unit(self) -> Element:
        u = self.parent.zero()
        for i in self.indices:
            u = u + self.parent.block_unit(i)
        return u


def minimality_degree(a) -> int:
    """Largest block dimension; an algebra is n-minimal iff this is <= n (0 for the zero algebra)."""
    if a is None:
        return 0
    return max(a.dims, default=0)


@dataclass
class HomMinimalSplit:
    hom_part: SubAlgebra
    min_part: SubAlgebra
    degree: int
    q: Element
    decomposition: JordanDecomposition


def split_hom_minimal(t: LinMap, tol: float = ATOL, seed: int = 0) -> HomMinimalSplit:
    """Split the domain into ``ker sigma`` (where J is a *-homomorphism) and its complement.

    The complement is isomorphic to ``M / ker sigma``; ``degree`` is its
    minimality degree.
    """
    d = stormer_decompose(t, tol=tol, seed=seed)
    q = sigma_kernel_projection(d)
    a = t.domain
    hom = tuple(i for i in range(len(a.blocks)) if np.abs(q.blocks[i]).max() > 0.5)
    rest = tuple(i for i in range(len(a.blocks)) if i not in hom)
    hom_part, min_part = SubAlgebra(a, hom), SubAlgebra(a, rest)
    if hom:
        res = product_residual(restrict_to_blocks(t, hom), "hom")
        if res >= tol:
            raise JordanInconsistencyError(f"J is not multiplicative on ker sigma (residual {res:.3e})")
    return HomMinimalSplit(hom_part, min_part, minimality_degree(min_part), q, d)


# -- instance builder ----------------------------------------------------------


@dataclass(frozen=True)
class Target:
    """Copy of domain block ``block`` placed at ``offset`` on the diagonal of ``codomain_block``."""

    block: int
    codomain_block: int
    offset: int = 0
    kind: str = "hom"


@dataclass(frozen=True)
class JordanSpec:
    domain: Algebra
    codomain: Algebra
    targets: tuple[Target, ...]

    def kinds(self) -> list[set[str]]:
        out = [set() for _ in self.domain.blocks]
        for tg in self.targets:
            out[tg.block].add(tg.kind)
        return out


def build_jordan(spec: JordanSpec) -> LinMap:
    """``J = pi + sigma`` from identity (``hom``) and transpose (``anti``) embeddings."""
    dom, cod = spec.domain, spec.codomain
    used: dict[int, list[tuple[int, int]]] = {}
    m = np.zeros((cod.total_dim, dom.total_dim), dtype=complex)
    for tg in spec.targets:
        if tg.kind not in ("hom", "anti"):
            raise ValueError(f"target kind must be 'hom' or 'anti', got {tg.kind!r}")
        if not 0 <= tg.block < len(dom.blocks) or not 0 <= tg.codomain_block < len(cod.blocks):
            raise ShapeError(f"target {tg} refers to a missing block")
        d, e = dom.dims[tg.block], cod.dims[tg.codomain_block]
        lo, hi = tg.offset, tg.offset + d
        if lo < 0 or hi > e:
            raise ShapeError(f"target {tg} does not fit in a block of dim {e}")
        for a, b in used.get(tg.codomain_block, []):
            if lo < b and a < hi:
                raise ValueError(f"overlapping codomain targets in block {tg.codomain_block}")
        used.setdefault(tg.codomain_block, []).append((lo, hi))
        dom_off, cod_off = dom.offsets[tg.block], cod.offsets[tg.codomain_block]
        for r in range(d):
            for s in range(d):
                rr, ss = (r, s) if tg.kind == "hom" else (s, r)
                m[cod_off + (lo + rr) * e + (lo + ss), dom_off + r * d + s] = 1.0
    return LinMap(dom, cod, m)


def spec_from_kinds(domain: Algebra, kinds: Sequence[Sequence[str]], weights=None) -> JordanSpec:
    """Each copy of each block gets its own codomain block of the same dim."""
    blocks, targets = [], []
    for i, ks in enumerate(kinds):
        for kind in ks:
            targets.append(Target(i, len(blocks), 0, kind))
            blocks.append(domain.dims[i])
    w = weights if weights is not None else [1.0] * len(blocks)
    return JordanSpec(domain, Algebra.of(*blocks, weights=w), tuple(targets))
