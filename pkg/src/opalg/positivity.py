"""Choi matrices, n-positivity searches and norm-preservation probes."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import PSD_TOL, Algebra, Element, lp_norm
from .maps import LinMap, amplified_apply, amplified_apply_vec, entangled_witnesses
from .sampling import random_element, random_unit_vector, rng_for


@dataclass(frozen=True)
class ChoiMatrix:
    """Choi blocks ``C_ij = sum_rs e_rs kron T(e_rs^(i))_j`` for every block pair (i, j).

    Complete positivity of T is equivalent to every ``C_ij`` being PSD.
    """

    domain_dims: tuple[int, ...]
    codomain_dims: tuple[int, ...]
    blocks: dict

    @property
    def matrix(self) -> np.ndarray:
        """All blocks assembled block-diagonally, ordered by (i, j)."""
        mats = [self.blocks[key] for key in sorted(self.blocks)]
        n = sum(m.shape[0] for m in mats)
        out = np.zeros((n, n), dtype=complex)
        pos = 0
        for m in mats:
            out[pos : pos + m.shape[0], pos : pos + m.shape[0]] = m
            pos += m.shape[0]
        return out

    def hermitian_residual(self) -> float:
        return max(float(np.abs(m - m.conj().T).max()) for m in self.blocks.values())

    def eigen(self):
        """``(value, (i, j), vector)`` of the most negative eigenvalue."""
        best = None
        for key, m in sorted(self.blocks.items()):
            w, v = np.linalg.eigh((m + m.conj().T) / 2)
            if best is None or w[0] < best[0]:
                best = (float(w[0]), key, v[:, 0])
        return best

    def min_eigenvalue(self) -> float:
        return self.eigen()[0]


def choi(t: LinMap) -> ChoiMatrix:
    blocks = {}
    for i, d in enumerate(t.domain.dims):
        col0 = t.domain.offsets[i]
        for j, e in enumerate(t.codomain.dims):
            rows = t.codomain.block_slice(j)
            c = np.zeros((d * e, d * e), dtype=complex)
            for r in range(d):
                for s in range(d):
                    img = t.matrix[rows, col0 + r * d + s].reshape(e, e)
                    c[r * e : (r + 1) * e, s * e : (s + 1) * e] = img
            blocks[(i, j)] = c
    return ChoiMatrix(t.domain.dims, t.codomain.dims, blocks)


def is_completely_positive(t: LinMap, tol: float = PSD_TOL) -> bool:
    c = choi(t)
    return c.hermitian_residual() < tol and c.min_eigenvalue() >= -tol


@dataclass(frozen=True)
class CertifiedNo:
    """A positive input of ``M_n(domain)`` whose image has a negative eigenvalue."""

    level: int
    witness: Element
    min_eigenvalue: float
    method: str
    seed: int

    positive = False


@dataclass(frozen=True)
class ProbablyYes:
    """No witness found.  Only a certificate when ``certified`` (exact Choi test)."""

    level: int
    min_eigenvalue: float
    method: str
    seed: int
    restarts: int = 0
    iterations: int = 0
    certified: bool = False

    positive = True


def _vv_star(a: Algebra, block: int, v: np.ndarray) -> Element:
    mats = [np.zeros((d, d), dtype=complex) for d in a.dims]
    mats[block] = np.outer(v, v.conj())
    return Element(a, mats)


def _image_min_eig(t: LinMap, n: int, x: Element):
    y = amplified_apply(t, n, x)
    best = (np.inf, None, None)
    non_herm = 0.0
    for j, blk in enumerate(y.blocks):
        non_herm = max(non_herm, float(np.abs(blk - blk.conj().T).max(initial=0.0)))
        w, v = np.linalg.eigh((blk + blk.conj().T) / 2)
        if w[0] < best[0]:
            best = (float(w[0]), j, v[:, 0])
    return best, non_herm


def _choi_witness(t: LinMap, n: int, c: ChoiMatrix) -> Element:
    """Lift a negative Choi eigenvector to a positive input of ``M_n(domain)``."""
    _, (i, j), psi = c.eigen()
    d, e = t.domain.dims[i], t.codomain.dims[j]
    amp = t.domain.amplified(n)
    if n >= d:
        # the canonical input sum_rs e_rs kron e_rs; its image is C_ij itself
        v = np.zeros(n * d, dtype=complex)
        for r in range(d):
            v[r * d + r] = 1.0
        return _vv_star(amp, i, v)
    # n < d: compress along the Schmidt vectors of psi (rank <= min(d, e) <= n)
    u, _, _ = np.linalg.svd(psi.reshape(d, e))
    m = min(d, e)
    a_mat = np.zeros((n, d), dtype=complex)
    a_mat[:m] = u[:, :m].conj().T
    v = np.zeros(n * d, dtype=complex)
    for r in range(d):
        v += np.kron(a_mat[:, r], np.eye(d)[r])
    return _vv_star(amp, i, v)


def is_n_positive(
    t: LinMap,
    n: int,
    restarts: int = 16,
    iterations: int = 200,
    seed: int = 0,
    tol: float = PSD_TOL,
):
    """Search for a witness that ``id_{M_n} (x) t`` is not positive.

    Above the Choi threshold (``n >= max_ij min(d_i, e_j)``) the answer is
    exact.  Below it the search alternates exact eigenvector steps on the
    bilinear form ``<u, T_n(v v*) u>``: every step can only lower it.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    threshold = max(min(d, e) for d in t.domain.dims for e in t.codomain.dims)
    if n >= threshold:
        c = choi(t)
        lam = c.min_eigenvalue()
        if lam < -tol or c.hermitian_residual() >= tol:
            w = _choi_witness(t, n, c)
            (value, _, _), _ = _image_min_eig(t, n, w)
            return CertifiedNo(n, w, value, "choi", seed)
        return ProbablyYes(n, lam, "choi", seed, certified=True)

    dom = t.domain.amplified(n)
    cod = t.codomain.amplified(n)
    starts = []
    for i, d in enumerate(t.domain.dims):
        m = min(n, d)
        v = np.zeros(n * d, dtype=complex)
        for r in range(m):
            v[r * d + r] = 1.0 / np.sqrt(m)
        starts.append((i, v))
    for r in range(restarts):
        rng = rng_for(seed, n, r)
        i = int(rng.integers(len(t.domain.dims)))
        starts.append((i, random_unit_vector(rng, n * t.domain.dims[i])))

    best_value, best_input = np.inf, None
    adj = t.hs_adjoint()
    for i, v in starts:
        x = _vv_star(dom, i, v)
        (value, j, u), non_herm = _image_min_eig(t, n, x)
        if non_herm > tol:
            return CertifiedNo(n, x, value, "search", seed)
        for _ in range(iterations):
            g = _vv_star(cod, j, u)
            back = dom.from_vec(amplified_apply_vec(adj, n, g.vec()))
            cand = None
            for bi, blk in enumerate(back.blocks):
                w, vecs = np.linalg.eigh((blk + blk.conj().T) / 2)
                if cand is None or w[0] < cand[0]:
                    cand = (float(w[0]), bi, vecs[:, 0])
            x_new = _vv_star(dom, cand[1], cand[2])
            (new_value, j_new, u_new), non_herm = _image_min_eig(t, n, x_new)
            if non_herm > tol:
                return CertifiedNo(n, x_new, new_value, "search", seed)
            if new_value > value - 1e-13:
                break
            x, value, j, u = x_new, new_value, j_new, u_new
            if value < -tol:
                break
        if value < best_value:
            best_value, best_input = value, x
        if best_value < -tol:
            return CertifiedNo(n, best_input, best_value, "search", seed)
    return ProbablyYes(n, best_value, "search", seed, restarts, iterations)


@dataclass
class ProbeResult:
    """Outcome of a sampled norm-preservation probe.  ``ok`` is not a certificate."""

    ok: bool
    p: float
    seed: int
    samples: int
    max_ratio: float
    min_ratio: float
    counterexample: Element | None = None
    counterexample_level: int | None = None
    ratios: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok


def _ratio(t: LinMap, k: int, x: Element, p: float) -> float:
    nx = lp_norm(x.parent, x, p)
    y = amplified_apply(t, k, x)
    return lp_norm(y.parent, y, p) / nx


def _probe(t: LinMap, p: float, levels, trials: int, seed: int, tol: float, structured: bool) -> ProbeResult:
    res = ProbeResult(True, float(p), int(seed), 0, -np.inf, np.inf)
    worst = 0.0
    for k in levels:
        amp = t.domain.amplified(k)
        samples = [random_element(amp, rng_for(seed, k, s)) for s in range(trials)]
        if structured:
            samples += [w for _, w in entangled_witnesses(t.domain, k)]
        level_max = -np.inf
        for x in samples:
            r = _ratio(t, k, x, p)
            res.samples += 1
            level_max = max(level_max, r)
            res.max_ratio = max(res.max_ratio, r)
            res.min_ratio = min(res.min_ratio, r)
            if abs(r - 1.0) > tol and abs(r - 1.0) > worst:
                worst = abs(r - 1.0)
                res.ok = False
                res.counterexample = x
                res.counterexample_level = k
        res.ratios[k] = level_max
    return res


def probe_isometry(t: LinMap, p: float, trials: int = 20, seed: int = 0, tol: float = 1e-6) -> ProbeResult:
    """Check ``||T x||_p == ||x||_p`` on seeded random samples (relative tolerance)."""
    return _probe(t, p, [1], trials, seed, tol, structured=False)


def probe_complete_isometry(
    t: LinMap, p: float, k_max: int = 3, trials: int = 10, seed: int = 0, tol: float = 1e-6
) -> ProbeResult:
    """Like :func:`probe_isometry` on every amplification level ``1..k_max``.

    Besides random samples each level also tries the entangled inputs of
    :func:`entangled_witnesses`, which expose transposed blocks.
    """
    return _probe(t, p, range(1, k_max + 1), trials, seed, tol, structured=True)
