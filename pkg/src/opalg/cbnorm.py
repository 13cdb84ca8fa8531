"""Completely bounded norms between amplified Schatten-type L^p spaces.

Three sources of numbers, kept apart on purpose:

* ``transpose_cb_oracle`` -- the closed form ``n^|1 - 2/p|`` for the transpose on S^p_n;
* ``cb_lower_bound`` -- nonconvex ascent on ``||T_k(X)||_p / ||X||_p``; always a lower bound;
* ``cb_norm_structural`` -- exact value at ``p = inf`` for a decomposed Jordan map.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import Algebra, Element, lp_norm
from .jordan import JordanDecomposition, minimality_degree, stormer_decompose
from .maps import (
    LinMap,
    amplified_apply,
    amplified_apply_vec,
    embed_level,
    entangled_witnesses,
    opposite_transfer,
)
from .sampling import random_element, rng_for

SMOOTHING = 1e-8


@dataclass
class CbEstimate:
    lower: float
    upper: float | None
    level: int
    witness: Element | None
    certified: bool
    p: float = float("inf")
    by_level: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.upper is not None and self.lower > self.upper * (1 + 1e-9) + 1e-12:
            raise ValueError(f"lower bound {self.lower} exceeds upper bound {self.upper}")


def transpose_cb_oracle(n: int, p: float) -> float:
    """cb norm of the transpose on S^p_n: ``n^|1 - 2/p|`` (exponent 1 at p = inf)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    p = float(p)
    exponent = 1.0 if np.isinf(p) else abs(1.0 - 2.0 / p)
    return float(n) ** exponent


def norm_ratio(t: LinMap, k: int, x: Element, p: float) -> float:
    """``||T_k(x)||_p / ||x||_p`` for ``x`` in ``M_k(domain)``."""
    y = amplified_apply(t, k, x)
    return lp_norm(y.parent, y, p) / lp_norm(x.parent, x, p)


def _split(vec: np.ndarray, dims) -> list[np.ndarray]:
    out, pos = [], 0
    for d in dims:
        out.append(vec[pos : pos + d * d].reshape(d, d))
        pos += d * d
    return out


def _batched_svd(blocks):
    """SVDs of a list of square matrices, one LAPACK call per distinct size."""
    out = [None] * len(blocks)
    by_size: dict[int, list[int]] = {}
    for n, b in enumerate(blocks):
        by_size.setdefault(b.shape[0], []).append(n)
    for idx in by_size.values():
        u, s, vh = np.linalg.svd(np.stack([blocks[n] for n in idx]))
        for m, n in enumerate(idx):
            out[n] = (u[m], s[m], vh[m])
    return out


def _log_norm_grad(svds, weights, p: float):
    """Norm of a block tuple and the real-inner-product gradient of ``log ||.||_p``."""
    if np.isinf(p):
        top = [(s[0] if s.size else 0.0) for _, s, _ in svds]
        j = int(np.argmax(top))
        grads = [np.zeros((len(s), len(s)), dtype=complex) for _, s, _ in svds]
        u, _, vh = svds[j]
        grads[j] = np.outer(u[:, 0], vh[0]) / top[j]
        return top[j], np.concatenate([g.reshape(-1) for g in grads])
    total = sum(w * np.sum(s**p) for w, (_, s, _) in zip(weights, svds))
    grads = []
    for w, (u, s, vh) in zip(weights, svds):
        s_eff = np.maximum(s, SMOOTHING) ** (p - 1)
        grads.append((w / total) * ((u * s_eff) @ vh).reshape(-1))
    return total ** (1.0 / p), np.concatenate(grads)


def _dual_element(svds, weights, r: float):
    """Norming element ``U S^(r-1) V*`` of a block tuple in L^r, flattened; also its norm."""
    total = sum(w * np.sum(s**r) for w, (_, s, _) in zip(weights, svds))
    norm = total ** (1.0 / r)
    parts = [((u * s ** (r - 1)) @ vh).reshape(-1) for u, s, vh in svds]
    return np.concatenate(parts) / norm ** (r - 1), norm


def _power_ascend(t: LinMap, adj: LinMap, k: int, x: Element, p: float, iterations: int):
    """Dual power iteration for ``1 < p < inf``; the ratio never decreases."""
    dom = x.parent
    cod = t.codomain.amplified(k)
    q = p / (p - 1)
    w_dom = np.concatenate([np.full(d * d, w) for d, w in zip(dom.dims, dom.weights)])
    w_cod = np.concatenate([np.full(d * d, w) for d, w in zip(cod.dims, cod.weights)])

    def ratio(v):
        y = amplified_apply_vec(t, k, v)
        svds = _batched_svd(_split(y, cod.dims) + _split(v, dom.dims))
        ny = sum(w * np.sum(s**p) for w, (_, s, _) in zip(cod.weights, svds[: len(cod.dims)])) ** (1 / p)
        nx = sum(w * np.sum(s**p) for w, (_, s, _) in zip(dom.weights, svds[len(cod.dims) :])) ** (1 / p)
        return ny / nx, y, svds[: len(cod.dims)]

    v = x.vec()
    val, y, ysvd = ratio(v)
    for _ in range(iterations):
        d_cod, _ = _dual_element(ysvd, cod.weights, p)
        z = amplified_apply_vec(adj, k, w_cod * d_cod) / w_dom
        zsvd = _batched_svd(_split(z, dom.dims))
        cand, _ = _dual_element(zsvd, dom.weights, q)
        cval, cy, csvd = ratio(cand)
        if cval <= val * (1 + 1e-13):
            if cval > val:
                v, val = cand, cval
            break
        v, val, ysvd = cand, cval, csvd
    return val, dom.from_vec(v)


def _ascend(t: LinMap, adj: LinMap, k: int, x: Element, p: float, iterations: int):
    """Normalized gradient ascent of the norm ratio on the Frobenius sphere.

    The step halves whenever a move fails to improve the ratio and grows by a
    quarter after a successful one; the run also stops once 25 consecutive
    iterations gain less than 1e-8 (relative).  Smooth exponents
    ``1 < p < inf`` go through the dual power iteration instead.
    """
    if 1 < p < np.inf:
        return _power_ascend(t, adj, k, x, p, iterations)
    dom = x.parent
    cod = t.codomain.amplified(k)
    ncod = len(cod.dims)

    def value_and_grad(v: np.ndarray):
        y = amplified_apply_vec(t, k, v)
        svds = _batched_svd(_split(y, cod.dims) + _split(v, dom.dims))
        ny, gy = _log_norm_grad(svds[:ncod], cod.weights, p)
        nx, gx = _log_norm_grad(svds[ncod:], dom.weights, p)
        return ny / nx, amplified_apply_vec(adj, k, gy) - gx

    v = x.vec() / np.sqrt(np.vdot(x.vec(), x.vec()).real)
    val, g = value_and_grad(v)
    step = 0.5
    checkpoint = val
    for it in range(1, iterations + 1):
        if it % 25 == 0:
            if val - checkpoint < 1e-8 * abs(val):
                break
            checkpoint = val
        g = g - np.real(np.vdot(v, g)) * v
        gn = np.sqrt(np.vdot(g, g).real)
        if gn < 1e-14:
            break
        cand = v + (step / gn) * g
        cand /= np.sqrt(np.vdot(cand, cand).real)
        cval, cg = value_and_grad(cand)
        if cval > val:
            v, val, g = cand, cval, cg
            step = min(1.25 * step, 1.0)
        else:
            step /= 2
            if step < 1e-10:
                break
    return val, dom.from_vec(v)


def cb_lower_bound(
    t: LinMap,
    p: float,
    k: int,
    restarts: int = 32,
    seed: int = 0,
    iterations: int = 500,
) -> CbEstimate:
    """Best ratio found over levels ``1..k``; never more than a lower bound.

    Every level is seeded with the best witness of the level below (embedded
    in the corner), the entangled inputs of each block and ``restarts``
    Ginibre samples, each polished by ascent.  Warm starting makes the result
    non-decreasing in ``k`` for a fixed seed.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    p = float(p)
    adj = t.hs_adjoint()
    best_val, best_x, best_level = -np.inf, None, 1
    by_level = {}
    for level in range(1, k + 1):
        amp = t.domain.amplified(level)
        starts = []
        if best_x is not None:
            starts.append(embed_level(best_x, t.domain, best_level, level))
        starts += [w for _, w in entangled_witnesses(t.domain, level)]
        starts += [random_element(amp, rng_for(seed, level, r)) for r in range(restarts)]
        for x0 in starts:
            if x0.frobenius() == 0:
                continue
            _, x = _ascend(t, adj, level, x0, p, iterations)
            val = norm_ratio(t, level, x, p)
            if val > best_val + 1e-12:
                best_val, best_x, best_level = val, x, level
        by_level[level] = float(best_val)
    return CbEstimate(float(best_val), None, best_level, best_x, False, p, by_level)


def _witness_value(t: LinMap, k: int, p: float):
    best = (-np.inf, None)
    for _, w in entangled_witnesses(t.domain, k):
        r = norm_ratio(t, k, w, p)
        if r > best[0]:
            best = (r, w)
    if best[1] is None:
        x = t.domain.amplified(k).one()
        best = (norm_ratio(t, k, x, p), x)
    return best


def cb_norm_structural(d: JordanDecomposition, tol: float = 1e-9) -> CbEstimate:
    """Exact cb norm at ``p = inf`` of a decomposed Jordan map.

    The hom part is completely contractive, the anti part restricted to a
    faithful block of dim n is a *-homomorphism after the transpose, whose cb
    norm is n, and the ranges are centrally orthogonal, so the value is
    ``max(1 if pi != 0, largest block where sigma is faithful)``.  The lower
    bound is realized by an entangled witness at that level.
    """
    a = d.J.domain
    faithful = [
        a.dims[i] for i in range(len(a.blocks)) if d.sigma(a.block_unit(i)).max_abs() > 1e-8
    ]
    hom = 0 if d.pi.is_zero(1e-8) else 1
    value = max([hom] + faithful)
    if value == 0:
        return CbEstimate(0.0, 0.0, 1, None, True)
    level = max(faithful, default=1)
    lower, witness = _witness_value(d.J, level, np.inf)
    if abs(lower - value) > 1e-6 * value:
        raise ArithmeticError(f"structural value {value} not attained by witness (got {lower})")
    return CbEstimate(float(lower), float(value), level, witness, True)


def id_to_opposite_cb(a: Algebra, p: float = np.inf, restarts: int = 8, seed: int = 0) -> CbEstimate:
    """cb norm of ``Id: A -> A^op``; certified (the minimality degree) at ``p = inf``."""
    t = opposite_transfer(a)
    if np.isinf(p):
        est = cb_norm_structural(stormer_decompose(t))
        if est.upper != minimality_degree(a):
            raise ArithmeticError("structural value disagrees with the minimality degree")
        return est
    return cb_lower_bound(t, p, max(a.dims), restarts=restarts, seed=seed)
