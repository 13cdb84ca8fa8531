"""Positive isometries between L^p spaces as ``T(x) = w b J(x)``.

``build_positive_isometry`` goes from a Jordan monomorphism J to T by solving
the trace condition ``tau(b^p J(x)) = tau(x)`` with b constant on each
minimal central piece of the algebra generated by J's range.
``yeadon_factorize`` goes back: ``b = T(1)``, ``w = s(b)`` and
``J = b^(-1/2) T(.) b^(-1/2)`` on the support.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import (
    ATOL,
    Algebra,
    Element,
    NotPositiveError,
    lp_norm,
    pinv_sqrt,
    positive_power,
    sqrt_positive,
    support_projection,
    trace,
)
from .jordan import generated_star_algebra, jordan_residual
from .maps import LinMap, apply, compose, compress, multiplication_map, precompose_multiplication
from .positivity import CertifiedNo, is_completely_positive, is_n_positive, probe_isometry
from .sampling import random_element, rng_for


class InfeasibleTraceError(ValueError):
    """No strictly positive b satisfies the trace condition for this J."""


class FactorizationError(ArithmeticError):
    """T does not factor as a positive isometry ``b^(1/2) J b^(1/2)``."""

    def __init__(self, message: str, residuals: dict | None = None):
        super().__init__(message)
        self.residuals = residuals or {}


@dataclass
class YeadonTriple:
    w: Element
    b: Element
    J: LinMap
    p: float

    def residuals(self) -> dict:
        """Defects of ``J(1) = s(b) = w*w``, ``w = J(1)``, commutation and trace preservation."""
        j1 = apply(self.J, self.J.domain.one())
        sb = support_projection(self.b)
        wsw = self.w.adjoint() @ self.w
        comm = max((self.b @ y - y @ self.b).max_abs() for y in self.J.images())
        return {
            "unit_support": max((j1 - sb).max_abs(), (sb - wsw).max_abs()),
            "unit_is_w": (j1 - self.w).max_abs(),
            "commutation": comm,
            "trace": trace_defect(self),
        }


def _check_p(p: float):
    p = float(p)
    if not 1 <= p < np.inf:
        raise ValueError(f"isometries are built for 1 <= p < inf, got {p}")
    if p == 2:
        raise ValueError("p = 2 is excluded: every unitary-type map is an L^2 isometry")
    return p


def reconstruct(t: YeadonTriple) -> LinMap:
    """``x -> w b J(x)`` (general partial isometry w allowed)."""
    return compose(multiplication_map(t.w @ t.b, t.w.parent.one()), t.J)


def build_positive_isometry(j: LinMap, p: float, seed: int = 0) -> tuple[LinMap, YeadonTriple]:
    """``T = b^(1/2) J b^(1/2)`` with ``tau(b^p J(x)) = tau(x)``.

    b takes one value per domain block, spread over the minimal central
    projections of Z below ``J(1_i)``; the trace condition on ``1_i`` fixes it.
    """
    p = _check_p(p)
    res = jordan_residual(j)
    if res >= ATOL:
        raise ValueError(f"J is not a Jordan *-homomorphism (residual {res:.3e})")
    dom, cod = j.domain, j.codomain
    z_alg = generated_star_algebra(j, seed=seed)
    b = cod.zero()
    for i in range(len(dom.blocks)):
        ji = apply(j, dom.block_unit(i))
        mass = trace(cod, ji).real
        if mass <= ATOL:
            raise InfeasibleTraceError(f"J kills block {i}; no b satisfies the trace condition")
        beta = (dom.weights[i] * dom.dims[i] / mass) ** (1.0 / p)
        for z in z_alg.minimal_central_projections:
            if (z @ ji).max_abs() > 1e-8:
                b = b + z * beta
    triple = YeadonTriple(apply(j, dom.one()), b, j, p)
    half = sqrt_positive(b)
    t = compress(j, half)
    return t, triple


def trace_defect(t: YeadonTriple) -> float:
    """Largest ``|tau(b^p J(x)) - tau(x)|`` over a positive spanning set of the domain."""
    dom, cod = t.J.domain, t.J.codomain
    bp = positive_power(t.b, t.p)
    worst = 0.0
    for x in positive_spanning_set(dom):
        worst = max(worst, abs(trace(cod, bp @ apply(t.J, x)) - trace(dom, x)))
    return worst


def positive_spanning_set(a: Algebra):
    """Rank-one projections onto ``e_r``, ``e_r + e_s`` and ``e_r + i e_s``; they span ``a``."""
    for i, d in enumerate(a.dims):
        basis = np.eye(d)
        vecs = [basis[r] for r in range(d)]
        for r in range(d):
            for s in range(r + 1, d):
                vecs.append(basis[r] + basis[s])
                vecs.append(basis[r] + 1j * basis[s])
        for v in vecs:
            mats = [np.zeros((e, e), dtype=complex) for e in a.dims]
            mats[i] = np.outer(v, v.conj()) / np.vdot(v, v).real
            yield Element(a, mats)


def check_trace_preservation(t: YeadonTriple, tol: float = 1e-8) -> bool:
    return trace_defect(t) < tol


def yeadon_factorize(
    t: LinMap, p: float, tol: float = 1e-8, check_preconditions: bool = True, seed: int = 0
) -> YeadonTriple:
    """Recover ``(w, b, J)`` from a positive isometry T.

    Raises :class:`FactorizationError` (with the residuals attached) when any
    of the triple identities, the Jordan test or the reconstruction fails.
    """
    p = _check_p(p)
    if check_preconditions:
        verdict = is_n_positive(t, 1, restarts=4, seed=seed)
        if isinstance(verdict, CertifiedNo):
            raise FactorizationError("T is not positive", {"min_eigenvalue": verdict.min_eigenvalue})
        probe = probe_isometry(t, p, trials=8, seed=seed)
        if not probe:
            raise FactorizationError(
                "T is not an L^p isometry on samples",
                {"max_ratio": probe.max_ratio, "min_ratio": probe.min_ratio},
            )
    try:
        b = apply(t, t.domain.one())
        w = support_projection(b)
        root_inv = pinv_sqrt(b)
    except NotPositiveError as exc:
        raise FactorizationError(f"T(1) is not positive: {exc}") from exc
    j = compress(t, root_inv)
    triple = YeadonTriple(w, b, j, p)
    residuals = triple.residuals()
    residuals["jordan"] = jordan_residual(j)
    residuals["reconstruction"] = float(np.abs(reconstruct(triple).matrix - t.matrix).max(initial=0.0))
    bad = {k: v for k, v in residuals.items() if v >= tol}
    if bad:
        raise FactorizationError(f"factorization residuals too large: {bad}", residuals)
    return triple


def local_lifting(t: LinMap, h: Element) -> LinMap:
    """``v(x) = T(h)^(-1/2) T(h^(1/2) x h^(1/2)) T(h)^(-1/2)`` on the corner of ``s(T(h))``."""
    th = apply(t, h)
    try:
        root_inv = pinv_sqrt(th)
        half = sqrt_positive(h)
    except NotPositiveError as exc:
        raise NotPositiveError(f"local lifting needs T(h) and h positive: {exc}") from exc
    return compress(precompose_multiplication(t, half), root_inv)


def contraction_probe(v: LinMap, trials: int = 20, seed: int = 0) -> float:
    """Largest observed ``||v(x)||_inf / ||x||_inf`` over seeded samples."""
    worst = 0.0
    for n in range(trials):
        x = random_element(v.domain, rng_for(seed, n))
        worst = max(worst, lp_norm(v.codomain, apply(v, x), np.inf) / lp_norm(v.domain, x, np.inf))
    return worst


@dataclass
class InheritanceReport:
    n: int
    t_verdict: object
    v_verdict: object
    t_cp: bool
    v_cp: bool
    violation: bool


def lifting_positivity_inheritance(t: LinMap, h: Element, n: int, seed: int = 0) -> InheritanceReport:
    """n-positivity verdicts for T and its local lifting at h, side by side.

    A violation means T is certified CP while the lifting has a negativity witness.
    """
    v = local_lifting(t, h)
    tv = is_n_positive(t, n, seed=seed)
    vv = is_n_positive(v, n, seed=seed)
    t_cp = is_completely_positive(t)
    v_cp = is_completely_positive(v)
    violation = t_cp and isinstance(vv, CertifiedNo)
    return InheritanceReport(n, tv, vv, t_cp, v_cp, violation)

