"""Seeded verification suites over builder instances.

Every instance is described by a JSON-ready ``inputs`` dict and checked by a
pure function of it, so a failing record's witness can be replayed with
:func:`replay`.  Instance ``n`` of a suite draws from ``rng_for(seed, n, tag)``.
"""

from __future__ import annotations

import hashlib
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import serialize as ser
from .algebra import support_projection
from .cbnorm import cb_lower_bound, cb_norm_structural
from .instances import ISOMETRY_EXPONENTS, largest_anti_block, random_jordan_spec
from .jordan import build_jordan, product_residual, spec_from_kinds, split_hom_minimal
from .maps import apply, compress
from .positivity import CertifiedNo, is_completely_positive, is_n_positive, probe_complete_isometry
from .sampling import random_positive, rng_for
from .yeadon import (
    FactorizationError,
    build_positive_isometry,
    contraction_probe,
    local_lifting,
    yeadon_factorize,
)

RESIDUAL_TOL = 1e-9
MAGNITUDE_SLACK = 1e-3
CB_RELATIVE_GAP = 0.02


@dataclass
class Record:
    index: int
    digest: str
    passed: bool
    verdicts: dict
    residuals: dict
    witness: dict | None = None
    flags: list = field(default_factory=list)


@dataclass
class SuiteReport:
    suite: str
    seed: int
    trials: int
    records: list
    passed: bool
    wall_time: float
    params: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def failures(self) -> list:
        return [r for r in self.records if not r.passed]

    @property
    def flags(self) -> list:
        return [(r.index, f) for r in self.records for f in r.flags]

    def to_json(self) -> dict:
        return ser.to_jsonable(self)


def digest(inputs: dict) -> str:
    """Short SHA-256 of the canonical JSON of an instance."""
    text = json.dumps(ser.to_jsonable(inputs), sort_keys=True)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def _exponent(p: float) -> float:
    return 1.0 if math.isinf(p) else abs(1.0 - 2.0 / p)


def _matrix_gap(a, b) -> float:
    return float(np.abs(a.matrix - b.matrix).max(initial=0.0))


def _run(name, seed, trials, make_inputs, check, params, workers, notes=()):
    start = time.perf_counter()

    def one(n):
        inputs = make_inputs(seed, n)
        verdicts, residuals, passed, flags = check(inputs)
        return Record(n, digest(inputs), passed, verdicts, residuals, None if passed else inputs, flags)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            records = list(pool.map(one, range(trials)))
    else:
        records = [one(n) for n in range(trials)]
    records.sort(key=lambda r: r.index)
    return SuiteReport(
        name,
        seed,
        trials,
        records,
        all(r.passed for r in records),
        time.perf_counter() - start,
        dict(params),
        list(notes),
    )


# -- local lifting at h = 1 ----------------------------------------------------


def local_lifting_inputs(seed: int, n: int) -> dict:
    """Instance 0 is an identity map, instance 1 carries a transpose block."""
    rng = rng_for(seed, n, 1)
    if n == 0:
        spec = random_jordan_spec(rng, "hom")
        dom = spec.domain
        spec = spec_from_kinds(dom, [("hom",)] * len(dom.blocks), weights=list(dom.weights))
    else:
        spec = random_jordan_spec(rng, "anti" if n == 1 else "any")
    p = ISOMETRY_EXPONENTS[int(rng.integers(len(ISOMETRY_EXPONENTS)))]
    t, triple = build_positive_isometry(build_jordan(spec), p, seed=seed)
    h = random_positive(spec.domain, rng)
    return {
        "p": p,
        "seed": seed,
        "map": ser.linmap_to_json(t),
        "triple": ser.triple_to_json(triple),
        "h": ser.element_to_json(h),
    }


def check_local_lifting(inputs: dict):
    """``local_lifting(T, 1) = w J(.) w``; at a random h: unital on the support, contractive, CP inherited."""
    t = ser.linmap_from_json(inputs["map"])
    triple = ser.triple_from_json(inputs["triple"])
    h = ser.element_from_json(inputs["h"], t.domain)
    lifted = local_lifting(t, t.domain.one())
    expected = compress(triple.J, triple.w)
    v = local_lifting(t, h)
    unital = (apply(v, t.domain.one()) - support_projection(apply(t, h))).max_abs()
    norm = contraction_probe(v, trials=8, seed=int(inputs["seed"]))
    t_cp = is_completely_positive(t)
    v_cp = is_completely_positive(v)
    residuals = {"lifting_vs_wJw": _matrix_gap(lifted, expected), "unital": unital, "contraction": norm}
    verdicts = {"t_cp": t_cp, "v_cp": v_cp}
    passed = (
        residuals["lifting_vs_wJw"] < RESIDUAL_TOL
        and unital < RESIDUAL_TOL
        and norm <= 1 + 1e-6
        and (v_cp or not t_cp)
    )
    return verdicts, residuals, passed, []


def suite_local_lifting(seed: int = 0, trials: int = 20, workers: int = 1) -> SuiteReport:
    return _run(
        "local-lifting", seed, trials, local_lifting_inputs, check_local_lifting, {"trials": trials}, workers
    )


# -- the four equivalent conditions -------------------------------------------


def cor_cp_inputs(seed: int, n: int, p: float = 1.0) -> dict:
    """Even instances are hom-only, odd ones carry a pure transpose block of dim >= 2."""
    rng = rng_for(seed, n, 2)
    spec = random_jordan_spec(rng, "hom" if n % 2 == 0 else "anti")
    t, _ = build_positive_isometry(build_jordan(spec), p, seed=seed)
    return {"p": p, "seed": seed, "map": ser.linmap_to_json(t), "largest_anti_block": largest_anti_block(spec)}


def _positivity_log(v) -> dict:
    if isinstance(v, CertifiedNo):
        return {"verdict": "certified_no", "method": v.method, "min_eigenvalue": v.min_eigenvalue, "seed": v.seed}
    return {
        "verdict": "certified_yes" if v.certified else "probably_yes",
        "method": v.method,
        "min_eigenvalue": v.min_eigenvalue,
        "seed": v.seed,
        "restarts": v.restarts,
        "iterations": v.iterations,
    }


def check_cor_cp(inputs: dict):
    """2-positivity, complete positivity, multiplicativity of J and complete isometry must agree."""
    t = ser.linmap_from_json(inputs["map"])
    p, seed, n_anti = float(inputs["p"]), int(inputs["seed"]), int(inputs["largest_anti_block"])
    two = is_n_positive(t, 2, seed=seed)
    cp = is_completely_positive(t)
    try:
        triple = yeadon_factorize(t, p, check_preconditions=False, seed=seed)
        hom_res = product_residual(triple.J, "hom")
    except FactorizationError as exc:
        hom_res = float("inf")
        exc_msg = str(exc)
    else:
        exc_msg = None
    k_max = max(2, max(t.domain.dims))
    probe = probe_complete_isometry(t, p, k_max=k_max, trials=4, seed=seed)
    conditions = {
        "two_positive": bool(two.positive),
        "completely_positive": cp,
        "multiplicative": hom_res < RESIDUAL_TOL,
        "complete_isometry": probe.ok,
    }
    agree = len(set(conditions.values())) == 1
    residuals = {"multiplicativity": hom_res, "max_amplified_ratio": probe.max_ratio}
    verdicts = dict(conditions, two_positive_log=_positivity_log(two), agreement=agree)
    if exc_msg:
        verdicts["factorization_error"] = exc_msg
    passed = agree
    if n_anti >= 2:
        need = n_anti ** _exponent(p) - MAGNITUDE_SLACK
        residuals["required_ratio"] = need
        passed = passed and isinstance(two, CertifiedNo) and probe.max_ratio >= need and not conditions["completely_positive"]
    else:
        passed = passed and conditions["completely_positive"]
    return verdicts, residuals, passed, []


def suite_cor_cp(seed: int = 0, trials: int = 40, p: float = 1.0, workers: int = 1) -> SuiteReport:
    p = float(p)
    if not 1 <= p < math.inf or p == 2:
        raise ValueError("p must lie in [1, inf) and differ from 2")
    return _run(
        "cor-cp",
        seed,
        trials,
        lambda s, n: cor_cp_inputs(s, n, p),
        check_cor_cp,
        {"trials": trials, "p": p},
        workers,
        ["ProbablyYes verdicts are logged with their search budgets"],
    )


# -- structural cb value versus the minimality degree ----------------------------


def thm_main_inputs(seed: int, n: int, restarts: int = 4) -> dict:
    rng = rng_for(seed, n, 3)
    spec = random_jordan_spec(rng, "any")
    return {
        "seed": seed,
        "restarts": restarts,
        "map": ser.linmap_to_json(build_jordan(spec)),
        "largest_anti_block": largest_anti_block(spec),
    }


def check_thm_main(inputs: dict):
    """Certified cb value equals ``max(hom indicator, degree)`` and the ascent reaches it at ``k = degree``."""
    j = ser.linmap_from_json(inputs["map"])
    seed = int(inputs["seed"])
    split = split_hom_minimal(j, seed=seed)
    est = cb_norm_structural(split.decomposition)
    expected = max(0 if split.hom_part.is_zero else 1, split.degree)
    k = max(split.degree, 1)
    lower = cb_lower_bound(j, math.inf, k, restarts=int(inputs["restarts"]), seed=seed)
    residuals = {
        "structural_vs_degree": abs(est.upper - expected),
        "relative_gap": (est.upper - lower.lower) / est.upper,
        "lower_excess": lower.lower - est.upper,
    }
    verdicts = {
        "structural": est.upper,
        "degree": split.degree,
        "hom_part": list(split.hom_part.dims),
        "min_part": list(split.min_part.dims),
        "lower": lower.lower,
        "level": k,
        "degree_matches_construction": split.degree == int(inputs["largest_anti_block"]),
    }
    passed = (
        residuals["structural_vs_degree"] < 1e-9
        and residuals["relative_gap"] <= CB_RELATIVE_GAP
        and residuals["lower_excess"] <= 1e-6
        and verdicts["degree_matches_construction"]
    )
    return verdicts, residuals, passed, []


def suite_thm_main(seed: int = 0, trials: int = 20, restarts: int = 4, workers: int = 1) -> SuiteReport:
    return _run(
        "thm-main",
        seed,
        trials,
        lambda s, n: thm_main_inputs(s, n, restarts),
        check_thm_main,
        {"trials": trials, "restarts": restarts},
        workers,
        ["hom_part is ker(sigma); min_part is its complement, isomorphic to the quotient by ker(sigma)"],
    )


# -- counterexample search --------------------------------------------------------


def conjecture_inputs(seed: int, n: int, p: float, k_max: int, restarts: int) -> dict:
    rng = rng_for(seed, n, 4)
    spec = random_jordan_spec(rng, "any")
    j = build_jordan(spec)
    t, _ = build_positive_isometry(j, p, seed=seed)
    return {
        "p": p,
        "seed": seed,
        "k_max": k_max,
        "restarts": restarts,
        "map": ser.linmap_to_json(t),
        "jordan": ser.linmap_to_json(j),
        "largest_anti_block": largest_anti_block(spec),
    }


def check_conjecture(inputs: dict):
    """Flags only.  T's amplified ratios must respect ``n^|1-2/p|``; J must saturate by level n."""
    t = ser.linmap_from_json(inputs["map"])
    j = ser.linmap_from_json(inputs["jordan"])
    p, seed = float(inputs["p"]), int(inputs["seed"])
    k_max, restarts = int(inputs["k_max"]), int(inputs["restarts"])
    n = max(int(inputs["largest_anti_block"]), 1)
    lt = cb_lower_bound(t, p, k_max, restarts=restarts, seed=seed)
    lj = cb_lower_bound(j, math.inf, k_max, restarts=restarts, seed=seed)
    bound_t = n ** _exponent(p)
    flags = []
    if lt.lower > bound_t * (1 + 1e-6):
        flags.append("proven_direction: T exceeds the n^|1-2/p| scaling")
    if lj.lower > n * (1 + 1e-6):
        flags.append("conjectured_direction: J exceeds its structural cb value")
    if k_max > n:
        grow_j = lj.by_level[k_max] - lj.by_level[k_max - 1]
        grow_t = lt.by_level[k_max] - lt.by_level[k_max - 1]
        if grow_j > 1e-6 * lj.lower and grow_t <= 1e-6 * lt.lower:
            flags.append("conjectured_direction: J still growing while T has saturated")
    verdicts = {
        "t_lower": lt.lower,
        "t_by_level": lt.by_level,
        "j_lower": lj.lower,
        "j_by_level": lj.by_level,
        "anti_degree": int(inputs["largest_anti_block"]),
        "t_bound": bound_t,
    }
    residuals = {"t_excess": lt.lower - bound_t, "j_excess": lj.lower - n}
    return verdicts, residuals, not flags, flags


def suite_conjecture(
    seed: int = 0, trials: int = 20, p: float = 1.0, k_max: int = 3, restarts: int = 2, workers: int = 1
) -> SuiteReport:
    p = float(p)
    if p == 2 or p < 1:
        raise ValueError("p must be >= 1 and differ from 2")
    if k_max < 2:
        raise ValueError("k_max must be >= 2")
    return _run(
        "conjecture",
        seed,
        trials,
        lambda s, n: conjecture_inputs(s, n, p, k_max, restarts),
        check_conjecture,
        {"trials": trials, "p": p, "k_max": k_max, "restarts": restarts},
        workers,
        ["flags mark candidate counterexamples found by nonconvex search; they are not verdicts"],
    )


CHECKS = {
    "local-lifting": check_local_lifting,
    "cor-cp": check_cor_cp,
    "thm-main": check_thm_main,
    "conjecture": check_conjecture,
}


def replay(suite: str, witness: dict):
    """Re-run one suite check on a stored witness; returns ``(verdicts, residuals, passed, flags)``."""
    try:
        check = CHECKS[suite]
    except KeyError:
        raise ValueError(f"unknown suite {suite!r}; expected one of {sorted(CHECKS)}") from None
    return check(witness)

