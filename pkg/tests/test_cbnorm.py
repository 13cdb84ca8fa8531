import numpy as np
import pytest

from opalg.algebra import Algebra
from opalg.cbnorm import (
    CbEstimate,
    cb_lower_bound,
    cb_norm_structural,
    id_to_opposite_cb,
    norm_ratio,
    transpose_cb_oracle,
)
from opalg.instances import largest_anti_block, random_jordan_spec
from opalg.jordan import JordanSpec, Target, build_jordan, spec_from_kinds, stormer_decompose
from opalg.maps import compose, identity_map, transpose_map
from opalg.sampling import rng_for
from opalg.yeadon import build_positive_isometry


def test_oracle_examples():
    assert transpose_cb_oracle(2, 1) == 2
    assert transpose_cb_oracle(3, 2) == 1
    assert transpose_cb_oracle(3, 4) == pytest.approx(np.sqrt(3))
    assert transpose_cb_oracle(3, np.inf) == 3
    with pytest.raises(ValueError):
        transpose_cb_oracle(0, 1)


def test_estimate_rejects_inverted_bounds():
    with pytest.raises(ValueError):
        CbEstimate(2.0, 1.0, 1, None, True)


@pytest.mark.parametrize("p", [1.0, 3.0, np.inf])
def test_identity_is_completely_isometric(p):
    est = cb_lower_bound(identity_map(Algebra.of(2)), p, 2, restarts=2)
    assert abs(est.lower - 1) < 1e-6
    assert not est.certified and est.upper is None


def test_transpose_lower_bounds_meet_oracle():
    est = cb_lower_bound(transpose_map(Algebra.of(2)), 1.0, 2, restarts=2)
    assert est.lower >= 2 - 1e-3
    est = cb_lower_bound(transpose_map(Algebra.of(3)), np.inf, 3, restarts=2)
    assert est.lower >= 3 - 1e-2
    # the witness replays to the reported value
    assert norm_ratio(transpose_map(Algebra.of(3)), est.level, est.witness, np.inf) == pytest.approx(est.lower, rel=1e-6)


@pytest.mark.parametrize("p", [1.0, 4.0 / 3.0, 4.0, np.inf])
def test_lower_bound_monotone_in_k(p):
    t = build_jordan(spec_from_kinds(Algebra.of(3, 1), [("anti", "hom"), ("hom",)]))
    values = [cb_lower_bound(t, p, k, restarts=2, seed=4).lower for k in (1, 2, 3)]
    assert values[0] <= values[1] + 1e-9 <= values[2] + 2e-9


def test_structural_examples():
    assert cb_norm_structural(stormer_decompose(identity_map(Algebra.of(2)))).upper == 1
    c_m3 = build_jordan(spec_from_kinds(Algebra.of(1, 3), [("hom",), ("anti",)]))
    est = cb_norm_structural(stormer_decompose(c_m3))
    assert est.certified and est.upper == 3 and est.lower == pytest.approx(3)
    assert cb_lower_bound(c_m3, np.inf, 3, restarts=2).lower == pytest.approx(3, rel=1e-6)
    diag = build_jordan(JordanSpec(Algebra.of(2), Algebra.of(4), (Target(0, 0, 0), Target(0, 0, 2, "anti"))))
    assert cb_norm_structural(stormer_decompose(diag)).upper == 2
    assert cb_lower_bound(diag, np.inf, 2, restarts=2).lower == pytest.approx(2, rel=1e-6)


@pytest.mark.parametrize("dims,value", [((1, 1), 1), ((2,), 2), ((2, 3), 3)])
def test_id_to_opposite(dims, value):
    est = id_to_opposite_cb(Algebra.of(*dims))
    assert est.certified and est.upper == value
    numeric = cb_lower_bound(transpose_map(Algebra.of(*dims)), np.inf, max(dims), restarts=2)
    assert numeric.lower >= 0.98 * value


@pytest.mark.parametrize("seed", range(6))
def test_hom_only_maps_are_completely_contractive(seed):
    spec = random_jordan_spec(rng_for(seed, 5), "hom")
    j = build_jordan(spec)
    assert cb_lower_bound(j, np.inf, 3, restarts=2, seed=seed).lower <= 1 + 1e-6
    # at finite p the trace weights enter; the isometry built from j is the contraction
    t, _ = build_positive_isometry(j, 1.0)
    assert cb_lower_bound(t, 1.0, 3, restarts=2, seed=seed).lower <= 1 + 1e-6


@pytest.mark.parametrize("seed", range(6))
def test_structural_value_matches_construction(seed):
    spec = random_jordan_spec(rng_for(seed, 6), "any")
    d = stormer_decompose(build_jordan(spec))
    has_hom = any("hom" in ks or spec.domain.dims[i] == 1 for i, ks in enumerate(spec.kinds()))
    assert cb_norm_structural(d).upper == max(int(has_hom), largest_anti_block(spec))


def test_submultiplicative_on_structural_instances():
    a = Algebra.of(2, 3)
    s = transpose_map(a)
    t = build_jordan(JordanSpec(a, a, (Target(0, 0, 0, "hom"), Target(1, 1, 0, "anti"))))
    st = compose(s, t)
    cs = cb_norm_structural(stormer_decompose(s)).upper
    ct = cb_norm_structural(stormer_decompose(t)).upper
    assert cb_lower_bound(st, np.inf, 3, restarts=2).lower <= cs * ct + 1e-6
