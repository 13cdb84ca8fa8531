import numpy as np
import pytest

from opalg.algebra import Algebra
from opalg.instances import random_cp_map
from opalg.jordan import build_jordan, spec_from_kinds
from opalg.maps import amplified_apply, compress, identity_map, transpose_map
from opalg.positivity import (
    CertifiedNo,
    ProbablyYes,
    is_completely_positive,
    is_n_positive,
    probe_complete_isometry,
    probe_isometry,
)
from opalg.sampling import rng_for
from opalg.yeadon import build_positive_isometry


def test_cp_examples():
    a = Algebra.of(2)
    assert is_completely_positive(identity_map(a))
    assert not is_completely_positive(transpose_map(a))
    proj = a.element(np.diag([1.0, 0.0]))
    assert is_completely_positive(compress(identity_map(a), proj))


@pytest.mark.parametrize("seed", range(4))
def test_kraus_maps_are_cp(seed):
    rng = rng_for(seed)
    t = random_cp_map(rng, Algebra.of(2, 1), Algebra.of(3, 2))
    assert is_completely_positive(t)
    assert is_n_positive(t, 2, seed=seed).positive


def test_transpose_is_positive_not_two_positive():
    t = transpose_map(Algebra.of(2))
    one = is_n_positive(t, 1)
    assert isinstance(one, ProbablyYes)
    two = is_n_positive(t, 2)
    assert isinstance(two, CertifiedNo)
    # the witness is sum e_ij (x) e_ij, mapped to the swap with eigenvalue -1
    v = np.zeros(4)
    v[0] = v[3] = 1.0
    assert np.allclose(two.witness.blocks[0], np.outer(v, v))
    assert two.min_eigenvalue == pytest.approx(-1.0)


def test_search_finds_witness_below_choi_threshold():
    t = transpose_map(Algebra.of(3))
    verdict = is_n_positive(t, 2, seed=1)
    assert isinstance(verdict, CertifiedNo)
    assert verdict.method == "search"
    # replay: the witness is positive and its image is not
    assert verdict.witness.is_positive()
    image = amplified_apply(t, 2, verdict.witness)
    assert min(np.linalg.eigvalsh(b).min() for b in image.blocks) == pytest.approx(verdict.min_eigenvalue)
    assert verdict.min_eigenvalue < -0.4


@pytest.mark.parametrize("n", [1, 2, 3])
def test_homomorphisms_are_n_positive(n):
    j = build_jordan(spec_from_kinds(Algebra.of(2, 1), [("hom", "hom"), ("hom",)]))
    assert is_n_positive(j, n).positive
    assert is_completely_positive(j)


def test_probe_isometry_examples():
    a = Algebra.of(2)
    for p in [1, 3, np.inf]:
        assert probe_isometry(identity_map(a), p)
    half = identity_map(a) * 0.5
    res = probe_isometry(half, 1.0, trials=3)
    assert not res and res.counterexample is not None
    assert res.max_ratio == pytest.approx(0.5)


def test_probe_complete_isometry_on_hom_isometry():
    j = build_jordan(spec_from_kinds(Algebra.of(2, 1), [("hom",), ("hom", "hom")], weights=[1.0, 0.5, 2.0]))
    t, _ = build_positive_isometry(j, 1.0)
    assert probe_complete_isometry(t, 1.0, k_max=3, trials=4)


def test_probe_complete_isometry_sees_transpose():
    t = transpose_map(Algebra.of(2))
    res = probe_complete_isometry(t, 1.0, k_max=2, trials=2)
    assert probe_isometry(t, 1.0)
    assert not res
    assert res.counterexample_level == 2
    assert res.ratios[2] == pytest.approx(2.0)
