"""Finite-dimensional toolkit for Jordan *-homomorphisms, L^p isometries and cb norms.

Algebras are finite direct sums of weighted matrix blocks; maps between them
are dense matrices on the row-major vectorization.
"""

from .algebra import Algebra, Block, Element, NotPositiveError, ShapeError, lp_norm, trace
from .cbnorm import CbEstimate, cb_lower_bound, cb_norm_structural, id_to_opposite_cb, transpose_cb_oracle
from .jordan import (
    JordanDecomposition,
    JordanSpec,
    NotJordanError,
    Target,
    build_jordan,
    generated_star_algebra,
    hxh_check,
    is_jordan_star_hom,
    split_hom_minimal,
    stormer_decompose,
)
from .maps import LinMap, amplify, compose, identity_map, opposite_transfer, transpose_map
from .positivity import (
    CertifiedNo,
    ProbablyYes,
    choi,
    is_completely_positive,
    is_n_positive,
    probe_complete_isometry,
    probe_isometry,
)
from .yeadon import (
    YeadonTriple,
    build_positive_isometry,
    lifting_positivity_inheritance,
    local_lifting,
    yeadon_factorize,
)

__version__ = "0.1.0"
