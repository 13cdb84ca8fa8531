"""Seeded random instances: Jordan specs, positive isometries, generic maps.

Sizes stay at desk scale: block dims <= 4, at most 4 blocks per algebra,
weights drawn from [1/2, 2].
"""

from __future__ import annotations

import numpy as np

from .algebra import Algebra
from .jordan import JordanSpec, Target, build_jordan
from .maps import LinMap
from .sampling import ginibre, rng_for

MAX_DIM = 4
MAX_BLOCKS = 4
ISOMETRY_EXPONENTS = (1.0, 4.0 / 3.0, 3.0, 4.0)

# copy patterns per domain block
_ANY = (("hom",), ("anti",), ("hom", "anti"), ("hom", "hom"), ("anti", "anti"))
_HOM_ONLY = (("hom",), ("hom", "hom"))
_SINGLE_KIND = (("hom",), ("anti",), ("hom", "hom"), ("anti", "anti"))
MODES = ("any", "hom", "anti")


def _weights(rng: np.random.Generator, n: int) -> list[float]:
    return [float(w) for w in rng.uniform(0.5, 2.0, n)]


def random_jordan_spec(
    rng: np.random.Generator, mode: str = "any", max_blocks: int = 3, max_dim: int = 3, max_copies: int = 4
) -> JordanSpec:
    """Random placement of identity and transpose copies of domain blocks.

    ``mode="hom"`` uses only identity copies, except that dim-1 blocks may
    carry a transpose (it is the identity there).  ``mode="anti"`` puts a pure
    transpose copy on a block of dim >= 2 first and never mixes kinds within
    one block, so the largest anti block is purely anti.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    nb = int(rng.integers(1, max_blocks + 1))
    dims = [int(d) for d in rng.integers(1, max_dim + 1, nb)]
    kinds: list[tuple[str, ...]] = []
    for i, d in enumerate(dims):
        if mode == "hom":
            ks = _HOM_ONLY[rng.integers(len(_HOM_ONLY))]
            if d == 1 and rng.random() < 0.5:
                ks = ("anti",)
        elif mode == "anti":
            if i == 0:
                dims[0] = int(rng.integers(2, max_dim + 1))
                ks = ("anti",) if rng.random() < 0.7 else ("anti", "anti")
            else:
                ks = _SINGLE_KIND[rng.integers(len(_SINGLE_KIND))]
        else:
            ks = _ANY[rng.integers(len(_ANY))]
        kinds.append(ks)
    # trim duplicated copies until the total fits
    while sum(len(k) for k in kinds) > max_copies:
        i = max(range(nb), key=lambda n: len(kinds[n]))
        kinds[i] = kinds[i][:1]
    domain = Algebra.of(*dims, weights=_weights(rng, nb))
    copies = [(i, k) for i, ks in enumerate(kinds) for k in ks]
    order = rng.permutation(len(copies))
    bins: list[int] = []
    targets = []
    for n in order:
        i, kind = copies[n]
        d = dims[i]
        fits = [b for b, used in enumerate(bins) if used + d <= MAX_DIM]
        if fits and (rng.random() < 0.5 or len(bins) == MAX_BLOCKS):
            b = int(fits[rng.integers(len(fits))])
        else:
            b = len(bins)
            bins.append(0)
        targets.append(Target(i, b, bins[b], kind))
        bins[b] += d
    # optional padding leaves J(1) a proper projection
    cod_dims = [min(MAX_DIM, used + int(rng.integers(0, 2))) for used in bins]
    codomain = Algebra.of(*cod_dims, weights=_weights(rng, len(bins)))
    targets.sort(key=lambda t: (t.block, t.codomain_block, t.offset))
    return JordanSpec(domain, codomain, tuple(targets))


def largest_anti_block(spec: JordanSpec) -> int:
    """Largest domain block of dim >= 2 with a transpose copy (0 if none)."""
    return max(
        (spec.domain.dims[i] for i, ks in enumerate(spec.kinds()) if "anti" in ks and spec.domain.dims[i] > 1),
        default=0,
    )


def has_hom_part(spec: JordanSpec) -> bool:
    """Whether some block is reached only through identity copies (dim-1 blocks count either way)."""
    return any(
        ks and ("anti" not in ks or spec.domain.dims[i] == 1) for i, ks in enumerate(spec.kinds())
    )


def random_algebra(rng: np.random.Generator, max_blocks: int = 3, max_dim: int = 3) -> Algebra:
    nb = int(rng.integers(1, max_blocks + 1))
    dims = [int(d) for d in rng.integers(1, max_dim + 1, nb)]
    return Algebra.of(*dims, weights=_weights(rng, nb))


def random_map(rng: np.random.Generator, domain: Algebra, codomain: Algebra) -> LinMap:
    """Ginibre matrix between two algebras; almost surely not Jordan."""
    return LinMap(domain, codomain, ginibre(rng, (codomain.total_dim, domain.total_dim)))


def random_cp_map(rng: np.random.Generator, domain: Algebra, codomain: Algebra, kraus: int = 2) -> LinMap:
    """``x -> sum_k K_k x_i K_k*`` summed over block pairs; completely positive by construction."""
    m = np.zeros((codomain.total_dim, domain.total_dim), dtype=complex)
    for i, d in enumerate(domain.dims):
        for j, e in enumerate(codomain.dims):
            rows, cols = codomain.block_slice(j), domain.block_slice(i)
            for _ in range(kraus):
                k = ginibre(rng, (e, d)) / np.sqrt(d * kraus)
                m[rows, cols] += np.kron(k, k.conj())
    return LinMap(domain, codomain, m)


def generate_instance(kind: str, seed: int) -> dict:
    """JSON-ready instance of the given kind (``jordan``, ``isometry`` or ``map``)."""
    from . import serialize
    from .yeadon import build_positive_isometry

    rng = rng_for(seed, 0)
    if kind == "jordan":
        spec = random_jordan_spec(rng, "any")
        j = build_jordan(spec)
        return {"kind": kind, "seed": seed, "spec": serialize.jordan_spec_to_json(spec), "map": serialize.linmap_to_json(j)}
    if kind == "isometry":
        spec = random_jordan_spec(rng, "any")
        p = ISOMETRY_EXPONENTS[int(rng.integers(len(ISOMETRY_EXPONENTS)))]
        t, triple = build_positive_isometry(build_jordan(spec), p, seed=seed)
        return {
            "kind": kind,
            "seed": seed,
            "p": p,
            "spec": serialize.jordan_spec_to_json(spec),
            "map": serialize.linmap_to_json(t),
            "triple": serialize.triple_to_json(triple),
        }
    if kind == "map":
        t = random_map(rng, random_algebra(rng), random_algebra(rng))
        return {"kind": kind, "seed": seed, "map": serialize.linmap_to_json(t)}
    raise ValueError(f"unknown instance kind {kind!r}; expected jordan, isometry or map")

