"""Seeded Ginibre-style samplers for algebra elements."""

from __future__ import annotations

import numpy as np

from .algebra import Algebra, Element


def rng_for(seed, *stream: int) -> np.random.Generator:
    """Independent generator for a sub-stream, e.g. ``rng_for(seed, level, restart)``."""
    return np.random.default_rng([int(seed), *[int(s) for s in stream]])


def ginibre(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_element(a: Algebra, rng: np.random.Generator) -> Element:
    return Element(a, [ginibre(rng, (d, d)) for d in a.dims])


def random_hermitian(a: Algebra, rng: np.random.Generator) -> Element:
    x = random_element(a, rng)
    return (x + x.adjoint()) * 0.5


def random_positive(a: Algebra, rng: np.random.Generator) -> Element:
    x = random_element(a, rng)
    return x.adjoint() @ x


def random_unitary(a: Algebra, rng: np.random.Generator) -> Element:
    mats = []
    for d in a.dims:
        q, r = np.linalg.qr(ginibre(rng, (d, d)))
        ph = np.diag(r) / np.abs(np.diag(r))
        mats.append(q * ph)
    return Element(a, mats)


def random_unit_vector(rng: np.random.Generator, n: int) -> np.ndarray:
    v = ginibre(rng, n)
    return v / np.linalg.norm(v)
