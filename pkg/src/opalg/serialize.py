"""JSON encoding of algebras, elements, maps and results.

Complex numbers are ``[re, im]`` pairs.  Elements do not carry their algebra;
decoders take it as an argument or fall back to unit weights.
"""

from __future__ import annotations

import json
import math
from typing import Any

import numpy as np

from .algebra import Algebra, Block, Element
from .jordan import JordanDecomposition, JordanSpec, Target
from .maps import LinMap


def _c(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _matrix_to_json(m: np.ndarray) -> list:
    return [[_c(z) for z in row] for row in np.asarray(m)]


def _matrix_from_json(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.size == 0:
        return np.zeros((len(data), 0), dtype=complex)
    if arr.ndim != 3 or arr.shape[-1] != 2:
        raise ValueError("matrices must be nested lists of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def algebra_to_json(a: Algebra) -> dict:
    return {"blocks": [{"dim": b.dim, "weight": b.weight} for b in a.blocks]}


def algebra_from_json(data: dict) -> Algebra:
    return Algebra(tuple(Block(int(b["dim"]), float(b.get("weight", 1.0))) for b in data["blocks"]))


def element_to_json(x: Element) -> dict:
    return {"blocks": [_matrix_to_json(b) for b in x.blocks]}


def element_from_json(data: dict, algebra: Algebra | None = None) -> Element:
    mats = [_matrix_from_json(b) for b in data["blocks"]]
    if algebra is None:
        algebra = Algebra.of(*[m.shape[0] for m in mats])
    return Element(algebra, mats)


def linmap_to_json(t: LinMap) -> dict:
    return {
        "domain": algebra_to_json(t.domain),
        "codomain": algebra_to_json(t.codomain),
        "matrix": _matrix_to_json(t.matrix),
    }


def linmap_from_json(data: dict) -> LinMap:
    dom = algebra_from_json(data["domain"])
    cod = algebra_from_json(data["codomain"])
    m = _matrix_from_json(data["matrix"]).reshape(cod.total_dim, dom.total_dim)
    return LinMap(dom, cod, m)


def jordan_spec_to_json(spec: JordanSpec) -> dict:
    return {
        "domain": algebra_to_json(spec.domain),
        "codomain": algebra_to_json(spec.codomain),
        "targets": [
            {"block": t.block, "codomain_block": t.codomain_block, "offset": t.offset, "kind": t.kind}
            for t in spec.targets
        ],
    }


def jordan_spec_from_json(data: dict) -> JordanSpec:
    return JordanSpec(
        algebra_from_json(data["domain"]),
        algebra_from_json(data["codomain"]),
        tuple(
            Target(int(t["block"]), int(t["codomain_block"]), int(t.get("offset", 0)), t.get("kind", "hom"))
            for t in data["targets"]
        ),
    )


def decomposition_to_json(d: JordanDecomposition) -> dict:
    return {
        "g": element_to_json(d.g),
        "f": element_to_json(d.f),
        "pi": linmap_to_json(d.pi),
        "sigma": linmap_to_json(d.sigma),
        "assignments": [{"central_projection_index": i, "kind": k} for i, k in d.assignments],
    }


def triple_to_json(t) -> dict:
    return {"w": element_to_json(t.w), "b": element_to_json(t.b), "J": linmap_to_json(t.J), "p": t.p}


def triple_from_json(data: dict):
    from .yeadon import YeadonTriple

    j = linmap_from_json(data["J"])
    return YeadonTriple(
        element_from_json(data["w"], j.codomain),
        element_from_json(data["b"], j.codomain),
        j,
        float(data["p"]),
    )


def cb_estimate_to_json(e) -> dict:
    return {
        "lower": e.lower,
        "upper": e.upper,
        "level": e.level,
        "certified": e.certified,
        "p": e.p,
        "witness": None if e.witness is None else element_to_json(e.witness),
    }


def parse_p(text) -> float:
    """``"inf"``/``"infinity"`` or a real number (fractions like ``4/3`` allowed)."""
    if isinstance(text, (int, float)):
        return float(text)
    s = str(text).strip().lower()
    if s in ("inf", "infinity", "oo"):
        return math.inf
    if "/" in s:
        num, den = s.split("/", 1)
        return float(num) / float(den)
    return float(s)


def to_jsonable(obj: Any) -> Any:
    """Best-effort conversion of result objects into plain JSON values."""
    if isinstance(obj, Element):
        return element_to_json(obj)
    if isinstance(obj, LinMap):
        return linmap_to_json(obj)
    if isinstance(obj, Algebra):
        return algebra_to_json(obj)
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        if math.isinf(f):
            return "inf" if f > 0 else "-inf"
        return f
    if isinstance(obj, complex):
        return _c(obj)
    if hasattr(obj, "__dataclass_fields__"):
        return {k: to_jsonable(getattr(obj, k)) for k in obj.__dataclass_fields__}
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=False)
