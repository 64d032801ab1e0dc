"""JSON input specs (schema-validated) and deterministic JSON reports."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

import jsonschema
import numpy as np

from . import __version__
from .actions import ExtendedAction, FiniteOrthGroup, TorusAction, close_group
from .errors import SpecInvalid
from .lattice import IntMatrix

_INT_MATRIX = {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}}
_REAL_MATRIX = {"type": "array", "minItems": 1, "items": {"type": "array", "minItems": 1, "items": {"type": "number"}}}
_SEED = {"type": "integer", "minimum": 0}

ACTION_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["k", "n", "W"],
    "properties": {
        "k": {"type": "integer", "minimum": 0},
        "n": {"type": "integer", "minimum": 0},
        "f": {"type": "integer", "minimum": 0},
        "W": _INT_MATRIX,
        "finite_generators": {"type": "array", "items": _REAL_MATRIX},
        "scan": {
            "type": "object",
            "additionalProperties": False,
            "required": ["direction", "radii", "seed"],
            "properties": {
                "direction": {"type": "array", "minItems": 1, "items": {"type": "number"}},
                "radii": {"type": "array", "minItems": 1, "items": {"type": "number", "exclusiveMinimum": 0}},
                "seed": _SEED,
                "planes_per_point": {"type": "integer", "minimum": 1},
            },
        },
        "pairs": {
            "type": "object",
            "additionalProperties": False,
            "required": ["count", "seed"],
            "properties": {"count": {"type": "integer", "minimum": 1}, "seed": _SEED},
        },
    },
}

GROUP_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["dim", "generators"],
    "properties": {
        "dim": {"type": "integer", "minimum": 1},
        "generators": {"type": "array", "items": _REAL_MATRIX},
        "max_order": {"type": "integer", "minimum": 1},
        "seed": _SEED,
    },
}


@dataclass(frozen=True)
class LoadedSpec:
    doc: dict
    sha256: str
    kind: str  # "action" or "group"


def load_spec(path) -> LoadedSpec:
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise SpecInvalid(f"cannot read spec {path}: {exc.strerror}") from exc
    digest = hashlib.sha256(raw).hexdigest()
    try:
        doc = json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise SpecInvalid(f"malformed JSON in {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise SpecInvalid("spec must be a JSON object")
    kind = "group" if "generators" in doc else "action"
    validate(doc, GROUP_SCHEMA if kind == "group" else ACTION_SCHEMA)
    return LoadedSpec(doc, digest, kind)


def validate(doc, schema) -> None:
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise SpecInvalid(f"spec invalid at {where}: {exc.message}") from exc


def _check_finite(mats, what: str) -> None:
    for i, g in enumerate(mats):
        if not np.all(np.isfinite(g)):
            raise SpecInvalid(f"{what} {i} has non-finite entries")


def action_from_doc(doc: dict) -> TorusAction:
    k, n, f = doc["k"], doc["n"], doc.get("f", 0)
    W = doc["W"]
    if len(W) != k or any(len(row) != n for row in W):
        raise SpecInvalid(f"W must be {k} x {n}")
    return TorusAction(IntMatrix.from_rows(W, n), f)


def extended_from_doc(doc: dict, tol: float = 1e-9) -> ExtendedAction | None:
    gens = doc.get("finite_generators")
    if not gens:
        return None
    torus = action_from_doc(doc)
    mats = [np.array(g, dtype=float) for g in gens]
    _check_finite(mats, "finite generator")
    for i, g in enumerate(mats):
        if g.shape != (torus.m, torus.m):
            raise SpecInvalid(f"finite generator {i} must be {torus.m} x {torus.m}")
    return ExtendedAction.build(torus, mats, tol=max(tol, 1e-12))


def group_from_doc(doc: dict, tol: float = 1e-9) -> FiniteOrthGroup:
    dim = doc["dim"]
    mats = [np.array(g, dtype=float) for g in doc["generators"]]
    _check_finite(mats, "generator")
    for i, g in enumerate(mats):
        if g.shape != (dim, dim):
            raise SpecInvalid(f"generator {i} must be {dim} x {dim}")
    if not mats:
        return FiniteOrthGroup.trivial(dim)
    return close_group(mats, tol, doc.get("max_order", 1000))


# --- reports ----------------------------------------------------------------


def _clean(obj):
    """JSON-safe copy: numpy scalars and arrays to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return 0.0 if v == 0 else v  # no negative zero in reports
    return obj


def canonical_json(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, separators=(",", ":"))


def build_report(command: str, input_sha256, result: dict, metadata: dict | None = None) -> dict:
    """Report with a stable hash over everything except ``metadata``."""
    body = {
        "command": command,
        "input_sha256": input_sha256,
        "tool_version": __version__,
        "result": _clean(result),
    }
    body["stable_hash"] = hashlib.sha256(canonical_json(body).encode()).hexdigest()
    body["metadata"] = _clean(metadata or {})
    return body


def dump_report(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"
