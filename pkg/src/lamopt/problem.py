"""Design-problem files: JSON schema, parsing and canonical digests.

All quantities use N, mm and MPa.  Running loads are N/mm with
compression negative; strains and percentages are dimensionless.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

import jsonschema

from .clt import QUASI_ISO, AngleSet, LoadCase, Material, StrainAllowables
from .inner import RuleSetInner
from .outer import RuleSetOuter

SCHEMA_VERSION = 1

_number = {"type": "number"}
_pct = {"oneOf": [{"type": "number", "minimum": 0, "maximum": 1},
                  {"type": "array", "items": {"type": "number", "minimum": 0, "maximum": 1}}]}

PROBLEM_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["schema_version", "material", "loads"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "material": {
            "type": "object",
            "additionalProperties": False,
            "required": ["E1", "E2", "G12", "nu12", "ply_thickness"],
            "properties": {
                "E1": _number, "E2": _number, "G12": _number, "nu12": _number,
                "ply_thickness": _number,
                "allowables": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {"tension": _number, "compression": _number,
                                   "shear": _number},
                },
            },
        },
        "angles": {"type": "array", "items": _number, "minItems": 1, "maxItems": 8},
        "loads": {
            "type": "object",
            "additionalProperties": False,
            "required": ["plate_a", "plate_b"],
            "properties": {"Nx": _number, "Ny": _number, "Nxy": _number,
                           "plate_a": _number, "plate_b": _number},
        },
        "outer_rules": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"min_pct": _pct, "max_pct": _pct},
        },
        "inner_rules": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "max_contiguous": {"type": "integer", "minimum": 0},
                "outer_ply_angles": {"type": "array", "items": _number, "minItems": 1},
                "max_disorientation": {"type": "number", "minimum": 0},
            },
        },
        "solver": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "mode": {"enum": ["midpoint", "exact"]},
                "max_mode": {"type": "integer", "minimum": 1},
                "max_total_plies": {"type": "integer", "minimum": 1},
                "tol": {"type": "number", "exclusiveMinimum": 0},
                "seed": {"type": "integer"},
            },
        },
    },
}

STACK_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["plies"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "plies": {"type": "array", "items": _number, "minItems": 1},
        "angles": {"type": "array", "items": _number, "minItems": 1, "maxItems": 8},
        "material": PROBLEM_SCHEMA["properties"]["material"],
    },
}


def _per_angle(value, n, default):
    if value is None:
        return (default,) * n
    if isinstance(value, (int, float)):
        return (float(value),) * n
    if len(value) != n:
        raise ValueError(f"expected {n} percentage bounds, got {len(value)}")
    return tuple(float(v) for v in value)


def material_from_dict(d) -> Material:
    return Material(d["E1"], d["E2"], d["G12"], d["nu12"], d["ply_thickness"],
                    StrainAllowables(**d.get("allowables", {})))


@dataclass(frozen=True)
class DesignProblem:
    material: Material
    angles: AngleSet
    loads: LoadCase
    outer: RuleSetOuter
    inner: RuleSetInner
    mode: str = "midpoint"
    tol: float = 1e-9
    seed: int = 0

    @classmethod
    def from_dict(cls, data) -> "DesignProblem":
        """Validate against :data:`PROBLEM_SCHEMA` and build the problem.

        Raises ``jsonschema.ValidationError`` or ``ValueError``.
        """
        jsonschema.validate(data, PROBLEM_SCHEMA)
        angles = AngleSet(tuple(data.get("angles", QUASI_ISO)))
        solver = data.get("solver", {})
        ld = data["loads"]
        loads = LoadCase(ld.get("Nx", 0.0), ld.get("Ny", 0.0), ld.get("Nxy", 0.0),
                         ld["plate_a"], ld["plate_b"], solver.get("max_mode", 4))
        orules = data.get("outer_rules", {})
        outer = RuleSetOuter(_per_angle(orules.get("min_pct"), len(angles), 0.0),
                             _per_angle(orules.get("max_pct"), len(angles), 1.0),
                             solver.get("max_total_plies", 40))
        irules = data.get("inner_rules", {})
        skin = irules.get("outer_ply_angles")
        inner = RuleSetInner(irules.get("max_contiguous", 0),
                             None if skin is None else tuple(skin),
                             irules.get("max_disorientation", 0.0))
        for a in inner.outer_ply_angles or ():
            angles.index(a)
        return cls(material_from_dict(data["material"]), angles, loads, outer,
                   inner, solver.get("mode", "midpoint"), solver.get("tol", 1e-9),
                   solver.get("seed", 0))


def digest(data) -> str:
    """SHA-256 of the canonical JSON form of a parsed document."""
    text = json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=True)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()
