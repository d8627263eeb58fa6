"""Versioned JSON schemas for every JSON document the command line emits.

Each document carries a ``"schema"`` field naming one of the ids below.
"""

from __future__ import annotations

VERSION = 1

_DYADIC = {"type": "string", "pattern": r"^-?\d+\*2\^-?\d+$"}
_INTERVAL = {
    "type": "object",
    "required": ["lo", "hi", "decimal"],
    "properties": {"lo": _DYADIC, "hi": _DYADIC, "decimal": {"type": "string"}},
    "additionalProperties": False,
}
_RATIONAL = {"type": "string", "pattern": r"^-?\d+(/\d+)?$"}
_QUAD = {
    "type": "object",
    "required": ["tau", "coeffs"],
    "properties": {
        "tau": {"type": "integer", "minimum": 1},
        "coeffs": {"type": "object", "patternProperties": {r"^\d+$": _RATIONAL}, "additionalProperties": False},
    },
    "additionalProperties": False,
}


def schema_id(name: str) -> str:
    return f"rootsum/{name}/v{VERSION}"


def _doc(name: str, required: list[str], properties: dict) -> dict:
    props = {"schema": {"const": schema_id(name)}, **properties}
    return {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "$id": schema_id(name),
        "type": "object",
        "required": ["schema", *required],
        "properties": props,
    }


SCHEMAS: dict[str, dict] = {
    "basis-info": _doc(
        "basis-info",
        ["tau", "primes", "products"],
        {
            "tau": {"type": "integer"},
            "primes": {"type": "array", "items": {"type": "integer"}},
            "products": {"type": "array", "items": {"type": "integer"}},
        },
    ),
    "pigeonhole": _doc(
        "pigeonhole",
        ["w", "dist", "bound", "certified", "height_bound"],
        {
            "w": _QUAD,
            "dist": _INTERVAL,
            "bound": {"type": "string"},
            "certified": {"const": True},
            "height_bound": {"type": "integer", "minimum": 1},
        },
    ),
    "ladder-entry": {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "$id": schema_id("ladder-entry"),
        "type": "object",
        "required": ["tau", "j", "x", "frac", "lower_cert"],
        "properties": {
            "tau": {"type": "integer"},
            "j": {"type": "integer", "minimum": 1},
            "x": _QUAD,
            "frac": _INTERVAL,
            "lower_cert": _DYADIC,
        },
        "additionalProperties": False,
    },
    "approx": _doc(
        "approx",
        ["k", "n", "alpha", "b", "err", "bound", "D_emp", "method"],
        {
            "k": {"type": "integer", "minimum": 1},
            "n": {"type": "integer"},
            "alpha": _RATIONAL,
            "alpha_text": {"type": "string"},
            "gamma": _RATIONAL,
            "method": {"enum": ["greedy", "box"]},
            "b": {"type": "array", "items": {"type": "integer", "minimum": 1}},
            "err": _INTERVAL,
            "bound": {
                "type": "object",
                "required": ["lo", "hi", "decimal"],
                "properties": {"lo": _DYADIC, "hi": _DYADIC, "decimal": {"type": "string"}},
            },
            "D_emp": {"type": "string"},
            "greedy": {
                "type": "object",
                "required": ["coeffs", "err", "residual", "t", "y", "height_used"],
                "properties": {"err": _INTERVAL, "residual": _INTERVAL},
            },
        },
    ),
    "scan": _doc(
        "scan",
        ["mode", "k", "rows", "slope"],
        {
            "mode": {"enum": ["theorem1", "theorem2"]},
            "k": {"type": "integer"},
            "slope": {"type": ["number", "null"]},
            "rows": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["n", "err_lo", "err_hi", "bound", "slope_window"],
                },
            },
        },
    ),
    "theorem1": _doc(
        "theorem1",
        ["k", "a", "b", "G0", "v", "L"],
        {
            "k": {"type": "integer", "minimum": 1},
            "a": {"type": "array", "items": {"type": "integer", "minimum": 1}},
            "b": {"type": "array", "items": {"type": "integer", "not": {"const": 0}}},
            "G0": _RATIONAL,
            "v": {"type": "integer", "minimum": 1},
            "L": {"type": "integer", "minimum": 1},
            "pair": {"type": "object"},
        },
    ),
    "min-gap": _doc(
        "min-gap",
        ["tau", "n", "w", "dist"],
        {"tau": {"type": "integer"}, "n": {"type": "integer"}, "w": _QUAD, "dist": _INTERVAL},
    ),
    "series-probe": _doc(
        "series-probe",
        ["K", "C", "P"],
        {
            "K": {"type": "object"},
            "C": {"type": "array", "items": _RATIONAL},
            "P": {"type": "object"},
        },
    ),
}
