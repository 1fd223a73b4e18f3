"""Experiment configuration: a versioned JSON document validated against a schema.

Rationals may be written as JSON numbers or as ``"num/den"`` strings; the
latter are kept exact wherever a rate formula consumes them.  Unknown keys
are rejected.  Errors carry the offending field path and, when it can be
located in the source text, its line number.
"""

from __future__ import annotations

import json
import re

import jsonschema

from .errors import ConfigError, InvalidInputError
from .sets import family_from_dict

SCHEMA_VERSION = 1

_number = {"type": ["number", "string"]}
_vector = {"type": "array", "items": _number, "minItems": 1}
_expr = {"type": ["string", "integer"]}
_bound = {"oneOf": [{"type": "integer", "minimum": 0}, {"enum": ["auto", "capped"]}]}
_tol = {"type": "number", "exclusiveMinimum": 0}

#: allowed keys per check, and which of them are required
CHECKS = {
    "identities": ({"tol": _tol}, ()),
    "inner_products": ({"tol": _tol, "samples": {"type": "integer", "minimum": 1}}, ()),
    "main_identity": ({"tol": _tol, "triples": {"type": "integer", "minimum": 1}}, ()),
    "summability": ({"tol": _tol}, ()),
    "q_bound": ({"tol": _tol}, ()),
    "koh_lemmas": ({"tol": _tol, "trials": {"type": "integer", "minimum": 1}, "eps": _number}, ()),
    "limit": ({"target": _vector, "tol": _tol, "from": {"type": "integer", "minimum": 0}}, ("target",)),
    "map_agreement": ({"tol": _tol}, ()),
    "liminf": ({"eps": _number, "N": {"type": "integer", "minimum": 0}, "bound": _bound}, ("eps",)),
    "metastability": ({"eps": _number, "f": _expr, "bound": _bound}, ("eps", "f")),
    "asymptotic_regularity": (
        {"eps": _number, "f": _expr, "bound": _bound, "step_bound": _bound},
        ("eps", "f"),
    ),
    "finitization": ({"eps": _number, "target": _vector}, ("eps", "target")),
}

RATE_NAMES = (
    "psi", "phi", "Phi", "step", "alpha", "beta", "gamma", "omega", "theta",
    "kappa", "modulus_orthant", "modulus_semialgebraic", "modulus_from_rate",
)


def _check_schema():
    branches = []
    for name, (props, required) in CHECKS.items():
        branches.append(
            {
                "if": {"properties": {"name": {"const": name}}},
                "then": {
                    "properties": {"name": {"const": name}, **props},
                    "required": ["name", *required],
                    "additionalProperties": False,
                },
            }
        )
    return {
        "type": "object",
        "required": ["name"],
        "properties": {"name": {"enum": sorted(CHECKS)}},
        "allOf": branches,
    }


SET_SCHEMA = {
    "type": "object",
    "required": ["type"],
    "properties": {
        "type": {"enum": ["halfspace", "hyperplane", "ball", "box", "affine", "simplex"]},
        "a": _vector,
        "beta": _number,
        "center": _vector,
        "radius": _number,
        "lo": {"type": "array", "items": {"type": ["number", "string", "null"]}},
        "hi": {"type": "array", "items": {"type": ["number", "string", "null"]}},
        "basis": {"type": "array", "items": _vector},
        "offset": _vector,
        "dim": {"type": "integer", "minimum": 1},
    },
    "additionalProperties": False,
}

SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["version", "name", "family", "x0", "steps"],
    "properties": {
        "version": {"const": SCHEMA_VERSION},
        "name": {"type": "string", "pattern": r"^[A-Za-z0-9_.-]+$"},
        "description": {"type": "string"},
        "family": {
            "type": "object",
            "required": ["sets"],
            "properties": {
                "sets": {"type": "array", "items": SET_SCHEMA, "minItems": 2},
                "witness": _vector,
            },
            "additionalProperties": False,
        },
        "x0": _vector,
        "steps": {"type": "integer", "minimum": 0, "maximum": 10**6},
        "algorithm": {"enum": ["dykstra", "map"]},
        "map_order": {"enum": ["cyclic", "composition"]},
        "bound": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer"},
        "checks": {"type": "array", "items": _check_schema()},
        "rates": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "params"],
                "properties": {
                    "name": {"enum": list(RATE_NAMES)},
                    "params": {"type": "object", "additionalProperties": {"type": ["string", "integer", "number"]}},
                    "label": {"type": "string"},
                },
                "additionalProperties": False,
            },
        },
        "output": {
            "type": "object",
            "properties": {
                "dir": {"type": "string"},
                "trace": {"type": "boolean"},
                "series": {"type": "boolean"},
                "report": {"type": "boolean"},
            },
            "additionalProperties": False,
        },
    },
    "additionalProperties": False,
}

_VALIDATOR = jsonschema.Draft7Validator(SCHEMA)


def _locate(text, path):
    """Best-effort line number of the JSON member at ``path`` in ``text``."""
    if text is None:
        return None
    pos = 0
    for part in path:
        if isinstance(part, str):
            m = re.compile(r'"%s"\s*:' % re.escape(part)).search(text, pos)
            if not m:
                break
            pos = m.start()
    return text.count("\n", 0, pos) + 1 if pos else None


def _field(path):
    return "/".join(str(p) for p in path) or "<root>"


def _deepest(err):
    # descend into if/then and oneOf branches for the most specific message
    while err.context:
        err = max(err.context, key=lambda e: len(e.absolute_path))
    return err


def validate(doc, text=None):
    """Raise :class:`ConfigError` unless ``doc`` matches the schema and builds a family."""
    errors = sorted(_VALIDATOR.iter_errors(doc), key=lambda e: (list(map(str, e.absolute_path)), e.message))
    if errors:
        err = _deepest(errors[0])
        path = list(err.absolute_path)
        raise ConfigError(err.message, line=_locate(text, path), field=_field(path))
    try:
        fam = family_from_dict(doc["family"])
    except InvalidInputError as e:
        raise ConfigError(str(e), line=_locate(text, ["family"]), field="family") from None
    if len(doc["x0"]) != fam.dim:
        raise ConfigError(
            f"x0 has {len(doc['x0'])} entries, the sets live in dimension {fam.dim}",
            line=_locate(text, ["x0"]),
            field="x0",
        )
    return doc


def loads(text):
    """Parse and validate a configuration document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON: {e.msg}", line=e.lineno) from None
    return validate(doc, text)


def load(path):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())
