"""Built-in experiment configurations.

Each scenario is an ordinary configuration document, so ``run orthant2``
and ``run orthant2.json`` (with the dumped document) behave identically.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidInputError

_IDENTITY_CHECKS = [
    {"name": "identities"},
    {"name": "inner_products", "samples": 1000},
    {"name": "main_identity", "triples": 50},
    {"name": "summability"},
    {"name": "q_bound"},
]


def _halfspace(a, beta=0):
    return {"type": "halfspace", "a": list(a), "beta": beta}


def orthant2():
    return {
        "version": 1,
        "name": "orthant2",
        "description": "two axis half-spaces x <= 0, y <= 0 in the plane",
        "family": {"sets": [_halfspace([1, 0]), _halfspace([0, 1])], "witness": [0, 0]},
        "x0": [1, 1],
        "steps": 1000,
        "bound": 2,
        "seed": 0,
        "checks": _IDENTITY_CHECKS
        + [
            {"name": "koh_lemmas", "trials": 1000, "eps": "1/2"},
            {"name": "limit", "target": [0, 0], "tol": 1e-12},
            {"name": "liminf", "eps": "1/1000", "N": 0, "bound": "auto"},
            {"name": "asymptotic_regularity", "eps": "1/2", "f": "1"},
            {"name": "metastability", "eps": "1/2", "f": "1", "bound": "auto"},
            {"name": "finitization", "eps": "1/2", "target": [0, 0]},
        ],
        "rates": [
            {"name": "omega", "params": {"b": 2, "m": 2, "eps": "1/2", "f": "1"}},
            {"name": "theta", "params": {"b": 2, "m": 2, "eps": 12, "modulus": "orthant"}},
            {"name": "kappa", "params": {"b": 2, "n": 50, "eps": "1/10"}},
        ],
    }


def orthant3():
    return {
        "version": 1,
        "name": "orthant3",
        "description": "the negative orthant of R^3 as three coordinate half-spaces",
        "family": {
            "sets": [_halfspace([1, 0, 0]), _halfspace([0, 1, 0]), _halfspace([0, 0, 1])],
            "witness": [0, 0, 0],
        },
        "x0": [1, 2, -1],
        "steps": 600,
        "seed": 0,
        "checks": _IDENTITY_CHECKS
        + [
            {"name": "limit", "target": [0, 0, -1], "tol": 1e-12},
            {"name": "liminf", "eps": "1/1000"},
            {"name": "asymptotic_regularity", "eps": "1/10", "f": "n"},
            {"name": "metastability", "eps": "1/10", "f": "2", "bound": "auto"},
        ],
        "rates": [
            {"name": "modulus_orthant", "params": {"m": 3, "eps": 1}},
            {"name": "theta", "params": {"b": 3, "m": 3, "eps": 24, "modulus": "orthant"}},
        ],
    }


def halfdisc():
    return {
        "version": 1,
        "name": "halfdisc",
        "description": "lower half-plane intersected with the unit disc",
        "family": {
            "sets": [_halfspace([0, 1]), {"type": "ball", "center": [0, 0], "radius": 1}],
            "witness": [0, 0],
        },
        "x0": [2, 2],
        "steps": 6000,
        "bound": 3,
        "seed": 0,
        "checks": _IDENTITY_CHECKS
        + [
            {"name": "koh_lemmas", "trials": 1000, "eps": "1/2"},
            {"name": "limit", "target": [1, 0], "tol": 1e-4, "from": 5000},
            {"name": "liminf", "eps": "1/1000", "N": 0},
            {"name": "asymptotic_regularity", "eps": "1/100", "f": "3"},
            {"name": "metastability", "eps": "1/10", "f": "5", "bound": "auto"},
            {"name": "finitization", "eps": "1/10", "target": [1, 0]},
        ],
        "rates": [
            {"name": "alpha", "params": {"b": 3, "m": 2, "eps": "1/100", "f": "3"}},
            {"name": "omega", "params": {"b": 3, "m": 2, "eps": "1/10", "f": "5"}},
        ],
    }


def twolines():
    return {
        "version": 1,
        "name": "twolines",
        "description": "the lines y = 0 and y = x meeting at the origin",
        "family": {
            "sets": [
                {"type": "affine", "basis": [[1, 0]], "offset": [0, 0]},
                {"type": "affine", "basis": [[1, 1]], "offset": [0, 0]},
            ],
            "witness": [0, 0],
        },
        "x0": [1, 0],
        "steps": 400,
        "seed": 0,
        "checks": _IDENTITY_CHECKS
        + [
            {"name": "limit", "target": [0, 0], "tol": 1e-6, "from": 200},
            {"name": "map_agreement", "tol": 1e-9},
            {"name": "asymptotic_regularity", "eps": "1/100", "f": "3"},
            {"name": "liminf", "eps": "1/1000"},
            {"name": "finitization", "eps": "1/100", "target": [0, 0]},
        ],
        "rates": [{"name": "alpha", "params": {"b": 1, "m": 2, "eps": "1/100", "f": "3"}}],
    }


def affine3(seed=3):
    """Three random planes in ``R^3`` through a common random point."""
    rng = np.random.default_rng(seed)
    c = rng.standard_normal(3)
    sets = []
    for _ in range(3):
        basis = rng.standard_normal((2, 3))
        sets.append({"type": "affine", "basis": basis.tolist(), "offset": c.tolist()})
    x0 = (c + 2.0 * rng.standard_normal(3)).tolist()
    return {
        "version": 1,
        "name": "affine3",
        "description": f"three random planes through a common point (seed {seed})",
        "family": {"sets": sets, "witness": c.tolist()},
        "x0": x0,
        "steps": 600,
        "seed": seed,
        "checks": _IDENTITY_CHECKS + [{"name": "map_agreement", "tol": 1e-9}, {"name": "liminf", "eps": "1/1000"}],
        "rates": [],
    }


BUILTIN = {
    "orthant2": orthant2,
    "orthant3": orthant3,
    "halfdisc": halfdisc,
    "twolines": twolines,
    "affine3": affine3,
}


def builtin(name):
    try:
        return BUILTIN[name]()
    except KeyError:
        raise InvalidInputError(f"unknown scenario {name!r}; built-ins: {', '.join(BUILTIN)}") from None
