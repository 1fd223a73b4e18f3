"""Named rate queries shared by the command line and experiment configs.

Each entry maps a query name to a function and an ordered list of
``(parameter, kind)`` pairs; :func:`run_query` parses the raw parameter
values exactly and returns a :class:`~dykstra.rates.RateResult`.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import InvalidInputError
from .exact import as_nat, as_pos, counterfunction, threshold
from .rates import (
    RateResult,
    evaluate,
    rate_alpha,
    rate_asymptotic_step,
    rate_beta,
    rate_gamma,
    rate_Omega,
    rate_phi,
    rate_Phi,
    rate_psi,
)
from .regularity import (
    SemiAlgebraicParams,
    kappa_threshold,
    modulus_from_rate,
    modulus_orthant,
    modulus_semialgebraic,
    orthant_modulus,
    rate_modulus,
    rate_Theta,
    semialgebraic_modulus,
    user_modulus,
)


def parse_nonneg(v, name="value"):
    try:
        q = Fraction(str(v).strip()) if not isinstance(v, (int, Fraction)) else Fraction(v)
    except (ValueError, ZeroDivisionError):
        raise InvalidInputError(f"{name} is not a rational number: {v!r}") from None
    if q < 0:
        raise InvalidInputError(f"{name} must be nonnegative, got {q}")
    return q


def parse_pos(v, name="value"):
    q = parse_nonneg(v, name)
    return as_pos(q, name)


def parse_nat(v, name="value"):
    q = parse_nonneg(v, name)
    if q.denominator != 1:
        raise InvalidInputError(f"{name} must be a natural number, got {q}")
    return as_nat(q.numerator, name)


def parse_modulus(spec, m=None):
    """Modulus from a spec string.

    ``orthant`` (uses the query's ``m``), ``semialgebraic:n=2,d=2,c=1``
    (``m`` defaults to the query's), ``rate:<expr in eps>`` or
    ``user:<expr in eps>``.
    """
    spec = str(spec).strip()
    kind, _, rest = spec.partition(":")
    if kind == "orthant":
        if m is None:
            raise InvalidInputError("orthant modulus needs m")
        return orthant_modulus(m)
    if kind == "semialgebraic":
        kw = {}
        for item in filter(None, rest.split(",")):
            k, _, v = item.partition("=")
            kw[k.strip()] = v.strip()
        try:
            params = SemiAlgebraicParams(
                int(kw["n"]), int(kw["d"]), parse_pos(kw["c"], "c"), int(kw.get("m", m or 0))
            )
        except KeyError as e:
            raise InvalidInputError(f"semialgebraic modulus is missing {e.args[0]!r}") from None
        return semialgebraic_modulus(params)
    if kind == "rate":
        return rate_modulus(rest)
    if kind == "user":
        return user_modulus(rest)
    raise InvalidInputError(f"unknown modulus spec {spec!r}")


PARSERS = {
    "nat": parse_nat,
    "pos": parse_pos,
    "nonneg": parse_nonneg,
    "counter": lambda v, name: counterfunction(str(v)),
    "threshold": lambda v, name: threshold(str(v)),
    "modulus": lambda v, name: str(v),
    "int": lambda v, name: int(v),
}


def _theta(b, m, eps, modulus):
    return rate_Theta(b, m, eps, parse_modulus(modulus, m))


def _semialgebraic(n, d, c, m, r, eps):
    return modulus_semialgebraic(SemiAlgebraicParams(n, d, c, m), r, eps)


def _from_rate(b, eps, rho):
    return modulus_from_rate(b, eps, rho).value


_B, _M, _EPS, _F = ("b", "nat"), ("m", "nat"), ("eps", "pos"), ("f", "counter")

QUERIES = {
    "psi": (rate_psi, [("B", "nonneg"), _EPS, _F], "metastable rate for summable sequences"),
    "phi": (rate_phi, [("B", "nat"), _M, _EPS, ("N", "nat")], "liminf rate"),
    "Phi": (rate_Phi, [_B, _M, _EPS, ("N", "nat")], "liminf rate of the window sums"),
    "step": (rate_asymptotic_step, [_B, _EPS, _F], "metastable rate for step norms"),
    "alpha": (rate_alpha, [_B, _M, _EPS, _F], "metastable rate of asymptotic regularity"),
    "beta": (rate_beta, [_B, _EPS, ("delta", "threshold")], "threshold for almost-common fixed points"),
    "gamma": (rate_gamma, [_B, _M, _EPS, ("Delta", "threshold")], "bypass rate"),
    "omega": (rate_Omega, [_B, _M, _EPS, _F], "rate of metastability of the iteration"),
    "theta": (_theta, [_B, _M, _EPS, ("modulus", "modulus")], "rate of convergence from a modulus"),
    "kappa": (kappa_threshold, [_B, ("n", "nat"), _EPS], "residual threshold for n steps"),
    "modulus_orthant": (modulus_orthant, [_M, _EPS], "modulus of the negative orthant"),
    "modulus_semialgebraic": (
        _semialgebraic,
        [("n", "int"), ("d", "int"), ("c", "pos"), _M, ("r", "nat"), _EPS],
        "Hölder-type modulus",
    ),
    "modulus_from_rate": (_from_rate, [_B, _EPS, ("rho", "threshold")], "modulus induced by a rate"),
}

NOTES = {
    "phi": "E = floor(e^y) + 1 is a certified upper bound for the exponential factor",
    "Phi": "E = floor(e^y) + 1 is a certified upper bound for the exponential factor",
}


def parse_params(name, raw):
    if name not in QUERIES:
        raise InvalidInputError(f"unknown rate {name!r}")
    _, spec, _ = QUERIES[name]
    names = [p for p, _ in spec]
    extra = set(raw) - set(names)
    if extra:
        raise InvalidInputError(f"unknown parameter(s) for {name}: {', '.join(sorted(extra))}")
    out = {}
    for p, kind in spec:
        if p not in raw:
            raise InvalidInputError(f"{name} needs parameter {p!r}")
        out[p] = PARSERS[kind](raw[p], p)
    return out


def run_query(name, raw):
    """Evaluate query ``name`` with unparsed parameter values ``raw``."""
    params = parse_params(name, raw)
    fn = QUERIES[name][0]
    note = NOTES.get(name)
    if name == "theta" and str(raw.get("modulus", "")).startswith("semialgebraic"):
        note = "conditional on supplied c"
    if name == "modulus_semialgebraic":
        note = "conditional on supplied c"
    res = evaluate(name, fn, params, note=note)
    res.params = {k: str(raw[k]) for k in raw}
    return res


def result_lines(res: RateResult):
    """Human-readable rendering: the value first, then context for capped results."""
    lines = [res.display()]
    if res.capped:
        if res.stage:
            lines.append(f"stage: {res.stage}")
        if res.expression:
            lines.append(f"expression: {res.expression}")
        if res.message:
            lines.append(f"reason: {res.message}")
    if res.note:
        lines.append(f"note: {res.note}")
    return lines
