"""Moduli of regularity and the convergence rate they induce.

A modulus of regularity ``mu(r, eps)`` for sets ``C_1..C_m`` around a point
``p`` of their intersection guarantees that any ``x`` with ``|x - p| <= r``
and ``|x - P_j(x)| <= mu(r, eps)`` for every ``j`` lies within ``eps`` of the
intersection.  Every value here is an exact positive rational; where the
true value is irrational a rational *lower* bound is returned, which is the
sound direction for a modulus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import InvalidInputError, ResourceCapError
from .exact import DEFAULT_CAPS, Expr, as_nat, as_pos, bits_of, threshold
from .rates import _check_m, _phi_eps, rate_alpha

PROVENANCES = ("orthant-instance", "semi-algebraic", "from-rate", "user-supplied")

LOG2_5 = math.log2(5)


@dataclass(frozen=True)
class RegularityModulus:
    """Evaluator ``(r, eps) -> mu_r(eps)`` tagged with where it came from.

    ``conditional`` records an assumption the caller is responsible for,
    such as the Hölder constant of a semi-algebraic family.
    """

    fn: object
    provenance: str
    label: str
    conditional: str | None = None
    shift: int = 0

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise InvalidInputError(f"unknown modulus provenance {self.provenance!r}")

    def __call__(self, r, eps):
        r = as_nat(r, "r") + self.shift
        v = as_pos(self.fn(r, as_pos(eps, "eps")), "modulus value")
        return v

    def recentred(self, distance):
        """The same modulus viewed from a new centre ``q`` with ``|p - q| <= distance``.

        ``B_r(q)`` sits inside ``B_{r + ceil(distance)}(p)``, so the radius is
        shifted by ``ceil(distance)``.
        """
        if distance < 0:
            raise InvalidInputError("distance must be nonnegative")
        k = math.ceil(distance)
        return RegularityModulus(self.fn, self.provenance, self.label, self.conditional, self.shift + k)

    def describe(self):
        s = self.label if not self.shift else f"{self.label} recentred by {self.shift}"
        return s if not self.conditional else f"{s} ({self.conditional})"


# -- orthant -------------------------------------------------------------------

_SQRT_BITS = 64


def modulus_orthant(m, eps):
    """Rational lower bound of ``eps / sqrt(m)``; exact when ``m`` is a perfect square.

    For the sets ``{x : x_j <= 0}`` in ``R^m`` the squared distance to the
    orthant is the sum of the squared residuals, at most ``m`` times the
    largest one, which makes ``eps / sqrt(m)`` a modulus for every radius.
    """
    m = _check_m(m)
    eps = as_pos(eps, "eps")
    s = math.isqrt(m)
    if s * s == m:
        return eps / s
    # floor(2^k / sqrt(m)) / 2^k <= 1/sqrt(m)
    k = _SQRT_BITS
    return eps * Fraction(math.isqrt((1 << (2 * k)) // m), 1 << k)


def orthant_modulus(m):
    return RegularityModulus(lambda r, eps: modulus_orthant(m, eps), "orthant-instance", f"orthant(m={m})")


# -- semi-algebraic --------------------------------------------------------------

@dataclass(frozen=True)
class SemiAlgebraicParams:
    """Ambient dimension ``n``, maximal degree ``d``, Hölder constant ``c`` and set count ``m``.

    ``polynomials`` (the number of defining inequalities) is accepted for
    bookkeeping but does not enter the formula.
    """

    n: int
    d: int
    c: Fraction
    m: int
    polynomials: int | None = None

    def __post_init__(self):
        for k in ("n", "d", "m"):
            v = getattr(self, k)
            if int(v) != v or v < 1:
                raise InvalidInputError(f"{k} must be a positive integer, got {v}")
        object.__setattr__(self, "c", as_pos(self.c, "c"))

    @property
    def sigma(self):
        """``min{((2d-1)^n + 1)/2, C(n-1, floor((n-1)/2)) d^n}``.

        ``(2d-1)^n`` is odd, so the first entry is always an integer.
        """
        n, d = self.n, self.d
        first = ((2 * d - 1) ** n + 1) // 2
        second = math.comb(n - 1, (n - 1) // 2) * d**n
        return min(first, second)


def modulus_semialgebraic(params, r, eps, *, caps=DEFAULT_CAPS):
    """``(eps/c)^sigma / m``; the same value for every radius ``r``.

    The result is only a modulus if ``c`` really is a Hölder constant for
    the family on ``B_r(p)``; that is the caller's claim.
    """
    as_nat(r, "r")
    eps = as_pos(eps, "eps")
    base = eps / params.c
    sigma = params.sigma
    if bits_of(base) * sigma > caps.bits:
        raise ResourceCapError(
            f"semi-algebraic modulus: (eps/c)^{sigma} exceeds {caps.bits} bits", stage="semi-algebraic power"
        )
    return base**sigma / params.m


def semialgebraic_modulus(params):
    return RegularityModulus(
        lambda r, eps: modulus_semialgebraic(params, r, eps),
        "semi-algebraic",
        f"semialgebraic(n={params.n}, d={params.d}, c={params.c}, m={params.m})",
        conditional="conditional on supplied c",
    )


# -- necessity side --------------------------------------------------------------

def _power5_exceeds(k, bound):
    """Whether ``5^k > bound`` for a positive rational ``bound``, avoiding huge powers."""
    if k * LOG2_5 > bits_of(bound) + 2:
        return True
    return 5**k > bound


def kappa_threshold(b, n, eps):
    """``max{eps^2/(4bn), eps/5^(n-1)}``.

    If every initial residual is at most this value then ``|x_n - x_0| <= eps``.
    """
    b = as_nat(b, "b")
    n = as_nat(n, "n")
    if b < 1 or n < 1:
        raise InvalidInputError("b and n must be >= 1")
    eps = as_pos(eps, "eps")
    first = eps * eps / (4 * b * n)
    # second branch loses once 5^(n-1) > eps/first
    if _power5_exceeds(n - 1, eps / first):
        return first
    return max(first, eps / 5 ** (n - 1))


@dataclass(frozen=True)
class FromRate:
    """Value of the modulus induced by a rate, with the rate value used."""

    value: Fraction
    rho: int
    truncated: bool = False


def _rate_callable(rho):
    if isinstance(rho, Expr):
        return (lambda b, eps: math.ceil(rho(eps))), str(rho)
    if callable(rho):
        return rho, getattr(rho, "__name__", "rho")
    if isinstance(rho, int):
        return (lambda b, eps: rho), str(rho)
    expr = threshold(rho)
    # rationals are rounded up: a larger rate bound is still a rate bound
    return (lambda b, eps: math.ceil(expr(eps))), str(expr)


def modulus_from_rate(b, eps, rho, *, caps=DEFAULT_CAPS):
    """``max{eps^2/(16 b rho), eps/(2 * 5^rho)}`` with ``rho = rho(b, eps/2)``.

    ``rho`` is a callable ``(b, eps) -> int``, an integer, or an expression
    in ``eps``.  When ``5^rho`` is beyond the magnitude cap only the first
    branch is returned and ``truncated`` is set; a smaller value remains a
    valid modulus.
    """
    b = as_nat(b, "b")
    if b < 1:
        raise InvalidInputError("b must be >= 1")
    eps = as_pos(eps, "eps")
    fn, _ = _rate_callable(rho)
    r = as_nat(fn(b, eps / 2), "rate value")
    if r < 1:
        raise InvalidInputError("rate value must be >= 1")
    first = eps * eps / (16 * b * r)
    if r * LOG2_5 > caps.bits:
        return FromRate(first, r, truncated=True)
    return FromRate(max(first, eps / (2 * 5**r)), r)


def rate_modulus(rho):
    fn, label = _rate_callable(rho)
    return RegularityModulus(
        lambda r, eps: modulus_from_rate(max(r, 1), eps, fn).value, "from-rate", f"from_rate({label})"
    )


def user_modulus(expr):
    """Modulus given as a threshold expression in ``eps`` (independent of ``r``)."""
    e = threshold(expr)
    return RegularityModulus(lambda r, eps: e(eps), "user-supplied", f"user({e})")


# -- rate --------------------------------------------------------------------------

@dataclass
class ThetaTrace:
    """Intermediate values of the regularity-based rate."""

    eps_tilde: Fraction | None = None
    mu_value: Fraction | None = None
    alpha: int | None = None
    phi_at_alpha: int | None = None


def rate_Theta(b, m, eps, mu, *, caps=DEFAULT_CAPS, record=None):
    """Rate of convergence from a modulus of regularity.

    With ``e = eps^2/32b`` and ``Phi_eps(N) = Phi(b, m, eps^2/16, N)`` returns
    ``a + Phi_eps(a)`` where ``a = alpha(b, m, mu(b, e), Phi_eps)``.
    """
    b = as_nat(b, "b")
    if b < 1:
        raise InvalidInputError("b must be >= 1")
    m = _check_m(m)
    eps = as_pos(eps, "eps")
    rec = record if record is not None else ThetaTrace()
    label = getattr(mu, "describe", lambda: str(mu))()
    expr = f"Theta(b={b}, m={m}, eps={eps}, mu={label})"
    rec.eps_tilde = eps * eps / (32 * b)
    rec.mu_value = as_pos(mu(b, rec.eps_tilde), "modulus value")
    try:
        phi_eps = _phi_eps(b, m, eps * eps / 16, caps, f"Phi(b={b},m={m},eps={eps * eps / 16},n)")
    except ResourceCapError as e:
        raise e.with_context(stage="Phi_eps", expression=expr) from None
    try:
        rec.alpha = rate_alpha(b, m, rec.mu_value, phi_eps, caps=caps)
    except ResourceCapError as e:
        raise e.with_context(stage="alpha", expression=expr) from None
    rec.phi_at_alpha = phi_eps(rec.alpha)
    return rec.alpha + rec.phi_at_alpha
