"""Rates of metastability, asymptotic regularity and liminf for Dykstra's method.

All functions compute exactly over ``int`` / ``Fraction``.  The single
over-approximation is the integer bound ``floor(e^y) + 1`` used for the
liminf rate, which only enlarges the search interval it describes.
Computations that would exceed :class:`~dykstra.exact.Caps` raise
:class:`~dykstra.errors.ResourceCapError`, carrying a certified lower bound
when one is available.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InvalidInputError, ResourceCapError
from .exact import (
    DEFAULT_CAPS,
    DISPLAY_LIMIT,
    Native,
    as_nat,
    as_pos,
    check_bits,
    counterfunction,
    exp_floor_bound,
    format_nat,
    format_pos,
    iterate,
    shifted,
    threshold,
)


def _nonneg(v, name):
    q = Fraction(v)
    if q < 0:
        raise InvalidInputError(f"{name} must be nonnegative, got {q}")
    return q


def _check_m(m):
    if int(m) != m or m < 2:
        raise InvalidInputError(f"m must be an integer >= 2, got {m}")
    return int(m)


def rate_psi(B, eps, f, *, caps=DEFAULT_CAPS):
    """Metastable rate for summable nonnegative sequences with sum at most ``B``.

    Returns ``g^(R)(0)`` where ``g(p) = p + f(p) + 1`` and ``R = floor(B/eps)``.
    """
    B = _nonneg(B, "B")
    eps = as_pos(eps, "eps")
    f = counterfunction(f)
    R = math.floor(B / eps)
    if R > caps.iterations:
        # g(p) >= p + 1, so the value is at least R
        raise ResourceCapError(
            f"Psi: R = floor(B/eps) = {_short(R)} exceeds iteration cap {caps.iterations}",
            stage="Psi iteration count",
            lower_bound=R,
        )
    return iterate(lambda p: p + f(p) + 1, 0, R, caps, stage="Psi value")


def rate_phi(B, m, eps, N, *, caps=DEFAULT_CAPS):
    """Liminf rate ``E * (N + 1)`` with ``E = floor(e^y) + 1``, ``y = ((m+1)B/eps)^2``.

    ``E`` is one more than the integer part of the exponential, so the
    returned interval length is never shorter than the exact formula.
    """
    B = as_nat(B, "B")
    m = _check_m(m)
    eps = as_pos(eps, "eps")
    N = as_nat(N, "N")
    y = (Fraction((m + 1) * B) / eps) ** 2
    return exp_floor_bound(y, caps.bits) * (N + 1)


def rate_Phi(b, m, eps, N, *, caps=DEFAULT_CAPS):
    """Liminf rate for the window sums of Dykstra's iteration: ``phi_{b^2}``."""
    b = as_nat(b, "b")
    return rate_phi(b * b, m, eps, N, caps=caps)


def rate_asymptotic_step(b, eps, f, *, caps=DEFAULT_CAPS):
    """Metastable rate for ``|x_k - x_{k+1}| <= eps``: ``Psi(b^2, eps^2, f)``."""
    b = as_nat(b, "b")
    eps = as_pos(eps, "eps")
    return rate_psi(b * b, eps * eps, f, caps=caps)


def rate_alpha(b, m, eps, f, *, caps=DEFAULT_CAPS):
    """Metastable rate of asymptotic regularity w.r.t. every projection.

    ``Psi(b^2, (eps/(m-1))^2, f + m - 2)``.
    """
    b = as_nat(b, "b")
    m = _check_m(m)
    eps = as_pos(eps, "eps")
    f = counterfunction(f)
    return rate_psi(b * b, (eps / (m - 1)) ** 2, shifted(f, m - 2), caps=caps)


def beta_iterates(b, eps, delta, *, caps=DEFAULT_CAPS):
    """Yield ``dt^(i)(1)`` for ``i = 0..ceil(4 b^4 / eps^2)``.

    ``dt(xi) = min(delta(xi^2/24b), xi^2/24b)``.
    """
    b = as_nat(b, "b")
    if b < 1:
        raise InvalidInputError("b must be >= 1")
    eps = as_pos(eps, "eps")
    delta = threshold(delta)
    r = math.ceil(Fraction(4 * b**4) / eps**2)
    if r > caps.iterations:
        raise ResourceCapError(
            f"beta: {r} iterations exceed cap {caps.iterations}", stage="beta iteration count"
        )
    xi = Fraction(1)
    yield xi
    for _ in range(r):
        s = xi * xi / (24 * b)
        d = as_pos(delta(s), "delta value")
        xi = check_bits(min(d, s), caps, "beta iterate")
        yield xi


def rate_beta(b, eps, delta, *, caps=DEFAULT_CAPS):
    """Threshold ``phi^2 / 24b`` with ``phi`` the least of the iterates (index 0 included)."""
    phi = min(beta_iterates(b, eps, delta, caps=caps))
    return phi * phi / (24 * as_nat(b, "b"))


def _phi_eps(b, m, eps, caps, label):
    """The counterfunction ``N -> Phi(b, m, eps, N)`` as an expression node."""
    E = rate_Phi(b, m, eps, 0, caps=caps)
    return Native(lambda N: E * (N + 1), label, direction=1)


def _tilde(Delta, caps):
    """``k -> min_{k' <= k} Delta(k')``; free when ``Delta`` is known antitone."""
    if Delta.monotone() in (0, -1):
        return Delta

    def running_min(k):
        if k > caps.iterations:
            raise ResourceCapError(
                f"Delta~: running minimum over {_short(k)} indices exceeds cap", stage="Delta~"
            )
        return min(Delta(j) for j in range(k + 1))

    return running_min


@dataclass
class GammaTrace:
    """Intermediate values recorded while evaluating the bypass rate."""

    phi_eps_label: str = ""
    alpha_bar: dict = field(default_factory=dict)
    xis: list = field(default_factory=list)
    lower_bound: int | None = None
    beta_bar: Fraction | None = None
    alpha_at_beta: int | None = None


def rate_gamma(b, m, eps, Delta, *, caps=DEFAULT_CAPS, record=None):
    """Bound on the index where Dykstra's iterate is close to an almost-common
    fixed point with small window sum.

    Pass a :class:`GammaTrace` as ``record`` to collect the intermediate
    ``alpha_bar`` values and ``beta`` iterates.
    """
    b = as_nat(b, "b")
    m = _check_m(m)
    eps = as_pos(eps, "eps")
    if eps > 1:
        raise InvalidInputError("gamma requires eps in (0, 1]")
    Delta = threshold(Delta)
    rec = record if record is not None else GammaTrace()
    expr = f"gamma(b={b}, m={m}, eps={eps}, Delta={Delta})"

    def note(v):
        if v is not None and (rec.lower_bound is None or v > rec.lower_bound):
            rec.lower_bound = v

    try:
        phi_eps = _phi_eps(b, m, eps * eps / 4, caps, f"Phi(b={b},m={m},eps={eps * eps / 4},n)")
    except ResourceCapError as e:
        # gamma >= Phi_eps(0)
        raise e.with_context(stage="Phi_eps", expression=expr) from None
    rec.phi_eps_label = str(phi_eps)
    D_tilde = _tilde(Delta, caps)

    def alpha_bar(eta):
        if eta not in rec.alpha_bar:
            try:
                rec.alpha_bar[eta] = rate_alpha(b, m, eta, phi_eps, caps=caps)
            except ResourceCapError as e:
                note(e.lower_bound)
                raise e.with_context(stage="alpha_bar", lower_bound=rec.lower_bound, expression=expr) from None
        return rec.alpha_bar[eta]

    def big_a(eta):
        a = alpha_bar(eta)
        v = a + phi_eps(a)
        note(v)
        return v

    def delta(eta):
        A = big_a(eta)
        return min(eps * eps / (8 * b * A), Fraction(D_tilde(A)))

    try:
        xis = []
        for xi in beta_iterates(b, eps * eps / 2, delta, caps=caps):
            xis.append(xi)
            rec.xis.append(xi)
    except ResourceCapError as e:
        raise e.with_context(stage="beta_bar", lower_bound=rec.lower_bound, expression=expr) from None
    phi = min(xis)
    rec.beta_bar = phi * phi / (24 * b)
    a = alpha_bar(rec.beta_bar)
    rec.alpha_at_beta = a
    return a + phi_eps(a)


def omega_delta(b, eps, f):
    """``k -> eps^2 / (48 b max(k + f(k), 1))``."""
    f = counterfunction(f)
    direction = -1 if f.monotone() in (0, 1) else None
    return Native(
        lambda k: Fraction(eps * eps) / (48 * b * max(k + f(k), 1)),
        f"{eps * eps}/(48*{b}*max(k+{f},1))",
        direction,
    )


def rate_Omega(b, m, eps, f, *, caps=DEFAULT_CAPS, record=None):
    """Rate of metastability for Dykstra's iteration: ``gamma(b, m, eps^2/96b, Delta_{eps,f})``."""
    b = as_nat(b, "b")
    if b < 1:
        raise InvalidInputError("b must be >= 1")
    m = _check_m(m)
    eps = as_pos(eps, "eps")
    if eps > 1:
        raise InvalidInputError("Omega requires eps in (0, 1]")
    f = counterfunction(f)
    eps_t = eps * eps / (96 * b)
    expr = f"Omega(b={b}, m={m}, eps={eps}, f={f}) = gamma(b, m, {eps_t}, {eps * eps}/(48*b*max(k+f(k),1)))"
    try:
        return rate_gamma(b, m, eps_t, omega_delta(b, eps, f), caps=caps, record=record)
    except ResourceCapError as e:
        raise ResourceCapError(str(e), stage=e.stage, lower_bound=e.lower_bound, expression=expr) from None


def _short(v):
    v = int(v)
    if v < 10**24:
        return str(v)
    return f"~10^{int(v.bit_length() * math.log10(2))}"


# -- reporting -----------------------------------------------------------------

@dataclass
class RateResult:
    """Outcome of one rate query, exact or capped."""

    name: str
    params: dict
    value: int | Fraction | None = None
    lower_bound: int | None = None
    stage: str | None = None
    expression: str | None = None
    message: str | None = None
    note: str | None = None

    @property
    def capped(self):
        return self.value is None or (isinstance(self.value, int) and self.value > DISPLAY_LIMIT)

    def display(self):
        if self.value is not None:
            if isinstance(self.value, Fraction):
                return format_pos(self.value)
            return format_nat(self.value)
        if self.lower_bound is not None and self.lower_bound >= DISPLAY_LIMIT:
            return "≥ 10^30 (capped)"
        if self.lower_bound is not None:
            return f"≥ {self.lower_bound} (capped)"
        return "capped"

    def to_dict(self):
        out = {"rate": self.name, "params": {k: str(v) for k, v in self.params.items()}, "value": self.display(), "capped": self.capped}
        if self.value is not None and not self.capped:
            out["exact"] = str(self.value)
        for k in ("stage", "expression", "message", "note"):
            if getattr(self, k):
                out[k] = getattr(self, k)
        return out


def evaluate(name, fn, params, *, note=None, **kw):
    """Call ``fn(**params)`` and wrap the outcome as a :class:`RateResult`."""
    try:
        v = fn(**params, **kw)
    except ResourceCapError as e:
        return RateResult(name, params, None, e.lower_bound, e.stage, e.expression, str(e), note)
    return RateResult(name, params, v, note=note)
