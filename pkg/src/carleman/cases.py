"""Catalogue of concrete unique-continuation configurations.

Each case fixes a warped end (sigma), a weight family h_tau, a gauge G and
an explicit k2 choice for which F = (h' + (n-1) sigma'/sigma - G')/2 has a
closed form, together with growth envelopes for the absorbable potentials
q1, q2 and for the solution decay the regime checks certify against.

Families:
  Eu-a/b/c  flat warp sigma = r       (power / log-power / steep power weight)
  Hyp-a/b   sigma = sinh r
  Ex-a/b    sigma = exp(r^beta)

Eu-c and Hyp-b run the weight so hot that r|h'| exceeds the r^2 coefficient
budget which would otherwise remove the annulus gradient condition; their
certificates carry that condition as a standing assumption
(needs_extra_gradient).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .funcjet import FunctionJet3, make_family
from .geometry import WarpedCylinder
from .growth import AsymptoticSymbol, Term as GrowthTerm, make_symbol
from .weights import CarlemanWeights, build_weights

__all__ = [
    "CASE_IDS",
    "CorollaryCase",
    "LeadingCheck",
    "ParameterRangeError",
    "make_case",
]

CASE_IDS = ("Eu-a", "Eu-b", "Eu-c", "Hyp-a", "Hyp-b", "Ex-a", "Ex-b")

ZERO_JET = FunctionJet3(())
ZERO_SYMBOL = AsymptoticSymbol(())


class ParameterRangeError(ValueError):
    """Parameter outside the case's stated range.  When a sibling case
    covers the requested value, redirect names it."""

    def __init__(self, message: str, redirect: str | None = None):
        super().__init__(message)
        self.redirect = redirect


@dataclass(frozen=True)
class LeadingCheck:
    """Expected large-r behaviour of one bundle quantity.

    fit mode: a log-log regression over the window must recover
    (coefficient, exponent); log_exponent must be 0.  ratio mode:
    quantity / (coefficient * r^p * (log r)^q) must land within
    tol_coefficient of 1 at the far end of the window.
    """

    quantity: str
    mode: str
    coefficient_of: Callable[[float], float]
    exponent: float
    window: tuple[float, float]
    tol_coefficient: float
    log_exponent: float = 0.0
    tol_exponent: float = 0.0


@dataclass(frozen=True)
class CorollaryCase:
    """One concrete configuration, with both jet-valued and symbol-valued
    envelopes so the regime checks can run numerically and symbolically."""

    case_id: str
    n: int
    params: dict
    C1: float
    C2: float
    cyl: WarpedCylinder
    G: FunctionJet3
    h_of: Callable[[float], FunctionJet3]
    k2_of: Callable[[float], FunctionJet3]
    F_expected: Callable[[float, np.ndarray], np.ndarray]
    q1_jet: FunctionJet3
    q2_jet: FunctionJet3
    q1_symbol: AsymptoticSymbol
    q2_symbol: AsymptoticSymbol
    k1_symbol_of: Callable[[float], AsymptoticSymbol]
    k2_symbol_of: Callable[[float], AsymptoticSymbol]
    h_symbol_of: Callable[[float], AsymptoticSymbol]
    hprime_symbol_of: Callable[[float], AsymptoticSymbol]
    sigma_symbol: AsymptoticSymbol
    u_log_of: Callable[[float], FunctionJet3]
    u_symbol_of: Callable[[float], AsymptoticSymbol]
    scan_window: tuple[float, float]
    leading_checks: tuple[LeadingCheck, ...]
    battery_bumps: tuple[tuple[float, float], ...]
    default_tau_ladder: tuple[float, ...]
    needs_extra_gradient: bool

    def weights_at(self, tau: float) -> CarlemanWeights:
        return build_weights(self.cyl, self.h_of(tau), self.G, tau,
                             k2_choice=self.k2_of(tau))

    def battery_lambdas(self, count: int = 3) -> tuple[float, ...]:
        pairs = self.cyl.spectrum.eigenvalues(count)
        return tuple(lam for lam, _ in pairs)[:count]


def _sym(c: float, p: float = 0.0, q: float = 0.0) -> AsymptoticSymbol:
    return make_symbol([GrowthTerm(c, p, q)])


def _power(c: float, p: float) -> FunctionJet3:
    if c == 0.0:
        return ZERO_JET
    if p == 0.0:
        return c * make_family("const")
    return c * make_family("power", (p,))


def _powlog(c: float, p: float, q: float) -> FunctionJet3:
    if c == 0.0:
        return ZERO_JET
    if q == 0.0:
        return _power(c, p)
    if p == 0.0 and q == 1.0:
        return c * make_family("log")  # valid on all of r > 0
    if p == 0.0:
        return c * make_family("logpow", (q,))
    return c * make_family("powlog", (p, q))


def _need_param(case_id: str, name: str, value, other_name: str, other) -> float:
    if other is not None:
        raise ParameterRangeError(
            f"case {case_id} is parametrized by {name}, not {other_name}")
    if value is None:
        raise ParameterRangeError(f"case {case_id} requires {name}")
    return float(value)


def _check_consts(C1: float, C2: float) -> tuple[float, float]:
    if not (C1 >= 0.0 and C2 >= 0.0):
        raise ParameterRangeError("envelope constants C1, C2 must be >= 0")
    return float(C1), float(C2)


def make_case(case_id: str, *, n: int = 3, beta: float | None = None,
              gamma: float | None = None, C1: float = 1.0,
              C2: float = 1.0) -> CorollaryCase:
    """Assemble one of the named configurations.

    Eu-a: sigma=r, h=2 tau r^beta, 0 < beta <= 2.
    Eu-b: sigma=r, h=tau (log r)^gamma, gamma > 1.
    Eu-c: Eu-a's weight with beta > 2 (annulus gradient decay assumed).
    Hyp-a: sigma=sinh r, h=2 tau r^beta, 1 <= beta <= 2.
    Hyp-b: Hyp-a's weight with beta > 2 (annulus gradient decay assumed).
    Ex-a: sigma=exp(r^beta), h=tau r^((4-beta)/3), 0 < beta < 1, q2 absent.
    Ex-b: sigma=exp(r^beta), h=tau r^beta, 0 < beta <= 2.
    """
    if case_id not in CASE_IDS:
        known = ", ".join(CASE_IDS)
        raise ParameterRangeError(f"unknown case {case_id!r}; known: {known}")
    C1, C2 = _check_consts(C1, C2)
    if case_id == "Eu-b":
        g = _need_param(case_id, "gamma", gamma, "beta", beta)
        return _make_eu_b(n, g, C1, C2)
    b = _need_param(case_id, "beta", beta, "gamma", gamma)
    if b <= 0.0:
        raise ParameterRangeError(f"beta must be positive, got {b}")
    if case_id in ("Eu-a", "Eu-c"):
        return _make_eu_power(case_id, n, b, C1, C2)
    if case_id in ("Hyp-a", "Hyp-b"):
        return _make_hyp(case_id, n, b, C1, C2)
    if case_id == "Ex-a":
        return _make_ex_a(n, b, C1, C2)
    return _make_ex_b(n, b, C1, C2)


# ---------------------------------------------------------------------------
# flat warp, power weight (Eu-a for 0 < beta <= 2, Eu-c for beta > 2)
# ---------------------------------------------------------------------------

def _make_eu_power(case_id: str, n: int, beta: float, C1: float,
                   C2: float) -> CorollaryCase:
    if case_id == "Eu-a" and beta > 2.0:
        raise ParameterRangeError(
            f"beta = {beta} outside (0, 2] for case Eu-a; case Eu-c covers "
            "beta > 2 under an extra annulus gradient decay assumption",
            redirect="Eu-c")
    if case_id == "Eu-c" and beta <= 2.0:
        raise ParameterRangeError(
            f"beta = {beta} is inside (0, 2], where case Eu-a applies "
            "without the extra gradient assumption", redirect="Eu-a")
    cyl = WarpedCylinder(n=n, sigma=make_family("power", (1.0,)))
    G = _powlog(3.0 - 2.0 * beta, 0.0, 1.0)
    d = 0.5 * (n - 4 + 2.0 * beta)

    def F_expected(tau, r):
        r = np.asarray(r, dtype=float)
        return tau * beta * np.power(r, beta - 1.0) + d / r

    checks = (
        LeadingCheck("k2L", "fit",
                     lambda tau: 2.0 * beta ** 2 * tau ** 2,
                     2.0 * beta - 2.0, (1e3, 1e5),
                     tol_coefficient=0.05,
                     tol_exponent=0.02 * max(1.0, abs(2.0 * beta - 2.0))),
        LeadingCheck("k1max", "ratio",
                     lambda tau: tau ** 3 * beta ** 4,
                     3.0 * beta - 4.0, (1e3, 1e5),
                     tol_coefficient=0.05),
    )
    return CorollaryCase(
        case_id=case_id, n=n, params={"beta": beta}, C1=C1, C2=C2,
        cyl=cyl, G=G,
        h_of=lambda tau: _power(2.0 * tau, beta),
        k2_of=lambda tau: _power(tau * beta ** 2, beta - 2.0),
        F_expected=F_expected,
        q1_jet=_power(C1, 1.5 * beta - 2.0),
        q2_jet=_power(C2, 0.5 * beta - 1.0),
        q1_symbol=_sym(C1, 1.5 * beta - 2.0),
        q2_symbol=_sym(C2, 0.5 * beta - 1.0),
        k1_symbol_of=lambda tau: _sym(tau ** 3 * beta ** 4, 3.0 * beta - 4.0),
        k2_symbol_of=lambda tau: _sym(tau * beta ** 2, beta - 2.0),
        h_symbol_of=lambda tau: _sym(2.0 * tau, beta),
        hprime_symbol_of=lambda tau: _sym(2.0 * tau * beta, beta - 1.0),
        sigma_symbol=_sym(1.0, 1.0),
        u_log_of=lambda tt: _power(-tt, beta),
        u_symbol_of=lambda tt: make_symbol(
            [GrowthTerm(1.0, 0.0, 0.0, (("r", -tt, beta),))]),
        scan_window=(1.0, 1e5),
        leading_checks=checks,
        battery_bumps=((2.0, 4.0), (8.0, 16.0), (32.0, 64.0)),
        default_tau_ladder=(25.0, 50.0, 100.0),
        needs_extra_gradient=(case_id == "Eu-c"),
    )


# ---------------------------------------------------------------------------
# flat warp, log-power weight (Eu-b, gamma > 1)
# ---------------------------------------------------------------------------

def _make_eu_b(n: int, gamma: float, C1: float, C2: float) -> CorollaryCase:
    if gamma <= 1.0:
        raise ParameterRangeError(
            f"gamma = {gamma} outside (1, inf) for case Eu-b")
    cyl = WarpedCylinder(n=n, sigma=make_family("power", (1.0,)))
    G = _powlog(3.0, 0.0, 1.0) + (-(2.0 * gamma - 2.0)) * make_family("loglog")

    def F_expected(tau, r):
        r = np.asarray(r, dtype=float)
        L = np.log(r)
        return (tau * gamma * np.power(L, gamma - 1.0) + (n - 4)
                + (2.0 * gamma - 2.0) / L) / (2.0 * r)

    checks = (
        LeadingCheck("k2R", "ratio",
                     lambda tau: 0.5 * tau * gamma * (gamma - 1.0),
                     -2.0, (1e3, 1e7),
                     tol_coefficient=0.05, log_exponent=gamma - 2.0),
        LeadingCheck("k1max", "ratio",
                     lambda tau: tau ** 3 * gamma ** 3 * (gamma - 1.0) / 8.0,
                     -4.0, (1e3, 1e7),
                     tol_coefficient=0.05, log_exponent=3.0 * gamma - 4.0),
    )
    return CorollaryCase(
        case_id="Eu-b", n=n, params={"gamma": gamma}, C1=C1, C2=C2,
        cyl=cyl, G=G,
        h_of=lambda tau: tau * make_family("logpow", (gamma,)),
        k2_of=lambda tau: _powlog(0.5 * tau * gamma * (gamma - 1.0), -2.0,
                                  gamma - 2.0),
        F_expected=F_expected,
        q1_jet=_powlog(C1, -2.0, 1.5 * gamma - 2.0),
        q2_jet=_powlog(C2, -1.0, 0.5 * gamma - 1.0),
        q1_symbol=_sym(C1, -2.0, 1.5 * gamma - 2.0),
        q2_symbol=_sym(C2, -1.0, 0.5 * gamma - 1.0),
        k1_symbol_of=lambda tau: _sym(tau ** 3 * gamma ** 3 * (gamma - 1.0) / 8.0,
                                      -4.0, 3.0 * gamma - 4.0),
        k2_symbol_of=lambda tau: _sym(0.5 * tau * gamma * (gamma - 1.0),
                                      -2.0, gamma - 2.0),
        h_symbol_of=lambda tau: _sym(tau, 0.0, gamma),
        hprime_symbol_of=lambda tau: _sym(tau * gamma, -1.0, gamma - 1.0),
        sigma_symbol=_sym(1.0, 1.0),
        u_log_of=lambda tt: (-tt) * make_family("logpow", (gamma,)),
        u_symbol_of=lambda tt: make_symbol(
            [GrowthTerm(1.0, 0.0, 0.0, (("log", -tt, gamma),))]),
        scan_window=(3.0, 1e5),
        leading_checks=checks,
        battery_bumps=((4.0, 8.0), (16.0, 32.0), (64.0, 128.0)),
        default_tau_ladder=(25.0, 50.0, 100.0),
        needs_extra_gradient=False,
    )


# ---------------------------------------------------------------------------
# hyperbolic warp (Hyp-a for 1 <= beta <= 2, Hyp-b for beta > 2)
# ---------------------------------------------------------------------------

def _make_hyp(case_id: str, n: int, beta: float, C1: float,
              C2: float) -> CorollaryCase:
    if case_id == "Hyp-a" and not 1.0 <= beta <= 2.0:
        if beta > 2.0:
            raise ParameterRangeError(
                f"beta = {beta} outside [1, 2] for case Hyp-a; case Hyp-b "
                "covers beta > 2 under an extra annulus gradient decay "
                "assumption", redirect="Hyp-b")
        raise ParameterRangeError(
            f"beta = {beta} outside [1, 2] for case Hyp-a")
    if case_id == "Hyp-b" and beta <= 2.0:
        if beta >= 1.0:
            raise ParameterRangeError(
                f"beta = {beta} is inside [1, 2], where case Hyp-a applies "
                "without the extra gradient assumption", redirect="Hyp-a")
        raise ParameterRangeError(
            f"beta = {beta} outside (2, inf) for case Hyp-b")
    cyl = WarpedCylinder(n=n, sigma=make_family("sinh", (1.0,)))
    G = _power(1.0, 1.0)

    def F_expected(tau, r):
        r = np.asarray(r, dtype=float)
        return (tau * beta * np.power(r, beta - 1.0)
                + 0.5 * (n - 1) / np.tanh(r) - 0.5)

    def k1_coeff_of(tau: float) -> float:
        # at beta = 1 the bundle is flat in r and the tau^2 term survives
        # undiluted: k1max = tau^3 - 3 tau^2 + O(e^{-2r}); for beta > 1
        # the second-order terms decay relative to the leading power
        if beta == 1.0:
            return tau ** 3 - 3.0 * tau ** 2
        return tau ** 3 * beta ** 3

    checks = (
        LeadingCheck("k2L", "fit",
                     lambda tau: 2.0 * tau ** 2 * beta ** 2,
                     2.0 * beta - 2.0, (1e3, 1e5),
                     tol_coefficient=0.05,
                     tol_exponent=0.02 * max(1.0, abs(2.0 * beta - 2.0))),
        LeadingCheck("k1max", "ratio", k1_coeff_of,
                     3.0 * beta - 3.0, (1e3, 1e5),
                     tol_coefficient=0.05),
    )
    return CorollaryCase(
        case_id=case_id, n=n, params={"beta": beta}, C1=C1, C2=C2,
        cyl=cyl, G=G,
        h_of=lambda tau: _power(2.0 * tau, beta),
        k2_of=lambda tau: _power(tau * beta, beta - 1.0),
        F_expected=F_expected,
        q1_jet=_power(C1, 1.5 * (beta - 1.0)),
        q2_jet=_power(C2, 0.5 * (beta - 1.0)),
        q1_symbol=_sym(C1, 1.5 * (beta - 1.0)),
        q2_symbol=_sym(C2, 0.5 * (beta - 1.0)),
        k1_symbol_of=lambda tau: _sym(tau ** 3 * beta ** 3, 3.0 * beta - 3.0),
        k2_symbol_of=lambda tau: _sym(tau * beta, beta - 1.0),
        h_symbol_of=lambda tau: _sym(2.0 * tau, beta),
        hprime_symbol_of=lambda tau: _sym(2.0 * tau * beta, beta - 1.0),
        sigma_symbol=make_symbol(
            [GrowthTerm(0.5, 0.0, 0.0, (("r", 1.0, 1.0),))]),
        u_log_of=lambda tt: _power(-tt, beta),
        u_symbol_of=lambda tt: make_symbol(
            [GrowthTerm(1.0, 0.0, 0.0, (("r", -tt, beta),))]),
        scan_window=(1.0, 1e5),
        leading_checks=checks,
        battery_bumps=((2.0, 4.0), (8.0, 16.0), (32.0, 64.0)),
        default_tau_ladder=(25.0, 50.0, 100.0),
        needs_extra_gradient=(case_id == "Hyp-b"),
    )


# ---------------------------------------------------------------------------
# exponential warp, mismatched weight (Ex-a, 0 < beta < 1, q2 absent)
# ---------------------------------------------------------------------------

def _make_ex_a(n: int, beta: float, C1: float, C2: float) -> CorollaryCase:
    if beta >= 1.0:
        if beta <= 2.0:
            raise ParameterRangeError(
                f"beta = {beta} outside (0, 1) for case Ex-a; case Ex-b "
                "covers beta in (0, 2] with the matched weight",
                redirect="Ex-b")
        raise ParameterRangeError(
            f"beta = {beta} outside (0, 1) for case Ex-a")
    cyl = WarpedCylinder(n=n, sigma=make_family("exp_rbeta", (beta, 1.0)))
    G = _power(1.0, beta)
    m = (4.0 - beta) / 3.0
    a_c = (4.0 - beta) / 6.0
    b_c = 0.5 * (n - 2) * beta

    def F_expected(tau, r):
        r = np.asarray(r, dtype=float)
        return (tau * a_c * np.power(r, (1.0 - beta) / 3.0)
                + b_c * np.power(r, beta - 1.0))

    k1_coeff = beta * (4.0 - beta) ** 3 / 108.0
    # k1max approaches its constant at rate (1 - beta)/beta * r^{-beta},
    # so the ratio window sits far out; betas near 0 converge too slowly
    # for any float-friendly window and fail this check honestly.
    checks = (
        LeadingCheck("k2L", "fit",
                     lambda tau: tau ** 2 * (4.0 - beta) ** 2 / 18.0,
                     (2.0 - 2.0 * beta) / 3.0, (1e3, 1e5),
                     tol_coefficient=0.05,
                     tol_exponent=0.02 * max(1.0, (2.0 - 2.0 * beta) / 3.0)),
        LeadingCheck("k1max", "ratio",
                     lambda tau: tau ** 3 * k1_coeff,
                     0.0, (1e6, 1e10), tol_coefficient=0.05),
    )
    return CorollaryCase(
        case_id="Ex-a", n=n, params={"beta": beta}, C1=C1, C2=C2,
        cyl=cyl, G=G,
        h_of=lambda tau: _power(tau, m),
        k2_of=lambda tau: ZERO_JET,
        F_expected=F_expected,
        q1_jet=_power(C1, 0.0),
        q2_jet=ZERO_JET,
        q1_symbol=_sym(C1),
        q2_symbol=ZERO_SYMBOL,
        k1_symbol_of=lambda tau: _sym(tau ** 3 * k1_coeff),
        k2_symbol_of=lambda tau: ZERO_SYMBOL,
        h_symbol_of=lambda tau: _sym(tau, m),
        hprime_symbol_of=lambda tau: _sym(tau * m, m - 1.0),
        sigma_symbol=make_symbol(
            [GrowthTerm(1.0, 0.0, 0.0, (("r", 1.0, beta),))]),
        u_log_of=lambda tt: _power(-tt, m),
        u_symbol_of=lambda tt: make_symbol(
            [GrowthTerm(1.0, 0.0, 0.0, (("r", -tt, m),))]),
        scan_window=(1.0, 1e5),
        leading_checks=checks,
        battery_bumps=((2.0, 4.0), (8.0, 16.0), (32.0, 64.0)),
        default_tau_ladder=(25.0, 50.0, 100.0),
        needs_extra_gradient=False,
    )


# ---------------------------------------------------------------------------
# exponential warp, matched weight (Ex-b, 0 < beta <= 2)
# ---------------------------------------------------------------------------

def _make_ex_b(n: int, beta: float, C1: float, C2: float) -> CorollaryCase:
    if beta > 2.0:
        raise ParameterRangeError(
            f"beta = {beta} outside (0, 2] for case Ex-b")
    cyl = WarpedCylinder(n=n, sigma=make_family("exp_rbeta", (beta, 1.0)))
    G = _power(1.0, beta)
    shift = float(n - 2)  # tau enters the bundle only through tau + n - 2

    def F_expected(tau, r):
        r = np.asarray(r, dtype=float)
        return 0.5 * (tau + shift) * beta * np.power(r, beta - 1.0)

    def k1_coeff_of(tau: float) -> float:
        # exact through second order: the warp term in A contributes
        # -(2n-1) beta^2 F^2 k2-style mass at the same r-power
        T = tau + shift
        return (T ** 3 - 2.0 * (2 * n - 1) * T ** 2) * beta ** 4 / 8.0

    checks = (
        LeadingCheck("k2R", "ratio",
                     lambda tau: 0.5 * (tau + shift) * beta ** 2,
                     2.0 * beta - 2.0, (1e3, 1e5),
                     tol_coefficient=0.02),
        LeadingCheck("k1max", "ratio", k1_coeff_of,
                     4.0 * beta - 4.0, (1e3, 1e5),
                     tol_coefficient=0.05),
    )
    return CorollaryCase(
        case_id="Ex-b", n=n, params={"beta": beta}, C1=C1, C2=C2,
        cyl=cyl, G=G,
        h_of=lambda tau: _power(tau, beta),
        k2_of=lambda tau: _power(0.5 * (tau + shift) * beta ** 2,
                                 2.0 * beta - 2.0),
        F_expected=F_expected,
        q1_jet=_power(C1, 2.0 * beta - 2.0),
        q2_jet=_power(C2, beta - 1.0),
        q1_symbol=_sym(C1, 2.0 * beta - 2.0),
        q2_symbol=_sym(C2, beta - 1.0),
        k1_symbol_of=lambda tau: _sym((tau + shift) ** 3 * beta ** 4 / 8.0,
                                      4.0 * beta - 4.0),
        k2_symbol_of=lambda tau: _sym(0.5 * (tau + shift) * beta ** 2,
                                      2.0 * beta - 2.0),
        h_symbol_of=lambda tau: _sym(tau, beta),
        hprime_symbol_of=lambda tau: _sym(tau * beta, beta - 1.0),
        sigma_symbol=make_symbol(
            [GrowthTerm(1.0, 0.0, 0.0, (("r", 1.0, beta),))]),
        u_log_of=lambda tt: _power(-tt, beta),
        u_symbol_of=lambda tt: make_symbol(
            [GrowthTerm(1.0, 0.0, 0.0, (("r", -tt, beta),))]),
        scan_window=(1.0, 1e5),
        leading_checks=checks,
        battery_bumps=((2.0, 4.0), (8.0, 16.0), (32.0, 64.0)),
        default_tau_ladder=(25.0, 50.0, 100.0),
        needs_extra_gradient=False,
    )
