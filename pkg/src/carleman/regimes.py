"""Machine-checkable certification of the hypothesis regimes.

Each condition gets two verdicts: a symbolic one from growth-order algebra
on the declared envelopes, and a numeric one from grid and tau-ladder
evaluation.  The two may not silently disagree: a symbolic "holds" next to
a numeric failure must carry a discrepancy note, and the constructor
enforces that.

Condition ids:
  k1-grows-unbounded         zero-order absorption mass diverges along the
                             tau ladder (checked pointwise in r)
  q1-absorbed-by-k1          sup q1^2 / k1 shrinks along the ladder
  q2-absorbed-by-k2          sup q2^2 / k2 shrinks along the ladder
  weighted-decay-integrable  the declared solution envelope pays for the
                             weight: u^2 (1 + k2) e^h sigma^{n-1} has a
                             convergent tail (companion ladder tau~ = 2 tau)
  annulus-gradient-small     gradient energy of the envelope on [r, 2r],
                             weighted by e^h, is o(r^2)
  coefficient-growth-within-budget
                             sup over [r, 8r] of r|h'| + q1 + r q2 is O(r^2)

A certificate chains the stages closed-form-weight, admissibility-scan,
leading-order, hypothesis-conditions and mode-battery for one catalogue
case.  Admissibility is certified on a suffix: the scan records where the
admissible region starts and the battery windows are shifted above it.
All tail integrals run in log scale, so envelopes that underflow double
precision are still compared correctly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .cases import CorollaryCase, LeadingCheck, make_case
from .growth import (AsymptoticSymbol, Term as GrowthTerm, compare_growth,
                     exp_of, growth_mul, growth_pow, is_integrable_at_infinity,
                     make_symbol, parse_growth, render_growth)
from .verifier import PROFILE_KINDS, RadialTestFunction, run_battery
from .weights import admissibility_scan, leading_order

__all__ = [
    "AsymptoticSymbol",
    "Certificate",
    "RegimeVerdict",
    "Stage",
    "battery_stage",
    "check_conditions",
    "compare_growth",
    "corollary_certificate",
    "decay_integrable",
    "parse_growth",
    "render_growth",
]

_CONVERGED_LOG = math.log(1e6)  # last tail segment must sit this far under the sum
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)


@dataclass(frozen=True)
class RegimeVerdict:
    """Paired symbolic/numeric verdict for one condition."""

    condition: str
    symbolic: str
    numeric: str
    notes: str = ""

    def __post_init__(self):
        if self.symbolic not in ("holds", "fails", "indeterminate"):
            raise ValueError(f"unknown symbolic verdict {self.symbolic!r}")
        if not (self.numeric == "holds-on-grid"
                or self.numeric.startswith("fails-at")):
            raise ValueError(f"unknown numeric verdict {self.numeric!r}")
        if (self.symbolic == "holds" and self.numeric.startswith("fails-at")
                and "discrepancy" not in self.notes):
            raise ValueError(
                "symbolic 'holds' with a numeric failure needs a "
                "discrepancy note")

    def ok(self) -> bool:
        return self.symbolic != "fails" and self.numeric == "holds-on-grid"

    def as_dict(self) -> dict:
        return {"condition": self.condition, "symbolic": self.symbolic,
                "numeric": self.numeric, "notes": self.notes}


def _fails_at_r(r: float) -> str:
    return f"fails-at: r = {float(r)!r}"


def _fails_at_tau(tau: float) -> str:
    return f"fails-at: tau = {float(tau)!r}"


def _verdict(condition: str, symbolic: str, numeric: str,
             notes: str) -> RegimeVerdict:
    if (symbolic == "holds" and numeric.startswith("fails-at")
            and "discrepancy" not in notes):
        notes = (notes + "; " if notes else "") + \
            "discrepancy: symbolic analysis and grid evaluation disagree"
    return RegimeVerdict(condition, symbolic, numeric, notes)


# ---------------------------------------------------------------------------
# log-scale quadrature helpers
# ---------------------------------------------------------------------------

def _log_integral(logf: Callable[[np.ndarray], np.ndarray], a: float,
                  b: float) -> float:
    """log of integral_a^b exp(logf(r)) dr by 64-point Gauss-Legendre."""
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    x = mid + half * _GL_NODES
    lf = np.asarray(logf(x), dtype=float)
    m = float(np.max(lf))
    if m == -math.inf:
        return -math.inf
    if not np.isfinite(m):
        raise ValueError(f"non-finite log-integrand on [{a!r}, {b!r}]")
    return m + math.log(half * float(np.sum(_GL_WEIGHTS * np.exp(lf - m))))


def _logsumexp(vals: Sequence[float]) -> float:
    m = max(vals)
    if m == -math.inf:
        return -math.inf
    return m + math.log(sum(math.exp(v - m) for v in vals))


# ---------------------------------------------------------------------------
# symbolic building blocks
# ---------------------------------------------------------------------------

def decay_integrable(u_symbol: AsymptoticSymbol, h_symbol: AsymptoticSymbol,
                     k2_symbol: AsymptoticSymbol,
                     sigma_symbol: AsymptoticSymbol, n: int) -> bool:
    """Whether u^2 (1 + k2) e^h sigma^{n-1} is integrable at infinity,
    judged on leading growth orders."""
    weight = exp_of(h_symbol)
    one_plus_k2 = make_symbol((GrowthTerm(1.0),) + k2_symbol.terms)
    product = growth_mul(growth_pow(u_symbol, 2.0),
                         growth_mul(one_plus_k2,
                                    growth_pow(sigma_symbol, float(n - 1))))
    return is_integrable_at_infinity(growth_mul(product, weight))


_R_SQUARED = make_symbol([GrowthTerm(1.0, 2.0)])
_R_LINEAR = make_symbol([GrowthTerm(1.0, 1.0)])


def _within_budget(sym: AsymptoticSymbol) -> bool:
    return compare_growth(sym, _R_SQUARED) != "omega"


# ---------------------------------------------------------------------------
# condition checks
# ---------------------------------------------------------------------------

def _admissible_base(case: CorollaryCase, tau_ladder: Sequence[float],
                     r_max: float) -> float:
    """Start of the suffix on which the bundle is admissible for every
    ladder tau."""
    base = case.scan_window[0]
    for tau in tau_ladder:
        rep = admissibility_scan(case.weights_at(tau), case.scan_window[0],
                                 r_max)
        if rep.first_admissible_r is None:
            raise ValueError(
                f"no admissible suffix up to r = {r_max!r} at tau = {tau!r}")
        base = max(base, rep.first_admissible_r)
    return base


def _check_k1_unbounded(case, tau_ladder, base, r_max) -> RegimeVerdict:
    notes = ("divergence checked pointwise in r at 5 sampled radii; "
             "the theorem needs it for the zero-order or the gradient mass")
    if case.k2_symbol_of(tau_ladder[0]).leading() is None:
        notes += "; k2 is identically 0 here, k1 carries the divergence"
    try:
        coeffs = [case.k1_symbol_of(t).leading().coeff for t in tau_ladder]
        growing = all(b > a for a, b in zip(coeffs, coeffs[1:]))
        symbolic = "holds" if growing and coeffs[-1] >= 2.0 * coeffs[0] \
            else "fails"
    except (AttributeError, ValueError):
        symbolic = "indeterminate"
    radii = np.geomspace(2.0 * base, min(1e4, r_max), 5)
    numeric = "holds-on-grid"
    tables = {t: case.weights_at(t).table(radii)["k1max"] for t in tau_ladder}
    for i, r in enumerate(radii):
        vals = [tables[t][i] for t in tau_ladder]
        if not (all(b > a for a, b in zip(vals, vals[1:]))
                and vals[-1] >= 8.0 * max(vals[0], 1e-300)):
            numeric = _fails_at_r(r)
            break
    return _verdict("k1-grows-unbounded", symbolic, numeric, notes)


def _check_absorption(condition, q_symbol, q_jet, k_symbol_of, k_values_of,
                      tau_ladder, grid, shrink_factor) -> RegimeVerdict:
    if q_symbol.leading() is None:
        return _verdict(condition, "holds", "holds-on-grid",
                        "vacuous: the potential is identically 0")
    q_sq = growth_pow(q_symbol, 2.0)
    k_lo = k_symbol_of(tau_ladder[0])
    if k_lo.leading() is None:
        return _verdict(condition, "fails", _fails_at_tau(tau_ladder[0]),
                        "no absorption mass against a nonzero potential")
    cmp_lo = compare_growth(q_sq, k_lo)
    coeffs = [k_symbol_of(t).leading().coeff for t in tau_ladder]
    growing = all(b > a for a, b in zip(coeffs, coeffs[1:]))
    symbolic = "holds" if cmp_lo != "omega" and growing else "fails"
    q_vals = q_jet.jet(grid, order=0)[0] ** 2
    sups = []
    numeric = "holds-on-grid"
    for t in tau_ladder:
        k_vals = k_values_of(t)
        if np.any(k_vals <= 0.0):
            numeric = _fails_at_tau(t)
            break
        sups.append(float(np.max(q_vals / k_vals)))
        if len(sups) > 1 and sups[-1] >= sups[-2]:
            numeric = _fails_at_tau(t)
            break
    if numeric == "holds-on-grid" and sups[-1] > sups[0] / shrink_factor:
        numeric = _fails_at_tau(tau_ladder[-1])
    notes = (f"sup over a 65-point geometric grid on [{grid[0]:.6g}, "
             f"{grid[-1]:.6g}]; the r-growth comparison covers the tail")
    return _verdict(condition, symbolic, numeric, notes)


def _check_decay(case, tau_ladder, base) -> RegimeVerdict:
    n = case.cyl.n
    try:
        symbolic = "holds"
        for t in tau_ladder:
            if not decay_integrable(case.u_symbol_of(2.0 * t),
                                    case.h_symbol_of(t),
                                    case.k2_symbol_of(t),
                                    case.sigma_symbol, n):
                symbolic = "fails"
                break
    except ValueError:
        symbolic = "indeterminate"
    numeric = "holds-on-grid"
    for t in tau_ladder:
        h = case.h_of(t)
        g = case.u_log_of(2.0 * t)
        k2 = case.k2_of(t)

        def logf(r):
            k2_vals = k2.jet(r, order=0)[0] if k2.terms else 0.0
            return (2.0 * g.jet(r, order=0)[0] + h.jet(r, order=0)[0]
                    + (n - 1) * case.cyl.log_sigma_jet(r)[0]
                    + np.log1p(k2_vals))

        segs = []
        R = base
        for _ in range(12):
            segs.append(_log_integral(logf, R, 2.0 * R))
            R *= 2.0
        rising = [k for k in range(1, len(segs)) if segs[k] >= segs[k - 1]]
        if segs[-1] > _logsumexp(segs) - _CONVERGED_LOG:
            at = base * 2.0 ** (rising[0] if rising else len(segs) - 1)
            numeric = _fails_at_r(at)
            break
    notes = ("companion ladder tau~ = 2 tau; tail split into 12 doubling "
             "segments, Cauchy criterion on the last")
    return _verdict("weighted-decay-integrable", symbolic, numeric, notes)


def _check_annulus(case, tau_ladder, base) -> RegimeVerdict:
    n = case.cyl.n
    tau = tau_ladder[-1]
    tt = 2.0 * tau
    g = case.u_log_of(tt)
    h = case.h_of(tau)
    try:
        g_lead = case.u_symbol_of(tt).leading()
        # |grad u|^2 e^h sigma^{n-1} with |grad u| = |g'| u; annulus mass
        # is at most r times the integrand's leading growth
        gp = _d_log_envelope_symbol(case, tt)
        integrand = growth_mul(growth_pow(make_symbol([g_lead]), 2.0),
                               growth_mul(growth_pow(gp, 2.0),
                                          growth_mul(exp_of(case.h_symbol_of(tau)),
                                                     growth_pow(case.sigma_symbol,
                                                                float(n - 1)))))
        symbolic = "holds" if compare_growth(
            growth_mul(integrand, _R_LINEAR), _R_SQUARED) == "o" else "fails"
    except ValueError:
        symbolic = "indeterminate"

    def logf(r):
        g0, g1 = g.jet(r, order=1)
        return (np.log(g1 * g1) + 2.0 * g0 + h.jet(r, order=0)[0]
                + (n - 1) * case.cyl.log_sigma_jet(r)[0])

    log_ratios = []
    numeric = "holds-on-grid"
    r = base
    for _ in range(11):
        log_ratios.append(_log_integral(logf, r, 2.0 * r)
                          - 2.0 * math.log(r))
        r *= 2.0
    if log_ratios[-1] != -math.inf and \
            log_ratios[-1] >= log_ratios[0] - math.log(2.0):
        numeric = _fails_at_r(r / 2.0)
    notes = ("little-o certified by the fitted ratio over doubling r "
             "dropping below half its initial value")
    if case.needs_extra_gradient:
        notes += ("; this case carries the condition as a standing "
                  "assumption, certified against the declared envelope")
    return _verdict("annulus-gradient-small", symbolic, numeric, notes)


def _d_log_envelope_symbol(case: CorollaryCase, tt: float) -> AsymptoticSymbol:
    """|d/dr log envelope| as a growth symbol, from the envelope's own
    exponent atom."""
    lead = case.u_symbol_of(tt).leading()
    if lead is None or not lead.exp_atoms:
        raise ValueError("envelope carries no exponential decay")
    kind, c, p = lead.exp_atoms[0]
    if kind == "r":
        return make_symbol([GrowthTerm(abs(c) * p, p - 1.0)])
    return make_symbol([GrowthTerm(abs(c) * p, -1.0, p - 1.0)])


def _check_budget(case, tau_ladder, base) -> RegimeVerdict:
    tau = tau_ladder[-1]
    r_h = growth_mul(_R_LINEAR, case.hprime_symbol_of(tau))
    r_q2 = growth_mul(_R_LINEAR, case.q2_symbol)
    symbolic = "holds" if all(_within_budget(s) for s in
                              (r_h, case.q1_symbol, r_q2)) else "fails"
    h = case.h_of(tau)
    ratios = []
    numeric = "holds-on-grid"
    r = base
    for _ in range(11):
        s = np.geomspace(r, 8.0 * r, 33)
        sup = (r * float(np.max(np.abs(h.deriv(s))))
               + float(np.max(case.q1_jet.jet(s, order=0)[0]))
               + r * float(np.max(case.q2_jet.jet(s, order=0)[0])
                           if case.q2_jet.terms else 0.0))
        ratios.append(sup / r ** 2)
        if len(ratios) > 1 and ratios[-1] > 1.2 * ratios[-2]:
            numeric = _fails_at_r(r)
            break
        r *= 2.0
    notes = (f"sup of r|h'| + q1 + r q2 over [r, 8r] against r^2, "
             f"doubling r from {base:.6g}; evaluated at tau = {tau!r}")
    return _verdict("coefficient-growth-within-budget", symbolic, numeric,
                    notes)


def check_conditions(case: CorollaryCase,
                     tau_ladder: Sequence[float] | None = None,
                     r_max: float = 1e5) -> list[RegimeVerdict]:
    """Symbolic and numeric verdicts for all hypothesis conditions."""
    for name in ("u_log_of", "u_symbol_of"):
        if getattr(case, name, None) is None:
            raise ValueError(f"case {case.case_id} is missing the solution "
                             "envelope family")
    ladder = tuple(float(t) for t in
                   (tau_ladder or case.default_tau_ladder))
    if len(ladder) < 2 or any(b <= a for a, b in zip(ladder, ladder[1:])):
        raise ValueError("tau ladder must be strictly increasing with at "
                         "least two rungs")
    base = _admissible_base(case, ladder, r_max)
    # sup grids start a hair above the measured suffix start so a margin
    # that is exactly zero at the boundary cannot poison the ratios
    grid = np.geomspace(1.05 * base, r_max, 65)
    ladder_growth = ladder[-1] / ladder[0]
    out = [
        _check_k1_unbounded(case, ladder, base, r_max),
        _check_absorption("q1-absorbed-by-k1", case.q1_symbol, case.q1_jet,
                          case.k1_symbol_of,
                          lambda t: case.weights_at(t).table(grid)["k1max"],
                          ladder, grid, shrink_factor=ladder_growth ** 2),
        _check_absorption("q2-absorbed-by-k2", case.q2_symbol, case.q2_jet,
                          case.k2_symbol_of,
                          lambda t: case.k2_of(t).jet(grid, order=0)[0]
                          if case.k2_of(t).terms else np.zeros_like(grid),
                          ladder, grid, shrink_factor=ladder_growth / 2.0),
        _check_decay(case, ladder, base),
        _check_annulus(case, ladder, base),
        _check_budget(case, ladder, base),
    ]
    return out


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Stage:
    name: str
    verdict: bool
    details: dict

    def as_dict(self) -> dict:
        return {"name": self.name,
                "verdict": "pass" if self.verdict else "fail",
                "details": self.details}


@dataclass(frozen=True)
class Certificate:
    case_id: str
    params: dict
    verdict: bool
    stages: tuple[Stage, ...]

    def failing_stage(self) -> str | None:
        for st in self.stages:
            if not st.verdict:
                return st.name
        return None

    def as_dict(self) -> dict:
        return {"case_id": self.case_id, "params": dict(self.params),
                "verdict": "pass" if self.verdict else "fail",
                "stages": [st.as_dict() for st in self.stages]}


def _stage_closed_form(case, ladder) -> Stage:
    grid = np.geomspace(*case.scan_window, 33)
    worst = 0.0
    for tau in ladder:
        F = case.weights_at(tau).table(grid)["F"]
        Fe = case.F_expected(tau, grid)
        worst = max(worst, float(np.max(np.abs(F - Fe) / np.abs(Fe))))
    return Stage("closed-form-weight", worst <= 1e-12,
                 {"max_rel_err": worst, "tol": 1e-12})


def _stage_admissibility(case, ladder, r_max) -> tuple[Stage, float]:
    firsts: dict[str, float | None] = {}
    ok = True
    base = case.scan_window[0]
    for tau in ladder:
        rep = admissibility_scan(case.weights_at(tau), case.scan_window[0],
                                 r_max)
        firsts[repr(tau)] = rep.first_admissible_r
        if rep.first_admissible_r is None or \
                rep.first_admissible_r > r_max / 10.0:
            ok = False
        else:
            base = max(base, rep.first_admissible_r)
    details = {"first_admissible_r": firsts, "scan_top": r_max,
               "note": "admissibility certified on a suffix; battery "
                       "windows sit above its start"}
    return Stage("admissibility-scan", ok, details), base


def _run_leading_check(w, chk: LeadingCheck, tau: float) -> dict:
    if chk.mode == "fit":
        fit = leading_order(w, chk.quantity, chk.window)
        coeff_err = abs(fit.coefficient / chk.coefficient_of(tau) - 1.0)
        exp_err = abs(fit.exponent - chk.exponent)
        return {"quantity": chk.quantity, "mode": "fit",
                "coeff_err": coeff_err, "exp_err": exp_err,
                "ok": bool(coeff_err <= chk.tol_coefficient
                           and exp_err <= chk.tol_exponent)}
    grid = np.geomspace(*chk.window, 17)
    vals = w.table(grid)[chk.quantity]
    model = (chk.coefficient_of(tau) * grid ** chk.exponent
             * np.log(grid) ** chk.log_exponent)
    err = abs(float(vals[-1] / model[-1]) - 1.0)
    return {"quantity": chk.quantity, "mode": "ratio", "ratio_err": err,
            "ok": bool(err <= chk.tol_coefficient)}


def _stage_leading(case, ladder) -> Stage:
    tau = ladder[-1]
    w = case.weights_at(tau)
    rows = [_run_leading_check(w, chk, tau) for chk in case.leading_checks]
    return Stage("leading-order", all(row["ok"] for row in rows),
                 {"tau": tau, "checks": rows})


def _stage_conditions(case, ladder, r_max) -> Stage:
    verdicts = check_conditions(case, ladder, r_max)
    by_id = {v.condition: v for v in verdicts}
    core = ("k1-grows-unbounded", "q1-absorbed-by-k1", "q2-absorbed-by-k2",
            "weighted-decay-integrable")
    core_ok = all(by_id[c].ok() for c in core)
    budget_ok = by_id["coefficient-growth-within-budget"].ok()
    annulus_ok = by_id["annulus-gradient-small"].ok()
    details = {"conditions": [v.as_dict() for v in verdicts],
               "extra_gradient_assumed": bool(not budget_ok and annulus_ok)}
    if not budget_ok and annulus_ok:
        details["note"] = ("coefficient growth exceeds the r^2 budget; the "
                           "annulus gradient decay enters as an extra "
                           "standing assumption, certified against the "
                           "declared envelope")
    return Stage("hypothesis-conditions",
                 core_ok and (budget_ok or annulus_ok), details)


_LOG_RANGE_BUDGET = 300.0  # max weight log-range per window; keeps every
                           # integrand value representable after the shift


def _clip_window(case, tau, a, b):
    """Shrink [a, b] from the right until the weight's log dynamic range
    fits the budget.  Windows left whole see no change; hot weights get a
    thin window whose integrals stay nonzero in shifted scale."""
    h = case.h_of(tau)
    n1 = case.cyl.n - 1

    def g(r):
        return float(h.jet(r, order=0)[0]) + \
            n1 * float(case.cyl.log_sigma_jet(r)[0])

    g_a = g(a)
    if g(b) - g_a <= _LOG_RANGE_BUDGET:
        return a, b
    lo, hi = a, b
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if g(mid) - g_a <= _LOG_RANGE_BUDGET:
            lo = mid
        else:
            hi = mid
    return a, lo


def _stage_battery(case, ladder, base, quad_tol, jobs, timing) -> Stage:
    windows = case.battery_bumps
    scale = max(1.0, 2.0 * base / windows[0][0])
    tau_hot = max(ladder)
    windows = tuple(_clip_window(case, tau_hot, a * scale, b * scale)
                    for a, b in windows)
    bumps = tuple(RadialTestFunction(PROFILE_KINDS[i % len(PROFILE_KINDS)],
                                     win)
                  for i, win in enumerate(windows))
    lambdas = case.battery_lambdas()
    # pointwise noise of exp(E - shift) grows with |E|; don't ask the
    # quadrature for more digits than the shift magnitude leaves standing
    h_hot = case.h_of(tau_hot)
    g_abs = max(abs(float(h_hot.jet(b, order=0)[0])
                    + (case.cyl.n - 1) * float(case.cyl.log_sigma_jet(b)[0]))
                for _, b in windows)
    tol = max(quad_tol, 16.0 * 2.2e-16 * g_abs)
    summary, reports, failures = run_battery(
        case.cyl, case.weights_at, ladder, lambdas, bumps,
        tol=tol, jobs=jobs, timing=timing)
    n_degenerate = sum(1 for _, rep in reports if rep.degenerate)
    details = dict(summary.as_dict())
    details["bumps"] = [list(win) for win in windows]
    details["lambdas"] = list(lambdas)
    details["quad_tol"] = tol
    details["n_degenerate"] = n_degenerate
    if failures:
        key, reason = failures[0]
        details["first_failure"] = {"cell": repr(key), "reason": str(reason)}
    return Stage("mode-battery",
                 summary.n_failures == 0 and n_degenerate == 0, details)


def battery_stage(case: CorollaryCase,
                  tau_ladder: Sequence[float] | None = None,
                  *, r_max: float = 1e5, quad_tol: float = 1e-9,
                  jobs: int = 1, timing: bool = False) -> Stage:
    """The mode-battery stage alone, with the same admissible-suffix
    window placement a full certificate uses."""
    ladder = tuple(float(t) for t in (tau_ladder or case.default_tau_ladder))
    base = _admissible_base(case, ladder, r_max)
    return _stage_battery(case, ladder, base, quad_tol, jobs, timing)


def corollary_certificate(case_id: str, params: dict, n: int = 3,
                          C1: float = 1.0, C2: float = 1.0,
                          tau_ladder: Sequence[float] | None = None,
                          *, r_max: float = 1e5, quad_tol: float = 1e-9,
                          jobs: int = 1, timing: bool = False) -> Certificate:
    """One-shot pass/fail certificate for a catalogue case.

    Out-of-range parameters raise ParameterRangeError (naming the sibling
    case when one covers the value); every other defect lands in a failing
    stage instead of an exception.
    """
    case = make_case(case_id, n=n, C1=C1, C2=C2, **params)
    ladder = tuple(float(t) for t in (tau_ladder or case.default_tau_ladder))
    stages = [_stage_closed_form(case, ladder)]
    adm, base = _stage_admissibility(case, ladder, r_max)
    stages.append(adm)
    stages.append(_stage_leading(case, ladder))
    if adm.verdict:
        stages.append(_stage_conditions(case, ladder, r_max))
        stages.append(_stage_battery(case, ladder, base, quad_tol, jobs,
                                     timing))
    else:
        detail = {"skipped": "no usable admissible suffix"}
        stages.append(Stage("hypothesis-conditions", False, detail))
        stages.append(Stage("mode-battery", False, dict(detail)))
    verdict = all(st.verdict for st in stages)
    return Certificate(case_id=case.case_id, params=dict(case.params),
                       verdict=verdict, stages=tuple(stages))
