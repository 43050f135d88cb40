"""Overflow-safe weighted quadrature and the per-mode Carleman checks.

Integrals of the shape integral f(r) e^{h(r)} sigma(r)^{n-1} dr carry
exponents like e^{6000}, so every integral is computed in a shifted scale:
the engine finds shift = max(h + (n-1) log sigma) on a coarse grid and
integrates f e^{E - shift}.  Reported values stay in that scale, paired
with the shift.

Quadrature is an adaptive Gauss-Kronrod (7, 15) pair: panels live in a
max-heap keyed by the embedded error estimate |K15 - G7| and the worst
panel is bisected until every component of the (vector-valued) integrand
meets the relative tolerance or the panel budget runs out.
"""

from __future__ import annotations

import heapq
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .funcjet import FAMILIES, FunctionJet3
from .geometry import WarpedCylinder
from .growth import AsymptoticSymbol, Term, growth_mul, growth_pow, \
    is_integrable_at_infinity, make_symbol, render_growth
from .weights import CarlemanWeights

__all__ = [
    "AdmissibilityError",
    "BatterySummary",
    "ExtendedReport",
    "InequalityReport",
    "PROFILE_KINDS",
    "PreconditionError",
    "QuadratureError",
    "RadialTestFunction",
    "TailFunction",
    "WeightedIntegral",
    "mode_carleman_report",
    "run_battery",
    "verify_extended",
    "weighted_integral",
    "weighted_integral_multi",
]

PROFILE_KINDS = ("quintic-bump", "exp-bump", "shifted-sine-squared")

_TINY = 1e-300

# 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1],
# positive-half nodes (last entry is the centre)
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327])

_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])        # ascending, 15 nodes
_KRON_W = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GAUSS_W = np.zeros(15)
_GAUSS_W[1:14:2] = np.concatenate([_WG[:-1], _WG[::-1]])  # Gauss nodes at odd slots


class QuadratureError(RuntimeError):
    """Budget exhausted or bad integrand; carries the achieved error."""

    def __init__(self, message: str, achieved: float | None = None):
        super().__init__(message)
        self.achieved = achieved


class AdmissibilityError(ValueError):
    """Weight bundle violates its constraints on the requested support."""


class PreconditionError(ValueError):
    """Integrability precondition for the unbounded-support estimate fails."""


@dataclass(frozen=True)
class WeightedIntegral:
    value_scaled: float
    shift: float
    abs_error_scaled: float
    panels: int

    @property
    def rel_error(self) -> float:
        return self.abs_error_scaled / max(abs(self.value_scaled), _TINY)


def _exponent_shift(h: FunctionJet3, sigma: FunctionJet3, n: int,
                    a: float, b: float) -> float:
    grid = np.linspace(a, b, 129)
    E = h.jet(grid, order=0)[0] + (n - 1) * sigma.log_jet(grid)[0]
    return float(np.max(E))


def _adaptive_multi(g, a: float, b: float, tol: float, max_panels: int,
                    initial: int = 8):
    """Integrate the vector-valued g(r) -> (m, len(r)) adaptively.

    Returns (values, errors, panels); termination is componentwise
    relative to each component's running total."""

    def panel(lo, hi):
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        r = mid + half * _NODES
        vals = np.atleast_2d(np.asarray(g(r), dtype=float))
        if not np.all(np.isfinite(vals)):
            bad = float(r[~np.all(np.isfinite(vals), axis=0)][0])
            raise QuadratureError(f"non-finite integrand sample at r = {bad!r}")
        k15 = half * (vals @ _KRON_W)
        g7 = half * (vals @ _GAUSS_W)
        return k15, np.abs(k15 - g7)

    edges = np.linspace(a, b, initial + 1)
    heap = []
    total = None
    n_panels = 0
    seq = 0
    for lo, hi in zip(edges[:-1], edges[1:]):
        k15, err = panel(lo, hi)
        total = k15 if total is None else total + k15
        n_panels += 1
        heapq.heappush(heap, (-float(np.max(err)), seq, lo, hi, k15, err))
        seq += 1

    while True:
        errs = np.zeros_like(total)
        for entry in heap:
            errs += entry[5]
        scale = np.maximum(np.abs(total), _TINY)
        if np.all(errs <= tol * scale):
            return total, errs, n_panels
        if n_panels >= max_panels:
            worst = float(np.max(errs / scale))
            raise QuadratureError(
                f"panel budget {max_panels} exhausted; achieved relative "
                f"error {worst:.3e}", achieved=worst)
        _, _, lo, hi, k15, _ = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        total = total - k15
        for c_lo, c_hi in ((lo, mid), (mid, hi)):
            child_k15, child_err = panel(c_lo, c_hi)
            total = total + child_k15
            heapq.heappush(heap, (-float(np.max(child_err)), seq, c_lo, c_hi,
                                  child_k15, child_err))
            seq += 1
        n_panels += 1


def weighted_integral_multi(fs, h: FunctionJet3, sigma: FunctionJet3, n: int,
                            a: float, b: float, tol: float = 1e-9,
                            max_panels: int = 20000,
                            shift: float | None = None) -> list[WeightedIntegral]:
    """Simultaneously integrate every row of fs(r) against
    e^{h - shift} sigma^{n-1} dr on [a, b], sharing panels and the shift."""
    if not b > a:
        raise ValueError("integration bounds must satisfy a < b")
    if shift is None:
        shift = _exponent_shift(h, sigma, n, a, b)

    def g(r):
        E = h.jet(r, order=0)[0] + (n - 1) * sigma.log_jet(r)[0]
        return np.atleast_2d(np.asarray(fs(r), dtype=float)) * np.exp(E - shift)

    values, errors, panels = _adaptive_multi(g, a, b, tol, max_panels)
    return [WeightedIntegral(float(v), shift, float(e), panels)
            for v, e in zip(values, errors)]


def weighted_integral(f, h: FunctionJet3, sigma: FunctionJet3, n: int,
                      a: float, b: float, tol: float = 1e-9,
                      max_panels: int = 20000,
                      shift: float | None = None) -> WeightedIntegral:
    """integral_a^b f(r) e^{h(r) - shift} sigma(r)^{n-1} dr in shifted scale."""
    return weighted_integral_multi(f, h, sigma, n, a, b, tol, max_panels,
                                   shift)[0]


# ---------------------------------------------------------------------------
# radial test functions
# ---------------------------------------------------------------------------

def _bump_jet(kind: str, t: np.ndarray):
    """(v, dv/dt, d2v/dt2) of the unit bump on [0, 1], zero outside, value
    and first two derivatives vanishing at both ends."""
    v = np.zeros_like(t)
    d1 = np.zeros_like(t)
    d2 = np.zeros_like(t)
    inside = (t > 0.0) & (t < 1.0)
    ti = t[inside]
    if kind == "quintic-bump":
        # S(2t) rising, S(2-2t) falling; C^2 at the seam because S' and
        # S'' vanish at 1
        rising = ti <= 0.5
        u = np.where(rising, 2.0 * ti, 2.0 - 2.0 * ti)
        du = np.where(rising, 2.0, -2.0)
        s = u ** 3 * (10.0 + u * (-15.0 + 6.0 * u))
        sp = 30.0 * u * u * (1.0 - u) ** 2
        spp = u * (60.0 + u * (-180.0 + 120.0 * u))
        v[inside] = s
        d1[inside] = sp * du
        d2[inside] = spp * 4.0
    elif kind == "exp-bump":
        # exp(4 - 1/(t - t^2)), peak value 1 at t = 1/2
        w = ti - ti * ti
        wp = 1.0 - 2.0 * ti
        u1 = wp / (w * w)
        u2 = (-2.0 * w - 2.0 * wp * wp) / (w ** 3)
        val = np.exp(4.0 - 1.0 / w)
        v[inside] = val
        d1[inside] = val * u1
        d2[inside] = val * (u1 * u1 + u2)
    elif kind == "shifted-sine-squared":
        # ((1 - cos 2 pi t) / 2)^2 = sin^4(pi t)
        s = np.sin(math.pi * ti)
        c = np.cos(math.pi * ti)
        v[inside] = s ** 4
        d1[inside] = 4.0 * math.pi * s ** 3 * c
        d2[inside] = 4.0 * math.pi ** 2 * s * s * (3.0 * c * c - s * s)
    else:
        raise ValueError(f"unknown profile kind {kind!r}; "
                         f"choose one of {PROFILE_KINDS}")
    return v, d1, d2


@dataclass(frozen=True)
class RadialTestFunction:
    """C^2 bump supported on [a, b]; value and first two derivatives
    vanish at both endpoints."""

    kind: str
    support: tuple[float, float]
    amplitude: float = 1.0

    def __post_init__(self):
        a, b = self.support
        if not b > a:
            raise ValueError("support must satisfy a < b")
        if self.kind not in PROFILE_KINDS:
            raise ValueError(f"unknown profile kind {self.kind!r}; "
                             f"choose one of {PROFILE_KINDS}")

    def jet(self, r):
        a, b = self.support
        rr = np.atleast_1d(np.asarray(r, dtype=float))
        v, d1, d2 = _bump_jet(self.kind, (rr - a) / (b - a))
        s = 1.0 / (b - a)
        return (self.amplitude * v, self.amplitude * s * d1,
                self.amplitude * s * s * d2)


# ---------------------------------------------------------------------------
# per-mode inequality reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InequalityReport:
    lam: float
    lhs: float
    rhs_k1: float
    rhs_k2_radial: float
    rhs_k2_angular: float
    margin: float
    quad_error: float
    shift: float
    degenerate: bool = False

    @property
    def rhs_total(self) -> float:
        return self.rhs_k1 + self.rhs_k2_radial + self.rhs_k2_angular


def _check_admissible(w: CarlemanWeights, a: float, b: float,
                      grid_size: int = 129) -> None:
    grid = np.linspace(a, b, grid_size)
    t = w.table(grid)
    bad_k2 = (t["k2"] < 0.0) | (t["k2"] > t["two_min"])
    if np.any(bad_k2):
        r_bad = float(grid[bad_k2][0])
        raise AdmissibilityError(
            f"k2 leaves [0, 2 min(k2L, k2R)] at r = {r_bad!r}")
    bad_k1 = t["k1max"] < 0.0
    if np.any(bad_k1):
        r_bad = float(grid[bad_k1][0])
        raise AdmissibilityError(f"k1max is negative at r = {r_bad!r}")


def mode_carleman_report(cyl: WarpedCylinder, w: CarlemanWeights, lam: float,
                         rho: RadialTestFunction, tol: float = 1e-9,
                         max_panels: int = 20000) -> InequalityReport:
    """Both sides of the mode-reduced estimate

        int (k1 rho^2 + k2 rho'^2 + k2 lam rho^2 / sigma^2) e^h sigma^{n-1}
            <= int (L rho)^2 e^h sigma^{n-1}

    with a single overflow shift shared by all four integrals."""
    a, b = rho.support
    cyl.check_radius(a)
    if lam < 0:
        raise ValueError("eigenvalue must be >= 0")
    _check_admissible(w, a, b)
    shift = _exponent_shift(w.h, cyl.sigma, cyl.n, a, b)

    def rows(r):
        v, v1, v2 = rho.jet(r)
        t = w.table(r)
        w0, s1, _, _ = cyl.log_sigma_jet(r)
        inv_s2 = np.exp(-2.0 * w0)
        lap = v2 + (cyl.n - 1) * s1 * v1 - lam * inv_s2 * v
        k1 = np.maximum(t["k1max"], 0.0)
        return np.stack([lap * lap, k1 * v * v, t["k2"] * v1 * v1,
                         t["k2"] * lam * inv_s2 * v * v])

    lhs, r1, r2, r3 = weighted_integral_multi(
        rows, w.h, cyl.sigma, cyl.n, a, b, tol, max_panels, shift)
    rhs_total = r1.value_scaled + r2.value_scaled + r3.value_scaled
    margin = (lhs.value_scaled - rhs_total) / max(lhs.value_scaled, _TINY)
    quad_error = max(x.rel_error for x in (lhs, r1, r2, r3))
    degenerate = max(abs(lhs.value_scaled), abs(rhs_total)) < 1e-250
    return InequalityReport(lam=float(lam), lhs=lhs.value_scaled,
                            rhs_k1=r1.value_scaled,
                            rhs_k2_radial=r2.value_scaled,
                            rhs_k2_angular=r3.value_scaled,
                            margin=float(margin), quad_error=float(quad_error),
                            shift=lhs.shift, degenerate=bool(degenerate))


# ---------------------------------------------------------------------------
# batteries
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BatterySummary:
    n_tests: int
    n_failures: int
    min_margin: float | None
    max_quad_error: float | None
    wall_time_ms: float
    no_tests: bool = False

    def as_dict(self) -> dict:
        return {"n_tests": self.n_tests, "n_failures": self.n_failures,
                "min_margin": self.min_margin,
                "max_quad_error": self.max_quad_error,
                "wall_time_ms": self.wall_time_ms}


def run_battery(cyl: WarpedCylinder, weight_family, tau_ladder, lambdas,
                bumps, tol: float = 1e-9, max_panels: int = 20000,
                jobs: int = 1, timing: bool = False):
    """Mode reports over the cross product of tau, lambda, and bump.

    weight_family maps tau to a CarlemanWeights.  Cells are isolated: an
    error in one cell is recorded and the battery continues.  Returns
    (summary, reports, failures); a failure is either an errored cell or
    a margin below -3x that cell's quadrature error.  Results do not
    depend on jobs."""
    t0 = time.perf_counter() if timing else 0.0
    cells = [(tau, lam, bump) for tau in tau_ladder for lam in lambdas
             for bump in bumps]
    if not cells:
        return BatterySummary(0, 0, None, None, 0.0, no_tests=True), (), ()

    weights_by_tau = {}
    for tau in tau_ladder:
        if tau in weights_by_tau:
            continue
        try:
            weights_by_tau[tau] = ("ok", weight_family(tau))
        except (ValueError, ArithmeticError) as err:
            weights_by_tau[tau] = ("err", f"weight construction failed: {err}")

    def run_cell(cell):
        tau, lam, bump = cell
        status, payload = weights_by_tau[tau]
        if status == "err":
            return "err", payload
        try:
            return "ok", mode_carleman_report(cyl, payload, lam, bump, tol,
                                              max_panels)
        except (AdmissibilityError, QuadratureError, ValueError,
                ArithmeticError) as err:
            return "err", str(err)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(run_cell, cells))
    else:
        outcomes = [run_cell(cell) for cell in cells]

    reports = []
    failures = []
    for (tau, lam, bump), (status, payload) in zip(cells, outcomes):
        key = (tau, lam, bump.kind, bump.support, bump.amplitude)
        if status == "err":
            failures.append((key, payload))
            continue
        reports.append((key, payload))
        if payload.margin < -3.0 * payload.quad_error:
            failures.append(
                (key, f"margin {payload.margin!r} below -3x quadrature error"))
    wall = (time.perf_counter() - t0) * 1e3 if timing else 0.0
    margins = [rep.margin for _, rep in reports]
    errs = [rep.quad_error for _, rep in reports]
    summary = BatterySummary(
        n_tests=len(cells), n_failures=len(failures),
        min_margin=min(margins) if margins else None,
        max_quad_error=max(errs) if errs else None,
        wall_time_ms=wall)
    return summary, tuple(reports), tuple(failures)


# ---------------------------------------------------------------------------
# the unbounded-support estimate
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TailFunction:
    """C^2 function ramping from 0 to 1 on [a0, a1], then following a
    decaying envelope; symbol is the envelope's growth expression used in
    integrability preconditions."""

    envelope: FunctionJet3
    symbol: AsymptoticSymbol
    ramp: tuple[float, float]

    def __post_init__(self):
        a0, a1 = self.ramp
        if not a1 > a0:
            raise ValueError("ramp must satisfy a0 < a1")

    def ramp_jet(self, r):
        """Jet of the 0-to-1 ramp alone (no envelope)."""
        rr = np.atleast_1d(np.asarray(r, dtype=float))
        a0, a1 = self.ramp
        # the falling quintic step on [1, 2], reversed into a rising ramp
        s = 1.0 + (rr - a0) / (a1 - a0)
        ds = 1.0 / (a1 - a0)
        q0, q1, q2, _ = FAMILIES["quintic_step"].jet(s, ())
        return 1.0 - q0, -q1 * ds, -q2 * ds * ds

    def jet(self, r):
        rr = np.atleast_1d(np.asarray(r, dtype=float))
        p0, p1, p2 = self.ramp_jet(rr)
        e0, e1, e2, _ = self.envelope.jet(rr)
        return (p0 * e0,
                p1 * e0 + p0 * e1,
                p2 * e0 + 2.0 * p1 * e1 + p0 * e2)


@dataclass(frozen=True)
class ExtendedReport:
    Lambda: float
    rows: tuple  # (R, lhs, rhs, ratio, margin, quad_error)
    lambda_min_estimate: float
    stabilized: bool
    verdict: bool
    shift: float


def verify_extended(cyl: WarpedCylinder, w: CarlemanWeights, Lambda: float,
                    tail: TailFunction, R_list,
                    weight_symbol: AsymptoticSymbol,
                    sigma_symbol: AsymptoticSymbol,
                    k2_symbol: AsymptoticSymbol | None = None,
                    tol: float = 1e-9,
                    max_panels: int = 20000) -> ExtendedReport:
    """Truncation study of int (k1 u^2 + k2 u'^2) <= Lambda int (L u)^2
    for the glued tail: quintic ramp times envelope times cutoff at R.

    weight_symbol is the growth expression of e^h.  Tails whose decay
    cannot pay for the weight are rejected up front: the symbol of
    u^2 (1 + k2) e^h sigma^{n-1} must be integrable at infinity.

    Unlike the compact-bump reports, the weight e^h alone overflows on
    [a0, 2R] while the envelope underflows, so here the shift tracks the
    full product envelope^2 e^h sigma^{n-1} and a half weight is folded
    into every squared factor before multiplying."""
    if Lambda < 0:
        raise ValueError("Lambda must be >= 0")
    R_list = sorted(float(R) for R in R_list)
    if not R_list:
        raise ValueError("need at least one truncation radius")
    a0, a1 = tail.ramp
    cyl.check_radius(a0)
    if R_list[0] <= a1:
        raise ValueError("truncation radii must sit past the ramp")

    one_plus_k2 = make_symbol([Term(1.0)]) if k2_symbol is None else \
        make_symbol(list(k2_symbol.terms) + [Term(1.0)])
    decay = growth_mul(growth_pow(tail.symbol, 2.0),
                       growth_mul(one_plus_k2,
                                  growth_mul(weight_symbol,
                                             growth_pow(sigma_symbol,
                                                        float(cyl.n - 1)))))
    if not is_integrable_at_infinity(decay):
        raise PreconditionError(
            "tail cannot pay for the weight: "
            f"{render_growth(decay)} is not integrable at infinity")

    b_max = 2.0 * R_list[-1]
    _check_admissible(w, a0, b_max, 257)
    grid = np.linspace(a0, b_max, 257)
    E_grid = w.h.jet(grid, order=0)[0] + \
        (cyl.n - 1) * cyl.sigma.log_jet(grid)[0]
    shift = float(np.max(E_grid + 2.0 * tail.envelope.log_jet(grid)[0]))

    rows = []
    for R in R_list:
        def g(r):
            p0, p1, p2 = tail.ramp_jet(r)
            q0, q1, q2, _ = FAMILIES["quintic_step"].jet(r / R, ())
            m0 = p0 * q0
            m1 = p1 * q0 + p0 * q1 / R
            m2 = p2 * q0 + 2.0 * p1 * q1 / R + p0 * q2 / (R * R)
            l0, l1, l2, _ = tail.envelope.log_jet(r)
            # jets of u = m * envelope, divided by the envelope value
            a_0 = m0
            a_1 = m1 + m0 * l1
            a_2 = m2 + 2.0 * m1 * l1 + m0 * (l2 + l1 * l1)
            t = w.table(r)
            w0, s1, _, _ = cyl.log_sigma_jet(r)
            E = w.h.jet(r, order=0)[0] + (cyl.n - 1) * w0
            half = np.exp(l0 + 0.5 * (E - shift))
            U, U1 = a_0 * half, a_1 * half
            lap = (a_2 + (cyl.n - 1) * s1 * a_1) * half
            k1 = np.maximum(t["k1max"], 0.0)
            return np.stack([k1 * U * U + t["k2"] * U1 * U1, lap * lap])

        (lhs_v, rhs_v), (lhs_e, rhs_e), _ = _adaptive_multi(
            g, a0, 2.0 * R, tol, max_panels)
        ratio = lhs_v / max(rhs_v, _TINY)
        denom = max(Lambda * rhs_v, lhs_v, _TINY)
        margin = (Lambda * rhs_v - lhs_v) / denom
        qerr = max(lhs_e / max(abs(lhs_v), _TINY),
                   rhs_e / max(abs(rhs_v), _TINY))
        rows.append((R, float(lhs_v), float(rhs_v), float(ratio),
                     float(margin), float(qerr)))

    ratios = [row[3] for row in rows]
    stabilized = len(ratios) >= 2 and \
        abs(ratios[-1] - ratios[-2]) <= 0.01 * max(abs(ratios[-1]), _TINY)
    verdict = all(row[4] >= -3.0 * row[5] for row in rows)
    return ExtendedReport(Lambda=float(Lambda), rows=tuple(rows),
                          lambda_min_estimate=max(1.0, max(ratios)),
                          stabilized=bool(stabilized), verdict=bool(verdict),
                          shift=shift)
