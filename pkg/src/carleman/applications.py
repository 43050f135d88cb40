"""Radial minimal graphs over warped ends and the conformal-factor verdict.

A radial graph u(r) over a warped cylinder is minimal exactly when the
flux sigma^{n-1} u' / sqrt(1 + u'^2) is constant; given the flux c this
pins u' = c / sqrt(sigma^{2(n-1)} - c^2) and u itself by quadrature.  The
integrand has an inverse-square-root singularity where sigma^{n-1} meets
c (the neck of a catenoid), removed here by the substitution
s = r_start + t^2; raw adaptive quadrature near the neck is not an
option.  All sigma powers run through log jets, so ends as heavy as
sigma = e^{r^beta} neither overflow nor lose the tiny gap H - u(r) to
cancellation: the gap is accumulated as a suffix sum of positive
segment increments, never as a difference of near-equal numbers.

The conformal check works on growth envelopes alone.  Scalar-curvature
growth e^{alpha(r)} with alpha superlinear forces any conformal factor
obeying u = O(e^{-(n-2)/4 alpha}) to satisfy both |Delta u| <= A u and
u = O(e^{-tau r}) for every tau, and unique continuation then kills u.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .funcjet import FunctionJet3, make_family
from .geometry import WarpedCylinder
from .growth import (AsymptoticSymbol, Term as GrowthTerm, compare_growth,
                     const_growth, exp_of, growth_mul, growth_pow,
                     make_symbol)
from .weights import linear_fit

__all__ = [
    "ConformalVerdict",
    "DecayReport",
    "FitWindowError",
    "FluxRangeError",
    "GraphProfile",
    "TailDivergenceError",
    "catenoid_decay_report",
    "conformal_necessity",
    "exp_decay_fit",
    "radial_graph_q",
    "radial_minimal_profile",
]

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)


class FluxRangeError(ValueError):
    """Flux exceeds what the warp can carry on the requested range."""


class TailDivergenceError(ValueError):
    """The graph has no finite asymptote: the integral of u' diverges."""


class FitWindowError(ValueError):
    """Too little usable range for a stable decay fit."""


@dataclass(frozen=True)
class GraphProfile:
    """Radial minimal graph: samples of (r, u, u'), the asymptote H, the
    stably-computed gaps H - u(r), and the fitted exponential decay of
    those gaps (None when the graph is a flat slice)."""

    cyl: WarpedCylinder
    c: float
    r_start: float
    samples: tuple[tuple[float, float, float], ...]
    tails: tuple[float, ...]
    H: float
    decay_fit: tuple[float, float, float] | None
    flux_residual: float
    mc_residual: float


def _uprime(cyl: WarpedCylinder, c: float, r):
    """u' = e^w / sqrt(-expm1(2w)) with w = log c - (n-1) log sigma;
    stable both at the neck (w -> 0-) and in the far tail (w -> -inf)."""
    s0 = cyl.log_sigma_jet(r)[0]
    w = math.log(c) - (cyl.n - 1) * s0
    return np.exp(w) / np.sqrt(-np.expm1(2.0 * w))


def _gl_rows(f, edges: np.ndarray) -> np.ndarray:
    """One 64-point Gauss-Legendre value per consecutive edge pair."""
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    x = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    vals = f(x.ravel()).reshape(x.shape)
    return half * (vals @ _GL_WEIGHTS)


def exp_decay_fit(rs, vals) -> tuple[float, float, float]:
    """Fit vals ~ amplitude * e^{-rate * r}; returns (rate, amplitude,
    r_squared).  Non-positive values are excluded; at least 8 must
    survive."""
    rs = np.asarray(rs, dtype=float)
    vals = np.asarray(vals, dtype=float)
    keep = vals > 0.0
    if int(np.sum(keep)) < 8:
        raise FitWindowError("fewer than 8 positive values in the fit "
                             "window; extend the sampled range")
    a, b, r2 = linear_fit(rs[keep], np.log(vals[keep]))
    return -b, math.exp(a), r2


def _tail_after(cyl: WarpedCylinder, c: float, r_end: float) -> float:
    """integral_{r_end}^inf u' by doubling segments with one step of
    Aitken acceleration, accepted once successive accelerated values
    agree to 1e-10 relative."""

    def f_r(r):
        return _uprime(cyl, c, r)

    partial = 0.0
    history: list[float] = []
    prev_acc = None
    R = r_end
    for _ in range(48):
        with np.errstate(invalid="ignore"):
            inc = float(_gl_rows(f_r, np.array([R, 2.0 * R]))[0])
        if not math.isfinite(inc):
            raise FluxRangeError(f"flux too large: sigma^(n-1) <= c beyond "
                                 f"r = {R!r}")
        partial += inc
        history.append(partial)
        if inc == 0.0:
            return partial
        if len(history) >= 3:
            h0, h1, h2 = history[-3:]
            den = (h2 - h1) - (h1 - h0)
            acc = h2 if den == 0.0 else h2 - (h2 - h1) ** 2 / den
            if prev_acc is not None \
                    and abs(acc - prev_acc) <= 1e-10 * max(abs(acc), 1e-300):
                return acc
            prev_acc = acc
        R *= 2.0
    raise TailDivergenceError(
        "tail of u' is not summable within 48 doublings; the integral of "
        "sigma^(1-n) looks divergent")


def radial_minimal_profile(cyl: WarpedCylinder, c: float, r_start: float,
                           r_end: float, tol: float = 1e-10,
                           n_samples: int = 257) -> GraphProfile:
    """Radial minimal graph with flux c on [r_start, r_end].

    Samples are uniform in t = sqrt(r - r_start), dense at the neck
    where u' blows up like an inverse square root.  The asymptote H
    comes from doubling tail segments with Aitken acceleration; a tail
    that is not summable (Euclidean n = 2) raises TailDivergenceError.
    Flux conservation to 1e-10 relative and the discrete mean-curvature
    residual below tol are enforced, not assumed.
    """
    if not r_end > r_start:
        raise ValueError("r_end must exceed r_start")
    if c < 0.0:
        raise FluxRangeError("flux must be >= 0")
    cyl.check_radius(r_start)

    t_edges = np.linspace(0.0, math.sqrt(r_end - r_start), n_samples)
    rs = r_start + t_edges[1:] ** 2
    # probe with the same quadratic clustering the samples use: a flux
    # violation confined to a sliver at the neck must not slip through
    rs_probe = r_start + np.linspace(0.0, t_edges[-1], 513)[1:] ** 2
    if c > 0.0:
        w = math.log(c) - (cyl.n - 1) * cyl.log_sigma_jet(rs_probe)[0]
        if np.any(w >= 0.0):
            bad = float(rs_probe[int(np.argmax(w >= 0.0))])
            raise FluxRangeError(
                f"flux too large: sigma^(n-1) <= c near r = {bad!r}")
    if c == 0.0:
        samples = tuple((float(r), 0.0, 0.0) for r in rs)
        zeros = (0.0,) * len(rs)
        return GraphProfile(cyl, 0.0, float(r_start), samples, zeros, 0.0,
                            None, 0.0, 0.0)

    def f_t(t):
        return 2.0 * t * _uprime(cyl, c, r_start + t * t)

    with np.errstate(invalid="ignore"):
        du = _gl_rows(f_t, t_edges)
    if not np.all(np.isfinite(du)):
        raise FluxRangeError("flux too large: sigma^(n-1) - c changes sign "
                             "between probe points")
    # positive integrand: increments may underflow to 0 far out but must
    # never come back negative
    if du[0] <= 0.0 or np.any(du < 0.0):
        raise ValueError("quadrature produced non-positive increments for "
                         "a positive integrand")
    u = np.cumsum(du)

    tail_beyond = _tail_after(cyl, c, r_end)
    H = float(u[-1] + tail_beyond)
    tails = np.concatenate([np.cumsum(du[1:][::-1])[::-1], [0.0]])
    tails = tails + tail_beyond

    up = _uprime(cyl, c, rs)
    s0 = cyl.log_sigma_jet(rs)[0]
    flux = np.exp((cyl.n - 1) * s0) * up / np.sqrt(1.0 + up * up)
    flux_residual = float(np.max(np.abs(flux - c))) / c
    if flux_residual > 1e-10:
        raise ValueError(f"flux conservation violated: relative residual "
                         f"{flux_residual!r}")
    dflux = (flux[2:] - flux[:-2]) / (rs[2:] - rs[:-2])
    mc = np.abs(dflux) * np.exp(-(cyl.n - 1) * s0[1:-1])
    mc_residual = float(np.max(mc))
    if mc_residual > tol:
        raise ValueError(f"discrete mean-curvature residual {mc_residual!r} "
                         f"exceeds tol {tol!r}")

    half = rs >= 0.5 * (r_start + r_end)
    decay_fit = exp_decay_fit(rs[half], tails[half])
    samples = tuple((float(r), float(uu), float(uup))
                    for r, uu, uup in zip(rs, u, up))
    return GraphProfile(cyl, float(c), float(r_start), samples,
                        tuple(float(t) for t in tails), H, decay_fit,
                        flux_residual, mc_residual)


@dataclass(frozen=True)
class DecayReport:
    """Sharpness record for the hyperbolic catenoid in dimension n."""

    n: int
    c: float
    H: float
    fitted_rate: float
    expected_rate: float
    relative_gap: float
    amplitude: float
    r_squared: float
    statement: str
    profile: GraphProfile

    def as_dict(self) -> dict:
        return {"n": self.n, "c": self.c, "H": self.H,
                "fitted_rate": self.fitted_rate,
                "expected_rate": self.expected_rate,
                "relative_gap": self.relative_gap,
                "amplitude": self.amplitude, "r_squared": self.r_squared,
                "statement": self.statement}


def catenoid_decay_report(n: int, r_end: float,
                          tol: float = 1e-10) -> DecayReport:
    """Hyperbolic catenoid over sinh r with neck at r = 1: flux
    c = sinh^{n-1}(1), exponential convergence to the slice height H at
    the exact rate n - 1.

    That rate is exponential but not more-than-exponential (it never
    beats e^{-tau r} for every tau), so the decay threshold in the
    slice-rigidity statement for these ends cannot be lowered.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    r_start = 1.0
    if r_end < r_start + 2.0:
        raise FitWindowError("r_end below r_start + 2 leaves no room for "
                             "a decay window")
    cyl = WarpedCylinder(n=n, sigma=make_family("sinh", (1.0,)))
    c = math.sinh(1.0) ** (n - 1)
    profile = radial_minimal_profile(cyl, c, r_start, r_end, tol)
    rate, amplitude, r2 = profile.decay_fit
    expected = float(n - 1)
    gap = abs(rate - expected) / expected
    statement = (
        f"H - u(r) decays like e^(-{n - 1} r): exactly exponential, hence "
        "slower than e^(-tau r) for large tau; a non-trivial minimal graph "
        "converging exponentially to a slice exists, so rigidity genuinely "
        "needs more-than-exponential convergence")
    return DecayReport(n=n, c=c, H=profile.H, fitted_rate=rate,
                       expected_rate=expected, relative_gap=gap,
                       amplitude=amplitude, r_squared=r2,
                       statement=statement, profile=profile)


def radial_graph_q(profile: GraphProfile) -> list[tuple[float, float]]:
    """Source term q = |Hess u| |grad u| at each profile sample.

    For radial u over a warp, |Hess u|^2 = (u'')^2 + (n-1)(sigma' u' /
    sigma)^2 with the closed form u'' = -(n-1) (log sigma)' e^w /
    (-expm1(2w))^{3/2}; feed the result to exp_decay_fit to compare the
    decay of q with the decay of H - u.
    """
    cyl, c = profile.cyl, profile.c
    if c == 0.0:
        return [(r, 0.0) for r, _, _ in profile.samples]
    rs = np.array([r for r, _, _ in profile.samples])
    up = np.array([du for _, _, du in profile.samples])
    s0, s1 = cyl.log_sigma_jet(rs)[:2]
    w = math.log(c) - (cyl.n - 1) * s0
    upp = -(cyl.n - 1) * s1 * np.exp(w) / (-np.expm1(2.0 * w)) ** 1.5
    hess = np.sqrt(upp ** 2 + (cyl.n - 1) * (s1 * up) ** 2)
    return [(float(r), float(qq)) for r, qq in zip(rs, hess * up)]


@dataclass(frozen=True)
class ConformalVerdict:
    """Outcome of the envelope-level conformal necessity check."""

    n: int
    C_n: Fraction
    absorbed: bool
    below_every_exponential: bool
    tau_ladder: tuple[float, ...]
    verdict: str
    notes: str

    def as_dict(self) -> dict:
        return {"n": self.n, "C_n": str(self.C_n), "absorbed": self.absorbed,
                "below_every_exponential": self.below_every_exponential,
                "tau_ladder": list(self.tau_ladder), "verdict": self.verdict,
                "notes": self.notes}


def conformal_necessity(n: int, alpha_jet: FunctionJet3,
                        alpha_symbol: AsymptoticSymbol,
                        u_envelope: AsymptoticSymbol,
                        tau_ladder: Sequence[float] = (1.0, 2.0, 4.0, 8.0,
                                                       16.0),
                        ) -> ConformalVerdict:
    """Whether a conformal-factor envelope survives scalar-curvature
    growth e^{alpha}.

    Needs alpha(t)/t -> infinity, checked both on the symbol and on a
    grid.  The envelope is excluded when (i) e^{alpha} u^{4/(n-2)} stays
    bounded, so |Delta u| <= A u holds, and (ii) u = O(e^{-tau r}) along
    the whole tau ladder; unique continuation then forces u == 0 against
    positivity.  u_envelope must be a single positive term so that its
    fractional power is again a symbol.
    """
    if n < 3:
        raise ValueError("conformal check needs n >= 3")
    linear = make_symbol([GrowthTerm(1.0, 1.0)])
    if compare_growth(alpha_symbol, linear) != "omega":
        raise ValueError("alpha fails the superlinear precondition: "
                         "alpha(t)/t must diverge")
    grid = np.geomspace(1.0, 1e4, 33)
    ratios = alpha_jet.jet(grid, order=0)[0] / grid
    if not (np.all(np.diff(ratios) > 0.0) and ratios[-1] >= 10.0 * ratios[0]):
        raise ValueError("alpha fails the superlinear precondition on the "
                         "grid [1, 1e4]")
    if u_envelope.leading() is None:
        raise ValueError("u envelope must be a nonzero decay symbol")

    product = growth_mul(exp_of(alpha_symbol),
                         growth_pow(u_envelope, 4.0 / (n - 2)))
    absorbed = compare_growth(product, const_growth(1.0)) != "omega"
    ladder = tuple(float(t) for t in tau_ladder)
    below = all(
        compare_growth(u_envelope, make_symbol(
            [GrowthTerm(1.0, 0.0, 0.0, (("r", -t, 1.0),))])) != "omega"
        for t in ladder)
    if absorbed and below:
        verdict = "contradiction: envelope forces u == 0"
    else:
        verdict = "envelope not excluded"
    notes = ("the every-tau quantifier is certified on the given ladder; "
             "growth symbols make each comparison exact")
    if not absorbed:
        notes += "; e^alpha u^{4/(n-2)} grows, so |Delta u| <= A u fails"
    elif not below:
        notes += "; the envelope loses to some e^{-tau r} on the ladder"
    return ConformalVerdict(n=n, C_n=Fraction(n - 2, 4 * (n - 1)),
                            absorbed=absorbed,
                            below_every_exponential=below,
                            tau_ladder=ladder, verdict=verdict, notes=notes)
