"""Warped cylindrical ends (r0, inf) x N with metric dr^2 + sigma(r)^2 g_N.

The cross-section N never gets discretized: everything quantitative below
needs only its Laplace spectrum and a constant sectional curvature.  All
curvature formulas are the warped-product ones,

    Sect(dr ^ X)  = -sigma''/sigma,
    Sect(X ^ Y)   = (Sect_N - sigma'^2) / sigma^2,

evaluated through log-jets of sigma so that warpings like e^{r^2} stay
finite far beyond the overflow range of sigma itself.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .funcjet import DomainError, FunctionJet3, make_family

__all__ = [
    "CurvatureData",
    "CutoffProfileError",
    "CutoffReport",
    "GridReport",
    "SectionSpectrum",
    "WarpedCylinder",
    "check_sigma_growth",
    "curvature_at",
    "cutoff_family",
    "cutoff_ladder",
    "mode_laplacian",
    "ricci_quadratic_check",
]


class CutoffProfileError(ValueError):
    """Profile violates the 1-on-[0,1] / 0-on-[2,inf) cutoff contract."""


# ---------------------------------------------------------------------------
# cross-section spectra
# ---------------------------------------------------------------------------

def _sphere_pairs(dim: int, m: int) -> tuple[tuple[float, int], ...]:
    out = []
    for j in range(m):
        lam = float(j * (j + dim - 1))
        mult = comb(dim + j, j) - comb(dim + j - 2, j - 2) if j >= 2 else (1 if j == 0 else dim + 1)
        out.append((lam, mult))
    return tuple(out)


def _torus_pairs(dim: int, m: int) -> tuple[tuple[float, int], ...]:
    # complete shells: |k|^2 <= K^2 forces |k_i| <= K, so enumerating the
    # box [-K, K]^dim misses nothing below K^2
    K = max(2, int(math.isqrt(m)) + 1)
    while True:
        counts: dict[int, int] = {}
        for k in itertools.product(range(-K, K + 1), repeat=dim):
            s = sum(x * x for x in k)
            if s <= K * K:
                counts[s] = counts.get(s, 0) + 1
        if len(counts) >= m:
            lams = sorted(counts)[:m]
            return tuple((float(s), counts[s]) for s in lams)
        K *= 2


@dataclass(frozen=True)
class SectionSpectrum:
    """Laplace eigendata of the closed cross-section.

    kind "sphere" and "flat-torus" generate (eigenvalue, multiplicity)
    pairs on demand; "explicit" carries a finite list.  max_modes is the
    default truncation used by batteries.
    """

    kind: str
    dim: int = 0
    pairs: tuple[tuple[float, int], ...] = ()
    max_modes: int = 4

    def __post_init__(self):
        if self.kind not in ("sphere", "flat-torus", "explicit"):
            raise ValueError(f"unknown spectrum kind {self.kind!r}")
        if self.kind != "explicit" and self.dim < 1:
            raise ValueError("generator needs a cross-section dimension >= 1")
        if self.kind == "explicit":
            if not self.pairs or self.pairs[0][0] != 0.0:
                raise ValueError("spectrum must start at eigenvalue 0")
            lams = [p[0] for p in self.pairs]
            if any(l < 0 for l in lams) or lams != sorted(lams):
                raise ValueError("eigenvalues must be non-negative and ascending")
            if any(int(p[1]) != p[1] or p[1] < 1 for p in self.pairs):
                raise ValueError("multiplicities must be positive integers")

    @classmethod
    def sphere(cls, dim: int, max_modes: int = 4) -> "SectionSpectrum":
        return cls("sphere", dim=dim, max_modes=max_modes)

    @classmethod
    def flat_torus(cls, dim: int, max_modes: int = 4) -> "SectionSpectrum":
        return cls("flat-torus", dim=dim, max_modes=max_modes)

    @classmethod
    def explicit(cls, pairs, max_modes: int = 4) -> "SectionSpectrum":
        return cls("explicit", pairs=tuple((float(l), int(m)) for l, m in pairs),
                   max_modes=max_modes)

    def eigenvalues(self, m: int | None = None) -> tuple[tuple[float, int], ...]:
        m = self.max_modes if m is None else m
        if self.kind == "sphere":
            return _sphere_pairs(self.dim, m)
        if self.kind == "flat-torus":
            return _torus_pairs(self.dim, m)
        if m > len(self.pairs):
            raise ValueError(f"explicit spectrum has only {len(self.pairs)} modes")
        return self.pairs[:m]


# ---------------------------------------------------------------------------
# the cylinder
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WarpedCylinder:
    """Immutable end ((r0, inf) x N, dr^2 + sigma^2 g_N)."""

    n: int
    sigma: FunctionJet3
    r0: float = 0.0
    spectrum: SectionSpectrum | None = None
    section_curvature: float | None = None

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError("dimension n must be an integer >= 2")
        if self.r0 < 0:
            raise ValueError("base radius must be >= 0")
        if self.spectrum is None:
            object.__setattr__(self, "spectrum", SectionSpectrum.sphere(self.n - 1))

    def check_radius(self, r) -> np.ndarray:
        rr = np.atleast_1d(np.asarray(r, dtype=float))
        if np.any(~(rr > self.r0)):
            raise DomainError(f"radius must exceed r0 = {self.r0!r}")
        return rr

    def log_sigma_jet(self, r):
        """(log sigma, sigma'/sigma, (log sigma)'', (log sigma)''') at r."""
        self.check_radius(r)
        return self.sigma.log_jet(r)


@dataclass(frozen=True)
class CurvatureData:
    """Pointwise curvature report.

    christoffel holds the two radial symbol scales: Gamma^r_{ij} =
    radial_from_section * g_ij and Gamma^k_{rj} = mixed * delta_kj;
    section-internal symbols live on N and are not reported.
    riemann_radial_block is the coefficient of the half-Kulkarni-Nomizu
    square of g in the (i,r,j,r) block; riemann_tangential_block is the
    pair (Sect_N/sigma^2 part, (sigma'/sigma)^2 part) whose difference is
    the tangential sectional curvature.
    """

    r: float
    sect_radial: float
    sect_tangential: float
    ricci_radial: float
    ricci_tangential: float
    christoffel: dict = field(default_factory=dict)
    riemann_radial_block: float = 0.0
    riemann_tangential_block: tuple[float, float] = (0.0, 0.0)


def curvature_at(cyl: WarpedCylinder, r: float) -> CurvatureData:
    """Bishop-O'Neill curvature of the warped metric at radius r."""
    if cyl.section_curvature is None:
        raise ValueError("section_curvature required for curvature reports")
    w0, d1, d2, _ = cyl.log_sigma_jet(float(r))
    # sigma''/sigma = (log sigma)'' + (log sigma)'^2
    sect_radial = -(d2 + d1 * d1)
    sect_n_scaled = cyl.section_curvature * math.exp(-2.0 * w0)
    sect_tangential = sect_n_scaled - d1 * d1
    n = cyl.n
    return CurvatureData(
        r=float(r),
        sect_radial=sect_radial,
        sect_tangential=sect_tangential,
        ricci_radial=(n - 1) * sect_radial,
        ricci_tangential=sect_radial + (n - 2) * sect_tangential,
        christoffel={"radial_from_section": -d1, "mixed": d1},
        riemann_radial_block=sect_radial,
        riemann_tangential_block=(sect_n_scaled, d1 * d1),
    )


def mode_laplacian(cyl: WarpedCylinder, rho_jet, lam: float, r) -> float:
    """Radial Laplacian on the lambda-mode: rho'' + (n-1)(sigma'/sigma)rho'
    - (lambda/sigma^2) rho."""
    if lam < 0:
        raise ValueError("eigenvalue must be >= 0")
    rho0, rho1, rho2 = rho_jet
    w0, d1, _, _ = cyl.log_sigma_jet(r)
    return rho2 + (cyl.n - 1) * d1 * rho1 - lam * np.exp(-2.0 * w0) * rho0


# ---------------------------------------------------------------------------
# cutoff families phi_R(r) = Phi(r/R)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CutoffReport:
    R: float
    sup_grad_times_R: float
    sup_laplacian: float
    rows: tuple[tuple[float, float, float], ...]  # (r, |grad phi_R|, |lap phi_R|)


def _validate_profile(profile: FunctionJet3) -> None:
    if abs(profile(0.5) - 1.0) > 1e-12 or abs(profile(1.0 - 1e-9) - 1.0) > 1e-9:
        raise CutoffProfileError("profile must be identically 1 on [0, 1]")
    if abs(profile(2.0 + 1e-9)) > 1e-9 or abs(profile(2.5)) > 1e-12:
        raise CutoffProfileError("profile must be identically 0 on [2, inf)")
    s = np.linspace(1.0, 2.0, 257)[1:-1]
    vals = profile.jet(s, order=0)[0]
    if np.any(vals < -1e-12) or np.any(vals > 1.0 + 1e-12):
        raise CutoffProfileError("profile must take values in [0, 1]")


def cutoff_family(cyl: WarpedCylinder, R: float, profile: FunctionJet3,
                  grid_size: int = 257) -> CutoffReport:
    """Scan |grad phi_R| and |Delta phi_R| on [R, 2R] for phi_R = Phi(r/R).

    Delta phi_R = Phi''(r/R)/R^2 + (n-1)(sigma'/sigma) Phi'(r/R)/R.  The
    s = r/R grid is fixed, so sup|grad phi_R| * R = sup|Phi'| exactly,
    independent of R.
    """
    if R <= cyl.r0:
        raise DomainError(f"cutoff scale must exceed r0 = {cyl.r0!r}")
    _validate_profile(profile)
    s = np.linspace(1.0, 2.0, grid_size)
    p0, p1, p2, _ = profile.jet(s)
    r = s * R
    _, d1, _, _ = cyl.log_sigma_jet(r)
    grad = np.abs(p1) / R
    lap = np.abs(p2 / R ** 2 + (cyl.n - 1) * d1 * p1 / R)
    rows = tuple(zip(r.tolist(), grad.tolist(), lap.tolist()))
    return CutoffReport(R=float(R), sup_grad_times_R=float(np.max(np.abs(p1))),
                        sup_laplacian=float(np.max(lap)), rows=rows)


def cutoff_ladder(cyl: WarpedCylinder, R_list, profile: FunctionJet3):
    """Reports for each R plus the fitted R-independent bound on
    sup|Delta phi_R| and a boundedness verdict (last sup not above
    1.05x the ladder's running bound)."""
    reports = [cutoff_family(cyl, R, profile) for R in R_list]
    sups = [rep.sup_laplacian for rep in reports]
    fitted = max(sups)
    # bounded means the ladder top does not push past the earlier rungs
    verdict = len(sups) < 2 or sups[-1] <= 1.05 * max(sups[:-1]) + 1e-300
    return reports, fitted, verdict


# ---------------------------------------------------------------------------
# structural growth checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GridReport:
    """Running-sup scan; rows are (r, value, running_sup)."""

    estimate: float
    verdict: bool
    rows: tuple[tuple[float, float, float], ...]


def _running_sup_scan(values_at, lo: float, r_max: float,
                      points_per_doubling: int = 16) -> GridReport:
    if not r_max > 2.0 * lo:
        raise ValueError("r_max must allow at least one doubling past the grid start")
    m = max(2, int(round(points_per_doubling * math.log2(r_max / lo))) + 1)
    grid = np.geomspace(lo, r_max, m)
    vals = np.asarray([values_at(float(r)) for r in grid], dtype=float)
    running = np.maximum.accumulate(vals)
    rows = tuple(zip(grid.tolist(), vals.tolist(), running.tolist()))
    sup_full = float(running[-1])
    half = grid <= r_max / 2.0
    sup_half = float(np.max(vals[half])) if np.any(half) else sup_full
    stabilized = sup_full <= sup_half * 1.01 + 1e-300
    return GridReport(estimate=sup_full, verdict=bool(stabilized), rows=rows)


def check_sigma_growth(cyl: WarpedCylinder, r_max: float,
                       points_per_doubling: int = 16) -> GridReport:
    """Least kappa with |(log sigma)'| <= kappa r on the scanned range:
    sup of |sigma'/sigma|/r over a geometric grid in [max(r0, 1), r_max],
    with a <1%-per-doubling stabilization verdict."""
    lo = max(cyl.r0 * (1.0 + 1e-12), 1.0)

    def ratio(r: float) -> float:
        _, d1, _, _ = cyl.log_sigma_jet(r)
        return abs(float(d1)) / r

    return _running_sup_scan(ratio, lo, r_max, points_per_doubling)


def ricci_quadratic_check(cyl: WarpedCylinder, r_max: float,
                          points_per_doubling: int = 16) -> GridReport:
    """Least C with Ric >= -C(1 + r^2) on the scanned range, from the two
    Ricci eigenvalues; same stabilization verdict as check_sigma_growth."""
    if cyl.section_curvature is None:
        raise ValueError("section_curvature required for Ricci scans")
    lo = max(cyl.r0 * (1.0 + 1e-12), 1e-3)

    def ratio(r: float) -> float:
        data = curvature_at(cyl, r)
        worst = max(-data.ricci_radial, -data.ricci_tangential, 0.0)
        return worst / (1.0 + r * r)

    return _running_sup_scan(ratio, lo, r_max, points_per_doubling)


def sigma_from_curvature(B: float) -> FunctionJet3:
    """The model warping with both sectional curvatures equal to B <= 0
    over a unit-curvature section: r for B = 0, sinh(sqrt(-B) r)/sqrt(-B)
    otherwise."""
    if B > 0:
        raise ValueError("model warpings exist only for B <= 0 here")
    if B == 0:
        return make_family("power", [1.0])
    a = math.sqrt(-B)
    return (1.0 / a) * make_family("sinh", [a])
