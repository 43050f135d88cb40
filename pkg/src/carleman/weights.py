"""The Carleman weight bundle derived from (cylinder, h, G, tau).

Everything reduces to four scalar functions of r built from order-3 jets:

    F    = (h' + (n-1) sigma'/sigma - G') / 2
    A    = F^3 - F F' - (n-1)(sigma'/sigma) F^2
    k2L  = 2F^2 - 2(n-1) F sigma'/sigma + F' + F G'
    k2R  = -F' - F G' + 2 F sigma'/sigma

with admissibility 0 <= k2 <= 2 min(k2L, k2R) and

    k1max = 2(A' + A G') - k2 F^2 - G' k2 F - k2' F - k2 F'  >= 0.

A is always evaluated in the expanded product-rule form above; the
equivalent quotient form F^3 - F (sigma^{n-1} F)'/sigma^{n-1} overflows
long before the bundle does, and the identity between the two is what the
tests pin down.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .funcjet import FunctionJet3
from .geometry import WarpedCylinder

__all__ = [
    "CarlemanWeights",
    "LeadingOrderFit",
    "ScanReport",
    "admissibility_scan",
    "build_weights",
    "leading_order",
    "linear_fit",
]

SCAN_COLUMNS = ("r", "k2L", "k2R", "two_min", "k2", "k1max")

_HALF_MIN_STEP = 1e-5  # FD step scale for the kinked half-min k2 derivative


@dataclass(frozen=True)
class CarlemanWeights:
    """Weight bundle at a fixed tau.  k2_choice is "zero", "half-min"
    (min(k2L, k2R) clamped at 0, derivative by finite differences), or an
    explicit FunctionJet3."""

    cyl: WarpedCylinder
    h: FunctionJet3
    G: FunctionJet3
    tau: float
    k2_choice: object = "zero"

    def _core(self, r):
        rr = self.cyl.check_radius(r)
        n = self.cyl.n
        _, s1, s2, s3 = self.cyl.log_sigma_jet(rr)
        _, h1, h2, h3 = self.h.jet(rr)
        _, g1, g2, g3 = self.G.jet(rr)
        F = 0.5 * (h1 + (n - 1) * s1 - g1)
        Fp = 0.5 * (h2 + (n - 1) * s2 - g2)
        Fpp = 0.5 * (h3 + (n - 1) * s3 - g3)
        return rr, n, s1, s2, g1, F, Fp, Fpp

    def _k2_pair(self, rr):
        """(k2, k2') on the array rr."""
        if isinstance(self.k2_choice, FunctionJet3):
            v, d, _, _ = self.k2_choice.jet(rr)
            return v, d
        if self.k2_choice == "zero":
            z = np.zeros_like(rr)
            return z, z.copy()
        if self.k2_choice == "half-min":
            v = self._half_min(rr)
            step = _HALF_MIN_STEP * np.maximum(1.0, rr)
            d = (self._half_min(rr + step) - self._half_min(rr - step)) / (2.0 * step)
            return v, d
        raise ValueError(f"unknown k2 choice {self.k2_choice!r}")

    def _half_min(self, rr):
        rr, n, s1, _, g1, F, Fp, _ = self._core(rr)
        k2L = 2.0 * F * F - 2.0 * (n - 1) * F * s1 + Fp + F * g1
        k2R = -Fp - F * g1 + 2.0 * F * s1
        return np.maximum(np.minimum(k2L, k2R), 0.0)

    def table(self, r) -> dict:
        """All bundle functions on r, as arrays keyed by name."""
        rr, n, s1, s2, g1, F, Fp, Fpp = self._core(r)
        A = F ** 3 - F * Fp - (n - 1) * s1 * F * F
        Ap = (3.0 * F * F * Fp - Fp * Fp - F * Fpp
              - (n - 1) * (s2 * F * F + 2.0 * s1 * F * Fp))
        k2L = 2.0 * F * F - 2.0 * (n - 1) * F * s1 + Fp + F * g1
        k2R = -Fp - F * g1 + 2.0 * F * s1
        k2, k2p = self._k2_pair(rr)
        k2 = np.broadcast_to(np.asarray(k2, dtype=float), rr.shape)
        k2p = np.broadcast_to(np.asarray(k2p, dtype=float), rr.shape)
        k1max = (2.0 * (Ap + A * g1) - k2 * F * F - g1 * k2 * F
                 - k2p * F - k2 * Fp)
        return {"r": rr, "F": F, "Fp": Fp, "Fpp": Fpp, "A": A, "Ap": Ap,
                "k2L": k2L, "k2R": k2R, "two_min": 2.0 * np.minimum(k2L, k2R),
                "k2": k2, "k2p": k2p, "k1max": k1max}

    def _scalar(self, r, key):
        v = self.table(float(r))[key]
        return float(v[0])

    def F(self, r):
        return self._scalar(r, "F")

    def A(self, r):
        return self._scalar(r, "A")

    def k2L(self, r):
        return self._scalar(r, "k2L")

    def k2R(self, r):
        return self._scalar(r, "k2R")

    def k2(self, r):
        return self._scalar(r, "k2")

    def k1max(self, r):
        return self._scalar(r, "k1max")


def build_weights(cyl: WarpedCylinder, h: FunctionJet3, G: FunctionJet3,
                  tau: float, k2_choice="zero") -> CarlemanWeights:
    if not tau > 0:
        raise ValueError("tau must be positive")
    if not (isinstance(k2_choice, FunctionJet3) or k2_choice in ("zero", "half-min")):
        raise ValueError(f"unknown k2 choice {k2_choice!r}")
    return CarlemanWeights(cyl=cyl, h=h, G=G, tau=float(tau), k2_choice=k2_choice)


# ---------------------------------------------------------------------------
# admissibility scans
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScanReport:
    """Grid scan of the bundle.  rows follow SCAN_COLUMNS; the summary
    fields describe the largest suffix of the grid on which 0 <= k2 <=
    two_min and k1max >= 0 hold simultaneously."""

    rows: tuple
    first_admissible_r: float | None
    min_margin_k2: float | None
    min_margin_k1: float | None

    def summary(self) -> dict:
        return {"first_admissible_r": self.first_admissible_r,
                "min_margin_k2": self.min_margin_k2,
                "min_margin_k1": self.min_margin_k1}


def admissibility_scan(w: CarlemanWeights, r_lo: float, r_hi: float,
                       grid_size: int = 129) -> ScanReport:
    if grid_size < 1:
        raise ValueError("empty grid")
    if not (r_lo > w.cyl.r0 and r_hi > r_lo):
        raise ValueError("window must satisfy r0 < r_lo < r_hi")
    grid = np.geomspace(r_lo, r_hi, grid_size)
    t = w.table(grid)
    rows = tuple(zip(t["r"].tolist(), t["k2L"].tolist(), t["k2R"].tolist(),
                     t["two_min"].tolist(), t["k2"].tolist(), t["k1max"].tolist()))
    # per-point margin: distance to the nearest constraint boundary
    m_k2 = np.minimum(t["k2"], t["two_min"] - t["k2"])
    ok = (m_k2 >= 0.0) & (t["k1max"] >= 0.0)
    # first index from which every later point is admissible
    idx = None
    bad = np.nonzero(~ok)[0]
    if bad.size == 0:
        idx = 0
    elif bad[-1] + 1 < grid_size:
        idx = int(bad[-1] + 1)
    if idx is None:
        return ScanReport(rows=rows, first_admissible_r=None,
                          min_margin_k2=None, min_margin_k1=None)
    return ScanReport(rows=rows,
                      first_admissible_r=float(grid[idx]),
                      min_margin_k2=float(np.min(m_k2[idx:])),
                      min_margin_k1=float(np.min(t["k1max"][idx:])))


# ---------------------------------------------------------------------------
# leading-order fits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LeadingOrderFit:
    coefficient: float
    exponent: float
    r_squared: float


def linear_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    """Least-squares y ~ a + b x; returns (a, b, R^2) with the degenerate
    zero-variance case reported as a perfect fit."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    b, a = np.polyfit(x, y, 1)
    resid = y - (a + b * x)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        return float(a), float(b), 1.0
    return float(a), float(b), 1.0 - float(np.sum(resid ** 2)) / ss_tot


def leading_order(w: CarlemanWeights, quantity: str, r_window,
                  grid_size: int = 33) -> LeadingOrderFit:
    """Log-log fit quantity ~ coefficient * r^exponent on a geometric grid."""
    r_lo, r_hi = r_window
    grid = np.geomspace(r_lo, r_hi, grid_size)
    vals = w.table(grid)[quantity]
    if np.any(vals <= 0.0):
        bad = float(grid[np.argmax(vals <= 0.0)])
        raise ValueError(f"{quantity} is not positive at r = {bad!r}; "
                         "shrink the window")
    a, b, r2 = linear_fit(np.log(grid), np.log(vals))
    return LeadingOrderFit(coefficient=math.exp(a), exponent=b, r_squared=r2)
