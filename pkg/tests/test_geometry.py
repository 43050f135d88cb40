"""Curvature, mode Laplacian, cutoff, and growth-check behavior on the
model warpings.  Constant-curvature values are exact statements about
sinh-type warpings over the unit sphere, so tolerances sit at 1e-12."""

from __future__ import annotations

import math

import numpy as np
import pytest

from carleman.funcjet import DomainError, central_difference, make_family
from carleman.geometry import (
    CutoffProfileError,
    SectionSpectrum,
    WarpedCylinder,
    check_sigma_growth,
    curvature_at,
    cutoff_family,
    cutoff_ladder,
    mode_laplacian,
    ricci_quadratic_check,
    sigma_from_curvature,
)

EUCLID = make_family("power", [1.0])
HYP = make_family("sinh", [1.0])
EXP_R2 = make_family("exp_rbeta", [2.0, 1.0])


def cyl(sigma, n=3, r0=0.0, K=1.0):
    return WarpedCylinder(n=n, sigma=sigma, r0=r0, section_curvature=K)


# -- constant-curvature models ------------------------------------------------

@pytest.mark.parametrize("B", [0.0, -1.0, -4.0])
def test_model_warpings_have_constant_curvature(B):
    c = cyl(sigma_from_curvature(B), n=4)
    for r in np.linspace(0.3, 10.0, 20):
        data = curvature_at(c, float(r))
        assert data.sect_radial == pytest.approx(B, abs=1e-12)
        assert data.sect_tangential == pytest.approx(B, abs=1e-12)


def test_hyperbolic_curvature_far_out():
    c = cyl(HYP)
    data = curvature_at(c, 40.0)
    assert data.sect_radial == pytest.approx(-1.0, abs=1e-13)
    assert data.sect_tangential == pytest.approx(-1.0, abs=1e-13)
    assert data.ricci_radial == pytest.approx(-2.0, abs=1e-12)
    assert data.ricci_tangential == pytest.approx(-2.0, abs=1e-12)


def test_euclidean_cone_is_flat():
    c = cyl(EUCLID)
    for r in (0.7, 2.0, 55.0):
        data = curvature_at(c, r)
        assert abs(data.sect_radial) < 1e-14
        assert abs(data.sect_tangential) < 1e-14


def test_exp_warping_radial_curvature():
    # sigma = e^{r^2}: sigma''/sigma = 2 + 4r^2, so -6 at r = 1
    data = curvature_at(cyl(EXP_R2), 1.0)
    assert data.sect_radial == pytest.approx(-6.0, rel=1e-13)


def test_ricci_from_sectionals_exact():
    c = cyl(EXP_R2, n=5)
    data = curvature_at(c, 1.7)
    assert data.ricci_radial == 4 * data.sect_radial
    assert data.ricci_tangential == data.sect_radial + 3 * data.sect_tangential


def test_curvature_report_blocks():
    data = curvature_at(cyl(HYP), 2.0)
    coth = math.cosh(2.0) / math.sinh(2.0)
    assert data.christoffel["mixed"] == pytest.approx(coth, rel=1e-14)
    assert data.christoffel["radial_from_section"] == pytest.approx(-coth, rel=1e-14)
    assert data.riemann_radial_block == data.sect_radial
    part_n, part_grad = data.riemann_tangential_block
    assert part_n - part_grad == pytest.approx(data.sect_tangential, rel=1e-12)
    assert part_n == pytest.approx(1.0 / math.sinh(2.0) ** 2, rel=1e-13)


def test_curvature_needs_section_curvature():
    c = WarpedCylinder(n=3, sigma=HYP)
    with pytest.raises(ValueError):
        curvature_at(c, 1.0)
    with pytest.raises(DomainError):
        curvature_at(cyl(HYP, r0=2.0), 1.5)


# -- mode Laplacian ------------------------------------------------------------

def test_constants_harmonic_in_zero_mode():
    assert mode_laplacian(cyl(HYP), (1.0, 0.0, 0.0), 0.0, 3.0) == 0.0


def test_inverse_radius_harmonic_on_flat_cone():
    got = mode_laplacian(cyl(EUCLID), (0.5, -0.25, 0.25), 0.0, 2.0)
    assert got == 0.0


def test_sinh_mode_value():
    got = mode_laplacian(cyl(HYP), (1.0, 0.0, 0.0), 2.0, 1.0)
    assert got == pytest.approx(-2.0 / math.sinh(1.0) ** 2, rel=1e-14)


@pytest.mark.parametrize("sigma,n,r", [
    (EUCLID, 3, 2.0), (EUCLID, 5, 7.0),
    (HYP, 3, 1.5), (HYP, 4, 9.0),
    (make_family("exp_rbeta", [1.5, 1.0]), 4, 2.0),
])
def test_radial_harmonic_annihilated(sigma, n, r):
    # rho' = sigma^{1-n} solves the zero-mode equation; the two products
    # are exact negations so the residual is zero to rounding
    c = cyl(sigma, n=n)
    w0, d1, _, _ = c.log_sigma_jet(r)
    s = math.exp((1 - n) * w0)
    residual = mode_laplacian(c, (0.0, s, (1 - n) * d1 * s), 0.0, r)
    scale = abs((n - 1) * d1 * s)
    assert abs(residual) <= 1e-10 * scale


def test_mode_laplacian_linear_in_jet():
    c = cyl(HYP)
    a, b = (0.3, -1.2, 0.9), (1.1, 0.4, -2.0)
    lam, r = 6.0, 2.2
    la = mode_laplacian(c, a, lam, r)
    lb = mode_laplacian(c, b, lam, r)
    combo = tuple(2.0 * x + 3.0 * y for x, y in zip(a, b))
    assert mode_laplacian(c, combo, lam, r) == pytest.approx(2 * la + 3 * lb, rel=1e-13)


def test_mode_laplacian_guards():
    with pytest.raises(ValueError):
        mode_laplacian(cyl(HYP), (1.0, 0.0, 0.0), -1.0, 2.0)
    with pytest.raises(DomainError):
        mode_laplacian(cyl(HYP, r0=1.0), (1.0, 0.0, 0.0), 0.0, 0.5)


# -- cutoffs -------------------------------------------------------------------

QUINTIC = make_family("quintic_step")


def test_cutoff_grad_scaling_exact():
    c = cyl(EUCLID)
    reports = [cutoff_family(c, R, QUINTIC) for R in (10.0, 100.0, 1000.0)]
    sups = {rep.sup_grad_times_R for rep in reports}
    assert len(sups) == 1  # bit-identical across R
    assert sups.pop() == pytest.approx(15.0 / 8.0, rel=1e-12)


def test_cutoff_laplacian_decreases_on_cone():
    c = cyl(EUCLID)
    reports, fitted, bounded = cutoff_ladder(c, (10.0, 100.0, 1000.0), QUINTIC)
    sups = [rep.sup_laplacian for rep in reports]
    assert sups[0] > sups[1] > sups[2]
    assert bounded and fitted == sups[0]


def test_cutoff_bounded_for_gaussian_warping():
    # (sigma'/sigma)/R = 2r/R <= 4 on [R, 2R]: bound (n-1)*4*sup|Phi'|
    c = cyl(EXP_R2)
    reports, fitted, bounded = cutoff_ladder(c, (10.0, 100.0, 1000.0), QUINTIC)
    assert bounded
    assert all(rep.sup_laplacian <= 2.0 * 4.0 * 15.0 / 8.0 * 1.01 for rep in reports)


def test_cutoff_unbounded_for_overfast_warping():
    c = cyl(make_family("exp_rbeta", [3.0, 1.0]))
    _, _, bounded = cutoff_ladder(c, (10.0, 100.0, 1000.0), QUINTIC)
    assert not bounded


def test_cutoff_laplacian_matches_difference_quotient():
    c = cyl(HYP)
    R = 10.0
    rep = cutoff_family(c, R, QUINTIC)
    r, _, lap = rep.rows[len(rep.rows) // 3]
    phi = lambda x: QUINTIC(x / R)
    d1_fd = central_difference(phi, r, 1e-5 * R)
    d2_fd = (phi(r + 1e-4 * R) - 2 * phi(r) + phi(r - 1e-4 * R)) / (1e-4 * R) ** 2
    _, d1s, _, _ = c.log_sigma_jet(r)
    want = abs(d2_fd + (c.n - 1) * d1s * d1_fd)
    assert lap == pytest.approx(want, rel=1e-5)


def test_cutoff_profile_contract():
    not_closing = 0.5 * QUINTIC + 0.5 * make_family("const")
    with pytest.raises(CutoffProfileError):
        cutoff_family(cyl(EUCLID), 10.0, not_closing)
    with pytest.raises(CutoffProfileError):
        cutoff_family(cyl(EUCLID), 10.0, 0.9 * QUINTIC)
    with pytest.raises(DomainError):
        cutoff_family(cyl(EUCLID, r0=20.0), 10.0, QUINTIC)


# -- growth checks -------------------------------------------------------------

def test_sigma_growth_sinh_needs_vanishing_kappa_at_infinity():
    # global sup sits at the grid start; pushing the base radius out
    # drives the needed kappa to zero
    base = check_sigma_growth(cyl(HYP), 100.0)
    assert base.verdict
    assert base.estimate == pytest.approx(math.cosh(1.0) / math.sinh(1.0), rel=1e-12)
    estimates = [check_sigma_growth(cyl(HYP, r0=r0), 100.0 * r0).estimate
                 for r0 in (1.0, 4.0, 16.0)]
    assert estimates[0] > estimates[1] > estimates[2]
    assert estimates[2] < 0.07


def test_sigma_growth_gaussian_warping():
    rep = check_sigma_growth(cyl(EXP_R2), 200.0)
    assert rep.verdict
    assert rep.estimate == pytest.approx(2.0, rel=1e-12)


def test_sigma_growth_cubic_exponent_diverges():
    rep = check_sigma_growth(cyl(make_family("exp_rbeta", [3.0, 1.0])), 200.0)
    assert not rep.verdict
    assert rep.estimate == pytest.approx(3.0 * 200.0, rel=1e-9)


def test_ricci_quadratic_constant_curvature():
    rep = ricci_quadratic_check(cyl(HYP, n=4), 50.0)
    assert rep.verdict
    assert rep.estimate == pytest.approx(3.0, rel=1e-5)  # grid starts near 0
    flat = ricci_quadratic_check(cyl(EUCLID), 50.0)
    assert flat.estimate < 1e-9 and flat.verdict  # rounding dust near r = 0


def test_ricci_quadratic_gaussian_warping():
    rep = ricci_quadratic_check(cyl(EXP_R2, n=3), 400.0)
    assert rep.verdict
    assert rep.estimate == pytest.approx(8.0, rel=1e-4)
    r, val, _ = rep.rows[-1]
    assert val == pytest.approx(2.0 * (2.0 + 4.0 * r * r) / (1.0 + r * r), rel=1e-10)


def test_grid_report_rows_monotone_sup():
    rep = check_sigma_growth(cyl(EXP_R2), 64.0)
    sups = [row[2] for row in rep.rows]
    assert sups == sorted(sups)
    assert rep.rows[-1][2] == rep.estimate


# -- spectra -------------------------------------------------------------------

def test_sphere_spectrum():
    assert SectionSpectrum.sphere(2).eigenvalues(4) == \
        ((0.0, 1), (2.0, 3), (6.0, 5), (12.0, 7))
    assert SectionSpectrum.sphere(1).eigenvalues(3) == ((0.0, 1), (1.0, 2), (4.0, 2))


def test_torus_spectrum():
    assert SectionSpectrum.flat_torus(2).eigenvalues(4) == \
        ((0.0, 1), (1.0, 4), (2.0, 4), (4.0, 4))


def test_explicit_spectrum_validation():
    sp = SectionSpectrum.explicit([(0.0, 1), (3.5, 2)])
    assert sp.eigenvalues(2) == ((0.0, 1), (3.5, 2))
    with pytest.raises(ValueError):
        SectionSpectrum.explicit([(1.0, 1)])
    with pytest.raises(ValueError):
        SectionSpectrum.explicit([(0.0, 1), (2.0, 1), (1.0, 1)])
    with pytest.raises(ValueError):
        sp.eigenvalues(3)


def test_default_spectrum_is_matching_sphere():
    c = WarpedCylinder(n=4, sigma=HYP)
    assert c.spectrum.kind == "sphere" and c.spectrum.dim == 3


def test_cylinder_validation():
    with pytest.raises(ValueError):
        WarpedCylinder(n=1, sigma=HYP)
    with pytest.raises(ValueError):
        WarpedCylinder(n=3, sigma=HYP, r0=-1.0)
