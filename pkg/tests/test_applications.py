"""Minimal-graph profiles and the conformal verdict against frozen values.

The height oracles below were computed with mpmath at 50 digits on the
substituted integrand 2t u'(r_start + t^2): for sigma = r, n = 3, c = 1
the radicand factors exactly as s^4 - 1 = t^2 (t^6 + 4t^4 + 6t^2 + 4)
with s = 1 + t^2, and the hyperbolic neck was handled the same way; the
tails were integrated to convergence in extended precision.  Amplitude
references use the closed neck asymptote 2^{n-1} sinh^{n-1}(1) / (n-1).
"""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from carleman.applications import (
    ConformalVerdict,
    DecayReport,
    FitWindowError,
    FluxRangeError,
    GraphProfile,
    TailDivergenceError,
    catenoid_decay_report,
    conformal_necessity,
    exp_decay_fit,
    radial_graph_q,
    radial_minimal_profile,
)
from carleman.funcjet import make_family
from carleman.geometry import WarpedCylinder
from carleman.growth import Term, make_symbol, parse_growth

EUCLID3 = WarpedCylinder(n=3, sigma=make_family("power", (1.0,)))

# mpmath, 50 digits: H = 1 + int_0^inf 2 dt / sqrt(t^6 + 4t^4 + 6t^2 + 4)
EUCLID_H = 1.311028777146059905232
EUCLID_U2 = 0.8078193339687290183626
EUCLID_U3 = 0.9772817890897879891856
EUCLID_H_BY_FLUX = {0.25: 0.2516047215886654434349,
                    0.5: 0.5140284005260633664888,
                    0.9: 1.026047870527080055647}

CATENOID_H = {2: 1.364496191312875747633,
              3: 0.6560413400661583695235,
              4: 0.4281028130256503245706,
              5: 0.316776473204043360699}
CATENOID_AMP = {n: 2.0 ** (n - 1) * math.sinh(1.0) ** (n - 1) / (n - 1)
                for n in (2, 3, 4, 5)}


class TestRadialMinimalProfile:
    def test_euclidean_asymptote(self):
        p = radial_minimal_profile(EUCLID3, 1.0, 1.0, 17.0)
        assert p.H == pytest.approx(EUCLID_H, abs=1e-10)
        assert p.flux_residual <= 1e-12
        assert p.mc_residual <= 1e-12

    def test_euclidean_heights(self):
        # t runs over j/64, so r = 1 + t^2 hits 2.0 exactly at j = 64
        p = radial_minimal_profile(EUCLID3, 1.0, 1.0, 17.0)
        r, u, _ = p.samples[63]
        assert r == 2.0
        assert u == pytest.approx(EUCLID_U2, abs=1e-10)
        # r_end = 33 puts t = sqrt(2), r = 3 on the grid
        p33 = radial_minimal_profile(EUCLID3, 1.0, 1.0, 33.0)
        r, u, _ = p33.samples[63]
        assert r == pytest.approx(3.0, abs=1e-12)
        assert u == pytest.approx(EUCLID_U3, abs=1e-10)
        assert p33.H == pytest.approx(p.H, abs=1e-10)

    def test_uprime_closed_form(self):
        p = radial_minimal_profile(EUCLID3, 1.0, 1.0, 17.0)
        for r, _, up in p.samples:
            if 1.5 <= r <= 10.0:
                assert up == pytest.approx(1.0 / math.sqrt(r ** 4 - 1.0),
                                           rel=1e-12)

    def test_flux_constant_at_samples(self):
        p = radial_minimal_profile(EUCLID3, 0.7, 1.0, 17.0)
        rs = np.array([s[0] for s in p.samples])
        up = np.array([s[2] for s in p.samples])
        flux = rs ** 2 * up / np.sqrt(1.0 + up ** 2)
        assert np.max(np.abs(flux - 0.7)) / 0.7 <= 1e-10

    def test_monotone_and_tails(self):
        p = radial_minimal_profile(EUCLID3, 1.0, 1.0, 17.0)
        u = np.array([s[1] for s in p.samples])
        tails = np.array(p.tails)
        assert np.all(np.diff(u) > 0.0)
        assert np.all(tails > 0.0)
        assert np.all(np.diff(tails) < 0.0)
        # early samples: suffix sum agrees with the naive difference
        assert tails[0] == pytest.approx(p.H - u[0], rel=1e-12)

    def test_height_increases_with_flux(self):
        heights = []
        for c, want in sorted(EUCLID_H_BY_FLUX.items()):
            p = radial_minimal_profile(EUCLID3, c, 1.0, 17.0)
            assert p.H == pytest.approx(want, rel=1e-10)
            heights.append(p.H)
        assert heights[0] < heights[1] < heights[2]

    def test_zero_flux_is_flat_slice(self):
        p = radial_minimal_profile(EUCLID3, 0.0, 1.0, 17.0)
        assert p.H == 0.0
        assert p.decay_fit is None
        assert all(u == 0.0 and up == 0.0 for _, u, up in p.samples)
        assert set(p.tails) == {0.0}

    def test_flux_too_large(self):
        with pytest.raises(FluxRangeError, match="flux too large"):
            radial_minimal_profile(EUCLID3, 1.5, 1.0, 17.0)
        cyl = WarpedCylinder(n=3, sigma=make_family("sinh", (1.0,)))
        with pytest.raises(FluxRangeError, match="flux too large"):
            radial_minimal_profile(cyl, math.sinh(1.0) ** 2 * 1.001, 1.0, 14.0)

    def test_negative_flux(self):
        with pytest.raises(FluxRangeError, match=">= 0"):
            radial_minimal_profile(EUCLID3, -0.1, 1.0, 17.0)

    def test_divergent_tail_euclidean_n2(self):
        cyl = WarpedCylinder(n=2, sigma=make_family("power", (1.0,)))
        with pytest.raises(TailDivergenceError, match="not summable"):
            radial_minimal_profile(cyl, 0.5, 1.0, 10.0)

    def test_empty_range(self):
        with pytest.raises(ValueError, match="r_end must exceed"):
            radial_minimal_profile(EUCLID3, 0.5, 2.0, 2.0)

    @given(c=st.floats(min_value=0.05, max_value=0.95))
    @settings(max_examples=20, deadline=None)
    def test_invariants_hold_across_fluxes(self, c):
        p = radial_minimal_profile(EUCLID3, c, 1.0, 12.0)
        assert p.flux_residual <= 1e-10
        assert p.mc_residual <= 1e-10
        assert 0.0 < p.H < 2.0


class TestCatenoidDecay:
    def test_frozen_heights(self):
        for n, want in CATENOID_H.items():
            rep = catenoid_decay_report(n, 14.0)
            assert rep.H == pytest.approx(want, abs=1e-9), n
            assert rep.c == pytest.approx(math.sinh(1.0) ** (n - 1), rel=1e-15)

    def test_rate_matches_dimension(self):
        for n in (2, 3, 4, 5):
            rep = catenoid_decay_report(n, 14.0)
            assert rep.expected_rate == float(n - 1)
            assert rep.relative_gap < 1e-6, n
            assert rep.r_squared > 1.0 - 1e-9

    def test_amplitude_matches_neck_asymptote(self):
        for n in (2, 3, 4, 5):
            rep = catenoid_decay_report(n, 14.0)
            assert rep.amplitude == pytest.approx(CATENOID_AMP[n], rel=1e-5)

    def test_statement_records_sharpness(self):
        rep = catenoid_decay_report(3, 14.0)
        assert "e^(-2 r)" in rep.statement
        assert "more-than-exponential" in rep.statement
        d = rep.as_dict()
        assert d["fitted_rate"] == rep.fitted_rate
        assert "profile" not in d

    def test_window_too_short(self):
        with pytest.raises(FitWindowError, match="r_end below"):
            catenoid_decay_report(3, 2.5)

    def test_dimension_validation(self):
        with pytest.raises(ValueError, match=">= 2"):
            catenoid_decay_report(1, 14.0)


class TestRadialGraphQ:
    def test_zero_flux(self):
        p = radial_minimal_profile(EUCLID3, 0.0, 1.0, 17.0)
        assert all(q == 0.0 for _, q in radial_graph_q(p))

    def test_catenoid_rate_doubles(self):
        # |Hess u| and |grad u| each decay at the profile rate n-1, so q
        # decays at 2(n-1); the gap H - u stays an upper envelope far out
        rep = catenoid_decay_report(3, 14.0)
        qs = radial_graph_q(rep.profile)
        rs = np.array([r for r, _ in qs])
        qv = np.array([q for _, q in qs])
        half = rs >= 7.5
        rate, _, r2 = exp_decay_fit(rs[half], qv[half])
        assert rate == pytest.approx(4.0, rel=1e-4)
        assert r2 > 1.0 - 1e-9
        far = rs >= 3.0
        assert np.all(qv[far] <= np.array(rep.profile.tails)[far])

    def test_catenoid_second_derivative_closed_form(self):
        # q = |Hess||grad| with u'' = -c(n-1) sigma^{2n-3} sigma' /
        # (sigma^{2(n-1)} - c^2)^{3/2} for sigma = sinh, n = 3
        rep = catenoid_decay_report(3, 14.0)
        c = rep.c
        for (r, _, up), (rq, q) in zip(rep.profile.samples,
                                       radial_graph_q(rep.profile)):
            if not 2.0 <= r <= 6.0:
                continue
            assert rq == r
            sig, sigp = math.sinh(r), math.cosh(r)
            upp = -c * 2.0 * sig ** 3 * sigp / (sig ** 4 - c * c) ** 1.5
            want = math.sqrt(upp ** 2 + 2.0 * (sigp / sig * up) ** 2) * up
            assert q == pytest.approx(want, rel=1e-10)

    def test_euclidean_power_law(self):
        # u' ~ r^-2, u'' ~ -2 r^-3, sigma'u'/sigma ~ r^-3: q ~ sqrt(6) r^-5
        p = radial_minimal_profile(EUCLID3, 1.0, 1.0, 17.0)
        qs = radial_graph_q(p)
        rs = np.array([r for r, _ in qs])
        qv = np.array([q for _, q in qs])
        mask = rs >= 8.0
        slope, _, _ = np.polyfit(np.log(rs[mask]), np.log(qv[mask]), 1), 0, 0
        assert slope[0] == pytest.approx(-5.0, abs=0.01)
        assert qv[-1] * rs[-1] ** 5 == pytest.approx(math.sqrt(6.0), rel=1e-3)


class TestExpDecayFit:
    def test_recovers_exact_exponential(self):
        rs = np.linspace(3.0, 9.0, 25)
        rate, amp, r2 = exp_decay_fit(rs, 3.5 * np.exp(-1.25 * rs))
        assert rate == pytest.approx(1.25, rel=1e-12)
        assert amp == pytest.approx(3.5, rel=1e-12)
        assert r2 == pytest.approx(1.0, abs=1e-12)

    def test_too_few_positive_values(self):
        rs = np.linspace(1.0, 5.0, 10)
        vals = np.concatenate([np.ones(5), np.zeros(5)])
        with pytest.raises(FitWindowError, match="fewer than 8"):
            exp_decay_fit(rs, vals)


R2_JET = make_family("power", (2.0,))
R2_SYM = parse_growth("1.0*r^2.0")


def envelope(c: float, p: float):
    """Decay symbol e^{c r^p} as a single positive term."""
    return make_symbol([Term(1.0, 0.0, 0.0, (("r", c, p),))])


class TestConformalNecessity:
    def test_constant(self):
        from fractions import Fraction
        v = conformal_necessity(3, R2_JET, R2_SYM, envelope(-0.25, 2.0))
        assert v.C_n == Fraction(1, 8)
        assert conformal_necessity(5, R2_JET, R2_SYM,
                                   envelope(-0.75, 2.0)).C_n == Fraction(3, 16)

    def test_gaussian_envelope_contradiction(self):
        v = conformal_necessity(3, R2_JET, R2_SYM, envelope(-0.25, 2.0))
        assert v.absorbed and v.below_every_exponential
        assert v.verdict == "contradiction: envelope forces u == 0"
        d = v.as_dict()
        assert d["C_n"] == "1/8"
        assert d["tau_ladder"] == [1.0, 2.0, 4.0, 8.0, 16.0]

    def test_exponential_envelope_not_excluded(self):
        # e^{r^2} e^{-4r} is unbounded, so the linear-decay envelope
        # never yields |Delta u| <= A u
        v = conformal_necessity(3, R2_JET, R2_SYM, envelope(-1.0, 1.0))
        assert not v.absorbed
        assert v.verdict == "envelope not excluded"
        assert "grows" in v.notes

    def test_intermediate_envelope_not_excluded(self):
        v = conformal_necessity(3, R2_JET, R2_SYM, envelope(-1.0, 1.5))
        assert v.below_every_exponential and not v.absorbed
        assert v.verdict == "envelope not excluded"

    def test_linear_alpha_rejected(self):
        lin_jet = make_family("power", (1.0,))
        lin_sym = parse_growth("1.0*r^1.0")
        with pytest.raises(ValueError, match="superlinear"):
            conformal_necessity(3, lin_jet, lin_sym, envelope(-1.0, 1.0))

    def test_symbol_jet_mismatch_rejected(self):
        # superlinear symbol paired with a linear jet: the grid check
        # must catch the lie
        lin_jet = make_family("power", (1.0,))
        with pytest.raises(ValueError, match="on the.*grid"):
            conformal_necessity(3, lin_jet, R2_SYM, envelope(-0.25, 2.0))

    def test_zero_envelope_rejected(self):
        with pytest.raises(ValueError, match="nonzero"):
            conformal_necessity(3, R2_JET, R2_SYM, make_symbol([]))

    def test_dimension_validation(self):
        with pytest.raises(ValueError, match="n >= 3"):
            conformal_necessity(2, R2_JET, R2_SYM, envelope(-0.25, 2.0))
