"""Jet correctness against independently computed references.

Reference values were produced with sympy/mpmath at 22 significant digits
and are frozen here.  Derivative stacks are additionally cross-checked with
three-point central differences at the documented step 1e-4 * max(1, r);
for exponential-type families the test radii are restricted to windows
where that step keeps the truncation error of the difference quotient
itself below the comparison tolerance (the quotient error grows like
(step * d log f/dr)^2, and exp(r**2) overflows double precision past
r = 26.6).
"""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from carleman.funcjet import (
    DescriptorError,
    DomainError,
    FamilyParameterError,
    FunctionJet3,
    UnknownFamilyError,
    central_difference,
    const,
    eval_jet,
    make_family,
    parse_descriptor,
)

REL_TOL_ORACLE = 5e-15
REL_TOL_FD = 1e-6
FD_STEP_SCALE = 1e-4


def assert_jet_close(got, want, rtol=REL_TOL_ORACLE):
    for k, (g, w) in enumerate(zip(got, want)):
        assert g == pytest.approx(w, rel=rtol, abs=1e-300), f"order {k}"


# -- frozen oracles ----------------------------------------------------------

def test_power_unit_slope():
    assert make_family("power", [1]).jet(2.0) == (2.0, 1.0, 0.0, 0.0)


def test_log_jet_at_e():
    got = make_family("log").jet(math.e, order=2)
    assert_jet_close(got, (1.0, 1.0 / math.e, -1.0 / math.e ** 2))


def test_exp_r_squared_at_one():
    got = make_family("exp_rbeta", [2, 1]).jet(1.0)
    e = math.e
    assert_jet_close(got, (e, 2 * e, 6 * e, 20 * e))


def test_linear_combination_low_order():
    h = 2.0 * make_family("power", [4.0 / 3.0])
    assert_jet_close(h.jet(1.0, order=1), (2.0, 8.0 / 3.0))


def test_loglog_oracle():
    got = make_family("loglog").jet(5.0)
    assert_jet_close(got, (0.4758849953271106210225, 0.1242669869119223621414,
                           -0.04029568141855235607852, 0.02304466159107984321413))


def test_logpow_oracle_half_integer():
    got = make_family("logpow", [1.5]).jet(math.exp(2.0))
    assert_jet_close(got, (2.828427124746190097603, 0.2870894895312327718824,
                           -0.02914000303497295609053, 0.006244145060068545910457))


def test_logpow_oracle_generic():
    got = make_family("logpow", [3.7]).jet(11.0)
    assert_jet_close(got, (25.43148864923586971295, 3.567390159710620172796,
                           0.04085876489067992659043, -0.01709068401111800692194))


def test_powlog_oracle():
    got = make_family("powlog", [-2.0, -0.5]).jet(7.3)
    assert_jet_close(got, (0.01330944098807749023119, -0.004105005271481863803484,
                           0.001860029759475850262826, -0.001111460429893854726739))


def test_exp_rbeta_oracle():
    got = make_family("exp_rbeta", [0.5, 2.25]).jet(9.0)
    assert_jet_close(got, (854.0587625261515540842, 320.2720359473068469924,
                           102.3091225942785627012, 27.98673462271026224357))


def test_exp_logpow_oracle():
    got = make_family("exp_logpow", [1.8, -0.7]).jet(9.1)
    assert_jet_close(got, (0.05429323177377025727880, -0.01416828481967731208586,
                           0.004690246099064308086764, -0.001892802624782771783572))


def test_sinh_oracle():
    got = make_family("sinh", [2.0]).jet(1.25)
    assert_jet_close(got, (6.050204481039787321450, 12.26457895932737223324,
                           24.20081792415914928580, 49.05831583730948893296))


def test_scaled_power_oracle():
    got = (3.0 * make_family("power", [-2.5])).jet(4.0)
    assert_jet_close(got, (0.09375, -0.05859375, 0.05126953125, -0.05767822265625))


def test_quintic_step_oracle():
    got = make_family("quintic_step").jet(1.25)
    assert_jet_close(got, (0.896484375, -1.0546875, -5.625, 7.5))


def test_exp_step_oracle():
    got = make_family("exp_step").jet(1.3)
    assert_jet_close(got, (0.8704295306002940825253, -1.483300191799604493495,
                           -6.756269893060047063808, 55.66847480129521550286),
                     rtol=1e-13)
    mirrored = make_family("exp_step").jet(1.7)
    assert_jet_close(mirrored, (0.1295704693997059174747, -1.483300191799604493495,
                                6.756269893060047063808, 55.66847480129521550286),
                     rtol=1e-13)


def test_step_profiles_flat_outside():
    for name in ("quintic_step", "exp_step"):
        f = make_family(name)
        assert f.jet(0.75) == (1.0, 0.0, 0.0, 0.0)
        assert f.jet(2.5) == (0.0, 0.0, 0.0, 0.0)


def test_step_profiles_c2_at_seams():
    # values and first two derivatives approach 0 (resp. 1) at the seams
    for name in ("quintic_step", "exp_step"):
        f = make_family(name)
        eps = 1e-5
        v, d1, d2 = f.jet(1.0 + eps, order=2)
        assert abs(v - 1.0) < 1e-9 and abs(d1) < 1e-3 and abs(d2) < 1.0
        v, d1, d2 = f.jet(2.0 - eps, order=2)
        assert abs(v) < 1e-9 and abs(d1) < 1e-3 and abs(d2) < 1.0


# -- stable log jets ---------------------------------------------------------

def test_log_jet_sinh_matches_fallback():
    # the quotient form cancels catastrophically (d2 = f2/f0 - d1**2 with
    # both operands near 4), so grant it an absolute floor at that scale
    f = 0.5 * make_family("sinh", [2.0])
    r = 3.7
    closed = f.log_jet(r)
    direct = f.jet(r)
    d1 = direct[1] / direct[0]
    d2 = direct[2] / direct[0] - d1 ** 2
    d3 = direct[3] / direct[0] - 3 * d1 * d2 - d1 ** 3
    for g, w in zip(closed, (math.log(direct[0]), d1, d2, d3)):
        assert g == pytest.approx(w, rel=1e-12, abs=1e-13 * d1 ** 2)


def test_log_jet_sinh_far_field():
    f = make_family("sinh", [1.0])
    w0, d1, d2, d3 = f.log_jet(800.0)
    assert w0 == pytest.approx(800.0 - math.log(2.0), rel=1e-15)
    assert d1 == pytest.approx(1.0, rel=1e-15)
    assert abs(d2) < 1e-300 and abs(d3) < 1e-300


def test_log_jet_exp_warping_beyond_overflow():
    f = make_family("exp_rbeta", [2.0, 1.0])
    w0, d1, d2, d3 = f.log_jet(40.0)  # exp(1600) itself overflows
    assert (w0, d1, d2, d3) == (1600.0, 80.0, 2.0, 0.0)
    with pytest.raises(DomainError):
        (f + const(1.0)).log_jet(40.0)


# -- structural properties ---------------------------------------------------

FD_WINDOWS = {
    "const": (0.5, 1e3),
    "power": (0.5, 1e3),
    "log": (0.5, 1e3),
    "loglog": (math.e + 1.0, 1e3),
    "logpow": (math.e + 1.0, 1e3),
    "powlog": (math.e + 1.0, 1e3),
    "sinh": (0.5, 8.0),
    "cosh": (0.5, 8.0),
    "exp_rbeta": (1.1, 2.8),
    "exp_logpow": (math.e + 1.0, 200.0),
    "quintic_step": (1.05, 1.95),
    "exp_step": (1.3, 1.7),
}

PARAM_STRATEGIES = {
    "const": st.just(()),
    "power": st.tuples(st.floats(-3, 3)),
    "log": st.just(()),
    "loglog": st.just(()),
    "logpow": st.tuples(st.floats(-3, 4)),
    "powlog": st.tuples(st.floats(-3, 3), st.floats(-3, 3)),
    "sinh": st.tuples(st.floats(0.25, 2)),
    "cosh": st.tuples(st.floats(0.25, 2)),
    "exp_rbeta": st.tuples(st.floats(0.5, 2), st.floats(-2, 2).filter(lambda c: abs(c) > 0.05)),
    "exp_logpow": st.tuples(st.floats(1.1, 2), st.floats(-1, 1)),
    "quintic_step": st.just(()),
    "exp_step": st.just(()),
}


@settings(max_examples=30, deadline=None)
@given(data=st.data())
@pytest.mark.parametrize("name", sorted(FD_WINDOWS))
def test_derivatives_match_central_differences(name, data):
    params = data.draw(PARAM_STRATEGIES[name])
    lo, hi = FD_WINDOWS[name]
    r = data.draw(st.floats(lo, hi))
    f = make_family(name, params)
    step = FD_STEP_SCALE * max(1.0, r)
    jet = f.jet(r)
    # truncation error of the quotient rides on derivatives two orders up,
    # so floor the comparison at the scale of the largest stack entry
    floor = 1e-6 * max(1.0, *(abs(v) for v in jet))
    for k in range(1, 4):
        fd = central_difference(lambda x, k=k: f.jet(x, order=k - 1)[k - 1], r, step)
        assert fd == pytest.approx(jet[k], rel=REL_TOL_FD, abs=floor)


@settings(max_examples=50, deadline=None)
@given(a=st.floats(-5, 5), b=st.floats(-5, 5), r=st.floats(3.0, 50.0))
def test_linearity(a, b, r):
    f = make_family("power", [1.5])
    g = make_family("log")
    combo = a * f + b * g
    fj, gj, cj = f.jet(r), g.jet(r), combo.jet(r)
    for k in range(4):
        assert cj[k] == pytest.approx(a * fj[k] + b * gj[k], rel=1e-12, abs=1e-12)


def test_domain_guards():
    with pytest.raises(DomainError):
        make_family("loglog").jet(2.0)
    with pytest.raises(DomainError):
        make_family("log").jet(0.0)
    with pytest.raises(DomainError):
        make_family("power", [0.5]).jet(np.array([1.0, 2.0, -3.0]))


def test_parameter_guards():
    with pytest.raises(FamilyParameterError):
        make_family("exp_rbeta", [-1.0, 1.0])
    with pytest.raises(FamilyParameterError):
        make_family("sinh", [0.0])
    with pytest.raises(FamilyParameterError):
        make_family("power", [1.0, 2.0])
    with pytest.raises(UnknownFamilyError):
        make_family("tanh", [1.0])


# -- descriptors -------------------------------------------------------------

TERM_STRATEGY = st.one_of(
    st.tuples(st.just("power"), st.tuples(st.floats(-4, 4))),
    st.tuples(st.just("log"), st.just(())),
    st.tuples(st.just("logpow"), st.tuples(st.floats(-3, 4))),
    st.tuples(st.just("powlog"), st.tuples(st.floats(-3, 3), st.floats(-3, 3))),
    st.tuples(st.just("sinh"), st.tuples(st.floats(0.1, 3))),
    st.tuples(st.just("exp_rbeta"), st.tuples(st.floats(0.1, 2.5), st.floats(-3, 3))),
    st.tuples(st.just("const"), st.just(())),
)


@settings(max_examples=200, deadline=None)
@given(parts=st.lists(st.tuples(st.floats(-1e6, 1e6).filter(lambda c: c != 0.0),
                                TERM_STRATEGY), min_size=1, max_size=4))
def test_descriptor_round_trip_bit_exact(parts):
    terms = tuple((c, name, tuple(params)) for c, (name, params) in parts)
    f = FunctionJet3(terms)
    again = parse_descriptor(f.descriptor())
    assert again.terms == f.terms


def test_descriptor_examples():
    f = 200.0 * make_family("power", [4.0 / 3.0]) - 1.0 * make_family("log")
    assert f.descriptor() == "200.0*power(1.3333333333333333) - 1.0*log()"
    assert parse_descriptor(f.descriptor()).terms == f.terms
    assert parse_descriptor("5.0").terms == ((5.0, "const", ()),)


def test_descriptor_errors_carry_offsets():
    with pytest.raises(DescriptorError, match="offset"):
        parse_descriptor("2.0*power(")
    with pytest.raises(DescriptorError, match="offset"):
        parse_descriptor("nope(1.0)")
    with pytest.raises(DescriptorError):
        parse_descriptor("")
    with pytest.raises(DescriptorError):
        parse_descriptor("1.0*exp_rbeta(-2.0,1.0)")


def test_constant_shift_leaves_derivatives_bit_identical():
    h = 2.0 * make_family("power", [1.5])
    shifted = h + const(17.25)
    r = np.geomspace(1.0, 90.0, 13)
    base = h.jet(r)
    moved = shifted.jet(r)
    for k in range(1, 4):
        assert np.array_equal(base[k], moved[k])


def test_eval_jet_wrapper_orders():
    f = make_family("power", [2.0])
    assert eval_jet(f, 3.0, order=0) == (9.0,)
    assert eval_jet(f, 3.0, order=1) == (9.0, 6.0)
    with pytest.raises(ValueError):
        eval_jet(f, 3.0, order=4)
