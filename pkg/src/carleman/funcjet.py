"""Closed-form jets for the radial function families.

A :class:`FunctionJet3` is a finite linear combination of registered atoms.
Each atom supplies exact closed-form derivatives through order three, so
nothing downstream (curvature tables, weight bundles, quadrature) ever needs
to differentiate numerically.  The supported atoms are

======================  =========================================	=========
name                    meaning                                  	domain
======================  =========================================	=========
``const()``             1                                        	all r
``power(b)``            r**b                                     	r > 0
``log()``               log r                                    	r > 0
``loglog()``            log log r                                	r > e
``logpow(g)``           (log r)**g                               	r > e
``powlog(p, q)``        r**p * (log r)**q                        	r > e
``sinh(a)``             sinh(a r), a > 0                         	r > 0
``cosh(a)``             cosh(a r), a > 0                         	r > 0
``exp_rbeta(b, c)``     exp(c * r**b), b > 0                     	r > 0
``exp_logpow(g, c)``    exp(c * (log r)**g)                      	r > e
``quintic_step()``      C^2 transition 1 -> 0 across [1, 2]      	all r
``exp_step()``          C^inf transition 1 -> 0 across [1, 2]    	all r
======================  =========================================	=========

Descriptors give a canonical, round-trippable text form, e.g.
``200.0*power(1.3333333333333333) - 1.0*log()``.  Coefficients and
parameters are rendered with ``repr``, which round-trips floats bit for bit.

Warpings can become too large for direct evaluation (``exp(r**2)`` overflows
double precision near r = 26.6).  For positively scaled single-atom
combinations of ``power``, ``sinh``, ``cosh``, ``exp_rbeta`` and ``const``
the method :meth:`FunctionJet3.log_jet` returns the jet of ``log f`` in
closed form, stable at any radius.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, Union

import numpy as np

ArrayLike = Union[float, np.ndarray]
Jet = tuple  # 4-tuple (f, f', f'', f''') of scalars or arrays


class DomainError(ValueError):
    """Evaluation requested at or below an atom's domain minimum."""


class UnknownFamilyError(ValueError):
    """Atom name not present in the registry."""


class FamilyParameterError(ValueError):
    """Atom parameter outside its admissible range."""


class DescriptorError(ValueError):
    """Malformed descriptor string."""


# ---------------------------------------------------------------------------
# jet arithmetic on 4-tuples (order-3 Leibniz / Faa di Bruno)
# ---------------------------------------------------------------------------

def jet_mul(a: Jet, b: Jet) -> Jet:
    """Product jet: (fg), (fg)', (fg)'', (fg)'''."""
    a0, a1, a2, a3 = a
    b0, b1, b2, b3 = b
    return (
        a0 * b0,
        a1 * b0 + a0 * b1,
        a2 * b0 + 2.0 * a1 * b1 + a0 * b2,
        a3 * b0 + 3.0 * a2 * b1 + 3.0 * a1 * b2 + a0 * b3,
    )


def jet_reciprocal(g: Jet) -> Jet:
    """Jet of 1/g.  Caller guarantees g != 0."""
    g0, g1, g2, g3 = g
    inv = 1.0 / g0
    inv2 = inv * inv
    return (
        inv,
        -g1 * inv2,
        (2.0 * g1 * g1 - g0 * g2) * inv2 * inv,
        (-6.0 * g1 ** 3 + 6.0 * g0 * g1 * g2 - g0 * g0 * g3) * inv2 * inv2,
    )


def jet_exp(u: Jet) -> Jet:
    """Jet of exp(u) given the jet of u."""
    u0, u1, u2, u3 = u
    e = np.exp(u0)
    return (
        e,
        u1 * e,
        (u2 + u1 * u1) * e,
        (u3 + 3.0 * u1 * u2 + u1 ** 3) * e,
    )


def log_jet_from_jet(j: Jet) -> Jet:
    """Jet of log f from the jet of f.  Caller guarantees f > 0 and finite."""
    f0, f1, f2, f3 = j
    d1 = f1 / f0
    d2 = f2 / f0 - d1 * d1
    d3 = f3 / f0 - 3.0 * d1 * d2 - d1 ** 3
    return (np.log(f0), d1, d2, d3)


def central_difference(fn: Callable[[ArrayLike], ArrayLike], r: ArrayLike,
                       step: ArrayLike) -> ArrayLike:
    """Three-point central difference (fn(r+h) - fn(r-h)) / 2h."""
    return (fn(r + step) - fn(r - step)) / (2.0 * step)


# ---------------------------------------------------------------------------
# atom registry
# ---------------------------------------------------------------------------

_E = math.e


def _zeros_like(r: np.ndarray) -> np.ndarray:
    return np.zeros_like(r)


def _jet_const(r, params):
    z = _zeros_like(r)
    return (np.ones_like(r), z, z.copy(), z.copy())


def _jet_power(r, params):
    (b,) = params
    f = np.power(r, b)
    return (
        f,
        b * np.power(r, b - 1.0),
        b * (b - 1.0) * np.power(r, b - 2.0),
        b * (b - 1.0) * (b - 2.0) * np.power(r, b - 3.0),
    )


def _jet_log(r, params):
    return (np.log(r), 1.0 / r, -1.0 / r ** 2, 2.0 / r ** 3)


def _jet_loglog(r, params):
    L = np.log(r)
    return (
        np.log(L),
        1.0 / (r * L),
        -(L + 1.0) / (r * L) ** 2,
        (2.0 * L * L + 3.0 * L + 2.0) / (r ** 3 * L ** 3),
    )


def _jet_logpow(r, params):
    (g,) = params
    L = np.log(r)
    Lg = np.power(L, g)
    return (
        Lg,
        g * np.power(L, g - 1.0) / r,
        (g * (g - 1.0) * np.power(L, g - 2.0) - g * np.power(L, g - 1.0)) / r ** 2,
        (g * (g - 1.0) * (g - 2.0) * np.power(L, g - 3.0)
         - 3.0 * g * (g - 1.0) * np.power(L, g - 2.0)
         + 2.0 * g * np.power(L, g - 1.0)) / r ** 3,
    )


def _jet_powlog(r, params):
    p, q = params
    L = np.log(r)
    return (
        np.power(r, p) * np.power(L, q),
        np.power(r, p - 1.0) * np.power(L, q - 1.0) * (p * L + q),
        np.power(r, p - 2.0) * np.power(L, q - 2.0)
        * (p * (p - 1.0) * L * L + q * (2.0 * p - 1.0) * L + q * (q - 1.0)),
        np.power(r, p - 3.0) * np.power(L, q - 3.0)
        * (p * (p - 1.0) * (p - 2.0) * L ** 3
           + q * (3.0 * p * p - 6.0 * p + 2.0) * L * L
           + 3.0 * q * (q - 1.0) * (p - 1.0) * L
           + q * (q - 1.0) * (q - 2.0)),
    )


def _jet_sinh(r, params):
    (a,) = params
    s, c = np.sinh(a * r), np.cosh(a * r)
    return (s, a * c, a * a * s, a ** 3 * c)


def _jet_cosh(r, params):
    (a,) = params
    s, c = np.sinh(a * r), np.cosh(a * r)
    return (c, a * s, a * a * c, a ** 3 * s)


def _jet_exp_rbeta(r, params):
    b, c = params
    u = (
        c * np.power(r, b),
        c * b * np.power(r, b - 1.0),
        c * b * (b - 1.0) * np.power(r, b - 2.0),
        c * b * (b - 1.0) * (b - 2.0) * np.power(r, b - 3.0),
    )
    return jet_exp(u)


def _jet_exp_logpow(r, params):
    g, c = params
    base = _jet_logpow(r, (g,))
    return jet_exp(tuple(c * v for v in base))


# quintic smoothstep S(t) = 6t^5 - 15t^4 + 10t^3 (S(0)=0, S(1)=1, S', S''
# vanish at both ends), used one-sidedly by the cutoff and bump profiles.

def _smoothstep5(t):
    return (
        t ** 3 * (10.0 + t * (-15.0 + 6.0 * t)),
        30.0 * t ** 2 * (1.0 - t) ** 2,
        t * (60.0 + t * (-180.0 + 120.0 * t)),
        60.0 + t * (-360.0 + 360.0 * t),
    )


def _piecewise(mask, inner, outer):
    return np.where(mask, inner, outer)


def _jet_quintic_step(r, params):
    # 1 on (-inf, 1], quintic descent on [1, 2], 0 on [2, inf)
    t = r - 1.0
    inner = (t > 0.0) & (t < 1.0)
    ts = np.where(inner, t, 0.5)
    s0, s1, s2, s3 = _smoothstep5(ts)
    one = np.where(r <= 1.0, 1.0, 0.0)
    z = _zeros_like(r)
    return (
        _piecewise(inner, 1.0 - s0, one),
        _piecewise(inner, -s1, z),
        _piecewise(inner, -s2, z),
        _piecewise(inner, -s3, z),
    )


def _bump_exp_component(t):
    # jet of exp(-1/t) for t > 0
    u = (-1.0 / t, 1.0 / t ** 2, -2.0 / t ** 3, 6.0 / t ** 4)
    return jet_exp(u)


def _jet_exp_step(r, params):
    # B(2-r) / (B(2-r) + B(r-1)) with B(t) = exp(-1/t); exactly 1 below 1,
    # exactly 0 above 2, C^inf across the seams.
    inner = (r > 1.0) & (r < 2.0)
    rs = np.where(inner, r, 1.5)
    b1 = _bump_exp_component(rs - 1.0)
    b2r = _bump_exp_component(2.0 - rs)
    # chain rule for the reflected argument: odd derivatives flip sign
    b2 = (b2r[0], -b2r[1], b2r[2], -b2r[3])
    denom = tuple(x + y for x, y in zip(b1, b2))
    phi = jet_mul(b2, jet_reciprocal(denom))
    one = np.where(r <= 1.0, 1.0, 0.0)
    z = _zeros_like(r)
    return (
        _piecewise(inner, phi[0], one),
        _piecewise(inner, phi[1], z),
        _piecewise(inner, phi[2], z),
        _piecewise(inner, phi[3], z),
    )


def _check_arity(n):
    def check(params):
        if len(params) != n:
            raise FamilyParameterError(f"expected {n} parameter(s), got {len(params)}")
    return check


def _check_sinh(params):
    _check_arity(1)(params)
    if params[0] <= 0.0:
        raise FamilyParameterError(f"frequency must be positive, got {params[0]}")


def _check_exp_rbeta(params):
    _check_arity(2)(params)
    if params[0] <= 0.0:
        raise FamilyParameterError(f"exponent must be positive, got {params[0]}")


@dataclass(frozen=True)
class _Family:
    name: str
    nparams: int
    jet: Callable
    domain_min: Callable[[tuple], float]
    validate: Callable[[tuple], None]
    # closed-form jet of log(atom), or None when unavailable
    log_jet: Callable | None = None


def _log_jet_power(r, params):
    (b,) = params
    return (b * np.log(r), b / r, -b / r ** 2, 2.0 * b / r ** 3)


def _log_jet_sinh(r, params):
    (a,) = params
    x = a * r
    # log sinh x = x + log1p(-exp(-2x)) - log 2, stable for large x
    em = np.exp(-2.0 * x)
    d1 = a * (1.0 + 2.0 * em / (1.0 - em))
    d2 = -(a * a) * 4.0 * em / (1.0 - em) ** 2
    return (x + np.log1p(-em) - math.log(2.0), d1, d2, -2.0 * d1 * d2)


def _log_jet_cosh(r, params):
    (a,) = params
    x = a * r
    em = np.exp(-2.0 * x)
    th = (1.0 - em) / (1.0 + em)
    d1 = a * th
    d2 = (a * a) * 4.0 * em / (1.0 + em) ** 2
    return (x + np.log1p(em) - math.log(2.0), d1, d2, -2.0 * d1 * d2)


def _log_jet_exp_rbeta(r, params):
    b, c = params
    return (
        c * np.power(r, b),
        c * b * np.power(r, b - 1.0),
        c * b * (b - 1.0) * np.power(r, b - 2.0),
        c * b * (b - 1.0) * (b - 2.0) * np.power(r, b - 3.0),
    )


def _log_jet_const(r, params):
    z = _zeros_like(r)
    return (z, z.copy(), z.copy(), z.copy())


FAMILIES: dict[str, _Family] = {
    "const": _Family("const", 0, _jet_const, lambda p: -math.inf,
                     _check_arity(0), _log_jet_const),
    "power": _Family("power", 1, _jet_power, lambda p: 0.0,
                     _check_arity(1), _log_jet_power),
    "log": _Family("log", 0, _jet_log, lambda p: 0.0, _check_arity(0)),
    "loglog": _Family("loglog", 0, _jet_loglog, lambda p: _E, _check_arity(0)),
    "logpow": _Family("logpow", 1, _jet_logpow, lambda p: _E, _check_arity(1)),
    "powlog": _Family("powlog", 2, _jet_powlog, lambda p: _E, _check_arity(2)),
    "sinh": _Family("sinh", 1, _jet_sinh, lambda p: 0.0,
                    _check_sinh, _log_jet_sinh),
    "cosh": _Family("cosh", 1, _jet_cosh, lambda p: 0.0,
                    _check_sinh, _log_jet_cosh),
    "exp_rbeta": _Family("exp_rbeta", 2, _jet_exp_rbeta, lambda p: 0.0,
                         _check_exp_rbeta, _log_jet_exp_rbeta),
    "exp_logpow": _Family("exp_logpow", 2, _jet_exp_logpow, lambda p: _E,
                          _check_arity(2)),
    "quintic_step": _Family("quintic_step", 0, _jet_quintic_step,
                            lambda p: -math.inf, _check_arity(0)),
    "exp_step": _Family("exp_step", 0, _jet_exp_step,
                        lambda p: -math.inf, _check_arity(0)),
}


# ---------------------------------------------------------------------------
# FunctionJet3
# ---------------------------------------------------------------------------

Term = tuple  # (coeff: float, family: str, params: tuple[float, ...])


@dataclass(frozen=True)
class FunctionJet3:
    """Linear combination of registry atoms with order-3 closed-form jets."""

    terms: tuple[Term, ...]

    @property
    def domain_min(self) -> float:
        lo = -math.inf
        for _, name, params in self.terms:
            lo = max(lo, FAMILIES[name].domain_min(params))
        return lo

    # -- evaluation ---------------------------------------------------------

    def jet(self, r: ArrayLike, order: int = 3) -> tuple:
        """Value and derivatives (f, f', ..., f^(order)) at r."""
        if not 0 <= order <= 3:
            raise ValueError(f"order must be in 0..3, got {order}")
        rr = np.asarray(r, dtype=float)
        scalar = rr.ndim == 0
        rr = np.atleast_1d(rr)
        lo = self.domain_min
        if np.any(~(rr > lo)):
            bad = float(rr[~(rr > lo)][0])
            raise DomainError(f"evaluation at r={bad!r} outside domain r > {lo!r}")
        acc = [np.zeros_like(rr) for _ in range(4)]
        for coeff, name, params in self.terms:
            vals = FAMILIES[name].jet(rr, params)
            for k in range(4):
                acc[k] = acc[k] + coeff * vals[k]
        if scalar:
            return tuple(float(a[0]) for a in acc[: order + 1])
        return tuple(acc[: order + 1])

    def __call__(self, r: ArrayLike) -> ArrayLike:
        return self.jet(r, order=0)[0]

    def deriv(self, r: ArrayLike, k: int = 1) -> ArrayLike:
        return self.jet(r, order=k)[k]

    def log_jet(self, r: ArrayLike) -> tuple:
        """Jet of log(f).  Uses a closed form for positively scaled single
        atoms; otherwise falls back to the direct jet (which must be finite
        and positive)."""
        rr = np.asarray(r, dtype=float)
        scalar = rr.ndim == 0
        rr = np.atleast_1d(rr)
        if len(self.terms) == 1:
            coeff, name, params = self.terms[0]
            fam = FAMILIES[name]
            if fam.log_jet is not None and coeff > 0.0:
                lo = fam.domain_min(params)
                if np.any(~(rr > lo)):
                    raise DomainError(f"log jet requested at r <= {lo!r}")
                v = fam.log_jet(rr, params)
                out = (v[0] + math.log(coeff), v[1], v[2], v[3])
                if scalar:
                    return tuple(float(a if np.ndim(a) == 0 else a[0]) for a in out)
                return tuple(np.broadcast_to(a, rr.shape).astype(float) for a in out)
        with np.errstate(over="ignore", invalid="ignore"):
            j = self.jet(rr)
        if np.any(~np.isfinite(j[0])) or np.any(j[0] <= 0.0):
            raise DomainError("log jet needs a finite positive value; "
                              "use a single-atom warping for large radii")
        out = log_jet_from_jet(j)
        if scalar:
            return tuple(float(a[0]) for a in out)
        return out

    # -- algebra ------------------------------------------------------------

    def __add__(self, other: "FunctionJet3") -> "FunctionJet3":
        if not isinstance(other, FunctionJet3):
            return NotImplemented
        merged: list[list] = [list(t) for t in self.terms]
        for coeff, name, params in other.terms:
            for entry in merged:
                if entry[1] == name and entry[2] == params:
                    entry[0] += coeff
                    break
            else:
                merged.append([coeff, name, params])
        return FunctionJet3(tuple(
            (c, n, p) for c, n, p in merged if c != 0.0))

    def __sub__(self, other: "FunctionJet3") -> "FunctionJet3":
        return self + (-1.0) * other

    def __mul__(self, scalar: float) -> "FunctionJet3":
        if not isinstance(scalar, (int, float)):
            return NotImplemented
        s = float(scalar)
        if s == 0.0:
            return FunctionJet3(())
        return FunctionJet3(tuple((s * c, n, p) for c, n, p in self.terms))

    __rmul__ = __mul__

    def __neg__(self) -> "FunctionJet3":
        return (-1.0) * self

    # -- descriptors --------------------------------------------------------

    def descriptor(self) -> str:
        if not self.terms:
            return "0.0"
        parts: list[str] = []
        for i, (coeff, name, params) in enumerate(self.terms):
            mag = coeff if i == 0 else abs(coeff)
            if name == "const":
                body = repr(mag)
            else:
                args = ",".join(repr(p) for p in params)
                body = f"{mag!r}*{name}({args})"
            if i == 0:
                parts.append(body)
            else:
                parts.append(f" {'-' if coeff < 0 else '+'} {body}")
        return "".join(parts)


def make_family(name: str, params: Sequence[float] = ()) -> FunctionJet3:
    """Unit-coefficient atom from the registry."""
    if name not in FAMILIES:
        known = ", ".join(sorted(FAMILIES))
        raise UnknownFamilyError(f"unknown family {name!r}; registered: {known}")
    p = tuple(float(x) for x in params)
    FAMILIES[name].validate(p)
    return FunctionJet3(((1.0, name, p),))


def const(c: float) -> FunctionJet3:
    """Constant function c."""
    return float(c) * make_family("const")


def eval_jet(f: FunctionJet3, r: ArrayLike, order: int = 3) -> tuple:
    """Value and derivatives of f at r, through the requested order."""
    return f.jet(r, order=order)


# ---------------------------------------------------------------------------
# descriptor parsing
# ---------------------------------------------------------------------------

_NUM_RE = re.compile(r"[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?")
_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


def parse_descriptor(text: str) -> FunctionJet3:
    """Inverse of :meth:`FunctionJet3.descriptor` (bit-exact round trip)."""
    pos = 0
    terms: list[Term] = []

    def skip_ws():
        nonlocal pos
        while pos < len(text) and text[pos] in " \t":
            pos += 1

    def fail(msg: str):
        raise DescriptorError(f"{msg} at offset {pos}")

    def read_number() -> float:
        nonlocal pos
        m = _NUM_RE.match(text, pos)
        if not m:
            fail("expected a number")
        pos = m.end()
        return float(m.group(0))

    first = True
    while True:
        skip_ws()
        if pos >= len(text):
            if first:
                fail("empty descriptor")
            break
        sign = 1.0
        if not first:
            if text[pos] == "+":
                pos += 1
            elif text[pos] == "-":
                sign = -1.0
                pos += 1
            else:
                fail("expected '+' or '-' between terms")
            skip_ws()
        first = False
        # leading signed coefficient or bare atom
        coeff = 1.0
        have_coeff = False
        m = _NUM_RE.match(text, pos)
        if m:
            coeff = float(m.group(0))
            pos = m.end()
            have_coeff = True
            skip_ws()
            if pos < len(text) and text[pos] == "*":
                pos += 1
                skip_ws()
            else:
                terms.append((sign * coeff, "const", ()))
                continue
        name_m = _NAME_RE.match(text, pos)
        if not name_m:
            fail("expected an atom name")
        name = name_m.group(0)
        if name not in FAMILIES:
            fail(f"unknown family {name!r}")
        pos = name_m.end()
        if pos >= len(text) or text[pos] != "(":
            fail("expected '('")
        pos += 1
        params: list[float] = []
        skip_ws()
        if pos < len(text) and text[pos] == ")":
            pos += 1
        else:
            while True:
                skip_ws()
                params.append(read_number())
                skip_ws()
                if pos < len(text) and text[pos] == ",":
                    pos += 1
                    continue
                if pos < len(text) and text[pos] == ")":
                    pos += 1
                    break
                fail("expected ',' or ')'")
        ptuple = tuple(params)
        try:
            FAMILIES[name].validate(ptuple)
        except FamilyParameterError as exc:
            raise DescriptorError(f"{name}: {exc} at offset {pos}") from exc
        terms.append((sign * coeff if have_coeff else sign, name, ptuple))
    return FunctionJet3(tuple(terms))
