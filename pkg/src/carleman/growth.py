"""Growth symbols: c * r^p * (log r)^q * exp(sum of c_i r^{b_i} + d_j (log r)^{g_j}).

Sums of such terms form a small algebra closed under multiplication whose
asymptotic comparison at r -> +inf is decidable: exponents are compared
through the exact difference of the exp-polynomials (an object of the
same shape), so the verdict is always one of o / Theta / omega and never
"incomparable".

Grammar (whitespace allowed around '+'):

    SYMBOL ::= TERM ('+' TERM)*
    TERM   ::= NUMBER ('*' FACTOR)* | FACTOR ('*' FACTOR)*
    FACTOR ::= 'r^' NUMBER | '(log r)^' NUMBER | 'exp(' POLY ')'
    POLY   ::= ATOM ('+' ATOM)*
    ATOM   ::= NUMBER '*' ('r^' NUMBER | '(log r)^' NUMBER)

r-exponents inside exp must be positive and log-exponents must exceed 1;
negation is spelled as a negative coefficient.
"""

from __future__ import annotations

import functools
import math
import re
from dataclasses import dataclass

__all__ = [
    "AsymptoticSymbol",
    "GrammarError",
    "Term",
    "compare_growth",
    "const_growth",
    "exp_of",
    "growth_mul",
    "growth_pow",
    "is_integrable_at_infinity",
    "parse_growth",
    "render_growth",
]


class GrammarError(ValueError):
    """Syntax or range error in a growth expression, with byte offset."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


# exp atoms are ("r", coeff, beta) with beta > 0 or ("log", coeff, gamma)
# with gamma > 1, kept sorted r-first, larger power first
Atom = tuple[str, float, float]


def _normalize_atoms(atoms) -> tuple[Atom, ...]:
    merged: dict[tuple[str, float], float] = {}
    for kind, c, p in atoms:
        merged[(kind, p)] = merged.get((kind, p), 0.0) + c
    out = [(kind, c, p) for (kind, p), c in merged.items() if c != 0.0]
    out.sort(key=lambda a: (a[0] != "r", -a[2]))
    return tuple(out)


@dataclass(frozen=True)
class Term:
    coeff: float
    p: float = 0.0
    q: float = 0.0
    exp_atoms: tuple[Atom, ...] = ()


def _exp_cmp(a: tuple[Atom, ...], b: tuple[Atom, ...]) -> int:
    """Sign of (exp part of a) / (exp part of b) at infinity: +1 if the
    ratio blows up, -1 if it dies, 0 if the exponents cancel exactly."""
    diff = _normalize_atoms(list(a) + [(k, -c, p) for k, c, p in b])
    if not diff:
        return 0
    return 1 if diff[0][1] > 0 else -1


def _term_cmp(a: Term, b: Term) -> int:
    """Dominance: +1 if a grows strictly faster than b."""
    e = _exp_cmp(a.exp_atoms, b.exp_atoms)
    if e:
        return e
    if a.p != b.p:
        return 1 if a.p > b.p else -1
    if a.q != b.q:
        return 1 if a.q > b.q else -1
    return 0


@dataclass(frozen=True)
class AsymptoticSymbol:
    """Normalized sum of terms, dominant first.  The zero symbol has no
    terms."""

    terms: tuple[Term, ...] = ()

    def leading(self) -> Term | None:
        return self.terms[0] if self.terms else None

    def __str__(self) -> str:
        return render_growth(self)


def make_symbol(terms) -> AsymptoticSymbol:
    merged: dict[tuple, float] = {}
    for t in terms:
        atoms = _normalize_atoms(t.exp_atoms)
        key = (t.p, t.q, atoms)
        merged[key] = merged.get(key, 0.0) + t.coeff
    kept = [Term(c, p, q, atoms) for (p, q, atoms), c in merged.items() if c != 0.0]
    kept.sort(key=functools.cmp_to_key(_term_cmp), reverse=True)
    return AsymptoticSymbol(tuple(kept))


def const_growth(c: float) -> AsymptoticSymbol:
    return make_symbol([Term(float(c))])


# ---------------------------------------------------------------------------
# parser / renderer
# ---------------------------------------------------------------------------

_NUM = re.compile(r"[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str):
        raise GrammarError(message, self.pos)

    def ws(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def lit(self, s: str) -> bool:
        if self.text.startswith(s, self.pos):
            self.pos += len(s)
            return True
        return False

    def number(self) -> float:
        m = _NUM.match(self.text, self.pos)
        if not m:
            self.error("expected a number")
        self.pos = m.end()
        return float(m.group(0))

    def power_factor(self) -> tuple[str, float]:
        """One of r^P or (log r)^Q; caller has peeked."""
        if self.lit("r^"):
            return "r", self.number()
        if self.lit("(log r)^"):
            return "log", self.number()
        self.error("expected r^, (log r)^ or exp(")

    def exp_poly(self) -> tuple[Atom, ...]:
        atoms = []
        while True:
            self.ws()
            start = self.pos
            c = self.number()
            if not self.lit("*"):
                self.error("expected '*' after an exp-atom coefficient")
            kind, p = self.power_factor()
            if kind == "r" and p <= 0:
                self.pos = start
                self.error("exp atoms need a positive r-exponent")
            if kind == "log" and p <= 1:
                self.pos = start
                self.error("exp atoms need a log-exponent > 1")
            atoms.append((kind, c, p))
            self.ws()
            if not self.lit("+"):
                return tuple(atoms)

    def factor(self, term: dict):
        if self.lit("exp("):
            if term["exp"] is not None:
                self.error("duplicate exp factor")
            term["exp"] = self.exp_poly()
            self.ws()
            if not self.lit(")"):
                self.error("expected ')'")
            return
        kind, val = self.power_factor()
        slot = "p" if kind == "r" else "q"
        if term[slot] is not None:
            self.error(f"duplicate {'r' if kind == 'r' else '(log r)'} factor")
        term[slot] = val

    def term(self) -> Term:
        self.ws()
        term = {"p": None, "q": None, "exp": None}
        m = _NUM.match(self.text, self.pos)
        if m:
            self.pos = m.end()
            coeff = float(m.group(0))
        else:
            coeff = 1.0
            self.factor(term)
        while self.lit("*"):
            self.factor(term)
        return Term(coeff, term["p"] or 0.0, term["q"] or 0.0, term["exp"] or ())

    def parse(self) -> AsymptoticSymbol:
        terms = [self.term()]
        self.ws()
        while self.lit("+"):
            terms.append(self.term())
            self.ws()
        if self.pos != len(self.text):
            self.error("unparsed trailing input")
        return make_symbol(terms)


def parse_growth(text: str) -> AsymptoticSymbol:
    return _Parser(text).parse()


def _render_term(t: Term) -> str:
    parts = [repr(t.coeff)]
    if t.p != 0.0:
        parts.append(f"r^{t.p!r}")
    if t.q != 0.0:
        parts.append(f"(log r)^{t.q!r}")
    if t.exp_atoms:
        inner = " + ".join(
            f"{c!r}*r^{p!r}" if kind == "r" else f"{c!r}*(log r)^{p!r}"
            for kind, c, p in t.exp_atoms)
        parts.append(f"exp({inner})")
    return "*".join(parts)


def render_growth(s: AsymptoticSymbol) -> str:
    if not s.terms:
        return "0.0"
    return " + ".join(_render_term(t) for t in s.terms)


# ---------------------------------------------------------------------------
# comparison and algebra
# ---------------------------------------------------------------------------

def compare_growth(a: AsymptoticSymbol, b: AsymptoticSymbol) -> str:
    """"o" if a = o(b), "omega" if b = o(a), else "theta".  Total on this
    grammar: exact dominance ties are Theta by construction."""
    ta, tb = a.leading(), b.leading()
    if ta is None and tb is None:
        return "theta"
    if ta is None:
        return "o"
    if tb is None:
        return "omega"
    c = _term_cmp(ta, tb)
    return {1: "omega", -1: "o", 0: "theta"}[c]


def growth_mul(a: AsymptoticSymbol, b: AsymptoticSymbol) -> AsymptoticSymbol:
    out = []
    for x in a.terms:
        for y in b.terms:
            out.append(Term(x.coeff * y.coeff, x.p + y.p, x.q + y.q,
                            x.exp_atoms + y.exp_atoms))
    return make_symbol(out)


def growth_pow(a: AsymptoticSymbol, k: float) -> AsymptoticSymbol:
    """(c r^p (log r)^q e^E)^k for a single-term symbol with c > 0."""
    if len(a.terms) != 1:
        raise ValueError("powers are defined for single-term symbols only")
    t = a.terms[0]
    if t.coeff <= 0:
        raise ValueError("powers need a positive coefficient")
    atoms = tuple((kind, k * c, p) for kind, c, p in t.exp_atoms)
    return make_symbol([Term(t.coeff ** k, k * t.p, k * t.q, atoms)])


def exp_of(a: AsymptoticSymbol) -> AsymptoticSymbol:
    """exp of a polynomial-type symbol: terms r^p with p > 0 become
    r-atoms, (log r)^q with q > 1 become log-atoms, constants scale the
    coefficient.  Anything else has no exp in the grammar."""
    atoms = []
    coeff = 1.0
    for t in a.terms:
        if t.exp_atoms:
            raise ValueError("cannot exponentiate a symbol that already has exp factors")
        if t.p > 0 and t.q == 0:
            atoms.append(("r", t.coeff, t.p))
        elif t.p == 0 and t.q > 1:
            atoms.append(("log", t.coeff, t.q))
        elif t.p == 0 and t.q == 0:
            coeff *= math.exp(t.coeff)
        else:
            raise ValueError(f"exp of r^{t.p}*(log r)^{t.q} leaves the grammar")
    return make_symbol([Term(coeff, 0.0, 0.0, tuple(atoms))])


def is_integrable_at_infinity(a: AsymptoticSymbol) -> bool:
    """Whether integral^inf |f| dr converges, judged on the dominant term:
    a decaying exponential always wins, otherwise p < -1, with the p = -1
    boundary settled by q < -1."""
    t = a.leading()
    if t is None:
        return True
    if t.exp_atoms:
        return t.exp_atoms[0][1] < 0.0
    if t.p < -1.0:
        return True
    if t.p == -1.0:
        return t.q < -1.0
    return False
