"""The ``carleman`` command line front end.

One subcommand per laboratory activity: ``weights`` and ``scan`` print
bundle tables and admissibility, ``verify`` runs the mode battery,
``extended`` the unbounded-support estimate, ``certify`` the full
per-case certificate, ``curvature`` and ``cutoff`` the geometric checks,
``catenoid`` and ``conformal`` the minimal-graph and conformal verdicts,
``growth`` a one-shot symbol comparison.

Configuration may come from a ``key = value`` file ([global] section
plus one section per subcommand); command line flags override it.  All
reports go through the deterministic emitters, so identical inputs give
byte-identical files.  Exit codes: 0 pass, 1 verdict failure (the
failing stage is named on stderr), 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import configparser
import os
import sys
import time
from pathlib import Path

import numpy as np

from .applications import (FitWindowError, FluxRangeError,
                           TailDivergenceError, catenoid_decay_report,
                           conformal_necessity, radial_graph_q)
from .cases import CASE_IDS, ParameterRangeError, make_case
from .funcjet import (DescriptorError, DomainError, FamilyParameterError,
                      UnknownFamilyError, make_family, parse_descriptor)
from .geometry import (CutoffProfileError, WarpedCylinder, check_sigma_growth,
                       curvature_at, cutoff_ladder, ricci_quadratic_check,
                       sigma_from_curvature)
from .growth import (GrammarError, compare_growth, exp_of,
                     is_integrable_at_infinity, parse_growth, render_growth)
from .regimes import battery_stage, corollary_certificate
from .reporting import render_json, write_csv, write_json
from .verifier import PreconditionError, TailFunction, verify_extended
from .weights import admissibility_scan

__all__ = ["main"]


class _UsageError(ValueError):
    """Bad flag/config combinations caught before any computation."""


# ---------------------------------------------------------------------------
# option registry (one table drives argparse, config validation, help)
# ---------------------------------------------------------------------------

_COMMON: list[tuple[str, dict]] = [
    ("--out", dict(metavar="DIR", help="directory for reports; without it "
                   "the JSON goes to stdout and CSV artifacts are skipped")),
    ("--config", dict(metavar="FILE", help="key = value file with [global] "
                      "and per-command sections; flags override it")),
    ("--seed", dict(type=int, default=0, help="seed echoed into reports")),
    ("--quad-tol", dict(type=float, help="quadrature / residual tolerance "
                        "override")),
    ("--jobs", dict(type=int, help="parallel workers for battery cells "
                    "(default: available cores)")),
    ("--dry-run", dict(action="store_true", help="validate, print the "
                       "resolved plan, compute nothing")),
    ("--timing", dict(action="store_true", help="report wall time on "
                      "stderr (never inside reports)")),
]

_CASE: list[tuple[str, dict]] = [
    ("--case", dict(required=True, choices=CASE_IDS, help="catalogue case")),
    ("--beta", dict(type=float, help="warp/weight exponent (all cases "
                    "except Eu-b)")),
    ("--gamma", dict(type=float, help="log-power exponent (Eu-b only)")),
    ("--n", dict(type=int, default=3, help="ambient dimension")),
    ("--c1", dict(type=float, default=1.0, help="bound on q1 growth")),
    ("--c2", dict(type=float, default=1.0, help="bound on q2 growth")),
]

_SPECS: dict[str, list[tuple[str, dict]]] = {
    "weights": _CASE + [
        ("--tau", dict(type=float, help="weight parameter (default: top "
                       "of the case ladder)")),
        ("--window", dict(help="r window LO,HI (default: case scan window)")),
        ("--points", dict(type=int, default=33, help="grid size")),
    ],
    "scan": _CASE + [
        ("--tau", dict(type=float, help="weight parameter (default: top "
                       "of the case ladder)")),
        ("--window", dict(help="r window LO,HI (default: case scan window)")),
        ("--points", dict(type=int, default=129, help="grid size")),
    ],
    "verify": _CASE + [
        ("--tau-ladder", dict(help="comma list of tau rungs (default: "
                              "case ladder)")),
    ],
    "extended": _CASE + [
        ("--tau", dict(type=float, help="weight parameter (default: bottom "
                       "of the case ladder)")),
        ("--lambda-bound", dict(type=float, default=30.0,
                                help="constant in front of the right side")),
        ("--tail-coeff", dict(type=float, default=1.0,
                              help="c in the tail envelope e^{-c r^p}")),
        ("--tail-power", dict(type=float, default=2.0,
                              help="p in the tail envelope e^{-c r^p}")),
        ("--ramp", dict(help="A0,A1 ramp interval (default: admissible "
                        "base and its double)")),
        ("--radii", dict(help="comma list of truncation radii (default: "
                         "4, 8, 16 times the admissible base)")),
    ],
    "certify": _CASE + [
        ("--tau0", dict(type=float, help="base rung; the ladder becomes "
                        "tau0, 2 tau0, 4 tau0")),
        ("--tau-ladder", dict(help="explicit comma list of rungs "
                              "(overrides --tau0)")),
        ("--r-max", dict(type=float, default=1e5, help="scan horizon")),
    ],
    "curvature": [
        ("--sigma", dict(help="warping descriptor, e.g. '1.0*sinh(1.0)'")),
        ("--B", dict(type=float, help="model warping with both sectional "
                     "curvatures B <= 0 (instead of --sigma)")),
        ("--n", dict(type=int, default=3, help="ambient dimension")),
        ("--section-curvature", dict(type=float, default=1.0,
                                     help="constant curvature of N")),
        ("--radii", dict(help="comma list of radii (default: geometric "
                         "grid on [0.5, 50])")),
        ("--r-max", dict(type=float, default=1024.0,
                         help="horizon for the growth scans")),
    ],
    "cutoff": [
        ("--sigma", dict(default="1.0*power(1.0)", help="warping "
                         "descriptor")),
        ("--n", dict(type=int, default=3, help="ambient dimension")),
        ("--radii", dict(default="10,100,1000", help="comma list of "
                         "cutoff scales R")),
    ],
    "catenoid": [
        ("--n", dict(type=int, default=3, help="ambient dimension")),
        ("--r-end", dict(type=float, default=14.0, help="sampled range "
                         "end (neck sits at r = 1)")),
    ],
    "conformal": [
        ("--n", dict(type=int, default=3, help="ambient dimension")),
        ("--alpha", dict(required=True, help="curvature exponent as a "
                         "growth expression, a single c*r^p with p > 1")),
        ("--envelope", dict(required=True, help="conformal-factor decay "
                            "envelope, e.g. 'exp(-0.25*r^2.0)'")),
        ("--tau-ladder", dict(default="1,2,4,8,16", help="comma list of "
                              "exponential-decay rungs")),
    ],
    "growth": [
        ("--expr", dict(required=True, help="growth expression to parse")),
        ("--compare", dict(help="second expression to rank against")),
    ],
}


def _dest(flag: str) -> str:
    return flag.lstrip("-").replace("-", "_")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="carleman",
        description="verification laboratory for weighted Carleman "
                    "inequalities on warped cylindrical ends")
    subs = parser.add_subparsers(dest="command", required=True)
    for cmd, spec in _SPECS.items():
        sub = subs.add_parser(cmd)
        for flag, kwargs in spec + _COMMON:
            sub.add_argument(flag, **kwargs)
    return parser


# ---------------------------------------------------------------------------
# configuration file
# ---------------------------------------------------------------------------

_TRUE = ("1", "true", "yes", "on")
_FALSE = ("0", "false", "no", "off")


def _config_args(cmd: str, path: str) -> list[str]:
    """Translate the [global] and [cmd] sections into argv tokens that go
    in front of the real flags, so the command line wins ties."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    cp.optionxform = str
    read = cp.read(path)
    if not read:
        raise _UsageError(f"config file not found: {path}")
    flags = {_dest(flag): (flag, kwargs)
             for flag, kwargs in _SPECS[cmd] + _COMMON}
    common = {_dest(flag) for flag, _ in _COMMON}
    out: list[str] = []
    for section in ("global", cmd):
        if not cp.has_section(section):
            continue
        for raw, value in cp.items(section):
            key = raw.replace("-", "_")
            if key not in flags or (section == "global" and key not in common):
                raise _UsageError(
                    f"unknown config key {raw!r} in [{section}]")
            if key == "config":
                raise _UsageError("config files cannot nest")
            flag, kwargs = flags[key]
            if kwargs.get("action") == "store_true":
                low = value.strip().lower()
                if low in _TRUE:
                    out.append(flag)
                elif low not in _FALSE:
                    raise _UsageError(
                        f"config key {key!r} wants true/false, got {value!r}")
            else:
                out.extend([flag, value.strip()])
    return out


def _find_config(tail: list[str]) -> str | None:
    for i, tok in enumerate(tail):
        if tok == "--config":
            if i + 1 >= len(tail):
                raise _UsageError("--config needs a file argument")
            return tail[i + 1]
        if tok.startswith("--config="):
            return tok.split("=", 1)[1]
    return None


# ---------------------------------------------------------------------------
# emission
# ---------------------------------------------------------------------------

class _Sink:
    def __init__(self, out: str | None):
        self.out = Path(out) if out else None

    def json(self, name: str, doc: dict) -> None:
        if self.out is None:
            sys.stdout.write(render_json(doc))
            return
        self.out.mkdir(parents=True, exist_ok=True)
        print(write_json(self.out / name, doc))

    def csv(self, name: str, header, rows) -> None:
        if self.out is None:
            return
        self.out.mkdir(parents=True, exist_ok=True)
        print(write_csv(self.out / name, header, rows))


def _doc(cmd: str, params: dict, args, payload: dict) -> dict:
    doc = {"command": cmd, "params": params, "seed": args.seed}
    doc.update(payload)
    return doc


def _dry(cmd: str, params: dict, args, artifacts: list[str]) -> int:
    plan = {"command": cmd, "params": params, "seed": args.seed,
            "artifacts": artifacts,
            "out": str(args.out) if args.out else None,
            "dry_run": True}
    sys.stdout.write(render_json(plan))
    return 0


def _fail(stage: str, detail: str = "") -> int:
    msg = f"FAIL {stage}" + (f": {detail}" if detail else "")
    print(msg, file=sys.stderr)
    return 1


# ---------------------------------------------------------------------------
# shared resolution helpers
# ---------------------------------------------------------------------------

def _floats(text: str, what: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(p) for p in text.split(",") if p.strip())
    except ValueError:
        raise _UsageError(f"{what} wants a comma list of numbers, "
                          f"got {text!r}") from None
    if not vals:
        raise _UsageError(f"{what} is empty")
    return vals

def _pair(text: str, what: str) -> tuple[float, float]:
    vals = _floats(text, what)
    if len(vals) != 2 or vals[1] <= vals[0]:
        raise _UsageError(f"{what} wants LO,HI with LO < HI, got {text!r}")
    return vals


def _resolve_case(args):
    case = make_case(args.case, n=args.n, C1=args.c1, C2=args.c2,
                     beta=args.beta, gamma=args.gamma)
    params = {"case": case.case_id, **case.params, "n": case.n,
              "C1": args.c1, "C2": args.c2}
    return case, params


def _jobs(args) -> int:
    return args.jobs if args.jobs is not None else (os.cpu_count() or 1)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

_TABLE_COLUMNS = ("r", "F", "Fp", "Fpp", "A", "Ap", "k2L", "k2R",
                  "two_min", "k2", "k2p", "k1max")


def _cmd_weights(args, sink: _Sink) -> int:
    case, params = _resolve_case(args)
    tau = args.tau if args.tau is not None else max(case.default_tau_ladder)
    lo, hi = _pair(args.window, "--window") if args.window \
        else case.scan_window
    params.update({"tau": tau, "window": [lo, hi], "points": args.points})
    if args.dry_run:
        return _dry("weights", params, args, ["weights.json", "weights.csv"])
    table = case.weights_at(tau).table(np.geomspace(lo, hi, args.points))
    rows = list(zip(*(table[c].tolist() for c in _TABLE_COLUMNS)))
    sink.json("weights.json", _doc("weights", params, args,
                                   {"columns": list(_TABLE_COLUMNS),
                                    "rows": [list(r) for r in rows]}))
    sink.csv("weights.csv", _TABLE_COLUMNS, rows)
    return 0


def _cmd_scan(args, sink: _Sink) -> int:
    case, params = _resolve_case(args)
    tau = args.tau if args.tau is not None else max(case.default_tau_ladder)
    lo, hi = _pair(args.window, "--window") if args.window \
        else case.scan_window
    params.update({"tau": tau, "window": [lo, hi], "points": args.points})
    if args.dry_run:
        return _dry("scan", params, args, ["scan.json", "scan.csv"])
    rep = admissibility_scan(case.weights_at(tau), lo, hi, args.points)
    sink.json("scan.json", _doc("scan", params, args, {
        "first_admissible_r": rep.first_admissible_r,
        "min_margin_k2": rep.min_margin_k2,
        "min_margin_k1": rep.min_margin_k1}))
    sink.csv("scan.csv", ("r", "k2L", "k2R", "two_min", "k2", "k1max"),
             rep.rows)
    if rep.first_admissible_r is None:
        return _fail("admissibility-scan",
                     f"no admissible suffix in [{lo!r}, {hi!r}]")
    return 0


def _cmd_verify(args, sink: _Sink) -> int:
    case, params = _resolve_case(args)
    ladder = _floats(args.tau_ladder, "--tau-ladder") if args.tau_ladder \
        else case.default_tau_ladder
    quad_tol = args.quad_tol if args.quad_tol is not None else 1e-9
    params.update({"tau_ladder": list(ladder), "quad_tol": quad_tol})
    if args.dry_run:
        return _dry("verify", params, args, ["battery.json"])
    try:
        stage = battery_stage(case, ladder, quad_tol=quad_tol,
                              jobs=_jobs(args))
    except ValueError as e:
        if "admissible suffix" not in str(e):
            raise
        return _fail("admissibility-scan", str(e))
    sink.json("battery.json", _doc("verify", params, args,
                                   {"stage": stage.as_dict()}))
    if not stage.verdict:
        first = stage.details.get("first_failure", {})
        return _fail("mode-battery", str(first.get("reason", "")))
    return 0


def _cmd_extended(args, sink: _Sink) -> int:
    case, params = _resolve_case(args)
    tau = args.tau if args.tau is not None else min(case.default_tau_ladder)
    quad_tol = args.quad_tol if args.quad_tol is not None else 1e-9
    w = case.weights_at(tau)
    if args.ramp and args.radii:
        base = None
    else:
        scan = admissibility_scan(w, case.scan_window[0], 1e5)
        if scan.first_admissible_r is None:
            return _fail("admissibility-scan",
                         f"no admissible suffix at tau = {tau!r}")
        base = scan.first_admissible_r
    ramp = _pair(args.ramp, "--ramp") if args.ramp else (base, 2.0 * base)
    radii = _floats(args.radii, "--radii") if args.radii \
        else tuple(k * base for k in (4.0, 8.0, 16.0))
    c, p = args.tail_coeff, args.tail_power
    if c <= 0.0 or p <= 0.0:
        raise _UsageError("tail envelope needs positive coeff and power")
    params.update({"tau": tau, "lambda_bound": args.lambda_bound,
                   "tail_coeff": c, "tail_power": p, "ramp": list(ramp),
                   "radii": list(radii), "quad_tol": quad_tol})
    if args.dry_run:
        return _dry("extended", params, args,
                    ["extended.json", "extended.csv"])
    tail = TailFunction(envelope=make_family("exp_rbeta", (p, -c)),
                        symbol=parse_growth(f"exp({-c}*r^{p})"), ramp=ramp)
    rep = verify_extended(case.cyl, w, args.lambda_bound, tail, radii,
                          weight_symbol=exp_of(case.h_symbol_of(tau)),
                          sigma_symbol=case.sigma_symbol,
                          k2_symbol=case.k2_symbol_of(tau), tol=quad_tol)
    sink.json("extended.json", _doc("extended", params, args, {
        "lambda_min_estimate": rep.lambda_min_estimate,
        "stabilized": rep.stabilized,
        "verdict": "pass" if rep.verdict else "fail",
        "shift": rep.shift,
        "rows": [list(row) for row in rep.rows]}))
    sink.csv("extended.csv",
             ("R", "lhs", "rhs", "ratio", "margin", "quad_error"), rep.rows)
    if not rep.verdict:
        return _fail("extended-estimate",
                     f"margin negative at Lambda = {args.lambda_bound!r}")
    return 0


def _cmd_certify(args, sink: _Sink) -> int:
    if args.tau_ladder:
        ladder = _floats(args.tau_ladder, "--tau-ladder")
    elif args.tau0 is not None:
        ladder = (args.tau0, 2.0 * args.tau0, 4.0 * args.tau0)
    else:
        ladder = None
    quad_tol = args.quad_tol if args.quad_tol is not None else 1e-9
    case_params = {} if args.beta is None else {"beta": args.beta}
    if args.gamma is not None:
        case_params["gamma"] = args.gamma
    cert = None
    params = {"case": args.case, **case_params, "n": args.n,
              "C1": args.c1, "C2": args.c2,
              "tau_ladder": list(ladder) if ladder else None,
              "r_max": args.r_max, "quad_tol": quad_tol}
    if args.dry_run:
        make_case(args.case, n=args.n, C1=args.c1, C2=args.c2,
                  beta=args.beta, gamma=args.gamma)
        return _dry("certify", params, args, ["certificate.json"])
    cert = corollary_certificate(args.case, case_params, n=args.n,
                                 C1=args.c1, C2=args.c2, tau_ladder=ladder,
                                 r_max=args.r_max, quad_tol=quad_tol,
                                 jobs=_jobs(args))
    sink.json("certificate.json", _doc("certify", params, args,
                                       {"certificate": cert.as_dict()}))
    if not cert.verdict:
        return _fail(cert.failing_stage() or "certificate")
    return 0


def _cmd_curvature(args, sink: _Sink) -> int:
    if (args.B is None) == (args.sigma is None):
        raise _UsageError("give exactly one of --sigma or --B")
    if args.B is not None:
        sigma = sigma_from_curvature(args.B)
        desc = sigma.descriptor()
    else:
        sigma = parse_descriptor(args.sigma)
        desc = args.sigma
    radii = _floats(args.radii, "--radii") if args.radii \
        else tuple(np.geomspace(0.5, 50.0, 20).tolist())
    params = {"sigma": desc, "B": args.B, "n": args.n,
              "section_curvature": args.section_curvature,
              "radii": list(radii), "r_max": args.r_max}
    if args.dry_run:
        return _dry("curvature", params, args,
                    ["curvature.json", "curvature.csv"])
    cyl = WarpedCylinder(n=args.n, sigma=sigma,
                         section_curvature=args.section_curvature)
    rows = []
    for r in radii:
        d = curvature_at(cyl, float(r))
        rows.append((d.r, d.sect_radial, d.sect_tangential,
                     d.ricci_radial, d.ricci_tangential))
    payload: dict = {"rows": [list(r) for r in rows]}
    if args.B is not None:
        payload["max_abs_sectional_error"] = max(
            max(abs(row[1] - args.B), abs(row[2] - args.B)) for row in rows)
    growth = check_sigma_growth(cyl, args.r_max)
    ricci = ricci_quadratic_check(cyl, args.r_max)
    payload["kappa_estimate"] = growth.estimate
    payload["kappa_stabilized"] = growth.verdict
    payload["ricci_C_estimate"] = ricci.estimate
    payload["ricci_stabilized"] = ricci.verdict
    sink.json("curvature.json", _doc("curvature", params, args, payload))
    sink.csv("curvature.csv", ("r", "sect_radial", "sect_tangential",
                               "ricci_radial", "ricci_tangential"), rows)
    if not (growth.verdict and ricci.verdict):
        return _fail("growth-stabilization",
                     "sigma or Ricci bound kept climbing at the horizon")
    return 0


def _cmd_cutoff(args, sink: _Sink) -> int:
    sigma = parse_descriptor(args.sigma)
    radii = _floats(args.radii, "--radii")
    params = {"sigma": args.sigma, "n": args.n, "radii": list(radii)}
    if args.dry_run:
        return _dry("cutoff", params, args, ["cutoff.json", "cutoff.csv"])
    cyl = WarpedCylinder(n=args.n, sigma=sigma)
    reports, fitted, bounded = cutoff_ladder(cyl, radii,
                                             make_family("quintic_step"))
    rows = [(rep.R, rep.sup_grad_times_R, rep.sup_laplacian)
            for rep in reports]
    sink.json("cutoff.json", _doc("cutoff", params, args, {
        "rungs": [{"R": R, "sup_grad_times_R": g, "sup_laplacian": s}
                  for R, g, s in rows],
        "fitted_bound": fitted,
        "bounded": bounded}))
    sink.csv("cutoff.csv", ("R", "sup_grad_times_R", "sup_laplacian"), rows)
    if not bounded:
        return _fail("cutoff-bound",
                     "sup |laplacian| keeps growing along the ladder")
    return 0


def _cmd_catenoid(args, sink: _Sink) -> int:
    if args.n < 2:
        raise _UsageError("n must be >= 2")
    tol = args.quad_tol if args.quad_tol is not None else 1e-10
    params = {"n": args.n, "r_end": args.r_end, "tol": tol}
    if args.dry_run:
        return _dry("catenoid", params, args,
                    ["catenoid.json", "profile.csv"])
    try:
        rep = catenoid_decay_report(args.n, args.r_end, tol)
    except ValueError as e:
        if isinstance(e, (FitWindowError, FluxRangeError,
                          TailDivergenceError)):
            raise
        return _fail("profile-residuals", str(e))
    gap_ok = rep.relative_gap <= 0.02
    sink.json("catenoid.json", _doc("catenoid", params, args, {
        "report": rep.as_dict(), "gap_ok": gap_ok}))
    qs = radial_graph_q(rep.profile)
    rows = [(r, u, up, tail, q)
            for (r, u, up), tail, (_, q) in zip(rep.profile.samples,
                                                rep.profile.tails, qs)]
    sink.csv("profile.csv", ("r", "u", "u_prime", "H_minus_u", "q"), rows)
    if not gap_ok:
        return _fail("decay-fit",
                     f"fitted rate {rep.fitted_rate!r} is more than 2% "
                     f"from {rep.expected_rate!r}")
    return 0


def _cmd_conformal(args, sink: _Sink) -> int:
    alpha = parse_growth(args.alpha)
    term = alpha.leading()
    if (term is None or len(alpha.terms) != 1 or term.exp_atoms
            or term.q != 0.0 or term.coeff <= 0.0 or term.p <= 1.0):
        raise _UsageError("--alpha must be a single positive power c*r^p "
                          "with p > 1")
    envelope = parse_growth(args.envelope)
    ladder = _floats(args.tau_ladder, "--tau-ladder")
    params = {"n": args.n, "alpha": render_growth(alpha),
              "envelope": render_growth(envelope),
              "tau_ladder": list(ladder)}
    if args.dry_run:
        return _dry("conformal", params, args, ["conformal.json"])
    verdict = conformal_necessity(args.n,
                                  term.coeff * make_family("power", (term.p,)),
                                  alpha, envelope, ladder)
    sink.json("conformal.json", _doc("conformal", params, args,
                                     {"result": verdict.as_dict()}))
    return 0


def _cmd_growth(args, sink: _Sink) -> int:
    sym = parse_growth(args.expr)
    params = {"expr": args.expr, "compare": args.compare}
    if args.dry_run:
        return _dry("growth", params, args, ["growth.json"])
    payload: dict = {"normalized": render_growth(sym),
                     "integrable_at_infinity": is_integrable_at_infinity(sym)}
    if args.compare:
        other = parse_growth(args.compare)
        payload["compare"] = {"normalized": render_growth(other),
                              "relation": compare_growth(sym, other)}
    sink.json("growth.json", _doc("growth", params, args, payload))
    return 0


_HANDLERS = {
    "weights": _cmd_weights,
    "scan": _cmd_scan,
    "verify": _cmd_verify,
    "extended": _cmd_extended,
    "certify": _cmd_certify,
    "curvature": _cmd_curvature,
    "cutoff": _cmd_cutoff,
    "catenoid": _cmd_catenoid,
    "conformal": _cmd_conformal,
    "growth": _cmd_growth,
}

_USAGE_ERRORS = (_UsageError, ParameterRangeError, DescriptorError,
                 GrammarError, PreconditionError, CutoffProfileError,
                 DomainError, FamilyParameterError, UnknownFamilyError,
                 FitWindowError, FluxRangeError, TailDivergenceError)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    cmd = next((tok for tok in argv if not tok.startswith("-")), None)
    try:
        if cmd in _SPECS:
            config = _find_config(argv)
            if config:
                tail = list(argv)
                tail.remove(cmd)
                argv = [cmd] + _config_args(cmd, config) + tail
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code else 0
    except _UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2

    t0 = time.perf_counter()
    try:
        code = _HANDLERS[args.command](args, _Sink(args.out))
    except _USAGE_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        redirect = getattr(e, "redirect", None)
        if redirect:
            print(f"hint: case {redirect} covers this parameter",
                  file=sys.stderr)
        return 2
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    if args.timing:
        ms = (time.perf_counter() - t0) * 1e3
        print(f"wall time: {ms:.1f} ms", file=sys.stderr)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
