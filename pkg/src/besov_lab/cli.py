"""Command-line entry point: ``besov-lab <subcommand> [flags]``.

Exit status is 0 when every quantitative check passes, 1 when a check fails
(outputs are still written) and 2 on a usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from fractions import Fraction

from . import experiments as ex
from .errors import BesovLabError, QuadratureError, SolverBlowUpError
from .flows import ns_damped_wave
from .lacunary import DEFAULT_J, build_profile, lacunary_frequency, profile_descriptor, profile_from_descriptor
from .littlewood_paley import BesovIndex, besov_block_norms, besov_norm_shear, build_partition, dyadic_block, lp_norm
from .pde_solvers import (
    SolverConfig2D,
    ns2d_solve,
    shear_sampler,
    solve_advection_diffusion_1d,
    taylor_green_sampler,
    validate_solver,
    write_field_csv,
    write_spectral_csv,
)
from .spectral_core import TrigPolynomial

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
ADMISSIBLE_P = "1, 2, inf (other rationals >= 1 via --p-num/--p-den)"
PARTITION_TOL = 1e-12
BLOCK_TOL = 1e-12
AD1D_TOL = 1e-12
RESIDUAL_TOL = 1e-10
SOLVER_TOL = 1e-6
SOLVER_ORDER_RATIO = 12.0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _p_value(text: str) -> float:
    t = text.strip().lower()
    if t in ("inf", "infinity", "∞"):
        return math.inf
    if t in ("1", "2"):
        return float(t)
    raise argparse.ArgumentTypeError(f"p={text!r} is not admissible; choose one of {ADMISSIBLE_P}")


def _r_value(text: str) -> float:
    t = text.strip().lower()
    if t in ("inf", "infinity", "∞"):
        return math.inf
    try:
        r = float(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"r must be a number >= 1 or inf, got {text!r}") from None
    if not r >= 1:
        raise argparse.ArgumentTypeError(f"r must be >= 1, got {text!r}")
    return r


def _s_value(text: str):
    if text.replace(" ", "") == "d/p+1+0.1":
        return "d/p+1+0.1"
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"s must be a number or 'd/p+1+0.1', got {text!r}") from None


def _n_range(text: str) -> list[int]:
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            lo, hi = int(a), int(b)
        else:
            lo = hi = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--n takes an integer or a range a..b, got {text!r}") from None
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return list(range(lo, hi + 1))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=".", help="output directory (BESOV_LAB_OUT overrides; default: .)")
    common.add_argument("--format", choices=("csv", "json"), default="csv", help="output format (default: csv)")
    common.add_argument("-v", "--verbose", action="store_true", help="print one line per record")

    norm = argparse.ArgumentParser(add_help=False)
    norm.add_argument("--p", type=_p_value, default=2.0, help=f"integrability: {ADMISSIBLE_P} (default: 2)")
    norm.add_argument("--p-num", type=int, help="numerator of a rational p (with --p-den)")
    norm.add_argument("--p-den", type=int, help="denominator of a rational p (with --p-num)")

    parser = _Parser(prog="besov-lab", description="Besov norms and lacunary shear experiments on the torus.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    pc = sub.add_parser("partition-check", parents=[common], help="partition-of-unity self-test")
    pc.add_argument("--jmax", type=int, default=20, help="check integers |k| <= (4/3)·2^jmax (default: 20)")

    for name, text in (("besov", "Besov norm of a profile's shear data"),
                       ("profile", "profile coefficients and block-diagonality check")):
        sp = sub.add_parser(name, parents=[common, norm] if name == "besov" else [common], help=text)
        sp.add_argument("--profile", help='JSON descriptor or path, e.g. \'{"s": 2, "J": 16, "rule": "uniform"}\'')
        sp.add_argument("--s", type=float, default=2.0, help="profile regularity when --profile is absent (default: 2)")
        sp.add_argument("--J", type=int, default=DEFAULT_J, help=f"truncation index (default: {DEFAULT_J})")
        sp.add_argument("--rule", default="uniform", help="uniform | jsq (default: uniform)")
        sp.add_argument("--d", type=int, default=2, help="dimension (default: 2)")
        if name == "besov":
            sp.add_argument("--norm-s", type=float, help="regularity of the norm (default: profile s)")
            sp.add_argument("--r", type=_r_value, default=math.inf, help="summability (default: inf)")

    for name in ("thm1", "thm2", "thm3", "thm4"):
        sp = sub.add_parser(name, parents=[common, norm], help=f"{name} gap experiment")
        sp.add_argument("--s", type=_s_value, default=2.0, help="regularity, or 'd/p+1+0.1' (default: 2)")
        sp.add_argument("--d", type=int, default=2, help="dimension (default: 2)")
        sp.add_argument("--n", type=_n_range, default=list(range(6, 13)), help="index or range a..b (default: 6..12)")
        sp.add_argument("--J", type=int, default=DEFAULT_J, help=f"truncation index (default: {DEFAULT_J})")
        sp.add_argument("--no-cross-check", action="store_true", help="skip the sampled DFT path")
        if name == "thm2":
            sp.add_argument("--r", type=_r_value, default=1.0, help="summability, finite (default: 1)")
            sp.add_argument("--alpha", type=float, default=0.5, help="Hölder exponent in (0, 1) (default: 0.5)")
        if name in ("thm3", "thm4"):
            sp.add_argument("--strict", action="store_true", help="enforce s > 1 + d/p")

    ad = sub.add_parser("solve-ad1d", parents=[common], help="advection-diffusion oracle vs the damped wave")
    ad.add_argument("--profile", help="JSON descriptor or path")
    ad.add_argument("--s", type=float, default=2.0, help="profile regularity (default: 2)")
    ad.add_argument("--J", type=int, default=DEFAULT_J, help=f"truncation index (default: {DEFAULT_J})")
    ad.add_argument("--eps", type=float, default=0.01, help="viscosity (default: 0.01)")
    ad.add_argument("--T", type=float, default=0.1, help="final time (default: 0.1)")

    ns = sub.add_parser("solve-ns2d", parents=[common], help="2-D pseudo-spectral Navier-Stokes run")
    ns.add_argument("--config", help="solver config JSON text or path")
    ns.add_argument("--initial", choices=("shear", "taylor-green"), default="taylor-green",
                    help="initial velocity (default: taylor-green)")
    ns.add_argument("--profile", help="shear profile descriptor (default: s=1, J=4)")
    ns.add_argument("--snapshot", choices=("spectral", "field"), default="spectral",
                    help="snapshot layout (default: spectral)")

    va = sub.add_parser("validate", parents=[common], help="exact-solution certificates and solver validation")
    va.add_argument("--config", help="solver config JSON text or path (default: N=128, dt=1e-3, eps=0.01, T=0.1)")
    va.add_argument("--skip-solver", action="store_true", help="only run the residual certificates")
    return parser


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------


def _out_dir(args) -> str:
    return os.environ.get("BESOV_LAB_OUT") or args.out


def _write(args, stem: str, payload_csv: str | None, payload_json) -> str:
    fmt = args.format
    path = os.path.join(_out_dir(args), f"{stem}.{fmt}")
    if fmt == "csv" and payload_csv is not None:
        ex.atomic_write_text(path, payload_csv)
    else:
        path = os.path.join(_out_dir(args), f"{stem}.json")
        ex.atomic_write_text(path, json.dumps(payload_json, indent=2, sort_keys=True, default=ex._fmt) + "\n")
    return path


def _rows_csv(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(ex._fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _report(ok: bool, what: str, path: str) -> int:
    print(f"{'PASS' if ok else 'FAIL'} {what} -> {path}")
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _resolve_p(args) -> float:
    if args.p_num is None and args.p_den is None:
        return args.p
    if args.p_num is None or args.p_den is None:
        raise _UsageError("--p-num and --p-den must be given together")
    if args.p_den <= 0 or Fraction(args.p_num, args.p_den) < 1:
        raise _UsageError(f"p = {args.p_num}/{args.p_den} is not admissible; need a rational >= 1")
    return args.p_num / args.p_den


class _UsageError(Exception):
    pass


def _load_profile(args):
    if args.profile:
        text = args.profile
        if os.path.exists(text):
            with open(text) as fh:
                text = fh.read()
        return profile_from_descriptor(text)
    return profile_from_descriptor({"s": args.s, "J": args.J, "rule": getattr(args, "rule", "uniform"),
                                    "d": getattr(args, "d", 2)})


def cmd_partition_check(args) -> int:
    k_max = math.ceil(Fraction(4, 3) * 2 ** args.jmax)
    start = time.perf_counter()
    P = build_partition(k_max)
    defect = P.unity_defect()
    elapsed = time.perf_counter() - start
    data = {"jmax": args.jmax, "k_max": k_max, "blocks": P.J, "max_unity_defect": defect,
            "tolerance": PARTITION_TOL, "seconds": elapsed}
    csv_text = _rows_csv(("jmax", "k_max", "blocks", "max_unity_defect", "tolerance"),
                         [(args.jmax, k_max, P.J, defect, PARTITION_TOL)])
    path = _write(args, "partition_check", csv_text, data)
    return _report(defect <= PARTITION_TOL, f"partition of unity: max defect {defect:.3e}", path)


def cmd_besov(args) -> int:
    prof, state = _load_profile(args)
    p = _resolve_p(args)
    s = prof.s if args.norm_s is None else args.norm_s
    idx = BesovIndex(s, p, args.r)
    blocks = besov_block_norms(state.profile, s, p, None, state.d)
    norm = besov_norm_shear(state, idx)
    rows = [(j, b) for j, b in zip(range(-1, len(blocks) - 1), blocks)]
    data = {"descriptor": profile_descriptor(prof, state.d, state.drift), "s": s, "p": p, "r": args.r,
            "norm": norm, "weighted_block_norms": [b for _, b in rows]}
    path = _write(args, "besov", _rows_csv(("j", "weighted_block_norm"), rows), data)
    print(f"||u0||_B^{s}_{ex._fmt(p)},{ex._fmt(args.r)} = {norm!r} -> {path}")
    return EXIT_OK


def cmd_profile(args) -> int:
    prof, state = _load_profile(args)
    P = build_partition(max(4, 2 * prof.k_max))
    rows, worst = [], 0.0
    for j in range(-1, P.J + 1):
        inside = j in prof.indices
        target = (TrigPolynomial.cosine(lacunary_frequency(j), prof.coefficient(j))
                  if inside else TrigPolynomial.zero())
        err = lp_norm(dyadic_block(prof.poly, j, P) - target, math.inf)
        worst = max(worst, err)
        rows.append((j, lacunary_frequency(j) if inside else "", prof.coefficient(j) if inside else 0.0, err))
    data = {"descriptor": profile_descriptor(prof, state.d, state.drift), "k_max": prof.k_max,
            "blocks": [dict(zip(("j", "lambda_j", "amplitude", "block_error"), r)) for r in rows]}
    path = _write(args, "profile", _rows_csv(("j", "lambda_j", "amplitude", "block_error"), rows), data)
    return _report(worst <= BLOCK_TOL, f"block diagonality: max error {worst:.3e}", path)


def cmd_theorem(args) -> int:
    p = _resolve_p(args)
    kwargs = {"cross_check": not args.no_cross_check}
    if args.command in ("thm3", "thm4"):
        kwargs["strict"] = args.strict
    if args.command == "thm2":
        records = ex.sweep("thm2", (args.s,), (p,), (args.d,), args.n, args.J, r_values=(args.r,),
                           alpha=args.alpha, skip_inadmissible=False, **kwargs)
    else:
        records = ex.sweep(args.command, (args.s,), (p,), (args.d,), args.n, args.J, **kwargs)
    summary = ex.summarize(records)
    if args.verbose:
        for rec in records:
            print(f"  n={rec.n} full_norm={rec.full_norm!r} bound={rec.paper_bound!r} pass={rec.passed}")
    stem = args.command
    if args.format == "csv":
        path = _write(args, stem, ex.records_to_csv(records), None)
    else:
        payload = {"summary": summary, "records": [dict(zip(ex.GAP_COLUMNS, ex.record_row(r))) for r in records]}
        path = _write(args, stem, None, payload)
    y = "ratio" if stem == "thm2" else "full_norm"
    ex.atomic_write_text(os.path.join(_out_dir(args), f"{stem}_plot.csv"), ex.plot_data(records, "n", y))
    fails = sum(g["fail_count"] for g in summary)
    bad_cross = [r for r in records if r.cross_path_rel_err is not None and r.cross_path_rel_err > ex.CROSS_PATH_RTOL]
    ok = fails == 0 and not bad_cross
    return _report(ok, f"{stem}: {len(records)} records, {fails} failed checks, "
                       f"{len(bad_cross)} cross-path mismatches", path)


def cmd_solve_ad1d(args) -> int:
    prof, state = _load_profile(args)
    oracle = solve_advection_diffusion_1d(prof.poly, args.eps, args.T)
    closed = ns_damped_wave(state, args.eps, args.T).profile
    err = lp_norm(oracle - closed, math.inf)
    rows = [(k, a, b) for k, (a, b) in oracle.terms().items()]
    data = {"eps": args.eps, "T": args.T, "sup_error_vs_damped_wave": err,
            "coefficients": [dict(zip(("k", "cos", "sin"), r)) for r in rows]}
    path = _write(args, "solve_ad1d", _rows_csv(("k", "cos", "sin"), rows), data)
    return _report(err <= AD1D_TOL, f"advection-diffusion oracle vs damped wave: {err:.3e}", path)


def _solver_config(text: str | None) -> SolverConfig2D:
    return SolverConfig2D.from_json(text) if text else SolverConfig2D()


def cmd_solve_ns2d(args) -> int:
    cfg = _solver_config(args.config)
    if args.initial == "shear":
        prof = (profile_from_descriptor(args.profile)[0].poly if args.profile else build_profile(1.0, 4).poly)
        u0 = shear_sampler(1.0, prof)
    else:
        u0 = taylor_green_sampler()
    snaps = ns2d_solve(u0, cfg)
    out = _out_dir(args)
    writer = write_spectral_csv if args.snapshot == "spectral" else write_field_csv
    for k, snap in enumerate(snaps):
        writer(snap, os.path.join(out, f"ns2d_{args.snapshot}_{k:03d}.csv"))
    rows = [(k, snap.t, snap.energy(), snap.divergence_max()) for k, snap in enumerate(snaps)]
    data = {"config": json.loads(cfg.to_json()), "initial": args.initial,
            "snapshots": [dict(zip(("index", "t", "energy", "divergence_max"), r)) for r in rows]}
    path = _write(args, "ns2d_summary", _rows_csv(("index", "t", "energy", "divergence_max"), rows), data)
    print(f"wrote {len(snaps)} snapshots; summary -> {path}")
    return EXIT_OK


def cmd_validate(args) -> int:
    certs = ex.residual_certificates()
    worst = max(max(c["euler_residual"], c["ns_residual"]) for c in certs)
    ok = worst <= RESIDUAL_TOL
    rows = [("residual_max", worst, RESIDUAL_TOL, worst <= RESIDUAL_TOL)]
    print(f"{'PASS' if ok else 'FAIL'} exact-solution residuals: max {worst:.3e}")
    solver = None
    if not args.skip_solver:
        cfg = _solver_config(args.config)
        solver = validate_solver(cfg, build_profile(1.0, 4).poly)
        checks = [("shear_error", solver["shear_error"], SOLVER_TOL, solver["shear_error"] <= SOLVER_TOL),
                  ("taylor_green_error", solver["taylor_green_error"], SOLVER_TOL,
                   solver["taylor_green_error"] <= SOLVER_TOL),
                  ("shear_error_ratio", solver["shear_error_ratio"], SOLVER_ORDER_RATIO,
                   solver["shear_error_ratio"] >= SOLVER_ORDER_RATIO)]
        for name, val, tol, passed in checks:
            print(f"{'PASS' if passed else 'FAIL'} {name}: {val:.3e} (threshold {tol:g})")
            ok = ok and passed
        rows += checks
    data = {"residual_certificates": certs, "solver": solver}
    path = _write(args, "validate", _rows_csv(("check", "value", "threshold", "pass"), rows), data)
    print(f"-> {path}")
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {
    "partition-check": cmd_partition_check,
    "besov": cmd_besov,
    "profile": cmd_profile,
    "thm1": cmd_theorem,
    "thm2": cmd_theorem,
    "thm3": cmd_theorem,
    "thm4": cmd_theorem,
    "solve-ad1d": cmd_solve_ad1d,
    "solve-ns2d": cmd_solve_ns2d,
    "validate": cmd_validate,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except (QuadratureError, SolverBlowUpError) as exc:
        print(f"besov-lab: check failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except _UsageError as exc:
        print(f"besov-lab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BesovLabError, ValueError, TypeError, json.JSONDecodeError) as exc:
        print(f"besov-lab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())
