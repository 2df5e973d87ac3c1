"""Command-line front end.

Exit status: 0 success, 1 domain error (an input violates a mathematical
precondition or a verification fails), 2 I/O or parse error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import bounds, oracle, regions
from .channels import classify, induced_stochastic, load_channel
from .errors import DomainError, FormatError
from .qstate import (
    DensityMatrix,
    HamiltonianSpec,
    beta_from_occupation,
    check_beta,
    load_state,
    mode_decompose,
    mode_l1,
    state_to_dict,
)
from .thermo import EnergyDistribution, guaranteed_transform, lorenz_curve, thermomajorizes


def _g17(x: float) -> str:
    return format(float(x), ".17g")


def _g6(x: float) -> str:
    return format(float(x), ".6g")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else ("inf" if x > 0 else "-inf" if x < 0 else "nan")
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True)


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise FormatError(f"expected comma-separated numbers, got {text!r}") from exc


def _target(text: str) -> tuple[int, int]:
    try:
        n, m = (int(x) for x in text.split(","))
    except ValueError as exc:
        raise FormatError(f"target must look like 'n,m', got {text!r}") from exc
    return n, m


def _add_temperature(p: argparse.ArgumentParser, required: bool = False):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--beta", type=float, help="inverse temperature (inf allowed)")
    g.add_argument("--r", type=float, help="thermal ground occupation (qubits only)")


def _resolve_beta(args, H: HamiltonianSpec | None = None):
    if args.beta is not None:
        return check_beta(args.beta)
    if args.r is not None:
        if H is not None and H.dim != 2:
            raise DomainError("--r is only defined for qubits")
        gap = 1.0 if H is None else H.energies[1] - H.energies[0]
        return beta_from_occupation(args.r, gap)
    return None


# -- subcommands ----------------------------------------------------------------


def cmd_decompose(args, out):
    rho, H = load_state(args.state)
    md = mode_decompose(rho, H)
    if args.json:
        rows = [{"omega": w, "mode_l1": mode_l1(md, w), "entries": md.support(w)} for w in md]
        out.write(_dumps(rows) + "\n")
        return 0
    out.write(f"{'omega':>12}  {'mode_l1':>12}  entries\n")
    for w in md:
        nz = [(n, m) for n, m in md.support(w) if rho[n, m] != 0]
        entries = " ".join(f"({n},{m})" for n, m in nz)
        out.write(f"{_g6(w):>12}  {_g6(mode_l1(md, w)):>12}  {entries}\n")
    return 0


def cmd_check_channel(args, out):
    ch = load_channel(args.channel, validate=False)
    betas = list(args.beta or [])
    if args.r is not None:
        betas.append(beta_from_occupation(args.r, ch.h_in.energies[1] - ch.h_in.energies[0]))
    report = classify(ch, [check_beta(b) for b in betas])
    if args.json:
        out.write(_dumps(report.to_dict()) + "\n")
        return 0
    out.write(f"cptp       {'yes' if report.is_cptp else 'no':<4} violation {_g6(report.cptp_violation)}\n")
    out.write(f"symmetric  {'yes' if report.is_symmetric else 'no':<4} violation {_g6(report.symmetric_violation)}\n")
    for b, (flag, v) in report.gibbs.items():
        out.write(f"gibbs(beta={_g6(b)}) {'yes' if flag else 'no':<4} violation {_g6(v)}\n")
    return 0


def _stochastic_from(args):
    if args.channel:
        return induced_stochastic(load_channel(args.channel))
    if args.stochastic:
        try:
            obj = json.loads(Path(args.stochastic).read_text())
        except json.JSONDecodeError as exc:
            raise FormatError(f"{args.stochastic}: invalid JSON ({exc})") from exc
        return obj["matrix"] if isinstance(obj, dict) else obj
    return None


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise FormatError(f"missing required option(s): {', '.join('--' + n for n in missing)}")


def cmd_bound(args, out):
    name = args.name
    if name in ("cptp", "symmetric", "thermal"):
        _need(args, "state", "target")
        rho, H = load_state(args.state)
        q = bounds.BoundQuery(rho, H, _target(args.target), _stochastic_from(args),
                              _resolve_beta(args, H))
        value = {"cptp": bounds.cptp_bound, "symmetric": bounds.symmetric_bound,
                 "thermal": bounds.thermal_bound}[name](q)
    elif name == "merge_symmetric":
        _need(args, "a", "b")
        value = bounds.merge_bound_symmetric(args.a, args.b)
    elif name == "merge_thermal":
        _need(args, "a", "b")
        beta = _resolve_beta(args)
        if beta is None:
            raise FormatError("merge_thermal needs --beta or --r")
        value = bounds.merge_bound_thermal(args.a, args.b, beta, args.omega0, args.direction)
    elif name == "qubit_symmetric":
        _need(args, "p", "q", "c")
        value = bounds.qubit_symmetric_bound(args.p, args.q, args.c)
    else:
        _need(args, "p", "q", "r", "c")
        value = bounds.qubit_thermal_bound(args.p, args.q, args.r, args.c)
    out.write(_g17(value) + "\n")
    return 0


def _distributions(args):
    if args.from_state:
        rho, H = load_state(args.from_state)
        sigma, H2 = load_state(args.to_state)
        if H != H2:
            raise DomainError("states refer to different Hamiltonians")
        return EnergyDistribution.of_state(rho, H), EnergyDistribution.of_state(sigma, H), H
    _need(args, "p", "q")
    p, q = _floats(args.p), _floats(args.q)
    energies = _floats(args.energies) if args.energies else list(range(len(p)))
    H = HamiltonianSpec(tuple(energies))
    return EnergyDistribution(p, H), EnergyDistribution(q, H), H


def cmd_thermomajorize(args, out):
    p, q, H = _distributions(args)
    beta = _resolve_beta(args, H)
    if beta is None:
        raise FormatError("thermomajorize needs --beta or --r")
    ok = thermomajorizes(p, q, beta)
    out.write(f"thermomajorizes: {'yes' if ok else 'no'}\n")
    for label, dist in (("p", p), ("q", q)):
        curve = lorenz_curve(dist, beta)
        if args.out_dir:
            Path(args.out_dir).mkdir(parents=True, exist_ok=True)
            curve.write_csv(Path(args.out_dir) / f"lorenz_{label}.csv")
        else:
            out.write(f"# lorenz {label}\n")
            curve.write_csv(out)
    return 0


def cmd_region(args, out):
    kinds = [k.strip() for k in args.kinds.split(",") if k.strip()]
    outdir = Path(args.out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    for kind in kinds:
        boundary = regions.region(kind, args.p, args.c, args.r, args.grid)
        path = outdir / f"region_{kind}.csv"
        boundary.write_csv(path)
        out.write(f"{path}\t{len(boundary)} points\n")
    return 0


def cmd_guaranteed(args, out):
    if args.state:
        rho, H = load_state(args.state)
        beta = _resolve_beta(args, H)
        if beta is None or args.q_dist is None:
            raise FormatError("--state needs --q-dist and --beta/--r")
        lam, sigma = guaranteed_transform(rho, H, beta, _floats(args.q_dist))
    else:
        _need(args, "p", "q", "r", "c")
        if args.beta is not None:
            raise FormatError("the qubit form takes --r, not --beta")
        H = HamiltonianSpec((0.0, 1.0))
        rho = DensityMatrix.qubit(args.p, args.c)
        lam, sigma = guaranteed_transform(rho, H, beta_from_occupation(args.r), [args.q, 1 - args.q])
    out.write(f"lambda* = {_g17(lam)}\n")
    s = np.asarray(sigma)
    for row in s:
        out.write("  " + "  ".join(f"{_g6(z.real)}{'+' if z.imag >= 0 else '-'}{_g6(abs(z.imag))}j"
                                   for z in row) + "\n")
    if args.out:
        Path(args.out).write_text(json.dumps(state_to_dict(sigma, H), indent=2) + "\n")
    return 0


def cmd_verify(args, out):
    suites = ["symmetric", "thermal", "saturation", "convergence"] if args.suite == "all" else [args.suite]
    reports = []
    for suite in suites:
        if suite in ("symmetric", "thermal"):
            reports.append(oracle.run_sweep(suite, args.samples, args.seed, args.workers).to_dict())
        elif suite == "saturation":
            for bid in oracle.BOUND_IDS:
                tol = 1e-6 if bid.startswith("shift") else 1e-8 if bid == "qubit_thermal" else 1e-12
                reports.append(oracle.verify_saturation(bid, tolerance=tol))
        else:
            rows = oracle.bath_convergence_study("down", 0.1, 1.0, [5, 10, 20, 40])
            errs = [r["error"] for r in rows]
            reports.append({"suite": "convergence", "direction": "down", "beta": 0.1, "omega": 1.0,
                            "rows": rows, "pass": all(b < a for a, b in zip(errs, errs[1:]))})
    text = _dumps(reports) + "\n"
    if args.out:
        Path(args.out).write_text(text)
        for r in reports:
            label = r.get("suite") or r.get("bound_id")
            out.write(f"{'PASS' if r['pass'] else 'FAIL'}  {label}\n")
    else:
        out.write(text)
    return 0 if all(r["pass"] for r in reports) else 1


# -- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="modeflow", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="print the coherence-mode table of a state")
    p.add_argument("--state", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("check-channel", help="report CPTP / symmetric / Gibbs-preserving status")
    p.add_argument("--channel", required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--beta", type=float, action="append")
    g.add_argument("--r", type=float)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_check_channel)

    p = sub.add_parser("bound", help="evaluate a named coherence bound")
    p.add_argument("--name", required=True, choices=["cptp", "symmetric", "thermal", "merge_symmetric",
                                                    "merge_thermal", "qubit_symmetric", "qubit_thermal"])
    p.add_argument("--state")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--channel", help="channel JSON; its induced transition matrix is used")
    src.add_argument("--stochastic", help='JSON {"matrix": [[...]]}, columns = input level')
    p.add_argument("--target", help="entry 'n,m'")
    for name in ("p", "q", "c", "a", "b"):
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--omega0", type=float, default=1.0)
    p.add_argument("--direction", choices=["up", "down"], default="down")
    _add_temperature(p)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("thermomajorize", help="thermomajorization test plus Lorenz curves")
    p.add_argument("--p", help="initial distribution, comma separated")
    p.add_argument("--q", help="target distribution, comma separated")
    p.add_argument("--energies", help="energies, comma separated (default 0,1,...)")
    p.add_argument("--from-state")
    p.add_argument("--to-state")
    p.add_argument("--out-dir")
    _add_temperature(p)
    p.set_defaults(func=cmd_thermomajorize)

    p = sub.add_parser("region", help="write qubit achievable-region boundaries as CSV")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--r", type=float)
    p.add_argument("--kinds", default="symmetric,thermal,guaranteed,triangle")
    p.add_argument("--grid", type=int, default=regions.DEFAULT_GRID)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("guaranteed", help="guaranteed coherence fraction and final state")
    for name in ("p", "q", "c"):
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--state")
    p.add_argument("--q-dist")
    p.add_argument("--out", help="write the final state as JSON")
    _add_temperature(p)
    p.set_defaults(func=cmd_guaranteed)

    p = sub.add_parser("verify", help="run the brute-force oracle suites")
    p.add_argument("--suite", default="all", choices=["all", "symmetric", "thermal", "saturation", "convergence"])
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=None,
                   help="sweep processes (default: MODEFLOW_THREADS, 0 = all cores)")
    p.add_argument("--out", help="JSON report path (default: stdout)")
    p.set_defaults(func=cmd_verify)
    return ap


def run(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
