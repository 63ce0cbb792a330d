"""Command-line surface: reproduction commands and result persistence.

Numeric payloads go to stdout (or ``--out`` files) with 17 significant
digits so that identical runs are byte-identical; wall-clock timings and
other run metadata go to stderr or into the ``meta`` block of JSON records.
Exit codes: 0 ok, 1 numerical failure, 2 argument error.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__, acceptance, inner, rpc3bp, separatrix, splitting

__all__ = ["main", "ResultRecord"]


def _fmt(x) -> str:
    return f"{float(x):.17g}"


@dataclasses.dataclass
class ResultRecord:
    command: str
    inputs: dict
    outputs: dict
    diagnostics: dict
    meta: dict

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ResultRecord":
        return cls(**json.loads(text))


def _record(command, inputs, outputs, diagnostics, t0) -> ResultRecord:
    return ResultRecord(
        command=command, inputs=inputs, outputs=outputs,
        diagnostics=diagnostics,
        meta={"wall_time_s": time.perf_counter() - t0,
              "library_version": __version__},
    )


def _map_fn():
    threads = int(os.environ.get("L3LAB_THREADS", "1"))
    if threads <= 1:
        return map
    pool = ThreadPoolExecutor(max_workers=threads)
    return pool.map


def _write(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _write_record(rec: ResultRecord, out: str | None):
    """Full record (with run metadata) to files; metadata-free copy to stdout
    so identical runs print identical bytes."""
    if out is None:
        payload = dataclasses.asdict(rec)
        payload.pop("meta")
        sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    else:
        with open(out, "w") as fh:
            fh.write(rec.to_json() + "\n")


def _csv(header: list[str], rows: list[list]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(
            cell if isinstance(cell, str) else _fmt(cell) for cell in row
        ))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_a(args) -> int:
    t0 = time.perf_counter()
    res = separatrix.compute_A_quad(tol=args.tol)
    if args.format == "json":
        rec = _record("a", {"tol": args.tol},
                      {"value": res.value, "err": res.err, "evals": res.evals},
                      {"quadrature_evals": res.evals}, t0)
        _write_record(rec, args.out)
    else:
        _write(f"A = {_fmt(res.value)}\nerr_estimate = {_fmt(res.err)}\n",
               args.out)
    return 0


def _cmd_stokes(args) -> int:
    if args.rho_step <= 0 or args.rho_max < args.rho_min:
        print("error: empty rho range", file=sys.stderr)
        return 2
    rhos = list(np.arange(args.rho_min, args.rho_max + args.rho_step / 2,
                          args.rho_step))
    if not rhos:
        print("error: empty rho range", file=sys.stderr)
        return 2
    rows = []
    failed = False
    for rho in rhos:
        try:
            rec = inner.theta(float(rho), re_start=args.re_start,
                              rtol=args.tol)
            rows.append([rec.rho, abs(rec.delta_y), math.exp(rec.rho),
                         rec.theta, rec.digits_lost])
        except inner.PrecisionLoss:
            failed = True
            rows.append([float(rho), float("nan"), math.exp(float(rho)),
                         float("nan"), float("inf")])
    text = _csv(["rho", "abs_deltaY", "exp_rho", "theta", "digits_lost"], rows)
    _write(text, args.out)
    return 1 if failed else 0


def _cmd_singularities(args) -> int:
    A = separatrix.compute_A(tol=1e-12)
    t_up = separatrix.t_star("zero_upper")
    t_dn = separatrix.t_star("zero_lower")
    t2_up = separatrix.t_star("infinity_upper")
    t2_dn = separatrix.t_star("infinity_lower")
    ref2 = -0.086697 - 0.969516j
    lines = [
        f"t*_1,+ = {_fmt(t_up.real)} {_fmt(t_up.imag)}i"
        f"  [reference -iA, A = {_fmt(A)}]",
        f"t*_1,- = {_fmt(t_dn.real)} {_fmt(t_dn.imag)}i  [reference +iA]",
        f"t*_2,+ = {_fmt(t2_up.real)} {_fmt(t2_up.imag)}i"
        f"  [reference {ref2.real} {ref2.imag}i]",
        f"t*_2,- = {_fmt(t2_dn.real)} {_fmt(t2_dn.imag)}i"
        f"  [reference {ref2.real} {-ref2.imag}i]",
    ]
    _write("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_separatrix(args) -> int:
    ts = np.linspace(-args.t_max, args.t_max, args.n)
    states = separatrix._sigma_sweep(list(ts))
    rows = []
    for t, st in zip(ts, states):
        lam = st.lam.real
        Lam = st.Lam.real
        rows.append([t, lam, Lam, math.cos(lam / 2.0)])
    _write(_csv(["t", "lambda", "Lambda", "q"], rows), args.out)
    return 0


def _cmd_l3(args) -> int:
    eq = rpc3bp.locate_L3(args.mu)
    ev = sorted(eq.eigenvalues, key=lambda z: (-abs(z.real), z.imag))
    lines = [f"d_mu = {_fmt(eq.d_mu)}"]
    for k, z in enumerate(ev):
        lines.append(f"eigenvalue_{k} = {_fmt(z.real)} {_fmt(z.imag)}i")
    lines.append(
        f"hyperbolic_over_sqrt_mu = {_fmt(eq.hyperbolic_rate / math.sqrt(args.mu))}"
        f"  [sqrt(21/8) = {_fmt(math.sqrt(21.0 / 8.0))}]"
    )
    lines.append(f"elliptic_frequency = {_fmt(eq.elliptic_frequency)}")
    _write("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_manifolds(args) -> int:
    rows = []
    for branch in ("unstable_plus", "stable_plus"):
        ts, states = splitting.manifold_trajectory(
            args.mu, branch, t_max=args.t_max, n_points=args.n)
        for t, y in zip(ts, states):
            r = math.hypot(y[0], y[1])
            rows.append([branch, t, y[0], y[1], r, math.atan2(y[1], y[0])])
    _write(_csv(["branch", "t", "q1", "q2", "r", "theta"], rows), args.out)
    return 0


def _cmd_distance(args) -> int:
    t0 = time.perf_counter()
    A = separatrix.compute_A()
    theta_abs = args.theta_abs
    if theta_abs is None:
        theta_abs = inner.theta(15.0).theta
    sample = splitting.section_gap(args.mu, t_max=args.t_max, A=A,
                                   theta_abs=theta_abs)
    lines = [
        f"asymptotic = {_fmt(sample.dist_asymptotic)}",
        f"measured = {_fmt(sample.dist_measured)}",
        f"ratio = {_fmt(sample.dist_measured / sample.dist_asymptotic)}",
        f"gap_r = {_fmt(sample.gap_r)}",
        f"gap_R = {_fmt(sample.gap_R)}",
        f"gap_G = {_fmt(sample.gap_G)}",
        f"gap_eta = {_fmt(sample.gap_eta)}",
    ]
    if args.format == "json":
        rec = _record("distance", {"mu": args.mu, "theta_abs": theta_abs},
                      dataclasses.asdict(sample), {}, t0)
        _write_record(rec, args.out)
    else:
        _write("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_verify(args) -> int:
    results = acceptance.run_all(map_fn=_map_fn())
    all_ok = True
    out = []
    for res in results:
        status = "PASS" if res.ok else "FAIL"
        all_ok = all_ok and res.ok
        out.append(f"[{status}] criterion {res.number}: {res.name}")
        for line in res.lines:
            out.append(f"    {line}")
    out.append("verify: ALL PASS" if all_ok else "verify: FAILURES PRESENT")
    _write("\n".join(out) + "\n", args.out)
    return 0 if all_ok else 1


# ---------------------------------------------------------------------------
# parser plumbing
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="l3lab",
        description="Separatrix-splitting numerics for the L3 point of the "
                    "restricted planar circular three-body problem.",
    )
    p.add_argument("--config", default=None,
                   help="flat key=value file with defaults (flags override)")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("a", help="the analyticity-strip constant A")
    q.add_argument("--tol", type=float, default=1e-10)
    q.add_argument("--format", choices=["text", "json"], default="text")
    q.add_argument("--out", default=None)
    q.set_defaults(fn=_cmd_a)

    q = sub.add_parser("stokes", help="Stokes-constant table over a rho grid")
    q.add_argument("--rho-min", type=float, default=13.0)
    q.add_argument("--rho-max", type=float, default=20.0)
    q.add_argument("--rho-step", type=float, default=1.0)
    q.add_argument("--tol", type=float, default=1e-12)
    q.add_argument("--re-start", type=float, default=1000.0)
    q.add_argument("--out", default=None,
                   help="CSV output path (default stdout)")
    q.set_defaults(fn=_cmd_stokes)

    q = sub.add_parser("singularities",
                       help="the four separatrix singularity positions")
    q.add_argument("--out", default=None)
    q.set_defaults(fn=_cmd_singularities)

    q = sub.add_parser("separatrix",
                       help="plot-ready samples of the real separatrix "
                            "(CSV columns: t, lambda, Lambda, q)")
    q.add_argument("--t-max", type=float, default=10.0)
    q.add_argument("--n", type=int, default=401)
    q.add_argument("--out", default=None)
    q.set_defaults(fn=_cmd_separatrix)

    q = sub.add_parser("l3", help="collinear equilibrium and spectrum")
    q.add_argument("--mu", type=float, default=0.003)
    q.add_argument("--out", default=None)
    q.set_defaults(fn=_cmd_l3)

    q = sub.add_parser("manifolds",
                       help="plot-ready manifold trajectories to the section "
                            "(CSV columns: branch, t, q1, q2, r, theta)")
    q.add_argument("--mu", type=float, default=0.003)
    q.add_argument("--t-max", type=float, default=500.0)
    q.add_argument("--n", type=int, default=2000)
    q.add_argument("--out", default=None)
    q.set_defaults(fn=_cmd_manifolds)

    q = sub.add_parser("distance",
                       help="asymptotic vs measured splitting at one mu")
    q.add_argument("--mu", type=float, default=1e-3)
    q.add_argument("--t-max", type=float, default=500.0)
    q.add_argument("--theta-abs", type=float, default=None,
                   help="prefactor modulus; computed at rho = 15 if omitted")
    q.add_argument("--format", choices=["text", "json"], default="text")
    q.add_argument("--out", default=None)
    q.set_defaults(fn=_cmd_distance)

    q = sub.add_parser("verify", help="run the acceptance/property suite")
    q.add_argument("--out", default=None)
    q.set_defaults(fn=_cmd_verify)
    return p


def _load_config(path: str) -> dict:
    out = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    # apply config-file defaults before parsing so explicit flags win
    if "--config" in argv:
        cfg_path = argv[argv.index("--config") + 1]
        raw = _load_config(cfg_path)
        typed = {}
        for key, value in raw.items():
            try:
                typed[key] = float(value)
            except ValueError:
                typed[key] = value
        parser.set_defaults(**typed)
        for action in parser._subparsers._group_actions:
            for sp in action.choices.values():
                sp.set_defaults(**{
                    k: v for k, v in typed.items()
                    if any(a.dest == k for a in sp._actions)
                })
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    t0 = time.perf_counter()
    try:
        code = args.fn(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (inner.PrecisionLoss, separatrix.FitRejected,
            splitting.NoCrossing) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"[{args.command}] wall time {time.perf_counter() - t0:.2f} s",
          file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
