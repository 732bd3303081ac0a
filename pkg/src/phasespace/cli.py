"""Command-line front end.

Subcommands: dist, evolve, sweep, verify.  Exit codes: 0 success,
1 numerical-tolerance failure (including golden-file mismatch),
2 usage/config error or any declared module error (one machine-readable
line ``error: <code>: <message>`` on stderr).

With PHASESPACE_GOLDEN_DIR set, every written CSV that has a same-named
counterpart in that directory is byte-compared against it.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np
import yaml

from . import __version__, distributions as dist, lindblad, states, verify
from .config import ScenarioConfig, load_config
from .errors import ClosedFormUnavailableError, PhaseSpaceError, SingularOrderError
from .evolution import (
    PhaseInsensitive,
    phi_evolved_coherent,
    phi_evolved_from_field,
    sweep_order,
)
from .states import Coherent
from .su11 import OrderingParameter

DUAL_PATH_TOL = 1e-7
SWEEP_TOL = 1e-6


def _fmt_order(a: float) -> str:
    return f"{a:g}".replace("-", "m")


def _fmt_time(t: float) -> str:
    return f"{t:g}"


def _sidecar_base(cfg: ScenarioConfig) -> dict:
    return {
        "package_version": __version__,
        "config_sha256": cfg.sha256,
        "cutoff": cfg.cutoff,
        "tolerances": {"dual_path": DUAL_PATH_TOL, "normalization":
                       dist.NORMALIZATION_TOL, "sweep": SWEEP_TOL},
        "arbitration": verify.arbitration_summary(),
    }


class _GoldenChecker:
    def __init__(self):
        self.dir = os.environ.get("PHASESPACE_GOLDEN_DIR")
        self.mismatches = []

    def check(self, path: Path):
        if not self.dir:
            return
        golden = Path(self.dir) / path.name
        if not golden.exists():
            return
        if golden.read_bytes() != path.read_bytes():
            self.mismatches.append(path.name)
            print(f"golden-mismatch {path.name}", file=sys.stderr)
        else:
            print(f"golden-match {path.name}")


def _write_field(fld, path: Path, cfg: ScenarioConfig, golden: _GoldenChecker,
                 extra: dict | None = None):
    sidecar = _sidecar_base(cfg)
    if extra:
        sidecar.update(extra)
    dist.write_field_csv(fld, path, sidecar=sidecar)
    golden.check(path)


def _out_dir(args, cfg: ScenarioConfig) -> Path:
    out = Path(args.out or cfg.output_dir or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _closed_form_field(cfg: ScenarioConfig, a: OrderingParameter, threads: int):
    return dist.evaluate_grid(cfg.state, a, cfg.grid, method="closed-form",
                              cutoff=cfg.cutoff, threads=threads)


def cmd_dist(args) -> int:
    cfg = load_config(args.config)
    if cfg.model is not None or cfg.times:
        raise PhaseSpaceError("dist scenarios must not carry a model or times")
    method = args.method or cfg.method
    out = _out_dir(args, cfg)
    golden = _GoldenChecker()
    failures = 0
    for a in cfg.orders:
        if a.is_singular:
            if isinstance(cfg.state, Coherent):
                res = states.closed_form_phi(cfg.state, a, 0.0)
                raise SingularOrderError(
                    "a = 1 distribution is a point mass at "
                    f"{states.format_complex(res.center)}; no sampled field exists"
                )
            raise SingularOrderError("a = 1 is singular for this state")
        tag = _fmt_order(a.a)
        if method in ("closed-form", "both"):
            fld = _closed_form_field(cfg, a, args.threads)
            _write_field(fld, out / f"dist_a{tag}.csv", cfg, golden)
        if method in ("oracle", "both"):
            fld_o = dist.evaluate_grid(cfg.state, a, cfg.grid, method="oracle",
                                       cutoff=cfg.cutoff, threads=args.threads)
            name = f"dist_a{tag}_oracle.csv" if method == "both" else f"dist_a{tag}.csv"
            _write_field(fld_o, out / name, cfg, golden)
        if method == "both":
            diff = float(np.abs(fld.values - fld_o.values).max())
            print(f"max_abs_diff a={a.a:g} {diff:.3e}")
            if a.certified and diff > DUAL_PATH_TOL:
                failures += 1
    if golden.mismatches or failures:
        return 1
    return 0


def _evolved_field(cfg: ScenarioConfig, a: OrderingParameter, t: float,
                   threads: int):
    """Closed-route evolved field; shares the dist code path at t = 0."""
    if t == 0.0:
        try:
            return _closed_form_field(cfg, a, threads)
        except ClosedFormUnavailableError:
            return dist.evaluate_grid(cfg.state, a, cfg.grid, method="oracle",
                                      cutoff=cfg.cutoff, threads=threads)
    if isinstance(cfg.state, Coherent):
        vals = phi_evolved_coherent(cfg.model, cfg.state.alpha0, a, t,
                                    cfg.grid.alphas)
        prov = {"method": "evolved", "state": states.spec_to_dict(cfg.state),
                "time": t, "certified": a.certified}
        return dist.DistributionField(cfg.grid, vals, a, prov)
    initial = dist.evaluate_grid(cfg.state, a, cfg.grid, method="oracle",
                                 cutoff=cfg.cutoff, threads=threads)
    return phi_evolved_from_field(cfg.model, a, t, initial)


def _oracle_snapshots(cfg: ScenarioConfig, times):
    rho0 = states.density_matrix(cfg.state, cfg.cutoff)
    dt = cfg.oracle_dt or lindblad.default_step(cfg.model, cfg.cutoff)
    record = tuple(t for t in times if t > 0)
    if not record:
        return {0.0: rho0}
    snaps = lindblad.integrate(cfg.model, rho0,
                               lindblad.IntegratorConfig(dt=dt, t_end=record[-1],
                                                         record_times=record))
    out = {0.0: rho0}
    out.update({t: r for t, r in snaps})
    return out


def cmd_evolve(args) -> int:
    cfg = load_config(args.config)
    if cfg.model is None or not cfg.times:
        raise PhaseSpaceError("evolve scenarios require a model and times")
    if len(cfg.orders) != 1:
        raise PhaseSpaceError("evolve scenarios take a single order")
    a = cfg.orders[0]
    out = _out_dir(args, cfg)
    golden = _GoldenChecker()
    snaps = _oracle_snapshots(cfg, cfg.times) if args.oracle else {}
    report = {"times": [], "max_abs_diff": []}
    moment_rows = []
    for t in cfg.times:
        fld = _evolved_field(cfg, a, t, args.threads)
        extra = {}
        if args.oracle:
            ora = dist.evaluate_grid(snaps[t], a, cfg.grid, method="oracle",
                                     threads=args.threads)
            diff = float(np.abs(fld.values - ora.values).max())
            extra["oracle_max_abs_diff"] = diff
            report["times"].append(t)
            report["max_abs_diff"].append(diff)
        _write_field(fld, out / f"evolve_t{_fmt_time(t)}.csv", cfg, golden, extra)
        mean = dist.field_mean(fld)
        moment_rows.append((t, mean.real, mean.imag))
    with open(out / "evolve_moments.csv", "w", newline="") as fh:
        fh.write("t,re_mean,im_mean\n")
        for t, re, im in moment_rows:
            fh.write(f"{t:.17g},{re:.17g},{im:.17g}\n")
    golden.check(out / "evolve_moments.csv")
    if args.oracle:
        with open(out / "evolve_report.yaml", "w") as fh:
            yaml.safe_dump(report, fh, sort_keys=True)
    return 1 if golden.mismatches else 0


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    if not isinstance(cfg.model, PhaseInsensitive):
        raise PhaseSpaceError("sweep scenarios require the phase-insensitive model")
    if not cfg.times:
        raise PhaseSpaceError("sweep scenarios require times")
    if len(cfg.orders) != 1:
        raise PhaseSpaceError("sweep scenarios take a single order")
    a = cfg.orders[0]
    out = _out_dir(args, cfg)
    golden = _GoldenChecker()
    rho0 = states.density_matrix(cfg.state, cfg.cutoff)
    snaps = _oracle_snapshots(cfg, cfg.times)
    report = {"times": [], "swept_order": [], "max_abs_diff": []}
    worst = 0.0
    for t in cfg.times:
        swept = sweep_order(a, cfg.model.kappa, t)
        pred = dist.evaluate_grid(rho0, swept, cfg.grid, threads=args.threads,
                                  method="oracle")
        ora = dist.evaluate_grid(snaps[t], a, cfg.grid, threads=args.threads,
                                 method="oracle")
        diff = float(np.abs(pred.values - ora.values).max())
        worst = max(worst, diff)
        print(f"sweep t={t:g} order {a.a:g} -> {swept.a:g} max_abs_diff {diff:.3e}")
        _write_field(pred, out / f"sweep_pred_t{_fmt_time(t)}.csv", cfg, golden,
                     {"swept_order": swept.a})
        _write_field(ora, out / f"sweep_oracle_t{_fmt_time(t)}.csv", cfg, golden,
                     {"oracle_time": t})
        report["times"].append(t)
        report["swept_order"].append(swept.a)
        report["max_abs_diff"].append(diff)
    with open(out / "sweep_report.yaml", "w") as fh:
        yaml.safe_dump(report, fh, sort_keys=True)
    if golden.mismatches:
        return 1
    return 0


def cmd_verify(args) -> int:
    try:
        results = verify.run_suite(args.suite)
    except ValueError as exc:
        print(f"error: usage: {exc}", file=sys.stderr)
        return 2
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    for res in results:
        print(res.line())
    n_fail = sum(not r.passed for r in results)
    doc = {
        "suite": args.suite,
        "package_version": __version__,
        "passed": n_fail == 0,
        "arbitration": verify.arbitration_summary(),
        "checks": [
            {"suite": r.suite, "name": r.name, "passed": r.passed,
             "value": r.value, "limit": r.limit, "note": r.note}
            for r in results
        ],
    }
    with open(out / "verify_report.yaml", "w") as fh:
        yaml.safe_dump(doc, fh, sort_keys=False)
    print(f"{len(results) - n_fail}/{len(results)} checks passed")
    return 0 if n_fail == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="phasespace",
        description="Phase-space distributions of bosonic states: evaluation, "
                    "exact dissipative evolution, and brute-force verification.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", required=True, help="scenario YAML")
        sp.add_argument("--threads", type=int, default=1,
                        help="grid-evaluation threads (1 = bitwise reproducible)")
        sp.add_argument("--out", help="output directory (overrides config)")

    sp = sub.add_parser("dist", help="sample distributions of a static state")
    common(sp)
    sp.add_argument("--method", choices=["closed-form", "oracle", "both"],
                    default=None, help="evaluation route (overrides config)")
    sp.set_defaults(func=cmd_dist)

    sp = sub.add_parser("evolve", help="evolve distributions under a model")
    common(sp)
    sp.add_argument("--oracle", action="store_true",
                    help="also integrate the master equation and report deviations")
    sp.set_defaults(func=cmd_evolve)

    sp = sub.add_parser("sweep", help="order-sweep comparison for the "
                        "phase-insensitive model")
    common(sp)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("verify", help="run a verification suite")
    sp.add_argument("--suite", default="all",
                    help=f"one of {', '.join(verify.SUITES)}")
    sp.add_argument("--out", help="report directory")
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PhaseSpaceError as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return 2
    except (ValueError, TypeError) as exc:
        print(f"error: usage: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
