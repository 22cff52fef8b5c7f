"""Command-line front end.

Subcommands print a short report on standard output and, with ``--out``,
write CSV (12 significant digits). Logs go to standard error.

Exit codes: 0 success, 2 invalid input, 3 non-convergence under
``--strict``, 4 failed ``--verify`` check.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .asymptotics import (
    PatternFamily, maximize_kl_xy, maximize_kl_xyx, maximize_kl_yx, maximize_kl_yxy, optimal_pattern,
    yx_threshold_residual,
)
from .errors import FusionError
from .models import CorrelatedModel, WgnModel, centralized_np, n_sensor_wgn, two_sensor_wgn
from .netfile import load_network
from .netgraph import message_bits, tandem, threshold_count
from .objectives import ChannelSet, CostMatrix
from .optimizer import OptConfig, np_solve, optimize_correlated, pbpo_bayes
from .optimizer.neyman import XYX

log = logging.getLogger("fusionnet")

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NOT_CONVERGED = 3
EXIT_VERIFY = 4

ORDER_SLACK = 1e-6
STRICT_GAIN = 1e-4
KL_MATCH = 1e-6
CURVE_PF_TOL = 1e-9


class UsageError(FusionError, ValueError):
    """Bad command-line input that argparse cannot catch by itself."""


@dataclass(frozen=True)
class SweepSpec:
    var: str
    lo: float
    hi: float
    steps: int
    log_scale: bool = False

    def __post_init__(self):
        if self.steps < 1:
            raise UsageError(f"sweep {self.var}: need at least 1 step")
        if not (self.lo < self.hi or (self.steps == 1 and self.lo == self.hi)):
            raise UsageError(f"sweep {self.var}: need lo < hi (lo == hi only with 1 step)")
        if self.log_scale and self.lo <= 0:
            raise UsageError(f"sweep {self.var}: log spacing needs lo > 0")

    @classmethod
    def parse(cls, text: str) -> "SweepSpec":
        parts = text.split(":")
        if len(parts) not in (4, 5) or (len(parts) == 5 and parts[4] not in ("log", "lin")):
            raise UsageError(f"sweep must look like var:lo:hi:steps[:log], got {text!r}")
        try:
            lo, hi, steps = float(parts[1]), float(parts[2]), int(parts[3])
        except ValueError:
            raise UsageError(f"sweep {text!r}: lo/hi must be numbers and steps an integer") from None
        return cls(parts[0], lo, hi, steps, len(parts) == 5 and parts[4] == "log")

    def values(self) -> list[float]:
        if self.log_scale:
            v = np.geomspace(self.lo, self.hi, self.steps)
        else:
            v = np.linspace(self.lo, self.hi, self.steps)
        return [float(x) for x in v]


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    return "{:.12g}".format(float(v))


def write_table(header, rows, out: str | None, dat: bool = False) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    text = buf.getvalue()
    if out is None:
        sys.stdout.write(text)
        return
    Path(out).write_text(text)
    log.info("wrote %s", out)
    if dat:
        twin = Path(out).with_suffix(".dat")
        lines = ["# " + " ".join(header)] + [" ".join(fmt(v) for v in r) for r in rows]
        twin.write_text("\n".join(lines) + "\n")
        log.info("wrote %s", twin)


def parse_cost(text: str) -> CostMatrix:
    parts = text.split(",")
    if len(parts) != 4:
        raise UsageError("--cost takes four comma-separated values c00,c01,c10,c11")
    try:
        return CostMatrix(*(float(p) for p in parts))
    except ValueError as exc:
        raise UsageError(f"--cost: {exc}") from None


def parse_list(text: str, what: str) -> list[float]:
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise UsageError(f"{what}: expected comma-separated numbers, got {text!r}") from None


def config_from(args) -> OptConfig:
    return OptConfig(tol=args.tol, max_iter=args.max_iter, restarts=args.restarts,
                     grid_points=args.grid_points, rng_seed=args.seed)


def pool_map(fn, items, jobs: int):
    """Ordered map, in a process pool when ``jobs > 1``."""
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


class Checks:
    """Collects ``--verify`` outcomes."""

    def __init__(self):
        self.failures = []

    def check(self, ok: bool, message: str) -> None:
        if ok:
            log.info("verify ok: %s", message)
        else:
            log.error("verify FAILED: %s", message)
            self.failures.append(message)


# ---------------------------------------------------------------- subcommands


def cmd_threshold_count(args) -> int:
    spec = load_network(args.network)
    print(threshold_count(spec.dag))
    return EXIT_OK


def _prior_cost(args, spec):
    prior = args.prior if args.prior is not None else (spec.prior if spec.prior is not None else 0.5)
    if args.cost is not None:
        cost = parse_cost(args.cost)
    else:
        cost = spec.cost or CostMatrix.zero_one()
    return prior, cost


def cmd_optimize(args) -> int:
    spec = load_network(args.network)
    if spec.model is None:
        raise UsageError(f"{args.network}: no 'model' line")
    cfg = config_from(args)
    prior, cost = _prior_cost(args, spec)
    objective = args.objective
    rows = []
    if isinstance(spec.model, CorrelatedModel):
        if objective not in ("bayes", "pe"):
            raise UsageError("the correlated model supports --objective bayes or pe")
        if objective == "pe":
            cost = CostMatrix.zero_one()
        model = spec.model.swapped() if args.direction == "xy" else spec.model
        res = optimize_correlated(model, prior, cfg, cost)
        print(f"objective: {objective} (direction {args.direction})")
        print(f"value: {fmt(res.objective_value)}")
        names = ("t_minus", "t_plus", "T0_minus", "T0_plus", "T1_minus", "T1_plus")
        for name, v in zip(names, res.rules.as_tuple()):
            print(f"{name}: {fmt(v)}")
            rows.append((name, v))
        header = ("threshold", "value")
    elif objective in ("bayes", "pe"):
        if objective == "pe":
            cost = CostMatrix.zero_one()
        channels = ChannelSet.symmetric_flips(spec.dag, args.channel_flip) if args.channel_flip else None
        res = pbpo_bayes(spec.model, spec.dag, cost, prior, cfg, channels)
        print(f"objective: {objective}")
        print(f"value: {fmt(res.objective_value)}")
        rows = _rule_rows(spec.dag, res)
        header = ("node", "message", "threshold", "P0", "P1")
    elif objective == "np":
        if args.alpha is None:
            raise UsageError("--objective np needs --alpha")
        topo = XYX if args.interactive else spec.dag
        res = np_solve(spec.model, topo, args.alpha, cfg)
        print(f"objective: np (alpha {fmt(args.alpha)}{', interactive' if args.interactive else ''})")
        print(f"P_d: {fmt(res.details['pd'])}")
        print(f"P_f: {fmt(res.details['pf'])}")
        print(f"multiplier: {fmt(res.details['multiplier'])}")
        if args.interactive:
            print(f"rules: {res.rules}")
            rows = [("pd", res.details["pd"]), ("pf", res.details["pf"]), ("multiplier", res.details["multiplier"])]
            header = ("quantity", "value")
        else:
            rows = _rule_rows(spec.dag, res)
            header = ("node", "message", "threshold", "P0", "P1")
    elif objective == "kl":
        if spec.dag.edges != ((2, 1),):
            raise UsageError("--objective kl needs the tandem network 2 -> 1")
        opt = maximize_kl_yx(spec.model, cfg)
        res = None
        print("objective: kl (final decision at node 1)")
        print(f"value: {fmt(opt.value)}")
        print(f"threshold: {fmt(opt.thresholds[0])}  alpha: {fmt(opt.alpha[0])}  beta: {fmt(opt.beta[0])}")
        print(f"threshold residual: {fmt(yx_threshold_residual(opt.thresholds[0], opt.alpha[0], opt.beta[0]))}")
        rows = [("value", opt.value), ("threshold", opt.thresholds[0]), ("alpha", opt.alpha[0]), ("beta", opt.beta[0])]
        header = ("quantity", "value")
        if args.strict and not opt.converged:
            log.error("search did not converge")
            return EXIT_NOT_CONVERGED
    else:  # argparse restricts choices
        raise UsageError(f"unknown objective {objective}")
    if res is not None:
        print(f"converged: {'yes' if res.converged else 'no'}  iterations: {res.iterations}  "
              f"residual: {fmt(res.fixed_point_residual)}  degenerate updates: {res.degenerate_updates}")
    if args.out:
        write_table(header, rows, args.out, args.dat)
    if args.verify and res is not None and objective in ("bayes", "pe") and not isinstance(spec.model, CorrelatedModel):
        checks = Checks()
        checks.check(not res.converged or res.fixed_point_residual <= cfg.tol, "fixed-point residual within tol")
        if checks.failures:
            return EXIT_VERIFY
    if args.strict and res is not None and not res.converged:
        log.error("optimizer did not converge")
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def _rule_rows(dag, res):
    rows = []
    for k in dag.nodes:
        for c, lam in enumerate(res.rules[k]):
            bits = "".join(str(b) for b in message_bits(dag, k, c)) or "-"
            p = res.region_probs[k][:, c]
            print(f"node {k} message {bits}: threshold {fmt(lam)}  P0 {fmt(p[0])}  P1 {fmt(p[1])}")
            rows.append((k, bits, lam, p[0], p[1]))
    return rows


def _np_point(task):
    sx, sy, alpha, cfg = task
    m = two_sensor_wgn(sx, sy)
    yx = np_solve(m, tandem(), alpha, cfg, pf_tol=CURVE_PF_TOL)
    xyx = np_solve(m, XYX, alpha, cfg, pf_tol=CURVE_PF_TOL)
    pd_c, _ = centralized_np(sx, sy, alpha)
    return (sx, yx.details["pd"], xyx.details["pd"], pd_c, yx.details["pf"], xyx.details["pf"],
            yx.converged, xyx.converged)


def cmd_np_curve(args) -> int:
    cfg = config_from(args)
    sweep = SweepSpec.parse(args.sweep)
    tasks = [(sx, args.sigma_y, args.alpha, cfg) for sx in sweep.values()]
    rows = pool_map(_np_point, tasks, args.jobs)
    header = ("sigma_x", "Pd_YX", "Pd_XYX", "Pd_central", "Pf_YX", "Pf_XYX", "converged_YX", "converged_XYX")
    write_table(header, rows, args.out, args.dat)
    status = EXIT_OK
    if args.verify:
        checks = Checks()
        for sx, yx, xyx, cen, *_ in rows:
            checks.check(yx <= xyx + ORDER_SLACK and xyx <= cen + ORDER_SLACK,
                         f"sigma_x={fmt(sx)}: Pd_YX <= Pd_XYX <= Pd_central")
        gain = max(r[2] - r[1] for r in rows)
        checks.check(gain > STRICT_GAIN, f"interactive gain {fmt(gain)} > {STRICT_GAIN:g}")
        if checks.failures:
            status = EXIT_VERIFY
    if status == EXIT_OK and args.strict and not all(r[6] and r[7] for r in rows):
        status = EXIT_NOT_CONVERGED
    return status


def _kl_point(task):
    sx, sy, cfg = task
    m = two_sensor_wgn(sx, sy)
    out = [maximize_kl_yx(m, cfg), maximize_kl_xyx(m, cfg), maximize_kl_xy(m, cfg), maximize_kl_yxy(m, cfg)]
    return (sx, *(o.value for o in out), all(o.converged for o in out))


def cmd_kl_curve(args) -> int:
    cfg = config_from(args)
    sweep = SweepSpec.parse(args.sweep)
    rows = pool_map(_kl_point, [(sx, args.sigma_y, cfg) for sx in sweep.values()], args.jobs)
    write_table(("sigma_x", "K_YX", "K_XYX", "K_XY", "K_YXY", "converged"), rows, args.out, args.dat)
    status = EXIT_OK
    if args.verify:
        checks = Checks()
        for sx, kyx, kxyx, kxy, kyxy, _ in rows:
            checks.check(abs(kyx - kxyx) <= KL_MATCH and abs(kxy - kyxy) <= KL_MATCH,
                         f"sigma_x={fmt(sx)}: interactive and one-way KL coincide")
            if abs(sx - args.sigma_y) <= 1e-12:
                checks.check(abs(kyx - kxy) <= KL_MATCH, f"sigma_x={fmt(sx)}: curves cross")
            elif sx < args.sigma_y:
                checks.check(kyx > kxy, f"sigma_x={fmt(sx)}: final decision at X is better")
            else:
                checks.check(kyx < kxy, f"sigma_x={fmt(sx)}: final decision at Y is better")
        if checks.failures:
            status = EXIT_VERIFY
    if status == EXIT_OK and args.strict and not all(r[5] for r in rows):
        status = EXIT_NOT_CONVERGED
    return status


def _direction_point(task):
    ss, tau, lam, mu, prior, cfg = task
    m = CorrelatedModel(mu, ss * ss, tau, lam)
    yx = optimize_correlated(m, prior, cfg)
    xy = yx if tau == lam else optimize_correlated(m.swapped(), prior, cfg)
    return (ss, tau, yx.objective_value, xy.objective_value, yx.converged, xy.converged)


def cmd_compare_direction(args) -> int:
    cfg = config_from(args)
    sweep = SweepSpec.parse(args.sweep)
    sig_s = parse_list(args.sigma_s, "--sigma-s")
    tasks = [(ss, tau, args.lam, args.mu, args.prior, cfg) for ss in sig_s for tau in sweep.values()]
    rows = pool_map(_direction_point, tasks, args.jobs)
    write_table(("sigma_s", "tau", "Pe_YX", "Pe_XY", "converged_YX", "converged_XY"), rows, args.out, args.dat)
    status = EXIT_OK
    if args.verify:
        checks = Checks()
        for ss, tau, pyx, pxy, *_ in rows:
            where = f"sigma_s={fmt(ss)} tau={fmt(tau)}"
            if abs(tau - args.lam) <= 1e-12 * args.lam:
                checks.check(abs(pyx - pxy) <= 2 * cfg.tol, f"{where}: directions agree")
            else:
                want = 1 if tau > args.lam else -1
                checks.check(np.sign(pyx - pxy) == want, f"{where}: better sensor is the better fusion center")
            if ss == 0 and args.mu == 1.0:
                ref = pbpo_bayes(WgnModel((math.sqrt(tau), math.sqrt(args.lam))), tandem(),
                                 CostMatrix.zero_one(), args.prior, cfg).objective_value
                checks.check(abs(pyx - ref) <= ORDER_SLACK, f"{where}: matches the independent tandem ({fmt(ref)})")
        if checks.failures:
            status = EXIT_VERIFY
    if status == EXIT_OK and args.strict and not all(r[4] and r[5] for r in rows):
        status = EXIT_NOT_CONVERGED
    return status


def _pattern_point(task):
    sigma, dags, cfg = task
    out = [sigma]
    conv = True
    for d in dags:
        res = pbpo_bayes(n_sensor_wgn([sigma] * d.n), d, CostMatrix.zero_one(), 0.5, cfg)
        out.append(res.objective_value)
        conv = conv and res.converged
    out.append(conv)
    return tuple(out)


def _family_point(task):
    sigma, n, max_edges, cfg = task
    d, node, value = optimal_pattern(PatternFamily(n, max_edges), n_sensor_wgn([sigma] * n), cfg)
    edges = " ".join(f"{i}->{j}" for i, j in d.edges)
    return (sigma, edges, node, value)


def cmd_compare_patterns(args) -> int:
    cfg = config_from(args)
    sweep = SweepSpec.parse(args.sweep)
    status = EXIT_OK
    if args.family:
        n, max_edges = (int(v) for v in parse_list(args.family, "--family"))
        rows = pool_map(_family_point, [(s, n, max_edges, cfg) for s in sweep.values()], args.jobs)
        write_table((sweep.var, "edges", "fusion_center", "chernoff"), rows, args.out, args.dat)
        return status
    if len(args.networks) != 2:
        raise UsageError("compare-patterns needs two network files or --family n,L")
    dags = [load_network(p).dag for p in args.networks]
    rows = pool_map(_pattern_point, [(s, dags, cfg) for s in sweep.values()], args.jobs)
    write_table((sweep.var, "risk_A", "risk_B", "converged"), rows, args.out, args.dat)
    if args.verify:
        checks = Checks()
        for s, ra, rb, _ in rows:
            checks.check(ra <= rb + 2 * cfg.tol, f"{sweep.var}={fmt(s)}: first network risk <= second")
        if checks.failures:
            status = EXIT_VERIFY
    if status == EXIT_OK and args.strict and not all(r[3] for r in rows):
        status = EXIT_NOT_CONVERGED
    return status


# ---------------------------------------------------------------- parser


def _verbose(p, default):
    p.add_argument("-v", "--verbose", action="store_true", default=default,
                   help="informational logging on standard error")


def _common(p, restarts=OptConfig.restarts):
    p.add_argument("--tol", type=float, default=OptConfig.tol)
    p.add_argument("--max-iter", type=int, default=OptConfig.max_iter)
    p.add_argument("--restarts", type=int, default=restarts)
    p.add_argument("--grid-points", type=int, default=OptConfig.grid_points)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="CSV output path (default: standard output)")
    p.add_argument("--dat", action="store_true", help="also write a whitespace-separated .dat twin of --out")
    p.add_argument("--verify", action="store_true", help="fail with exit code 4 if a claimed property does not hold")
    p.add_argument("--strict", action="store_true", help="fail with exit code 3 if an optimizer does not converge")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    _verbose(p, argparse.SUPPRESS)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fusionnet", description="Decision fusion in sensor networks.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _verbose(p, False)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("threshold-count", help="number of LRT thresholds of a network")
    s.add_argument("network")
    _verbose(s, argparse.SUPPRESS)
    s.set_defaults(func=cmd_threshold_count)

    s = sub.add_parser("optimize", help="optimize the rules of one network")
    s.add_argument("network")
    s.add_argument("--objective", choices=("bayes", "pe", "np", "kl"), default="bayes")
    s.add_argument("--alpha", type=float)
    s.add_argument("--prior", type=float)
    s.add_argument("--cost", help="c00,c01,c10,c11")
    s.add_argument("--channel-flip", type=float, default=0.0, help="flip probability on every arrow")
    s.add_argument("--interactive", action="store_true", help="np on two sensors: interactive X->Y->X process")
    s.add_argument("--direction", choices=("yx", "xy"), default="yx", help="correlated model: fusion direction")
    _common(s)
    s.set_defaults(func=cmd_optimize)

    s = sub.add_parser("np-curve", help="detection probability of YX, XYX and centralized tests")
    s.add_argument("--alpha", type=float, default=0.2)
    s.add_argument("--sigma-y", type=float, default=1.0)
    s.add_argument("--sweep", default="sigma_x:0.5:2:16")
    _common(s)
    s.set_defaults(func=cmd_np_curve)

    s = sub.add_parser("kl-curve", help="maximal KL distance of the four two-sensor processes")
    s.add_argument("--sigma-y", type=float, default=1.0)
    s.add_argument("--sweep", default="sigma_x:0.5:2:7")
    _common(s, restarts=1)
    s.set_defaults(func=cmd_kl_curve)

    s = sub.add_parser("compare-direction", help="error probability of YX vs XY in the correlated model")
    s.add_argument("--lam", type=float, default=1.0)
    s.add_argument("--mu", type=float, default=1.0)
    s.add_argument("--prior", type=float, default=0.5)
    s.add_argument("--sigma-s", default="0,1,3,5,7", help="comma-separated signal standard deviations")
    s.add_argument("--sweep", default="tau:0.25:4:5:log")
    _common(s)
    s.set_defaults(func=cmd_compare_direction)

    s = sub.add_parser("compare-patterns", help="optimized risk of two networks, or the best pattern of a family")
    s.add_argument("networks", nargs="*")
    s.add_argument("--family", help="n,L: search connected patterns with at most L arrows")
    s.add_argument("--sweep", default="sigma_1:0.5:2:3:log")
    _common(s)
    s.set_defaults(func=cmd_compare_patterns)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(stream=sys.stderr, level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if getattr(args, "jobs", 1) < 1:
            raise UsageError("--jobs must be at least 1")
        return args.func(args)
    except (FusionError, ValueError, OSError) as exc:
        log.error("%s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
