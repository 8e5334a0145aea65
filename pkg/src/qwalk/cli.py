"""Command line interface: ``qwalk {transition,kernel,pushasep,gue,verify}``.

Every subcommand takes ``--config file.json`` whose keys are the long flag
names (dashes or underscores); explicit flags win over the file.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from .glaurent import AdmissibleFunction
from .gt import Signature
from .harness import ConfigError, ExperimentConfig, run_experiment


def _writer(path):
    fh = open(path, "w", newline="") if path else sys.stdout
    return fh, csv.writer(fh, lineterminator="\n")


def _split(text) -> list[str]:
    return [v for v in str(text).translate(str.maketrans("", "", "()[] ")).split(",") if v]


def _floats(text) -> tuple[float, ...]:
    return tuple(float(v) for v in _split(text))


def _ints(text) -> tuple[int, ...]:
    return tuple(int(v) for v in _split(text))


def cmd_transition(args) -> int:
    from .schur import GeometricSpec
    from .transitions import TransitionSpec, transition_row

    lam = Signature.parse(args.from_) if args.from_ else Signature.zero(args.n)
    if len(lam) != args.n:
        raise SystemExit("--from must have N parts")
    ts = TransitionSpec(AdmissibleFunction.parse(args.g), GeometricSpec(args.q, args.n))
    row = transition_row(lam, ts, args.tol)
    order = np.argsort(-row.probs, kind="stable")
    fh, w = _writer(args.out)
    w.writerow(["mu", "probability"])
    for i in order:
        w.writerow([Signature(tuple(int(v) for v in row.mus[i])).to_string(), repr(float(row.probs[i]))])
    if args.out:
        fh.close()
    print(f"# captured mass {row.captured_mass!r}, tail bound {row.tail_bound:g}", file=sys.stderr)
    return 0


def cmd_kernel(args) -> int:
    from .kernel import KernelSpec, SpaceTimePoint, correlation_fn, kernel_matrix

    level = math.inf if str(args.level).lower() in ("inf", "infinity") else int(args.level)
    if args.rates:
        gp, gm = _floats(args.rates)
        ks = KernelSpec(args.q, level, rates=(gp, gm))
    else:
        ks = KernelSpec(args.q, level, g=AdmissibleFunction.parse(args.g))
    pts = SpaceTimePoint.parse_list(args.points)
    m = kernel_matrix(pts, ks)
    fh, w = _writer(args.out)
    w.writerow(["x1", "t1", "x2", "t2", "kernel_real", "kernel_imag"])
    for i, a in enumerate(pts):
        for j, b in enumerate(pts):
            w.writerow([a.x, a.t, b.x, b.t, repr(float(m[i, j].real)), repr(float(m[i, j].imag))])
    if len(set(pts)) == len(pts):
        w.writerow([])
        w.writerow(["n", "rho_n"])
        w.writerow([len(pts), repr(float(correlation_fn(pts, ks)))])
    if args.out:
        fh.close()
    return 0


def cmd_pushasep(args) -> int:
    from .pushasep import PushASEPSystem, rescale_many, simulate_many, transition_box

    zeta = _floats(args.zeta)
    y = _ints(args.y) if args.y else tuple(range(1 - len(zeta), 1))
    sys_ = PushASEPSystem(zeta, args.a, args.b, y)
    fh, w = _writer(args.out)
    n = sys_.N
    if args.exact is not None:
        xs, p = transition_box(y, args.t, sys_, int(args.exact))
        w.writerow([f"x{i + 1}" for i in range(n)] + ["probability"])
        for x, pi in zip(xs, p):
            w.writerow([*map(int, x), repr(float(pi))])
        print(f"# box mass {float(p.sum())!r}", file=sys.stderr)
    else:
        s = simulate_many(sys_, args.t, args.reps, args.seed)
        header = [f"x{i + 1}" for i in range(n)]
        cols = [s[:, i] for i in range(n)]
        if args.rescale:
            norm = sys_.normalized()
            tilde, gaps = rescale_many(s, args.t, norm)
            header += [f"tilde{k + 1}" for k in range(tilde.shape[1])] + [f"gap{j}" for j in sorted(gaps)]
            cols += [tilde[:, k] for k in range(tilde.shape[1])] + [gaps[j] for j in sorted(gaps)]
        w.writerow(header)
        for r in range(s.shape[0]):
            w.writerow([c[r].item() if c.dtype.kind == "i" else repr(float(c[r])) for c in cols])
    if args.out:
        fh.close()
    return 0


def cmd_gue(args) -> int:
    from .gue import gue1_density, sample_gue_corners

    fh, w = _writer(args.out)
    if args.density_grid:
        lo, hi, m = _floats(args.density_grid)
        grid = np.linspace(lo, hi, int(m))
        w.writerow([f"y{i + 1}" for i in range(args.n)] + ["density"])
        mesh = np.meshgrid(*([grid] * args.n), indexing="ij")
        pts = np.stack([g.ravel() for g in mesh], axis=1)
        for p in pts:
            if np.all(np.diff(p) >= 0):
                w.writerow([*map(repr, map(float, p)), repr(gue1_density(p))])
    else:
        y = sample_gue_corners(args.n, np.random.default_rng(args.seed), args.reps)
        w.writerow([f"y{i + 1}" for i in range(args.n)])
        for row in y:
            w.writerow([repr(float(v)) for v in row])
    if args.out:
        fh.close()
    return 0


def cmd_verify(args) -> int:
    if args.config_file:
        cfg = ExperimentConfig.load(args.config_file)
    elif args.criterion:
        path = Path(args.configs) / f"{args.criterion}.json"
        if path.exists():
            cfg = ExperimentConfig.load(path)
        else:
            if args.seed is None:
                raise ConfigError(f"no config at {path}; pass --seed to run with default parameters")
            cfg = ExperimentConfig(args.criterion, args.seed)
    else:
        raise ConfigError("give --criterion or --config")
    if args.seed is not None:
        cfg.seed = args.seed
    res = run_experiment(cfg, args.out)
    for r in res.reports:
        print(r.line())
    if res.run_dir is not None:
        print(f"# run directory {res.run_dir}", file=sys.stderr)
    return 0 if res.passed else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qwalk", description="q-deformed Gelfand-Tsetlin dynamics toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("transition", help="one row of P_N(lambda -> .)")
    t.add_argument("--config")
    t.add_argument("--n", type=int, default=2)
    t.add_argument("--q", type=float, default=0.5)
    t.add_argument("--g", default="bernoulli_up:1")
    t.add_argument("--from", dest="from_", default=None, help="starting signature, e.g. '1,0'")
    t.add_argument("--tol", type=float, default=1e-12)
    t.add_argument("--out")
    t.set_defaults(func=cmd_transition)

    k = sub.add_parser("kernel", help="kernel matrix and rho_n at space-time points")
    k.add_argument("--config")
    k.add_argument("--q", type=float, default=0.5)
    k.add_argument("--g", default="bernoulli_up:1")
    k.add_argument("--rates", default=None, help="continuous time: 'gamma_plus,gamma_minus'")
    k.add_argument("--level", default="inf")
    k.add_argument("--points", default="(0,1),(1,1)")
    k.add_argument("--out")
    k.set_defaults(func=cmd_kernel)

    a = sub.add_parser("pushasep", help="simulate PushASEP or tabulate exact transition probabilities")
    a.add_argument("--config")
    a.add_argument("--zeta", default="1,1")
    a.add_argument("--a", type=float, default=1.0)
    a.add_argument("--b", type=float, default=0.5)
    a.add_argument("--t", type=float, default=1.0)
    a.add_argument("--y", default=None, help="initial positions, default packed ending at 0")
    a.add_argument("--reps", type=int, default=1000)
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--exact", type=int, default=None, metavar="WIDTH", help="print exact probabilities on a box")
    a.add_argument("--rescale", action="store_true")
    a.add_argument("--out")
    a.set_defaults(func=cmd_pushasep)

    g = sub.add_parser("gue", help="sample GUE corner minima or tabulate their density")
    g.add_argument("--config")
    g.add_argument("--n", type=int, default=2)
    g.add_argument("--reps", type=int, default=1000)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--density-grid", default=None, metavar="LO,HI,M")
    g.add_argument("--out")
    g.set_defaults(func=cmd_gue)

    v = sub.add_parser("verify", help="run an acceptance criterion; exit 0 iff every threshold passes")
    v.add_argument("--criterion", help="A1 ... A10")
    v.add_argument("--config", dest="config_file")
    v.add_argument("--configs", default="configs", help="directory holding <criterion>.json")
    v.add_argument("--seed", type=int, default=None)
    v.add_argument("--out", default=None, help="root for run directories (overrides the config)")
    v.set_defaults(func=cmd_verify)
    return p


def _apply_config(parser: argparse.ArgumentParser, args, argv) -> argparse.Namespace:
    """Fill flags from a JSON file, keeping values given explicitly on the command line."""
    if args.command == "verify" or not getattr(args, "config", None):
        return args
    with open(args.config) as fh:
        data = json.load(fh)
    given = {a.split("=")[0].lstrip("-").replace("-", "_") for a in argv if a.startswith("--")}
    for key, val in data.items():
        dest = key.replace("-", "_")
        dest = "from_" if dest == "from" else dest
        if not hasattr(args, dest):
            raise ConfigError(f"unknown option {key!r} in {args.config}")
        if dest.rstrip("_") not in given:
            setattr(args, dest, str(val) if isinstance(val, list) else val)
    return args


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = _apply_config(parser, args, argv)
        return int(args.func(args))
    except (ConfigError, ValueError) as exc:
        print(f"qwalk: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
