"""Acceptance experiments A1-A10.

Each experiment has the signature ``fn(params, thresholds, seed)`` and returns
``(reports, tables)``.  Empty ``params``/``thresholds`` reproduce the default
acceptance settings; every value can be overridden from a JSON config.
"""
from __future__ import annotations

import math
import time
from itertools import combinations

import numpy as np

from .glaurent import AdmissibleFunction
from .gt import Signature, signature_to_config
from .gue import gue2_box_prob, gue2_marginal_cdf, gauss_gn_contour, gauss_gn_hermite, integrate_density_n2, sample_gue_corners
from .harness import TestReport, chi_square, counts_for, discrepancy_report, jitter, ks_test
from .kernel import KernelSpec, SpaceTimePoint, correlation_fn, kernel_finite_N, kernel_limit
from .pushasep import (
    PushASEPSystem,
    geometric_pmf,
    rescale_many,
    simulate_discrete_column_many,
    simulate_many,
    transition_box,
)
from .schur import GeometricSpec
from .transitions import (
    CLOSED_KINDS,
    TransitionSpec,
    chain_distribution,
    transition_prob,
    transition_prob_closed,
    transition_row,
    verify_commutation,
)

DEFAULT_GS = ["bernoulli_up:1", "bernoulli_down:0.5", "geom_down:0.3", "poisson_up:0.2"]


def _timed(report: TestReport, t0: float) -> TestReport:
    report.runtime = time.perf_counter() - t0
    return report


def _random_signature(rng: np.random.Generator, n: int, lo: int, hi: int) -> Signature:
    return Signature(tuple(sorted(rng.integers(lo, hi + 1, size=n).tolist(), reverse=True)))


# -- A1 ----------------------------------------------------------------------------------

def a1_row_sums(params: dict, thresholds: dict, seed: int):
    q = params.get("q", 0.5)
    levels = params.get("levels", [1, 2, 3])
    gs = params.get("g", DEFAULT_GS)
    n_lam = params.get("n_lambdas", 50)
    lo, hi = params.get("parts_range", [-3, 3])
    tol = params.get("tail_tol", 1e-10)
    thr = thresholds.get("max_defect", 1e-8)
    rng = np.random.default_rng(seed)
    t0 = time.perf_counter()
    rows, worst = [], 0.0
    for n in levels:
        for gs_ in gs:
            ts = TransitionSpec.make(gs_, q, n)
            for _ in range(n_lam):
                lam = _random_signature(rng, n, lo, hi)
                row = transition_row(lam, ts, tol)
                defect = abs(1.0 - row.captured_mass)
                worst = max(worst, defect)
                rows.append([n, gs_, lam.to_string(), len(row), row.captured_mass, row.tail_bound])
    rep = discrepancy_report("A1 row sums", worst, thr, tail_tol=tol, rows=len(rows))
    return [_timed(rep, t0)], {"rows": (["N", "g", "lambda", "support", "row_sum", "tail_bound"], rows)}


# -- A2 ----------------------------------------------------------------------------------

def a2_commutation(params: dict, thresholds: dict, seed: int):
    q = params.get("q", 0.5)
    levels = params.get("levels", [1, 2, 3])
    gs = params.get("g", DEFAULT_GS)
    per_level = params.get("lambdas_per_level", {"1": 20, "2": 12, "3": 6})
    lo, hi = params.get("parts_range", [-2, 2])
    tol = params.get("tail_tol", 1e-12)
    thr = thresholds.get("max_discrepancy", 1e-8)
    rng = np.random.default_rng(seed)
    t0 = time.perf_counter()
    rows, worst = [], 0.0
    for n in levels:
        for gs_ in gs:
            lams = [_random_signature(rng, n + 1, lo, hi) for _ in range(int(per_level[str(n)]))]
            d = verify_commutation(q, n, AdmissibleFunction.parse(gs_), lams, tol)
            worst = max(worst, d)
            rows.append([n, gs_, ";".join(l.to_string() for l in lams), d])
    rep = discrepancy_report("A2 commutation", worst, thr, tail_tol=tol, cells=len(rows))
    return [_timed(rep, t0)], {"commutation": (["N", "g", "lambdas", "discrepancy"], rows)}


# -- A3 ----------------------------------------------------------------------------------

def _strip_partner(rng, big: Signature, kind: str) -> Signature:
    """A signature mu with big/mu (geometric) or big - mu (Bernoulli) admissible for ``kind``."""
    n = len(big)
    if kind.startswith("bernoulli"):
        while True:
            d = rng.integers(0, 2, size=n)
            mu = tuple(b + int(x) for b, x in zip(big.parts, d))
            if all(mu[i] >= mu[i + 1] for i in range(n - 1)):
                return Signature(mu)
    mu = [big[0] + int(rng.integers(0, 4))]
    for i in range(1, n):
        mu.append(int(rng.integers(big[i], big[i - 1] + 1)))
    return Signature(tuple(mu))


def a3_closed_forms(params: dict, thresholds: dict, seed: int):
    q = params.get("q", 0.5)
    n_pairs = params.get("n_pairs", 200)
    max_n = params.get("max_level", 4)
    lo, hi = params.get("parts_range", [-3, 3])
    kinds = params.get("kinds", {"geom_up": 0.1, "bernoulli_up": 0.7, "geom_down": 0.4, "bernoulli_down": 1.3})
    zero_abs = params.get("zero_pair_abs_tol", 1e-12)
    thr = thresholds.get("max_relative_error", 1e-12)
    rng = np.random.default_rng(seed)
    t0 = time.perf_counter()
    rows, worst_rel, worst_zero = [], 0.0, 0.0
    names = [k for k in CLOSED_KINDS if k in kinds]
    for i in range(n_pairs):
        kind = names[i % len(names)]
        param = float(kinds[kind])
        n = int(rng.integers(1, max_n + 1))
        lam = _random_signature(rng, n, lo, hi)
        if rng.random() < 0.75:
            if kind.endswith("_up"):
                mu = _strip_partner(rng, lam, kind)
            else:
                mu = lam
                lam = _strip_partner(rng, mu, kind)
        else:
            mu = _random_signature(rng, n, lo - 1, hi + 1)
        spec = GeometricSpec(q, n)
        ts = TransitionSpec(AdmissibleFunction.parse(f"{kind}:{param}"), spec)
        p_det = transition_prob(lam, mu, ts)
        p_cf = transition_prob_closed(lam, mu, kind, param, spec)
        if p_cf > 0:
            err = abs(p_det - p_cf) / p_cf
            worst_rel = max(worst_rel, err)
        else:
            err = abs(p_det)
            worst_zero = max(worst_zero, err)
        rows.append([kind, param, lam.to_string(), mu.to_string(), p_det, p_cf, err])
    reps = [
        _timed(discrepancy_report("A3 closed forms (relative)", worst_rel, thr), t0),
        discrepancy_report("A3 closed forms (zero pairs, absolute)", worst_zero, zero_abs),
    ]
    return reps, {"pairs": (["kind", "param", "lambda", "mu", "determinant", "closed_form", "error"], rows)}


# -- A4 ----------------------------------------------------------------------------------

def _exact_correlations(n: int, g: AdmissibleFunction, q: float, tmax: int, tol: float):
    spec = GeometricSpec(q, n)
    dists = {t: chain_distribution(t, g, spec, tol) for t in range(tmax + 1)}

    def rho1(x, t):
        return sum(p for lam, p in dists[t].items() if x in signature_to_config(lam).points)

    def rho2_same(x1, x2, t):
        return sum(p for lam, p in dists[t].items()
                   if x1 in signature_to_config(lam).points and x2 in signature_to_config(lam).points)

    def rho2_two_time(x1, t1, x2, t2):
        total = 0.0
        for lam, p in dists[t1].items():
            if x1 not in signature_to_config(lam).points:
                continue
            dist = chain_distribution(t2 - t1, g, spec, tol, start=lam)
            total += p * sum(pm for mu, pm in dist.items() if x2 in signature_to_config(mu).points)
        return total

    return rho1, rho2_same, rho2_two_time


def a4_correlations(params: dict, thresholds: dict, seed: int):
    q = params.get("q", 0.5)
    levels = params.get("levels", [2, 3])
    g = AdmissibleFunction.parse(params.get("g", "bernoulli_up:1"))
    tmax = params.get("max_time", 2)
    xlo, xhi = params.get("x_range", [-3, 4])
    multi = params.get("multi_time_pairs", [[0, 1, 1, 2], [1, 1, 2, 2], [-1, 1, 0, 2]])
    tol = params.get("enumeration_tol", 1e-14)
    thr = thresholds.get("max_discrepancy", 1e-6)
    t0 = time.perf_counter()
    rows, worst = [], 0.0
    for n in levels:
        ks = KernelSpec(q, n, g=g)
        rho1, rho2, rho2tt = _exact_correlations(n, g, q, tmax, tol)
        for t in range(tmax + 1):
            for x in range(xlo, xhi + 1):
                v = correlation_fn([SpaceTimePoint(x, t)], ks)
                e = rho1(x, t)
                worst = max(worst, abs(v - e))
                rows.append([n, "rho1", f"({x},{t})", v, e])
            if t == 0:
                continue
            for x1, x2 in combinations(range(xlo + 1, xhi), 2):
                v = correlation_fn([SpaceTimePoint(x1, t), SpaceTimePoint(x2, t)], ks)
                e = rho2(x1, x2, t)
                worst = max(worst, abs(v - e))
                rows.append([n, "rho2", f"({x1},{t});({x2},{t})", v, e])
        for x1, t1, x2, t2 in multi:
            v = correlation_fn([SpaceTimePoint(x1, t1), SpaceTimePoint(x2, t2)], ks)
            e = rho2tt(x1, t1, x2, t2)
            worst = max(worst, abs(v - e))
            rows.append([n, "rho2_multi_time", f"({x1},{t1});({x2},{t2})", v, e])
    rep = discrepancy_report("A4 correlations vs enumeration", worst, thr, enumeration_tol=tol, values=len(rows))
    return [_timed(rep, t0)], {"correlations": (["N", "kind", "points", "kernel", "enumeration"], rows)}


# -- A5 ----------------------------------------------------------------------------------

DEFAULT_A5_PAIRS = [
    [0, 1, 0, 1], [1, 1, 0, 1], [2, 2, 1, 1], [0, 2, 3, 0], [5, 3, 4, 3],
    [3, 1, 2, 2], [7, 4, 6, 4], [1, 0, 0, 0], [4, 2, 4, 2], [10, 6, 9, 6],
]


def a5_convergence(params: dict, thresholds: dict, seed: int):
    q = params.get("q", 0.5)
    g = AdmissibleFunction.parse(params.get("g", "bernoulli_up:1"))
    levels = params.get("levels", [5, 10, 20, 40])
    pairs = params.get("pairs", DEFAULT_A5_PAIRS)
    thr = thresholds.get("max_discrepancy_last", 1e-4)
    t0 = time.perf_counter()
    lim_ks = KernelSpec(q, math.inf, g=g)
    pts = [(SpaceTimePoint(a, b), SpaceTimePoint(c, d)) for a, b, c, d in pairs]
    lim = np.array([kernel_limit(p1, p2, lim_ks).real for p1, p2 in pts])
    rows, means, maxes = [], [], []
    for n in levels:
        ks = KernelSpec(q, n, g=g)
        v = np.array([kernel_finite_N(p1, p2, ks).real for p1, p2 in pts])
        d = np.abs(v - lim)
        means.append(float(d.mean()))
        maxes.append(float(d.max()))
        for (a, b, c, e), vi, li in zip(pairs, v, lim):
            rows.append([n, f"({a},{b});({c},{e})", float(vi), float(li), float(abs(vi - li))])
    ratio = max(means[i + 1] / means[i] for i in range(len(means) - 1)) if len(means) > 1 else 0.0
    reps = [
        _timed(discrepancy_report(f"A5 max discrepancy at N={levels[-1]}", maxes[-1], thr), t0),
        discrepancy_report("A5 mean discrepancy ratio between successive N", ratio, thresholds.get("max_mean_ratio", 1.0),
                           means=";".join(f"{m:.3e}" for m in means)),
    ]
    return reps, {"convergence": (["N", "pair", "finite_N", "limit", "discrepancy"], rows)}


# -- A6 ----------------------------------------------------------------------------------

def a6_packed_diagonal(params: dict, thresholds: dict, seed: int):
    q = params.get("q", 0.5)
    g = AdmissibleFunction.parse(params.get("g", "bernoulli_up:1"))
    xlo, xhi = params.get("x_range", [-5, 10])
    thr = thresholds.get("max_discrepancy", 1e-6)
    t0 = time.perf_counter()
    ks = KernelSpec(q, math.inf, g=g)
    rows, worst = [], 0.0
    for x in range(xlo, xhi + 1):
        p = SpaceTimePoint(x, 0)
        v = kernel_limit(p, p, ks).real
        e = 1.0 if x >= 0 else 0.0
        worst = max(worst, abs(v - e))
        rows.append([x, v, e])
    rep = discrepancy_report("A6 packed diagonal", worst, thr)
    return [_timed(rep, t0)], {"diagonal": (["x", "kernel", "indicator"], rows)}


# -- A7 ----------------------------------------------------------------------------------

def a7_pushasep_exact(params: dict, thresholds: dict, seed: int):
    zeta = params.get("zeta", [2.0, 1.5, 1.0])
    a, b = params.get("a", 0.5), params.get("b", 0.5)
    t = params.get("t", 2.0)
    y = params.get("y", [-2, -1, 0])
    reps = params.get("replicas", 1_000_000)
    width = params.get("box_width", 12)
    min_exp = params.get("min_expected", 5.0)
    thr = thresholds.get("p_value", 0.001)
    t0 = time.perf_counter()
    sys_ = PushASEPSystem(tuple(zeta), a, b, tuple(y))
    xs, probs = transition_box(y, t, sys_, width)
    samples = simulate_many(sys_, t, reps, seed)
    obs = counts_for(samples, xs)
    rep = chi_square(obs, probs, reps, thr, min_exp, name="A7 PushASEP exact vs Monte Carlo")
    rep.ledger.update({"box_width": width, "box_mass": float(probs.sum())})
    keep = probs * reps >= min_exp
    rows = [[*map(int, x), float(p), int(o)] for x, p, o in zip(xs[keep], probs[keep], obs[keep])]
    header = [f"x{i + 1}" for i in range(len(y))] + ["probability", "observed"]
    return [_timed(rep, t0)], {"cells": (header, rows)}


# -- A8 ----------------------------------------------------------------------------------

def _grid_probs(e1, e2):
    return np.array([[gue2_box_prob(e1[i], e1[i + 1], e2[j], e2[j + 1]) for j in range(len(e2) - 1)]
                     for i in range(len(e1) - 1)])


def _grid_counts(u, v, e1, e2):
    h, _, _ = np.histogram2d(u, v, bins=[np.asarray(e1, float), np.asarray(e2, float)])
    return h


DEFAULT_EDGES_1 = [-np.inf, -2.5, -2.0, -1.5, -1.0, -0.5, 0.0, 0.5, np.inf]
DEFAULT_EDGES_2 = [-np.inf, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, np.inf]


def _edges(v):
    # JSON has no infinity literal, so "inf"/"-inf" strings are accepted too
    return [float(x) for x in v]


def a8_large_time(params: dict, thresholds: dict, seed: int):
    zeta = params.get("zeta", [3.0, 2.0, 1.0])
    a, b = params.get("a", 1.0), params.get("b", 0.5)
    t = params.get("t", 2000.0)
    reps = params.get("replicas", 100_000)
    y = params.get("y", [-2, -1, 0])
    zeta2 = params.get("zeta_h2", [1.0, 1.0])
    y2 = params.get("y_h2", [-1, 0])
    e1 = _edges(params.get("edges_y1", DEFAULT_EDGES_1))
    e2 = _edges(params.get("edges_y2", DEFAULT_EDGES_2))
    thr = thresholds.get("p_value", 0.01)
    t0 = time.perf_counter()
    reports, tables = [], {}

    sys_ = PushASEPSystem(tuple(zeta), a, b, tuple(y)).normalized()
    samples = simulate_many(sys_, t, reps, seed, block=200)
    sc = math.sqrt((sys_.a + sys_.b) * t)
    jit = np.random.default_rng([seed, 1])
    # spread each lattice value over its unit cell before rescaling
    xn = (jitter(samples[:, -1], jit) - (sys_.a - sys_.b) * t) / sc
    reports.append(ks_test(xn, "norm", thr, name="A8(i) rescaled X_N vs N(0,1)"))
    _, gaps = rescale_many(samples, t, sys_)
    gap_rows = []
    for j, g in sorted(gaps.items()):
        p = 1.0 / sys_.zeta[j - 1]
        gmax = int(g.max())
        support = np.arange(1, gmax + 1)
        pm = geometric_pmf(support, p)
        reports.append(chi_square(counts_for(g, support), pm, reps, thr, name=f"A8(ii) gap X_{j + 1}-X_{j} vs Ge({p:.4g})"))
        gap_rows += [[j, int(s), float(m), int(c)] for s, m, c in zip(support, pm, counts_for(g, support))]
    tables["gaps"] = (["j", "gap", "probability", "observed"], gap_rows)

    sys2 = PushASEPSystem(tuple(zeta2), a, b, tuple(y2)).normalized()
    s2 = simulate_many(sys2, t, reps, seed + 1, block=200)
    sc2 = math.sqrt((sys2.a + sys2.b) * t)
    jit2 = np.random.default_rng([seed, 2])
    u = (jitter(s2[:, 0], jit2) - (sys2.a - sys2.b) * t) / sc2
    v = (jitter(s2[:, 1], jit2) - (sys2.a - sys2.b) * t) / sc2
    reports.append(ks_test(u, lambda z: gue2_marginal_cdf(1, z), thr, name="A8(iii) rescaled X_1 vs GUE smallest-eigenvalue marginal"))
    reports.append(ks_test(v, "norm", thr, name="A8(iii) rescaled X_2 vs N(0,1)"))
    probs = _grid_probs(e1, e2)
    obs = _grid_counts(u, v, e1, e2)
    reports.append(chi_square(obs.ravel(), probs.ravel(), reps, thr, name="A8(iii) joint grid vs GUE_1^2"))
    tables["h2_grid"] = (["cell_y1", "cell_y2", "probability", "observed"],
                         [[i, j, float(probs[i, j]), int(obs[i, j])] for i in range(probs.shape[0]) for j in range(probs.shape[1])])
    reports[0].runtime = time.perf_counter() - t0
    return reports, tables


# -- A9 ----------------------------------------------------------------------------------

def a9_gue(params: dict, thresholds: dict, seed: int):
    reps = params.get("samples", 100_000)
    e1 = _edges(params.get("edges_y1", DEFAULT_EDGES_1))
    e2 = _edges(params.get("edges_y2", DEFAULT_EDGES_2))
    nmax = params.get("gn_max", 10)
    zgrid = np.linspace(*params.get("gn_z_range", [-4.0, 4.0]), params.get("gn_z_points", 33))
    thr_int = thresholds.get("integral_abs", 1e-4)
    thr_p = thresholds.get("p_value", 0.01)
    thr_gn = thresholds.get("gn_max_difference", 1e-10)
    t0 = time.perf_counter()
    total = integrate_density_n2()
    reports = [discrepancy_report("A9 n=2 density integral", abs(total - 1.0), thr_int, integral=total)]
    y = sample_gue_corners(2, np.random.default_rng(seed), reps)
    probs = _grid_probs(e1, e2)
    obs = _grid_counts(y[:, 0], y[:, 1], e1, e2)
    reports.append(chi_square(obs.ravel(), probs.ravel(), reps, thr_p, name="A9 corner minima vs density grid"))
    worst, rows = 0.0, []
    for n in range(nmax + 1):
        d = float(np.max(np.abs(gauss_gn_hermite(n, zgrid) - gauss_gn_contour(n, zgrid))))
        worst = max(worst, d)
        rows.append([n, d])
    reports.append(discrepancy_report("A9 G_n Hermite vs contour", worst, thr_gn))
    reports[0].runtime = time.perf_counter() - t0
    return reports, {"gn": (["n", "max_difference"], rows),
                     "grid": (["cell_y1", "cell_y2", "probability", "observed"],
                              [[i, j, float(probs[i, j]), int(obs[i, j])] for i in range(probs.shape[0]) for j in range(probs.shape[1])])}


# -- A10 ---------------------------------------------------------------------------------

def a10_column(params: dict, thresholds: dict, seed: int):
    q = params.get("q", 0.5)
    kinds = params.get("kinds", {"bernoulli_up": 1.0, "bernoulli_down": 1.0})
    kmax = params.get("max_coordinate", 3)
    tmax = params.get("max_time", 3)
    runs = params.get("runs", 100_000)
    tol = params.get("enumeration_tol", 1e-12)
    thr = thresholds.get("p_value", 0.01)
    t0 = time.perf_counter()
    reports, rows = [], []
    for ki, (kind, beta) in enumerate(sorted(kinds.items())):
        g = AdmissibleFunction.parse(f"{kind}:{beta}")
        for t in range(1, tmax + 1):
            ys = simulate_discrete_column_many(kind, beta, q, kmax, t, runs, [seed, ki, t])
            for k in range(1, kmax + 1):
                law = chain_distribution(t, g, GeometricSpec(q, k), tol).marginal(lambda lam: lam[k - 1])
                support = np.array(sorted(law))
                probs = np.array([law[s] for s in support])
                obs = counts_for(ys[:, k - 1] + (k - 1), support)
                reports.append(chi_square(obs, probs, runs, thr, name=f"A10 {kind} k={k} t={t}"))
                rows += [[kind, k, t, int(s), float(p), int(o)] for s, p, o in zip(support, probs, obs)]
    reports[0].runtime = time.perf_counter() - t0
    return reports, {"column": (["kind", "k", "t", "value", "probability", "observed"], rows)}


REGISTRY = {
    "A1": a1_row_sums,
    "A2": a2_commutation,
    "A3": a3_closed_forms,
    "A4": a4_correlations,
    "A5": a5_convergence,
    "A6": a6_packed_diagonal,
    "A7": a7_pushasep_exact,
    "A8": a8_large_time,
    "A9": a9_gue,
    "A10": a10_column,
}
