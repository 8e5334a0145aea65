"""Markov kernels P_N(lam -> mu; g) on signatures and the links between levels.

With xi_i = q^(1-i) the transition probability is

    P_N(lam -> mu; g) = prod_i g(xi_i)^-1 * det[c_{mu_i - i - lam_j + j}] * s_mu(xi) / s_lam(xi)

where c_k are the Laurent coefficients of g.  Rows are enumerated on boxes
of shifts ``mu - lam`` whose neglected mass is bounded rigorously: the
coefficient matrix is totally nonnegative, so its determinant is at most the
product of its diagonal, and the Schur ratio is at most
``q^(-sum (N-i) d_i) / prod_{i<j} (1 - q^(j-i))``.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from ._linalg import slogdet_batch
from .glaurent import AdmissibleFunction, ElementaryFactor, InadmissibleError, LaurentWindow, laurent_coeffs
from .gt import ExtendedSignature, Signature, as_signature, enumerate_interlacing_below, interlaces
from .schur import GeometricSpec, log_principal_specialization, log_principal_specialization_batch

Q_MIN, Q_MAX = 1e-6, 1 - 1e-6
COEFF_TOL = 1e-15
DEFAULT_BUDGET = 3_000_000


class EnumerationBudgetError(RuntimeError):
    pass


def _check_q(q: float) -> None:
    if not Q_MIN <= q <= Q_MAX:
        raise ValueError(f"q={q} outside the supported range [{Q_MIN}, {Q_MAX}]")


@dataclass(frozen=True)
class TransitionSpec:
    g: AdmissibleFunction
    spec: GeometricSpec

    def __post_init__(self):
        if isinstance(self.g, str):
            object.__setattr__(self, "g", AdmissibleFunction.parse(self.g))
        _check_q(self.spec.q)
        self.g.check_level(self.spec.q, self.spec.N)

    @classmethod
    def make(cls, g, q: float, N: int) -> "TransitionSpec":
        if isinstance(g, str):
            g = AdmissibleFunction.parse(g)
        return cls(g, GeometricSpec(q, N))

    @property
    def N(self) -> int:
        return self.spec.N

    @property
    def q(self) -> float:
        return self.spec.q

    @cached_property
    def window(self) -> LaurentWindow:
        return laurent_coeffs(self.g, COEFF_TOL, q=self.q, N=max(self.N, 1))

    @cached_property
    def log_norm(self) -> float:
        """sum_i log g(xi_i)."""
        return float(sum(self.g.log_value(x) for x in self.spec.xi))

    @cached_property
    def schur_constant(self) -> float:
        """prod_{i<j} 1/(1 - q^(j-i)), the bound on the Schur-product ratio."""
        n = self.N
        return float(np.prod([1.0 / (1.0 - self.q ** (j - i)) for i in range(n) for j in range(i + 1, n)]))

    def shift_windows(self, tol: float) -> list[tuple[int, int]]:
        """Per-coordinate ranges for mu_i - lam_i with total neglected mass <= tol."""
        n = self.N
        w = self.window
        ks = w.ks.astype(float)
        budget = tol / (n * self.schur_constant)
        out = []
        for i in range(1, n + 1):
            r = self.q ** (i - n)  # xi_{N+1-i}
            gr = self.g.value(r)
            weights = w.coeffs * r**ks / gr
            base = max(0.0, 1.0 - weights.sum())
            lo_idx, hi_idx = 0, weights.size - 1
            dropped = base
            # greedily drop the lighter end while staying inside the budget
            while lo_idx < hi_idx:
                cand = min(weights[lo_idx], weights[hi_idx])
                if dropped + cand > budget:
                    break
                dropped += cand
                if weights[lo_idx] <= weights[hi_idx]:
                    lo_idx += 1
                else:
                    hi_idx -= 1
            out.append((w.lo + lo_idx, w.lo + hi_idx))
        return out


def _coeff_matrix(win: LaurentWindow, lam: np.ndarray, mus: np.ndarray) -> np.ndarray:
    n = lam.size
    i = np.arange(1, n + 1)
    # entry (i, j) = c_{mu_i - i - lam_j + j}
    rows = mus - i  # (M, n)
    cols = lam - i  # (n,)
    idx = rows[:, :, None] - cols[None, None, :]
    return win.c(idx)


def transition_probs(lam, mus: np.ndarray, ts: TransitionSpec) -> np.ndarray:
    """P_N(lam -> mu) for every row of ``mus`` (shape (M, N))."""
    lam = np.asarray(as_signature(lam).parts, dtype=np.int64)
    mus = np.atleast_2d(np.asarray(mus, dtype=np.int64))
    n = ts.N
    if lam.size != n or mus.shape[1] != n:
        raise ValueError("signature lengths must equal N")
    if n == 0:
        return np.ones(mus.shape[0])
    if ts.g.is_identity:
        return np.all(mus == lam, axis=1).astype(float)
    mats = _coeff_matrix(ts.window, lam, mus)
    sign, logdet = slogdet_batch(mats)
    log_s_mu = log_principal_specialization_batch(mus, ts.q)
    log_s_lam = log_principal_specialization(tuple(lam), ts.q)
    logp = logdet + (log_s_mu - log_s_lam - ts.log_norm)
    with np.errstate(under="ignore", over="ignore"):
        p = (sign * np.exp(logp)).astype(float)
    if not np.all(np.isfinite(p)):
        raise FloatingPointError("nonfinite transition probability")
    return _clamp(p)


def _clamp(p: np.ndarray, slack: float = 1e-9) -> np.ndarray:
    bad = (p < -slack) | (p > 1 + slack)
    if np.any(bad):
        raise FloatingPointError(f"probability outside [0, 1]: {p[bad][:5]}")
    return np.clip(p, 0.0, 1.0)


def transition_prob(lam, mu, ts: TransitionSpec) -> float:
    mu = as_signature(mu)
    if len(mu) != ts.N:
        raise ValueError("signature lengths must equal N")
    return float(transition_probs(lam, np.array([mu.parts], dtype=np.int64).reshape(1, ts.N), ts)[0])


CLOSED_KINDS = ("geom_up", "bernoulli_up", "geom_down", "bernoulli_down")


def closed_form_det(lam, mu, kind: str, param: float) -> float:
    """det[c_{mu_i - i - lam_j + j}] for a single Bernoulli or geometric factor."""
    lam, mu = as_signature(lam), as_signature(mu)
    if kind not in CLOSED_KINDS:
        raise ValueError(f"no closed form for {kind!r}")
    n = len(lam)
    if kind.endswith("_down"):
        lam, mu = mu, lam
    d = [mu[i] - lam[i] for i in range(n)]
    if kind.startswith("bernoulli"):
        ok = all(x in (0, 1) for x in d)
    else:
        # mu / lam is a horizontal strip: lam_i <= mu_i <= lam_{i-1}
        ok = all(lam[i] <= mu[i] for i in range(n)) and all(mu[i] <= lam[i - 1] for i in range(1, n))
    return float(param ** sum(d)) if ok else 0.0


def transition_prob_closed(lam, mu, kind: str, param: float, spec: GeometricSpec) -> float:
    lam, mu = as_signature(lam), as_signature(mu)
    _check_q(spec.q)
    g = AdmissibleFunction((ElementaryFactor(kind, param),))
    g.check_level(spec.q, spec.N)
    det = closed_form_det(lam, mu, kind, param)
    if det == 0.0:
        return 0.0
    log_norm = sum(g.log_value(x) for x in spec.xi)
    logp = (
        math.log(det)
        + log_principal_specialization(mu, spec.q)
        - log_principal_specialization(lam, spec.q)
        - log_norm
    )
    return math.exp(logp)


# -- links ----------------------------------------------------------------

def link_prob(lam, mu, spec: GeometricSpec | float) -> float:
    """P_N^down(lam -> mu) = xi_N^(|lam|-|mu|) s_mu(xi_1..xi_{N-1}) / s_lam(xi_1..xi_N) if mu < lam."""
    lam, mu = as_signature(lam), as_signature(mu)
    q = spec.q if isinstance(spec, GeometricSpec) else float(spec)
    n = len(lam)
    if n < 1 or len(mu) != n - 1:
        raise ValueError(f"link needs lengths N and N-1, got {n} and {len(mu)}")
    if not interlaces(mu, lam):
        return 0.0
    log_xi_n = (1 - n) * math.log(q)
    return math.exp(
        log_xi_n * (lam.size - mu.size)
        + log_principal_specialization(mu, q)
        - log_principal_specialization(lam, q)
    )


def link_probs_batch(lams: np.ndarray, nus: np.ndarray, q: float) -> np.ndarray:
    """Link probabilities for paired rows (lams[k] -> nus[k]); interlacing is assumed."""
    lams = np.asarray(lams, dtype=np.int64)
    nus = np.asarray(nus, dtype=np.int64)
    n = lams.shape[1]
    log_xi_n = (1 - n) * math.log(q)
    if n - 1 == 0:
        log_s_nu = np.zeros(lams.shape[0])
    else:
        log_s_nu = log_principal_specialization_batch(nus, q)
    logp = log_xi_n * (lams.sum(1) - nus.sum(1)) + log_s_nu - log_principal_specialization_batch(lams, q)
    return np.exp(logp)


def interlacing_below_batch(lams: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """All (parent index, nu) with nu < lams[parent], as a ragged cartesian product."""
    lams = np.asarray(lams, dtype=np.int64)
    m, n = lams.shape
    parent = np.arange(m)
    nus = np.zeros((m, 0), dtype=np.int64)
    for i in range(n - 1):
        lo = lams[parent, i + 1]
        hi = lams[parent, i]
        cnt = hi - lo + 1
        rep = np.repeat(np.arange(parent.size), cnt)
        offs = np.arange(rep.size) - np.repeat(np.cumsum(cnt) - cnt, cnt)
        nus = np.column_stack([nus[rep], lo[rep] + offs]) if nus.shape[1] else (lo[rep] + offs)[:, None]
        parent = parent[rep]
    return parent, nus


def extended_link_prob(lam: ExtendedSignature, mu: ExtendedSignature, spec: GeometricSpec | float) -> float:
    """The block link between extended levels N and N-1."""
    q = spec.q if isinstance(spec, GeometricSpec) else float(spec)
    n = lam.length
    if mu.length != n - 1:
        raise ValueError("extended link needs lengths N and N-1")
    k = lam.k
    if k == n:
        if mu.k != n - 1:
            return 0.0
        return link_prob(lam.finite_parts, mu.finite_parts, q)
    if mu.k != k:
        return 0.0
    if k == 0:
        return 1.0
    ts = TransitionSpec(_q_nk_function(q, n), GeometricSpec(q, k))
    return transition_prob(lam.finite_parts, mu.finite_parts, ts)


def _q_nk_function(q: float, n: int) -> AdmissibleFunction:
    """g = 1/(1 - xi_N^-1 x) driving Q_N^k."""
    return AdmissibleFunction((ElementaryFactor("geom_up", q ** (n - 1)),))


def extended_link_row(lam: ExtendedSignature, q: float, tol: float = 1e-12):
    """Truncated row of the extended link as a dict ExtendedSignature -> probability."""
    n, k = lam.length, lam.k
    if k == n:
        return {
            ExtendedSignature(mu, 0): link_prob(lam.finite_parts, mu, q)
            for mu in enumerate_interlacing_below(lam.finite_parts)
        }
    if k == 0:
        return {ExtendedSignature(Signature(()), n - 1): 1.0}
    ts = TransitionSpec(_q_nk_function(q, n), GeometricSpec(q, k))
    row = transition_row(lam.finite_parts, ts, tol)
    return {ExtendedSignature(mu, n - 1 - k): p for mu, p in row.entries.items()}


def extended_transition_prob(lam: ExtendedSignature, mu: ExtendedSignature, g: AdmissibleFunction, q: float) -> float:
    """Block-diagonal extension of P_N(g) to extended signatures."""
    if lam.length != mu.length:
        raise ValueError("extended transition needs equal lengths")
    if lam.k != mu.k:
        return 0.0
    if lam.k == 0:
        return 1.0
    return transition_prob(lam.finite_parts, mu.finite_parts, TransitionSpec(g, GeometricSpec(q, lam.k)))


# -- rows -------------------------------------------------------------------

@dataclass
class TruncatedRow:
    lam: Signature
    mus: np.ndarray
    probs: np.ndarray
    captured_mass: float
    tail_bound: float
    tol: float

    @property
    def entries(self) -> dict[Signature, float]:
        return {Signature(tuple(int(v) for v in m)): float(p) for m, p in zip(self.mus, self.probs)}

    def __len__(self) -> int:
        return self.probs.size


def _decreasing_candidates(lam: np.ndarray, windows: Sequence[tuple[int, int]], budget: int) -> np.ndarray:
    n = lam.size
    cand = np.zeros((1, 0), dtype=np.int64)
    for i in range(n):
        lo, hi = windows[i]
        vals = lam[i] + np.arange(lo, hi + 1)
        if cand.shape[0] * vals.size > budget:
            raise EnumerationBudgetError(
                f"row enumeration would exceed the budget of {budget} candidates"
            )
        new = np.empty((cand.shape[0] * vals.size, i + 1), dtype=np.int64)
        new[:, :i] = np.repeat(cand, vals.size, axis=0)
        new[:, i] = np.tile(vals, cand.shape[0])
        if i > 0:
            new = new[new[:, i] <= new[:, i - 1]]
        cand = new
    return cand


def transition_row(lam, ts: TransitionSpec, tol: float = 1e-12, budget: int = DEFAULT_BUDGET) -> TruncatedRow:
    """All mu with P_N(lam -> mu) on a box whose complement carries mass <= tol."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    lam = as_signature(lam)
    if len(lam) != ts.N:
        raise ValueError("signature length must equal N")
    lam_arr = np.asarray(lam.parts, dtype=np.int64)
    if ts.g.is_identity or ts.N == 0:
        return TruncatedRow(lam, lam_arr[None, :], np.ones(1), 1.0, 0.0, tol)
    windows = ts.shift_windows(tol)
    mus = _decreasing_candidates(lam_arr, windows, budget)
    probs = transition_probs(lam, mus, ts)
    keep = probs > 0
    mus, probs = mus[keep], probs[keep]
    return TruncatedRow(lam, mus, probs, float(probs.sum()), tol, tol)


def chain_distribution(
    t: int,
    g_list: AdmissibleFunction | Sequence[AdmissibleFunction],
    spec: GeometricSpec,
    tol: float = 1e-12,
    start: Signature | None = None,
) -> "ChainDistribution":
    """Law of the chain after t steps from the packed state 0_N (or ``start``).

    ``g_list`` is a single g for a homogeneous chain or one g per step.
    """
    if isinstance(g_list, (AdmissibleFunction, str)):
        g_list = [g_list] * t
    g_list = [AdmissibleFunction.parse(g) if isinstance(g, str) else g for g in g_list]
    if len(g_list) < t:
        raise ValueError("need one admissible function per step")
    state = start if start is not None else Signature.zero(spec.N)
    dist = {state.parts: 1.0}
    lost = 0.0
    for step in range(t):
        ts = TransitionSpec(g_list[step], spec)
        acc: dict[tuple[int, ...], float] = {}
        for parts, p in dist.items():
            row = transition_row(Signature(parts), ts, tol)
            lost += p * (1.0 - row.captured_mass) if row.captured_mass < 1 else 0.0
            for m, pm in zip(map(tuple, row.mus.tolist()), row.probs):
                acc[m] = acc.get(m, 0.0) + p * pm
        dist, pruned = _prune(acc, tol)
        lost += pruned
    out = ChainDistribution({Signature(k): v for k, v in dist.items()})
    out.lost_mass = lost
    return out


class ChainDistribution(dict):
    """Signature -> probability, with the mass lost to truncation in ``lost_mass``."""

    lost_mass: float = 0.0

    def marginal(self, fn) -> dict:
        out: dict = {}
        for lam, p in self.items():
            key = fn(lam)
            out[key] = out.get(key, 0.0) + p
        return out


def _prune(acc: dict, tol: float) -> tuple[dict, float]:
    """Drop the lightest states while their total stays below tol / 10."""
    items = sorted(acc.items(), key=lambda kv: kv[1])
    budget = tol * 0.1
    dropped = 0.0
    cut = 0
    for _, p in items:
        if dropped + p > budget:
            break
        dropped += p
        cut += 1
    return dict(items[cut:]), dropped


# -- sampling ---------------------------------------------------------------

class AliasTable:
    """Vose alias method over a finite probability vector."""

    def __init__(self, probs: np.ndarray):
        p = np.asarray(probs, dtype=float)
        p = p / p.sum()
        n = p.size
        scaled = p * n
        self.prob = np.zeros(n)
        self.alias = np.zeros(n, dtype=np.int64)
        small = [i for i in range(n) if scaled[i] < 1.0]
        large = [i for i in range(n) if scaled[i] >= 1.0]
        while small and large:
            s, l = small.pop(), large.pop()
            self.prob[s] = scaled[s]
            self.alias[s] = l
            scaled[l] -= 1.0 - scaled[s]
            (small if scaled[l] < 1.0 else large).append(l)
        for i in small + large:
            self.prob[i] = 1.0

    def sample(self, rng: np.random.Generator, size=None):
        n = self.prob.size
        i = rng.integers(0, n, size=size)
        u = rng.random(size=size)
        return np.where(u < self.prob[i], i, self.alias[i])


class RowSampler:
    """Draws P_N(lam -> .) steps, caching one alias table per visited lam."""

    def __init__(self, ts: TransitionSpec, tol: float = 1e-12):
        self.ts = ts
        self.tol = tol
        self._cache: dict[tuple[int, ...], tuple[np.ndarray, AliasTable]] = {}
        self._lock = threading.Lock()

    def _table(self, lam: Signature):
        key = lam.parts
        hit = self._cache.get(key)
        if hit is None:
            row = transition_row(lam, self.ts, self.tol)
            hit = (row.mus, AliasTable(row.probs))
            with self._lock:
                self._cache[key] = hit
        return hit

    def step(self, lam, rng: np.random.Generator) -> Signature:
        lam = as_signature(lam)
        mus, table = self._table(lam)
        return Signature(tuple(int(v) for v in mus[int(table.sample(rng))]))


def sample_step(lam, ts: TransitionSpec, rng: np.random.Generator, tol: float = 1e-12) -> Signature:
    return RowSampler(ts, tol).step(lam, rng)


def sample_chain(t: int, ts: TransitionSpec, rng: np.random.Generator, start=None, sampler: RowSampler | None = None):
    sampler = sampler or RowSampler(ts)
    lam = as_signature(start) if start is not None else Signature.zero(ts.N)
    path = [lam]
    for _ in range(t):
        lam = sampler.step(lam, rng)
        path.append(lam)
    return path


# -- commutation ----------------------------------------------------------

def _aggregate(keys: np.ndarray, weights: np.ndarray) -> dict[tuple[int, ...], float]:
    if keys.shape[0] == 0:
        return {}
    uniq, inv = np.unique(keys, axis=0, return_inverse=True)
    sums = np.bincount(inv.ravel(), weights=weights, minlength=uniq.shape[0])
    return {tuple(int(v) for v in u): float(s) for u, s in zip(uniq, sums)}


def commutation_sides(lam, g: AdmissibleFunction, q: float, tol: float = 1e-12):
    """Rows of P_{N+1}(g) P_{N+1}^down and P_{N+1}^down P_N(g) started at lam in GT_{N+1}."""
    lam = as_signature(lam)
    n1 = len(lam)
    ts_top = TransitionSpec(g, GeometricSpec(q, n1))
    ts_low = TransitionSpec(g, GeometricSpec(q, n1 - 1))
    row = transition_row(lam, ts_top, tol)
    parent, nus = interlacing_below_batch(row.mus)
    w = row.probs[parent] * link_probs_batch(row.mus[parent], nus, q)
    lhs = _aggregate(nus, w)
    keys, weights = [], []
    for kappa in enumerate_interlacing_below(lam):
        pk = link_prob(lam, kappa, q)
        r = transition_row(kappa, ts_low, tol)
        keys.append(r.mus)
        weights.append(pk * r.probs)
    rhs = _aggregate(np.concatenate(keys) if n1 > 1 else np.zeros((len(keys), 0), dtype=np.int64),
                     np.concatenate(weights))
    return lhs, rhs


def verify_commutation(
    q: float, N: int, g: AdmissibleFunction, lambdas: Iterable, tol: float = 1e-12
) -> float:
    """Max entrywise |P_{N+1} P^down - P^down P_N| over rows started at each lam in GT_{N+1}."""
    if isinstance(g, str):
        g = AdmissibleFunction.parse(g)
    g.check_level(q, N + 1)
    worst = 0.0
    for lam in lambdas:
        lam = as_signature(lam)
        if len(lam) != N + 1:
            raise ValueError("commutation rows start on level N+1")
        if g.is_identity:
            continue
        lhs, rhs = commutation_sides(lam, g, q, tol)
        for key in set(lhs) | set(rhs):
            worst = max(worst, abs(lhs.get(key, 0.0) - rhs.get(key, 0.0)))
    return worst


def row_as_mapping(row: TruncatedRow) -> Mapping[Signature, float]:
    return row.entries


__all__ = [
    "AliasTable",
    "ChainDistribution",
    "EnumerationBudgetError",
    "InadmissibleError",
    "RowSampler",
    "TransitionSpec",
    "TruncatedRow",
    "chain_distribution",
    "closed_form_det",
    "commutation_sides",
    "extended_link_prob",
    "extended_link_row",
    "extended_transition_prob",
    "interlacing_below_batch",
    "link_prob",
    "link_probs_batch",
    "sample_chain",
    "sample_step",
    "transition_prob",
    "transition_prob_closed",
    "transition_probs",
    "transition_row",
    "verify_commutation",
]
