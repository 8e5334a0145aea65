"""PushASEP with particle-dependent rates and its one-sided discrete relatives.

Particles x_1 < ... < x_N carry a right clock of rate a*zeta_n and a left
clock of rate b/zeta_n.  A right jump is suppressed when the target site is
occupied; a left jump pushes the contiguous block sitting to the left.

All clocks have constant rates, so the jump chain is uniformized: the number
of events by time t is Poisson(R t) with R the total rate, and every event
picks a clock with probability proportional to its rate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numba
import numpy as np

from ._linalg import det_batch

# -- model ---------------------------------------------------------------------


@dataclass(frozen=True)
class PushASEPSystem:
    zeta: tuple[float, ...]
    a: float
    b: float
    positions: tuple[int, ...]

    def __post_init__(self):
        zeta = tuple(float(z) for z in self.zeta)
        pos = tuple(int(p) for p in self.positions)
        object.__setattr__(self, "zeta", zeta)
        object.__setattr__(self, "positions", pos)
        if len(zeta) != len(pos) or not zeta:
            raise ValueError("need one zeta per particle")
        if any(z <= 0 for z in zeta):
            raise ValueError("zeta must be positive")
        if self.a < 0 or self.b < 0 or self.a + self.b <= 0:
            raise ValueError("need a, b >= 0 with a + b > 0")
        if any(x >= y for x, y in zip(pos, pos[1:])):
            raise ValueError("positions must be strictly increasing")

    @property
    def N(self) -> int:
        return len(self.zeta)

    @property
    def rates(self) -> np.ndarray:
        """2N clock rates: right clocks first, then left clocks."""
        z = np.asarray(self.zeta)
        return np.concatenate([self.a * z, self.b / z])

    @property
    def total_rate(self) -> float:
        return float(self.rates.sum())

    def normalized(self) -> "PushASEPSystem":
        """Equivalent system with zeta_N = 1 (zeta -> zeta/zeta_N, a -> a zeta_N, b -> b/zeta_N)."""
        c = self.zeta[-1]
        return PushASEPSystem(tuple(z / c for z in self.zeta), self.a * c, self.b / c, self.positions)


@dataclass(frozen=True)
class ClusterStructure:
    """D = {n_1 < ... < n_h = N} (1-based) where zeta = 1, and Ge parameters off D."""

    D: tuple[int, ...]
    zeta: tuple[float, ...]

    @property
    def h(self) -> int:
        return len(self.D)

    @property
    def N(self) -> int:
        return len(self.zeta)

    def gap_parameters(self) -> dict[int, float]:
        """j (1-based, j not in D) -> p = 1/zeta_j for the gap X_{j+1} - X_j."""
        return {j: 1.0 / self.zeta[j - 1] for j in range(1, self.N + 1) if j not in self.D}

    def cluster_of(self, i: int) -> int:
        """0-based cluster index of particle i (1-based)."""
        for c, n in enumerate(self.D):
            if i <= n:
                return c
        raise ValueError("particle index out of range")

    @classmethod
    def from_zeta(cls, zeta: Sequence[float], atol: float = 1e-12) -> "ClusterStructure":
        zeta = tuple(float(z) for z in zeta)
        if abs(zeta[-1] - 1) > atol:
            raise ValueError("normalise first so that zeta_N = 1 (see PushASEPSystem.normalized)")
        D = tuple(i + 1 for i, z in enumerate(zeta) if abs(z - 1) <= atol)
        bad = [i + 1 for i, z in enumerate(zeta) if z < 1 - atol]
        if bad:
            raise ValueError(
                f"zeta_k < 1 at k={bad}: the particles up to that index and the rest separate "
                "at large times; split the system and treat each part on its own"
            )
        return cls(D, zeta)


# -- simulation --------------------------------------------------------------------


@numba.njit(cache=True)
def _run_events(x, clocks, n):
    """Apply the events ``clocks`` (0..2n-1) to positions x in place."""
    for c in clocks:
        if c < n:
            i = c
            if i == n - 1 or x[i + 1] != x[i] + 1:
                x[i] += 1
        else:
            i = c - n
            x[i] -= 1
            j = i - 1
            while j >= 0 and x[j] >= x[j + 1]:
                x[j] -= 1
                j -= 1


@numba.njit(cache=True)
def _simulate_block(start, counts, u, cum, out):
    n = start.size
    pos = 0
    for r in range(counts.size):
        x = start.copy()
        k = counts[r]
        clocks = np.searchsorted(cum, u[pos : pos + k], side="right")
        pos += k
        _run_events(x, clocks, n)
        out[r, :] = x


def simulate_many(sys: PushASEPSystem, t: float, reps: int, seed: int, block: int = 2000) -> np.ndarray:
    """Positions at time t for ``reps`` independent replicas, shape (reps, N).

    Block b uses ``default_rng([seed, b])`` so results do not depend on how
    blocks are scheduled.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    rates = sys.rates
    R = rates.sum()
    cum = np.cumsum(rates) / R
    cum[-1] = 1.0
    start = np.asarray(sys.positions, dtype=np.int64)
    out = np.empty((reps, sys.N), dtype=np.int64)
    for bi, lo in enumerate(range(0, reps, block)):
        hi = min(reps, lo + block)
        rng = np.random.default_rng([seed, bi])
        counts = rng.poisson(R * t, size=hi - lo).astype(np.int64)
        u = rng.random(int(counts.sum()))
        _simulate_block(start, counts, u, cum, out[lo:hi])
    return out


def simulate(sys: PushASEPSystem, t: float, rng: np.random.Generator) -> np.ndarray:
    """One exact sample of the positions at time t."""
    rates = sys.rates
    R = rates.sum()
    cum = np.cumsum(rates) / R
    cum[-1] = 1.0
    k = rng.poisson(R * t)
    clocks = np.searchsorted(cum, rng.random(k), side="right").astype(np.int64)
    x = np.asarray(sys.positions, dtype=np.int64).copy()
    _run_events(x, clocks, sys.N)
    return x


def apply_event(positions: Sequence[int], particle: int, side: str) -> tuple[int, ...]:
    """Fire the ``side`` ('right'/'left') clock of particle (0-based)."""
    x = np.asarray(positions, dtype=np.int64).copy()
    n = x.size
    c = particle if side == "right" else n + particle
    _run_events(x, np.array([c], dtype=np.int64), n)
    return tuple(int(v) for v in x)


# -- discrete column dynamics ----------------------------------------------------------


@numba.njit(cache=True)
def _column_steps(y, u, p, up):
    n = y.size
    for s in range(u.shape[0]):
        prev = 0
        for k in range(n):
            yk = y[k]
            if up:
                if k > 0 and yk == prev - 1:
                    z = yk
                else:
                    z = yk + 1 if u[s, k] < p[k] else yk
            else:
                if k > 0 and yk == prev:
                    z = yk - 1
                else:
                    z = yk - 1 if u[s, k] < p[k] else yk
            y[k] = z
            prev = z


def column_probs(kind: str, beta: float, q: float, n: int) -> np.ndarray:
    k = np.arange(1, n + 1)
    w = beta * (q ** (1 - k) if kind == "bernoulli_up" else q ** (k - 1))
    return w / (1 + w)


def simulate_discrete_column(kind: str, beta: float, q: float, n_particles: int, steps: int, rng, reps: int | None = None):
    """Sequential right-to-left update from y_k = 1 - k.

    Returns y_1 > y_2 > ... (shape (n,)) or, with ``reps``, an array (reps, n).
    """
    if kind not in ("bernoulli_up", "bernoulli_down"):
        raise ValueError("column dynamics are defined for bernoulli_up and bernoulli_down")
    if not 0 < q < 1 or beta < 0:
        raise ValueError("need 0 < q < 1 and beta >= 0")
    p = column_probs(kind, beta, q, n_particles)
    up = kind == "bernoulli_up"
    single = reps is None
    m = 1 if single else reps
    out = np.empty((m, n_particles), dtype=np.int64)
    for r in range(m):
        y = 1 - np.arange(1, n_particles + 1, dtype=np.int64)
        _column_steps(y, rng.random((steps, n_particles)), p, up)
        out[r] = y
    return out[0] if single else out


@numba.njit(cache=True)
def _column_many(u, p, up, n):
    reps = u.shape[0]
    out = np.empty((reps, n), dtype=np.int64)
    for r in range(reps):
        y = np.empty(n, dtype=np.int64)
        for k in range(n):
            y[k] = -k
        _column_steps(y, u[r], p, up)
        out[r] = y
    return out


def simulate_discrete_column_many(kind: str, beta: float, q: float, n_particles: int, steps: int, reps: int, seed: int):
    rng = np.random.default_rng(seed)
    p = column_probs(kind, beta, q, n_particles)
    u = rng.random((reps, steps, n_particles))
    return _column_many(u, p, kind == "bernoulli_up", n_particles)


# -- exact transition probabilities --------------------------------------------------------


def _saddle_radius(x: np.ndarray, a: float, b: float, t: float, rmax: float) -> np.ndarray:
    """Radius minimising |z^x exp(btz + at/z)| on the positive axis, capped below rmax."""
    x = np.asarray(x, dtype=float)
    if t == 0 or (a == 0 and b == 0):
        r = np.full(x.shape, 0.5 * rmax)
    elif b == 0:
        r = np.where(x > 0, a * t / np.maximum(x, 1e-300), 0.5 * rmax)
    else:
        r = (-x + np.sqrt(x * x + 4 * a * b * t * t)) / (2 * b * t)
        if a == 0:
            r = np.where(x < 0, r, 0.5 * rmax)
    return np.clip(r, 1e-3 * rmax, 0.9 * rmax)


def F_kl(k: int, l: int, x, t: float, sys: PushASEPSystem, m0: int = 64, tol: float = 1e-12, max_nodes: int = 1 << 14):
    """(1/2 pi i) oint prod_{i<k}(1 - zeta_i z) / prod_{j<l}(1 - zeta_j z) z^(x-1) exp(btz + at/z) dz.

    Trapezoid on |z| = r with r near the saddle point of z^x exp(btz + at/z)
    and below min_{j<l} 1/zeta_j; node counts double until the change is
    below ``tol`` relative to the L1 size of the integrand.
    """
    xs = np.atleast_1d(np.asarray(x, dtype=np.int64))
    zeta = np.asarray(sys.zeta)
    a, b = sys.a, sys.b
    if l > 1:
        rmax = 1.0 / zeta[: l - 1].max()
    else:
        rmax = 10.0 * max(1.0, 1.0 / zeta.min())
    r = _saddle_radius(xs, a, b, t, rmax)
    m = m0
    prev = None
    while m <= max_nodes:
        th = 2 * np.pi * np.arange(m) / m
        z = r[:, None] * np.exp(1j * th)[None, :]
        num = np.prod(1 - zeta[: k - 1, None, None] * z[None], axis=0) if k > 1 else 1.0
        den = np.prod(1 - zeta[: l - 1, None, None] * z[None], axis=0) if l > 1 else 1.0
        # log-magnitude form keeps z^x exp(...) finite for large t
        logf = xs[:, None] * np.log(z) + b * t * z + a * t / z
        f = num / den * np.exp(logf)
        val = f.mean(axis=1)
        scale = np.abs(f).mean(axis=1)
        if prev is not None and np.all(np.abs(val - prev) <= tol * np.maximum(scale, 1e-300)):
            out = val.real
            return out if np.ndim(x) else float(out[0])
        prev = val
        m *= 2
    raise FloatingPointError("F_kl quadrature did not stabilise")


def F_kl_series(k: int, l: int, x: int, t: float, sys: PushASEPSystem, terms: int = 400) -> float:
    """Series oracle: [z^(-x)] of the integrand's Laurent expansion near 0."""
    import mpmath as mp

    zeta = sys.zeta
    a, b = mp.mpf(sys.a), mp.mpf(sys.b)
    with mp.workdps(40):
        # power series of prod(1 - zeta_i z)/prod(1 - zeta_j z) exp(btz)
        A = [mp.mpf(0)] * terms
        A[0] = mp.mpf(1)
        for i in range(k - 1):
            A = [A[n] - (zeta[i] * A[n - 1] if n else 0) for n in range(terms)]
        for j in range(l - 1):
            out = [mp.mpf(0)] * terms
            acc = mp.mpf(0)
            for n in range(terms):
                acc = acc * zeta[j] + A[n]
                out[n] = acc
            A = out
        E = [mp.power(b * t, n) / mp.factorial(n) for n in range(terms)]
        S = [mp.fsum(A[i] * E[n - i] for i in range(n + 1)) for n in range(terms)]
        total = mp.mpf(0)
        for m in range(max(0, x), terms):
            if m - x >= terms:
                break
            total += S[m - x] * mp.power(a * t, m) / mp.factorial(m)
        return float(total)


def exact_transition(x, y, t: float, sys: PushASEPSystem) -> float:
    """P_t(x | y) from the determinant of F_{k,l}(x_l - y_k)."""
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    return float(exact_transition_batch(x[None, :], y, t, sys)[0])


def exact_transition_batch(xs: np.ndarray, y, t: float, sys: PushASEPSystem) -> np.ndarray:
    """exact_transition for every row of xs (shape (M, N))."""
    xs = np.atleast_2d(np.asarray(xs, dtype=np.int64))
    y = np.asarray(y, dtype=np.int64)
    n = sys.N
    if xs.shape[1] != n or y.size != n:
        raise ValueError("positions must have one entry per particle")
    if np.any(np.diff(xs, axis=1) <= 0) or np.any(np.diff(y) <= 0):
        raise ValueError("positions must be strictly increasing")
    zeta = np.asarray(sys.zeta)
    mats = np.empty((xs.shape[0], n, n))
    for k in range(1, n + 1):
        for l in range(1, n + 1):
            d = xs[:, l - 1] - y[k - 1]
            uniq, inv = np.unique(d, return_inverse=True)
            mats[:, k - 1, l - 1] = np.asarray(F_kl(k, l, uniq, t, sys))[inv.ravel()]
    logpref = (np.log(zeta)[None, :] * (xs - y[None, :])).sum(axis=1) - t * float(np.sum(sys.a * zeta + sys.b / zeta))
    p = np.exp(logpref) * det_batch(mats)
    if np.any(p < -1e-9) or np.any(p > 1 + 1e-9):
        raise FloatingPointError("exact transition outside [0, 1]; quadrature unstable")
    return np.clip(p, 0.0, 1.0)


def transition_box(y, t: float, sys: PushASEPSystem, width: int) -> tuple[np.ndarray, np.ndarray]:
    """All strictly increasing x with |x_i - y_i| <= width, and their probabilities."""
    y = np.asarray(y, dtype=np.int64)
    n = y.size
    grids = np.meshgrid(*[np.arange(v - width, v + width + 1) for v in y], indexing="ij")
    xs = np.stack([g.ravel() for g in grids], axis=1)
    xs = xs[np.all(np.diff(xs, axis=1) > 0, axis=1)] if n > 1 else xs
    return xs, exact_transition_batch(xs, y, t, sys)


# -- large-time rescaling ---------------------------------------------------------------


@dataclass(frozen=True)
class RescaledObservation:
    tilde_x: tuple[float, ...]
    gaps: dict

    def __post_init__(self):
        if any(g < 1 for g in self.gaps.values()):
            raise ValueError("gaps must be >= 1")


def rescale(positions, t: float, sys: PushASEPSystem) -> RescaledObservation:
    """x~_i = (X_{n_i} - (a-b)t)/sqrt((a+b)t) on D, and X_{j+1} - X_j for j not in D."""
    if t <= 0:
        raise ValueError("t must be positive")
    s = sys if abs(sys.zeta[-1] - 1) < 1e-12 else sys.normalized()
    cl = ClusterStructure.from_zeta(s.zeta)
    x = np.asarray(positions, dtype=float)
    v, sc = s.a - s.b, math.sqrt((s.a + s.b) * t)
    tilde = tuple(float((x[n - 1] - v * t) / sc) for n in cl.D)
    gaps = {j: int(x[j] - x[j - 1]) for j in cl.gap_parameters()}
    return RescaledObservation(tilde, gaps)


def rescale_many(samples: np.ndarray, t: float, sys: PushASEPSystem) -> tuple[np.ndarray, dict[int, np.ndarray]]:
    s = sys if abs(sys.zeta[-1] - 1) < 1e-12 else sys.normalized()
    cl = ClusterStructure.from_zeta(s.zeta)
    v, sc = s.a - s.b, math.sqrt((s.a + s.b) * t)
    idx = np.asarray(cl.D) - 1
    tilde = (samples[:, idx] - v * t) / sc
    gaps = {j: samples[:, j] - samples[:, j - 1] for j in cl.gap_parameters()}
    return tilde, gaps


def geometric_pmf(g, p: float):
    """Mass (1-p) p^(g-1) on g = 1, 2, ..."""
    g = np.asarray(g)
    return np.where(g >= 1, (1 - p) * p ** (g - 1.0), 0.0)


def limit_density(obs: RescaledObservation, cluster: ClusterStructure) -> float:
    """Limit law: GUE_1^h density in x~ times the geometric gap masses."""
    from .gue import gue1_density

    if any(z < 1 - 1e-12 for z in cluster.zeta):
        raise ValueError("zeta must be normalised with zeta >= 1 (split clusters otherwise)")
    out = gue1_density(obs.tilde_x)
    for j, p in cluster.gap_parameters().items():
        out *= float(geometric_pmf(obs.gaps[j], p))
    return out


def single_particle_pmf(x, t: float, zeta: float, a: float, b: float):
    """Law of X(t) - X(0) for one particle: Skellam with means a zeta t and b t / zeta."""
    from scipy import stats

    return stats.skellam.pmf(x, a * zeta * t, b * t / zeta)


__all__ = [
    "ClusterStructure",
    "F_kl",
    "F_kl_series",
    "PushASEPSystem",
    "RescaledObservation",
    "apply_event",
    "column_probs",
    "exact_transition",
    "exact_transition_batch",
    "geometric_pmf",
    "limit_density",
    "rescale",
    "rescale_many",
    "simulate",
    "simulate_discrete_column",
    "simulate_discrete_column_many",
    "simulate_many",
    "single_particle_pmf",
    "transition_box",
]
