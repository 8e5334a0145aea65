"""Admissible functions g(x) and their Laurent coefficients.

An admissible function is a finite product of elementary factors::

    x, 1/x, (1 + b x), (1 + b/x), exp(c x), exp(c/x), 1/(1 - a x), 1/(1 - a/x)

All Laurent coefficients are nonnegative, so the mass neglected by a finite
window at radius r is exactly ``g(r) - sum_{k in window} c_k r^k``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
from scipy import special

KINDS = (
    "monomial_up",
    "monomial_down",
    "bernoulli_up",
    "bernoulli_down",
    "poisson_up",
    "poisson_down",
    "geom_up",
    "geom_down",
)
_PARAMETER_FREE = ("monomial_up", "monomial_down")
POLE_TOL = 1e-12


class InadmissibleError(ValueError):
    """A factor is used outside the region where it is admissible."""


@dataclass(frozen=True)
class ElementaryFactor:
    kind: str
    param: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown factor kind {self.kind!r}")
        if self.kind in _PARAMETER_FREE:
            object.__setattr__(self, "param", 0.0)
            return
        p = float(self.param)
        object.__setattr__(self, "param", p)
        if not p > 0:
            raise InadmissibleError(f"{self.kind} needs a positive parameter, got {p}")
        if self.kind == "geom_down" and not p < 1:
            raise InadmissibleError("geom_down requires 0 < alpha < 1")
        if self.kind == "geom_up" and not p < 1:
            raise InadmissibleError("geom_up requires 0 < alpha < 1 even at level 1")

    @property
    def is_up(self) -> bool:
        return self.kind.endswith("_up")

    def max_level(self, q: float) -> float:
        """Largest N at which the factor is admissible for xi_i = q^(1-i)."""
        if self.kind != "geom_up":
            return math.inf
        # alpha < q^(N-1)  <=>  N - 1 < log(alpha)/log(q)
        return max(1, math.ceil(math.log(self.param) / math.log(q) - 1e-12))

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        p = self.param
        kind = self.kind
        if kind.endswith("_down") and np.any(np.abs(z) < POLE_TOL):
            raise ValueError(f"{kind} is singular at 0")
        if kind == "monomial_up":
            return z
        if kind == "monomial_down":
            return 1.0 / z
        if kind == "bernoulli_up":
            return 1.0 + p * z
        if kind == "bernoulli_down":
            return 1.0 + p / z
        if kind == "poisson_up":
            return np.exp(p * z)
        if kind == "poisson_down":
            return np.exp(p / z)
        if kind == "geom_up":
            d = 1.0 - p * z
        else:
            d = 1.0 - p / z
        if np.any(np.abs(d) < POLE_TOL):
            raise ValueError(f"{kind}({p}) evaluated at its pole")
        return 1.0 / d

    def value(self, r: float) -> float:
        """Real value at a positive radius inside the annulus of convergence."""
        return float(np.real(self(complex(r))))

    # -- coefficients -----------------------------------------------------
    def coeffs(self, lo: int, hi: int) -> np.ndarray:
        k = np.arange(lo, hi + 1)
        out = np.zeros(k.size)
        p = self.param
        kind = self.kind
        if kind == "monomial_up":
            out[k == 1] = 1.0
        elif kind == "monomial_down":
            out[k == -1] = 1.0
        elif kind == "bernoulli_up":
            out[k == 0] = 1.0
            out[k == 1] = p
        elif kind == "bernoulli_down":
            out[k == 0] = 1.0
            out[k == -1] = p
        elif kind in ("poisson_up", "poisson_down"):
            kk = k if kind == "poisson_up" else -k
            m = kk >= 0
            out[m] = np.exp(kk[m] * math.log(p) - special.gammaln(kk[m] + 1))
        else:
            kk = k if kind == "geom_up" else -k
            m = kk >= 0
            out[m] = p ** kk[m].astype(float)
        return out

    def window(self, rmin: float, rmax: float, rel_tol: float) -> tuple[int, int]:
        """A window [lo, hi] whose neglected mass at rmin/rmax is < rel_tol * value."""
        kind = self.kind
        if kind == "monomial_up":
            return 1, 1
        if kind == "monomial_down":
            return -1, -1
        if kind == "bernoulli_up":
            return 0, 1
        if kind == "bernoulli_down":
            return -1, 0
        if kind.startswith("poisson"):
            x = self.param * (rmax if kind == "poisson_up" else 1.0 / rmin)
            # P(Poisson(x) > n) < rel_tol
            n = int(x)
            while special.gammainc(n + 1, x) >= rel_tol:
                n += 1 if n < 50 else max(1, n // 20)
            return (0, n) if kind == "poisson_up" else (-n, 0)
        x = self.param * (rmax if kind == "geom_up" else 1.0 / rmin)
        if not x < 1:
            raise InadmissibleError(
                f"{kind}({self.param}) diverges on the annulus [{rmin}, {rmax}]"
            )
        # tail fraction of a geometric series with ratio x: x^(n+1)
        n = max(0, math.ceil(math.log(rel_tol) / math.log(x)) - 1)
        return (0, n) if kind == "geom_up" else (-n, 0)

    def to_string(self) -> str:
        if self.kind in _PARAMETER_FREE:
            return self.kind
        return f"{self.kind}:{self.param:g}"


@dataclass(frozen=True)
class AdmissibleFunction:
    """g(x) = prod(factors); the empty product is the constant 1."""

    factors: tuple[ElementaryFactor, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))

    @classmethod
    def parse(cls, text: str) -> "AdmissibleFunction":
        """Parse ``"bernoulli_up:1.0*poisson_down:0.5"``; ``""`` or ``"1"`` is g = 1."""
        text = text.strip()
        if text in ("", "1"):
            return cls(())
        factors = []
        for tok in text.split("*"):
            tok = tok.strip()
            if ":" in tok:
                kind, val = tok.split(":", 1)
                factors.append(ElementaryFactor(kind.strip(), float(val)))
            else:
                factors.append(ElementaryFactor(tok))
        return cls(tuple(factors))

    def to_string(self) -> str:
        return "*".join(f.to_string() for f in self.factors) or "1"

    def __mul__(self, other: "AdmissibleFunction") -> "AdmissibleFunction":
        return AdmissibleFunction(self.factors + other.factors)

    def power(self, t: int) -> "AdmissibleFunction":
        if t < 0:
            raise ValueError("only nonnegative powers are admissible")
        return AdmissibleFunction(self.factors * t)

    @property
    def is_identity(self) -> bool:
        return not self.factors

    def max_level(self, q: float) -> float:
        return min((f.max_level(q) for f in self.factors), default=math.inf)

    def check_level(self, q: float, N: int) -> None:
        for f in self.factors:
            if N > f.max_level(q):
                raise InadmissibleError(
                    f"{f.to_string()} is admissible only up to level {f.max_level(q)}, "
                    f"requested N={N} at q={q}"
                )

    def __call__(self, z):
        return eval_g(self, z)

    def value(self, r: float) -> float:
        out = 1.0
        for f in self.factors:
            out *= f.value(r)
        return out

    def log_value(self, r: float) -> float:
        return float(sum(math.log(f.value(r)) for f in self.factors))


def eval_g(g: AdmissibleFunction, z):
    """Pointwise product of factor values (vectorised over numpy arrays)."""
    z = np.asarray(z, dtype=complex)
    out = np.ones_like(z)
    for f in g.factors:
        out = out * f(z)
    if out.ndim == 0:
        return complex(out)
    return out


@dataclass(frozen=True)
class LaurentWindow:
    """Coefficients c_lo..c_hi of g together with the neglected weighted mass.

    ``tail_mass_bound`` bounds sum_{k>hi} c_k rmax^k + sum_{k<lo} c_k rmin^k.
    """

    lo: int
    hi: int
    coeffs: np.ndarray
    tail_mass_bound: float
    rmin: float = 1.0
    rmax: float = 1.0

    def c(self, k):
        k = np.asarray(k)
        idx = k - self.lo
        inside = (idx >= 0) & (idx < self.coeffs.size)
        out = np.where(inside, self.coeffs[np.clip(idx, 0, self.coeffs.size - 1)], 0.0)
        if out.ndim == 0:
            return float(out)
        return out

    def __getitem__(self, k: int) -> float:
        return self.c(k)

    @property
    def ks(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1)

    def partial_sum(self, r: float) -> float:
        return float(np.dot(self.coeffs, float(r) ** self.ks.astype(float)))


def _radii(q, N, rmin, rmax):
    if rmin is None:
        rmin = 1.0
    if rmax is None:
        rmax = 1.0 if q is None or N is None else q ** (1 - N)
    if rmin <= 0 or rmax < rmin:
        raise ValueError("need 0 < rmin <= rmax")
    return float(rmin), float(rmax)


def neglected_mass(g: AdmissibleFunction, win: LaurentWindow, r: float) -> float:
    """Exact mass of the coefficients outside ``win`` at radius r (clamped at 0)."""
    return max(0.0, g.value(r) - win.partial_sum(r))


def laurent_coeffs(
    g: AdmissibleFunction,
    tol: float = 1e-14,
    *,
    q: float | None = None,
    N: int | None = None,
    rmin: float | None = None,
    rmax: float | None = None,
) -> LaurentWindow:
    """Laurent coefficients of g on a window that leaves relative mass < tol.

    The weighting radii default to the xi-range [1, q^(1-N)] of level N.
    Single factors use closed forms; products are built by convolution.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if q is not None and N is not None:
        g.check_level(q, N)
    rmin, rmax = _radii(q, N, rmin, rmax)
    if g.is_identity:
        return LaurentWindow(0, 0, np.ones(1), 0.0, rmin, rmax)
    # per-factor windows tight enough that the union bound stays far below tol
    inner = tol * 1e-3 / len(g.factors)
    lo, coeffs = 0, np.ones(1)
    for f in g.factors:
        flo, fhi = f.window(rmin, rmax, inner)
        coeffs = np.convolve(coeffs, f.coeffs(flo, fhi))
        lo += flo
    hi = lo + coeffs.size - 1
    ks = np.arange(lo, hi + 1).astype(float)
    g_max, g_min = g.value(rmax), g.value(rmin)
    wmax = coeffs * rmax**ks
    wmin = coeffs * rmin**ks
    # trim from both ends while the dropped weighted mass stays below tol
    budget_hi = 0.5 * tol * g_max
    budget_lo = 0.5 * tol * g_min
    base_hi = max(0.0, g_max - wmax.sum())
    base_lo = max(0.0, g_min - wmin.sum())
    cut_hi = np.cumsum(wmax[::-1])
    n_hi = int(np.searchsorted(cut_hi, budget_hi - base_hi, side="right")) if budget_hi > base_hi else 0
    cut_lo = np.cumsum(wmin)
    n_lo = int(np.searchsorted(cut_lo, budget_lo - base_lo, side="right")) if budget_lo > base_lo else 0
    n_keep = coeffs.size - n_hi - n_lo
    if n_keep <= 0:
        n_lo, n_hi = 0, 0
        n_keep = coeffs.size
    kept = coeffs[n_lo : n_lo + n_keep].copy()
    new_lo = lo + n_lo
    win = LaurentWindow(new_lo, new_lo + kept.size - 1, kept, 0.0, rmin, rmax)
    tail = neglected_mass(g, win, rmax) + neglected_mass(g, win, rmin)
    return LaurentWindow(win.lo, win.hi, kept, tail, rmin, rmax)


def time_semigroup_function(gamma_plus: float, gamma_minus: float, t: float) -> AdmissibleFunction:
    """exp(t(gamma_plus x + gamma_minus / x)) as a product of Poisson factors."""
    if gamma_plus < 0 or gamma_minus < 0 or t < 0:
        raise ValueError("rates and time must be nonnegative")
    factors = []
    if gamma_plus * t > 0:
        factors.append(ElementaryFactor("poisson_up", gamma_plus * t))
    if gamma_minus * t > 0:
        factors.append(ElementaryFactor("poisson_down", gamma_minus * t))
    return AdmissibleFunction(tuple(factors))


def time_semigroup_coeffs(
    gamma_plus: float,
    gamma_minus: float,
    t: float,
    tol: float = 1e-14,
    **radii,
) -> LaurentWindow:
    """c_k = sum_m (t g+)^(k+m) (t g-)^m / ((k+m)! m!), the coefficients of exp(t(g+ x + g-/x))."""
    if t > 0 and gamma_plus + gamma_minus <= 0:
        raise ValueError("need gamma_plus + gamma_minus > 0 when t > 0")
    return laurent_coeffs(time_semigroup_function(gamma_plus, gamma_minus, t), tol, **radii)


def product(functions: Iterable[AdmissibleFunction]) -> AdmissibleFunction:
    out = AdmissibleFunction(())
    for g in functions:
        out = out * g
    return out
