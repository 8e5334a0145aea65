"""Rational Schur functions at the geometric point (1, 1/q, ..., q^(1-N)).

``log_principal_specialization`` is the closed product form used by every
kernel; ``schur_branching_eval`` is a slow, independent oracle built from the
branching rule and is only meant for small N.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gt import Signature, as_signature, enumerate_interlacing_below


@dataclass(frozen=True)
class GeometricSpec:
    """The point xi_i = q^(1-i), i = 1..N."""

    q: float
    N: int

    def __post_init__(self):
        if not 0.0 < self.q < 1.0:
            raise ValueError(f"q must lie in (0, 1), got {self.q}")
        if self.N < 0:
            raise ValueError("N must be >= 0")

    @property
    def xi(self) -> np.ndarray:
        return self.q ** (-np.arange(self.N, dtype=float))

    def at_level(self, n: int) -> "GeometricSpec":
        return GeometricSpec(self.q, n)


def log_principal_specialization(lam, q: float) -> float:
    """log s_lam(1, q^-1, ..., q^(1-N)), N = len(lam)."""
    lam = np.asarray(as_signature(lam).parts, dtype=float)
    n = lam.size
    if n <= 1:
        return 0.0
    logq = math.log(q)
    i = np.arange(1, n + 1)
    out = -logq * float(np.dot(n - i, lam))
    ii, jj = np.triu_indices(n, k=1)
    e_num = lam[ii] - (ii + 1) - lam[jj] + (jj + 1)
    e_den = (jj - ii).astype(float)
    out += float(np.sum(np.log1p(-(q ** e_num))) - np.sum(np.log1p(-(q ** e_den))))
    return out


def log_principal_specialization_batch(lams: np.ndarray, q: float) -> np.ndarray:
    """Vectorised version over the rows of an (M, N) integer array."""
    lams = np.asarray(lams, dtype=float)
    m, n = lams.shape
    if n <= 1:
        return np.zeros(m)
    logq = math.log(q)
    i = np.arange(1, n + 1)
    out = -logq * (lams @ (n - i).astype(float))
    ii, jj = np.triu_indices(n, k=1)
    e_num = lams[:, ii] - lams[:, jj] + (jj - ii)
    e_den = (jj - ii).astype(float)
    out += np.sum(np.log1p(-(q ** e_num)), axis=1) - np.sum(np.log1p(-(q ** e_den)))
    return out


def principal_specialization(lam, spec: GeometricSpec | float) -> float:
    q = spec.q if isinstance(spec, GeometricSpec) else float(spec)
    lam = as_signature(lam)
    if isinstance(spec, GeometricSpec) and len(lam) != spec.N:
        raise ValueError(f"signature length {len(lam)} does not match N={spec.N}")
    return math.exp(log_principal_specialization(lam, q))


def schur_ratio(mu, lam, spec: GeometricSpec | float) -> float:
    """s_mu(xi) / s_lam(xi) at the geometric point."""
    q = spec.q if isinstance(spec, GeometricSpec) else float(spec)
    mu, lam = as_signature(mu), as_signature(lam)
    if len(mu) != len(lam):
        raise ValueError("schur_ratio needs signatures of equal length")
    return math.exp(log_principal_specialization(mu, q) - log_principal_specialization(lam, q))


def schur_branching_eval(lam, x) -> float:
    """s_lam(x_1..x_N) via s_lam = sum_{mu < lam} x_N^(|lam|-|mu|) s_mu(x_1..x_{N-1}).

    Exact for Fraction/int inputs. Negative parts are Laurent monomials, so a
    zero variable is only allowed when every exponent that arises is >= 0.
    """
    lam = as_signature(lam)
    x = list(x)
    if len(x) != len(lam):
        raise ValueError("need one variable per part")
    memo: dict[tuple[tuple[int, ...], int], object] = {}

    def rec(sig: Signature, n: int):
        if n == 0:
            return 1
        key = (sig.parts, n)
        if key in memo:
            return memo[key]
        xn = x[n - 1]
        total = 0
        for mu in enumerate_interlacing_below(sig):
            e = sig.size - mu.size
            if xn == 0:
                if e < 0:
                    raise ZeroDivisionError("negative power of a zero variable")
                if e > 0:
                    continue
                term = 1
            else:
                term = xn**e
            total = total + term * rec(mu, n - 1)
        memo[key] = total
        return total

    if len(lam) == 0:
        return 1
    return rec(lam, len(lam))
