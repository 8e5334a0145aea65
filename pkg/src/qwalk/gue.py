"""Smallest eigenvalues of nested GUE corners and their joint density.

The functions

    G_n(z) = (1/2 pi i) int u^n exp(u^2/2 + u z) du

are taken along an upward vertical line to the left of u = 0, so that
G_0 is the standard normal density, G_n = d^n/dz^n G_0 for n >= 0, and
G_{-1}(z) = Phi(z) - 1.  The joint density of (y_1 <= ... <= y_n), with y_1
the smallest eigenvalue of the full matrix and y_n the (1,1) entry, is
det[G_{k-l}(y_l)].
"""
from __future__ import annotations

import math

import mpmath as mp
import numpy as np
from scipy import integrate, stats

SQRT2 = math.sqrt(2.0)


# -- sampling --------------------------------------------------------------------------

def sample_gue(n: int, rng: np.random.Generator, reps: int | None = None) -> np.ndarray:
    """GUE matrices with N(0,1) diagonal and off-diagonal real/imag parts of variance 1/2."""
    m = 1 if reps is None else reps
    a = rng.standard_normal((m, n, n))
    b = rng.standard_normal((m, n, n))
    iu = np.triu_indices(n, 1)
    h = np.zeros((m, n, n), dtype=complex)
    h[:, iu[0], iu[1]] = (a[:, iu[0], iu[1]] + 1j * b[:, iu[0], iu[1]]) / SQRT2
    h = h + np.conj(np.transpose(h, (0, 2, 1)))
    d = np.arange(n)
    h[:, d, d] = a[:, d, d]
    return h[0] if reps is None else h


def corner_minima(h: np.ndarray) -> np.ndarray:
    """(lambda_1^n, lambda_1^(n-1), ..., lambda_1^1) for each matrix in the stack."""
    h = np.asarray(h)
    single = h.ndim == 2
    if single:
        h = h[None]
    n = h.shape[-1]
    out = np.empty((h.shape[0], n))
    for k in range(1, n + 1):
        out[:, n - k] = np.linalg.eigvalsh(h[:, :k, :k])[:, 0]
    return out[0] if single else out


def sample_gue_corners(n: int, rng: np.random.Generator, reps: int | None = None) -> np.ndarray:
    if n < 1:
        raise ValueError("n must be >= 1")
    return corner_minima(sample_gue(n, rng, reps))


# -- the functions G_n -----------------------------------------------------------------

def _hermite_functions(nmax: int, x: np.ndarray) -> list[np.ndarray]:
    """Normalised Hermite functions psi_0..psi_nmax at x by the stable recurrence."""
    psi = [np.pi**-0.25 * np.exp(-x * x / 2)]
    if nmax >= 1:
        psi.append(SQRT2 * x * psi[0])
    for k in range(1, nmax):
        psi.append(math.sqrt(2.0 / (k + 1)) * x * psi[k] - math.sqrt(k / (k + 1)) * psi[k - 1])
    return psi


def gauss_gn_hermite(n: int, z):
    """G_n for n >= 0: (-1)^n H_n(z/sqrt2) exp(-z^2/2) / (sqrt(pi) 2^((n+1)/2))."""
    if n < 0:
        raise ValueError("the Hermite form needs n >= 0")
    z = np.asarray(z, dtype=float)
    x = z / SQRT2
    psi = _hermite_functions(n, x)[n]
    # H_n(x) e^{-x^2} = psi_n(x) e^{-x^2/2} sqrt(2^n n! sqrt(pi))
    out = (-1) ** n * psi * np.exp(-x * x / 2) * math.exp(0.5 * math.lgamma(n + 1)) * np.pi**-0.25 / SQRT2
    return float(out) if out.ndim == 0 else out


def _gn_negative_closed(k: int, z: np.ndarray) -> np.ndarray:
    s, p = stats.norm.sf(z), stats.norm.pdf(z)
    if k == 1:
        return -s
    if k == 2:
        return p - z * s
    if k == 3:
        return -0.5 * ((1 + z * z) * s - z * p)
    return ((z * z + 2) * p - z * (z * z + 3) * s) / 6


def gauss_gn_negative(n: int, z, exact: bool = False):
    """G_n for n < 0: (-1)^k int_z^inf (s-z)^(k-1)/(k-1)! phi(s) ds with k = -n.

    k <= 4 uses closed forms in phi and Phi unless ``exact``; otherwise the
    repeated tail integrals run in mpmath.
    """
    if n >= 0:
        raise ValueError("needs n < 0")
    k = -n
    if k <= 4 and not exact:
        out = _gn_negative_closed(k, np.asarray(z, dtype=float))
        return float(out) if out.ndim == 0 else out
    zs = np.atleast_1d(np.asarray(z, dtype=float))
    out = np.empty(zs.shape)
    with mp.workdps(40 + 2 * k):
        for i, zz in enumerate(zs):
            x = mp.mpf(zz)
            # Hh_m(x) = int_x^inf (t-x)^m/m! e^{-t^2/2} dt, m Hh_m = Hh_{m-2} - x Hh_{m-1}
            hm1 = mp.exp(-x * x / 2)
            h0 = mp.sqrt(mp.pi / 2) * mp.erfc(x / mp.sqrt(2))
            prev, cur = hm1, h0
            for m in range(1, k):
                prev, cur = cur, (prev - x * cur) / m
            out[i] = float((-1) ** k * cur / mp.sqrt(2 * mp.pi))
    return float(out[0]) if np.ndim(z) == 0 else out.reshape(np.shape(z))


def _line_abscissa(n: int, z: float) -> float:
    if n >= 0:
        return -z
    return -z if z > 0.5 else -0.5


def gauss_gn_contour(n: int, z, h: float = 0.02, half_width: float = 14.0):
    """G_n by the trapezoid rule on the upward line Re u = c < 0 (c = -z near the saddle)."""
    zs = np.atleast_1d(np.asarray(z, dtype=float))
    out = np.empty(zs.shape)
    ys = np.arange(-half_width, half_width + h / 2, h)
    for i, zz in enumerate(zs):
        c = _line_abscissa(n, zz)
        u = c + 1j * ys
        # (1/2 pi i) du = (1/2 pi) dy
        f = u**n * np.exp(u * u / 2 + u * zz)
        out[i] = (f.sum() * h / (2 * np.pi)).real
    return float(out[0]) if np.ndim(z) == 0 else out.reshape(np.shape(z))


def gauss_gn(n: int, z):
    """G_n(z): Hermite form for n >= 0, repeated Gaussian tail integrals for n < 0."""
    return gauss_gn_hermite(n, z) if n >= 0 else gauss_gn_negative(n, z)


# -- density -----------------------------------------------------------------------------

def gn_matrix(y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    n = y.size
    m = np.empty((n, n))
    for k in range(n):
        for l in range(n):
            m[k, l] = gauss_gn(k - l, y[l])
    return m


def gue1_density(y) -> float:
    """det[G_{k-l}(y_l)] on the ordered cone y_1 <= ... <= y_n."""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if np.any(np.diff(y) < 0):
        raise ValueError("the density is defined on y_1 <= ... <= y_n only")
    if y.size == 1:
        return float(stats.norm.pdf(y[0]))
    return float(np.linalg.det(gn_matrix(y)))


def gue2_density(y1, y2):
    """Closed form for n = 2: phi(y1) [phi(y2) - y1 (1 - Phi(y2))]; vectorised, zero off the cone."""
    y1 = np.asarray(y1, dtype=float)
    y2 = np.asarray(y2, dtype=float)
    d = stats.norm.pdf(y1) * (stats.norm.pdf(y2) - y1 * stats.norm.sf(y2))
    return np.where(y1 <= y2, d, 0.0)


def _inner_y2(y1, c, d):
    """int_{max(y1,c)}^{d} [phi(y2) - y1 (1 - Phi(y2))] dy2 in closed form."""
    lo = np.maximum(y1, c)

    def anti(y):
        # antiderivative of phi(y) - y1 (1 - Phi(y)); the bracket vanishes at +inf
        if np.isposinf(y):
            return 1.0
        return stats.norm.cdf(y) - y1 * (y * stats.norm.sf(y) - stats.norm.pdf(y))

    return np.where(lo < d, anti(d) - anti(lo), 0.0)


def gue2_box_prob(a: float, b: float, c: float, d: float) -> float:
    """P(a < Y1 <= b, c < Y2 <= d) for GUE_1^2 (edges may be infinite)."""
    if b <= a or d <= c:
        return 0.0
    hi = min(b, d)
    if hi <= a:
        return 0.0

    def f(y1):
        return float(stats.norm.pdf(y1) * _inner_y2(y1, c, d))

    pts = [p for p in (c,) if a < p < hi and math.isfinite(p)]
    lo_, hi_ = max(a, -12.0), min(hi, 12.0)
    if hi_ <= lo_:
        return 0.0
    val, _ = integrate.quad(f, lo_, hi_, points=pts or None, limit=200, epsabs=1e-13, epsrel=1e-11)
    return max(0.0, val)


def gue2_marginal_cdf(which: int, y):
    """CDF of Y1 (which=1, smallest eigenvalue of the 2x2 matrix) or Y2 (which=2, standard normal).

    For Y1 the density phi [(1 + y^2) S - y phi] with S = 1 - Phi integrates to
    1 - S^2 + phi^2 - y phi S.
    """
    y = np.asarray(y, dtype=float)
    if which == 2:
        return stats.norm.cdf(y)
    if which != 1:
        raise ValueError("which must be 1 or 2")
    s, p = stats.norm.sf(y), stats.norm.pdf(y)
    with np.errstate(invalid="ignore"):
        out = 1.0 - s * s + p * p - np.where(np.isfinite(y), y * p * s, 0.0)
    return float(out) if out.ndim == 0 else out


def gue2_marginal_density(y):
    """Density of Y1 for n = 2."""
    y = np.asarray(y, dtype=float)
    s, p = stats.norm.sf(y), stats.norm.pdf(y)
    return p * ((1 + y * y) * s - y * p)


def smallest_eigenvalue_2x2_cdf(y):
    """Independent oracle for the smallest eigenvalue of a 2x2 GUE matrix.

    lambda_min = (m11 + m22)/2 - sqrt(((m11 - m22)/2)^2 + |m12|^2); the mean is
    N(0, 1/2) and the radius is chi with 3 degrees of freedom scaled by 1/sqrt 2,
    independent of the mean.
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))

    def one(v):
        # P(mean - R <= v) = E[P(R >= mean - v)]
        f = lambda m: stats.norm.pdf(m, scale=math.sqrt(0.5)) * stats.chi.sf((m - v) * SQRT2, 3)
        val, _ = integrate.quad(f, -12, 12, points=[v], limit=200, epsabs=1e-13)
        return val

    out = np.array([one(v) for v in y])
    return out


def gue_orthant_prob(upper, nodes: int = 96, lower: float = -10.0) -> float:
    """P(Y_1 <= u_1, ..., Y_n <= u_n) for n <= 3.

    For n = 3 the last coordinate is integrated exactly (int G_m = G_{m-1})
    and (y_1, y_2) by tensor Gauss-Legendre on {y_1 <= y_2 <= min(u_2, u_3)}.
    """
    u = [min(float(v), -lower) for v in np.atleast_1d(upper)]
    n = len(u)
    if n == 1:
        return float(stats.norm.cdf(u[0]))
    if n == 2:
        return gue2_box_prob(-np.inf, u[0], -np.inf, u[1])
    if n != 3:
        raise ValueError("orthant probabilities are implemented for n <= 3")
    m = min(u[1], u[2])
    top = min(u[0], m)
    if top <= lower:
        return 0.0
    x, w = np.polynomial.legendre.leggauss(nodes)
    y1 = lower + (top - lower) * (x + 1) / 2
    w1 = w * (top - lower) / 2
    s = (x + 1) / 2
    Y1 = y1[:, None]
    Y2 = Y1 + (m - Y1) * s[None, :]
    W = w1[:, None] * (w[None, :] / 2) * (m - Y1)
    c = u[2]
    col1 = [np.broadcast_to(gauss_gn(j, Y1), Y2.shape) for j in (0, 1, 2)]
    col2 = [gauss_gn(j, Y2) for j in (-1, 0, 1)]
    col3 = [gauss_gn(j, c) - gauss_gn(j, Y2) for j in (-3, -2, -1)]
    mat = np.stack([np.stack([col1[k], col2[k], col3[k]], axis=-1) for k in range(3)], axis=-2)
    return float((np.linalg.det(mat) * W).sum())


def integrate_density_n2(lo: float = -10.0, hi: float = 10.0) -> float:
    """int over {y1 <= y2} of the n = 2 density, using the generic determinant."""
    val, _ = integrate.dblquad(
        lambda y2, y1: gue1_density([y1, y2]), lo, hi, lambda y1: y1, lambda y1: hi, epsabs=1e-10, epsrel=1e-10
    )
    return val


def mean_smallest_n2() -> float:
    """E[Y1] for n = 2 by quadrature of the density."""
    f = lambda y1: y1 * stats.norm.pdf(y1) * float(_inner_y2(y1, -np.inf, np.inf))
    val, _ = integrate.quad(f, -12, 12, limit=200, epsabs=1e-13)
    return val


__all__ = [
    "corner_minima",
    "gauss_gn",
    "gauss_gn_contour",
    "gauss_gn_hermite",
    "gauss_gn_negative",
    "gn_matrix",
    "gue1_density",
    "gue_orthant_prob",
    "gue2_box_prob",
    "gue2_density",
    "gue2_marginal_cdf",
    "gue2_marginal_density",
    "integrate_density_n2",
    "mean_smallest_n2",
    "sample_gue",
    "sample_gue_corners",
    "smallest_eigenvalue_2x2_cdf",
]
