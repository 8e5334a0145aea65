"""Space-time correlation kernels K^N and K for the packed start.

The double integral in the kernel is evaluated by residues.  With
W(w) = prod_{t<t1} g_t(w) * prod_l (1 - q^l w) and |w| < |z| on the
contours, the w-integral is ``-z^(-x1-1) W_{<=x1}(z)`` (the Laurent series of W
cut at degree x1).  The z-integral then collapses onto the simple poles
z_i = q^(-i):

    D = sum_i q^(-i) / prod_{l != i} (1 - q^(l-i)) * G(z_i) z_i^(x2-x1-1) W_{<=x1}(z_i)

with G = 1 / prod_{t<t2} g_t.  The terms cancel massively once x grows
(individual terms reach q^(-x^2/2)), so the sum runs in mpmath with a
working precision chosen from a magnitude bound.  Trapezoidal quadrature on
the original contours is kept as an independent route for cross-checks in
the well-conditioned regime.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import mpmath as mp
import numpy as np

from .glaurent import AdmissibleFunction, ElementaryFactor, eval_g, product, time_semigroup_function
from .gt import Signature, as_signature
from .schur import GeometricSpec
from .transitions import TransitionSpec, transition_prob

INF = math.inf


class QuadratureError(RuntimeError):
    pass


class ContourError(ValueError):
    pass


# -- q-Pochhammer -------------------------------------------------------------

def qpochhammer(w, q: float, tol: float = 1e-16, n: int | float = INF):
    """(w; q)_n = prod_{i<n} (1 - w q^i); infinite by default."""
    if not 0 < q < 1:
        raise ValueError("need 0 < q < 1")
    w = np.asarray(w, dtype=complex)
    out = np.ones_like(w)
    term = w.copy()
    i = 0
    while i < n:
        out = out * (1 - term)
        i += 1
        # remaining factors change the product by at most exp(|w| q^i / (1-q)) - 1
        if n == INF and np.all(np.abs(term) * q / (1 - q) < tol):
            break
        term = term * q
    return complex(out) if out.ndim == 0 else out


# -- specs --------------------------------------------------------------------

@dataclass(frozen=True)
class SpaceTimePoint:
    x: int
    t: float

    def __post_init__(self):
        if self.t < 0:
            raise ValueError("time must be nonnegative")
        object.__setattr__(self, "x", int(self.x))

    @classmethod
    def parse_list(cls, text: str) -> list["SpaceTimePoint"]:
        """``"(0,1),(3,2)"`` -> [SpaceTimePoint(0, 1), SpaceTimePoint(3, 2)]."""
        out = []
        for chunk in text.replace(" ", "").split(")"):
            chunk = chunk.strip(",(")
            if chunk:
                x, t = chunk.split(",")
                tt = float(t)
                out.append(cls(int(x), int(tt) if tt.is_integer() else tt))
        return out


@dataclass(frozen=True)
class KernelSpec:
    """Kernel data: q, the driving functions, and the level (int N or math.inf).

    Discrete time uses ``g`` at every step unless ``g_sequence`` is given.
    Continuous time uses exp(t (gamma_plus x + gamma_minus / x)) via ``rates``.
    """

    q: float
    level: int | float
    g: AdmissibleFunction | None = None
    g_sequence: tuple[AdmissibleFunction, ...] | None = None
    rates: tuple[float, float] | None = None

    def __post_init__(self):
        if not 0 < self.q < 1:
            raise ValueError("q must lie in (0, 1)")
        if isinstance(self.g, str):
            object.__setattr__(self, "g", AdmissibleFunction.parse(self.g))
        if self.g_sequence is not None:
            seq = tuple(AdmissibleFunction.parse(h) if isinstance(h, str) else h for h in self.g_sequence)
            object.__setattr__(self, "g_sequence", seq)
        modes = sum(v is not None for v in (self.g, self.g_sequence, self.rates))
        if modes != 1:
            raise ValueError("give exactly one of g, g_sequence, rates")
        if self.level != INF and (int(self.level) != self.level or self.level < 1):
            raise ValueError("level must be a positive integer or inf")
        for h in self._all_functions():
            self._check(h)

    def _all_functions(self):
        if self.g is not None:
            return [self.g]
        if self.g_sequence is not None:
            return list(self.g_sequence)
        return [time_semigroup_function(self.rates[0], self.rates[1], 1.0)]

    def _check(self, h: AdmissibleFunction):
        if self.level == INF:
            if any(f.kind == "geom_up" for f in h.factors):
                raise ValueError("geom_up factors are not admissible at infinite level")
        else:
            h.check_level(self.q, int(self.level))

    @property
    def continuous(self) -> bool:
        return self.rates is not None

    def g_product(self, t_lo: float, t_hi: float) -> AdmissibleFunction:
        """prod_{t_lo <= t < t_hi} g_t (or the semigroup factor for t_hi - t_lo)."""
        if t_hi <= t_lo:
            return AdmissibleFunction(())
        if self.rates is not None:
            return time_semigroup_function(self.rates[0], self.rates[1], t_hi - t_lo)
        if int(t_lo) != t_lo or int(t_hi) != t_hi:
            raise ValueError("discrete-time kernel needs integer times")
        if self.g is not None:
            return self.g.power(int(t_hi - t_lo))
        if t_hi > len(self.g_sequence):
            raise ValueError("time beyond the supplied g_sequence")
        return product(self.g_sequence[int(t_lo) : int(t_hi)])

    def at_level(self, level) -> "KernelSpec":
        return KernelSpec(self.q, level, self.g, self.g_sequence, self.rates)


@dataclass(frozen=True)
class ContourPlan:
    """Contours and node counts for the quadrature routes.

    ``r0`` is the radius of the w-circle; ``c`` the abscissa of the z-line for
    the infinite level; the finite-level z-circle is centred at
    (1 + q^(1-N))/2 with radius (q^(1-N) - 1)/2 + 0.1 (1 - sqrt q).
    ``method`` is "residue" (default) or "quadrature".
    """

    r0: float | None = None
    c: float | None = None
    m_w: int = 64
    m_z: int = 64
    max_nodes: int = 1 << 15
    line_step: float = 0.1
    line_tail_tol: float = 1e-12
    max_height: float = 1e8
    stable_tol: float = 1e-10
    method: str = "residue"

    def radius(self, q: float) -> float:
        return math.sqrt(q) if self.r0 is None else self.r0

    def abscissa(self, q: float) -> float:
        return (self.radius(q) + 1) / 2 if self.c is None else self.c

    def z_circle(self, q: float, n: int) -> tuple[float, float]:
        centre = (1 + q ** (1 - n)) / 2
        rad = (q ** (1 - n) - 1) / 2 + 0.1 * (1 - math.sqrt(q))
        return centre, rad

    def validate(self, ks: "KernelSpec", funcs: Sequence[AdmissibleFunction]) -> None:
        q = ks.q
        r0 = self.radius(q)
        if not 0 < r0 < 1:
            raise ContourError("the w-circle radius must lie in (0, 1)")
        for h in funcs:
            for f in h.factors:
                # the Laurent expansion used everywhere lives on the annulus through 1
                if f.kind == "geom_down" and not r0 > f.param:
                    raise ContourError(f"w-circle radius {r0} must exceed the pole {f.param} of {f.to_string()}")
                if f.kind == "geom_up" and not r0 < 1 / f.param:
                    raise ContourError("w-circle crosses a geom_up pole")
        if ks.level == INF:
            c = self.abscissa(q)
            if not r0 < c < 1:
                raise ContourError("the z-line must pass between the w-circle and 1")
        else:
            centre, rad = self.z_circle(q, int(ks.level))
            if not centre - rad > r0:
                raise ContourError("the z-circle must not meet the w-circle")


# -- exact coefficients in mpmath ----------------------------------------------

def _mp_factor_coeffs(f: ElementaryFactor, lo: int, hi: int) -> list:
    p = mp.mpf(f.param)
    out = []
    for k in range(lo, hi + 1):
        kind = f.kind
        if kind == "monomial_up":
            v = 1 if k == 1 else 0
        elif kind == "monomial_down":
            v = 1 if k == -1 else 0
        elif kind == "bernoulli_up":
            v = 1 if k == 0 else (p if k == 1 else 0)
        elif kind == "bernoulli_down":
            v = 1 if k == 0 else (p if k == -1 else 0)
        else:
            kk = k if kind.endswith("_up") else -k
            if kk < 0:
                v = 0
            elif kind.startswith("poisson"):
                v = mp.power(p, kk) / mp.factorial(kk)
            else:
                v = mp.power(p, kk)
        out.append(mp.mpf(v))
    return out


def _depth(f: ElementaryFactor, scale: int) -> int:
    """Number of negative coefficients kept for a down factor."""
    if f.kind == "monomial_down" or f.kind == "bernoulli_down":
        return 1
    if f.kind == "poisson_down":
        n = 1
        while math.lgamma(n + 1) - n * math.log(f.param) < 60 + f.param:
            n += 1
        return n * scale
    if f.kind == "geom_down":
        return int(math.ceil(60 / -math.log(f.param))) * scale
    return 0


def _mp_convolve(a: list, b: list) -> list:
    out = [mp.mpf(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _mp_coeffs(g: AdmissibleFunction, hi: int, scale: int) -> tuple[int, list]:
    """(lo, [c_lo..c_hi]) for g, negative tails truncated by ``_depth``."""
    down = [f for f in g.factors if not f.is_up]
    depth = sum(_depth(f, scale) for f in down)
    lo, coeffs = 0, [mp.mpf(1)]
    for f in g.factors:
        if f.is_up:
            flo, fhi = (1, 1) if f.kind == "monomial_up" else (0, max(0, hi + depth))
        else:
            d = _depth(f, scale)
            flo, fhi = (-1, -1) if f.kind == "monomial_down" else (-d, 0)
        coeffs = _mp_convolve(coeffs, _mp_factor_coeffs(f, flo, fhi))
        lo += flo
    if hi < lo:
        return lo, []
    coeffs = coeffs[: hi - lo + 1]
    return lo, coeffs + [mp.mpf(0)] * (hi - lo + 1 - len(coeffs))


@lru_cache(maxsize=256)
def _qprod_coeffs(q: float, n: int, jmax: int, dps: int) -> tuple:
    """Coefficients e_0..e_jmax of prod_{l<n} (1 - q^l w) (n may be inf)."""
    with mp.workdps(dps):
        qq = mp.mpf(q)
        out = []
        poch = mp.mpf(1)  # (q;q)_j
        for j in range(jmax + 1):
            if j > 0:
                poch *= 1 - qq**j
            if n == INF:
                e = (-1) ** j * qq ** (j * (j - 1) // 2) / poch
            elif j > n:
                e = mp.mpf(0)
            else:
                # Gaussian binomial [n choose j]_q
                num = mp.mpf(1)
                for k in range(j):
                    num *= (1 - qq ** (n - k)) / (1 - qq ** (k + 1))
                e = (-1) ** j * qq ** (j * (j - 1) // 2) * num
            out.append(e)
        return tuple(out)


def _mp_eval_g(g: AdmissibleFunction, z):
    out = mp.mpf(1)
    for f in g.factors:
        p = mp.mpf(f.param)
        k = f.kind
        if k == "monomial_up":
            v = z
        elif k == "monomial_down":
            v = 1 / z
        elif k == "bernoulli_up":
            v = 1 + p * z
        elif k == "bernoulli_down":
            v = 1 + p / z
        elif k == "poisson_up":
            v = mp.exp(p * z)
        elif k == "poisson_down":
            v = mp.exp(p / z)
        elif k == "geom_up":
            v = 1 / (1 - p * z)
        else:
            v = 1 / (1 - p / z)
        out *= v
    return out


def _residue_factor(q, i: int, n) -> object:
    """q^(-i) / prod_{l != i, l < n} (1 - q^(l-i))."""
    out = q ** (-i)
    for l in range(i):
        out /= 1 - q ** (l - i)
    if n == INF:
        out /= mp.qp(q, q)
    else:
        for l in range(i + 1, int(n)):
            out /= 1 - q ** (l - i)
    return out


def _double_integral_residue(x1: int, x2: int, P: AdmissibleFunction, G: AdmissibleFunction, q: float, n, scale: int) -> float:
    """The double-contour term by the residue series (see module docstring)."""
    has_down = any(not f.is_up for f in P.factors)

    def run(dps: int, want_bound: bool):
        with mp.workdps(dps):
            qq = mp.mpf(q)
            lo, pc = _mp_coeffs(P, x1, scale)
            if not pc:
                return mp.mpf(0), mp.mpf(0)
            jmax = x1 - lo
            if n != INF:
                jmax = min(jmax, int(n))
            e = _qprod_coeffs(q, n, jmax, dps)
            # W_k for k = lo..x1
            W = [mp.mpf(0)] * (x1 - lo + 1)
            Wabs = [mp.mpf(0)] * (x1 - lo + 1)
            for j in range(jmax + 1):
                ej = e[j]
                for k2 in range(len(pc) - j):
                    W[k2 + j] += ej * pc[k2]
                    if want_bound:
                        Wabs[k2 + j] += abs(ej) * abs(pc[k2])
            total = mp.mpf(0)
            bound = mp.mpf(0)
            i = 0
            small_run = 0
            while True:
                if n != INF and i >= n:
                    break
                zi = qq ** (-i)
                pref = _residue_factor(qq, i, n) * _mp_eval_g(G, zi) ** -1 * zi ** (x2 - x1 - 1)
                s = mp.mpf(0)
                sabs = mp.mpf(0)
                zk = zi**lo
                for k in range(len(W)):
                    s += W[k] * zk
                    if want_bound:
                        sabs += Wabs[k] * zk
                    zk *= zi
                term = pref * s
                total += term
                if want_bound:
                    b = abs(pref) * sabs
                    bound = max(bound, b)
                    mag = b
                else:
                    mag = abs(term)
                if n == INF:
                    ref = max(bound, abs(total), mp.mpf(10) ** -300)
                    if i > 2 and mag < ref * mp.mpf(10) ** (-dps - 5):
                        small_run += 1
                        if small_run >= 3:
                            break
                    else:
                        small_run = 0
                    if i > 4000:
                        raise QuadratureError("residue series failed to converge")
                i += 1
            return total, bound

    _, bound = run(30, True)
    digits = max(0, int(mp.log10(bound))) if bound > 0 else 0
    dps = 30 + digits
    val, _ = run(dps, False)
    return float(val)


def _single_integral(x1: int, x2: int, P12: AdmissibleFunction) -> float:
    """[w^(x1-x2)] prod_{t2<=t<t1} g_t, the coefficient on the annulus through 1."""
    k = x1 - x2
    with mp.workdps(30):
        lo, pc = _mp_coeffs(P12, k, 2)
        if k < lo or not pc:
            return 0.0
        return float(pc[k - lo])


def _kernel_residue(p1: SpaceTimePoint, p2: SpaceTimePoint, ks: KernelSpec) -> float:
    P = ks.g_product(0, p1.t) if p1.t > 0 else AdmissibleFunction(())
    G = ks.g_product(0, p2.t) if p2.t > 0 else AdmissibleFunction(())
    n = ks.level
    has_down = any(not f.is_up for f in P.factors)
    val = _double_integral_residue(p1.x, p2.x, P, G, ks.q, n, 1)
    if has_down:
        # widen the negative tails until the value is stable
        for scale in (2, 4, 8):
            new = _double_integral_residue(p1.x, p2.x, P, G, ks.q, n, scale)
            if abs(new - val) < 1e-14 * max(1.0, abs(new)):
                val = new
                break
            val = new
        else:
            raise QuadratureError("negative coefficient tails did not stabilise")
    if p1.t > p2.t:
        val -= _single_integral(p1.x, p2.x, ks.g_product(p2.t, p1.t))
    return val


# -- quadrature route -----------------------------------------------------------

def _w_nodes(r0: float, m: int):
    th = 2 * np.pi * np.arange(m) / m
    return r0 * np.exp(1j * th)


def _inner_w(x1: int, P: AdmissibleFunction, q: float, n, r0: float, m: int, z: np.ndarray) -> np.ndarray:
    """(1/2 pi i) oint W(w) w^(-x1-1) / (w - z) dw by the trapezoid rule, for each z."""
    w = _w_nodes(r0, m)
    W = eval_g(P, w) * (qpochhammer(w, q) if n == INF else qpochhammer(w, q, n=int(n)))
    f = W * w ** (-x1)  # includes the dw = i w dtheta factor
    return (f[None, :] / (w[None, :] - z[:, None])).mean(axis=1)


def _z_weight(z: np.ndarray, q: float, n, G: AdmissibleFunction, x2: int) -> np.ndarray:
    den = qpochhammer(z, q) if n == INF else qpochhammer(z, q, n=int(n))
    return eval_g(G, z) ** -1 / den * z**x2


def _double_integral_circle(x1, x2, P, G, q, n, plan: ContourPlan) -> complex:
    centre, rad = plan.z_circle(q, int(n))
    r0 = plan.radius(q)
    mw, mz = plan.m_w, plan.m_z
    prev = None
    while mw <= plan.max_nodes and mz <= plan.max_nodes:
        phi = 2 * np.pi * np.arange(mz) / mz
        z = centre + rad * np.exp(1j * phi)
        inner = _inner_w(x1, P, q, n, r0, mw, z)
        val = np.mean(_z_weight(z, q, n, G, x2) * inner * (z - centre))
        if not np.isfinite(val):
            raise QuadratureError("nonfinite quadrature value")
        if prev is not None and abs(val - prev) < plan.stable_tol:
            return val
        prev = val
        mw, mz = 2 * mw, 2 * mz
    raise QuadratureError("circle quadrature did not stabilise within the node budget")


def _double_integral_line(x1, x2, P, G, q, plan: ContourPlan) -> complex:
    """z-line Re z = c from +i inf to -i inf, with z = c - i sinh(u).

    The integrand decays only like exp(-(log|z|)^2 / (2 log(1/q))) along the
    line, so the trapezoid runs with equal steps in u rather than in Im z and
    the range of u is extended until the last segment is below the tail tolerance.
    """
    c = plan.abscissa(q)
    r0 = plan.radius(q)

    def segment(u0, u1, h, mw):
        us = np.arange(u0, u1, h) + h / 2
        z = c - 1j * np.sinh(us)
        f = _z_weight(z, q, INF, G, x2) * _inner_w(x1, P, q, INF, r0, mw, z)
        # (1/2 pi i) dz = -(1/2 pi) cosh(u) du
        return -(f * np.cosh(us)).sum() * h / (2 * np.pi)

    def total(h, mw):
        U = 2.0
        val = segment(-U, U, h, mw)
        last = None
        while True:
            seg = segment(U, U + 1, h, mw) + segment(-U - 1, -U, h, mw)
            val += seg
            if abs(seg) < plan.line_tail_tol:
                return val
            if last is not None and abs(seg) >= abs(last) and U > 6:
                raise QuadratureError("the z-line integrand is not decaying")
            last = seg
            U += 1
            if np.sinh(U) > plan.max_height:
                raise QuadratureError("the z-line integrand did not decay before the height cap")

    h, mw = plan.line_step, plan.m_w
    a = total(h, mw)
    while mw <= plan.max_nodes:
        h, mw = h / 2, 2 * mw
        b = total(h, mw)
        if abs(a - b) < plan.stable_tol:
            return b
        a = b
    raise QuadratureError("line quadrature did not stabilise")


def _single_integral_quad(x1, x2, P12: AdmissibleFunction, r0: float, plan: ContourPlan) -> complex:
    m = plan.m_w
    prev = None
    while m <= plan.max_nodes:
        w = _w_nodes(r0, m)
        val = np.mean(eval_g(P12, w) * w ** (-(x1 - x2)))
        if prev is not None and abs(val - prev) < plan.stable_tol:
            return val
        prev, m = val, 2 * m
    raise QuadratureError("single-integral quadrature did not stabilise")


def _kernel_quadrature(p1, p2, ks: KernelSpec, plan: ContourPlan) -> complex:
    P = ks.g_product(0, p1.t)
    G = ks.g_product(0, p2.t)
    if ks.level == INF:
        val = _double_integral_line(p1.x, p2.x, P, G, ks.q, plan)
    else:
        val = _double_integral_circle(p1.x, p2.x, P, G, ks.q, ks.level, plan)
    if p1.t > p2.t:
        val -= _single_integral_quad(p1.x, p2.x, ks.g_product(p2.t, p1.t), plan.radius(ks.q), plan)
    return val


# -- public API -------------------------------------------------------------------

def _kernel(p1: SpaceTimePoint, p2: SpaceTimePoint, ks: KernelSpec, plan: ContourPlan | None) -> complex:
    plan = plan or ContourPlan()
    funcs = [ks.g_product(0, max(p1.t, p2.t))]
    plan.validate(ks, funcs)
    if plan.method == "residue":
        return complex(_kernel_residue(p1, p2, ks))
    if plan.method == "quadrature":
        return complex(_kernel_quadrature(p1, p2, ks, plan))
    raise ValueError(f"unknown method {plan.method!r}")


def kernel_finite_N(p1: SpaceTimePoint, p2: SpaceTimePoint, ks: KernelSpec, plan: ContourPlan | None = None) -> complex:
    if ks.level == INF:
        raise ValueError("kernel_finite_N needs a finite level")
    return _kernel(p1, p2, ks, plan)


def kernel_limit(p1: SpaceTimePoint, p2: SpaceTimePoint, ks: KernelSpec, plan: ContourPlan | None = None) -> complex:
    if ks.level != INF:
        ks = ks.at_level(INF)
    return _kernel(p1, p2, ks, plan)


def kernel_value(p1, p2, ks: KernelSpec, plan: ContourPlan | None = None) -> complex:
    return kernel_limit(p1, p2, ks, plan) if ks.level == INF else kernel_finite_N(p1, p2, ks, plan)


def kernel_matrix(points: Sequence[SpaceTimePoint], ks: KernelSpec, plan: ContourPlan | None = None) -> np.ndarray:
    n = len(points)
    out = np.empty((n, n), dtype=complex)
    for i, a in enumerate(points):
        for j, b in enumerate(points):
            out[i, j] = kernel_value(a, b, ks, plan)
    return out


def correlation_fn(points: Sequence[SpaceTimePoint], ks: KernelSpec, plan: ContourPlan | None = None) -> float:
    """rho_n = det[K(p_i, p_j)] for pairwise distinct space-time points."""
    pts = list(points)
    if len(set(pts)) != len(pts):
        raise ValueError("points must be pairwise distinct")
    d = np.linalg.det(kernel_matrix(pts, ks, plan)) if pts else 1.0
    if abs(d.imag) > 1e-8:
        raise QuadratureError(f"correlation has imaginary residue {d.imag:.3g}")
    v = d.real
    if v < -1e-8 or v > 1 + 1e-8:
        raise QuadratureError(f"correlation {v} outside [0, 1]")
    return min(1.0, max(0.0, v))


def static_kernel(x1: int, x2: int, t0: int, g: AdmissibleFunction, q: float, N: int, plan: ContourPlan | None = None) -> complex:
    """One-time Schur-measure kernel, by circle quadrature with factors prod_l (1 - w/xi_l)/(1 - z/xi_l)."""
    plan = plan or ContourPlan()
    spec = GeometricSpec(q, N)
    xi = spec.xi
    gt = g.power(t0)
    centre, rad = plan.z_circle(q, N)
    r0 = plan.radius(q)
    mw, mz = plan.m_w, plan.m_z
    prev = None
    while mw <= plan.max_nodes:
        w = _w_nodes(r0, mw)
        phi = 2 * np.pi * np.arange(mz) / mz
        z = centre + rad * np.exp(1j * phi)
        fw = eval_g(gt, w) * np.prod(1 - w[:, None] / xi[None, :], axis=1) * w ** (-x1)
        fz = np.prod(1 - z[:, None] / xi[None, :], axis=1) ** -1 / eval_g(gt, z) * z**x2 * (z - centre)
        val = np.mean(fz[:, None] * fw[None, :] / (w[None, :] - z[:, None]))
        if prev is not None and abs(val - prev) < plan.stable_tol:
            return val
        prev, mw, mz = val, 2 * mw, 2 * mz
    raise QuadratureError("static kernel quadrature did not stabilise")


def schur_measure_prob(lam, t0: int, ks: KernelSpec) -> float:
    """Prob(X_N(t0) = lam) from the packed start, via the Schur-measure formula."""
    if ks.level == INF:
        raise ValueError("the Schur measure needs a finite level")
    lam = as_signature(lam)
    n = int(ks.level)
    if len(lam) != n:
        raise ValueError("signature length must equal the level")
    gt = ks.g_product(0, t0)
    return transition_prob(Signature.zero(n), lam, TransitionSpec(gt, GeometricSpec(ks.q, n)))


def density_sum(t, ks: KernelSpec, xs: Sequence[int], plan: ContourPlan | None = None) -> float:
    """sum_x K(x,t;x,t) over ``xs``; equals N when xs covers the support."""
    return float(sum(kernel_value(SpaceTimePoint(x, t), SpaceTimePoint(x, t), ks, plan).real for x in xs))


__all__ = [
    "ContourError",
    "ContourPlan",
    "KernelSpec",
    "QuadratureError",
    "SpaceTimePoint",
    "correlation_fn",
    "density_sum",
    "kernel_finite_N",
    "kernel_limit",
    "kernel_matrix",
    "kernel_value",
    "qpochhammer",
    "schur_measure_prob",
    "static_kernel",
]
