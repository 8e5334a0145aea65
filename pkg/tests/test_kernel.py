import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qwalk.glaurent import AdmissibleFunction, time_semigroup_function
from qwalk.gt import Signature, signature_to_config
from qwalk.kernel import (
    ContourError,
    ContourPlan,
    KernelSpec,
    SpaceTimePoint,
    correlation_fn,
    density_sum,
    kernel_finite_N,
    kernel_limit,
    qpochhammer,
    schur_measure_prob,
    static_kernel,
)
from qwalk.schur import GeometricSpec
from qwalk.transitions import TransitionSpec, chain_distribution, transition_prob

Q = 0.5
EULER_HALF = 0.288788095086602421278899721929  # prod_{i>=1} (1 - 2^-i), direct product in mpmath
G1 = AdmissibleFunction.parse("bernoulli_up:1")
P = SpaceTimePoint


def occupied(lam, x):
    return x in signature_to_config(lam).points


def test_qpochhammer():
    assert qpochhammer(0.0, Q) == 1.0
    assert qpochhammer(Q, Q) == pytest.approx(EULER_HALF, rel=1e-14)
    for w in (0.3, -0.7, 0.2 + 0.4j):
        assert qpochhammer(w, Q) == pytest.approx((1 - w) * qpochhammer(w * Q, Q), rel=1e-14)
    assert qpochhammer(0.3, Q, n=3) == pytest.approx((1 - 0.3) * (1 - 0.15) * (1 - 0.075), rel=1e-15)


def test_parse_points():
    assert SpaceTimePoint.parse_list("(0,1),(3,2)") == [P(0, 1), P(3, 2)]


@pytest.mark.parametrize("n", [1, 3])
def test_packed_diagonal_finite(n):
    ks = KernelSpec(Q, n, g=G1)
    for x in range(-3, n + 4):
        v = kernel_finite_N(P(x, 0), P(x, 0), ks).real
        assert v == pytest.approx(1.0 if 0 <= x < n else 0.0, abs=1e-12)


def test_packed_limit():
    ks = KernelSpec(Q, math.inf, g=G1)
    for x in range(-5, 11):
        assert kernel_limit(P(x, 0), P(x, 0), ks).real == pytest.approx(float(x >= 0), abs=1e-12)
    assert correlation_fn([P(0, 0), P(3, 0)], ks) == pytest.approx(1.0, abs=1e-12)


def test_density_sums_to_n():
    ks = KernelSpec(Q, 3, g=AdmissibleFunction.parse("bernoulli_up:1*bernoulli_down:0.5"))
    assert density_sum(2, ks, range(-6, 12)) == pytest.approx(3.0, abs=1e-6)


@pytest.mark.parametrize("gs", ["bernoulli_up:1", "geom_down:0.3", "poisson_up:0.2*bernoulli_down:0.5"])
def test_rho_matches_enumeration(gs):
    g = AdmissibleFunction.parse(gs)
    ks = KernelSpec(Q, 2, g=g)
    for t in (1, 2):
        law = chain_distribution(t, g, GeometricSpec(Q, 2), 1e-14)
        for x in range(-2, 5):
            exact = sum(p for lam, p in law.items() if occupied(lam, x))
            assert correlation_fn([P(x, t)], ks) == pytest.approx(exact, abs=1e-9)
        for x1, x2 in itertools.combinations(range(-1, 4), 2):
            exact = sum(p for lam, p in law.items() if occupied(lam, x1) and occupied(lam, x2))
            assert correlation_fn([P(x1, t), P(x2, t)], ks) == pytest.approx(exact, abs=1e-9)


def test_rho3_matches_enumeration():
    ks = KernelSpec(Q, 3, g=G1)
    law = chain_distribution(2, G1, GeometricSpec(Q, 3), 1e-14)
    for xs in [(0, 1, 2), (0, 2, 3), (1, 2, 4), (-1, 1, 3)]:
        exact = sum(p for lam, p in law.items() if all(occupied(lam, x) for x in xs))
        assert correlation_fn([P(x, 2) for x in xs], ks) == pytest.approx(exact, abs=1e-9)


def test_two_time_matches_path_enumeration():
    ks = KernelSpec(Q, 2, g=G1)
    ts = TransitionSpec(G1, GeometricSpec(Q, 2))
    from qwalk.transitions import transition_row

    for x1, x2 in [(0, 0), (0, 1), (1, 2), (-1, 1), (1, 0)]:
        exact = 0.0
        start = Signature((0, 0))
        if occupied(start, x1):
            row = transition_row(start, ts, 1e-14)
            exact = sum(p for mu, p in row.entries.items() if occupied(mu, x2))
        assert correlation_fn([P(x1, 0), P(x2, 1)], ks) == pytest.approx(exact, abs=1e-9)


def test_continuous_time_diagonal():
    ks = KernelSpec(Q, 2, rates=(0.7, 0.4))
    law = chain_distribution(1, time_semigroup_function(0.7, 0.4, 1.5), GeometricSpec(Q, 2), 1e-14)
    for x in range(-4, 7):
        exact = sum(p for lam, p in law.items() if occupied(lam, x))
        assert kernel_finite_N(P(x, 1.5), P(x, 1.5), ks).real == pytest.approx(exact, abs=1e-10)


def test_equal_time_reduces_to_static_kernel():
    g = AdmissibleFunction.parse("bernoulli_up:1*geom_down:0.3")
    rng = np.random.default_rng(11)
    for _ in range(10):
        n = int(rng.integers(1, 4))
        x1, x2 = (int(v) for v in rng.integers(-2, 5, size=2))
        t = int(rng.integers(1, 3))
        dyn = kernel_finite_N(P(x1, t), P(x2, t), KernelSpec(Q, n, g=g)).real
        assert static_kernel(x1, x2, t, g, Q, n).real == pytest.approx(dyn, abs=1e-10)


def test_contour_independence():
    pairs = [(P(0, 1), P(0, 1)), (P(2, 2), P(1, 1)), (P(1, 1), P(3, 2))]
    lim = KernelSpec(Q, math.inf, g=G1)
    fin = KernelSpec(Q, 4, g=G1)
    for p1, p2 in pairs:
        ref = kernel_limit(p1, p2, lim).real
        ref_n = kernel_finite_N(p1, p2, fin).real
        for r0 in (0.3, 0.5, 0.7):
            plan = ContourPlan(r0=r0, method="quadrature")
            assert kernel_finite_N(p1, p2, fin, plan).real == pytest.approx(ref_n, abs=1e-9)
            for c in (0.85, 0.9):
                plan = ContourPlan(r0=r0, c=c, method="quadrature")
                assert kernel_limit(p1, p2, lim, plan).real == pytest.approx(ref, abs=1e-9)


def test_convergence_in_n():
    lim = KernelSpec(Q, math.inf, g=G1)
    p1, p2 = P(3, 2), P(1, 1)
    ref = kernel_limit(p1, p2, lim).real
    errs = [abs(kernel_finite_N(p1, p2, KernelSpec(Q, n, g=G1)).real - ref) for n in (5, 10, 20)]
    assert errs[0] > errs[1] > errs[2]


def test_schur_measure():
    ks = KernelSpec(Q, 2, g=G1)
    assert schur_measure_prob((0, 0), 0, ks) == 1.0
    assert schur_measure_prob((1, 0), 0, ks) == 0.0
    ts = TransitionSpec(G1, GeometricSpec(Q, 2))
    assert schur_measure_prob((1, 0), 1, ks) == pytest.approx(transition_prob((0, 0), (1, 0), ts), rel=1e-14)
    law = chain_distribution(2, G1, GeometricSpec(Q, 2), 1e-15)
    for lam, p in law.items():
        assert schur_measure_prob(lam, 2, ks) == pytest.approx(p, abs=1e-12)


def test_contour_errors():
    g = AdmissibleFunction.parse("geom_down:0.8")
    ks = KernelSpec(Q, 2, g=g)
    with pytest.raises(ContourError):
        kernel_finite_N(P(0, 1), P(0, 1), ks)
    assert 0 <= kernel_finite_N(P(0, 1), P(0, 1), ks, ContourPlan(r0=0.9)).real <= 1
    with pytest.raises(ContourError):
        kernel_limit(P(0, 1), P(0, 1), KernelSpec(Q, math.inf, g=G1), ContourPlan(r0=0.6, c=0.5, method="quadrature"))
    with pytest.raises(ValueError):
        KernelSpec(Q, math.inf, g=AdmissibleFunction.parse("geom_up:0.2"))
    with pytest.raises(ValueError):
        correlation_fn([P(0, 1), P(0, 1)], KernelSpec(Q, 2, g=G1))


@given(st.lists(st.tuples(st.integers(-2, 6), st.integers(0, 2)), min_size=1, max_size=3, unique=True))
def test_correlations_in_unit_interval(pts):
    v = correlation_fn([P(x, t) for x, t in pts], KernelSpec(Q, math.inf, g=G1))
    assert 0.0 <= v <= 1.0
