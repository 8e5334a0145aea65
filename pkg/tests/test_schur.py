import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qwalk.gt import Signature
from qwalk.schur import GeometricSpec, principal_specialization, schur_branching_eval, schur_ratio, log_principal_specialization_batch
import numpy as np


def _leibniz(m):
    n = len(m)
    total = Fraction(0)
    for perm in itertools.permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        term = Fraction(sign)
        for i in range(n):
            term *= m[i][perm[i]]
        total += term
    return total


def bialternant(lam, x):
    # s_lam = det[x_i^(lam_j + N - j)] / det[x_i^(N - j)], exact over the rationals
    n = len(lam)
    num = [[Fraction(xi) ** (lam[j] + n - 1 - j) for j in range(n)] for xi in x]
    den = [[Fraction(xi) ** (n - 1 - j) for j in range(n)] for xi in x]
    return _leibniz(num) / _leibniz(den)


def test_examples():
    assert principal_specialization(Signature((0, 0, 0)), 0.5) == 1.0
    assert principal_specialization((1, 0), 0.5) == pytest.approx(3.0, rel=1e-14)
    assert principal_specialization((1, 1), 0.5) == pytest.approx(2.0, rel=1e-14)
    assert principal_specialization((), 0.5) == 1.0
    assert schur_branching_eval((), []) == 1
    assert schur_branching_eval((1, 0), [1, 2]) == 3
    assert schur_ratio((1, 0), (0, 0), 0.5) == pytest.approx(3.0, rel=1e-14)
    assert schur_ratio((1, 1), (1, 0), 0.5) == pytest.approx(2 / 3, rel=1e-14)
    assert schur_ratio((2, 1), (2, 1), GeometricSpec(0.3, 2)) == 1.0


def test_length_mismatch():
    with pytest.raises(ValueError):
        principal_specialization((1, 0), GeometricSpec(0.5, 3))


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_product_form_matches_branching(n):
    q = Fraction(1, 2)
    x = [q ** (-i) for i in range(n)]
    for parts in itertools.combinations_with_replacement(range(5, -4, -1), n):
        if n == 5 and (parts[0] - parts[-1]) > 4:
            continue  # keep the exact recursion cheap
        exact = schur_branching_eval(parts, x)
        assert principal_specialization(parts, 0.5) == pytest.approx(float(exact), rel=1e-10)


@pytest.mark.parametrize("lam", [(2, 0, -1), (3, 3, 1), (1, -2, -2, -3), (4, 2, 1, 0)])
def test_branching_matches_bialternant(lam):
    x = [Fraction(1), Fraction(3), Fraction(5, 2), Fraction(7)][: len(lam)]
    assert schur_branching_eval(lam, x) == bialternant(lam, x)


@given(st.lists(st.integers(-3, 5), min_size=1, max_size=4), st.integers(-3, 3))
def test_shift_identity(parts, c):
    lam = tuple(sorted(parts, reverse=True))
    x = [Fraction(1), Fraction(2), Fraction(3, 2), Fraction(5)][: len(lam)]
    shifted = tuple(p + c for p in lam)
    prod = math.prod(x)
    assert schur_branching_eval(shifted, x) == prod**c * schur_branching_eval(lam, x)


@given(st.lists(st.integers(-3, 5), min_size=2, max_size=5), st.sampled_from([0.2, 0.5, 0.9]))
def test_raising_first_part_positive(parts, q):
    lam = tuple(sorted(parts, reverse=True))
    up = (lam[0] + 1,) + lam[1:]
    r = schur_ratio(up, lam, q)
    assert math.isfinite(r) and r > 0


def test_batch_matches_scalar():
    lams = np.array([[3, 1, 0], [0, 0, -2], [5, 5, 5]])
    ref = [math.log(principal_specialization(tuple(v), 0.4)) for v in lams]
    assert np.allclose(log_principal_specialization_batch(lams, 0.4), ref, rtol=1e-13, atol=1e-13)
