import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from qwalk.glaurent import AdmissibleFunction, InadmissibleError, time_semigroup_function
from qwalk.gt import ExtendedSignature, Signature, enumerate_interlacing_below
from qwalk.harness import chi_square
from qwalk.schur import GeometricSpec
from qwalk.transitions import (
    AliasTable,
    EnumerationBudgetError,
    TransitionSpec,
    chain_distribution,
    extended_link_prob,
    extended_link_row,
    link_prob,
    sample_chain,
    transition_prob,
    transition_prob_closed,
    transition_row,
    verify_commutation,
)

Q = 0.5


def row_dict(lam, g, n, tol=1e-14):
    return {m.parts: p for m, p in transition_row(Signature(lam), TransitionSpec.make(g, Q, n), tol).entries.items()}


def test_single_particle_bernoulli():
    for beta in (0.3, 1.0, 2.5):
        r = row_dict((4,), f"bernoulli_up:{beta}", 1)
        assert r[(4,)] == pytest.approx(1 / (1 + beta), rel=1e-14)
        assert r[(5,)] == pytest.approx(beta / (1 + beta), rel=1e-14)


def test_two_particle_row():
    ts = TransitionSpec.make("bernoulli_up:1", Q, 2)
    row = transition_row(Signature((0, 0)), ts, 1e-12)
    assert row.captured_mass == pytest.approx(1.0, abs=1e-15)
    r = {m.parts: p for m, p in row.entries.items()}
    assert r == pytest.approx({(0, 0): 1 / 6, (1, 0): 1 / 2, (1, 1): 1 / 3}, rel=1e-13)


def test_identity_g():
    ts = TransitionSpec.make("1", Q, 3)
    assert transition_prob((2, 1, 0), (2, 1, 0), ts) == 1.0
    assert transition_prob((2, 1, 0), (3, 1, 0), ts) == 0.0
    row = transition_row((2, 1, 0), ts)
    assert len(row) == 1 and row.captured_mass == 1.0


def test_poisson_row():
    tol = 1e-12
    row = transition_row(Signature((3,)), TransitionSpec.make("poisson_up:0.1", Q, 1), tol)
    assert row.captured_mass >= 1 - tol
    k = row.mus[:, 0] - 3
    assert k.min() == 0
    # Poisson tail oracle: what lies beyond the window is below tol
    assert stats.poisson.sf(k.max(), 0.1) <= tol < stats.poisson.sf(k.max() - 2, 0.1)
    assert np.allclose(row.probs, stats.poisson.pmf(k, 0.1), rtol=1e-12, atol=1e-18)


def test_closed_form_examples():
    spec = GeometricSpec(Q, 2)
    assert transition_prob_closed((0, 0), (2, 0), "bernoulli_up", 1.0, spec) == 0.0
    p = transition_prob_closed((1, 0), (1, 0), "geom_down", 0.3, spec)
    assert p > 0
    ts = TransitionSpec.make("geom_down:0.3", Q, 2)
    assert transition_prob((1, 0), (1, 0), ts) == pytest.approx(p, rel=1e-12)
    with pytest.raises(ValueError):
        transition_prob_closed((0,), (1,), "poisson_up", 1.0, GeometricSpec(Q, 1))


@given(st.lists(st.integers(-3, 3), min_size=1, max_size=4), st.sampled_from(["geom_up", "bernoulli_up", "geom_down", "bernoulli_down"]),
       st.lists(st.integers(0, 2), min_size=4, max_size=4))
def test_closed_form_equals_determinant(parts, kind, shifts):
    lam = Signature(tuple(sorted(parts, reverse=True)))
    n = len(lam)
    param = {"geom_up": 0.1, "bernoulli_up": 0.8, "geom_down": 0.45, "bernoulli_down": 1.7}[kind]
    sign = 1 if kind.endswith("_up") else -1
    mu = tuple(sorted((p + sign * s for p, s in zip(lam.parts, shifts)), reverse=True))
    spec = GeometricSpec(Q, n)
    det = transition_prob(lam, mu, TransitionSpec(AdmissibleFunction.parse(f"{kind}:{param}"), spec))
    cf = transition_prob_closed(lam, mu, kind, param, spec)
    if cf > 0:
        assert det == pytest.approx(cf, rel=1e-12)
    else:
        assert abs(det) < 1e-12


def test_link_examples():
    assert link_prob((1, 0), (0,), Q) == pytest.approx(2 / 3, rel=1e-14)
    assert link_prob((1, 0), (1,), Q) == pytest.approx(1 / 3, rel=1e-14)
    assert link_prob((2, 2, 2), (2, 2), Q) == pytest.approx(1.0, rel=1e-14)
    with pytest.raises(ValueError):
        link_prob((1, 0), (1, 0), Q)


@given(st.lists(st.integers(-3, 4), min_size=1, max_size=5), st.sampled_from([0.2, 0.5, 0.8]))
def test_link_rows_sum_to_one(parts, q):
    lam = Signature(tuple(sorted(parts, reverse=True)))
    total = sum(link_prob(lam, mu, q) for mu in enumerate_interlacing_below(lam))
    assert total == pytest.approx(1.0, abs=1e-12)


def test_link_two_levels_proportional_to_q_size():
    lam = Signature((3, -1))
    w = {mu: link_prob(lam, mu, Q) / Q ** mu.size for mu in enumerate_interlacing_below(lam)}
    vals = np.array(list(w.values()))
    assert np.allclose(vals, vals[0], rtol=1e-12)


def test_pattern_measure_is_q_gibbs():
    # product of links along a full GT pattern is proportional to q^(|lam^1| + ... + |lam^(N-1)|)
    lam = Signature((2, 1, -1))
    ratios = []
    for mu in enumerate_interlacing_below(lam):
        for nu in enumerate_interlacing_below(mu):
            p = link_prob(lam, mu, Q) * link_prob(mu, nu, Q)
            ratios.append(p / Q ** (mu.size + nu.size))
    assert np.allclose(ratios, ratios[0], rtol=1e-12)


def test_extended_links():
    lam = ExtendedSignature(Signature((1, 0, 0)), 0)
    mu = ExtendedSignature(Signature((0, 0)), 0)
    assert extended_link_prob(lam, mu, Q) == pytest.approx(link_prob((1, 0, 0), (0, 0), Q))
    top = ExtendedSignature(Signature(()), 3)
    assert extended_link_prob(top, ExtendedSignature(Signature(()), 2), Q) == 1.0
    # block mismatch is a zero, not an error
    assert extended_link_prob(ExtendedSignature(Signature((1,)), 2), ExtendedSignature(Signature((1, 0)), 0), Q) == 0.0


@pytest.mark.parametrize("n, k", [(2, 1), (3, 1), (3, 2), (4, 3), (5, 2), (5, 3)])
def test_extended_link_rows(n, k):
    rng = np.random.default_rng(n * 10 + k)
    parts = tuple(sorted(rng.integers(-2, 3, size=k).tolist(), reverse=True))
    row = extended_link_row(ExtendedSignature(Signature(parts), n - k), Q, 1e-12)
    assert sum(row.values()) == pytest.approx(1.0, abs=1e-11)
    assert all(m.k == k and m.length == n - 1 for m in row)


def test_chain_distribution_examples():
    d0 = chain_distribution(0, "bernoulli_up:1", GeometricSpec(Q, 3))
    assert d0 == {Signature((0, 0, 0)): 1.0}
    d1 = chain_distribution(1, "bernoulli_up:1", GeometricSpec(Q, 2))
    assert {k.parts: v for k, v in d1.items()} == pytest.approx({(0, 0): 1 / 6, (1, 0): 1 / 2, (1, 1): 1 / 3})
    d2 = chain_distribution(2, "bernoulli_up:1", GeometricSpec(Q, 1))
    assert {k.parts: v for k, v in d2.items()} == pytest.approx({(0,): 0.25, (1,): 0.5, (2,): 0.25})


def test_commutation_examples():
    assert verify_commutation(Q, 2, AdmissibleFunction(()), [(1, 0, 0)]) == 0.0
    assert verify_commutation(Q, 2, "bernoulli_up:1", [(1, 0, 0)]) <= 1e-10
    assert verify_commutation(Q, 2, "geom_down:0.3", [(1, 0, 0), (2, 0, -1)], tol=1e-10) <= 1e-8
    assert verify_commutation(Q, 1, "geom_up:0.2", [(1, 0)]) <= 1e-10


def test_continuous_time_semigroup():
    spec = GeometricSpec(Q, 2)
    g1, g2 = time_semigroup_function(0.7, 0.4, 0.6), time_semigroup_function(0.7, 0.4, 0.9)
    two = chain_distribution(2, [g1, g2], spec, 1e-13)
    one = chain_distribution(1, time_semigroup_function(0.7, 0.4, 1.5), spec, 1e-13)
    keys = set(two) | set(one)
    assert max(abs(two.get(k, 0) - one.get(k, 0)) for k in keys) <= 1e-8


@given(st.lists(st.integers(-4, 4), min_size=1, max_size=3),
       st.sampled_from(["bernoulli_up:1", "bernoulli_down:0.5", "geom_down:0.3", "poisson_up:0.2",
                        "poisson_down:0.7*bernoulli_up:0.4", "geom_up:0.2"]))
def test_row_stochastic(parts, g):
    lam = Signature(tuple(sorted(parts, reverse=True)))
    tol = 1e-10
    row = transition_row(lam, TransitionSpec.make(g, Q, len(lam)), tol)
    assert 1 - row.captured_mass < tol
    assert np.all(row.probs >= 0)


def test_errors():
    with pytest.raises(InadmissibleError):
        TransitionSpec.make("geom_up:0.3", Q, 3)
    with pytest.raises(EnumerationBudgetError):
        transition_row((0, 0, 0), TransitionSpec.make("poisson_up:3", Q, 3), 1e-12, budget=100)
    with pytest.raises(ValueError):
        transition_prob((0, 0), (0,), TransitionSpec.make("bernoulli_up:1", Q, 2))


def test_sampled_chain_matches_enumeration():
    spec = GeometricSpec(Q, 2)
    ts = TransitionSpec(AdmissibleFunction.parse("bernoulli_up:1*bernoulli_down:0.6"), spec)
    law = chain_distribution(2, ts.g, spec, 1e-13)
    rng = np.random.default_rng(5)
    from qwalk.transitions import RowSampler

    sampler = RowSampler(ts)
    counts = Counter(sample_chain(2, ts, rng, sampler=sampler)[-1] for _ in range(20000))
    support = sorted(law, key=lambda s: -law[s])
    rep = chi_square([counts.get(s, 0) for s in support], [law[s] for s in support], 20000, 0.001)
    assert rep.passed, rep.line()


def test_alias_table_frequencies():
    p = np.array([0.5, 0.2, 0.2, 0.1])
    draws = AliasTable(p).sample(np.random.default_rng(0), 100000)
    freq = np.bincount(draws, minlength=4) / draws.size
    assert np.allclose(freq, p, atol=5 * math.sqrt(0.25 / draws.size))
