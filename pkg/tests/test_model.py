import math

import numpy as np
import pytest

from isotn.manifold import gauge_transform
from isotn.model import (
    SampleMultiset,
    SymbolSet,
    all_sequences,
    born_probability,
    empirical_distribution,
    entropy,
    kl_divergence,
    log_likelihood,
)
from isotn.network import random_network
from isotn.tensor_core import random_isometry

from conftest import deterministic_chain_net, enumerate_sequences, philox, single_vertex_net


def test_symbol_set_rejects_duplicates():
    with pytest.raises(ValueError):
        SymbolSet(("a", "a"))
    with pytest.raises(ValueError):
        SymbolSet(())


def test_sample_multiset_validation():
    with pytest.raises(ValueError):
        SampleMultiset(2, {(0, 1, 0): 1})
    with pytest.raises(ValueError):
        SampleMultiset(2, {(0, 1): 0})
    s = SampleMultiset(2, {(0, 0): 3, (1, 1): 1})
    assert s.cardinality == 4


class TestBornProbability:
    def test_uniform_single_vertex(self):
        net = single_vertex_net([1 / np.sqrt(2), 1 / np.sqrt(2)])
        assert abs(born_probability(net, (0,)) - 0.5) < 1e-12
        assert abs(born_probability(net, (1,)) - 0.5) < 1e-12

    def test_deterministic(self):
        net = deterministic_chain_net((1, 0), 2)
        assert abs(born_probability(net, (1, 0)) - 1.0) < 1e-12
        assert born_probability(net, (0, 0)) == 0.0

    def test_normalization_random_tree(self, rng):
        net = random_network("tree", 4, 2, 2, rng)
        # n=4 keeps the test fast; the acceptance suite covers larger sizes
        total = sum(born_probability(net, s) for s in enumerate_sequences(net.site_dims))
        assert abs(total - 1.0) < 1e-10


class TestEmpiricalDistribution:
    def test_frequencies(self):
        dist = empirical_distribution(SampleMultiset(2, {(0, 0): 3, (1, 1): 1}))
        assert dist == {(0, 0): 0.75, (1, 1): 0.25}

    def test_single_entry(self):
        dist = empirical_distribution(SampleMultiset(1, {(0,): 5}))
        assert dist == {(0,): 1.0}

    def test_uniform_multiset(self):
        entries = {s: 2 for s in enumerate_sequences((2, 2))}
        dist = empirical_distribution(SampleMultiset(2, entries))
        assert all(abs(p - 0.25) < 1e-15 for p in dist.values())


class TestLogLikelihood:
    def test_deterministic_net_zero_objective(self):
        net = deterministic_chain_net((0, 1), 2)
        sample = SampleMultiset(2, {(0, 1): 7})
        assert log_likelihood(net, sample) == 0.0

    def test_uniform_net_log_two(self):
        net = single_vertex_net([1 / np.sqrt(2), 1 / np.sqrt(2)])
        sample = SampleMultiset(1, {(0,): 1})
        assert abs(log_likelihood(net, sample) - math.log(2)) < 1e-12

    def test_equals_negative_log_born_sum(self, rng):
        net = random_network("tree", 4, 2, 2, rng)
        entries = {(0, 0, 1, 1): 3, (1, 0, 1, 0): 2, (0, 1, 0, 1): 1}
        sample = SampleMultiset(4, entries)
        expected = -sum(m * math.log(born_probability(net, s)) for s, m in entries.items())
        assert abs(log_likelihood(net, sample) - expected) < 1e-10

    def test_zero_amplitude_reports_infinite_objective(self):
        net = deterministic_chain_net((0, 0), 2)
        sample = SampleMultiset(2, {(1, 1): 1})
        with pytest.warns(RuntimeWarning, match=r"\(1, 1\)"):
            assert log_likelihood(net, sample) == math.inf


class TestKLDivergence:
    def test_equal_distributions(self):
        p = {s: 0.25 for s in enumerate_sequences((2, 2))}
        assert kl_divergence(p, dict(p)) == 0.0

    def test_point_mass_vs_uniform(self):
        p = {(0,): 1.0, (1,): 0.0}
        q = {(0,): 0.5, (1,): 0.5}
        assert abs(kl_divergence(p, q) - math.log(2)) < 1e-12

    def test_disjoint_support_is_infinite(self):
        assert kl_divergence({(0,): 1.0}, {(1,): 1.0}) == math.inf

    def test_kl_is_cross_entropy_minus_entropy(self, rng):
        # D(emp || model) == F/|S| - H(emp), the identity tying the two objectives
        net = random_network("tree", 4, 2, 2, rng)
        entries = {(0, 0, 0, 0): 4, (1, 1, 0, 0): 3, (0, 1, 1, 0): 2}
        sample = SampleMultiset(4, entries)
        emp = empirical_distribution(sample)
        mu = {s: born_probability(net, s) for s in emp}
        lhs = kl_divergence(emp, mu)
        rhs = log_likelihood(net, sample) / sample.cardinality - entropy(emp)
        assert abs(lhs - rhs) < 1e-10


def test_gauge_invariance_of_born_probabilities(rng):
    net = random_network("tree", 8, 2, 3, rng)
    unitaries = {}
    gen = philox(99)
    for e in list(net.quiver.internal_edges) + list(net.quiver.in_edges):
        d = net.edge_dim[e]
        unitaries[e] = random_isometry(d, d, gen)
    gauged = gauge_transform(net, unitaries)
    for s in [tuple(gen.integers(0, 2, 8)) for _ in range(20)]:
        assert abs(born_probability(net, s) - born_probability(gauged, s)) < 1e-10


def test_all_sequences_row_major(rng):
    net = random_network("chain", 3, 2, 2, rng)
    seqs = all_sequences(net)
    assert seqs[0] == (0, 0, 0)
    assert seqs[1] == (0, 0, 1)
    assert len(seqs) == 8
