import math

import numpy as np
import pytest

from isotn.errors import ZeroAmplitudeError
from isotn.manifold import gauge_transform, retract, tangent_project
from isotn.model import SampleMultiset, log_likelihood
from isotn.network import TensorNetwork, amplitude, random_network
from isotn.tensor_core import random_isometry
from isotn.training import LossTrace, TrainConfig, gradient, mean_gradient, sgd_step, train

from conftest import deterministic_chain_net, philox, single_vertex_net


def objective(net, s):
    return -2.0 * math.log(abs(amplitude(net, s)))


def directional_derivative(net, s, xi, h=1e-5):
    """Central finite difference of F along a tangent direction, via retraction."""
    return (objective(retract(net, xi, h), s) - objective(retract(net, xi, -h), s)) / (2 * h)


def random_tangent(net, rng):
    raw = {v: rng.standard_normal(t.shape) + 1j * rng.standard_normal(t.shape)
           for v, t in net.vertex_tensor.items()}
    return tangent_project(net, raw)


class TestGradient:
    def test_minimum_has_vanishing_tangent_gradient(self):
        net = deterministic_chain_net((0, 1, 0), 2)
        g = gradient(net, (0, 1, 0))
        xi = tangent_project(net, g)
        assert max(np.max(np.abs(xi[v])) for v in xi) < 1e-8

    def test_one_parameter_family_analytic(self):
        # U(θ) = (cos θ, sin θ): F(θ) = −2 log cos θ, dF/dθ = 2 tan θ
        theta = 0.3
        net = single_vertex_net([np.cos(theta), np.sin(theta)])
        g = gradient(net, (0,))
        dU = np.array([[-np.sin(theta), np.cos(theta)]])
        analytic = 2.0 * np.tan(theta)
        derived = 2.0 * np.real(np.vdot(dU, g[0]))
        assert abs(derived - analytic) < 1e-6
        fd = (objective(single_vertex_net([np.cos(theta + 1e-6), np.sin(theta + 1e-6)]), (0,))
              - objective(single_vertex_net([np.cos(theta - 1e-6), np.sin(theta - 1e-6)]), (0,))) / 2e-6
        assert abs(derived - fd) < 1e-6

    @pytest.mark.parametrize("kind,n", [("chain", 6), ("tree", 8), ("mera", 4), ("mera", 8)])
    def test_matches_finite_differences(self, kind, n):
        gen = philox(42)
        net = random_network(kind, n, 2, 3, gen)
        s = tuple(gen.integers(0, 2, n))
        assert abs(amplitude(net, s)) > 1e-3  # seed chosen to keep F well-conditioned
        g = gradient(net, s)
        for _ in range(20):
            xi = random_tangent(net, gen)
            analytic = 2.0 * sum(np.real(np.vdot(xi[v], g[v])) for v in g)
            fd = directional_derivative(net, s, xi)
            assert abs(analytic - fd) <= 1e-5 * max(abs(fd), 1e-3)

    def test_ambient_directional_derivative(self):
        # unconstrained probe: dF along any ambient direction equals 2 Re⟨δ, G⟩
        gen = philox(5)
        net = random_network("tree", 4, 2, 2, gen)
        loose = TensorNetwork(net.quiver, net.edge_dim, net.vertex_tensor, math.inf)
        s = (0, 1, 1, 0)
        g = gradient(loose, s)
        h = 1e-6
        for _ in range(5):
            delta = {v: gen.standard_normal(t.shape) + 1j * gen.standard_normal(t.shape)
                     for v, t in loose.vertex_tensor.items()}
            plus = loose.with_tensors({v: loose.vertex_tensor[v] + h * delta[v] for v in delta})
            minus = loose.with_tensors({v: loose.vertex_tensor[v] - h * delta[v] for v in delta})
            fd = (objective(plus, s) - objective(minus, s)) / (2 * h)
            analytic = 2.0 * sum(np.real(np.vdot(delta[v], g[v])) for v in g)
            assert abs(analytic - fd) < 1e-5 * max(abs(fd), 1.0)

    def test_zero_amplitude_raises(self):
        net = deterministic_chain_net((0, 0), 2)
        with pytest.raises(ZeroAmplitudeError) as err:
            gradient(net, (1, 1))
        assert err.value.sequence == (1, 1)


class TestSgdStep:
    def test_zero_learning_rate_keeps_parameters(self, rng):
        net = random_network("tree", 4, 2, 2, rng)
        out = sgd_step(net, [((0, 0, 1, 1), 1)], 0.0)
        for v in net.quiver.vertices:
            np.testing.assert_allclose(out.vertex_tensor[v], net.vertex_tensor[v], atol=1e-12)

    def test_single_step_decreases_objective(self):
        gen = philox(2)
        net = single_vertex_net(random_isometry(1, 2, gen).ravel())
        s = (0,)
        before = objective(net, s)
        after = objective(sgd_step(net, [(s, 1)], 1e-2), s)
        assert after < before

    def test_preserves_isometry(self, rng):
        net = random_network("mera", 4, 2, 2, rng)
        batch = [((0, 1, 0, 1), 2), ((1, 1, 0, 0), 1)]
        out = sgd_step(net, batch, 0.1)
        assert out.max_isometry_violation() < 1e-10

    def test_descent_property_full_batch(self):
        # with a small fixed step the full-batch objective never increases
        gen = philox(9)
        net = single_vertex_net(random_isometry(1, 3, gen).ravel())
        batch = [((0,), 3), ((1,), 1)]
        losses = []
        for _ in range(50):
            losses.append(mean_gradient(net, batch)[1])
            net = sgd_step(net, batch, 0.05)
        assert all(b <= a + 1e-12 for a, b in zip(losses, losses[1:]))


class TestTrain:
    def _sample(self):
        return SampleMultiset(4, {(0, 0, 0, 0): 4, (1, 1, 1, 1): 2, (0, 1, 0, 1): 2})

    def test_zero_steps_returns_input(self, rng):
        net = random_network("tree", 4, 2, 2, rng)
        out, trace = train(net, self._sample(), TrainConfig(learning_rate=0.1, steps=0))
        assert out is net
        assert trace == LossTrace(())

    def test_deterministic_trace(self, rng):
        net = random_network("tree", 4, 2, 2, rng)
        cfg = TrainConfig(learning_rate=0.05, steps=40, batch_size=3, seed=11)
        _, trace_a = train(net, self._sample(), cfg)
        _, trace_b = train(net, self._sample(), cfg)
        assert trace_a.to_csv() == trace_b.to_csv()
        for ra, rb in zip(trace_a.records, trace_b.records):
            assert (ra.step, ra.loss, ra.max_isometry_violation) == (
                rb.step, rb.loss, rb.max_isometry_violation)

    def test_objective_improves(self, rng):
        net = random_network("tree", 4, 2, 2, rng)
        sample = self._sample()
        out, _ = train(net, sample, TrainConfig(learning_rate=0.05, steps=150, batch_size=8, seed=0))
        assert log_likelihood(out, sample) < log_likelihood(net, sample)

    def test_isometry_maintained_throughout(self, rng):
        net = random_network("tree", 4, 2, 2, rng)
        _, trace = train(net, self._sample(), TrainConfig(learning_rate=0.1, steps=30, batch_size=4))
        assert all(r.max_isometry_violation <= 1e-8 for r in trace.records)

    def test_shape_mismatch_rejected_before_stepping(self, rng):
        net = random_network("tree", 8, 2, 2, rng)
        with pytest.raises(ValueError):
            train(net, self._sample(), TrainConfig(learning_rate=0.1, steps=5))

    def test_checkpoint_callback_invoked(self, rng):
        net = random_network("tree", 4, 2, 2, rng)
        seen = []
        train(net, self._sample(), TrainConfig(learning_rate=0.1, steps=10, checkpoint_every=4),
              on_checkpoint=lambda step, snap: seen.append(step))
        assert seen == [4, 8]


def test_objective_gauge_invariant(rng):
    net = random_network("tree", 4, 2, 2, rng)
    sample = SampleMultiset(4, {(0, 0, 1, 1): 2, (1, 0, 1, 0): 1})
    gen = philox(7)
    unitaries = {e: random_isometry(net.edge_dim[e], net.edge_dim[e], gen)
                 for e in list(net.quiver.internal_edges) + list(net.quiver.in_edges)}
    gauged = gauge_transform(net, unitaries)
    assert abs(log_likelihood(net, sample) - log_likelihood(gauged, sample)) < 1e-10


def test_train_config_validation():
    with pytest.raises(ValueError):
        TrainConfig(learning_rate=0.0, steps=1)
    with pytest.raises(ValueError):
        TrainConfig(learning_rate=0.1, steps=1, batch_size=0)
