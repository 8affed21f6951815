"""Maximum-likelihood training by Riemannian stochastic gradient descent.

The per-sequence objective is F(u|s) = −2 Re log⟨s|Ψ⟩ = −log μ(s). Its
gradient with respect to the conjugate parameters (the ascent direction
for the real objective) is −conj(E_v / A) per vertex, where A is the
amplitude and E_v = ∂A/∂u_v the vertex environment. Environments come from
one reverse pass: a downward message sweep on trees, a recorded-operation
tape on general DAGs. A step projects the mean descent direction to the
Stiefel tangent space and retracts by the polar factor, so every iterate
is exactly isometric.
"""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass
from functools import reduce
from typing import Callable, Sequence

import numpy as np

from . import graph as graphs
from .errors import IsotnError, ZeroAmplitudeError
from .graph import topological_layers
from .manifold import retract, tangent_project
from .model import SampleMultiset
from .network import SequenceState, TensorNetwork, check_sequence, _basis_vector, _require_model

Gradient = dict[int, np.ndarray]


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float
    steps: int
    batch_size: int = 1
    seed: int = 0
    shuffle: bool = True
    checkpoint_every: int = 0
    isometry_tol: float = 1e-8

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning rate must be positive")
        if self.steps < 0:
            raise ValueError("step count must be nonnegative")
        if self.batch_size < 1:
            raise ValueError("batch size must be >= 1")
        if self.checkpoint_every < 0:
            raise ValueError("checkpoint_every must be nonnegative")


@dataclass(frozen=True)
class LossRecord:
    step: int
    loss: float
    wall_time: float
    max_isometry_violation: float


@dataclass(frozen=True)
class LossTrace:
    records: tuple[LossRecord, ...] = ()

    def to_csv(self) -> str:
        """CSV with the reproducible columns only (wall time is excluded)."""
        lines = ["step,loss,max_isometry_violation"]
        for r in self.records:
            lines.append(f"{r.step},{r.loss!r},{r.max_isometry_violation!r}")
        return "\n".join(lines) + "\n"


def _term_gradient(net: TensorNetwork, s: SequenceState) -> tuple[Gradient, complex]:
    """Environments turned into Wirtinger gradients, plus the amplitude."""
    if graphs.is_tree(net.quiver):
        envs, amp = _environments_tree(net, s)
    else:
        envs, amp = _environments_dag(net, s)
    if amp == 0:
        raise ZeroAmplitudeError(s)
    return {v: -np.conj(e / amp) for v, e in envs.items()}, amp


def gradient(net: TensorNetwork, sequence: Sequence[int]) -> Gradient:
    """∂F/∂(conjugate parameters) per vertex for F(u|s) = −2 Re log⟨s|Ψ⟩.

    Raises ZeroAmplitudeError when the sequence has amplitude zero (the
    objective is singular there).
    """
    _require_model(net)
    sequence = check_sequence(net, sequence)
    return _term_gradient(net, sequence)[0]


def _environments_tree(net: TensorNetwork, s: SequenceState) -> tuple[Gradient, complex]:
    """E_v = (down message on the in edge) ⊗ (up messages on the out edges)."""
    q = net.quiver
    pos = net.out_position()
    layering = topological_layers(q)

    up: dict[int, np.ndarray] = {
        e: _basis_vector(net.edge_dim[e], s[pos[e]]) for e in q.out_edges
    }
    for verts in reversed(layering.layers):
        for v in verts:
            t = net.vertex_tensor[v]
            outs = q.vertex_out_edges(v)
            for k in range(len(outs) - 1, -1, -1):
                t = np.tensordot(t, up[outs[k]], axes=([1 + k], [0]))
            up[q.vertex_in_edges(v)[0]] = t

    root_in = q.in_edges[0]
    amp = complex(up[root_in][0])

    down: dict[int, np.ndarray] = {root_in: np.ones(1, dtype=np.complex128)}
    envs: Gradient = {}
    for verts in layering.layers:
        for v in verts:
            t = net.vertex_tensor[v]
            f = q.vertex_in_edges(v)[0]
            outs = q.vertex_out_edges(v)
            envs[v] = reduce(np.multiply.outer, [down[f]] + [up[e] for e in outs])
            for j, e in enumerate(outs):
                if e in pos:
                    continue
                d = np.tensordot(t, down[f], axes=([0], [0]))
                for k in range(len(outs) - 1, -1, -1):
                    if k != j:
                        d = np.tensordot(d, up[outs[k]], axes=([k], [0]))
                down[e] = d
    return envs, amp


def _environments_dag(net: TensorNetwork, s: SequenceState) -> tuple[Gradient, complex]:
    """Reverse-mode pass through the boundary-state contraction."""
    q = net.quiver
    pos = net.out_position()
    layering = topological_layers(q)

    frontier: list[int] = [q.in_edges[0]]
    t = np.ones(net.edge_dim[q.in_edges[0]], dtype=np.complex128)
    tape: list[tuple] = []
    for verts in layering.layers:
        for v in verts:
            ins = q.vertex_in_edges(v)
            outs = q.vertex_out_edges(v)
            con = [frontier.index(e) for e in ins]
            keep = [ax for ax in range(t.ndim) if ax not in con]
            perm = keep + con
            keep_shape = tuple(t.shape[ax] for ax in keep)
            con_dim = int(np.prod([t.shape[ax] for ax in con], dtype=np.int64))
            u = net.vertex_tensor[v]
            out_shape = u.shape[len(ins):]
            t_mat = t.transpose(perm).reshape(-1, con_dim)
            u_mat = u.reshape(con_dim, -1)
            tape.append(("vertex", v, t_mat, u_mat, perm, t.shape, u.shape))
            t = (t_mat @ u_mat).reshape(keep_shape + out_shape)
            frontier = [e for e in frontier if e not in ins] + list(outs)
            for e in list(outs):
                if e in pos:
                    ax = frontier.index(e)
                    idx = s[pos[e]]
                    tape.append(("fix", ax, idx, t.shape))
                    t = np.take(t, idx, axis=ax)
                    frontier.remove(e)
    amp = complex(t)

    envs: Gradient = {}
    adj = np.ones((), dtype=np.complex128)
    for entry in reversed(tape):
        if entry[0] == "fix":
            _, ax, idx, shape_before = entry
            full = np.zeros(shape_before, dtype=np.complex128)
            sel = [slice(None)] * len(shape_before)
            sel[ax] = idx
            full[tuple(sel)] = adj
            adj = full
        else:
            _, v, t_mat, u_mat, perm, t_shape, u_shape = entry
            adj_mat = adj.reshape(t_mat.shape[0], u_mat.shape[1])
            envs[v] = (t_mat.T @ adj_mat).reshape(u_shape)
            adj_prev = (adj_mat @ u_mat.T).reshape(
                tuple(t_shape[ax] for ax in perm)
            )
            adj = adj_prev.transpose(np.argsort(perm))
    return envs, amp


def mean_gradient(
    net: TensorNetwork, batch: Sequence[tuple[SequenceState, int]]
) -> tuple[Gradient, float]:
    """Multiplicity-weighted mean gradient and mean per-sequence objective."""
    if not batch:
        raise ValueError("batch must be nonempty")
    total = 0
    acc: Gradient = {v: np.zeros(net.vertex_tensor[v].shape, dtype=np.complex128)
                     for v in net.quiver.vertices}
    loss = 0.0
    for s, m in batch:
        g, amp = _term_gradient(net, tuple(s))
        for v in acc:
            acc[v] += m * g[v]
        loss += -2.0 * m * float(np.log(abs(amp)))
        total += m
    return {v: a / total for v, a in acc.items()}, loss / total


def sgd_step(
    net: TensorNetwork, batch: Sequence[tuple[SequenceState, int]], learning_rate: float
) -> TensorNetwork:
    """One descent step: retract along the projected negative mean gradient."""
    g, _ = mean_gradient(net, batch)
    xi = tangent_project(net, {v: -a for v, a in g.items()})
    return retract(net, xi, learning_rate)


def train(
    net: TensorNetwork,
    sample: SampleMultiset,
    cfg: TrainConfig,
    on_checkpoint: Callable[[int, TensorNetwork], None] | None = None,
) -> tuple[TensorNetwork, LossTrace]:
    """Mini-batch descent over the shuffled sample; deterministic under seed.

    Every recorded loss is the multiplicity-weighted mean per-sequence
    objective of that step's batch, evaluated before the update. The data
    order stream is derived from the seed independently of any
    initialization randomness.
    """
    if sample.n != net.n_sites:
        raise ValueError(f"sample length {sample.n} != network sites {net.n_sites}")
    items = sorted(sample.items())
    for s, _ in items:
        check_sequence(net, s)
    expanded: list[SequenceState] = []
    for s, m in items:
        expanded.extend([s] * m)

    shuffle_rng = np.random.Generator(
        np.random.Philox(np.random.SeedSequence(entropy=cfg.seed, spawn_key=(1,)))
    )
    order: list[int] = []
    records: list[LossRecord] = []
    t0 = time.perf_counter()
    current = net
    for step in range(cfg.steps):
        while len(order) < cfg.batch_size:
            epoch = list(range(len(expanded)))
            if cfg.shuffle:
                shuffle_rng.shuffle(epoch)
            order.extend(epoch)
        take, order = order[: cfg.batch_size], order[cfg.batch_size:]
        batch = sorted(Counter(expanded[i] for i in take).items())
        g, batch_loss = mean_gradient(current, batch)
        xi = tangent_project(current, {v: -a for v, a in g.items()})
        current = retract(current, xi, cfg.learning_rate)
        violation = current.max_isometry_violation()
        if violation > cfg.isometry_tol:
            raise IsotnError(
                f"isometry violation {violation:.3e} exceeded tolerance "
                f"{cfg.isometry_tol:g} at step {step}"
            )
        records.append(LossRecord(step, batch_loss, time.perf_counter() - t0, violation))
        if cfg.checkpoint_every and on_checkpoint and (step + 1) % cfg.checkpoint_every == 0:
            on_checkpoint(step + 1, current)
    return current, LossTrace(tuple(records))
