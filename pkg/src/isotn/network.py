"""Decorated tensor networks and their contraction.

A :class:`TensorNetwork` is a quiver whose edges carry dimensions and whose
vertices carry isometric tensors. The canonical axis order at a vertex is
its incoming edges sorted by edge id followed by its outgoing edges sorted
by edge id; every contraction and the serialization format rely on this one
convention.

Evaluation is strict layer-by-layer composition of per-layer tensor-product
maps. Sequence amplitudes on directed trees use leaf-to-root message
passing (linear in the vertex count, never materializing the full state);
general DAGs fall back to contracting the running boundary state, which is
adequate at the sizes this package targets.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Mapping, Sequence

import numpy as np

from . import graph as graphs
from .errors import IsometryImpossibleError, ShapeError
from .graph import Layering, Quiver, build_binary_tree, build_chain, build_mera, topological_layers
from .tensor_core import (
    DEFAULT_ISOMETRY_TOL,
    IndexSplit,
    astensor,
    from_matrix,
    is_isometry,
    isometry_violation,
    random_isometry,
)

# A sequence state is one symbol index per Out edge, in canonical
# (sorted-by-edge-id) Out order.
SequenceState = tuple[int, ...]


@dataclass(frozen=True)
class TensorNetwork:
    """Quiver + edge dimensions + isometric vertex tensors."""

    quiver: Quiver
    edge_dim: Mapping[int, int]
    vertex_tensor: Mapping[int, np.ndarray]
    isometry_tol: float = DEFAULT_ISOMETRY_TOL

    def __post_init__(self):
        object.__setattr__(self, "edge_dim", dict(self.edge_dim))
        object.__setattr__(
            self, "vertex_tensor", {v: astensor(t) for v, t in dict(self.vertex_tensor).items()}
        )
        self._check()

    def _check(self):
        q = self.quiver
        all_edges = set(q.internal_edges) | set(q.in_edges) | set(q.out_edges)
        for e in all_edges:
            d = self.edge_dim.get(e)
            if d is None or d < 1:
                raise ShapeError(f"edge {e} has no positive dimension assigned")
        for v in q.vertices:
            t = self.vertex_tensor.get(v)
            if t is None:
                raise ShapeError(f"vertex {v} has no tensor assigned")
            expected = self.vertex_shape(v)
            if t.shape != expected:
                raise ShapeError(
                    f"vertex {v} tensor shape {t.shape} does not match incident "
                    f"edge dims {expected}"
                )
            split = self.vertex_split(v)
            in_dim = int(np.prod([t.shape[a] for a in split.in_axes], dtype=np.int64))
            out_dim = int(np.prod([t.shape[a] for a in split.out_axes], dtype=np.int64))
            if in_dim > out_dim:
                raise IsometryImpossibleError(
                    f"vertex {v}: incoming dimension {in_dim} exceeds outgoing {out_dim}"
                )
            if not is_isometry(t, split, self.isometry_tol):
                raise ValueError(
                    f"vertex {v} tensor is not isometric "
                    f"(violation {isometry_violation(t, split):.3e} > tol {self.isometry_tol:g})"
                )

    def vertex_shape(self, v: int) -> tuple[int, ...]:
        ins = self.quiver.vertex_in_edges(v)
        outs = self.quiver.vertex_out_edges(v)
        return tuple(self.edge_dim[e] for e in ins) + tuple(self.edge_dim[e] for e in outs)

    def vertex_split(self, v: int) -> IndexSplit:
        n_in = len(self.quiver.vertex_in_edges(v))
        n_out = len(self.quiver.vertex_out_edges(v))
        return IndexSplit(tuple(range(n_in)), tuple(range(n_in, n_in + n_out)))

    @property
    def n_sites(self) -> int:
        return len(self.quiver.out_edges)

    @property
    def site_dims(self) -> tuple[int, ...]:
        """Out-edge dimensions in canonical (sequence position) order."""
        return tuple(self.edge_dim[e] for e in self.quiver.out_edges)

    def out_position(self) -> dict[int, int]:
        """Map Out edge id -> sequence position."""
        return {e: p for p, e in enumerate(self.quiver.out_edges)}

    def with_tensors(self, tensors: Mapping[int, np.ndarray]) -> "TensorNetwork":
        """Same quiver and dims with replaced vertex tensors (revalidated)."""
        return TensorNetwork(self.quiver, self.edge_dim, tensors, self.isometry_tol)

    def max_isometry_violation(self) -> float:
        return max(
            isometry_violation(self.vertex_tensor[v], self.vertex_split(v))
            for v in self.quiver.vertices
        )


def check_sequence(net: TensorNetwork, sequence: Sequence[int]) -> SequenceState:
    """Validate symbol indices against the network's site dimensions."""
    dims = net.site_dims
    sequence = tuple(int(x) for x in sequence)
    if len(sequence) != len(dims):
        raise ValueError(f"sequence length {len(sequence)} != number of sites {len(dims)}")
    for pos, (x, d) in enumerate(zip(sequence, dims)):
        if not 0 <= x < d:
            raise ValueError(f"symbol index {x} at position {pos} outside [0,{d})")
    return sequence


def _require_model(net: TensorNetwork) -> int:
    """A statistical model has exactly one In edge of dimension 1."""
    ins = net.quiver.in_edges
    if len(ins) != 1 or net.edge_dim[ins[0]] != 1:
        raise ValueError("network is not a pure-state model (need one In edge of dimension 1)")
    return ins[0]


# ------------------------------------------------------------------
# layer slicing and full evaluation
# ------------------------------------------------------------------

def layer_boundaries(net: TensorNetwork, layering: Layering) -> tuple[tuple[int, ...], ...]:
    """Edge sets (sorted by id) between consecutive layers.

    ``boundaries[0]`` is the In edges; ``boundaries[l+1]`` is the boundary
    after applying layer ``l``; the last one is the Out edges.
    """
    q = net.quiver
    bounds = [tuple(q.in_edges)]
    current = set(q.in_edges)
    for verts in layering.layers:
        consumed = {e for v in verts for e in q.vertex_in_edges(v)}
        missing = consumed - current
        if missing:
            raise ShapeError(f"layering is not causal: edges {sorted(missing)} not yet produced")
        produced = {e for v in verts for e in q.vertex_out_edges(v)}
        current = (current - consumed) | produced
        bounds.append(tuple(sorted(current)))
    if set(bounds[-1]) != set(q.out_edges):
        raise ShapeError("layering does not terminate on the Out edges")
    return tuple(bounds)


def layer_map(net: TensorNetwork, layering: Layering, level: int) -> np.ndarray:
    """Tensor-product map of layer ``l`` extended by identities.

    Returns a tensor whose axes are the outgoing boundary edges (sorted by
    id) followed by the incoming boundary edges (sorted by id); composing
    all layer maps in order reproduces :func:`evaluate`.
    """
    if not 0 <= level < len(layering.layers):
        raise ValueError(f"layer index {level} outside [0,{len(layering.layers)})")
    q = net.quiver
    bounds = layer_boundaries(net, layering)
    b_in, b_out = bounds[level], bounds[level + 1]
    consumed = {e for v in layering.layers[level] for e in q.vertex_in_edges(v)}

    parts: list[np.ndarray] = []
    labels: list[tuple[str, int]] = []
    for v in layering.layers[level]:
        parts.append(net.vertex_tensor[v])
        labels += [("in", e) for e in q.vertex_in_edges(v)]
        labels += [("out", e) for e in q.vertex_out_edges(v)]
    for e in b_in:
        if e not in consumed:
            d = net.edge_dim[e]
            parts.append(np.eye(d, dtype=np.complex128))
            labels += [("in", e), ("out", e)]

    big = reduce(lambda a, b: np.tensordot(a, b, axes=0), parts)
    perm = [labels.index(("out", e)) for e in b_out] + [labels.index(("in", e)) for e in b_in]
    return astensor(big.transpose(perm))


def _layer_matrices(net: TensorNetwork, layering: Layering) -> list[np.ndarray]:
    """Each layer map grouped as a (prod out dims, prod in dims) matrix."""
    bounds = layer_boundaries(net, layering)
    mats = []
    for level in range(len(layering.layers)):
        t = layer_map(net, layering, level)
        d_out = int(np.prod([net.edge_dim[e] for e in bounds[level + 1]], dtype=np.int64))
        d_in = int(np.prod([net.edge_dim[e] for e in bounds[level]], dtype=np.int64))
        mats.append(t.reshape(d_out, d_in))
    return mats


def evaluate(net: TensorNetwork) -> np.ndarray:
    """Full evaluation map of the network.

    Axes are the Out edges in canonical order followed by the In edges;
    for a closed network the result is a scalar. Computed as the ordered
    composition of the layer maps.
    """
    layering = topological_layers(net.quiver)
    bounds = layer_boundaries(net, layering)
    in_dims = [net.edge_dim[e] for e in bounds[0]]
    d_in = int(np.prod(in_dims, dtype=np.int64))
    mat = np.eye(d_in, dtype=np.complex128)
    for m in _layer_matrices(net, layering):
        mat = m @ mat
    out_dims = [net.edge_dim[e] for e in net.quiver.out_edges]
    return astensor(mat.reshape(out_dims + in_dims))


def state(net: TensorNetwork) -> np.ndarray:
    """The normalized state: the evaluation map applied to 1.

    Requires a single In edge of dimension 1; returns a rank-n tensor over
    the Out spaces.
    """
    _require_model(net)
    ev = evaluate(net)
    return astensor(ev[..., 0])


# ------------------------------------------------------------------
# sequence amplitudes
# ------------------------------------------------------------------

def amplitude(net: TensorNetwork, sequence: Sequence[int]) -> complex:
    """The coefficient of basis sequence ``s`` in the network state.

    Tree networks use leaf-to-root message passing; other DAGs contract
    the boundary state layer by layer, fixing each observable leg to its
    symbol as soon as it appears.
    """
    _require_model(net)
    sequence = check_sequence(net, sequence)
    if graphs.is_tree(net.quiver):
        return _amplitude_tree(net, sequence)
    return _amplitude_dag(net, sequence)


def _basis_vector(dim: int, index: int) -> np.ndarray:
    v = np.zeros(dim, dtype=np.complex128)
    v[index] = 1.0
    return v


def _amplitude_tree(net: TensorNetwork, s: SequenceState) -> complex:
    q = net.quiver
    pos = net.out_position()
    layering = topological_layers(q)
    msgs: dict[int, np.ndarray] = {}
    for verts in reversed(layering.layers):
        for v in verts:
            t = net.vertex_tensor[v]
            outs = q.vertex_out_edges(v)
            n_in = len(q.vertex_in_edges(v))
            # contract out axes from the last to keep positions stable
            for k in range(len(outs) - 1, -1, -1):
                e = outs[k]
                vec = _basis_vector(net.edge_dim[e], s[pos[e]]) if e in pos else msgs.pop(e)
                t = np.tensordot(t, vec, axes=([n_in + k], [0]))
            msgs[q.vertex_in_edges(v)[0]] = t
    root_msg = msgs[q.in_edges[0]]
    return complex(root_msg[0])


def _amplitude_dag(net: TensorNetwork, s: SequenceState) -> complex:
    q = net.quiver
    pos = net.out_position()
    layering = topological_layers(q)
    frontier: list[int] = [q.in_edges[0]]
    t = np.ones(net.edge_dim[q.in_edges[0]], dtype=np.complex128)
    for verts in layering.layers:
        for v in verts:
            ins = q.vertex_in_edges(v)
            axes = [frontier.index(e) for e in ins]
            t = np.tensordot(t, net.vertex_tensor[v], axes=(axes, list(range(len(ins)))))
            frontier = [e for e in frontier if e not in ins] + list(q.vertex_out_edges(v))
            for e in list(frontier):
                if e in pos:
                    ax = frontier.index(e)
                    t = np.tensordot(t, _basis_vector(net.edge_dim[e], s[pos[e]]), axes=([ax], [0]))
                    frontier.remove(e)
    return complex(t)


# ------------------------------------------------------------------
# coarse-graining flow of base-layer operators
# ------------------------------------------------------------------

def intermediate_state(net: TensorNetwork, layering: Layering, level: int) -> np.ndarray:
    """State vector on boundary ``l`` (0 = In side, len(layers) = Out side)."""
    _require_model(net)
    if not 0 <= level <= len(layering.layers):
        raise ValueError(f"boundary index {level} outside [0,{len(layering.layers)}]")
    psi = np.ones(1, dtype=np.complex128)
    for m in _layer_matrices(net, layering)[:level]:
        psi = m @ psi
    return astensor(psi)


def operator_flow(net: TensorNetwork, layering: Layering, op: np.ndarray, level: int) -> np.ndarray:
    """Pull a base-layer operator back to boundary ``l``.

    ``op`` is a square matrix on the full Out space. The result is
    c† op c with c the composition of the layer maps from boundary
    ``level`` down to the base, a square matrix on that boundary's space.
    Its expectation in the intermediate state there equals the expectation
    of ``op`` in the full state.
    """
    if not 0 <= level <= len(layering.layers):
        raise ValueError(f"boundary index {level} outside [0,{len(layering.layers)}]")
    op = np.asarray(op, dtype=np.complex128)
    d_base = int(np.prod(net.site_dims, dtype=np.int64))
    if op.shape != (d_base, d_base):
        raise ShapeError(f"operator shape {op.shape} != ({d_base},{d_base})")
    mats = _layer_matrices(net, layering)
    c = None
    for m in mats[level:]:
        c = m if c is None else m @ c
    if c is None:
        return astensor(op)
    return astensor(c.conj().T @ op @ c)


def operator_descend(net: TensorNetwork, layering: Layering, op: np.ndarray, level: int) -> np.ndarray:
    """Push a boundary-``level`` operator down to the base layer: c op c†.

    The inverse direction of :func:`operator_flow` up to the projector onto
    the image of c; expectations in the network state are preserved, since
    the state lies in that image.
    """
    if not 0 <= level <= len(layering.layers):
        raise ValueError(f"boundary index {level} outside [0,{len(layering.layers)}]")
    op = np.asarray(op, dtype=np.complex128)
    bounds = layer_boundaries(net, layering)
    d_level = int(np.prod([net.edge_dim[e] for e in bounds[level]], dtype=np.int64))
    if op.shape != (d_level, d_level):
        raise ShapeError(f"operator shape {op.shape} != ({d_level},{d_level})")
    c = None
    for m in _layer_matrices(net, layering)[level:]:
        c = m if c is None else m @ c
    if c is None:
        return astensor(op)
    return astensor(c @ op @ c.conj().T)


# ------------------------------------------------------------------
# expectations of single-site operator products (doubled network)
# ------------------------------------------------------------------

def site_operator_expectation(net: TensorNetwork, site_ops: Mapping[int, np.ndarray]) -> complex:
    """⟨Ψ| O_{p1} ⊗ O_{p2} ⊗ ... |Ψ⟩ with identities at unlisted positions.

    ``site_ops`` maps sequence positions to square matrices on the local
    space. On trees this runs ket-bra message passing in which any subtree
    containing no operator contributes an exact identity (isometry
    property), so the cost scales with the operator positions' depth, not
    the system size. Other DAGs materialize the state.
    """
    dims = net.site_dims
    ops: dict[int, np.ndarray] = {}
    for p, o in site_ops.items():
        p = int(p)
        if not 0 <= p < len(dims):
            raise ValueError(f"position {p} outside [0,{len(dims)})")
        o = np.asarray(o, dtype=np.complex128)
        if o.shape != (dims[p], dims[p]):
            raise ShapeError(f"operator at position {p} has shape {o.shape}, expected square {dims[p]}")
        ops[p] = o
    _require_model(net)
    if graphs.is_tree(net.quiver):
        return _site_expectation_tree(net, ops)
    return _site_expectation_dense(net, ops)


def _sandwich(t: np.ndarray, n_in: int, out_msgs: list[np.ndarray | None]) -> np.ndarray:
    """Ket-bra message through one vertex: Σ conj(t)[ī,ō] Π M_k[ō_k,o_k] t[i,o].

    A message is None (identity), a matrix, or a rank-3 tensor whose
    trailing axis is an open diagonal index; at most one message may be
    open, and the open axis is carried through to the result.
    """
    b = t
    open_k = None
    for k, m in enumerate(out_msgs):
        if m is None:
            continue
        if m.ndim == 3:
            open_k = k
            continue
        # apply M on out axis k: b'[..., ō_k, ...] = Σ M[ō_k, o_k] b[..., o_k, ...]
        b = np.moveaxis(np.tensordot(b, m, axes=([n_in + k], [1])), -1, n_in + k)
    if open_k is not None:
        b = np.tensordot(b, out_msgs[open_k], axes=([n_in + open_k], [1]))
        b = np.moveaxis(b, -2, n_in + open_k)
    out_axes = list(range(n_in, t.ndim))
    return np.tensordot(t.conj(), b, axes=(out_axes, out_axes))


def _site_expectation_tree(net: TensorNetwork, ops: dict[int, np.ndarray]) -> complex:
    q = net.quiver
    pos = net.out_position()
    layering = topological_layers(q)
    msgs: dict[int, np.ndarray | None] = {}
    for verts in reversed(layering.layers):
        for v in verts:
            outs = q.vertex_out_edges(v)
            out_msgs = [ops.get(pos[e]) if e in pos else msgs.pop(e) for e in outs]
            in_edge = q.vertex_in_edges(v)[0]
            if all(m is None for m in out_msgs):
                msgs[in_edge] = None
            else:
                msgs[in_edge] = _sandwich(net.vertex_tensor[v], 1, out_msgs)
    root = msgs[q.in_edges[0]]
    if root is None:
        return 1.0 + 0.0j
    return complex(root[0, 0])


def _site_expectation_dense(net: TensorNetwork, ops: dict[int, np.ndarray]) -> complex:
    psi = state(net)
    b = psi
    for p, o in ops.items():
        b = np.moveaxis(np.tensordot(b, o, axes=([p], [1])), -1, p)
    return complex(np.vdot(psi, b))


def site_marginal(
    net: TensorNetwork, fixed_ops: Mapping[int, np.ndarray], position: int
) -> np.ndarray:
    """All diagonal values ⟨Ψ| (⊗ fixed ops) ⊗ |a⟩⟨a|_position |Ψ⟩ at once.

    Equivalent to one :func:`site_operator_expectation` call per basis
    projector at ``position``, but computed in a single doubled-network
    pass with an open leg there. Returns a real vector of length
    ``site_dims[position]``.
    """
    dims = net.site_dims
    if not 0 <= position < len(dims):
        raise ValueError(f"position {position} outside [0,{len(dims)})")
    if position in fixed_ops:
        raise ValueError(f"position {position} is both fixed and open")
    _require_model(net)
    ops: dict[int, np.ndarray] = {}
    for p, o in fixed_ops.items():
        p = int(p)
        o = np.asarray(o, dtype=np.complex128)
        if o.shape != (dims[p], dims[p]):
            raise ShapeError(f"operator at position {p} has shape {o.shape}, expected square {dims[p]}")
        ops[p] = o
    w = dims[position]
    if not graphs.is_tree(net.quiver):
        psi = state(net)
        b = psi
        for p, o in ops.items():
            b = np.moveaxis(np.tensordot(b, o, axes=([p], [1])), -1, p)
        other = [ax for ax in range(psi.ndim) if ax != position]
        return np.real(np.sum(psi.conj() * b, axis=tuple(other)))

    open_msg = np.zeros((w, w, w), dtype=np.complex128)
    for a in range(w):
        open_msg[a, a, a] = 1.0
    q = net.quiver
    pos = net.out_position()
    layering = topological_layers(q)
    msgs: dict[int, np.ndarray | None] = {}
    for verts in reversed(layering.layers):
        for v in verts:
            outs = q.vertex_out_edges(v)
            out_msgs = []
            for e in outs:
                if e in pos:
                    p = pos[e]
                    out_msgs.append(open_msg if p == position else ops.get(p))
                else:
                    out_msgs.append(msgs.pop(e))
            in_edge = q.vertex_in_edges(v)[0]
            if all(m is None for m in out_msgs):
                msgs[in_edge] = None
            else:
                msgs[in_edge] = _sandwich(net.vertex_tensor[v], 1, out_msgs)
    root = msgs[q.in_edges[0]]
    return np.real(root[0, 0, :])


# ------------------------------------------------------------------
# random-network builders for the standard topologies
# ------------------------------------------------------------------

def _capped_power(base: int, exponent: int, cap: int) -> int:
    p = 1
    for _ in range(exponent):
        p *= base
        if p >= cap:
            return cap
    return p


def _chain_dims(q: Quiver, n: int, w: int, bond: int | Sequence[int]) -> dict[int, int]:
    dims = {q.in_edges[0]: 1}
    for e in q.out_edges:
        dims[e] = w
    bonds = sorted(q.internal_edges)
    if isinstance(bond, int):
        wanted = [bond] * (n - 1)
    else:
        wanted = [int(b) for b in bond]
        if len(wanted) != n - 1:
            raise ValueError(f"need {n - 1} bond dims for a chain of {n}, got {len(wanted)}")
    for k, e in enumerate(bonds):
        # tail capacity keeps every vertex a valid isometry
        dims[e] = min(wanted[k], _capped_power(w, n - 1 - k, wanted[k]))
    return dims


def _tree_level(vertex: int) -> int:
    return (vertex + 1).bit_length() - 1


def _tree_dims(q: Quiver, n: int, w: int, bond: int | Sequence[int]) -> dict[int, int]:
    depth = n.bit_length() - 1
    dims = {q.in_edges[0]: 1}
    for e in q.out_edges:
        dims[e] = w
    if isinstance(bond, int):
        per_level = None
    else:
        per_level = [int(b) for b in bond]
        if len(per_level) != max(depth - 1, 0):
            raise ValueError(f"need {depth - 1} per-level bond dims, got {len(per_level)}")
    for e in q.internal_edges:
        level = _tree_level(q.target[e])  # 1..depth-1
        leaves_below = n >> level
        cap = bond if per_level is None else per_level[level - 1]
        dims[e] = _capped_power(w, leaves_below, cap)
    return dims


def _mera_dims(q: Quiver, n: int, w: int, bond: int | Sequence[int]) -> dict[int, int]:
    depth = n.bit_length() - 1
    # row of an edge = number of single-input (tree) vertices above it
    row: dict[int, int] = {q.in_edges[0]: 0}
    for verts in topological_layers(q).layers:
        for v in verts:
            ins = q.vertex_in_edges(v)
            r = row[ins[0]]
            r_out = r + 1 if len(ins) == 1 else r
            for e in q.vertex_out_edges(v):
                row[e] = r_out
    if isinstance(bond, int):
        per_row = [_capped_power(w, n >> r, bond) for r in range(depth + 1)]
    else:
        wanted = [int(b) for b in bond]
        if len(wanted) != max(depth - 1, 0):
            raise ValueError(f"need {depth - 1} per-row bond dims, got {len(wanted)}")
        per_row = [1] + wanted + [w]
        per_row = [min(d, _capped_power(w, n >> r, d)) for r, d in enumerate(per_row)]
    dims = {q.in_edges[0]: 1}
    for e in list(q.internal_edges) + list(q.out_edges):
        dims[e] = w if e in q.out_edges else per_row[row[e]]
    return dims


def random_tensors(
    q: Quiver, edge_dim: Mapping[int, int], rng: np.random.Generator
) -> dict[int, np.ndarray]:
    """Independent Haar-random isometric tensors for every vertex."""
    tensors = {}
    for v in q.vertices:
        in_dims = [edge_dim[e] for e in q.vertex_in_edges(v)]
        out_dims = [edge_dim[e] for e in q.vertex_out_edges(v)]
        d_in = int(np.prod(in_dims, dtype=np.int64))
        d_out = int(np.prod(out_dims, dtype=np.int64))
        m = random_isometry(d_in, d_out, rng)
        shape = tuple(in_dims) + tuple(out_dims)
        split = IndexSplit(tuple(range(len(in_dims))), tuple(range(len(in_dims), len(shape))))
        tensors[v] = from_matrix(m, shape, split)
    return tensors


def random_network(
    kind: str,
    n: int,
    phys_dim: int,
    bond: int | Sequence[int],
    rng: np.random.Generator,
    isometry_tol: float = DEFAULT_ISOMETRY_TOL,
) -> TensorNetwork:
    """Haar-random isometric network of the given topology.

    ``kind`` is one of ``chain``, ``tree``, ``mera``. An integer ``bond``
    caps internal dimensions at the natural growth pattern of the
    topology; a sequence pins them explicitly (per bond for chains, per
    level/row for trees and MERAs). Dimensions are clamped wherever a
    larger value would make an isometric vertex impossible.
    """
    if phys_dim < 1:
        raise ValueError(f"symbol dimension must be positive, got {phys_dim}")
    if kind == "chain":
        q = build_chain(n)
        dims = _chain_dims(q, n, phys_dim, bond)
    elif kind == "tree":
        q = build_binary_tree(n)
        dims = _tree_dims(q, n, phys_dim, bond)
    elif kind == "mera":
        q = build_mera(n)
        dims = _mera_dims(q, n, phys_dim, bond)
    else:
        raise ValueError(f"unknown network kind {kind!r}")
    return TensorNetwork(q, dims, random_tensors(q, dims, rng), isometry_tol)
