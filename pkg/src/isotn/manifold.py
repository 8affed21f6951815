"""Geometry of the isometric parameter space.

Vertex tensors live on products of Stiefel manifolds. Raw gradients are
projected to the tangent space of the isometry constraint, updates retract
back via the polar factor, and the quotient by the gauge group (unitaries
on internal and In edges) is accounted for numerically: the rank of the
gauge action's differential plus the moduli dimension recovers the total
parameter count.
"""

from __future__ import annotations

from typing import Mapping

import numpy as np

from .errors import UnsupportedTopologyError
from .graph import is_tree
from .network import TensorNetwork
from .tensor_core import as_matrix, from_matrix, project_to_isometry

TangentVector = dict[int, np.ndarray]


def tangent_project(net: TensorNetwork, raw: Mapping[int, np.ndarray]) -> TangentVector:
    """Project per-vertex arrays onto the Stiefel tangent space.

    Per vertex, with U the grouped matrix and G the grouped input:
    ξ = G − U·herm(U†G). The result satisfies U†ξ + ξ†U = 0 and the
    projection is idempotent.
    """
    out: TangentVector = {}
    for v in net.quiver.vertices:
        t = net.vertex_tensor[v]
        g = np.asarray(raw[v], dtype=np.complex128)
        if g.shape != t.shape:
            raise ValueError(f"vertex {v}: direction shape {g.shape} != tensor shape {t.shape}")
        split = net.vertex_split(v)
        u = as_matrix(t, split)
        gm = as_matrix(g, split)
        utg = u.conj().T @ gm
        xi = gm - u @ ((utg + utg.conj().T) / 2.0)
        out[v] = from_matrix(xi, t.shape, split)
    return out


def tangency_violation(net: TensorNetwork, xi: Mapping[int, np.ndarray]) -> float:
    """max over vertices of ‖U†ξ + ξ†U‖_max (0 for an exact tangent)."""
    worst = 0.0
    for v in net.quiver.vertices:
        split = net.vertex_split(v)
        u = as_matrix(net.vertex_tensor[v], split)
        x = as_matrix(np.asarray(xi[v], dtype=np.complex128), split)
        sym = u.conj().T @ x
        worst = max(worst, float(np.max(np.abs(sym + sym.conj().T))))
    return worst


def retract(net: TensorNetwork, xi: Mapping[int, np.ndarray], step: float) -> TensorNetwork:
    """Move every vertex by ``step``·ξ and snap back to the nearest isometry."""
    new_tensors = {}
    for v in net.quiver.vertices:
        t = net.vertex_tensor[v]
        d = np.asarray(xi[v], dtype=np.complex128)
        if d.shape != t.shape:
            raise ValueError(f"vertex {v}: direction shape {d.shape} != tensor shape {t.shape}")
        new_tensors[v] = project_to_isometry(t + step * d, net.vertex_split(v))
    return net.with_tensors(new_tensors)


def moduli_dimension(net: TensorNetwork) -> int:
    """Complex dimension of the parameter space modulo gauge, for trees.

    Sums, over vertices, in_dim·(product of out dims) − in_dim². Only
    meaningful for directed trees with a single In edge; other topologies
    raise UnsupportedTopologyError.
    """
    q = net.quiver
    if len(q.in_edges) != 1 or not is_tree(q):
        raise UnsupportedTopologyError(
            "moduli dimension formula applies to directed trees with one In edge"
        )
    total = 0
    for v in q.vertices:
        d_in = net.edge_dim[q.vertex_in_edges(v)[0]]
        d_out = 1
        for e in q.vertex_out_edges(v):
            d_out *= net.edge_dim[e]
        total += d_in * d_out - d_in * d_in
    return total


def real_stiefel_dim(net: TensorNetwork) -> int:
    """Total real dimension of the product of vertex Stiefel manifolds.

    Each vertex with grouped matrix shape (w, v) contributes 2wv − v².
    """
    total = 0
    for v in net.quiver.vertices:
        split = net.vertex_split(v)
        shape = net.vertex_tensor[v].shape
        d_in = int(np.prod([shape[a] for a in split.in_axes], dtype=np.int64))
        d_out = int(np.prod([shape[a] for a in split.out_axes], dtype=np.int64))
        total += 2 * d_out * d_in - d_in * d_in
    return total


def _antihermitian_basis(d: int):
    """Real basis of the d²-dimensional space of anti-Hermitian d×d matrices."""
    for k in range(d):
        m = np.zeros((d, d), dtype=np.complex128)
        m[k, k] = 1j
        yield m
    for j in range(d):
        for k in range(j + 1, d):
            m = np.zeros((d, d), dtype=np.complex128)
            m[j, k] = 1.0
            m[k, j] = -1.0
            yield m
            m = np.zeros((d, d), dtype=np.complex128)
            m[j, k] = 1j
            m[k, j] = 1j
            yield m


def gauge_transform(net: TensorNetwork, unitaries: Mapping[int, np.ndarray]) -> TensorNetwork:
    """Act by a gauge group element: a unitary per internal or In edge.

    Each vertex tensor is composed with u_e on every outgoing internal edge
    and with u_e^{-1} on every incoming edge; Out edges are untouched. The
    evaluation map, hence every sequence probability, is unchanged.
    """
    q = net.quiver
    gauged = set(q.internal_edges) | set(q.in_edges)
    for e, u in unitaries.items():
        if e not in gauged:
            raise ValueError(f"edge {e} is not an internal or In edge")
        d = net.edge_dim[e]
        if np.asarray(u).shape != (d, d):
            raise ValueError(f"unitary for edge {e} has wrong shape")
    new_tensors = {}
    for v in q.vertices:
        t = net.vertex_tensor[v]
        ins = q.vertex_in_edges(v)
        outs = q.vertex_out_edges(v)
        for ax, e in enumerate(ins):
            if e in unitaries:
                inv = np.asarray(unitaries[e], dtype=np.complex128).conj().T
                t = np.moveaxis(np.tensordot(t, inv, axes=([ax], [0])), -1, ax)
        for k, e in enumerate(outs):
            if e in unitaries:
                u = np.asarray(unitaries[e], dtype=np.complex128)
                ax = len(ins) + k
                t = np.moveaxis(np.tensordot(t, u, axes=([ax], [1])), -1, ax)
        new_tensors[v] = t
    return net.with_tensors(new_tensors)


def gauge_orbit_rank(net: TensorNetwork) -> int:
    """Numerical rank of the gauge action's differential at the current point.

    Columns of the (real) Jacobian are the infinitesimal motions of all
    vertex tensors under one anti-Hermitian generator on one internal or In
    edge; the rank counts singular values above 1e-8 of the largest. For a
    generic tree the action is free, so the rank equals the summed squared
    edge dimensions, and (real parameter dim − rank)/2 recovers the moduli
    dimension.
    """
    q = net.quiver
    gauged = sorted(set(q.internal_edges) | set(q.in_edges))
    rows = sum(2 * net.vertex_tensor[v].size for v in q.vertices)
    cols = sum(net.edge_dim[e] ** 2 for e in gauged)
    if cols == 0:
        return 0
    jac = np.zeros((rows, cols), dtype=np.float64)
    col = 0
    for e in gauged:
        touched = []
        for v in q.vertices:
            ins = q.vertex_in_edges(v)
            outs = q.vertex_out_edges(v)
            if e in ins:
                touched.append((v, "in", ins.index(e)))
            if e in outs:
                touched.append((v, "out", len(ins) + outs.index(e)))
        for gen in _antihermitian_basis(net.edge_dim[e]):
            deltas = {}
            for v, side, ax in touched:
                t = net.vertex_tensor[v]
                if side == "out":
                    d = np.moveaxis(np.tensordot(t, gen, axes=([ax], [1])), -1, ax)
                else:
                    d = -np.moveaxis(np.tensordot(t, gen, axes=([ax], [0])), -1, ax)
                deltas[v] = deltas.get(v, 0) + d
            chunks = []
            for v in q.vertices:
                d = deltas.get(v)
                flat = np.zeros(net.vertex_tensor[v].size, dtype=np.complex128) if d is None else d.ravel()
                chunks.append(flat.real)
                chunks.append(flat.imag)
            jac[:, col] = np.concatenate(chunks)
            col += 1
    sv = np.linalg.svd(jac, compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.sum(sv > 1e-8 * sv[0]))
