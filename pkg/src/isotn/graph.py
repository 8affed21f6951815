"""Directed acyclic multigraphs with boundary and the standard topologies.

A :class:`Quiver` has internal edges plus distinguished In and Out boundary
edges; all edge ids share one namespace. Constructors assign dense integer
vertex and edge ids deterministically: the In edge gets id 0, internal edges
follow in construction order, and Out edges get the highest ids in
left-to-right observable order (so sorting Out edges by id yields sequence
position order).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import CycleError


@dataclass(frozen=True)
class Quiver:
    """Directed multigraph with boundary.

    ``source`` is total on internal and Out edges, ``target`` on internal
    and In edges. Acyclicity of the internal-edge graph is not checked at
    construction; it is established by :func:`topological_layers`.
    """

    vertices: tuple[int, ...]
    internal_edges: tuple[int, ...]
    in_edges: tuple[int, ...]
    out_edges: tuple[int, ...]
    source: Mapping[int, int]
    target: Mapping[int, int]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(sorted(self.vertices)))
        object.__setattr__(self, "internal_edges", tuple(sorted(self.internal_edges)))
        object.__setattr__(self, "in_edges", tuple(sorted(self.in_edges)))
        object.__setattr__(self, "out_edges", tuple(sorted(self.out_edges)))
        object.__setattr__(self, "source", dict(self.source))
        object.__setattr__(self, "target", dict(self.target))
        self._check()

    def _check(self):
        internal = set(self.internal_edges)
        ins = set(self.in_edges)
        outs = set(self.out_edges)
        if (internal & ins) or (internal & outs) or (ins & outs):
            raise ValueError("internal, In and Out edge id sets must be disjoint")
        vs = set(self.vertices)
        for e in self.internal_edges + self.out_edges:
            if e not in self.source or self.source[e] not in vs:
                raise ValueError(f"edge {e} lacks a valid source vertex")
        for e in self.internal_edges + self.in_edges:
            if e not in self.target or self.target[e] not in vs:
                raise ValueError(f"edge {e} lacks a valid target vertex")
        incident = set(self.source.values()) | set(self.target.values())
        if vs - incident:
            raise ValueError(f"vertices {sorted(vs - incident)} have no incident edge")
        in_by_v: dict[int, list[int]] = {v: [] for v in self.vertices}
        out_by_v: dict[int, list[int]] = {v: [] for v in self.vertices}
        for e in sorted(self.target):
            in_by_v[self.target[e]].append(e)
        for e in sorted(self.source):
            out_by_v[self.source[e]].append(e)
        object.__setattr__(self, "_in_by_v", {v: tuple(es) for v, es in in_by_v.items()})
        object.__setattr__(self, "_out_by_v", {v: tuple(es) for v, es in out_by_v.items()})

    def vertex_in_edges(self, v: int) -> tuple[int, ...]:
        """Edges (internal or In) targeting ``v``, sorted by edge id."""
        return self._in_by_v[v]

    def vertex_out_edges(self, v: int) -> tuple[int, ...]:
        """Edges (internal or Out) sourced at ``v``, sorted by edge id."""
        return self._out_by_v[v]


@dataclass(frozen=True)
class Layering:
    """Ordered partition of vertices: source side (fed by In) first."""

    layers: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(tuple(l) for l in self.layers))

    def __len__(self) -> int:
        return len(self.layers)


def topological_layers(q: Quiver) -> Layering:
    """Slice a quiver into layers by longest path from the In side.

    Vertices with no incoming internal edge form the first layer; every
    internal edge then points from an earlier layer to a strictly later
    one. Ordering within a layer is by vertex id, so the result is
    deterministic. Raises CycleError (listing one offending edge sequence)
    if the internal edges contain a directed cycle.
    """
    preds: dict[int, list[int]] = {v: [] for v in q.vertices}
    succs: dict[int, list[int]] = {v: [] for v in q.vertices}
    for e in q.internal_edges:
        preds[q.target[e]].append(q.source[e])
        succs[q.source[e]].append(q.target[e])

    depth: dict[int, int] = {}
    indegree = {v: len(preds[v]) for v in q.vertices}
    frontier = [v for v in q.vertices if indegree[v] == 0]
    order = 0
    while frontier:
        nxt = []
        for v in frontier:
            depth[v] = max((depth[p] + 1 for p in preds[v] if p in depth), default=0)
            order += 1
            for s in succs[v]:
                indegree[s] -= 1
                if indegree[s] == 0:
                    nxt.append(s)
        frontier = sorted(nxt)
    if order < len(q.vertices):
        cycle = _find_cycle(q, set(depth))
        raise CycleError(f"internal edges contain a directed cycle: {cycle}", cycle)

    n_layers = max(depth.values()) + 1 if depth else 0
    layers = [[] for _ in range(n_layers)]
    for v in sorted(q.vertices):
        layers[depth[v]].append(v)
    return Layering(tuple(tuple(l) for l in layers))


def _find_cycle(q: Quiver, resolved: set[int]) -> tuple[int, ...]:
    """Walk unresolved vertices along internal edges until one repeats."""
    out_by_vertex: dict[int, list[int]] = {v: [] for v in q.vertices}
    for e in sorted(q.internal_edges):
        out_by_vertex[q.source[e]].append(e)
    start = next(v for v in q.vertices if v not in resolved)
    seen: dict[int, int] = {}
    path: list[int] = []
    v = start
    while v not in seen:
        seen[v] = len(path)
        e = next(e for e in out_by_vertex[v] if q.target[e] not in resolved)
        path.append(e)
        v = q.target[e]
    return tuple(path[seen[v]:])


def build_chain(n: int) -> Quiver:
    """Directed line of ``n`` vertices, each emitting one observable edge.

    The single In edge attaches at vertex 0 and the bond flows toward the
    last vertex, which emits only its observable.
    """
    if n < 1:
        raise ValueError(f"chain length must be positive, got {n}")
    vertices = tuple(range(n))
    source: dict[int, int] = {}
    target: dict[int, int] = {0: 0}
    internal = []
    for k in range(n - 1):
        e = 1 + k
        internal.append(e)
        source[e] = k
        target[e] = k + 1
    out_base = n
    outs = []
    for k in range(n):
        e = out_base + k
        outs.append(e)
        source[e] = k
    return Quiver(vertices, tuple(internal), (0,), tuple(outs), source, target)


def _require_power_of_two(n: int, minimum: int) -> int:
    if n < minimum or (n & (n - 1)) != 0:
        raise ValueError(f"n must be a power of two >= {minimum}, got {n}")
    return n.bit_length() - 1


def build_binary_tree(n: int) -> Quiver:
    """Perfect binary tree with ``n`` leaves (Out edges) and one In edge.

    Vertices are numbered in breadth-first order from the root; there are
    n-1 of them and n-2 internal edges.
    """
    depth = _require_power_of_two(n, 2)
    vertices = tuple(range(n - 1))
    source: dict[int, int] = {}
    target: dict[int, int] = {0: 0}
    internal = []
    counter = 1
    # children of vertex v at BFS index v are 2v+1 and 2v+2
    n_nonleaf = (n - 1) - n // 2
    for v in range(n_nonleaf):
        for child in (2 * v + 1, 2 * v + 2):
            internal.append(counter)
            source[counter] = v
            target[counter] = child
            counter += 1
    outs = []
    for j in range(n // 2):
        leaf = n_nonleaf + j
        for _ in range(2):
            outs.append(counter)
            source[counter] = leaf
            counter += 1
    q = Quiver(vertices, tuple(internal), (0,), tuple(outs), source, target)
    assert len(q.internal_edges) == n - 2
    return q


def build_mera(n: int) -> Quiver:
    """Binary tree interlaced with two-in two-out disentangler vertices.

    After each tree layer of width >= 4, a disentangler straddles the
    boundary between every adjacent pair of sibling blocks, i.e. it acts on
    wire pair (4j+1, 4j+2) of that row; no disentangler wraps around the
    open boundary. For n = 2 there is no room for disentanglers and the
    result equals ``build_binary_tree(2)``.
    """
    depth = _require_power_of_two(n, 2)

    class _Wire:
        __slots__ = ("src", "edge")

        def __init__(self, src: int):
            self.src = src
            self.edge: int | None = None

    next_vertex = 0
    next_edge = 1  # 0 is the In edge
    source: dict[int, int] = {}
    target: dict[int, int] = {0: 0}
    internal: list[int] = []

    def new_vertex(inputs: Iterable[_Wire]) -> int:
        nonlocal next_vertex, next_edge
        v = next_vertex
        next_vertex += 1
        for w in inputs:
            w.edge = next_edge
            internal.append(next_edge)
            source[next_edge] = w.src
            target[next_edge] = v
            next_edge += 1
        return v

    root = new_vertex(())
    row = [_Wire(root), _Wire(root)]
    for _ in range(depth - 1):
        new_row: list[_Wire] = []
        for w in row:
            v = new_vertex((w,))
            new_row += [_Wire(v), _Wire(v)]
        row = new_row
        for j in range(len(row) // 4):
            a, b = 4 * j + 1, 4 * j + 2
            d = new_vertex((row[a], row[b]))
            row[a] = _Wire(d)
            row[b] = _Wire(d)

    outs = []
    for w in row:
        w.edge = next_edge
        outs.append(next_edge)
        source[next_edge] = w.src
        next_edge += 1
    return Quiver(tuple(range(next_vertex)), tuple(internal), (0,), tuple(outs), source, target)


def is_tree(q: Quiver) -> bool:
    """True iff every vertex has exactly one incoming (internal or In) edge.

    Together with acyclicity this makes the quiver a forest rooted at the
    In-edge targets; with a single In edge, a directed tree.
    """
    indeg = {v: 0 for v in q.vertices}
    for e in list(q.internal_edges) + list(q.in_edges):
        indeg[q.target[e]] += 1
    return all(d == 1 for d in indeg.values())
