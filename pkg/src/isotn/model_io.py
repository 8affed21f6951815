"""Single-file model serialization.

Layout: a 16-byte magic prefix, a little-endian u64 header length, a
UTF-8 text header (format version, graph kind and parameters, vertex and
edge tables, symbol list, PRNG name, seed), then the binary section - for
each vertex in ascending id its tensor as row-major complex values, each
component a little-endian IEEE-754 double (real then imaginary) - and a
trailing 8-byte checksum of the binary section. Round-trips are bit-exact.
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass

import numpy as np

from .errors import ModelFileError
from .graph import Quiver
from .model import SymbolSet
from .network import TensorNetwork

MAGIC = b"ISOTN-MODEL-v01\n"
FORMAT_VERSION = 1
PRNG_NAME = "philox"


@dataclass(frozen=True)
class ModelBundle:
    """A network plus the run metadata needed to reuse it."""

    net: TensorNetwork
    symbols: SymbolSet | None = None
    kind: str = "custom"
    seed: int = 0
    prng: str = PRNG_NAME


def _header_text(bundle: ModelBundle) -> str:
    net = bundle.net
    q = net.quiver
    lines = [
        f"format_version {FORMAT_VERSION}",
        f"kind {bundle.kind}",
        f"n {net.n_sites}",
        f"prng {bundle.prng}",
        f"seed {bundle.seed}",
        f"isometry_tol {net.isometry_tol!r}",
    ]
    if bundle.symbols is not None:
        lines.append(f"scheme {bundle.symbols.scheme}")
        for tok in bundle.symbols.symbols:
            lines.append(f"symbol {json.dumps(tok, ensure_ascii=False)}")
    for v in q.vertices:
        lines.append(f"vertex {v}")
    for e in q.in_edges:
        lines.append(f"edge in {e} {q.target[e]} {net.edge_dim[e]}")
    for e in q.internal_edges:
        lines.append(f"edge internal {e} {q.source[e]} {q.target[e]} {net.edge_dim[e]}")
    for e in q.out_edges:
        lines.append(f"edge out {e} {q.source[e]} {net.edge_dim[e]}")
    lines.append("end")
    return "\n".join(lines) + "\n"


def save_model(bundle: ModelBundle, path) -> None:
    header = _header_text(bundle).encode("utf-8")
    blobs = [
        np.ascontiguousarray(bundle.net.vertex_tensor[v], dtype="<c16").tobytes()
        for v in bundle.net.quiver.vertices
    ]
    binary = b"".join(blobs)
    digest = hashlib.blake2b(binary, digest_size=8).digest()
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<Q", len(header)))
        fh.write(header)
        fh.write(binary)
        fh.write(digest)


def load_model(path) -> ModelBundle:
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < len(MAGIC) + 8 or raw[: len(MAGIC)] != MAGIC:
        raise ModelFileError(f"{path}: not a model file (bad magic)")
    (header_len,) = struct.unpack("<Q", raw[len(MAGIC): len(MAGIC) + 8])
    header_start = len(MAGIC) + 8
    if len(raw) < header_start + header_len + 8:
        raise ModelFileError(f"{path}: truncated header")
    header = raw[header_start: header_start + header_len].decode("utf-8")

    meta: dict[str, str] = {}
    symbols: list = []
    vertices: list[int] = []
    in_edges: list[int] = []
    internal_edges: list[int] = []
    out_edges: list[int] = []
    source: dict[int, int] = {}
    target: dict[int, int] = {}
    edge_dim: dict[int, int] = {}
    saw_end = False
    for line in header.splitlines():
        if not line:
            continue
        if line == "end":
            saw_end = True
            break
        key, _, rest = line.partition(" ")
        if key == "symbol":
            symbols.append(json.loads(rest))
        elif key == "vertex":
            vertices.append(int(rest))
        elif key == "edge":
            fields = rest.split()
            role = fields[0]
            if role == "in":
                e, dst, d = (int(x) for x in fields[1:])
                in_edges.append(e)
                target[e] = dst
            elif role == "internal":
                e, src, dst, d = (int(x) for x in fields[1:])
                internal_edges.append(e)
                source[e] = src
                target[e] = dst
            elif role == "out":
                e, src, d = (int(x) for x in fields[1:])
                out_edges.append(e)
                source[e] = src
            else:
                raise ModelFileError(f"{path}: unknown edge role {role!r}")
            edge_dim[e] = d
        else:
            meta[key] = rest
    if not saw_end:
        raise ModelFileError(f"{path}: header missing 'end' marker")
    if int(meta.get("format_version", "-1")) != FORMAT_VERSION:
        raise ModelFileError(f"{path}: unsupported format version {meta.get('format_version')}")

    quiver = Quiver(
        tuple(vertices), tuple(internal_edges), tuple(in_edges), tuple(out_edges), source, target
    )
    binary = raw[header_start + header_len: -8]
    digest = raw[-8:]
    if hashlib.blake2b(binary, digest_size=8).digest() != digest:
        raise ModelFileError(f"{path}: checksum mismatch (file corrupted or truncated)")

    tensors: dict[int, np.ndarray] = {}
    offset = 0
    for v in quiver.vertices:
        ins = quiver.vertex_in_edges(v)
        outs = quiver.vertex_out_edges(v)
        shape = tuple(edge_dim[e] for e in ins) + tuple(edge_dim[e] for e in outs)
        count = int(np.prod(shape, dtype=np.int64)) if shape else 1
        nbytes = count * 16
        if offset + nbytes > len(binary):
            raise ModelFileError(f"{path}: binary section too short at vertex {v}")
        tensors[v] = np.frombuffer(binary, dtype="<c16", count=count, offset=offset).reshape(shape)
        offset += nbytes
    if offset != len(binary):
        raise ModelFileError(f"{path}: {len(binary) - offset} trailing bytes in binary section")

    tol = float(meta.get("isometry_tol", "1e-08"))
    net = TensorNetwork(quiver, edge_dim, tensors, tol)
    symbol_set = None
    if symbols:
        symbol_set = SymbolSet(tuple(symbols), meta.get("scheme", "chars"))
    return ModelBundle(
        net,
        symbol_set,
        meta.get("kind", "custom"),
        int(meta.get("seed", "0")),
        meta.get("prng", PRNG_NAME),
    )
