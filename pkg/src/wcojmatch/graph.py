"""Edge-list ingestion and the dual (outgoing/incoming) CSR graph.

Vertex identifiers are remapped to a dense range ``[0, num_vertices)`` with
ascending raw id mapping to ascending dense id. Parallel edges are collapsed,
self-loops are kept. All offsets and identifiers are stored as 32-bit
unsigned integers.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field
from functools import cached_property
from typing import BinaryIO, Iterable, NamedTuple, Sequence, TextIO

import numpy as np

from .errors import ContractViolation, EdgeListParseError
from .intersect import SetRef

OUT = "out"
IN = "in"
DIRECTIONS = (OUT, IN)

INDEX_DTYPE = np.uint32
CSR_MAGIC = b"CSR1"


@dataclass
class EdgeList:
    """Raw edges as read from disk; directedness comes from the caller."""

    edges: Sequence[tuple[int, int]]
    directed: bool = True

    def __len__(self):
        return len(self.edges)


class VertexInterval(NamedTuple):
    lo: int
    hi: int

    def __len__(self):
        return self.hi - self.lo

    def __contains__(self, v):
        return self.lo <= v < self.hi


@dataclass(frozen=True, eq=False)
class CsrGraph:
    """Immutable dual CSR graph.

    ``vertex_ids[d]`` holds the raw identifier of dense vertex ``d``.
    """

    num_vertices: int
    num_edges: int
    pointers_out: np.ndarray
    neighbors_out: np.ndarray
    pointers_in: np.ndarray
    neighbors_in: np.ndarray
    vertex_ids: np.ndarray = field(repr=False)

    def __eq__(self, other):
        if not isinstance(other, CsrGraph):
            return NotImplemented
        return (
            self.num_vertices == other.num_vertices
            and self.num_edges == other.num_edges
            and np.array_equal(self.pointers_out, other.pointers_out)
            and np.array_equal(self.neighbors_out, other.neighbors_out)
            and np.array_equal(self.pointers_in, other.pointers_in)
            and np.array_equal(self.neighbors_in, other.neighbors_in)
        )

    __hash__ = None

    def __getstate__(self):
        # drop cached python-list views before pickling to worker processes
        state = dict(self.__dict__)
        state.pop("arrays", None)
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)

    @cached_property
    def arrays(self) -> dict[str, list[int]]:
        """Plain-list views of the four CSR arrays, keyed by array id."""
        return {
            "pointers_out": self.pointers_out.tolist(),
            "neighbors_out": self.neighbors_out.tolist(),
            "pointers_in": self.pointers_in.tolist(),
            "neighbors_in": self.neighbors_in.tolist(),
        }

    @property
    def average_degree(self) -> float:
        return self.num_edges / self.num_vertices if self.num_vertices else 0.0

    def degree(self, v: int, direction: str = OUT) -> int:
        ptr = self.pointers_out if direction == OUT else self.pointers_in
        return int(ptr[v + 1]) - int(ptr[v])

    def out_neighbors(self, v: int) -> np.ndarray:
        return self.neighbors_out[self.pointers_out[v]:self.pointers_out[v + 1]]

    def in_neighbors(self, v: int) -> np.ndarray:
        return self.neighbors_in[self.pointers_in[v]:self.pointers_in[v + 1]]

    def edge_array(self) -> np.ndarray:
        """All edges as an ``(num_edges, 2)`` array of dense ids, sorted."""
        src = np.repeat(
            np.arange(self.num_vertices, dtype=np.int64),
            np.diff(self.pointers_out.astype(np.int64)),
        )
        return np.column_stack([src, self.neighbors_out.astype(np.int64)])

    def raw_edges(self) -> set[tuple[int, int]]:
        ids = self.vertex_ids
        return {(int(ids[u]), int(ids[v])) for u, v in self.edge_array()}

    def is_symmetric(self) -> bool:
        return np.array_equal(self.pointers_out, self.pointers_in) and np.array_equal(
            self.neighbors_out, self.neighbors_in
        )


def load_edge_list(stream: Iterable[str], directed: bool = True) -> EdgeList:
    """Parse a whitespace-separated edge list.

    Lines starting with ``#`` or ``%`` are comments and blank lines are
    skipped. Every other line must hold exactly two non-negative integers.
    """
    edges = []
    for lineno, line in enumerate(stream, start=1):
        text = line.strip()
        if not text or text[0] in "#%":
            continue
        parts = text.split()
        if len(parts) != 2:
            raise EdgeListParseError(lineno, line)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise EdgeListParseError(lineno, line) from None
        if u < 0 or v < 0:
            raise EdgeListParseError(lineno, line)
        edges.append((u, v))
    return EdgeList(edges, directed)


def _from_dense(src: np.ndarray, dst: np.ndarray, n: int, vertex_ids: np.ndarray) -> CsrGraph:
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    codes = np.unique(src * max(n, 1) + dst)
    src = codes // max(n, 1)
    dst = codes % max(n, 1)
    m = len(codes)

    pointers_out = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=pointers_out[1:])
    pointers_in = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(dst, minlength=n), out=pointers_in[1:])
    by_dst = np.lexsort((src, dst))

    return CsrGraph(
        num_vertices=n,
        num_edges=m,
        pointers_out=pointers_out.astype(INDEX_DTYPE),
        neighbors_out=dst.astype(INDEX_DTYPE),
        pointers_in=pointers_in.astype(INDEX_DTYPE),
        neighbors_in=src[by_dst].astype(INDEX_DTYPE),
        vertex_ids=np.asarray(vertex_ids, dtype=np.int64),
    )


def build_csr(edges: EdgeList) -> CsrGraph:
    """Build the dual CSR graph from an edge list.

    Only raw ids that occur in some edge get a dense id, so degree-0 vertices
    never appear. An undirected edge list is symmetrized before the build.
    """
    arr = np.asarray(edges.edges, dtype=np.int64).reshape(-1, 2)
    if arr.size == 0:
        return _from_dense(np.empty(0), np.empty(0), 0, np.empty(0, dtype=np.int64))
    if (arr < 0).any():
        raise ContractViolation("raw vertex ids must be non-negative")
    raw_ids, inverse = np.unique(arr, return_inverse=True)
    dense = inverse.reshape(-1, 2)
    src, dst = dense[:, 0], dense[:, 1]
    if not edges.directed:
        src, dst = np.concatenate([src, dst]), np.concatenate([dst, src])
    return _from_dense(src, dst, len(raw_ids), raw_ids)


def make_undirected(g: CsrGraph) -> CsrGraph:
    """Add the reverse of every edge; out- and in-CSR become identical."""
    e = g.edge_array()
    src = np.concatenate([e[:, 0], e[:, 1]])
    dst = np.concatenate([e[:, 1], e[:, 0]])
    return _from_dense(src, dst, g.num_vertices, g.vertex_ids)


def stride_order(num_vertices: int, stride: int) -> np.ndarray:
    """Old ids listed in their new order: 0, s, 2s, ..., then 1, 1+s, ..."""
    if stride < 1:
        raise ContractViolation(f"stride must be >= 1, got {stride}")
    if num_vertices == 0:
        return np.empty(0, dtype=np.int64)
    return np.concatenate(
        [np.arange(start, num_vertices, stride) for start in range(min(stride, num_vertices))]
    )


def relabel(g: CsrGraph, permutation: np.ndarray) -> CsrGraph:
    """Relabel ``g`` so that old vertex ``v`` becomes ``permutation[v]``."""
    permutation = np.asarray(permutation, dtype=np.int64)
    e = g.edge_array()
    inverse = np.empty_like(permutation)
    inverse[permutation] = np.arange(len(permutation))
    return _from_dense(permutation[e[:, 0]], permutation[e[:, 1]], g.num_vertices, g.vertex_ids[inverse])


def stride_map(g: CsrGraph, stride: int) -> tuple[CsrGraph, np.ndarray]:
    """Stride-map vertex ids for load balancing across partitions.

    Returns the relabeled graph and ``permutation`` with
    ``permutation[old_id] == new_id``.
    """
    order = stride_order(g.num_vertices, stride)
    permutation = np.empty(g.num_vertices, dtype=np.int64)
    permutation[order] = np.arange(g.num_vertices)
    return relabel(g, permutation), permutation


def partition_vertices(num_vertices: int, p: int) -> list[VertexInterval]:
    """Split ``[0, num_vertices)`` into ``p`` contiguous near-equal intervals."""
    if p < 1:
        raise ContractViolation(f"number of partitions must be >= 1, got {p}")
    base, extra = divmod(num_vertices, p)
    intervals = []
    lo = 0
    for i in range(p):
        hi = lo + base + (1 if i < extra else 0)
        intervals.append(VertexInterval(lo, hi))
        lo = hi
    return intervals


def neighborhood(g: CsrGraph, v: int, direction: str = OUT) -> SetRef:
    """Reference to the neighborhood slice of ``v`` in the chosen CSR."""
    if not 0 <= v < g.num_vertices:
        raise ContractViolation(f"vertex {v} out of range [0, {g.num_vertices})")
    if direction not in DIRECTIONS:
        raise ContractViolation(f"unknown direction {direction!r}")
    pointers = g.pointers_out if direction == OUT else g.pointers_in
    left = int(pointers[v])
    size = int(pointers[v + 1]) - left
    array_id = "neighbors_" + direction
    return SetRef(array_id, left, size, g.arrays[array_id])


def write_csr_binary(g: CsrGraph, fh: BinaryIO) -> None:
    """Dump ``g`` as magic ``CSR1``, two u32 counts, then four u32 arrays (little endian)."""
    fh.write(CSR_MAGIC)
    fh.write(struct.pack("<II", g.num_vertices, g.num_edges))
    for arr in (g.pointers_out, g.neighbors_out, g.pointers_in, g.neighbors_in):
        fh.write(np.asarray(arr, dtype="<u4").tobytes())


def read_csr_binary(fh: BinaryIO) -> CsrGraph:
    magic = fh.read(4)
    if magic != CSR_MAGIC:
        raise ContractViolation(f"not a CSR dump (magic {magic!r})")
    n, m = struct.unpack("<II", fh.read(8))

    def take(count):
        buf = fh.read(4 * count)
        if len(buf) != 4 * count:
            raise ContractViolation("truncated CSR dump")
        return np.frombuffer(buf, dtype="<u4").astype(INDEX_DTYPE)

    return CsrGraph(
        num_vertices=n,
        num_edges=m,
        pointers_out=take(n + 1),
        neighbors_out=take(m),
        pointers_in=take(n + 1),
        neighbors_in=take(m),
        vertex_ids=np.arange(n, dtype=np.int64),
    )


def load_graph(path, directed: bool = True) -> CsrGraph:
    """Read a graph file, either a binary CSR dump or an edge-list text file."""
    with open(path, "rb") as fh:
        head = fh.read(4)
        if head == CSR_MAGIC:
            fh.seek(0)
            g = read_csr_binary(fh)
            return g if directed else make_undirected(g)
    with open(path, encoding="utf-8") as fh:
        return build_csr(load_edge_list(fh, directed))
