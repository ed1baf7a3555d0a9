"""Undirected graph instances used to build combinatorial cost functions.

Graphs are stored as dense 0/1 adjacency matrices (symmetric, zero
diagonal).  Node ids are 1-based in the text and JSON interchange formats
and 0-based everywhere else.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError

__all__ = [
    "GraphInstance",
    "parse_graph_text",
    "parse_graph_json",
    "path_graph",
    "cycle_graph",
    "clique_graph",
    "star_graph",
    "empty_graph",
    "random_graph",
]


@dataclass(eq=False)
class GraphInstance:
    """A simple undirected graph on ``node_count`` nodes."""

    node_count: int
    adjacency: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.node_count < 1:
            raise PreconditionError("graph needs at least one node")
        a = np.asarray(self.adjacency, dtype=np.int64)
        if a.shape != (self.node_count, self.node_count):
            raise PreconditionError(
                f"adjacency shape {a.shape} does not match node count {self.node_count}"
            )
        if not np.array_equal(a, a.T):
            raise PreconditionError("adjacency matrix must be symmetric")
        if np.any(np.diag(a) != 0):
            raise PreconditionError("self-loops are not allowed")
        if not np.isin(a, (0, 1)).all():
            raise PreconditionError("adjacency entries must be 0 or 1")
        self.adjacency = a

    @classmethod
    def from_edges(cls, node_count: int, edges) -> "GraphInstance":
        """Build from an iterable of 0-based ``(i, j)`` pairs."""
        a = np.zeros((node_count, node_count), dtype=np.int64)
        for i, j in edges:
            if not (0 <= i < node_count and 0 <= j < node_count):
                raise PreconditionError(f"edge ({i}, {j}) out of range")
            if i == j:
                raise PreconditionError(f"self-loop at node {i}")
            a[i, j] = a[j, i] = 1
        return cls(node_count, a)

    @property
    def edges(self) -> list[tuple[int, int]]:
        """Edge list as sorted 0-based pairs."""
        ii, jj = np.nonzero(np.triu(self.adjacency))
        return list(zip(ii.tolist(), jj.tolist()))

    @property
    def edge_count(self) -> int:
        return int(self.adjacency.sum()) // 2

    def neighbors(self, i: int) -> np.ndarray:
        return np.nonzero(self.adjacency[i])[0]

    def to_dict(self) -> dict:
        """JSON form; edge ids are 1-based to match the text format."""
        return {
            "node_count": self.node_count,
            "edges": [[i + 1, j + 1] for i, j in self.edges],
        }


def parse_graph_text(text: str) -> GraphInstance:
    """Parse the plain-text format: first line ``d m``, then ``m`` lines ``i j``.

    Node ids on edge lines are 1-based.
    """
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise ValueError("empty graph file")
    head = lines[0].split()
    if len(head) != 2:
        raise ValueError(f"expected header 'd m', got {lines[0]!r}")
    d, m = int(head[0]), int(head[1])
    if len(lines) - 1 != m:
        raise ValueError(f"header promises {m} edges, file has {len(lines) - 1}")
    edges = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise ValueError(f"bad edge line {ln!r}")
        i, j = int(parts[0]), int(parts[1])
        if not (1 <= i <= d and 1 <= j <= d):
            raise PreconditionError(f"edge ({i}, {j}) outside 1..{d}")
        if i == j:
            raise PreconditionError(f"self-loop at node {i}")
        edges.append((i - 1, j - 1))
    return GraphInstance.from_edges(d, edges)


def parse_graph_json(obj: dict) -> GraphInstance:
    d = int(obj["node_count"])
    edges = [(int(i) - 1, int(j) - 1) for i, j in obj["edges"]]
    return GraphInstance.from_edges(d, edges)


def path_graph(n: int) -> GraphInstance:
    return GraphInstance.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> GraphInstance:
    if n < 3:
        raise PreconditionError("cycle needs at least 3 nodes")
    return GraphInstance.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def clique_graph(n: int) -> GraphInstance:
    return GraphInstance.from_edges(
        n, [(i, j) for i in range(n) for j in range(i + 1, n)]
    )


def star_graph(n: int) -> GraphInstance:
    """Node 0 is the hub, nodes 1..n-1 are leaves."""
    return GraphInstance.from_edges(n, [(0, i) for i in range(1, n)])


def empty_graph(n: int) -> GraphInstance:
    return GraphInstance(n, np.zeros((n, n), dtype=np.int64))


def random_graph(n: int, p: float, seed: int) -> GraphInstance:
    """Erdos-Renyi G(n, p) with a fixed seed."""
    rng = np.random.default_rng(seed)
    edges = [
        (i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p
    ]
    return GraphInstance.from_edges(n, edges)
