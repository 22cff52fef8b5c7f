"""Acyclic directed sensor networks.

Nodes are numbered 1..n as in the figures; node 1 is the fusion center.
``adjacency[i-1, j-1]`` is True when there is an arrow ``i -> j``.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import CyclicGraphError, DomainError, GraphValidationError

MAX_IN_DEGREE = 20
FUSION_CENTER = 1


@dataclass(frozen=True)
class Dag:
    n: int
    edges: tuple[tuple[int, int], ...]
    _parents: tuple[tuple[int, ...], ...] = field(repr=False, compare=False)
    _offspring: tuple[tuple[int, ...], ...] = field(repr=False, compare=False)

    fusion_center = FUSION_CENTER

    @cached_property
    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=bool)
        for i, j in self.edges:
            a[i - 1, j - 1] = True
        a.setflags(write=False)
        return a

    @property
    def nodes(self) -> range:
        return range(1, self.n + 1)

    def in_degree(self, k: int) -> int:
        return len(self.parents(k))

    def parents(self, k: int) -> tuple[int, ...]:
        return self._parents[_check_node(self, k) - 1]

    def offspring(self, k: int) -> tuple[int, ...]:
        return self._offspring[_check_node(self, k) - 1]

    def table_size(self, k: int) -> int:
        return 1 << self.in_degree(k)

    def __str__(self):
        arrows = ", ".join(f"{i}->{j}" for i, j in self.edges)
        return f"Dag(n={self.n}; {arrows})"


def _check_node(d: Dag, k: int) -> int:
    if not (isinstance(k, (int, np.integer)) and 1 <= k <= d.n):
        raise DomainError(f"node index {k} out of range 1..{d.n}")
    return int(k)


def _find_cycle(n, succ):
    color = [0] * (n + 1)
    stack_path = []

    def visit(v):
        color[v] = 1
        stack_path.append(v)
        for w in succ[v]:
            if color[w] == 1:
                return stack_path[stack_path.index(w):] + [w]
            if color[w] == 0:
                found = visit(w)
                if found:
                    return found
        color[v] = 2
        stack_path.pop()
        return None

    for v in range(1, n + 1):
        if color[v] == 0:
            found = visit(v)
            if found:
                return found
    return None


def dag_from_edges(n: int, edges) -> Dag:
    """Build and validate a :class:`Dag` from 1-based ``(from, to)`` pairs."""
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise GraphValidationError(f"node count must be a positive integer, got {n!r}")
    n = int(n)
    seen = set()
    clean = []
    for e in edges:
        i, j = (int(v) for v in e)
        if not (1 <= i <= n and 1 <= j <= n):
            raise GraphValidationError(f"arrow {i}->{j} references a node outside 1..{n}")
        if i == j:
            raise GraphValidationError(f"self-loop at node {i}")
        if (i, j) in seen:
            raise GraphValidationError(f"duplicate arrow {i}->{j}")
        seen.add((i, j))
        clean.append((i, j))
    succ = {v: [] for v in range(1, n + 1)}
    pred = {v: [] for v in range(1, n + 1)}
    for i, j in clean:
        succ[i].append(j)
        pred[j].append(i)
    cycle = _find_cycle(n, {v: sorted(s) for v, s in succ.items()})
    if cycle:
        raise CyclicGraphError(cycle)
    if n > 1:
        # weak connectivity
        seen_nodes = {1}
        todo = [1]
        while todo:
            v = todo.pop()
            for w in succ[v] + pred[v]:
                if w not in seen_nodes:
                    seen_nodes.add(w)
                    todo.append(w)
        if len(seen_nodes) != n:
            missing = sorted(set(range(1, n + 1)) - seen_nodes)
            raise GraphValidationError(f"graph is not connected; unreachable nodes {missing}")
    for v in range(1, n + 1):
        if len(pred[v]) > MAX_IN_DEGREE:
            raise GraphValidationError(
                f"node {v} has in-degree {len(pred[v])} > {MAX_IN_DEGREE}"
            )
    parents = tuple(tuple(sorted(pred[v])) for v in range(1, n + 1))
    offspring = tuple(tuple(sorted(succ[v])) for v in range(1, n + 1))
    return Dag(n, tuple(sorted(clean)), parents, offspring)


def parents(d: Dag, k: int) -> tuple[int, ...]:
    return d.parents(k)


def offspring(d: Dag, k: int) -> tuple[int, ...]:
    return d.offspring(k)


def threshold_count(d: Dag) -> int:
    """Total number of LRT thresholds, one per (node, parent-message) pair."""
    return sum(1 << d.in_degree(k) for k in d.nodes)


def topological_order(d: Dag) -> tuple[int, ...]:
    """Kahn's order with ties broken by the smallest node index."""
    indeg = [0] + [d.in_degree(k) for k in d.nodes]
    heap = [k for k in d.nodes if indeg[k] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        v = heapq.heappop(heap)
        order.append(v)
        for w in d.offspring(v):
            indeg[w] -= 1
            if indeg[w] == 0:
                heapq.heappush(heap, w)
    return tuple(order)


def message_index(d: Dag, k: int, bits) -> int:
    """Integer index of a parent-message vector (lowest parent = LSB)."""
    bits = tuple(int(b) for b in bits)
    if len(bits) != d.in_degree(k):
        raise DomainError(f"node {k} has {d.in_degree(k)} parents, got {len(bits)} bits")
    return sum(b << i for i, b in enumerate(bits))


def message_bits(d: Dag, k: int, index: int) -> tuple[int, ...]:
    """Inverse of :func:`message_index`."""
    m = d.in_degree(k)
    if not 0 <= index < (1 << m):
        raise DomainError(f"message index {index} out of range for node {k}")
    return tuple((index >> i) & 1 for i in range(m))


# Networks used in the experiments.

ACYCLIC_11 = (
    (2, 7), (3, 1), (4, 1), (4, 3), (5, 7), (6, 3), (7, 1), (7, 3), (7, 6),
    (8, 9), (9, 4), (10, 5), (11, 6), (11, 9),
)

BINARY_TREE_11 = (
    (2, 1), (3, 1), (4, 2), (5, 2), (6, 3), (7, 3), (8, 4), (9, 4), (10, 5), (11, 5),
)


def acyclic_graph_11() -> Dag:
    """The 11-node acyclic example network (36 thresholds)."""
    return dag_from_edges(11, ACYCLIC_11)


def binary_tree_11() -> Dag:
    """Canonical 11-node binary tree, every arrow pointing toward node 1."""
    return dag_from_edges(11, BINARY_TREE_11)


def tandem() -> Dag:
    """Two-node tandem 2 -> 1 (peripheral sensor 2 feeds the fusion center)."""
    return dag_from_edges(2, [(2, 1)])
