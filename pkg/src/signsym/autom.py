"""Colored bipartite graphs of binary problems and their automorphism groups.

Rows and columns become vertices; a nonzero ``A[r, j]`` becomes an edge whose
color is the coefficient value.  Row vertices are colored by ``(sense, rhs)``
and column vertices by objective coefficient, so that color- and
adjacency-preserving vertex maps are exactly the problem's permutation
symmetries.  Generators are found by individualization-refinement.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Sequence

from .model import (
    CONSTRAINT_ONLY,
    FULL,
    BinaryProblem,
    ModeError,
    RowPermutation,
    SignedPermutation,
)

DEFAULT_NODE_BUDGET = 10**6

Partition = tuple[tuple[int, ...], ...]


class SearchBudgetExceeded(RuntimeError):
    """The search ran out of nodes; ``generators`` holds what was found so far."""

    def __init__(self, message: str, generators: list):
        super().__init__(message)
        self.generators = generators
        self.incomplete = True


class OracleTooLarge(RuntimeError):
    pass


@dataclass(frozen=True)
class ColoredBipartiteGraph:
    """Vertices ``0..m-1`` are rows, ``m..m+n-1`` are columns."""

    m: int
    n: int
    vertex_colors: tuple[int, ...]
    adjacency: tuple[dict, ...]  # vertex -> {neighbor: edge color}
    color_legend: dict
    edge_legend: dict

    @property
    def num_vertices(self) -> int:
        return self.m + self.n

    @property
    def row_colors(self) -> tuple[int, ...]:
        return self.vertex_colors[: self.m]

    @property
    def col_colors(self) -> tuple[int, ...]:
        return self.vertex_colors[self.m :]

    def edges(self):
        for r in range(self.m):
            for v, color in sorted(self.adjacency[r].items()):
                yield r, v, color


def build_graph(problem: BinaryProblem, mode: str = FULL) -> ColoredBipartiteGraph:
    if mode not in (FULL, CONSTRAINT_ONLY):
        raise ModeError(f"unknown mode {mode!r}")
    m, n = problem.m, problem.n
    row_keys = [(row.sense, row.rhs) for row in problem.rows]
    if mode == FULL:
        col_keys = list(problem.objective)
    else:
        col_keys = [None] * n

    legend = {}
    colors = []
    row_ids = {}
    for key in sorted(set(row_keys)):
        row_ids[key] = len(legend)
        legend[len(legend)] = ("row",) + key
    colors.extend(row_ids[k] for k in row_keys)
    col_ids = {}
    for key in sorted(set(col_keys), key=lambda k: (k is not None, k or 0)):
        col_ids[key] = len(legend)
        legend[len(legend)] = ("col", key)
    colors.extend(col_ids[k] for k in col_keys)

    coef_values = sorted({a for row in problem.rows for _, a in row.coefficients})
    edge_ids = {a: e for e, a in enumerate(coef_values)}
    adjacency = [dict() for _ in range(m + n)]
    for r, row in enumerate(problem.rows):
        for j, a in row.coefficients:
            adjacency[r][m + j] = edge_ids[a]
            adjacency[m + j][r] = edge_ids[a]
    return ColoredBipartiteGraph(
        m, n, tuple(colors), tuple(adjacency), legend, dict(enumerate(coef_values))
    )


def initial_partition(graph: ColoredBipartiteGraph) -> Partition:
    cells = defaultdict(list)
    for v, color in enumerate(graph.vertex_colors):
        cells[color].append(v)
    return tuple(tuple(cells[c]) for c in sorted(cells))


def refine(graph: ColoredBipartiteGraph, partition: Sequence[Sequence[int]]) -> Partition:
    """Coarsest equitable refinement of ``partition``.

    Each round splits every cell by the multiset of ``(neighbor cell, edge
    color)`` pairs of its vertices; sub-cells are ordered by that signature,
    which keeps the result independent of vertex labels.
    """
    cells = [tuple(c) for c in partition]
    adj = graph.adjacency
    while True:
        cell_of = {}
        for idx, cell in enumerate(cells):
            for v in cell:
                cell_of[v] = idx
        new_cells = []
        changed = False
        for cell in cells:
            if len(cell) == 1:
                new_cells.append(cell)
                continue
            groups = defaultdict(list)
            for v in cell:
                sig = Counter((cell_of[u], color) for u, color in adj[v].items())
                groups[tuple(sorted(sig.items()))].append(v)
            if len(groups) > 1:
                changed = True
            for sig in sorted(groups):
                new_cells.append(tuple(groups[sig]))
        cells = new_cells
        if not changed:
            return tuple(cells)


def individualize(partition: Partition, v: int) -> Partition:
    out = []
    for cell in partition:
        if v in cell and len(cell) > 1:
            out.append((v,))
            out.append(tuple(u for u in cell if u != v))
        else:
            out.append(cell)
    return tuple(out)


def _target_cell(partition: Partition) -> tuple[int, ...] | None:
    best = None
    for cell in partition:
        if len(cell) > 1 and (best is None or len(cell) < len(best)):
            best = cell
    return best


def is_automorphism(graph: ColoredBipartiteGraph, mapping: Sequence[int]) -> bool:
    """Does the vertex map preserve the bipartition, colors and colored edges?"""
    m = graph.m
    if sorted(mapping) != list(range(graph.num_vertices)):
        return False
    colors = graph.vertex_colors
    adj = graph.adjacency
    for u, fu in enumerate(mapping):
        if (u < m) != (fu < m) or colors[u] != colors[fu]:
            return False
        if len(adj[u]) != len(adj[fu]):
            return False
        target = adj[fu]
        for v, color in adj[u].items():
            if target.get(mapping[v]) != color:
                return False
    return True


def split_mapping(graph: ColoredBipartiteGraph, mapping: Sequence[int]):
    m = graph.m
    rows = RowPermutation(tuple(mapping[:m]))
    cols = SignedPermutation.from_perm([v - m for v in mapping[m:]])
    return rows, cols


def vertex_permutation(row: RowPermutation, col: SignedPermutation) -> SignedPermutation:
    """Pack a (row, column) pair into one permutation of the m + n vertices."""
    m = row.m
    return SignedPermutation.from_perm(list(row.mapping) + [m + i for i in col.perm])


class _Search:
    def __init__(self, graph: ColoredBipartiteGraph, node_budget: int):
        self.graph = graph
        self.node_budget = node_budget
        self.nodes = 0
        self.generators: list[tuple[RowPermutation, SignedPermutation]] = []

    def _child(self, partition: Partition, v: int) -> Partition:
        self.nodes += 1
        if self.nodes > self.node_budget:
            raise SearchBudgetExceeded(
                f"automorphism search exceeded {self.node_budget} nodes",
                list(self.generators),
            )
        return refine(self.graph, individualize(partition, v))

    def _invariant(self, partition: Partition):
        colors = self.graph.vertex_colors
        return tuple((len(c), colors[c[0]]) for c in partition)

    def run(self) -> list[tuple[RowPermutation, SignedPermutation]]:
        graph = self.graph
        part = refine(graph, initial_partition(graph))
        path = [part]
        chosen = []
        while (cell := _target_cell(part)) is not None:
            chosen.append(cell[0])
            part = self._child(part, cell[0])
            path.append(part)
        self.first_leaf = [c[0] for c in part]
        self.invariants = [self._invariant(p) for p in path]

        parent = list(range(graph.num_vertices))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        # deepest level first: every generator found so far fixes the current prefix
        for level in reversed(range(len(chosen))):
            v = chosen[level]
            for w in _target_cell(path[level]):
                if w == v or find(w) == find(v):
                    continue
                child = self._child(path[level], w)
                if self._invariant(child) != self.invariants[level + 1]:
                    continue
                mapping = self._explore(child, level + 1)
                if mapping is None:
                    continue
                self.generators.append(split_mapping(graph, mapping))
                for a, b in enumerate(mapping):
                    ra, rb = find(a), find(b)
                    if ra != rb:
                        parent[max(ra, rb)] = min(ra, rb)
        return self.generators

    def _explore(self, part: Partition, depth: int) -> list[int] | None:
        cell = _target_cell(part)
        if cell is None:
            mapping = [0] * self.graph.num_vertices
            for a, b in zip(self.first_leaf, (c[0] for c in part)):
                mapping[a] = b
            return mapping if is_automorphism(self.graph, mapping) else None
        for u in cell:
            child = self._child(part, u)
            if self._invariant(child) != self.invariants[depth + 1]:
                continue
            found = self._explore(child, depth + 1)
            if found is not None:
                return found
        return None


def find_generators(
    graph: ColoredBipartiteGraph, node_budget: int = DEFAULT_NODE_BUDGET
) -> list[tuple[RowPermutation, SignedPermutation]]:
    """Generators of the automorphism group as (row map, column map) pairs.

    Raises SearchBudgetExceeded (carrying the partial generator list) when
    more than ``node_budget`` search nodes are needed.
    """
    return _Search(graph, node_budget).run()


def brute_force_automorphisms(
    graph: ColoredBipartiteGraph, cap: int = 10**6
) -> list[tuple[RowPermutation, SignedPermutation]]:
    """Every automorphism, by enumerating all row and column bijections."""
    m, n = graph.m, graph.n
    if math.factorial(m) * math.factorial(n) > cap:
        raise OracleTooLarge(f"{m}! * {n}! candidates exceed cap {cap}")
    colors = graph.vertex_colors
    row_perms = [
        p for p in itertools.permutations(range(m)) if all(colors[i] == colors[p[i]] for i in range(m))
    ]
    col_perms = [
        p
        for p in itertools.permutations(range(m, m + n))
        if all(colors[m + j] == colors[p[j]] for j in range(n))
    ]
    found = []
    for rp in row_perms:
        for cp in col_perms:
            mapping = list(rp) + list(cp)
            if is_automorphism(graph, mapping):
                found.append(split_mapping(graph, mapping))
    return found


def detect_unsigned(
    problem: BinaryProblem, mode: str = FULL, node_budget: int = DEFAULT_NODE_BUDGET
) -> list[tuple[SignedPermutation, RowPermutation]]:
    """Permutation symmetry generators of ``problem`` as (column map, row map) pairs."""
    gens = find_generators(build_graph(problem, mode), node_budget)
    return [(cols, rows) for rows, cols in gens]
