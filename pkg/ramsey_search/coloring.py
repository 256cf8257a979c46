# ramsey_search/coloring.py
"""
Edge-colorings of the complete graph K_n and the simple graphs they induce.

Edges of K_n are numbered lexicographically over pairs (i, j), i < j, which
is also the order in which a coloring is constructed one edge at a time.
"""
import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterator, List, Optional, Sequence, Tuple

import networkx as nx

from .exceptions import MatrixParseError, ParameterError

UNCOLORED = -1

MAX_MATRIX_COLORS = 10
COLOR_DIGITS = '0123456789'


def edge_count(n: int) -> int:
    return n * (n - 1) // 2


@lru_cache(maxsize=64)
def edge_pairs(n: int) -> Tuple[Tuple[int, int], ...]:
    """All pairs (i, j), i < j, in lexicographic edge order"""
    return tuple(combinations(range(n), 2))


def edge_index(i: int, j: int, n: int) -> int:
    """Position of edge (i, j) in the lexicographic edge order of K_n"""
    if not 0 <= i < j < n:
        raise ParameterError(f"edge ({i}, {j}) requires 0 <= i < j < {n}")
    return i * (2 * n - i - 1) // 2 + (j - i - 1)


def iter_bits(mask: int) -> Iterator[int]:
    """Indices of the set bits of mask, smallest first"""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class SimpleGraph:
    """Simple graph on vertices 0..n-1 stored as one neighbour bitset per vertex"""

    n: int
    rows: Tuple[int, ...]

    def __post_init__(self):
        if len(self.rows) != self.n:
            raise ParameterError(f"expected {self.n} adjacency rows, got {len(self.rows)}")
        full = (1 << self.n) - 1
        for v, row in enumerate(self.rows):
            if row & ~full:
                raise ParameterError(f"vertex {v} has a neighbour outside 0..{self.n - 1}")
            if row >> v & 1:
                raise ParameterError(f"vertex {v} is adjacent to itself")
            for u in iter_bits(row):
                if not self.rows[u] >> v & 1:
                    raise ParameterError(f"adjacency of {v} and {u} is not symmetric")

    @classmethod
    def empty(cls, n: int) -> 'SimpleGraph':
        return cls(n, (0,) * n)

    @classmethod
    def complete(cls, n: int) -> 'SimpleGraph':
        full = (1 << n) - 1
        return cls(n, tuple(full ^ (1 << v) for v in range(n)))

    @classmethod
    def from_edges(cls, n: int, edges) -> 'SimpleGraph':
        rows = [0] * n
        for u, v in edges:
            if u == v:
                raise ParameterError(f"loop at vertex {u}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, tuple(rows))

    @classmethod
    def from_networkx(cls, graph: nx.Graph) -> 'SimpleGraph':
        nodes = sorted(graph.nodes)
        position = {node: k for k, node in enumerate(nodes)}
        return cls.from_edges(len(nodes), ((position[u], position[v]) for u, v in graph.edges))

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.rows[u] >> v & 1)

    def neighbors(self, v: int) -> int:
        return self.rows[v]

    def degree(self, v: int) -> int:
        return self.rows[v].bit_count()

    @property
    def edge_count(self) -> int:
        return sum(row.bit_count() for row in self.rows) // 2

    def edges(self) -> Iterator[Tuple[int, int]]:
        for u in range(self.n):
            for v in iter_bits(self.rows[u] >> (u + 1)):
                yield u, u + 1 + v

    def complement(self) -> 'SimpleGraph':
        full = (1 << self.n) - 1
        return SimpleGraph(self.n, tuple(full ^ row ^ (1 << v) for v, row in enumerate(self.rows)))

    def with_edge(self, u: int, v: int) -> 'SimpleGraph':
        rows = list(self.rows)
        rows[u] |= 1 << v
        rows[v] |= 1 << u
        return SimpleGraph(self.n, tuple(rows))

    def relabel(self, perm: Sequence[int]) -> 'SimpleGraph':
        """Graph with vertex v renamed to perm[v]"""
        _check_permutation(perm, self.n)
        return SimpleGraph.from_edges(self.n, ((perm[u], perm[v]) for u, v in self.edges()))

    def delete_vertex(self, v: int) -> 'SimpleGraph':
        if not 0 <= v < self.n:
            raise ParameterError(f"vertex {v} out of range for n={self.n}")
        low = (1 << v) - 1
        rows = []
        for u, row in enumerate(self.rows):
            if u != v:
                rows.append((row & low) | ((row >> (v + 1)) << v))
        return SimpleGraph(self.n - 1, tuple(rows))

    def is_connected(self) -> bool:
        if self.n == 0:
            return False
        return nx.is_connected(self.to_networkx())

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n))
        graph.add_edges_from(self.edges())
        return graph


@dataclass(frozen=True)
class EdgeColoring:
    """
    Partial or complete m-edge-coloring of K_n.

    colors[k] is the color of the k-th lexicographic edge or UNCOLORED.
    Partial colorings are always a colored prefix followed by UNCOLORED.
    """

    n: int
    m: int
    colors: Tuple[int, ...]

    def __post_init__(self):
        if self.n < 1:
            raise ParameterError(f"vertex count must be at least 1, got {self.n}")
        if self.m < 2:
            raise ParameterError(f"color count must be at least 2, got {self.m}")
        expected = edge_count(self.n)
        if len(self.colors) != expected:
            raise ParameterError(f"K_{self.n} has {expected} edges, got {len(self.colors)} colors")
        seen_uncolored = False
        for k, color in enumerate(self.colors):
            if color == UNCOLORED:
                seen_uncolored = True
            elif not 0 <= color < self.m:
                raise ParameterError(f"edge {k} has color {color} outside 0..{self.m - 1}")
            elif seen_uncolored:
                raise ParameterError(f"edge {k} is colored after an uncolored edge")

    @property
    def edge_count(self) -> int:
        return len(self.colors)

    @property
    def colored_count(self) -> int:
        """Length of the colored prefix"""
        try:
            return self.colors.index(UNCOLORED)
        except ValueError:
            return len(self.colors)

    @property
    def is_complete(self) -> bool:
        return UNCOLORED not in self.colors

    def color(self, i: int, j: int) -> int:
        if i > j:
            i, j = j, i
        return self.colors[edge_index(i, j, self.n)]

    def with_next_color(self, color: int) -> 'EdgeColoring':
        """Coloring with the first uncolored edge set to color"""
        k = self.colored_count
        if k == len(self.colors):
            raise ParameterError("coloring is already complete")
        return EdgeColoring(self.n, self.m, self.colors[:k] + (color,) + self.colors[k + 1:])

    def require_complete(self) -> None:
        if not self.is_complete:
            raise ParameterError(
                f"coloring of K_{self.n} is partial ({self.colored_count}/{self.edge_count} edges colored)"
            )


def new_coloring(n: int, m: int) -> EdgeColoring:
    """Coloring of K_n with every edge UNCOLORED"""
    if n < 1 or m < 2:
        raise ParameterError(f"need n >= 1 and m >= 2, got n={n}, m={m}")
    return EdgeColoring(n, m, (UNCOLORED,) * edge_count(n))


def monochrome_graph(coloring: EdgeColoring, color: int) -> SimpleGraph:
    """Graph on n vertices formed by the edges of one color"""
    coloring.require_complete()
    if not 0 <= color < coloring.m:
        raise ParameterError(f"color {color} outside 0..{coloring.m - 1}")
    rows = [0] * coloring.n
    for (i, j), c in zip(edge_pairs(coloring.n), coloring.colors):
        if c == color:
            rows[i] |= 1 << j
            rows[j] |= 1 << i
    return SimpleGraph(coloring.n, tuple(rows))


def coloring_from_graph(graph: SimpleGraph) -> EdgeColoring:
    """2-coloring of K_n with the edges of graph in color 1 and the rest in color 0"""
    return EdgeColoring(graph.n, 2, tuple(int(graph.has_edge(i, j)) for i, j in edge_pairs(graph.n)))


def permute_coloring(coloring: EdgeColoring, perm: Sequence[int]) -> EdgeColoring:
    """Coloring with vertex v renamed to perm[v]"""
    coloring.require_complete()
    _check_permutation(perm, coloring.n)
    colors = [UNCOLORED] * coloring.edge_count
    for (i, j), c in zip(edge_pairs(coloring.n), coloring.colors):
        a, b = sorted((perm[i], perm[j]))
        colors[edge_index(a, b, coloring.n)] = c
    return EdgeColoring(coloring.n, coloring.m, tuple(colors))


def delete_vertex(coloring: EdgeColoring, v: int) -> EdgeColoring:
    """Coloring of K_{n-1} left after removing vertex v, remaining vertices renumbered in order"""
    coloring.require_complete()
    if coloring.n < 2:
        raise ParameterError("cannot delete a vertex from K_1")
    if not 0 <= v < coloring.n:
        raise ParameterError(f"vertex {v} out of range for n={coloring.n}")
    colors = tuple(
        c for (i, j), c in zip(edge_pairs(coloring.n), coloring.colors)
        if i != v and j != v
    )
    return EdgeColoring(coloring.n - 1, coloring.m, colors)


def _check_permutation(perm: Sequence[int], n: int) -> None:
    if sorted(perm) != list(range(n)):
        raise ParameterError(f"not a permutation of 0..{n - 1}: {list(perm)}")


# Matrix text

_SEPARATED = re.compile(r'[&,]')


def _split_row(line: str) -> List[str]:
    if _SEPARATED.search(line):
        return [token.strip() for token in _SEPARATED.split(line)]
    if len(line.split()) > 1:
        return line.split()
    # unseparated digits, as in some printed matrices
    return list(line)


def parse_matrix(text: str, m: int = 2) -> EdgeColoring:
    """
    Parse a symmetric color matrix into a complete coloring.

    Rows may be separated by commas, '&', whitespace or nothing at all.
    The diagonal entry may be '-', empty, or left out of the row entirely.
    A trailing LaTeX row terminator '\\\\' is ignored.
    """
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if line.endswith('\\\\'):
            line = line[:-2].rstrip()
        if line:
            rows.append(_split_row(line))
    n = len(rows)
    if n == 0:
        raise MatrixParseError("matrix has no rows")

    matrix: List[List[Optional[int]]] = []
    for i, tokens in enumerate(rows):
        if len(tokens) == n - 1:
            tokens = tokens[:i] + ['-'] + tokens[i:]
        elif len(tokens) != n:
            raise MatrixParseError(f"expected {n} or {n - 1} entries, found {len(tokens)}", row=i)
        entries: List[Optional[int]] = []
        for j, token in enumerate(tokens):
            if i == j:
                if token not in ('', '-'):
                    raise MatrixParseError(f"diagonal entry must be empty or '-', found {token!r}", i, j)
                entries.append(None)
                continue
            if len(token) != 1 or token not in COLOR_DIGITS[:m]:
                raise MatrixParseError(f"entry {token!r} is not a color in 0..{m - 1}", i, j)
            entries.append(int(token))
        matrix.append(entries)

    for i, j in edge_pairs(n):
        if matrix[i][j] != matrix[j][i]:
            raise MatrixParseError(
                f"matrix is not symmetric ({matrix[i][j]} vs {matrix[j][i]} at ({j}, {i}))", i, j
            )
    return EdgeColoring(n, m, tuple(matrix[i][j] for i, j in edge_pairs(n)))


def emit_matrix(coloring: EdgeColoring) -> str:
    """n rows of n symbols, '-' on the diagonal"""
    coloring.require_complete()
    if coloring.m > MAX_MATRIX_COLORS:
        raise ParameterError(f"matrix text supports at most {MAX_MATRIX_COLORS} colors")
    n = coloring.n
    grid = [['-'] * n for _ in range(n)]
    for (i, j), c in zip(edge_pairs(n), coloring.colors):
        grid[i][j] = grid[j][i] = str(c)
    return '\n'.join(''.join(row) for row in grid)


# Compact one-line form: "n m <digits>"

def to_compact(coloring: EdgeColoring) -> str:
    if coloring.m > MAX_MATRIX_COLORS:
        raise ParameterError(f"compact form supports at most {MAX_MATRIX_COLORS} colors")
    digits = ''.join('.' if c == UNCOLORED else str(c) for c in coloring.colors)
    return f"{coloring.n} {coloring.m} {digits}".rstrip()


def from_compact(text: str) -> EdgeColoring:
    parts = text.split()
    if len(parts) not in (2, 3):
        raise ParameterError(f"compact coloring needs 'n m digits', got {text!r}")
    try:
        n, m = int(parts[0]), int(parts[1])
    except ValueError:
        raise ParameterError(f"compact coloring header is not 'n m': {text!r}")
    digits = parts[2] if len(parts) == 3 else ''
    colors = []
    for symbol in digits:
        if symbol == '.':
            colors.append(UNCOLORED)
        elif symbol in COLOR_DIGITS[:m]:
            colors.append(int(symbol))
        else:
            raise ParameterError(f"unexpected symbol {symbol!r} in compact coloring")
    return EdgeColoring(n, m, tuple(colors))
