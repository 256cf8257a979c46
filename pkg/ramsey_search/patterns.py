# ramsey_search/patterns.py
"""
Exact counting of non-induced copies of forbidden patterns, and the reward
of a complete coloring.

A copy is a subgraph of the host isomorphic to the pattern (vertex set plus
edge set); extra host edges among its vertices are allowed. Each copy is
counted once.

Witness enumeration order per family (find_copy returns the first):
  Book       base edges (u, v) lexicographically, pages = smallest common neighbours
  Wheel      hubs ascending, then cycles by smallest vertex, then DFS in vertex order
  Bipartite  smaller side lexicographically, larger side = smallest common neighbours
  Clique     lexicographic vertex sets
  Explicit   injective maps in the embedding plan order, images ascending
"""
import enum
import logging
import math
import re
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterator, List, Optional, Sequence, Tuple

from .coloring import EdgeColoring, SimpleGraph, edge_pairs, iter_bits, monochrome_graph, parse_matrix
from .exceptions import CountRangeError, MatrixParseError, ParameterError, PatternSpecError

logger = logging.getLogger(__name__)

INT64_MAX = 2 ** 63 - 1
MAX_EXPLICIT_VERTICES = 10


class PatternKind(enum.Enum):
    BOOK = 'book'
    WHEEL = 'wheel'
    COMPLETE_BIPARTITE = 'complete_bipartite'
    CLIQUE = 'clique'
    EXPLICIT = 'explicit'


@dataclass(frozen=True)
class PatternGraph:
    """Forbidden target graph for one color"""

    kind: PatternKind
    params: Tuple[int, ...] = ()
    explicit: Optional[SimpleGraph] = None

    @classmethod
    def book(cls, pages: int) -> 'PatternGraph':
        if pages < 2:
            raise PatternSpecError(f"book needs at least 2 pages, got {pages}")
        return cls(PatternKind.BOOK, (pages,))

    @classmethod
    def wheel(cls, order: int) -> 'PatternGraph':
        if order < 5:
            raise PatternSpecError(f"wheel order must be at least 5 (W4 is the clique K4), got {order}")
        return cls(PatternKind.WHEEL, (order,))

    @classmethod
    def complete_bipartite(cls, s: int, t: int) -> 'PatternGraph':
        s, t = min(s, t), max(s, t)
        if s < 1:
            raise PatternSpecError(f"bipartite parts must be non-empty, got K{s},{t}")
        if s == t:
            raise PatternSpecError(f"equal parts K{s},{t} are not supported")
        return cls(PatternKind.COMPLETE_BIPARTITE, (s, t))

    @classmethod
    def clique(cls, k: int) -> 'PatternGraph':
        if k < 3:
            raise PatternSpecError(f"clique order must be at least 3, got {k}")
        return cls(PatternKind.CLIQUE, (k,))

    @classmethod
    def from_graph(cls, graph: SimpleGraph) -> 'PatternGraph':
        if not 2 <= graph.n <= MAX_EXPLICIT_VERTICES:
            raise PatternSpecError(
                f"explicit pattern needs 2..{MAX_EXPLICIT_VERTICES} vertices, got {graph.n}"
            )
        if not graph.is_connected():
            raise PatternSpecError("explicit pattern must be connected")
        return cls(PatternKind.EXPLICIT, (), graph)

    @property
    def spec(self) -> str:
        """Mini-language form, e.g. 'B3', 'W5', 'K2,5', 'K3' or 'graph:3:110'"""
        if self.kind is PatternKind.BOOK:
            return f"B{self.params[0]}"
        if self.kind is PatternKind.WHEEL:
            return f"W{self.params[0]}"
        if self.kind is PatternKind.COMPLETE_BIPARTITE:
            return f"K{self.params[0]},{self.params[1]}"
        if self.kind is PatternKind.CLIQUE:
            return f"K{self.params[0]}"
        bits = ''.join('1' if self.explicit.has_edge(i, j) else '0' for i, j in edge_pairs(self.explicit.n))
        return f"graph:{self.explicit.n}:{bits}"

    def __str__(self):
        return self.spec

    @cached_property
    def graph(self) -> SimpleGraph:
        """The pattern itself, labelled in witness order"""
        if self.kind is PatternKind.BOOK:
            pages = self.params[0]
            edges = [(0, 1)] + [(base, page) for page in range(2, pages + 2) for base in (0, 1)]
            return SimpleGraph.from_edges(pages + 2, edges)
        if self.kind is PatternKind.WHEEL:
            order = self.params[0]
            rim = order - 1
            edges = [(0, v) for v in range(1, order)]
            edges += [(v, v % rim + 1) for v in range(1, order)]
            return SimpleGraph.from_edges(order, edges)
        if self.kind is PatternKind.COMPLETE_BIPARTITE:
            s, t = self.params
            return SimpleGraph.from_edges(s + t, [(a, b) for a in range(s) for b in range(s, s + t)])
        if self.kind is PatternKind.CLIQUE:
            return SimpleGraph.complete(self.params[0])
        return self.explicit

    @property
    def vertex_count(self) -> int:
        return self.graph.n

    @property
    def edge_count(self) -> int:
        return self.graph.edge_count

    @cached_property
    def automorphism_count(self) -> int:
        return _count_embeddings(self.graph, self.graph)


@dataclass(frozen=True)
class RewardReport:
    """Copies of pattern i in the color-i graph, per color"""

    per_color: Tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.per_color)

    @property
    def is_critical(self) -> bool:
        return self.total == 0


_INLINE_GRAPH = re.compile(r'^graph:(\d+):([01]*)$', re.ASCII)
_SPEC_FORMS = (
    (re.compile(r'^B(\d+)$'), lambda a: PatternGraph.book(int(a[0]))),
    (re.compile(r'^W(\d+)$'), lambda a: PatternGraph.wheel(int(a[0]))),
    (re.compile(r'^K(\d+),(\d+)$'), lambda a: PatternGraph.complete_bipartite(int(a[0]), int(a[1]))),
    (re.compile(r'^K(\d+)$'), lambda a: PatternGraph.clique(int(a[0]))),
)


def parse_pattern_spec(text: str) -> PatternGraph:
    """
    Parse the pattern mini-language: 'B3', 'W7', 'K2,5', 'K3' or
    'explicit:<path>' where the file holds a 0/1 adjacency matrix.
    Explicit patterns are written back inline as 'graph:<n>:<edge bits>',
    one bit per vertex pair in edge order.
    """
    spec = text.strip()
    if spec.startswith('explicit:'):
        path = spec[len('explicit:'):]
        try:
            matrix_text = Path(path).read_text(encoding='utf-8')
        except OSError as e:
            raise PatternSpecError(f"cannot read explicit pattern {path!r}: {e}")
        try:
            graph = monochrome_graph(parse_matrix(matrix_text), 1)
        except MatrixParseError as e:
            raise PatternSpecError(f"explicit pattern {path!r}: {e}")
        return PatternGraph.from_graph(graph)
    match = _INLINE_GRAPH.match(spec)
    if match:
        n, bits = int(match.group(1)), match.group(2)
        if len(bits) != n * (n - 1) // 2:
            raise PatternSpecError(f"{spec!r}: {n} vertices need {n * (n - 1) // 2} edge bits, got {len(bits)}")
        edges = [pair for pair, bit in zip(edge_pairs(n), bits) if bit == '1']
        return PatternGraph.from_graph(SimpleGraph.from_edges(n, edges))
    compact = re.sub(r'\s+', '', spec)
    for form, build in _SPEC_FORMS:
        match = form.match(compact)
        if match:
            return build(match.groups())
    raise PatternSpecError(f"unknown pattern spec {text!r}")


# Arithmetic

def _binomial(n: int, k: int) -> int:
    value = math.comb(n, k)
    if value > INT64_MAX:
        raise CountRangeError(f"C({n}, {k}) exceeds the 64-bit range")
    return value


def _in_range(total: int) -> int:
    if total > INT64_MAX:
        raise CountRangeError(f"copy count {total} exceeds the 64-bit range")
    return total


def _above(v: int) -> int:
    """Mask of all vertices greater than v"""
    return -1 << (v + 1)


def _lowest(mask: int, count: int) -> Tuple[int, ...]:
    chosen = []
    for v in iter_bits(mask):
        if len(chosen) == count:
            break
        chosen.append(v)
    return tuple(chosen)


# Books

def count_book(graph: SimpleGraph, pages: int) -> int:
    """Copies of B_p: an edge uv with p common neighbours chosen among N(u) & N(v)"""
    if pages < 2:
        raise ParameterError(f"book needs at least 2 pages, got {pages}")
    total = 0
    for u, v in graph.edges():
        common = (graph.rows[u] & graph.rows[v]).bit_count()
        if common >= pages:
            total += _binomial(common, pages)
    return _in_range(total)


def _find_book(graph: SimpleGraph, pages: int) -> Optional[Tuple[int, ...]]:
    for u, v in graph.edges():
        common = graph.rows[u] & graph.rows[v]
        if common.bit_count() >= pages:
            return (u, v) + _lowest(common, pages)
    return None


# Wheels

def _cycles_within(graph: SimpleGraph, within: int, length: int) -> Iterator[Tuple[int, ...]]:
    """Cycles of the given length on vertices of `within`, each yielded once"""
    path: List[int] = []

    def extend(last: int, visited: int, allowed: int) -> Iterator[Tuple[int, ...]]:
        if len(path) == length:
            # one of the two traversal directions
            if graph.rows[last] >> path[0] & 1 and path[1] < path[-1]:
                yield tuple(path)
            return
        for v in iter_bits(graph.rows[last] & allowed & ~visited):
            path.append(v)
            yield from extend(v, visited | (1 << v), allowed)
            path.pop()

    for start in iter_bits(within):
        allowed = within & _above(start)
        if allowed.bit_count() < length - 1:
            break
        path.append(start)
        yield from extend(start, 1 << start, allowed)
        path.pop()


def count_wheel(graph: SimpleGraph, order: int) -> int:
    """Copies of W_w: a hub h plus a (w-1)-cycle inside N(h)"""
    if order < 5:
        raise ParameterError(f"W{order} has no unique hub; count it as a clique")
    rim = order - 1
    total = 0
    for hub in range(graph.n):
        neighborhood = graph.rows[hub]
        if neighborhood.bit_count() >= rim:
            total += sum(1 for _ in _cycles_within(graph, neighborhood, rim))
    return _in_range(total)


def _find_wheel(graph: SimpleGraph, order: int) -> Optional[Tuple[int, ...]]:
    rim = order - 1
    for hub in range(graph.n):
        neighborhood = graph.rows[hub]
        if neighborhood.bit_count() >= rim:
            cycle = next(_cycles_within(graph, neighborhood, rim), None)
            if cycle is not None:
                return (hub,) + cycle
    return None


# Complete bipartite graphs

def _small_sides(graph: SimpleGraph, s: int, t: int) -> Iterator[Tuple[Tuple[int, ...], int]]:
    """s-subsets in lexicographic order whose common neighbourhood has at least t vertices"""
    chosen: List[int] = []

    def extend(start: int, common: int) -> Iterator[Tuple[Tuple[int, ...], int]]:
        if len(chosen) == s:
            yield tuple(chosen), common
            return
        for v in range(start, graph.n):
            narrowed = common & graph.rows[v]
            if narrowed.bit_count() < t:
                continue
            chosen.append(v)
            yield from extend(v + 1, narrowed)
            chosen.pop()

    yield from extend(0, (1 << graph.n) - 1)


def count_complete_bipartite(graph: SimpleGraph, s: int, t: int) -> int:
    """Copies of K_{s,t}, s != t: sum over s-sets S of C(|common neighbourhood of S|, t)"""
    s, t = min(s, t), max(s, t)
    if s < 1:
        raise ParameterError(f"bipartite parts must be non-empty, got K{s},{t}")
    if s == t:
        raise ParameterError(f"K{s},{t} with equal parts is not supported")
    total = 0
    for _, common in _small_sides(graph, s, t):
        total += _binomial(common.bit_count(), t)
    return _in_range(total)


def _find_complete_bipartite(graph: SimpleGraph, s: int, t: int) -> Optional[Tuple[int, ...]]:
    for side, common in _small_sides(graph, s, t):
        return side + _lowest(common, t)
    return None


# Cliques

def _count_cliques(graph: SimpleGraph, candidates: int, need: int) -> int:
    if need == 1:
        return candidates.bit_count()
    total = 0
    for v in iter_bits(candidates):
        rest = candidates & graph.rows[v] & _above(v)
        if rest.bit_count() >= need - 1:
            total += _count_cliques(graph, rest, need - 1)
    return total


def count_clique(graph: SimpleGraph, k: int) -> int:
    """k-subsets spanning all C(k, 2) edges, by bitset-intersection backtracking"""
    if k < 3:
        raise ParameterError(f"clique order must be at least 3, got {k}")
    return _in_range(_count_cliques(graph, (1 << graph.n) - 1, k))


def _find_clique(graph: SimpleGraph, k: int) -> Optional[Tuple[int, ...]]:
    chosen: List[int] = []

    def extend(candidates: int) -> bool:
        if len(chosen) == k:
            return True
        for v in iter_bits(candidates):
            rest = candidates & graph.rows[v] & _above(v)
            if rest.bit_count() >= k - len(chosen) - 1:
                chosen.append(v)
                if extend(rest):
                    return True
                chosen.pop()
        return False

    return tuple(chosen) if extend((1 << graph.n) - 1) else None


# Arbitrary connected patterns

def _embedding_plan(pattern: SimpleGraph) -> Tuple[List[int], List[List[int]]]:
    """
    Pattern vertices in placement order and, for each position, the earlier
    positions it must be adjacent to. Every vertex after the first has a placed
    neighbour because the pattern is connected.
    """
    order = [max(range(pattern.n), key=lambda v: (pattern.degree(v), -v))]
    while len(order) < pattern.n:
        placed = set(order)
        best = max(
            (v for v in range(pattern.n) if v not in placed),
            key=lambda v: (sum(pattern.has_edge(v, u) for u in order), pattern.degree(v), -v),
        )
        order.append(best)
    back = [[k for k in range(depth) if pattern.has_edge(order[depth], order[k])]
            for depth in range(len(order))]
    return order, back


def _count_embeddings(pattern: SimpleGraph, host: SimpleGraph) -> int:
    """Injective maps pattern -> host that send edges to edges"""
    if pattern.n > host.n:
        return 0
    order, back = _embedding_plan(pattern)
    needed = [pattern.degree(v) for v in order]
    host_degree = [host.degree(v) for v in range(host.n)]
    images = [0] * len(order)
    last = len(order) - 1
    full = (1 << host.n) - 1

    def extend(depth: int, used: int) -> int:
        candidates = full & ~used
        for k in back[depth]:
            candidates &= host.rows[images[k]]
        if depth == last:
            return sum(1 for v in iter_bits(candidates) if host_degree[v] >= needed[depth])
        total = 0
        for v in iter_bits(candidates):
            if host_degree[v] >= needed[depth]:
                images[depth] = v
                total += extend(depth + 1, used | (1 << v))
        return total

    return extend(0, 0)


def _find_embedding(pattern: SimpleGraph, host: SimpleGraph) -> Optional[Tuple[int, ...]]:
    if pattern.n > host.n:
        return None
    order, back = _embedding_plan(pattern)
    images = [0] * len(order)
    full = (1 << host.n) - 1

    def extend(depth: int, used: int) -> bool:
        if depth == len(order):
            return True
        candidates = full & ~used
        for k in back[depth]:
            candidates &= host.rows[images[k]]
        for v in iter_bits(candidates):
            if host.degree(v) >= pattern.degree(order[depth]):
                images[depth] = v
                if extend(depth + 1, used | (1 << v)):
                    return True
        return False

    if not extend(0, 0):
        return None
    mapping = [0] * pattern.n
    for depth, v in enumerate(order):
        mapping[v] = images[depth]
    return tuple(mapping)


def _check_generic_pattern(pattern: SimpleGraph) -> None:
    if pattern.n > MAX_EXPLICIT_VERTICES:
        raise ParameterError(f"pattern has {pattern.n} vertices, at most {MAX_EXPLICIT_VERTICES} supported")
    if not pattern.is_connected():
        raise ParameterError("pattern must be connected")


def count_generic(graph: SimpleGraph, pattern: SimpleGraph) -> int:
    """Non-induced copies of any small connected pattern: embeddings / automorphisms"""
    _check_generic_pattern(pattern)
    embeddings = _count_embeddings(pattern, graph)
    if not embeddings:
        return 0
    return _in_range(embeddings // _count_embeddings(pattern, pattern))


# Dispatch

def count_copies(graph: SimpleGraph, pattern: PatternGraph) -> int:
    if pattern.kind is PatternKind.BOOK:
        return count_book(graph, pattern.params[0])
    if pattern.kind is PatternKind.WHEEL:
        return count_wheel(graph, pattern.params[0])
    if pattern.kind is PatternKind.COMPLETE_BIPARTITE:
        return count_complete_bipartite(graph, *pattern.params)
    if pattern.kind is PatternKind.CLIQUE:
        return count_clique(graph, pattern.params[0])
    embeddings = _count_embeddings(pattern.graph, graph)
    return _in_range(embeddings // pattern.automorphism_count) if embeddings else 0


def find_copy(graph: SimpleGraph, pattern: PatternGraph) -> Optional[Tuple[int, ...]]:
    """
    First copy in the family's enumeration order, as the host images of the
    pattern's vertices 0..k-1 (see PatternGraph.graph), or None.
    """
    if graph.n < pattern.vertex_count:
        return None
    if pattern.kind is PatternKind.BOOK:
        return _find_book(graph, pattern.params[0])
    if pattern.kind is PatternKind.WHEEL:
        return _find_wheel(graph, pattern.params[0])
    if pattern.kind is PatternKind.COMPLETE_BIPARTITE:
        return _find_complete_bipartite(graph, *pattern.params)
    if pattern.kind is PatternKind.CLIQUE:
        return _find_clique(graph, pattern.params[0])
    return _find_embedding(pattern.graph, graph)


def contains_copy(graph: SimpleGraph, pattern: PatternGraph) -> bool:
    return find_copy(graph, pattern) is not None


def is_copy(graph: SimpleGraph, pattern: PatternGraph, images: Sequence[int]) -> bool:
    """True when images are distinct host vertices carrying every pattern edge"""
    if len(images) != pattern.vertex_count or len(set(images)) != len(images):
        return False
    if any(not 0 <= v < graph.n for v in images):
        return False
    return all(graph.has_edge(images[a], images[b]) for a, b in pattern.graph.edges())


def reward(coloring: EdgeColoring, patterns: Sequence[PatternGraph]) -> RewardReport:
    """Copies of patterns[i] in the color-i graph; the search minimises the total"""
    coloring.require_complete()
    if len(patterns) != coloring.m:
        raise ParameterError(f"expected {coloring.m} patterns, one per color, got {len(patterns)}")
    return RewardReport(tuple(
        count_copies(monochrome_graph(coloring, color), pattern)
        for color, pattern in enumerate(patterns)
    ))
