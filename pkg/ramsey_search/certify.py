# ramsey_search/certify.py
"""
Independent verification of critical colorings.

Verification always recounts from the coloring itself; no reward computed
elsewhere is trusted.
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from .coloring import EdgeColoring, delete_vertex, emit_matrix, monochrome_graph, parse_matrix
from .exceptions import MatrixParseError, ParameterError
from .matrices import FIXTURES, get_cached_matrix_text
from .patterns import PatternGraph, RewardReport, find_copy, is_copy, parse_pattern_spec, reward

logger = logging.getLogger(__name__)

CERT_HEADER = 'RAMSEY-CERT v1'


@dataclass(frozen=True)
class Witness:
    """One monochromatic copy: color i and the images of pattern i's vertices"""

    color: int
    vertices: Tuple[int, ...]

    @property
    def vertex_set(self) -> Tuple[int, ...]:
        return tuple(sorted(self.vertices))


@dataclass(frozen=True)
class Certificate:
    coloring: EdgeColoring
    patterns: Tuple[PatternGraph, ...]
    report: RewardReport
    witness: Optional[Witness] = None

    def __post_init__(self):
        if self.report.is_critical == (self.witness is not None):
            raise ParameterError("a witness is present exactly when the coloring is not critical")

    @property
    def is_critical(self) -> bool:
        return self.report.is_critical

    @property
    def verdict(self) -> str:
        return 'critical' if self.is_critical else 'not-critical'

    @property
    def lower_bound(self) -> Optional[int]:
        return self.coloring.n + 1 if self.is_critical else None

    @property
    def implied_bound(self) -> Optional[str]:
        """e.g. 'R(B3,B6) >= 17'"""
        if not self.is_critical:
            return None
        return f"R({','.join(p.spec for p in self.patterns)}) >= {self.lower_bound}"


def verify_critical(coloring: EdgeColoring, patterns: Sequence[PatternGraph]) -> Certificate:
    """Recount every color class; on failure attach the first copy found"""
    coloring.require_complete()
    if len(patterns) != coloring.m:
        raise ParameterError(f"expected {coloring.m} patterns, one per color, got {len(patterns)}")
    patterns = tuple(patterns)
    report = reward(coloring, patterns)
    witness = None
    for color, count in enumerate(report.per_color):
        if count:
            images = find_copy(monochrome_graph(coloring, color), patterns[color])
            witness = Witness(color, images)
            break
    certificate = Certificate(coloring, patterns, report, witness)
    logger.info("verified K_%d against %s: %s %s", coloring.n,
                ','.join(p.spec for p in patterns), certificate.verdict, list(report.per_color))
    return certificate


def is_valid_witness(coloring: EdgeColoring, patterns: Sequence[PatternGraph], witness: Witness) -> bool:
    """Re-check a witness on its own: the vertices must carry pattern i in color i"""
    if not 0 <= witness.color < coloring.m:
        return False
    graph = monochrome_graph(coloring, witness.color)
    return is_copy(graph, patterns[witness.color], witness.vertices)


def load_fixture(name: str) -> Tuple[EdgeColoring, Tuple[PatternGraph, ...]]:
    """One of the four published critical colorings with its pattern pair"""
    if name not in FIXTURES:
        raise ParameterError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}")
    _, first, second = FIXTURES[name]
    coloring = parse_matrix(get_cached_matrix_text(name))
    return coloring, (parse_pattern_spec(first), parse_pattern_spec(second))


def deletion_closure_report(certificate: Certificate) -> List[Tuple[int, bool]]:
    """(v, critical after deleting v) for every vertex v"""
    if not certificate.is_critical:
        raise ParameterError("deletion closure only applies to critical certificates")
    coloring = certificate.coloring
    if coloring.n < 2:
        return []
    return [
        (v, verify_critical(delete_vertex(coloring, v), certificate.patterns).is_critical)
        for v in range(coloring.n)
    ]


def deletion_closure_check(certificate: Certificate) -> bool:
    return all(ok for _, ok in deletion_closure_report(certificate))


# Certificate files

def write_certificate(certificate: Certificate) -> str:
    coloring = certificate.coloring
    lines = [
        CERT_HEADER,
        f"{coloring.n} {coloring.m}",
        ' '.join(p.spec for p in certificate.patterns),
        certificate.verdict,
        certificate.implied_bound or 'none',
        emit_matrix(coloring),
    ]
    return '\n'.join(lines) + '\n'


def read_certificate(text: str) -> Tuple[EdgeColoring, Tuple[PatternGraph, ...]]:
    """Coloring and patterns of a certificate file; its stated verdict is not trusted"""
    lines = text.splitlines()
    if len(lines) < 5 or lines[0].strip() != CERT_HEADER:
        raise MatrixParseError(f"certificate must start with {CERT_HEADER!r} and five header lines")
    try:
        n, m = (int(part) for part in lines[1].split())
    except ValueError:
        raise MatrixParseError(f"certificate size line must be 'n m', got {lines[1]!r}")
    patterns = tuple(parse_pattern_spec(spec) for spec in lines[2].split())
    coloring = parse_matrix('\n'.join(lines[5:]), m=m)
    if coloring.n != n:
        raise MatrixParseError(f"certificate declares n={n} but its matrix has {coloring.n} rows")
    if len(patterns) != m:
        raise MatrixParseError(f"certificate declares m={m} but lists {len(patterns)} patterns")
    return coloring, patterns


def read_coloring_source(source: str, m: int = 2) -> Tuple[EdgeColoring, Optional[Tuple[PatternGraph, ...]]]:
    """A fixture name, a certificate file or a bare matrix file; m applies to bare matrices"""
    if source in FIXTURES:
        return load_fixture(source)
    try:
        text = Path(source).read_text(encoding='utf-8')
    except OSError as e:
        raise MatrixParseError(f"cannot read {source!r}: {e}")
    if text.lstrip().startswith(CERT_HEADER):
        return read_certificate(text.lstrip())
    return parse_matrix(text, m=m), None
