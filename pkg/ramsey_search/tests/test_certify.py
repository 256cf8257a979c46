import os
import tempfile

from django.test import SimpleTestCase

from ramsey_search.certify import (
    CERT_HEADER, Certificate, Witness, deletion_closure_check, deletion_closure_report, is_valid_witness,
    load_fixture, read_certificate, read_coloring_source, verify_critical, write_certificate,
)
from ramsey_search.coloring import EdgeColoring, emit_matrix, monochrome_graph
from ramsey_search.exceptions import MatrixParseError, ParameterError
from ramsey_search.matrices import FIXTURES
from ramsey_search.patterns import count_wheel, parse_pattern_spec, reward

TRIANGLES = (parse_pattern_spec('K3'), parse_pattern_spec('K3'))
PENTAGON = EdgeColoring(5, 2, (0, 1, 1, 0, 0, 1, 1, 0, 1, 0))
FIXTURE_SIZES = {'W5W7': 13, 'K25K35': 19, 'B3B6': 16, 'B4B5': 17}
FIXTURE_BOUNDS = {
    'W5W7': 'R(W5,W7) >= 14',
    'K25K35': 'R(K2,5,K3,5) >= 20',
    'B3B6': 'R(B3,B6) >= 17',
    'B4B5': 'R(B4,B5) >= 18',
}


class FixtureTests(SimpleTestCase):

    def test_every_fixture_is_critical(self):
        for name in FIXTURES:
            with self.subTest(name=name):
                coloring, patterns = load_fixture(name)
                self.assertEqual(coloring.n, FIXTURE_SIZES[name])
                certificate = verify_critical(coloring, patterns)
                self.assertEqual(certificate.verdict, 'critical')
                self.assertEqual(certificate.report.per_color, (0, 0))
                self.assertIsNone(certificate.witness)
                self.assertEqual(certificate.implied_bound, FIXTURE_BOUNDS[name])

    def test_wheel_fixture_in_complement_form(self):
        coloring, _ = load_fixture('W5W7')
        graph = monochrome_graph(coloring, 1)
        self.assertEqual(count_wheel(graph, 7), 0)
        self.assertEqual(count_wheel(graph.complement(), 5), 0)

    def test_deletion_closure_of_every_fixture(self):
        verified = 0
        for name in FIXTURES:
            certificate = verify_critical(*load_fixture(name))
            results = deletion_closure_report(certificate)
            self.assertEqual([v for v, _ in results], list(range(FIXTURE_SIZES[name])))
            self.assertTrue(all(ok for _, ok in results), name)
            verified += len(results)
        self.assertEqual(verified, 65)

    def test_unknown_fixture(self):
        with self.assertRaises(ParameterError):
            load_fixture('R55')


class VerifyTests(SimpleTestCase):

    def test_pentagon_is_critical(self):
        certificate = verify_critical(PENTAGON, TRIANGLES)
        self.assertTrue(certificate.is_critical)
        self.assertEqual(certificate.lower_bound, 6)
        self.assertTrue(deletion_closure_check(certificate))

    def test_all_one_k6_has_witness(self):
        coloring = EdgeColoring(6, 2, (1,) * 15)
        certificate = verify_critical(coloring, TRIANGLES)
        self.assertEqual(certificate.verdict, 'not-critical')
        self.assertEqual(certificate.report.per_color, (0, 20))
        self.assertEqual(certificate.witness, Witness(1, (0, 1, 2)))
        self.assertTrue(is_valid_witness(coloring, TRIANGLES, certificate.witness))
        self.assertIsNone(certificate.implied_bound)

    def test_witness_checks(self):
        coloring = EdgeColoring(6, 2, (1,) * 15)
        self.assertFalse(is_valid_witness(coloring, TRIANGLES, Witness(0, (0, 1, 2))))
        self.assertFalse(is_valid_witness(coloring, TRIANGLES, Witness(2, (0, 1, 2))))
        self.assertFalse(is_valid_witness(coloring, TRIANGLES, Witness(1, (0, 1, 1))))

    def test_recount_is_independent_of_reported_reward(self):
        coloring, patterns = load_fixture('B3B6')
        self.assertEqual(verify_critical(coloring, patterns).report, reward(coloring, patterns))

    def test_witness_present_exactly_when_not_critical(self):
        with self.assertRaises(ParameterError):
            Certificate(PENTAGON, TRIANGLES, reward(PENTAGON, TRIANGLES), Witness(0, (0, 1, 2)))

    def test_partial_or_mismatched_input(self):
        with self.assertRaises(ParameterError):
            verify_critical(EdgeColoring(3, 2, (0, -1, -1)), TRIANGLES)
        with self.assertRaises(ParameterError):
            verify_critical(PENTAGON, TRIANGLES[:1])

    def test_deletion_closure_needs_critical_certificate(self):
        certificate = verify_critical(EdgeColoring(6, 2, (1,) * 15), TRIANGLES)
        with self.assertRaises(ParameterError):
            deletion_closure_check(certificate)

    def test_deletion_closure_of_k1(self):
        certificate = verify_critical(EdgeColoring(1, 2, ()), TRIANGLES)
        self.assertEqual(deletion_closure_report(certificate), [])


class CertificateFileTests(SimpleTestCase):

    def test_written_certificate_reads_back(self):
        coloring, patterns = load_fixture('B3B6')
        text = write_certificate(verify_critical(coloring, patterns))
        lines = text.splitlines()
        self.assertEqual(lines[:5], [CERT_HEADER, '16 2', 'B3 B6', 'critical', 'R(B3,B6) >= 17'])
        self.assertEqual('\n'.join(lines[5:]), emit_matrix(coloring))
        self.assertEqual(read_certificate(text), (coloring, patterns))

    def test_explicit_pattern_is_stored_inline(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'path pattern.txt')
            with open(path, 'w', encoding='utf-8') as handle:
                handle.write("-10\n1-1\n01-\n")
            patterns = (parse_pattern_spec(f'explicit:{path}'), parse_pattern_spec('K3'))
        text = write_certificate(verify_critical(PENTAGON, patterns))
        self.assertEqual(text.splitlines()[2], 'graph:3:101 K3')
        self.assertEqual(read_certificate(text), (PENTAGON, patterns))

    def test_not_critical_certificate(self):
        text = write_certificate(verify_critical(EdgeColoring(3, 2, (1, 1, 1)), TRIANGLES))
        self.assertEqual(text.splitlines()[3:5], ['not-critical', 'none'])

    def test_malformed_certificates(self):
        good = write_certificate(verify_critical(PENTAGON, TRIANGLES))
        for text in ('', 'RAMSEY-CERT v2\n' + good.split('\n', 1)[1], good.replace('5 2', 'five 2', 1),
                     good.replace('5 2', '6 2', 1), good.replace('K3 K3', 'K3', 1)):
            with self.assertRaises(MatrixParseError):
                read_certificate(text)

    def test_read_coloring_source(self):
        coloring, patterns = read_coloring_source('B4B5')
        self.assertEqual(coloring.n, 17)
        self.assertEqual([p.spec for p in patterns], ['B4', 'B5'])
        with tempfile.TemporaryDirectory() as tmp:
            bare = os.path.join(tmp, 'pentagon.txt')
            with open(bare, 'w', encoding='utf-8') as handle:
                handle.write(emit_matrix(PENTAGON))
            self.assertEqual(read_coloring_source(bare), (PENTAGON, None))
            cert = os.path.join(tmp, 'pentagon.cert')
            with open(cert, 'w', encoding='utf-8') as handle:
                handle.write(write_certificate(verify_critical(PENTAGON, TRIANGLES)))
            self.assertEqual(read_coloring_source(cert), (PENTAGON, TRIANGLES))
        with self.assertRaises(MatrixParseError):
            read_coloring_source(os.path.join(tmp, 'missing.txt'))
