import numpy as np
from django.test import SimpleTestCase

from ramsey_search.certify import load_fixture
from ramsey_search.coloring import (
    UNCOLORED, EdgeColoring, SimpleGraph, coloring_from_graph, delete_vertex, edge_count, edge_index,
    edge_pairs, emit_matrix, from_compact, monochrome_graph, new_coloring, parse_matrix, permute_coloring,
    to_compact,
)
from ramsey_search.exceptions import MatrixParseError, ParameterError


def random_coloring(rng, n, m=2):
    return EdgeColoring(n, m, tuple(int(c) for c in rng.integers(0, m, size=edge_count(n))))


class EdgeOrderTests(SimpleTestCase):

    def test_edge_index_examples(self):
        self.assertEqual(edge_index(0, 1, 5), 0)
        self.assertEqual(edge_index(0, 4, 5), 3)
        self.assertEqual(edge_index(3, 4, 5), 9)

    def test_edge_index_is_lexicographic_bijection(self):
        for n in range(2, 9):
            self.assertEqual([edge_index(i, j, n) for i, j in edge_pairs(n)], list(range(edge_count(n))))

    def test_edge_index_rejects_bad_pairs(self):
        for i, j in ((1, 1), (2, 1), (0, 5)):
            with self.assertRaises(ParameterError):
                edge_index(i, j, 5)


class EdgeColoringTests(SimpleTestCase):

    def test_new_coloring(self):
        self.assertEqual(new_coloring(3, 2).colors, (UNCOLORED,) * 3)
        self.assertEqual(len(new_coloring(13, 2).colors), 78)
        single = new_coloring(1, 2)
        self.assertEqual(single.colors, ())
        self.assertTrue(single.is_complete)

    def test_new_coloring_rejects_bad_sizes(self):
        with self.assertRaises(ParameterError):
            new_coloring(0, 2)
        with self.assertRaises(ParameterError):
            new_coloring(3, 1)

    def test_partial_colorings_are_prefixes(self):
        coloring = new_coloring(4, 3).with_next_color(2).with_next_color(0)
        self.assertEqual(coloring.colored_count, 2)
        self.assertFalse(coloring.is_complete)
        with self.assertRaises(ParameterError):
            EdgeColoring(3, 2, (UNCOLORED, 1, UNCOLORED))

    def test_colors_must_be_in_range(self):
        with self.assertRaises(ParameterError):
            EdgeColoring(3, 2, (0, 2, 1))

    def test_color_lookup_is_symmetric(self):
        coloring = EdgeColoring(3, 2, (0, 1, 1))
        self.assertEqual(coloring.color(0, 2), 1)
        self.assertEqual(coloring.color(2, 0), 1)


class MonochromeGraphTests(SimpleTestCase):

    def test_all_zero_coloring(self):
        coloring = EdgeColoring(4, 2, (0,) * 6)
        self.assertEqual(monochrome_graph(coloring, 0), SimpleGraph.complete(4))
        self.assertEqual(monochrome_graph(coloring, 1), SimpleGraph.empty(4))

    def test_rejects_partial_coloring(self):
        with self.assertRaises(ParameterError):
            monochrome_graph(new_coloring(4, 2), 0)

    def test_color_classes_partition_the_edges(self):
        rng = np.random.default_rng(3)
        for n in range(2, 10):
            coloring = random_coloring(rng, n, m=3)
            graphs = [monochrome_graph(coloring, color) for color in range(3)]
            self.assertEqual(sum(g.edge_count for g in graphs), edge_count(n))
            self.assertEqual(graphs[0].rows[0] & graphs[1].rows[0], 0)

    def test_two_colors_are_complements(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            coloring = random_coloring(rng, 8)
            self.assertEqual(monochrome_graph(coloring, 1), monochrome_graph(coloring, 0).complement())

    def test_fixture_color_one_matches_printed_matrix(self):
        coloring, _ = load_fixture('W5W7')
        graph = monochrome_graph(coloring, 1)
        rows = emit_matrix(coloring).splitlines()
        for i in range(coloring.n):
            for j in range(coloring.n):
                if i != j:
                    self.assertEqual(graph.has_edge(i, j), rows[i][j] == '1')

    def test_relabeling_commutes(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            n = int(rng.integers(2, 10))
            coloring = random_coloring(rng, n)
            perm = [int(v) for v in rng.permutation(n)]
            for color in range(2):
                self.assertEqual(
                    monochrome_graph(permute_coloring(coloring, perm), color),
                    monochrome_graph(coloring, color).relabel(perm),
                )


class MatrixTextTests(SimpleTestCase):

    def test_fixture_parses(self):
        coloring, _ = load_fixture('W5W7')
        self.assertEqual((coloring.n, coloring.m), (13, 2))
        self.assertTrue(coloring.is_complete)

    def test_two_by_two(self):
        coloring = parse_matrix("- 1\n1 -")
        self.assertEqual(coloring.colors, (1,))

    def test_separators_and_missing_diagonal(self):
        expected = EdgeColoring(3, 2, (1, 0, 1))
        self.assertEqual(parse_matrix("-,1,0\n1,-,1\n0,1,-"), expected)
        self.assertEqual(parse_matrix(" &1&0\\\\\n1& &1\\\\\n0&1& \\\\"), expected)
        self.assertEqual(parse_matrix("10\n11\n01"), expected)
        self.assertEqual(parse_matrix("-10\n1-1\n01-"), expected)

    def test_asymmetric_matrix_names_the_entry(self):
        with self.assertRaises(MatrixParseError) as ctx:
            parse_matrix("-00\n0-0\n01-")
        self.assertEqual((ctx.exception.row, ctx.exception.column), (1, 2))
        self.assertIn("row 1, column 2", str(ctx.exception))

    def test_bad_entries(self):
        for text in ("-2\n2-", "-10\n1-\n01-", "x1\n1-", "", "-²\n²-", "-١\n١-"):
            with self.subTest(text=text):
                with self.assertRaises(MatrixParseError):
                    parse_matrix(text)

    def test_non_ascii_digit_names_its_position(self):
        with self.assertRaises(MatrixParseError) as ctx:
            parse_matrix("-²\n²-")
        self.assertEqual((ctx.exception.row, ctx.exception.column), (0, 1))

    def test_multi_color_matrix(self):
        coloring = parse_matrix("-21\n2-0\n10-", m=3)
        self.assertEqual(coloring.colors, (2, 1, 0))
        with self.assertRaises(MatrixParseError):
            parse_matrix("-21\n2-0\n10-")

    def test_emit(self):
        self.assertEqual(emit_matrix(EdgeColoring(2, 2, (0,))), "-0\n0-")
        coloring, _ = load_fixture('B3B6')
        rows = emit_matrix(coloring).splitlines()
        self.assertEqual(len(rows), 16)
        self.assertTrue(all(row[i] == '-' and len(row) == 16 for i, row in enumerate(rows)))

    def test_emit_rejects_partial(self):
        with self.assertRaises(ParameterError):
            emit_matrix(new_coloring(3, 2))

    def test_parse_emit_round_trip(self):
        rng = np.random.default_rng(17)
        for _ in range(100):
            coloring = random_coloring(rng, int(rng.integers(1, 14)))
            self.assertEqual(parse_matrix(emit_matrix(coloring)), coloring)

    def test_compact_form(self):
        partial = new_coloring(3, 2).with_next_color(1)
        self.assertEqual(to_compact(partial), "3 2 1..")
        self.assertEqual(from_compact("3 2 1.."), partial)
        self.assertEqual(from_compact(to_compact(new_coloring(1, 2))), new_coloring(1, 2))
        for text in ("3 2 1x.", "3 2 1١.", "3 2 1².", "3 2 12."):
            with self.subTest(text=text):
                with self.assertRaises(ParameterError):
                    from_compact(text)


class DeleteVertexTests(SimpleTestCase):

    def test_all_zero(self):
        coloring = EdgeColoring(4, 2, (0,) * 6)
        for v in range(4):
            self.assertEqual(delete_vertex(coloring, v), EdgeColoring(3, 2, (0,) * 3))

    def test_fixture_vertex_zero_gives_bottom_right_submatrix(self):
        coloring, _ = load_fixture('W5W7')
        rows = emit_matrix(coloring).splitlines()
        expected = '\n'.join(row[1:] for row in rows[1:])
        self.assertEqual(emit_matrix(delete_vertex(coloring, 0)), expected)

    def test_k2_to_k1(self):
        deleted = delete_vertex(EdgeColoring(2, 2, (1,)), 1)
        self.assertEqual((deleted.n, deleted.colors), (1, ()))

    def test_out_of_range(self):
        with self.assertRaises(ParameterError):
            delete_vertex(EdgeColoring(3, 2, (0, 0, 0)), 3)

    def test_commutes_with_monochrome_graph(self):
        rng = np.random.default_rng(23)
        for _ in range(20):
            n = int(rng.integers(2, 10))
            coloring = random_coloring(rng, n)
            v = int(rng.integers(0, n))
            for color in range(2):
                self.assertEqual(
                    monochrome_graph(delete_vertex(coloring, v), color),
                    monochrome_graph(coloring, color).delete_vertex(v),
                )


class SimpleGraphTests(SimpleTestCase):

    def test_from_edges_and_networkx(self):
        graph = SimpleGraph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
        self.assertEqual(graph.edge_count, 3)
        self.assertTrue(graph.is_connected())
        self.assertEqual(SimpleGraph.from_networkx(graph.to_networkx()), graph)
        self.assertFalse(SimpleGraph.from_edges(4, [(0, 1)]).is_connected())

    def test_with_edge(self):
        graph = SimpleGraph.empty(3).with_edge(2, 0)
        self.assertTrue(graph.has_edge(0, 2))
        self.assertEqual(graph.degree(1), 0)

    def test_coloring_from_graph(self):
        graph = SimpleGraph.from_edges(4, [(0, 3), (1, 2)])
        self.assertEqual(monochrome_graph(coloring_from_graph(graph), 1), graph)
