
import unittest
import pathlib
import random
from fractions import Fraction

import congestcut
congestcut.init(verbosity='WARNING')

from congestcut.base.graph import (
    Graph, Cut, GraphFamilySpec, load_edge_list, read_edge_list, generate,
    conductance, balance, diameter, GraphError, EdgeListParseError,
    DisconnectedGraphError, InvalidCutError)


DATA = pathlib.Path(__file__).parent / 'data'


class EdgeListTestCase(unittest.TestCase):
    def test_triangle(self):
        g = load_edge_list('0 1\n1 2\n2 0')
        self.assertEqual(g.n, 3)
        self.assertEqual(g.m, 3)
        self.assertEqual(g.degrees, (2, 2, 2))

    def test_self_loop(self):
        with self.assertRaises(EdgeListParseError) as cm:
            load_edge_list('0 1\n1 1')
        self.assertEqual(cm.exception.lineno, 2)

    def test_disconnected(self):
        with self.assertRaises(DisconnectedGraphError):
            load_edge_list('0 1\n2 3')

    def test_malformed(self):
        for text in ('0 1 2', '0 x', '0 -1', '0'):
            with self.subTest(text=text):
                self.assertRaises(EdgeListParseError, load_edge_list, text)

    def test_empty(self):
        self.assertRaises(GraphError, load_edge_list, '# nothing\n\n')

    def test_compaction(self):
        g = load_edge_list('# ids\n10 7\n7 42\n\n42 10\n')
        self.assertEqual(g.labels, (10, 7, 42))
        self.assertEqual(g.adjacency, ((1, 2), (0, 2), (0, 1)))
        self.assertEqual(g.external_id(2), 42)

    def test_duplicates(self):
        with self.assertLogs('congestcut.base.graph', 'WARNING'):
            g = load_edge_list('0 1\n1 0\n1 2\n0 1')
        self.assertEqual(g.duplicates, 2)
        self.assertEqual(g.m, 2)

    def test_files(self):
        g = read_edge_list(DATA / 'b7.edges')
        self.assertEqual(g, generate(GraphFamilySpec('barbell', 7)))
        g = read_edge_list(DATA / 'c4.edges')
        self.assertEqual(g, generate(GraphFamilySpec('cycle', 4)))

    def test_writer(self):
        g = generate(GraphFamilySpec('barbell', 7))
        text = g.to_edge_list()
        self.assertEqual(len(text.splitlines()), 8)
        self.assertEqual(load_edge_list(text), g)


class GraphTestCase(unittest.TestCase):
    def test_invariants(self):
        with self.assertRaises(GraphError):
            Graph([[1], []])  # asymmetric
        with self.assertRaises(GraphError):
            Graph([[0, 1], [0]])  # self-loop
        with self.assertRaises(GraphError):
            Graph([[]])

    def test_ports(self):
        g = generate(GraphFamilySpec('barbell', 7))
        self.assertEqual(g.neighbors(2), (0, 1, 3))
        self.assertEqual(g.port(2, 3), 2)
        self.assertRaises(GraphError, g.port, 2, 5)

    def test_networkx(self):
        g = generate(GraphFamilySpec('random-connected', 12, 0.3, 4))
        self.assertEqual(Graph.from_networkx(g.to_networkx()), g)
        self.assertEqual(sum(g.degrees), 2 * g.m)
        self.assertEqual(len(list(g.edges())), g.m)


class FamiliesTestCase(unittest.TestCase):
    def test_barbell(self):
        g = generate(GraphFamilySpec('barbell', 7))
        self.assertEqual(g.m, 8)
        self.assertEqual(g.degrees, (2, 2, 3, 2, 3, 2, 2))
        self.assertEqual(g.neighbors(3), (2, 4))
        self.assertRaises(GraphError, generate, GraphFamilySpec('barbell', 8))
        self.assertRaises(GraphError, generate, GraphFamilySpec('barbell', 5))

    def test_cycle_complete(self):
        g = generate(GraphFamilySpec('cycle', 4))
        self.assertEqual((g.m, g.degrees), (4, (2, 2, 2, 2)))
        g = generate(GraphFamilySpec('complete', 4))
        self.assertEqual((g.m, g.degrees), (6, (3, 3, 3, 3)))

    def test_path_star(self):
        g = generate(GraphFamilySpec('path', 3))
        self.assertEqual(g.adjacency, ((1,), (0, 2), (1,)))
        g = generate(GraphFamilySpec('star', 5))
        self.assertEqual(g.degrees, (4, 1, 1, 1, 1))

    def test_random_connected(self):
        for seed in range(10):
            spec = GraphFamilySpec('random-connected', 16, 0.1, seed)
            with self.subTest(seed=seed):
                # Connectivity is validated by the constructor.
                self.assertEqual(generate(spec), generate(spec))

    def test_unknown(self):
        self.assertRaises(GraphError, generate, GraphFamilySpec('grid', 9))


class CutTestCase(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.c4 = generate(GraphFamilySpec('cycle', 4))
        cls.k4 = generate(GraphFamilySpec('complete', 4))
        cls.b7 = generate(GraphFamilySpec('barbell', 7))

    def test_conductance(self):
        self.assertEqual(conductance(self.c4, {0, 1}), Fraction(1, 2))
        self.assertEqual(conductance(self.b7, {0, 1, 2}), Fraction(1, 7))
        self.assertEqual(conductance(self.b7, {0, 1, 2}, exact=False), 1 / 7)
        self.assertEqual(conductance(self.k4, {0, 1}), Fraction(2, 3))

    def test_singletons(self):
        for g in (self.c4, self.k4, self.b7):
            total = sum(conductance(g, {i}) for i in range(g.n))
            self.assertEqual(total, g.n)

    def test_balance(self):
        self.assertEqual(balance(self.b7, {0, 1, 2}), Fraction(3, 7))
        self.assertEqual(balance(self.c4, {0, 1}), Fraction(1, 2))
        self.assertEqual(balance(self.c4, {0}), Fraction(1, 4))

    def test_improper(self):
        for members in (set(), set(range(4)), {7}):
            with self.subTest(members=members):
                self.assertRaises(
                    InvalidCutError, conductance, self.c4, members)
                self.assertRaises(InvalidCutError, balance, self.c4, members)

    def test_cut_helpers(self):
        c = Cut.from_members(self.b7, {0, 1, 2})
        self.assertEqual((c.crossing, c.volume), (1, 7))
        d = c.complement(self.b7)
        self.assertEqual(d.sorted(), (3, 4, 5, 6))
        self.assertEqual(c.volume + d.volume, 2 * self.b7.m)
        self.assertTrue(d.verify(self.b7))
        self.assertIn(2, c)
        self.assertEqual(list(c), [0, 1, 2])
        bad = Cut({0, 1, 2}, 2, 7)
        self.assertRaises(InvalidCutError, bad.verify, self.b7)

    def test_symmetry(self):
        rng = random.Random(7)
        for seed in range(20):
            g = generate(GraphFamilySpec('random-connected', 12, 0.3, seed))
            for _ in range(100):
                size = rng.randint(1, g.n - 1)
                members = set(rng.sample(range(g.n), size))
                c = Cut.from_members(g, members)
                self.assertEqual(
                    conductance(g, c), conductance(g, c.complement(g)))
                self.assertTrue(c.verify(g))


class DiameterTestCase(unittest.TestCase):
    def test_diameter(self):
        self.assertEqual(diameter(generate(GraphFamilySpec('cycle', 4))), 2)
        self.assertEqual(diameter(generate(GraphFamilySpec('complete', 4))), 1)
        # 0 to 5 goes through both bridge edges.
        g = generate(GraphFamilySpec('barbell', 7))
        self.assertEqual(diameter(g), 4)


if __name__ == '__main__':
    unittest.main()
