
import unittest
import contextlib
import io
import json
import pathlib
import tempfile

import congestcut
congestcut.init(verbosity='CRITICAL')

from congestcut.cli import cli_run
from congestcut.base.graph import GraphFamilySpec, generate, read_edge_list


DATA = pathlib.Path(__file__).parent / 'data'


def capture(argv):
    out = io.StringIO()
    with contextlib.redirect_stdout(out), \
            contextlib.redirect_stderr(io.StringIO()):
        ret = cli_run(argv)
    return ret, out.getvalue()


class CommandLineTestCase(unittest.TestCase):
    def test_generate(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = pathlib.Path(tmp) / 'b7.edges'
            ret = cli_run(
                ['generate', '--family', 'barbell', '--n', '7',
                 '--out', str(path)])
            self.assertEqual(ret, 0)
            self.assertEqual(len(path.read_text().splitlines()), 8)
            self.assertEqual(
                read_edge_list(path), generate(GraphFamilySpec('barbell', 7)))

    def test_run(self):
        ret, out = capture(
            ['run', '--graph', str(DATA / 'b7.edges'), '--phi', '0.2',
             '--seed', '1', '--strict-bits'])
        self.assertEqual(ret, 0)
        doc = json.loads(out)
        self.assertEqual(doc['algorithm'], 'randomwalk')
        self.assertEqual((doc['n'], doc['m'], doc['seed']), (7, 8, 1))
        self.assertGreaterEqual(doc['conductance'], 0.142857142857)
        self.assertLessEqual(doc['conductance'], 1)
        self.assertEqual(doc['budget_violations'], 0)
        self.assertEqual(doc['rounds'], sum(r for _, r in doc['phases']))

    def test_run_local(self):
        ret, out = capture(
            ['run', '--family', 'barbell', '--n', '7', '--algo', 'local',
             '--source', '4'])
        self.assertEqual(ret, 0)
        doc = json.loads(out)
        self.assertIn(4, doc['cut_members'])
        self.assertEqual(doc['algorithm'], 'local')

    def test_rerun(self):
        argv = [
            'run', '--family', 'random-connected', '--n', '10', '--p', '0.3',
            '--algo', 'guess', '--mode', 'tokens', '--walks', '200',
            '--seed', '4']
        with tempfile.TemporaryDirectory() as tmp:
            first = pathlib.Path(tmp) / 'first.json'
            second = pathlib.Path(tmp) / 'second.json'
            self.assertEqual(cli_run(argv + ['--out', str(first)]), 0)
            self.assertEqual(cli_run(argv + ['--out', str(second)]), 0)
            self.assertEqual(first.read_bytes(), second.read_bytes())

    def test_oracle(self):
        ret, out = capture(['oracle', '--graph', str(DATA / 'b7.edges')])
        self.assertEqual(ret, 0)
        doc = json.loads(out)
        self.assertEqual(doc['cut_members'], [0, 1, 2])
        self.assertEqual(doc['conductance'], 0.142857142857)
        ret, out = capture(
            ['oracle', '--family', 'cycle', '--n', '4', '--what', 'walk',
             '--length', '2'])
        self.assertEqual(json.loads(out)['values'], [0.5, 0, 0.5, 0])
        ret, _ = capture(
            ['oracle', '--family', 'cycle', '--n', '10', '--max-n', '8'])
        self.assertEqual(ret, 2)

    def test_errors(self):
        cases = [
            ['run', '--family', 'barbell', '--n', '7', '--unknown'],
            ['run', '--family', 'barbell', '--n', '7'],  # no --phi
            ['run', '--family', 'barbell', '--phi', '0.2'],  # no --n
            ['run', '--family', 'barbell', '--n', '8', '--phi', '0.2'],
            ['run', '--graph', str(DATA / 'missing.edges'), '--phi', '0.2'],
            ['run', '--family', 'cycle', '--n', '4', '--algo', 'local'],
            ['frobnicate']]
        for argv in cases:
            with self.subTest(argv=argv):
                ret, _ = capture(argv)
                self.assertEqual(ret, 2)

    def test_round_limit(self):
        ret, _ = capture(
            ['run', '--family', 'barbell', '--n', '7', '--algo', 'pagerank',
             '--phi', '0.05', '--walks', '100', '--max-rounds', '1'])
        self.assertEqual(ret, 3)

    def test_version(self):
        ret, out = capture(['-v'])
        self.assertEqual(ret, 0)
        self.assertIn(congestcut.__version__, out)

    def test_bench(self):
        ret, out = capture(['bench', '--family', 'cycle', '--sizes'])
        self.assertEqual((ret, out), (0, ''))
        ret, out = capture(
            ['bench', '--family', 'cycle', '--sizes', '4', '6',
             '--seeds', '2', '--oracle', '--phi', '0.5'])
        self.assertEqual(ret, 0)
        rows = [json.loads(line) for line in out.splitlines()]
        self.assertEqual(len(rows), 4)
        self.assertEqual(
            [(r['n'], r['seed']) for r in rows],
            [(4, 0), (4, 1), (6, 0), (6, 1)])
        self.assertEqual(rows[0]['phi_star'], 0.5)
        self.assertEqual(rows[2]['phi_star'], 0.333333333333)
        for row in rows:
            self.assertIsNone(row['error'])
            self.assertGreaterEqual(row['phi_returned'], row['phi_star'])

    def test_bench_error_row(self):
        ret, out = capture(
            ['bench', '--family', 'barbell', '--sizes', '8', '--phi', '0.5'])
        self.assertEqual(ret, 0)
        row = json.loads(out)
        self.assertTrue(row['error'].startswith('GraphError'))


if __name__ == '__main__':
    unittest.main()
