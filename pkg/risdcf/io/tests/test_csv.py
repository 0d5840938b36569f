import os
import shutil
import tempfile
import unittest
from collections import OrderedDict
from fractions import Fraction
from io import StringIO

import numpy as npy
import pandas as pd

import risdcf as rd
from risdcf.io.csv import results_frame, write_results, read_results


class ResultsFrameTestCase(unittest.TestCase):
    '''
    '''
    def test_column_order(self):
        rows = [OrderedDict([('p', .1), ('L', 5)]),
                OrderedDict([('L', 6), ('p', .2), ('kappa', 1.1)])]
        df = results_frame(rows)
        self.assertEqual(list(df.columns), ['p', 'L', 'kappa'])
        self.assertTrue(pd.isna(df['kappa'][0]))

    def test_plain_values(self):
        df = results_frame([{'t': Fraction(17456), 'n': npy.int64(3)}])
        self.assertIsInstance(df['t'][0], float)
        self.assertEqual(df['t'][0], 17456.)
        self.assertEqual(df['n'][0], 3)

    def test_empty(self):
        self.assertEqual(len(results_frame([])), 0)


class WriteTestCase(unittest.TestCase):
    '''
    '''
    def setUp(self):
        self.rows = [OrderedDict([('scenario', 'tau_sweep'), ('p', 0.1),
                                  ('s_ris_mbps', Fraction(1, 3)), ('pass', True)])]
        self.test_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.test_dir)

    def test_format(self):
        out = StringIO()
        write_results(self.rows, out)
        self.assertEqual(out.getvalue(),
                         'scenario,p,s_ris_mbps,pass\n'
                         'tau_sweep,0.1,0.333333333,True\n')

    def test_same_bytes(self):
        a, b = StringIO(), StringIO()
        write_results(self.rows, a)
        write_results(results_frame(self.rows), b)
        self.assertEqual(a.getvalue(), b.getvalue())

    def test_file_round_trip(self):
        path = os.path.join(self.test_dir, 'out.csv')
        written = write_results(self.rows*3, path)
        df = read_results(path)
        self.assertEqual(list(df.columns), list(written.columns))
        self.assertEqual(len(df), 3)
        self.assertAlmostEqual(df['s_ris_mbps'][0], 1/3., places=9)
        with open(path, 'rb') as f:
            self.assertNotIn(b'\r', f.read())

    def test_exported(self):
        self.assertIs(rd.io.write_results, write_results)
