#!/usr/bin/env python3
"""
Tests for ResultFormatter
"""

import io
import json
import unittest
import tempfile
import shutil
import sys
import os
from fractions import Fraction
from pathlib import Path

import numpy as np
import pandas as pd

# Add src to path for imports
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from models import CheckMode, OutputFormat, RunConfig
from output_formatter import ResultFormatter


class TestResultFormatter(unittest.TestCase):
    """Test cases for ResultFormatter"""

    def setUp(self):
        self.rows = [
            {'n': 8, 'alpha': 0.5, 'estimate': 0.25, 'ratio': Fraction(35, 36), 'x': (1, -1, -1, 1),
             'mode': CheckMode.EXHAUSTIVE, 'mean_copies': None},
            {'n': 8, 'alpha': 1.0, 'estimate': np.float64(0.75), 'ratio': Fraction(1), 'x': (0, 0, 0, 0),
             'mode': CheckMode.SAMPLED, 'mean_copies': 2.5},
        ]

    def test_csv_layout(self):
        """Header row plus one line per record"""
        text = ResultFormatter(OutputFormat.CSV).format_result('sample sweep', {}, 0, self.rows)
        lines = text.splitlines()
        self.assertEqual(lines[0], "n,alpha,estimate,ratio,x,mode,mean_copies")
        self.assertEqual(len(lines), 3)
        self.assertTrue(text.endswith("\n"))
        self.assertNotIn("\r", text)

        frame = pd.read_csv(io.StringIO(text))
        self.assertEqual(list(frame['ratio']), ['35/36', '1'])
        self.assertEqual(list(frame['x']), ['1 -1 -1 1', '0 0 0 0'])
        self.assertEqual(list(frame['mode']), ['exhaustive', 'sampled'])
        self.assertTrue(pd.isna(frame.loc[0, 'mean_copies']))

    def test_json_document(self):
        """JSON carries version, seed, command, config, rows and summary"""
        formatter = ResultFormatter(OutputFormat.JSON, "1.0.0")
        text = formatter.format_result('sample sweep', {'n': 8}, 11, self.rows, {'pmf': {0: 0.5}})
        document = json.loads(text)
        self.assertEqual(set(document), {'library_version', 'master_seed', 'command', 'config', 'rows', 'summary'})
        self.assertEqual(document['library_version'], "1.0.0")
        self.assertEqual(document['master_seed'], 11)
        self.assertEqual(document['rows'][0]['ratio'], "35/36")
        self.assertEqual(document['rows'][0]['x'], [1, -1, -1, 1])
        self.assertEqual(document['rows'][1]['estimate'], 0.75)
        self.assertIsNone(document['rows'][0]['mean_copies'])
        self.assertEqual(document['summary'], {'pmf': {'0': 0.5}})

    def test_run_config_echo(self):
        """Execution-only options are not echoed"""
        config = RunConfig('graph info', {'n': 12, 'threads': 4, 'out': 'x.csv', 'seed': 0, 'f_value': None})
        self.assertEqual(config.echo(), {'n': 12, 'seed': 0})

    def test_write_file(self):
        """Output goes to the requested path"""
        temp_dir = tempfile.mkdtemp()
        try:
            path = Path(temp_dir) / "nested" / "out.csv"
            formatter = ResultFormatter(OutputFormat.CSV)
            formatter.write("a,b\n1,2\n", str(path))
            self.assertEqual(path.read_text(encoding="utf-8"), "a,b\n1,2\n")
        finally:
            shutil.rmtree(temp_dir)


if __name__ == '__main__':
    unittest.main()
