import tempfile
import unittest
from pathlib import Path

from numpy.testing import assert_array_equal

from unida.data import (LabelSplit, dataset_header, generate, make_shift,
                        read_dataset, write_dataset)
from unida.utils.exceptions import DatasetFormatError


class TestDatasetIO(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)
        split = LabelSplit(10, 10, 11)
        self.source, self.target = generate(
            split, make_shift(split, input_dim=4, samples_per_class=2))

    def tearDown(self):
        self.tmp.cleanup()

    def test_round_trip(self):
        path = self.dir / 'source.csv'
        write_dataset(self.source, path)
        loaded = read_dataset(path)
        self.assertEqual(loaded.domain, 'source')
        assert_array_equal(loaded.features, self.source.features)
        assert_array_equal(loaded.labels, self.source.labels)
        assert_array_equal(loaded.ids, self.source.ids)

    def test_second_write_is_byte_identical(self):
        first, second = self.dir / 'a.csv', self.dir / 'b.csv'
        write_dataset(self.target, first)
        write_dataset(read_dataset(first), second)
        self.assertEqual(first.read_bytes(), second.read_bytes())

    def test_header(self):
        path = self.dir / 'target.csv'
        write_dataset(self.target, path)
        with open(path) as f:
            self.assertEqual(f.readline().strip(),
                             ','.join(dataset_header(4)))
        self.assertEqual(dataset_header(2),
                         ['id', 'domain', 'label', 'f0', 'f1'])

    def test_mask_labels(self):
        path = self.dir / 'target.csv'
        write_dataset(self.target, path)
        self.assertIsNone(read_dataset(path, mask_labels=True).labels)

    def test_wrong_column_count(self):
        path = self.dir / 'bad.csv'
        path.write_text('id,domain,label,f0,f1\n'
                        '0,source,0,1.0,2.0\n'
                        '1,source,0,1.0\n')
        with self.assertRaises(DatasetFormatError) as ctx:
            read_dataset(path)
        self.assertEqual(ctx.exception.line, 3)
        self.assertIn('line 3', str(ctx.exception))

    def test_bad_header(self):
        path = self.dir / 'bad.csv'
        path.write_text('id,label,f0\n0,0,1.0\n')
        with self.assertRaises(DatasetFormatError) as ctx:
            read_dataset(path)
        self.assertEqual(ctx.exception.line, 1)

    def test_non_numeric_field(self):
        path = self.dir / 'bad.csv'
        path.write_text('id,domain,label,f0\n0,target,x,1.0\n')
        with self.assertRaises(DatasetFormatError):
            read_dataset(path)

    def test_missing_file(self):
        with self.assertRaises(FileNotFoundError):
            read_dataset(self.dir / 'missing.csv')


if __name__ == '__main__':
    unittest.main()
