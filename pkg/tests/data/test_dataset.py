# Licensed under the MIT License.

import tempfile
import unittest
from pathlib import Path

import numpy as np

from mdalab.data.dataset import Dataset, load_dataset, save_dataset
from mdalab.data.missingness import classify_missingness, is_monotone_sorted, sort_monotone
from mdalab.data.schema import ColumnSchema, VariableKind, VisitType
from mdalab.utils.status import DomainError, ParseError, SchemaError


def make_schema(kinds=("continuous", "continuous", "binary", "binary")):
    visits = [
        VisitType(name=f"y{j + 1}", kind=VariableKind(kind)) for j, kind in enumerate(kinds)
    ]
    return ColumnSchema(covariates=["g"], visits=visits)


def make_dataset(observed, kinds=("continuous", "continuous", "binary", "binary")):
    observed = np.asarray(observed, dtype=bool)
    n, p = observed.shape
    schema = make_schema(kinds)
    y = np.ones((n, p))
    x = np.column_stack([np.ones(n), np.zeros(n)])
    return Dataset(schema, np.array([str(i) for i in range(n)], dtype=object), x, y, observed)


class TestLoadDataset(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def write(self, text):
        path = self.dir / "data.csv"
        path.write_text(text)
        return path

    def test_missing_token(self):
        path = self.write("id,g,y1,y2\n1,0,1.5,1\n2,1,NA,2\n3,0,0.2,1\n")
        schema = ColumnSchema(
            covariates=["g"],
            visits=[VisitType(name="y1", kind="continuous"), VisitType(name="y2", kind="binary")],
        )
        dataset = load_dataset(path, schema)
        self.assertEqual(int((~dataset.observed).sum()), 1)
        self.assertFalse(dataset.observed[1, 0])
        self.assertTrue(np.isnan(dataset.y[1, 0]))
        self.assertEqual(dataset.s.tolist(), [2, 2, 2])
        np.testing.assert_array_equal(dataset.x[:, 0], np.ones(3))

    def test_missing_column(self):
        path = self.write("id,g,y1\n1,0,1.5\n")
        schema = ColumnSchema(
            covariates=["g"],
            visits=[VisitType(name="y1", kind="continuous"), VisitType(name="y2", kind="binary")],
        )
        with self.assertRaises(SchemaError) as ctx:
            load_dataset(path, schema)
        self.assertEqual(ctx.exception.column, "y2")

    def test_missing_covariate_value(self):
        path = self.write("id,g,y1\n1,NA,1.5\n")
        schema = ColumnSchema(covariates=["g"], visits=[VisitType(name="y1", kind="continuous")])
        with self.assertRaises(SchemaError):
            load_dataset(path, schema)

    def test_negative_count(self):
        path = self.write("id,g,c\n1,0,-1\n")
        schema = ColumnSchema(covariates=["g"], visits=[VisitType(name="c", kind="count")])
        with self.assertRaises(DomainError):
            load_dataset(path, schema)

    def test_category_out_of_range(self):
        path = self.write("id,g,o\n1,0,4\n")
        schema = ColumnSchema(covariates=["g"], visits=[VisitType(name="o", kind="ordinal", levels=3)])
        with self.assertRaises(DomainError):
            load_dataset(path, schema)

    def test_malformed_number(self):
        path = self.write("id,g,y1\n1,0,1.5\n2,0,abc\n")
        schema = ColumnSchema(covariates=["g"], visits=[VisitType(name="y1", kind="continuous")])
        with self.assertRaises(ParseError) as ctx:
            load_dataset(path, schema)
        self.assertEqual(ctx.exception.row, 2)
        self.assertEqual(ctx.exception.column, "y1")

    def test_save_reload_is_exact(self):
        rng = np.random.default_rng(3)
        schema = ColumnSchema(
            covariates=["g"],
            visits=[VisitType(name="y1", kind="continuous"), VisitType(name="y2", kind="binary")],
        )
        y = np.column_stack([rng.standard_normal(5), rng.integers(1, 3, 5)])
        observed = np.ones((5, 2), dtype=bool)
        observed[2, 1] = False
        x = np.column_stack([np.ones(5), [0, 0, 1, 1, 1]])
        dataset = Dataset(schema, np.array(list("abcde"), dtype=object), x, y, observed)
        path = save_dataset(dataset, self.dir / "out.csv")
        reloaded = load_dataset(path, schema)
        np.testing.assert_array_equal(reloaded.observed, dataset.observed)
        np.testing.assert_array_equal(reloaded.y[observed], dataset.y[observed])


class TestClassifyMissingness(unittest.TestCase):
    def test_intermittent_and_dropout(self):
        dataset = make_dataset([[True, False, True, False]])
        partition = classify_missingness(dataset)
        sub = partition.subjects[0]
        self.assertEqual(int(dataset.s[0]), 3)
        self.assertEqual(sub.continuous, (1,))
        self.assertEqual(sub.discrete, ())
        self.assertEqual(sub.dropout, (3,))

    def test_complete_subject(self):
        partition = classify_missingness(make_dataset([[True] * 4]))
        sub = partition.subjects[0]
        self.assertEqual((sub.discrete, sub.continuous, sub.dropout), ((), (), ()))

    def test_no_observation(self):
        dataset = make_dataset([[False] * 4])
        sub = classify_missingness(dataset).subjects[0]
        self.assertEqual(int(dataset.s[0]), 0)
        self.assertEqual(sub.dropout, (0, 1, 2, 3))
        self.assertEqual(sub.intermittent, ())

    def test_partition_covers_every_cell(self):
        rng = np.random.default_rng(11)
        observed = rng.random((40, 4)) < 0.6
        dataset = make_dataset(observed)
        partition = classify_missingness(dataset)
        for i, sub in enumerate(partition.subjects):
            seen = set(np.flatnonzero(observed[i]).tolist())
            parts = [set(sub.discrete), set(sub.continuous), set(sub.dropout), seen]
            self.assertEqual(set().union(*parts), set(range(4)))
            self.assertEqual(sum(len(part) for part in parts), 4)
            self.assertTrue(all(j < dataset.s[i] for j in sub.intermittent))
            self.assertTrue(all(j >= dataset.s[i] for j in sub.dropout))
        self.assertTrue(np.all(np.diff(partition.n_counts) <= 0))


class TestSortMonotone(unittest.TestCase):
    def test_descending_patterns(self):
        observed = [[True, False, False], [True, True, True], [True, True, False]]
        dataset = make_dataset(observed, kinds=("continuous",) * 3)
        ordered, n_counts = sort_monotone(dataset)
        self.assertEqual(ordered.s.tolist(), [3, 2, 1])
        self.assertEqual(ordered.ids.tolist(), ["1", "2", "0"])
        self.assertEqual(n_counts.tolist(), [3, 2, 1])
        self.assertTrue(is_monotone_sorted(ordered))

    def test_all_complete_keeps_order(self):
        dataset = make_dataset(np.ones((4, 3), dtype=bool), kinds=("continuous",) * 3)
        ordered, n_counts = sort_monotone(dataset)
        self.assertEqual(ordered.ids.tolist(), dataset.ids.tolist())
        self.assertEqual(n_counts.tolist(), [4, 4, 4])

    def test_empty(self):
        dataset = make_dataset(np.zeros((0, 3), dtype=bool), kinds=("continuous",) * 3)
        ordered, n_counts = sort_monotone(dataset)
        self.assertEqual(ordered.n, 0)
        self.assertEqual(n_counts.tolist(), [0, 0, 0])


if __name__ == "__main__":
    unittest.main()
