# Licensed under the MIT License.

import json
import shutil
import tempfile
import unittest
from pathlib import Path

import pandas as pd
import yaml

from mdalab.analysis.scenarios import scenario_schema
from mdalab.cli import main


def write_config(directory: Path, data: Path, out: Path, **extra) -> Path:
    document = {
        "dataset": {"path": str(data), "columns": scenario_schema().model_dump(mode="json")},
        "mcmc": {"burn_in": 10, "thin": 1, "draws": 2, "seed": 1},
        "analysis": {"response": "y2", "family": "probit", "predictors": ["y0", "g"]},
        "output": {"out": str(out)},
        "workers": 1,
    }
    document.update(extra)
    path = directory / "run.yaml"
    path.write_text(yaml.safe_dump(document))
    return path


class TestSimulate(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def test_deterministic(self):
        for name in ("a", "b"):
            code = main(["simulate", "--scenario", "1", "--n", "40", "--seed", "3", "--out", str(self.dir / name)])
            self.assertEqual(code, 0)
        self.assertEqual((self.dir / "a" / "data.csv").read_bytes(), (self.dir / "b" / "data.csv").read_bytes())
        truth = json.loads((self.dir / "a" / "truth.json").read_text())
        self.assertEqual(truth["scenario"], 1)
        self.assertTrue((self.dir / "a" / "full.csv").exists())
        self.assertTrue((self.dir / "a" / "manifest.json").exists())

    def test_invalid_scenario(self):
        self.assertEqual(main(["simulate", "--scenario", "3", "--out", str(self.dir)]), 2)

    def test_empty_trial(self):
        self.assertEqual(main(["simulate", "--scenario", "1", "--n", "0", "--out", str(self.dir)]), 0)
        self.assertEqual((self.dir / "data.csv").read_text().strip(), "id,y0,g,y1,y2")


class TestImputeAnalyzeTipping(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.tmp = tempfile.TemporaryDirectory()
        cls.dir = Path(cls.tmp.name)
        main(["simulate", "--scenario", "1", "--n", "120", "--seed", "2", "--out", str(cls.dir / "sim")])
        cls.data = cls.dir / "sim" / "data.csv"

    @classmethod
    def tearDownClass(cls):
        cls.tmp.cleanup()

    def test_impute_then_analyze(self):
        out = self.dir / "imp"
        config = write_config(self.dir, self.data, out)
        self.assertEqual(main(["impute", "--config", str(config)]), 0)
        first = pd.read_csv(out / "imp_0001.csv")
        source = pd.read_csv(self.data)
        self.assertEqual(first["id"].tolist(), source["id"].tolist())
        self.assertFalse(first[["y1", "y2"]].isna().any().any())
        self.assertTrue((out / "imp_0002.csv").exists())
        manifest = json.loads((out / "manifest.json").read_text())
        self.assertEqual(manifest["command"], "impute")
        self.assertEqual(manifest["seed"], 1)

        self.assertEqual(main(["analyze", str(out), "--config", str(config)]), 0)
        pooled = pd.read_csv(out / "pooled.csv")
        self.assertEqual(pooled["coefficient"].tolist(), ["intercept", "y0", "g"])

    def test_single_imputation_is_flagged(self):
        source = self.dir / "imp_one"
        config = write_config(self.dir, self.data, source)
        main(["impute", "--config", str(config)])
        single = self.dir / "single"
        single.mkdir()
        shutil.copy(source / "imp_0001.csv", single / "imp_0001.csv")
        self.assertEqual(main(["analyze", str(single), "--config", str(config), "--format", "json"]), 0)
        payload = json.loads((single / "pooled.json").read_text())
        self.assertFalse(payload["between_defined"])
        self.assertIsNone(payload["coefficients"][0]["between"])

    def test_format_from_config(self):
        out = self.dir / "imp_json"
        config = write_config(self.dir, self.data, out, output={"out": str(out), "format": "json"})
        self.assertEqual(main(["impute", "--config", str(config)]), 0)
        self.assertTrue((out / "imp_0001.csv").exists())
        self.assertEqual(main(["analyze", str(out), "--config", str(config)]), 0)
        payload = json.loads((out / "pooled.json").read_text())
        self.assertEqual([row["coefficient"] for row in payload["coefficients"]], ["intercept", "y0", "g"])
        self.assertFalse((out / "pooled.csv").exists())

        self.assertEqual(main(["analyze", str(out), "--config", str(config), "--format", "csv"]), 0)
        self.assertTrue((out / "pooled.csv").exists())

    def test_tipping_json_output(self):
        out = self.dir / "tip_json"
        config = write_config(
            self.dir,
            self.data,
            out,
            output={"out": str(out), "format": "json"},
            tipping={"delta_0": [0.0], "delta_1": [0.0, 1.0]},
        )
        self.assertEqual(main(["tipping", "--config", str(config)]), 0)
        payload = json.loads((out / "tipping.json").read_text())
        self.assertEqual(payload["coefficient"], "g")
        self.assertEqual([(c["delta_0"], c["delta_1"]) for c in payload["cells"]], [(0.0, 0.0), (0.0, 1.0)])
        self.assertIn("significance", payload["cells"][0])
        self.assertFalse((out / "tipping.csv").exists())

    def test_missing_imputation_directory(self):
        config = write_config(self.dir, self.data, self.dir / "unused")
        self.assertEqual(main(["analyze", str(self.dir / "nowhere"), "--config", str(config)]), 3)

    def test_tipping_origin_matches_analyze(self):
        mar_out = self.dir / "tip_mar"
        config = write_config(self.dir, self.data, mar_out)
        main(["impute", "--config", str(config)])
        main(["analyze", str(mar_out), "--config", str(config)])
        pooled = pd.read_csv(mar_out / "pooled.csv", float_precision="round_trip").set_index("coefficient")

        grid_out = self.dir / "tip_grid"
        config = write_config(
            self.dir, self.data, grid_out, tipping={"delta_0": [-1.0, 0.0, 1.0], "delta_1": [-1.0, 0.0, 1.0]}
        )
        self.assertEqual(main(["tipping", "--config", str(config)]), 0)
        grid = pd.read_csv(grid_out / "tipping.csv", float_precision="round_trip")
        self.assertEqual(len(grid), 9)
        origin = grid[(grid["delta_0"] == 0.0) & (grid["delta_1"] == 0.0)].iloc[0]
        self.assertEqual(origin["estimate"], pooled.loc["g", "estimate"])
        self.assertEqual(origin["p"], pooled.loc["g", "p"])

    def test_bad_config(self):
        config = self.dir / "bad.yaml"
        config.write_text(yaml.safe_dump({"mcmc": {"draws": 0}}))
        self.assertEqual(main(["impute", "--config", str(config)]), 2)


if __name__ == "__main__":
    unittest.main()
