from __future__ import annotations

import json
import tempfile
import unittest
from pathlib import Path

import numpy as np
from PIL import Image

from fcmdnn.data.dataset import MANIFEST_NAME, Provenance, load_dataset, write_dataset
from fcmdnn.data.synthetic import gen_synthetic
from fcmdnn.errors import ConfigurationError, EmptyClassError, IngestionError, InvalidDimensionError


def _write_pgm(path: Path, values: list[int], side: int) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    img = Image.fromarray(np.asarray(values, dtype=np.uint8).reshape(side, side))
    img.save(path, format="PPM")


class SyntheticTest(unittest.TestCase):
    def test_same_seed_is_bit_identical(self) -> None:
        a = gen_synthetic(10, 10, 16, 42)
        b = gen_synthetic(10, 10, 16, 42)
        np.testing.assert_array_equal(a.matrix(), b.matrix())
        np.testing.assert_array_equal(a.labels(), b.labels())

    def test_other_seed_changes_pixels(self) -> None:
        a = gen_synthetic(10, 10, 16, 42)
        b = gen_synthetic(10, 10, 16, 43)
        self.assertFalse(np.array_equal(a.matrix(), b.matrix()))

    def test_counts_and_order(self) -> None:
        ds = gen_synthetic(4, 3, 8, 0)
        self.assertEqual(ds.n, 7)
        self.assertEqual(ds.labels().tolist(), [0, 0, 0, 0, 1, 1, 1])
        self.assertEqual(ds.provenance, Provenance.synthetic)
        self.assertEqual(ds.shapes(), {(8, 8)})
        X = ds.matrix()
        self.assertTrue(np.all((X >= 0) & (X <= 255)))
        np.testing.assert_array_equal(X, np.rint(X))

    def test_subpatterns_round_robin(self) -> None:
        ds = gen_synthetic(6, 4, 8, 1, subpatterns=3)
        self.assertEqual([s.pattern_id for s in ds.samples], [0, 1, 2, 0, 1, 2, 0, 1, 2, 0])

    def test_side_below_minimum(self) -> None:
        with self.assertRaises(InvalidDimensionError):
            gen_synthetic(2, 2, 3, 0)

    def test_classes_differ_in_mean_intensity(self) -> None:
        ds = gen_synthetic(30, 30, 16, 7)
        X, y = ds.matrix(), ds.labels()
        self.assertGreater(X[y == 1].mean(), X[y == 0].mean())


class LoadDatasetTest(unittest.TestCase):
    def test_lexicographic_enumeration(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            root = Path(tmp)
            for name in ("c.pgm", "a.pgm", "b.pgm"):
                _write_pgm(root / "healthy" / name, [10, 20, 30, 40], 2)
            for name in ("z.pgm", "y.pgm"):
                _write_pgm(root / "sick" / name, [1, 2, 3, 4], 2)
            ds = load_dataset(root)
        self.assertEqual(ds.n, 5)
        self.assertEqual(ds.labels().tolist(), [0, 0, 0, 1, 1])
        self.assertEqual([s.id for s in ds.samples], [0, 1, 2, 3, 4])
        self.assertEqual(
            [s.source for s in ds.samples],
            ["healthy/a.pgm", "healthy/b.pgm", "healthy/c.pgm", "sick/y.pgm", "sick/z.pgm"],
        )

    def test_pixels_are_read_verbatim(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            root = Path(tmp)
            _write_pgm(root / "healthy" / "a.pgm", [0, 255, 128, 64], 2)
            _write_pgm(root / "sick" / "b.pgm", [0, 0, 0, 0], 2)
            ds = load_dataset(root)
        s = ds.samples[0]
        self.assertEqual((s.width, s.height), (2, 2))
        np.testing.assert_array_equal(s.pixels, [0.0, 255.0, 128.0, 64.0])

    def test_missing_sick_class(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            root = Path(tmp)
            _write_pgm(root / "healthy" / "a.pgm", [1, 2, 3, 4], 2)
            with self.assertRaises(EmptyClassError):
                load_dataset(root)

    def test_missing_root(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(ConfigurationError):
                load_dataset(Path(tmp) / "nope")

    def test_corrupt_image_names_the_file(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            root = Path(tmp)
            _write_pgm(root / "healthy" / "a.pgm", [1, 2, 3, 4], 2)
            (root / "sick").mkdir()
            (root / "sick" / "broken.pgm").write_bytes(b"definitely not an image")
            with self.assertRaises(IngestionError) as ctx:
                load_dataset(root)
        self.assertIn("broken.pgm", str(ctx.exception))

    def test_color_image_is_rejected(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            root = Path(tmp)
            _write_pgm(root / "healthy" / "a.pgm", [1, 2, 3, 4], 2)
            (root / "sick").mkdir()
            Image.new("RGB", (2, 2), (10, 20, 30)).save(root / "sick" / "rgb.png")
            with self.assertRaises(IngestionError):
                load_dataset(root)

    def test_write_then_load_keeps_pixels(self) -> None:
        ds = gen_synthetic(5, 4, 8, 11)
        for suffix in (".pgm", ".png"):
            with tempfile.TemporaryDirectory() as tmp:
                manifest = write_dataset(ds, tmp, suffix=suffix)
                back = load_dataset(tmp)
                meta = json.loads((Path(tmp) / MANIFEST_NAME).read_text(encoding="utf-8"))
            self.assertEqual(manifest.name, MANIFEST_NAME)
            np.testing.assert_array_equal(back.matrix(), ds.matrix())
            np.testing.assert_array_equal(back.labels(), ds.labels())
            self.assertEqual(meta["generator_seed"], 11)
            self.assertEqual(meta["counts"], {"healthy": 5, "sick": 4})


if __name__ == "__main__":
    unittest.main()
