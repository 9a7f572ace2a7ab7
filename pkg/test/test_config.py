from __future__ import annotations

import json
import os
import tempfile
import unittest
from pathlib import Path
from unittest import mock

from pydantic import ValidationError

from fcmdnn.config import (
    ExperimentConfig,
    FcmConfig,
    ModelKind,
    Normalization,
    deep_merge,
    dnn_preset,
    load_experiment_config,
    nn_preset,
)
from fcmdnn.errors import ConfigurationError
from fcmdnn.network.spec import Adaptive, MomentumSgd
from fcmdnn.settings import FcmDnnSettings

REPO_ROOT = Path(__file__).resolve().parents[1]


class PresetTest(unittest.TestCase):
    def test_nn_preset(self) -> None:
        cfg = nn_preset()
        self.assertEqual(cfg.hidden_widths, (50, 50))
        self.assertEqual(cfg.hidden_activation, "sigmoid")
        self.assertEqual(cfg.optimizer, MomentumSgd(learning_rate=0.01, momentum=0.2))
        self.assertEqual(cfg.epochs, 20)

    def test_dnn_preset(self) -> None:
        cfg = dnn_preset()
        self.assertEqual(cfg.hidden_widths, (50, 40, 30, 20, 15, 10))
        self.assertEqual(cfg.hidden_activation, "maxout")
        self.assertEqual(cfg.l1, 1.0e-5)
        self.assertEqual(cfg.optimizer, Adaptive(rho=0.99, epsilon=1.0e-8))

    def test_for_model_picks_network(self) -> None:
        self.assertEqual(ExperimentConfig.for_model("nn").network, nn_preset())
        self.assertEqual(ExperimentConfig.for_model(ModelKind.fcm_dnn).network, dnn_preset())

    def test_model_without_network_gets_its_preset(self) -> None:
        self.assertEqual(ExperimentConfig(model="nn").network, nn_preset())
        self.assertEqual(ExperimentConfig().network, dnn_preset())
        self.assertEqual(ExperimentConfig(model="fcm_dnn").network, dnn_preset())
        custom = nn_preset().model_copy(update={"epochs": 3})
        self.assertEqual(ExperimentConfig(model="dnn", network=custom).network, custom)

    def test_build_heads(self) -> None:
        binary = dnn_preset().build(64, 1, seed=3)
        self.assertEqual(binary.input_width, 64)
        self.assertEqual(binary.layers[-1].activation, "sigmoid")
        self.assertEqual(len(binary.layers), 7)
        multi = dnn_preset().build(64, 10)
        self.assertEqual(multi.layers[-1].activation, "softmax")
        self.assertEqual(multi.output_width, 10)


class ValidationTest(unittest.TestCase):
    def test_fcm_invariants(self) -> None:
        for bad in ({"m": 1.0}, {"num_clusters": 1}, {"min_gain": 0.0}, {"max_iterations": 0}):
            with self.assertRaises(ValidationError, msg=str(bad)):
                FcmConfig(**bad)

    def test_optimizer_invariants(self) -> None:
        with self.assertRaises(ValidationError):
            MomentumSgd(momentum=1.0)
        with self.assertRaises(ValidationError):
            Adaptive(rho=1.0)
        with self.assertRaises(ValidationError):
            Adaptive(epsilon=0.0)

    def test_unknown_keys_rejected(self) -> None:
        with self.assertRaises(ValidationError):
            ExperimentConfig.for_model("dnn", learning_speed=3)


class LoadExperimentConfigTest(unittest.TestCase):
    def test_deep_merge_keeps_siblings(self) -> None:
        merged = deep_merge({"a": {"x": 1, "y": 2}, "b": 1}, {"a": {"y": 3}})
        self.assertEqual(merged, {"a": {"x": 1, "y": 3}, "b": 1})

    def test_example_overlay(self) -> None:
        cfg = load_experiment_config(REPO_ROOT / "configs" / "desk.json", "dnn")
        self.assertEqual(cfg.folds, 5)
        self.assertEqual(cfg.preprocess.target_side, 16)
        self.assertEqual(cfg.preprocess.normalization, Normalization.per_attribute_minmax)
        self.assertEqual(cfg.network.batch_size, 16)
        self.assertEqual(cfg.network.hidden_widths, dnn_preset().hidden_widths)
        self.assertEqual(cfg.clusters_per_class, 3)

    def test_flags_win_over_file(self) -> None:
        cfg = load_experiment_config(REPO_ROOT / "configs" / "desk.json", "nn", folds=7, master_seed=None)
        self.assertEqual(cfg.folds, 7)
        self.assertEqual(cfg.model, ModelKind.nn)
        self.assertEqual(cfg.network.hidden_activation, "sigmoid")

    def test_missing_and_broken_files(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(ConfigurationError):
                load_experiment_config(Path(tmp) / "nope.json", "dnn")
            broken = Path(tmp) / "broken.json"
            broken.write_text("{folds:", encoding="utf-8")
            with self.assertRaises(ConfigurationError):
                load_experiment_config(broken, "dnn")
            listed = Path(tmp) / "list.json"
            listed.write_text(json.dumps([1, 2]), encoding="utf-8")
            with self.assertRaises(ConfigurationError):
                load_experiment_config(listed, "dnn")

    def test_invalid_value_in_file(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "bad.json"
            path.write_text(json.dumps({"fcm": {"m": 0.5}}), encoding="utf-8")
            with self.assertRaises(ValidationError):
                load_experiment_config(path, "fcm_dnn")


class SettingsTest(unittest.TestCase):
    def test_environment_prefix(self) -> None:
        env = {"FCMDNN_SEED": "42", "FCMDNN_JOBS": "3", "FCMDNN_FIT_BEFORE_SPLIT": "true"}
        with mock.patch.dict(os.environ, env):
            s = FcmDnnSettings(_env_file=None)
        self.assertEqual((s.seed, s.jobs, s.fit_before_split), (42, 3, True))

    def test_defaults(self) -> None:
        with mock.patch.dict(os.environ, {}, clear=True):
            s = FcmDnnSettings(_env_file=None)
        self.assertEqual(s.seed, 7)
        self.assertTrue(s.audit)


if __name__ == "__main__":
    unittest.main()
