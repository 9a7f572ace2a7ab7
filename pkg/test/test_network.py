from __future__ import annotations

import json
import math
import tempfile
import unittest
from pathlib import Path

import numpy as np

from fcmdnn.errors import DomainError, ModelFormatError, ShapeMismatchError, TrainingDivergedError
from fcmdnn.network.activations import cross_entropy, maxout_forward, sigmoid, softmax
from fcmdnn.network.model import backward, forward, label_from_scores, loss, predict
from fcmdnn.network.optim import optimizer_step
from fcmdnn.network.params import LayerParams, init_params
from fcmdnn.network.serialize import load_model, params_to_dict, params_from_dict, save_model
from fcmdnn.network.spec import Adaptive, LayerSpec, MomentumSgd, NetworkSpec
from fcmdnn.network.train import train


def _single_weight_spec(activation: str = "sigmoid", **kwargs) -> NetworkSpec:
    return NetworkSpec(layers=(LayerSpec(input_width=1, output_width=1, activation=activation),), **kwargs)


def _random_spec(rng: np.random.Generator, seed: int) -> NetworkSpec:
    widths = [int(rng.integers(2, 5))]
    layers: list[LayerSpec] = []
    for _ in range(int(rng.integers(1, 4))):
        widths.append(int(rng.integers(2, 5)))
        layers.append(
            LayerSpec(
                input_width=widths[-2],
                output_width=widths[-1],
                activation=str(rng.choice(["maxout", "sigmoid", "linear"])),
                pieces=int(rng.integers(2, 4)),
            )
        )
    n_out = int(rng.choice([1, 2, 3]))
    layers.append(
        LayerSpec(
            input_width=widths[-1],
            output_width=n_out,
            activation="sigmoid" if n_out == 1 else "softmax",
        )
    )
    return NetworkSpec(
        layers=tuple(layers),
        l1=float(rng.choice([0.0, 1e-5])),
        l2=float(rng.choice([0.0, 1e-3])),
        seed=seed,
    )


def _blobs(rng: np.random.Generator, per_class: int = 100) -> tuple[np.ndarray, np.ndarray]:
    X = np.vstack([rng.normal(-2.0, 0.5, size=(per_class, 2)), rng.normal(2.0, 0.5, size=(per_class, 2))])
    return X, np.repeat([0, 1], per_class)


def _small_dnn(epochs: int = 50, seed: int = 0) -> NetworkSpec:
    widths = [2, 10, 8, 6, 5, 4, 3]
    layers = [
        LayerSpec(input_width=a, output_width=b, activation="maxout", pieces=2)
        for a, b in zip(widths, widths[1:])
    ]
    layers.append(LayerSpec(input_width=3, output_width=1, activation="sigmoid"))
    return NetworkSpec(
        layers=tuple(layers),
        l1=1e-5,
        optimizer=Adaptive(rho=0.95, epsilon=1e-6),
        epochs=epochs,
        batch_size="auto",
        input_scaling="standardize",
        seed=seed,
    )


class ActivationTest(unittest.TestCase):
    def test_maxout_absolute_value(self) -> None:
        pieces = [(np.array([[1.0]]), np.zeros(1)), (np.array([[-1.0]]), np.zeros(1))]
        self.assertEqual(maxout_forward(np.array([3.0]), pieces)[0], 3.0)
        self.assertEqual(maxout_forward(np.array([-3.0]), pieces)[0], 3.0)

    def test_maxout_hand_value(self) -> None:
        pieces = [
            (np.array([[2.0], [0.0]]), np.array([1.0])),
            (np.array([[0.0], [1.0]]), np.array([0.0])),
        ]
        self.assertEqual(maxout_forward(np.array([1.0, 4.0]), pieces)[0], 4.0)

    def test_maxout_shape_errors(self) -> None:
        with self.assertRaises(ShapeMismatchError):
            maxout_forward(np.array([1.0]), [(np.array([[1.0]]), np.zeros(1))])
        with self.assertRaises(ShapeMismatchError):
            maxout_forward(np.array([1.0, 2.0]), [(np.ones((1, 1)), np.zeros(1))] * 2)

    def test_sigmoid_values(self) -> None:
        self.assertEqual(sigmoid(0.0), 0.5)
        self.assertLessEqual(abs(sigmoid(40.0) - 1.0), 1e-15)
        self.assertLess(sigmoid(-40.0), 1e-15)
        self.assertTrue(np.all(np.isfinite(sigmoid(np.array([-1e4, 1e4])))))

    def test_cross_entropy_values(self) -> None:
        self.assertLessEqual(cross_entropy(1.0, 1), 1e-11)
        self.assertAlmostEqual(cross_entropy(0.5, 1), math.log(2.0), places=12)
        self.assertAlmostEqual(cross_entropy([0.2, 0.5, 0.3], [0, 1, 0]), -math.log(0.5), places=12)
        self.assertTrue(math.isfinite(cross_entropy(0.0, 1)))

    def test_cross_entropy_rejects_soft_target(self) -> None:
        with self.assertRaises(DomainError):
            cross_entropy([0.5, 0.5], [0.5, 0.5])
        with self.assertRaises(DomainError):
            cross_entropy(1.5, 1)


class ForwardBackwardTest(unittest.TestCase):
    def test_zero_network_outputs_half(self) -> None:
        spec = NetworkSpec(
            layers=(
                LayerSpec(input_width=3, output_width=4, activation="maxout"),
                LayerSpec(input_width=4, output_width=1, activation="sigmoid"),
            )
        )
        params = init_params(spec)
        for lp in params.layers:
            lp.W[...] = 0.0
        out, _ = forward(params, np.array([1.0, -7.0, 3.0]))
        self.assertEqual(out.tolist(), [0.5])

    def test_identity_then_sigmoid(self) -> None:
        spec = NetworkSpec(
            layers=(
                LayerSpec(input_width=1, output_width=1, activation="linear"),
                LayerSpec(input_width=1, output_width=1, activation="sigmoid"),
            )
        )
        params = init_params(spec)
        for lp in params.layers:
            lp.W[...] = 1.0
        for x in (-2.0, 0.3, 5.0):
            self.assertAlmostEqual(float(forward(params, np.array([x]))[0][0]), sigmoid(x), places=15)

    def test_maxout_with_buried_piece_is_affine(self) -> None:
        def net(activation: str) -> NetworkSpec:
            return NetworkSpec(
                layers=(
                    LayerSpec(input_width=3, output_width=4, activation=activation, pieces=2),
                    LayerSpec(input_width=4, output_width=1, activation="sigmoid"),
                )
            )

        rng = np.random.default_rng(8)
        maxout_params, affine_params = init_params(net("maxout")), init_params(net("linear"))
        W, b = rng.normal(size=(3, 4)), rng.normal(size=4)
        maxout_params.layers[0].W[0], maxout_params.layers[0].b[0] = W, b
        maxout_params.layers[0].W[1] = rng.normal(size=(3, 4))
        maxout_params.layers[0].b[1] = -1.0e6
        affine_params.layers[0].W[0], affine_params.layers[0].b[0] = W, b
        affine_params.layers[1] = maxout_params.layers[1].copy()
        X = rng.normal(size=(50, 3))
        _, with_maxout = forward(maxout_params, X)
        _, plain = forward(affine_params, X)
        np.testing.assert_allclose(with_maxout.layers[0].outputs, plain.layers[0].outputs, rtol=0, atol=1e-9)
        self.assertTrue(np.all(with_maxout.layers[0].winners == 0))

    def test_softmax_rows_sum_to_one(self) -> None:
        rng = np.random.default_rng(21)
        for scale in (1.0, 30.0, 700.0):
            probs = softmax(rng.normal(scale=scale, size=(200, 7)), axis=1)
            self.assertTrue(np.all(probs >= 0.0))
            self.assertLessEqual(float(np.max(np.abs(probs.sum(axis=1) - 1.0))), 1e-12)

    def test_softmax_zero_logits_uniform(self) -> None:
        spec = NetworkSpec(layers=(LayerSpec(input_width=2, output_width=4, activation="softmax"),))
        params = init_params(spec)
        params.layers[0].W[...] = 0.0
        np.testing.assert_allclose(forward(params, np.array([3.0, 1.0]))[0], [0.25] * 4)

    def test_width_mismatch(self) -> None:
        params = init_params(_single_weight_spec())
        with self.assertRaises(ShapeMismatchError):
            forward(params, np.array([1.0, 2.0]))

    def test_gradients_match_finite_differences(self) -> None:
        rng = np.random.default_rng(123)
        h = 1e-5
        for case in range(24):
            spec = _random_spec(rng, seed=case)
            params = init_params(spec)
            for lp in params.layers:
                lp.b[...] = rng.normal(0.0, 0.3, size=lp.b.shape)
            X = rng.normal(size=(3, spec.input_width))
            y = rng.integers(0, max(2, spec.output_width), size=3)

            _, trace = forward(params, X)
            grads = backward(params, trace, y)
            for lp, g in zip(params.layers, grads):
                for tensor, gtensor in ((lp.W, g.W), (lp.b, g.b)):
                    flat = tensor.reshape(-1)
                    gflat = gtensor.reshape(-1)
                    picks = rng.choice(flat.size, size=min(6, flat.size), replace=False)
                    for j in picks:
                        old = flat[j]
                        flat[j] = old + h
                        up = loss(params, X, y)
                        flat[j] = old - h
                        down = loss(params, X, y)
                        flat[j] = old
                        numeric = (up - down) / (2 * h)
                        analytic = gflat[j]
                        scale = max(abs(numeric) + abs(analytic), 1e-3)
                        self.assertLess(abs(numeric - analytic) / scale, 1e-4, msg=f"case={case}")

    def test_target_equal_to_output_gives_zero_head_delta(self) -> None:
        spec = NetworkSpec(
            layers=(
                LayerSpec(input_width=3, output_width=2, activation="sigmoid"),
                LayerSpec(input_width=2, output_width=1, activation="sigmoid"),
            )
        )
        params = init_params(spec)
        X = np.random.default_rng(0).normal(size=(4, 3))
        out, trace = forward(params, X)
        grads = backward(params, trace, out)
        np.testing.assert_array_equal(grads[-1].W, 0.0)
        np.testing.assert_array_equal(grads[-1].b, 0.0)

    def test_l1_gradient_is_sign_rule(self) -> None:
        params = init_params(_single_weight_spec(l1=0.1))
        params.layers[0].W[...] = -2.0
        _, trace = forward(params, np.array([[0.0]]))
        grads = backward(params, trace, np.array([[0.5]]))
        self.assertAlmostEqual(float(grads[0].W.reshape(-1)[0]), -0.1, places=15)

    def test_identical_pieces_route_to_first(self) -> None:
        spec = NetworkSpec(
            layers=(
                LayerSpec(input_width=2, output_width=3, activation="maxout", pieces=2),
                LayerSpec(input_width=3, output_width=1, activation="sigmoid"),
            )
        )
        params = init_params(spec)
        params.layers[0].W[1] = params.layers[0].W[0]
        X = np.array([[0.4, -1.2], [2.0, 0.5]])
        out, trace = forward(params, X)
        Z0 = X @ params.layers[0].W[0]
        np.testing.assert_allclose(trace.layers[0].outputs, Z0, rtol=0, atol=1e-15)
        grads = backward(params, trace, np.array([1, 0]))
        np.testing.assert_array_equal(grads[0].W[1], 0.0)
        self.assertTrue(np.any(grads[0].W[0] != 0.0))

    def test_stale_trace(self) -> None:
        spec = NetworkSpec(
            layers=(
                LayerSpec(input_width=2, output_width=2, activation="sigmoid"),
                LayerSpec(input_width=2, output_width=1, activation="sigmoid"),
            )
        )
        params = init_params(spec)
        _, trace = forward(init_params(_single_weight_spec()), np.array([1.0]))
        with self.assertRaises(ShapeMismatchError):
            backward(params, trace, np.array([1]))


class OptimizerTest(unittest.TestCase):
    def _params_and_unit_grad(self, optimizer):
        params = init_params(_single_weight_spec(optimizer=optimizer))
        params.layers[0].W[...] = 0.0
        grads = [LayerParams(W=np.ones((1, 1, 1)), b=np.zeros((1, 1)))]
        return params, grads

    def test_plain_sgd_step(self) -> None:
        params, grads = self._params_and_unit_grad(MomentumSgd(learning_rate=0.1, momentum=0.0))
        out = optimizer_step(params, grads)
        self.assertAlmostEqual(float(out.layers[0].W.reshape(-1)[0]), -0.1, places=15)
        self.assertEqual(float(params.layers[0].W.reshape(-1)[0]), 0.0)

    def test_momentum_second_step(self) -> None:
        params, grads = self._params_and_unit_grad(MomentumSgd(learning_rate=0.1, momentum=0.2))
        first = optimizer_step(params, grads)
        second = optimizer_step(first, grads)
        w1 = float(first.layers[0].W.reshape(-1)[0])
        w2 = float(second.layers[0].W.reshape(-1)[0])
        self.assertAlmostEqual(w2 - w1, -0.12, places=12)

    def test_adaptive_zero_gradient_is_noop(self) -> None:
        params = init_params(_single_weight_spec(optimizer=Adaptive()))
        before = params.copy()
        grads = [lp.zeros_like() for lp in params.layers]
        out = optimizer_step(params, grads)
        for a, b in zip(out.layers, before.layers):
            np.testing.assert_array_equal(a.W, b.W)
            np.testing.assert_array_equal(a.b, b.b)

    def test_non_finite_gradient(self) -> None:
        params, grads = self._params_and_unit_grad(MomentumSgd())
        grads[0].W[...] = np.nan
        with self.assertRaises(TrainingDivergedError):
            optimizer_step(params, grads)


class TrainTest(unittest.TestCase):
    def test_zero_epochs_returns_initialization(self) -> None:
        spec = _small_dnn(epochs=0)
        X, y = _blobs(np.random.default_rng(0), 10)
        params, history = train(spec, (X, y))
        self.assertEqual(len(history), 0)
        for a, b in zip(params.layers, init_params(spec).layers):
            np.testing.assert_array_equal(a.W, b.W)

    def test_same_seed_same_weights(self) -> None:
        spec = _small_dnn(epochs=3, seed=4)
        X, y = _blobs(np.random.default_rng(1), 30)
        a, ha = train(spec, (X, y))
        b, hb = train(spec, (X, y))
        for la, lb in zip(a.layers, b.layers):
            np.testing.assert_array_equal(la.W, lb.W)
            np.testing.assert_array_equal(la.b, lb.b)
        self.assertEqual(ha.train_loss, hb.train_loss)

    def test_separable_blobs_are_learned(self) -> None:
        rng = np.random.default_rng(7)
        X, y = _blobs(rng)
        Xv, yv = _blobs(rng, 20)
        params, history = train(_small_dnn(), (X, y), (Xv, yv))
        _, labels = predict(params, X)
        self.assertGreaterEqual(float(np.mean(labels == y)), 0.99)
        self.assertEqual(len(history), 50)
        self.assertLess(history.train_loss[9], history.train_loss[0])
        self.assertTrue(all(v is not None for v in history.validation_loss))

    def test_sigmoid_network_full_batch_loss_goes_down(self) -> None:
        spec = NetworkSpec(
            layers=(
                LayerSpec(input_width=2, output_width=5, activation="sigmoid"),
                LayerSpec(input_width=5, output_width=1, activation="sigmoid"),
            ),
            optimizer=MomentumSgd(learning_rate=0.5, momentum=0.2),
            epochs=30,
            input_scaling="range",
        )
        X, y = _blobs(np.random.default_rng(3), 40)
        _, history = train(spec, (X, y))
        self.assertLess(history.train_loss[-1], history.train_loss[0])

    def test_softmax_head_trains_on_cluster_targets(self) -> None:
        rng = np.random.default_rng(5)
        X = np.vstack([rng.normal(c, 0.3, size=(30, 2)) for c in ((0, 0), (4, 0), (0, 4))])
        y = np.repeat([0, 1, 2], 30)
        spec = NetworkSpec(
            layers=(
                LayerSpec(input_width=2, output_width=6, activation="maxout"),
                LayerSpec(input_width=6, output_width=3, activation="softmax"),
            ),
            optimizer=MomentumSgd(learning_rate=0.1, momentum=0.2),
            epochs=50,
            batch_size=8,
            input_scaling="standardize",
        )
        params, _ = train(spec, (X, y))
        scores, labels = predict(params, X)
        np.testing.assert_allclose(scores.sum(axis=1), 1.0)
        self.assertGreaterEqual(float(np.mean(labels == y)), 0.95)


class PredictTest(unittest.TestCase):
    def test_tie_rules(self) -> None:
        self.assertEqual(label_from_scores(np.array([0.5])), 1)
        self.assertEqual(label_from_scores(np.array([0.4999])), 0)
        self.assertEqual(label_from_scores(np.array([0.3, 0.3, 0.4])), 2)
        self.assertEqual(label_from_scores(np.array([0.5, 0.5])), 0)
        np.testing.assert_array_equal(label_from_scores(np.array([[0.7], [0.2]])), [1, 0])


class SerializeTest(unittest.TestCase):
    def test_saved_model_predicts_identically(self) -> None:
        spec = _small_dnn(epochs=2)
        X, y = _blobs(np.random.default_rng(2), 15)
        params, _ = train(spec, (X, y))
        with tempfile.TemporaryDirectory() as tmp:
            path = save_model(Path(tmp) / "m.json", params, {"fold": 3})
            back, extra = load_model(path)
        self.assertEqual(extra, {"fold": 3})
        self.assertEqual(back.spec, params.spec)
        np.testing.assert_array_equal(predict(back, X)[0], predict(params, X)[0])

    def test_version_mismatch(self) -> None:
        params = init_params(_single_weight_spec())
        doc = params_to_dict(params)
        doc["version"] = 2
        with self.assertRaises(ModelFormatError):
            params_from_dict(doc)

    def test_corrupt_file(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "m.json"
            path.write_text("{not json", encoding="utf-8")
            with self.assertRaises(ModelFormatError):
                load_model(path)
            doc = params_to_dict(init_params(_single_weight_spec()))
            doc["layers"][0]["W"]["shape"] = [1, 2, 1]
            path.write_text(json.dumps(doc), encoding="utf-8")
            with self.assertRaises(ModelFormatError):
                load_model(path)


if __name__ == "__main__":
    unittest.main()
