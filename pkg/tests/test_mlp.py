import math

import numpy as np
import pytest

from gesturebot import landmarks as lm
from gesturebot import mlp


class TestParamCount:
    def test_paper_three_output_anchor(self):
        assert mlp.param_count(mlp.LayerSpec((42, 20, 10, 3))) == 1103

    def test_default_eight_output(self):
        assert mlp.param_count(mlp.LayerSpec((42, 20, 10, 8))) == 1158

    def test_minimal(self):
        assert mlp.param_count(mlp.LayerSpec((1, 1))) == 2


class TestForward:
    def test_zero_params_uniform(self):
        params = mlp.zero_params(mlp.LayerSpec())
        logits, probs = mlp.forward(params, np.zeros(42))
        assert np.array_equal(logits, np.zeros(8))
        np.testing.assert_allclose(probs, np.full(8, 0.125), atol=1e-12)

    def test_softmax_shift_invariance(self, rng):
        z = rng.normal(size=8)
        np.testing.assert_allclose(mlp.softmax(z), mlp.softmax(z + 17.3), atol=1e-12)

    def test_softmax_analytic(self):
        probs = mlp.softmax(np.log([1.0, 2.0, 5.0]))
        np.testing.assert_allclose(probs, [0.125, 0.25, 0.625], atol=1e-12)

    def test_softmax_sums_to_one(self, rng):
        for _ in range(20):
            z = rng.normal(scale=50, size=8)
            assert abs(mlp.softmax(z).sum() - 1.0) < 1e-9

    def test_shape_mismatch(self):
        params = mlp.zero_params(mlp.LayerSpec())
        with pytest.raises(mlp.ModelError):
            mlp.forward(params, np.zeros(41))


class TestLossAndGrad:
    def test_perfect_prediction_zero_loss(self):
        # huge bias on the true class saturates softmax
        params = mlp.zero_params(mlp.LayerSpec((4, 3)))
        params.biases[0][1] = 200.0
        loss, _, _ = mlp.loss_and_grad(params, np.zeros(4), np.array([1]))
        assert loss == pytest.approx(0.0, abs=1e-9)

    def test_uniform_prediction_ln8(self):
        params = mlp.zero_params(mlp.LayerSpec())
        loss, _, _ = mlp.loss_and_grad(params, np.zeros(42), np.array([3]))
        assert loss == pytest.approx(math.log(8), abs=1e-9)

    def test_empty_batch(self):
        params = mlp.zero_params(mlp.LayerSpec())
        with pytest.raises(mlp.ModelError):
            mlp.loss_and_grad(params, np.zeros((0, 42)), np.zeros(0, dtype=int))

    @pytest.mark.parametrize("trial", range(10))
    def test_gradients_match_finite_differences(self, trial):
        check_gradients_once(trial)


def check_gradients_once(seed, spec=mlp.LayerSpec((6, 5, 4)), h=1e-4):
    """Central finite-difference oracle over every parameter component."""
    rng = np.random.default_rng(seed)
    params = mlp.init_params(spec, seed)
    x = rng.normal(size=spec.input_len)
    y = np.array([rng.integers(spec.num_classes)])
    _, gw, gb = mlp.loss_and_grad(params, x, y)
    for l in range(len(params.weights)):
        for arr, grad in ((params.weights[l], gw[l]), (params.biases[l], gb[l])):
            it = np.nditer(arr, flags=["multi_index"])
            for _ in it:
                i = it.multi_index
                orig = arr[i]
                arr[i] = orig + h
                lp, _, _ = mlp.loss_and_grad(params, x, y)
                arr[i] = orig - h
                lo, _, _ = mlp.loss_and_grad(params, x, y)
                arr[i] = orig
                fd = (lp - lo) / (2 * h)
                denom = max(abs(fd), abs(grad[i]), 1e-6)
                assert abs(fd - grad[i]) / denom < 1e-4, f"layer {l} index {i}"


class TestSgdStep:
    def test_zero_gradient_no_change(self):
        params = mlp.init_params(mlp.LayerSpec((3, 2)), 0)
        before = params.copy()
        mlp.sgd_step(params, [np.zeros((2, 3))], [np.zeros(2)], 0.1)
        assert np.array_equal(params.weights[0], before.weights[0])

    def test_zero_lr_no_change(self):
        params = mlp.init_params(mlp.LayerSpec((3, 2)), 0)
        before = params.copy()
        mlp.sgd_step(params, [np.ones((2, 3))], [np.ones(2)], 0.0)
        assert np.array_equal(params.weights[0], before.weights[0])

    def test_scalar_arithmetic(self):
        params = mlp.MlpParams(mlp.LayerSpec((1, 1)), [np.array([[1.0]])], [np.array([0.0])])
        mlp.sgd_step(params, [np.array([[2.0]])], [np.array([0.0])], 0.1)
        assert params.weights[0][0, 0] == pytest.approx(0.8)


def separable_toy_set():
    """20 points in 2 classes, offset clusters; padded to 42 features."""
    rng = np.random.default_rng(5)
    feats = np.zeros((20, 42))
    labels = np.repeat([0, 1], 10)
    feats[:10, 0] = rng.normal(-2.0, 0.3, 10)
    feats[10:, 0] = rng.normal(2.0, 0.3, 10)
    feats[:, 1] = rng.normal(0, 0.3, 20)
    return lm.Dataset(feats, labels, class_count=2)


class TestTrain:
    def test_separable_toy_reaches_perfect_train_accuracy(self):
        ds = separable_toy_set()
        # independent separability oracle
        from sklearn.linear_model import LogisticRegression

        lr = LogisticRegression().fit(ds.features, ds.labels)
        assert lr.score(ds.features, ds.labels) == 1.0

        params, history = mlp.train(
            ds, ds, mlp.LayerSpec((42, 20, 10, 2)), mlp.TrainConfig(seed=0)
        )
        assert history.train_accuracy[-1] == 1.0

    def test_synthetic_val_accuracy(self, trained):
        _, history = trained
        assert history.val_accuracy[-1] >= 0.90

    def test_determinism(self, split_sets):
        train_set, val_set = split_sets
        cfg = mlp.TrainConfig(epochs=5, seed=3)
        p1, h1 = mlp.train(train_set, val_set, mlp.LayerSpec(), cfg)
        p2, h2 = mlp.train(train_set, val_set, mlp.LayerSpec(), cfg)
        assert h1.train_loss == h2.train_loss
        for a, b in zip(p1.weights, p2.weights):
            assert np.array_equal(a, b)

    def test_full_batch_loss_monotone(self):
        ds = separable_toy_set()
        params, history = mlp.train(
            ds,
            ds,
            mlp.LayerSpec((42, 20, 10, 2)),
            mlp.TrainConfig(learning_rate=1e-3, epochs=50, batch_size=len(ds), seed=1),
        )
        losses = np.array(history.train_loss)
        assert np.all(np.diff(losses) <= 1e-9)


class TestEvaluate:
    def test_zero_model_ties_to_class_zero(self, rng):
        params = mlp.zero_params(mlp.LayerSpec())
        ds = lm.Dataset(rng.normal(size=(80, 42)), np.repeat(np.arange(8), 10))
        report = mlp.evaluate(params, ds)
        assert report.accuracy == pytest.approx(1 / 8)
        assert report.confusion[:, 0].sum() == 80  # everything predicted Fist

    def test_confusion_definition(self, trained, split_sets):
        params, _ = trained
        _, val = split_sets
        report = mlp.evaluate(params, val)
        assert report.confusion.sum() == len(val)
        assert np.array_equal(report.confusion.sum(axis=1), val.per_class_counts())
        assert report.accuracy == pytest.approx(np.trace(report.confusion) / len(val))

    def test_paper_scale_arithmetic(self):
        # 400 validation samples at 93.5% accuracy is 374 correct
        assert round(400 * 0.935) == 374


class TestPredict:
    def test_uniform_below_threshold(self):
        params = mlp.zero_params(mlp.LayerSpec())
        assert mlp.predict(params, np.zeros(42), threshold=0.5) is None

    def test_confident_prediction(self):
        params = mlp.zero_params(mlp.LayerSpec())
        params.biases[-1][0] = 10.0
        label, conf = mlp.predict(params, np.zeros(42), threshold=0.8)
        assert label == 0 and conf > 0.99

    def test_zero_threshold_never_rejects(self, rng):
        params = mlp.init_params(mlp.LayerSpec(), 0)
        for _ in range(10):
            assert mlp.predict(params, rng.normal(size=42), threshold=0.0) is not None


class TestModelFile:
    def test_round_trip(self, tmp_path, trained):
        params, _ = trained
        p = tmp_path / "m.tgn"
        mlp.save_params(params, p)
        back = mlp.load_params(p)
        assert back.spec == params.spec
        for a, b in zip(params.weights, back.weights):
            np.testing.assert_allclose(a, b, atol=1e-6)

    def test_payload_size(self, tmp_path, trained):
        params, _ = trained
        p = tmp_path / "m.tgn"
        mlp.save_params(params, p)
        header = 4 + 4 + 4 * 4 + 1  # magic, count, 4 widths, activation
        assert p.stat().st_size == header + 4 * 1158
        assert mlp.float_payload_bytes(params.spec) == 4 * 1158

    def test_bad_magic(self, tmp_path):
        p = tmp_path / "bad.tgn"
        p.write_bytes(b"NOPE" + b"\x00" * 64)
        with pytest.raises(mlp.ModelError, match="magic"):
            mlp.load_params(p)

    def test_truncated(self, tmp_path, trained):
        params, _ = trained
        p = tmp_path / "m.tgn"
        mlp.save_params(params, p)
        (tmp_path / "t.tgn").write_bytes(p.read_bytes()[:100])
        with pytest.raises(mlp.ModelError):
            mlp.load_params(tmp_path / "t.tgn")
