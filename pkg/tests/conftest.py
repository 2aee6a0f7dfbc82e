import numpy as np
import pytest

from gesturebot import compress, landmarks, mlp


@pytest.fixture(scope="session")
def synth_dataset():
    return landmarks.generate_synthetic_dataset(200, 0.02, 7)


@pytest.fixture(scope="session")
def split_sets(synth_dataset):
    return landmarks.split_dataset(synth_dataset, 50, 7)


@pytest.fixture(scope="session")
def trained(split_sets):
    train_set, val_set = split_sets
    params, history = mlp.train(train_set, val_set, mlp.LayerSpec(), mlp.TrainConfig(seed=7))
    return params, history


@pytest.fixture(scope="session")
def quantized(trained, split_sets):
    params, _ = trained
    train_set, _ = split_sets
    return compress.quantize(params, train_set)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
