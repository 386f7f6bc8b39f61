import numpy as np
import pytest

from cht.dataset import ClassedDataset


def make_noise_dataset(n=30, p=6, seed=0, names=()):
    """Balanced two-class dataset with independent standard normal features."""
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, p))
    y = np.repeat([1, 2], [n - n // 2, n // 2])
    return ClassedDataset(x, y, feature_names=names)


@pytest.fixture
def noise_dataset():
    return make_noise_dataset(n=40, p=8, seed=11)
