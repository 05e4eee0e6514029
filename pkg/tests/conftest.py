import numpy as np
import pytest

from hgmeans import Dataset


@pytest.fixture(scope="session")
def iris_file(tmp_path_factory):
    """Fisher's Iris data written in the labeled on-disk format."""
    from sklearn.datasets import load_iris

    data = load_iris()
    path = tmp_path_factory.mktemp("data") / "iris.txt"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{data.data.shape[0]} {data.data.shape[1]}\n")
        for row, label in zip(data.data, data.target):
            coords = " ".join(repr(float(v)) for v in row)
            fh.write(f"{coords} {int(label)}\n")
    return path


@pytest.fixture
def line4():
    """Four collinear points whose optimal 2-clustering is {0,1} {9,10}."""
    return Dataset(points=np.array([[0.0], [1.0], [9.0], [10.0]]), name="line4")


def random_instance(rng, n_max=200, d_max=6, m_max=10):
    """A random clustered point cloud plus a sampled-center init."""
    n = int(rng.integers(8, n_max + 1))
    d = int(rng.integers(1, d_max + 1))
    m = int(rng.integers(1, min(m_max, n) + 1))
    hubs = rng.uniform(-10, 10, size=(max(2, m), d))
    which = rng.integers(0, hubs.shape[0], size=n)
    points = hubs[which] + rng.normal(scale=1.5, size=(n, d))
    init = points[rng.choice(n, size=m, replace=False)].copy()
    return points, init
