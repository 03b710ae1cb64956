import numpy as np
import pytest

from hierpix.features import assemble_features, position_planes, rgb_to_lab
from hierpix.partition import grid_partition


@pytest.fixture
def rng():
    return np.random.default_rng(20250808)


def random_label_map(rng, height, width, n):
    """Random (possibly fragmented) label map with all n labels present."""
    flat = rng.integers(0, n, height * width)
    flat[rng.choice(height * width, n, replace=False)] = np.arange(n)
    return flat.reshape(height, width).astype(np.int32)


def voronoi_label_map(rng, height, width, n):
    """Nearest-seed partition: blobby connected-ish regions."""
    seeds = rng.choice(height * width, n, replace=False)
    sy, sx = np.divmod(seeds, width)
    yy, xx = np.mgrid[0:height, 0:width]
    d2 = (yy[..., None] - sy) ** 2 + (xx[..., None] - sx) ** 2
    return np.argmin(d2, axis=-1).astype(np.int32)


def random_scene(rng, height=24, width=24, n_f=16, n_objects=3, deep_channels=0):
    """Image, fine partition, object map and feature field for small tests."""
    img = rng.integers(0, 256, (height, width, 3), dtype=np.uint8)
    deep = rng.random((height, width, deep_channels)) if deep_channels else None
    features = assemble_features(rgb_to_lab(img), position_planes(width, height), deep)
    fine = grid_partition(width, height, n_f)
    objects = voronoi_label_map(rng, height, width, n_objects)
    return img, fine, objects, features


def two_object_scene(rng, size=64, n_f=64):
    """Two identically textured halves, each one prior object."""
    tile = rng.integers(0, 256, (size, size // 2, 3), dtype=np.uint8)
    img = np.concatenate([tile, tile], axis=1)
    objects = np.zeros((size, size), dtype=np.int32)
    objects[:, size // 2 :] = 1
    fine = grid_partition(size, size, n_f)
    features = assemble_features(rgb_to_lab(img), position_planes(size, size))
    return img, fine, objects, features


def assert_label_maps_equivalent(a, b):
    """The two maps define the same partition (up to label renaming)."""
    a = np.asarray(a).ravel()
    b = np.asarray(b).ravel()
    assert a.shape == b.shape
    pair = a.astype(np.int64) * (b.max() + 1) + b
    assert len(np.unique(pair)) == len(np.unique(a)) == len(np.unique(b))
