import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import images, random_image, uniform_image
from oracles import bucket_features, tally
from skinseg.features import (
    Channel,
    ChannelHistogram,
    FeatureVector,
    channel_histogram,
    extract_features,
    quantize,
)
from skinseg.imaging import Image


def test_histogram_uniform_red():
    region = uniform_image(2, 2, (200, 0, 0)).whole()
    h = channel_histogram(region, Channel.RED)
    assert h.total == 4 and h.counts[200] == 4 and h.counts.sum() == 4


def test_histogram_uniform_green():
    region = uniform_image(2, 2, (200, 0, 0)).whole()
    assert channel_histogram(region, Channel.GREEN).counts[0] == 4


def test_histogram_matches_tally(rng):
    for _ in range(10):
        region = random_image(rng, 16, 16).whole()
        for c in Channel:
            assert channel_histogram(region, c).counts.tolist() == tally(region.pixels, c)


def test_quantize_single_bin_mass():
    f = extract_features(uniform_image(4, 4, (255, 0, 0)).whole(), 16)
    assert len(f) == 48
    assert f.channel(Channel.RED).tolist() == [0.0] * 15 + [1.0]
    assert f.channel(Channel.GREEN).tolist() == [1.0] + [0.0] * 15
    assert f.channel(Channel.BLUE).tolist() == [1.0] + [0.0] * 15


def test_quantize_width_64():
    f = extract_features(uniform_image(4, 4, (1, 2, 3)).whole(), 64)
    assert len(f) == 12


def test_quantize_two_bins_split():
    px = np.zeros((2, 2, 3), dtype=np.uint8)
    px[0, :, 0] = 16  # half the red values 0, half 16
    f = extract_features(Image(px).whole(), 16)
    assert f.channel(Channel.RED)[:3].tolist() == [0.5, 0.5, 0.0]


@pytest.mark.parametrize("n", [0, 3, 24, 512])
def test_quantize_rejects_non_divisor(n):
    region = uniform_image(2, 2, (0, 0, 0)).whole()
    with pytest.raises(ValueError):
        extract_features(region, n)


def test_quantize_rejects_empty_and_mismatched():
    empty = ChannelHistogram(np.zeros(256, dtype=int), 0)
    with pytest.raises(ValueError):
        quantize([empty] * 3, 16)
    a = ChannelHistogram(np.bincount([1], minlength=256), 1)
    b = ChannelHistogram(np.bincount([1, 2], minlength=256), 2)
    with pytest.raises(ValueError):
        quantize([a, a, b], 16)


def test_layout_blind():
    px = np.arange(48, dtype=np.uint8).reshape(4, 4, 3)
    flipped = px[::-1, ::-1].copy()
    assert extract_features(Image(px).whole()) == extract_features(Image(flipped).whole())


@pytest.mark.parametrize("n", [8, 16, 32, 64])
def test_matches_bucketing_oracle(rng, n):
    for _ in range(25):
        region = random_image(rng, 16, 16).whole()
        expected = bucket_features(region.pixels, n)
        got = extract_features(region, n).values
        assert np.max(np.abs(got - expected)) <= 1e-12


def test_edge_window_normalized_by_own_size():
    img = uniform_image(24, 16, (10, 20, 30))
    small = img.region(16, 0, 8, 16)
    assert extract_features(small) == extract_features(img.region(0, 0, 16, 16))


@given(images(max_side=16), st.sampled_from([1, 2, 4, 8, 16, 32, 64, 128, 256]))
def test_channels_sum_to_one(img, n):
    f = extract_features(img.whole(), n)
    groups = 256 // n
    assert len(f) == 3 * groups
    assert ((f.values >= 0) & (f.values <= 1)).all()
    assert np.allclose(f.values.reshape(3, groups).sum(axis=1), 1.0, atol=1e-9, rtol=0)


@given(images(max_side=12), st.randoms(use_true_random=False))
def test_permutation_invariance(img, random):
    flat = img.pixels.reshape(-1, 3).copy()
    order = list(range(len(flat)))
    random.shuffle(order)
    shuffled = Image(flat[order].reshape(img.pixels.shape))
    assert extract_features(shuffled.whole()) == extract_features(img.whole())


@given(images(max_side=12), st.sampled_from([1, 2, 4, 8, 16, 32, 64, 128]))
def test_refinement_consistency(img, n):
    fine = extract_features(img.whole(), n).values
    coarse = extract_features(img.whole(), 2 * n).values
    assert np.max(np.abs(fine.reshape(-1, 2).sum(axis=1) - coarse)) <= 1e-12


class TestFeatureVector:
    def test_rejects_bad_mass(self):
        with pytest.raises(ValueError):
            FeatureVector(np.full(48, 0.5), 16)

    def test_rejects_wrong_length(self):
        with pytest.raises(ValueError):
            FeatureVector(np.ones(3), 16)

    def test_equality(self):
        a = extract_features(uniform_image(2, 2, (1, 1, 1)).whole())
        b = extract_features(uniform_image(3, 3, (1, 1, 1)).whole())
        assert a == b
        assert a != extract_features(uniform_image(2, 2, (1, 1, 1)).whole(), 32)
