import numpy as np
from hypothesis import strategies as st
from hypothesis.extra import numpy as stnp

from skinseg.imaging import Image


def uniform_image(width, height, color):
    return Image(np.broadcast_to(np.array(color, dtype=np.uint8), (height, width, 3)))


def random_image(rng, width, height):
    return Image(rng.integers(0, 256, size=(height, width, 3), dtype=np.uint8))


def feature_like(rng, groups=16):
    """Random 3-channel vector whose channels each sum to 1, with some empty bins."""
    parts = []
    for _ in range(3):
        v = rng.random(groups) * (rng.random(groups) < 0.7)
        if v.sum() == 0:
            v[rng.integers(groups)] = 1.0
        parts.append(v / v.sum())
    return np.concatenate(parts)


@st.composite
def images(draw, max_side=24):
    h = draw(st.integers(1, max_side))
    w = draw(st.integers(1, max_side))
    return Image(draw(stnp.arrays(np.uint8, (h, w, 3))))
