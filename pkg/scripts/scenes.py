"""Random synthetic scenes shared by the experiment scripts."""

import numpy as np

from skinseg.synth import Patch, SynthSpec, generate

SKIN_TYPES = {
    "white": (235, 200, 180),
    "yellow": (220, 180, 110),
    "red": (190, 100, 80),
}


def _cuts(rng, length, pieces):
    inner = np.sort(rng.choice(np.arange(8, length - 7), size=pieces - 1, replace=False))
    return np.diff(np.concatenate([[0], inner, [length]])).tolist()


def pure_skin(rng, color, size=96, jitter=10):
    spec = SynthSpec(size, size, [Patch(0, 0, size, size, color, jitter, True)],
                     seed=int(rng.integers(2**63)))
    return generate(spec)[0]


def scene(rng, width=256, height=256, cells=5, skin_share=0.4, jitter=10):
    """Irregular grid of patches; cell edges are not aligned to any window size."""
    patches = []
    y = 0
    for h in _cuts(rng, height, cells):
        x = 0
        for w in _cuts(rng, width, cells):
            if rng.random() < skin_share:
                color = list(SKIN_TYPES.values())[rng.integers(len(SKIN_TYPES))]
                patches.append(Patch(x, y, w, h, color, jitter, True))
            else:
                color = tuple(int(c) for c in rng.integers(0, 256, 3))
                patches.append(Patch(x, y, w, h, color, jitter, False))
            x += w
        y += h
    return generate(SynthSpec(width, height, patches, seed=int(rng.integers(2**63))))


def corpus(seed, n_images=20, train_per_type=10):
    rng = np.random.default_rng(seed)
    training = {name: [pure_skin(rng, color) for _ in range(train_per_type)]
                for name, color in SKIN_TYPES.items()}
    tests = [scene(rng) for _ in range(n_images)]
    return training, tests
