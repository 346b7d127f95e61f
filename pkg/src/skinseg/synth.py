"""
Seeded synthetic images made of flat, jittered color patches.

Random stream
-------------
Draws come from SplitMix64. Draw ``i`` (1-based, counting across the whole
image) is ``mix((seed + i * 0x9E3779B97F4A7C15) mod 2**64)`` with::

    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    z =  z ^ (z >> 31)

(all arithmetic mod 2**64). Patches are visited in row-major order of their
top-left corner ``(y0, x0)``; inside a patch pixels go row-major and each
pixel takes three draws for red, green, blue. Every pixel consumes draws,
even with zero jitter. A draw ``u`` becomes the offset
``(u mod (2j + 1)) - j`` for jitter ``j``, and the channel value is
``clamp(base + offset, 0, 255)``.

Text format
-----------
UTF-8, one directive per line, ``#`` starts a comment::

    size <width> <height>
    seed <integer>
    <x0> <y0> <w> <h> <r> <g> <b> <jitter> <skin 0|1>

``size`` is required, ``seed`` defaults to 0, and the patches must cover the
canvas exactly once.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .evaluation import GroundTruth
from .imaging import Image

__all__ = [
    "Patch",
    "SynthSpec",
    "SpecParseError",
    "splitmix64",
    "generate",
    "parse_spec",
    "format_spec",
]

GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
MASK64 = (1 << 64) - 1


class SpecParseError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class Patch:
    x0: int
    y0: int
    w: int
    h: int
    color: tuple[int, int, int]
    jitter: int = 0
    skin: bool = False

    def __post_init__(self):
        if self.w < 1 or self.h < 1:
            raise ValueError(f"patch extent must be positive, got {self.w}x{self.h}")
        if self.x0 < 0 or self.y0 < 0:
            raise ValueError("patch origin must be non-negative")
        color = tuple(int(c) for c in self.color)
        if len(color) != 3 or any(not 0 <= c <= 255 for c in color):
            raise ValueError(f"patch color must be three values in [0, 255], got {self.color}")
        if self.jitter < 0:
            raise ValueError("jitter must be non-negative")
        object.__setattr__(self, "color", color)


@dataclass(frozen=True)
class SynthSpec:
    width: int
    height: int
    patches: tuple[Patch, ...]
    seed: int = 0

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("canvas dimensions must be positive")
        object.__setattr__(self, "patches", tuple(self.patches))
        cover = np.zeros((self.height, self.width), dtype=np.int32)
        for p in self.patches:
            if p.x0 + p.w > self.width or p.y0 + p.h > self.height:
                raise ValueError(f"patch {p} extends past the {self.width}x{self.height} canvas")
            cover[p.y0 : p.y0 + p.h, p.x0 : p.x0 + p.w] += 1
        if (cover > 1).any():
            raise ValueError("patches overlap")
        if (cover == 0).any():
            raise ValueError("patches do not cover the whole canvas")


def splitmix64(seed: int, start: int, count: int) -> np.ndarray:
    """Draws ``start + 1 .. start + count`` of the stream for ``seed``."""
    index = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(seed & MASK64) + index * np.uint64(GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(MIX2)
    return z ^ (z >> np.uint64(31))


def generate(spec: SynthSpec) -> tuple[Image, GroundTruth]:
    pixels = np.zeros((spec.height, spec.width, 3), dtype=np.uint8)
    skin = np.zeros((spec.height, spec.width), dtype=bool)
    drawn = 0
    for p in sorted(spec.patches, key=lambda p: (p.y0, p.x0)):
        n = p.w * p.h * 3
        draws = splitmix64(spec.seed, drawn, n)
        drawn += n
        span = np.uint64(2 * p.jitter + 1)
        offsets = (draws % span).astype(np.int64) - p.jitter
        values = np.asarray(p.color, dtype=np.int64) + offsets.reshape(p.h, p.w, 3)
        pixels[p.y0 : p.y0 + p.h, p.x0 : p.x0 + p.w] = np.clip(values, 0, 255)
        skin[p.y0 : p.y0 + p.h, p.x0 : p.x0 + p.w] = p.skin
    return Image(pixels), GroundTruth(skin)


def _ints(tokens, lineno):
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise SpecParseError(lineno, f"expected integers, got {' '.join(tokens)!r}") from None


def parse_spec(text: str) -> SynthSpec:
    size = None
    seed = 0
    patches = []
    lineno = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        head = tokens[0].lower()
        if head == "size":
            if len(tokens) != 3:
                raise SpecParseError(lineno, "size takes <width> <height>")
            size = _ints(tokens[1:], lineno)
        elif head == "seed":
            if len(tokens) != 2:
                raise SpecParseError(lineno, "seed takes one integer")
            (seed,) = _ints(tokens[1:], lineno)
        else:
            if len(tokens) != 9:
                raise SpecParseError(
                    lineno, f"patch lines need 9 fields (x0 y0 w h r g b jitter skin), got {len(tokens)}"
                )
            x0, y0, w, h, r, g, b, jitter, flag = _ints(tokens, lineno)
            if flag not in (0, 1):
                raise SpecParseError(lineno, f"skin flag must be 0 or 1, got {flag}")
            try:
                patches.append(Patch(x0, y0, w, h, (r, g, b), jitter, bool(flag)))
            except ValueError as exc:
                raise SpecParseError(lineno, str(exc)) from None
    if size is None:
        raise SpecParseError(lineno, "missing 'size' directive")
    try:
        return SynthSpec(size[0], size[1], tuple(patches), seed)
    except ValueError as exc:
        raise SpecParseError(lineno, str(exc)) from None


def format_spec(spec: SynthSpec) -> str:
    lines = [f"size {spec.width} {spec.height}", f"seed {spec.seed}"]
    for p in spec.patches:
        r, g, b = p.color
        lines.append(f"{p.x0} {p.y0} {p.w} {p.h} {r} {g} {b} {p.jitter} {int(p.skin)}")
    return "\n".join(lines) + "\n"
