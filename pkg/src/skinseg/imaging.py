"""Raster container, binary netpbm codecs and non-overlapping window tiling."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Image",
    "Region",
    "WindowGrid",
    "PnmError",
    "MalformedHeaderError",
    "UnsupportedMaxvalError",
    "TruncatedPayloadError",
    "decode_ppm",
    "encode_ppm",
    "decode_pgm",
    "encode_gray",
    "encode_pgm",
    "label_byte",
    "tile",
]

MAXVAL = 255
_WHITESPACE = b" \t\n\r\v\f"


class PnmError(ValueError):
    """Base class for netpbm decoding failures."""


class MalformedHeaderError(PnmError):
    pass


class UnsupportedMaxvalError(PnmError):
    pass


class TruncatedPayloadError(PnmError):
    pass


def _frozen(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class Image:
    """An 8-bit RGB raster stored row-major as a ``(height, width, 3)`` array.

    The pixel array is copied on construction and made read-only.
    """

    pixels: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.pixels)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise ValueError(f"expected a (height, width, 3) array, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("image dimensions must be positive")
        if arr.dtype != np.uint8:
            if not np.issubdtype(arr.dtype, np.integer):
                raise TypeError(f"pixel values must be integers, got {arr.dtype}")
            if arr.min() < 0 or arr.max() > MAXVAL:
                raise ValueError("channel values must lie in [0, 255]")
        object.__setattr__(self, "pixels", _frozen(np.array(arr, dtype=np.uint8)))

    @classmethod
    def from_triples(cls, width: int, height: int, triples) -> Image:
        """Build an image from a flat row-major sequence of ``(r, g, b)``."""
        arr = np.asarray(list(triples), dtype=np.int64)
        if arr.shape != (width * height, 3):
            raise ValueError(
                f"expected {width * height} triples for a {width}x{height} image, got {len(arr)}"
            )
        return cls(arr.reshape(height, width, 3))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def triples(self) -> list[tuple[int, int, int]]:
        return [tuple(int(c) for c in px) for px in self.pixels.reshape(-1, 3)]

    def region(self, x0: int, y0: int, w: int, h: int) -> Region:
        return Region(self, x0, y0, w, h)

    def whole(self) -> Region:
        return Region(self, 0, 0, self.width, self.height)

    def __eq__(self, other):
        if not isinstance(other, Image):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)

    __hash__ = None

    def __repr__(self):
        return f"Image({self.width}x{self.height})"


@dataclass(frozen=True)
class Region:
    """Axis-aligned rectangle ``[x0, x0+w) x [y0, y0+h)`` of a parent image."""

    image: Image = field(repr=False, compare=False)
    x0: int
    y0: int
    w: int
    h: int

    def __post_init__(self):
        if self.w < 1 or self.h < 1:
            raise ValueError(f"region extent must be positive, got {self.w}x{self.h}")
        if (
            self.x0 < 0
            or self.y0 < 0
            or self.x0 + self.w > self.image.width
            or self.y0 + self.h > self.image.height
        ):
            raise ValueError(
                f"region ({self.x0}, {self.y0}, {self.w}, {self.h}) exceeds "
                f"{self.image.width}x{self.image.height} image"
            )

    @property
    def pixels(self) -> np.ndarray:
        return self.image.pixels[self.y0 : self.y0 + self.h, self.x0 : self.x0 + self.w]

    @property
    def size(self) -> int:
        return self.w * self.h


@dataclass(frozen=True)
class WindowGrid:
    window_w: int
    window_h: int
    columns: int
    rows: int
    regions: tuple[Region, ...] = field(repr=False)

    def __len__(self):
        return len(self.regions)

    def __iter__(self):
        return iter(self.regions)

    def __getitem__(self, index: int) -> Region:
        return self.regions[index]

    def index_map(self) -> np.ndarray:
        """Per-pixel window index, shape ``(height, width)``."""
        first = self.regions[0].image
        rows = np.arange(first.height) // self.window_h
        cols = np.arange(first.width) // self.window_w
        return rows[:, None] * self.columns + cols[None, :]


def tile(image: Image, window_w: int, window_h: int) -> WindowGrid:
    """Partition ``image`` into non-overlapping windows in row-major order.

    Windows in the last column or row keep whatever width/height remains,
    so every pixel belongs to exactly one window.
    """
    if window_w < 1 or window_h < 1:
        raise ValueError(f"window must be at least 1x1, got {window_w}x{window_h}")
    if window_w > image.width or window_h > image.height:
        raise ValueError(
            f"{window_w}x{window_h} window does not fit a {image.width}x{image.height} image"
        )
    columns = math.ceil(image.width / window_w)
    rows = math.ceil(image.height / window_h)
    regions = []
    for r in range(rows):
        y0 = r * window_h
        h = min(window_h, image.height - y0)
        for c in range(columns):
            x0 = c * window_w
            w = min(window_w, image.width - x0)
            regions.append(Region(image, x0, y0, w, h))
    return WindowGrid(window_w, window_h, columns, rows, tuple(regions))


# -- netpbm ---------------------------------------------------------------


def _parse_header(data: bytes, magic: bytes) -> tuple[int, int, int]:
    """Return ``(width, height, payload_offset)`` for a binary netpbm file."""
    if data[:2] != magic:
        raise MalformedHeaderError(f"expected magic {magic.decode()!r}, got {data[:2]!r}")
    pos = 2
    fields = []
    while len(fields) < 3:
        if pos >= len(data):
            raise MalformedHeaderError("header ended before width, height and maxval")
        ch = data[pos : pos + 1]
        if ch in _WHITESPACE:
            pos += 1
        elif ch == b"#":
            end = data.find(b"\n", pos)
            if end < 0:
                raise MalformedHeaderError("unterminated header comment")
            pos = end + 1
        else:
            if pos == 2:
                raise MalformedHeaderError("magic number must be followed by whitespace")
            start = pos
            while pos < len(data) and data[pos : pos + 1] not in _WHITESPACE + b"#":
                pos += 1
            token = data[start:pos]
            if not token.isdigit():
                raise MalformedHeaderError(f"non-numeric header field {token!r}")
            fields.append(int(token))
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise MalformedHeaderError(f"dimensions must be positive, got {width}x{height}")
    if maxval != MAXVAL:
        raise UnsupportedMaxvalError(f"only maxval 255 is supported, got {maxval}")
    # exactly one whitespace byte separates maxval from the raster
    if pos >= len(data) or data[pos : pos + 1] not in _WHITESPACE:
        raise MalformedHeaderError("missing whitespace after maxval")
    return width, height, pos + 1


def _payload(data: bytes, offset: int, expected: int) -> np.ndarray:
    raw = data[offset : offset + expected]
    if len(raw) < expected:
        raise TruncatedPayloadError(f"expected {expected} payload bytes, got {len(raw)}")
    return np.frombuffer(raw, dtype=np.uint8)


def decode_ppm(data: bytes) -> Image:
    """Decode a binary ``P6`` PPM with maxval 255.

    Raises
    ------
    MalformedHeaderError
        Bad magic, non-numeric or missing header fields.
    UnsupportedMaxvalError
        Any maxval other than 255.
    TruncatedPayloadError
        Fewer than ``3 * width * height`` raster bytes.
    """
    width, height, offset = _parse_header(bytes(data), b"P6")
    raster = _payload(data, offset, 3 * width * height)
    return Image(raster.reshape(height, width, 3))


def encode_ppm(image: Image) -> bytes:
    header = f"P6\n{image.width} {image.height}\n{MAXVAL}\n".encode("ascii")
    return header + image.pixels.tobytes()


def decode_pgm(data: bytes) -> np.ndarray:
    """Decode a binary ``P5`` PGM (maxval 255) into a ``(height, width)`` uint8 array."""
    width, height, offset = _parse_header(bytes(data), b"P5")
    return _payload(data, offset, width * height).reshape(height, width).copy()


def encode_gray(values: np.ndarray) -> bytes:
    """Encode a 2-D uint8-valued array as binary PGM."""
    arr = np.asarray(values)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D array, got shape {arr.shape}")
    if arr.size and (arr.min() < 0 or arr.max() > MAXVAL):
        raise ValueError("gray values must lie in [0, 255]")
    header = f"P5\n{arr.shape[1]} {arr.shape[0]}\n{MAXVAL}\n".encode("ascii")
    return header + arr.astype(np.uint8).tobytes()


def label_byte(k: int, n_classes: int) -> int:
    """Gray level of 1-based class ``k`` out of ``n_classes``; 0 means non-skin."""
    if k == 0:
        return 0
    return (MAXVAL * k) // n_classes


def encode_pgm(mask) -> bytes:
    """Encode a detection mask as binary PGM.

    ``mask`` needs ``labels`` (2-D ints, 0 = non-skin, k = 1-based class) and
    ``class_names``. Class ``k`` of ``K`` is written as ``floor(255 * k / K)``.
    """
    n_classes = len(mask.class_names)
    if n_classes > MAXVAL:
        raise ValueError(f"at most {MAXVAL} classes can be encoded, got {n_classes}")
    lut = np.array([label_byte(k, max(n_classes, 1)) for k in range(n_classes + 1)], dtype=np.uint8)
    return encode_gray(lut[np.asarray(mask.labels)])
