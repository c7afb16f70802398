"""Quantized greyscale grids: binary PGM I/O, bit-depth reduction and
linear illumination correction.

The only file format supported is binary PGM ("P5") with maxval 255. Images
are stored as read-only (height, width) uint8 arrays together with a bit
depth B in [1, 8]; every pixel code is below 2**B.
"""

import logging

import numpy as np

from ace.errors import PgmParseError

log = logging.getLogger(__name__)

_WHITESPACE = b" \t\r\n\x0b\x0c"


class QuantizedImage:
    """Rectangular grid of B-bit pixel codes.

    data: (height, width) uint8 array, read-only after construction.
    bits: codes per pixel, in [1, 8]; every value is < 2**bits.
    """

    __slots__ = ("data", "bits")

    def __init__(self, data, bits: int):
        if not 1 <= int(bits) <= 8:
            raise ValueError(f"bits must be in [1, 8], got {bits}")
        arr = np.array(data, dtype=np.uint8, copy=True)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("data must be a non-empty 2-D grid")
        if arr.max(initial=0) >= (1 << int(bits)):
            raise ValueError(f"pixel value exceeds {bits}-bit range")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)
        object.__setattr__(self, "bits", int(bits))

    def __setattr__(self, name, value):
        raise AttributeError("QuantizedImage is immutable")

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    def __eq__(self, other):
        if not isinstance(other, QuantizedImage):
            return NotImplemented
        return self.bits == other.bits and np.array_equal(self.data, other.data)

    def __repr__(self):
        return f"QuantizedImage({self.width}x{self.height}, bits={self.bits})"


def _skip_separators(buf: bytes, pos: int) -> int:
    """Advance past whitespace and '#' comment lines in a PGM header."""
    n = len(buf)
    while pos < n:
        c = buf[pos : pos + 1]
        if c in _WHITESPACE:
            pos += 1
        elif c == b"#":
            nl = buf.find(b"\n", pos)
            pos = n if nl < 0 else nl + 1
        else:
            break
    return pos


def _read_int(buf: bytes, pos: int, what: str) -> tuple[int, int]:
    pos = _skip_separators(buf, pos)
    start = pos
    while pos < len(buf) and buf[pos : pos + 1].isdigit():
        pos += 1
    if pos == start:
        raise PgmParseError(f"expected {what} at byte {start}")
    return int(buf[start:pos]), pos


def load_pgm(buf: bytes) -> QuantizedImage:
    """Parse a binary PGM (magic P5, maxval 255) into an 8-bit image.

    Comment lines starting with '#' may appear between header fields. Raises
    PgmParseError naming the offending byte offset on malformed input.
    """
    buf = bytes(buf)
    if buf[:2] != b"P5":
        raise PgmParseError("not a binary PGM: bad magic at byte 0")
    width, pos = _read_int(buf, 2, "width")
    height, pos = _read_int(buf, pos, "height")
    maxval, pos = _read_int(buf, pos, "maxval")
    if width < 1 or height < 1:
        raise PgmParseError(f"bad dimensions {width}x{height} in header ending at byte {pos}")
    if maxval != 255:
        raise PgmParseError(f"unsupported maxval {maxval} at byte {pos}")
    if pos >= len(buf) or buf[pos : pos + 1] not in _WHITESPACE:
        raise PgmParseError(f"expected single whitespace after maxval at byte {pos}")
    pos += 1
    need = width * height
    payload = buf[pos : pos + need]
    if len(payload) < need:
        raise PgmParseError(
            f"truncated payload at byte {pos}: need {need} pixel bytes, have {len(payload)}"
        )
    data = np.frombuffer(payload, dtype=np.uint8).reshape(height, width)
    return QuantizedImage(data, 8)


def save_pgm(image: QuantizedImage) -> bytes:
    """Serialise to binary PGM with maxval 255.

    Values of B < 8 images are left-shifted by (8 - B) so they span the full
    display range; load_pgm(save_pgm(x)) == x holds for 8-bit images.
    """
    shifted = (image.data.astype(np.uint8) << (8 - image.bits)).astype(np.uint8)
    header = b"P5\n%d %d\n255\n" % (image.width, image.height)
    return header + shifted.tobytes()


def requantize(image: QuantizedImage, target_bits: int) -> QuantizedImage:
    """Drop low-order bits: each pixel is right-shifted by (bits - target_bits)."""
    if not 1 <= target_bits <= image.bits:
        raise ValueError(
            f"target_bits must be in [1, {image.bits}], got {target_bits}"
        )
    shift = image.bits - target_bits
    return QuantizedImage(image.data >> shift, target_bits)


def wedge_correct(image: QuantizedImage) -> QuantizedImage:
    """Remove the best-fit linear grey ramp while preserving the image mean.

    Fits v ~ a*col + b*row + c by least squares over all pixels (on a full
    grid the normal equations decouple, so a and b come straight from the
    per-axis covariances), subtracts the fitted ramp about its own mean,
    rounds half-up and clamps to the code range. The clamp count is logged
    as a warning when nonzero.
    """
    if image.width < 2 or image.height < 2:
        raise ValueError("wedge correction needs width and height >= 2")
    v = image.data.astype(np.float64)
    h, w = v.shape
    c_dev = np.arange(w, dtype=np.float64) - (w - 1) / 2.0
    r_dev = np.arange(h, dtype=np.float64) - (h - 1) / 2.0
    a = float(np.sum(v * c_dev[None, :]) / (np.sum(c_dev**2) * h))
    b = float(np.sum(v * r_dev[:, None]) / (np.sum(r_dev**2) * w))
    corrected = v - a * c_dev[None, :] - b * r_dev[:, None]
    rounded = np.floor(corrected + 0.5)
    top = float((1 << image.bits) - 1)
    clipped = np.clip(rounded, 0.0, top)
    n_clamped = int(np.count_nonzero(clipped != rounded))
    if n_clamped:
        log.warning("wedge correction clamped %d pixels", n_clamped)
    return QuantizedImage(clipped.astype(np.uint8), image.bits)
