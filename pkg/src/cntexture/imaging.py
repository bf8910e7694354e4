"""Image loading, resizing, and quantization.

Images are 8-bit, height x width x bands, stored as contiguous uint8 arrays
(row-major, band-interleaved). All operations are pure functions.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import DegenerateTarget, NonFiniteValue, UnreadableFile, UnsupportedFormat

RAW_MAGIC = b"TXR1"
PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


@dataclass(frozen=True)
class ImageTensor:
    """An M x N x B 8-bit image. `data` has shape (M, N, B), dtype uint8."""

    data: np.ndarray

    def __post_init__(self):
        if self.data.ndim != 3:
            raise ValueError(f"expected 3-d (M, N, B) array, got shape {self.data.shape}")
        if self.data.dtype != np.uint8:
            raise ValueError(f"expected uint8 data, got {self.data.dtype}")

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def bands(self) -> int:
        return self.data.shape[2]

    def band(self, b: int) -> np.ndarray:
        """One band as an (M, N) uint8 array."""
        return self.data[:, :, b]


def load_image(path) -> ImageTensor:
    """Load an 8-bit PNG (1 or 3 channels) or a TXR1 raw file."""
    path = Path(path)
    try:
        head = path.open("rb").read(8)
    except OSError as exc:
        raise UnreadableFile(f"{path}: {exc}") from exc
    if head[:4] == RAW_MAGIC:
        return _load_raw(path)
    if head == PNG_MAGIC:
        return _load_png(path)
    raise UnsupportedFormat(f"{path}: unknown codec (not PNG or TXR1)")


def _load_png(path: Path) -> ImageTensor:
    try:
        with Image.open(path) as img:
            img.load()
            mode = img.mode
            if mode not in ("L", "RGB"):
                raise UnsupportedFormat(f"{path}: unsupported PNG mode {mode!r} (need 8-bit L or RGB)")
            arr = np.asarray(img, dtype=np.uint8)
    except (UnidentifiedImageError, OSError) as exc:
        raise UnreadableFile(f"{path}: {exc}") from exc
    if arr.ndim == 2:
        arr = arr[:, :, None]
    return ImageTensor(np.ascontiguousarray(arr))


def _load_raw(path: Path) -> ImageTensor:
    try:
        blob = path.read_bytes()
    except OSError as exc:
        raise UnreadableFile(f"{path}: {exc}") from exc
    if len(blob) < 16:
        raise UnreadableFile(f"{path}: truncated raw header")
    m, n, b = struct.unpack_from("<III", blob, 4)
    if m == 0 or n == 0 or b == 0:
        raise UnsupportedFormat(f"{path}: raw header declares empty image {m}x{n}x{b}")
    expected = 16 + m * n * b
    if len(blob) != expected:
        raise UnreadableFile(f"{path}: raw payload is {len(blob) - 16} bytes, header implies {m * n * b}")
    data = np.frombuffer(blob, dtype=np.uint8, offset=16).reshape(m, n, b)
    return ImageTensor(data.copy())


def save_png(img: ImageTensor, path) -> None:
    """Write a 1- or 3-band tensor as an 8-bit PNG."""
    if img.bands == 1:
        Image.fromarray(img.data[:, :, 0], mode="L").save(path)
    elif img.bands == 3:
        Image.fromarray(img.data, mode="RGB").save(path)
    else:
        raise UnsupportedFormat(f"cannot encode {img.bands}-band image as PNG")


def save_raw(img: ImageTensor, path) -> None:
    """Write a tensor in the TXR1 raw format."""
    header = RAW_MAGIC + struct.pack("<III", img.height, img.width, img.bands)
    Path(path).write_bytes(header + img.data.tobytes())


def round_half_up(values: np.ndarray) -> np.ndarray:
    """Deterministic round-half-up for non-negative values."""
    return np.floor(values + 0.5)


def resize_bilinear(img: ImageTensor, target: tuple[int, int]) -> ImageTensor:
    """Resize to (M', N') with half-pixel-centered bilinear sampling per band."""
    m_out, n_out = target
    if m_out < 2 or n_out < 2:
        raise DegenerateTarget(f"target {m_out}x{n_out} is below the 2x2 minimum")
    m, n = img.height, img.width
    if (m_out, n_out) == (m, n):
        return ImageTensor(img.data.copy())

    src_y = np.clip((np.arange(m_out) + 0.5) * (m / m_out) - 0.5, 0.0, m - 1.0)
    src_x = np.clip((np.arange(n_out) + 0.5) * (n / n_out) - 0.5, 0.0, n - 1.0)
    y0 = np.floor(src_y).astype(np.intp)
    x0 = np.floor(src_x).astype(np.intp)
    y1 = np.minimum(y0 + 1, m - 1)
    x1 = np.minimum(x0 + 1, n - 1)
    fy = (src_y - y0)[:, None, None]
    fx = (src_x - x0)[None, :, None]

    data = img.data.astype(np.float64)
    top = data[y0][:, x0] * (1.0 - fx) + data[y0][:, x1] * fx
    bot = data[y1][:, x0] * (1.0 - fx) + data[y1][:, x1] * fx
    out = top * (1.0 - fy) + bot * fy
    return ImageTensor(np.clip(round_half_up(out), 0, 255).astype(np.uint8))


def quantize_map(values: np.ndarray) -> np.ndarray:
    """Min-max scale an (M, N) real map to uint8 with round-half-up.

    A constant map quantizes to all zeros (uniform regions are legitimate).
    """
    values = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(values)):
        raise NonFiniteValue("map contains NaN or Inf")
    lo = values.min()
    hi = values.max()
    if hi == lo:
        return np.zeros(values.shape, dtype=np.uint8)
    scaled = 255.0 * (values - lo) / (hi - lo)
    return round_half_up(scaled).astype(np.uint8)
