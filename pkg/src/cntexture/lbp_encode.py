"""Uniform LBP coding, 59-bin histograms, and the global feature vector.

Codes use 8 fixed neighbors on the unit ring around each interior pixel,
enumerated counter-clockwise from the right neighbor. Codes with at most two
circular bit transitions keep their own bin (58 of them, in ascending code
order); everything else shares the final bin, for 59 bins per histogram.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import BandMismatch, BorderPixel, ImageTooSmall
from .imaging import ImageTensor

# (dx, dy) per bit position p = 0..7, counter-clockwise from (x+1, y).
NEIGHBOR_OFFSETS = ((1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1))

BIN_COUNT = 59
NONUNIFORM_BIN = 58


def uniformity(code: int) -> int:
    """Circular 0/1 transition count of an 8-bit code."""
    if not 0 <= code <= 255:
        raise ValueError(f"code {code} outside 0..255")
    bits = [(code >> p) & 1 for p in range(8)]
    return abs(bits[7] - bits[0]) + sum(abs(bits[p] - bits[p - 1]) for p in range(1, 8))


@dataclass(frozen=True)
class UlbpTable:
    """Maps each 8-bit code to its histogram bin (0..58)."""

    bin_of_code: np.ndarray

    @property
    def uniform_code_count(self) -> int:
        return int(np.sum(self.bin_of_code < NONUNIFORM_BIN))


@lru_cache(maxsize=1)
def make_table() -> UlbpTable:
    bins = np.full(256, NONUNIFORM_BIN, dtype=np.int64)
    slot = 0
    for code in range(256):
        if uniformity(code) <= 2:
            bins[code] = slot
            slot += 1
    assert slot == 58
    return UlbpTable(bin_of_code=bins)


def _code_image(band: np.ndarray, offsets=NEIGHBOR_OFFSETS) -> np.ndarray:
    """Codes of all interior pixels as an (M-2, N-2) array."""
    center = band[1:-1, 1:-1].astype(np.int16)
    codes = np.zeros(center.shape, dtype=np.int64)
    for p, (dx, dy) in enumerate(offsets):
        neighbor = band[1 + dy:band.shape[0] - 1 + dy, 1 + dx:band.shape[1] - 1 + dx].astype(np.int16)
        codes |= ((neighbor - center) > 0).astype(np.int64) << p
    return codes


def lbp_code(band: np.ndarray, pixel: tuple[int, int]) -> int:
    """LBP code of one interior pixel (y, x)."""
    band = np.asarray(band)
    y, x = pixel
    m, n = band.shape
    if not (1 <= y <= m - 2 and 1 <= x <= n - 2):
        raise BorderPixel(f"pixel {pixel} has no full 8-neighborhood in {m}x{n}")
    center = int(band[y, x])
    code = 0
    for p, (dx, dy) in enumerate(NEIGHBOR_OFFSETS):
        if int(band[y + dy, x + dx]) - center > 0:
            code |= 1 << p
    return code


def ulbp_histogram(band: np.ndarray, table: UlbpTable | None = None, normalize: bool = True) -> np.ndarray:
    """59-bin histogram of the interior pixels' codes; L1-normalized by default."""
    band = np.asarray(band)
    m, n = band.shape
    if m < 3 or n < 3:
        raise ImageTooSmall(f"{m}x{n} band has no interior pixel")
    if table is None:
        table = make_table()
    codes = _code_image(band)
    hist = np.bincount(table.bin_of_code[codes.ravel()], minlength=BIN_COUNT).astype(np.float64)
    if normalize:
        hist /= hist.sum()
    return hist


@dataclass(frozen=True)
class GlobalFeatureVector:
    """Concatenated histograms, laid out [BI bands | CC bands | DC bands | EC bands]."""

    values: np.ndarray
    bands: int

    def __post_init__(self):
        if self.values.size != self.bands * BIN_COUNT * 4:
            raise ValueError(
                f"length {self.values.size} does not match {self.bands} bands x {BIN_COUNT} x 4"
            )


def global_vector(
    bi: ImageTensor,
    feature_bands: Sequence[tuple[np.ndarray, np.ndarray, np.ndarray]],
    normalize: bool = True,
) -> GlobalFeatureVector:
    """Concatenate the four per-band histogram blocks into one vector.

    `feature_bands[b]` holds the quantized (CC, DC, EC) images of band b.
    """
    if len(feature_bands) != bi.bands:
        raise BandMismatch(f"{len(feature_bands)} feature triples for {bi.bands} bands")
    table = make_table()
    blocks = []
    for source in range(4):
        for b in range(bi.bands):
            band = bi.band(b) if source == 0 else feature_bands[b][source - 1]
            blocks.append(ulbp_histogram(band, table, normalize=normalize))
    return GlobalFeatureVector(values=np.concatenate(blocks), bands=bi.bands)
