"""Seeded synthetic texture corpus: oriented gratings plus Gaussian noise.

Each class is a sinusoidal grating at its own orientation and frequency;
every image gets a random phase and additive noise from one seeded generator,
so a (directory, seed) pair always reproduces the identical corpus.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .imaging import ImageTensor, save_png

GRATING_CLASSES = (
    (0.0, 0.055),
    (45.0, 0.085),
    (90.0, 0.13),
    (135.0, 0.19),
)  # (orientation degrees, cycles per pixel)


def grating(size: int, angle_deg: float, frequency: float, phase: float,
            noise: np.ndarray, amplitude: float = 90.0) -> np.ndarray:
    theta = np.deg2rad(angle_deg)
    y, x = np.mgrid[0:size, 0:size].astype(np.float64)
    wave = np.sin(2.0 * np.pi * frequency * (x * np.cos(theta) + y * np.sin(theta)) + phase)
    values = 127.5 + amplitude * wave + noise
    return np.clip(np.floor(values + 0.5), 0, 255).astype(np.uint8)


def make_corpus(out_dir, seed: int = 42, per_class: int = 40, size: int = 128,
                noise_sigma: float = 12.0) -> Path:
    """Write PNGs and a manifest under `out_dir`; returns the manifest path."""
    out = Path(out_dir)
    rng = np.random.default_rng(seed)
    lines = [f"# synthetic grating corpus, seed {seed}"]
    for cls, (angle, freq) in enumerate(GRATING_CLASSES):
        lines.append(f"# class {cls} grating_{int(angle)}deg")
        cls_dir = out / f"class{cls}"
        cls_dir.mkdir(parents=True, exist_ok=True)
        for i in range(per_class):
            phase = rng.uniform(0.0, 2.0 * np.pi)
            noise = rng.normal(0.0, noise_sigma, size=(size, size))
            band = grating(size, angle, freq, phase, noise)
            path = cls_dir / f"img{i:03d}.png"
            save_png(ImageTensor(band[:, :, None]), path)
            lines.append(f"class{cls}/img{i:03d}.png,{cls}")
    manifest = out / "manifest.txt"
    manifest.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return manifest
