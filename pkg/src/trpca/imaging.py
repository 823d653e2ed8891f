"""Color-image ingestion, corruption, recovery, and PSNR scoring.

Images are 3-channel tensors with channels as frontal slices (height x width
x 3). Values live in [0, 1] doubles internally; the original bit depth is
recorded so files round-trip exactly. The supported on-disk format is binary
PPM (P6), written with a canonical header so save(load(f)) is byte-identical.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .solver import SolverConfig, TrpcaSolution, solve
from .tensor3 import Tensor3
from .transform import Transform, make_dct


@dataclass(frozen=True)
class ImageTensor:
    """A color image as a height x width x 3 tensor in [0, 1]."""

    tensor: Tensor3
    max_value: float = 255.0

    def __post_init__(self):
        if self.tensor.n3 != 3:
            raise ValueError(f"expected 3 channels, got n3={self.tensor.n3}")
        if self.max_value <= 0:
            raise ValueError("max_value must be positive")

    @property
    def height(self) -> int:
        return self.tensor.n1

    @property
    def width(self) -> int:
        return self.tensor.n2


_PPM_HEADER = re.compile(rb"^(P[56])\s+(?:#[^\n]*\n\s*)*(\d+)\s+(\d+)\s+(\d+)\s")


def load_image(path) -> ImageTensor:
    """Load a binary PPM (P6). Grayscale (P5) is rejected: 3 channels required."""
    with open(path, "rb") as f:
        blob = f.read()
    match = _PPM_HEADER.match(blob)
    if match is None:
        raise ValueError(f"{path}: not a binary PPM file")
    kind, width, height, maxval = (
        match.group(1),
        int(match.group(2)),
        int(match.group(3)),
        int(match.group(4)),
    )
    if kind == b"P5":
        raise ValueError(f"{path}: grayscale PGM; a 3-channel PPM is required")
    if not 0 < maxval < 256:
        raise ValueError(f"{path}: unsupported maxval {maxval} (8-bit only)")
    pixels = blob[match.end():]
    expected = width * height * 3
    if len(pixels) != expected:
        raise ValueError(
            f"{path}: payload has {len(pixels)} bytes, expected {expected}"
        )
    raw = np.frombuffer(pixels, dtype=np.uint8).reshape(height, width, 3)
    return ImageTensor(Tensor3(raw / maxval), max_value=float(maxval))


def save_image(img: ImageTensor, path) -> None:
    """Write a binary PPM (P6) with a canonical header."""
    maxval = int(img.max_value)
    raw = np.rint(np.clip(img.tensor.data, 0.0, 1.0) * maxval).astype(np.uint8)
    with open(path, "wb") as f:
        f.write(f"P6\n{img.width} {img.height}\n{maxval}\n".encode())
        f.write(raw.tobytes())


def corrupt(
    img: ImageTensor, fraction: float, seed: int
) -> tuple[ImageTensor, Tensor3]:
    """Replace a random fraction of pixels by uniform noise over the full range.

    Picks ``round(fraction * height * width)`` pixel positions uniformly
    without replacement and overwrites all three channels at each with
    independent uniform values. Returns the corrupted image and a 0/1 mask
    marking every overwritten entry.
    """
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f"fraction must lie in [0, 1], got {fraction}")
    h, w = img.height, img.width
    npix = round(fraction * h * w)
    rng = np.random.default_rng(seed)
    chosen = rng.permutation(h * w)[:npix]
    rows, cols = np.unravel_index(chosen, (h, w))
    data = img.tensor.data.copy()
    mask = np.zeros_like(data)
    data[rows, cols, :] = rng.uniform(0.0, 1.0, size=(npix, 3))
    mask[rows, cols, :] = 1.0
    return ImageTensor(Tensor3(data), max_value=img.max_value), Tensor3(mask)


def psnr(estimate: ImageTensor, reference: ImageTensor) -> float:
    """Peak signal-to-noise ratio in dB.

    ``10 * log10(peak^2 / mse)`` with the peak taken from the reference's
    max-abs entry. Identical inputs return ``math.inf``.
    """
    if estimate.tensor.dims != reference.tensor.dims:
        raise ValueError("estimate and reference dims differ")
    diff = estimate.tensor.data - reference.tensor.data
    mse = float(np.mean(diff**2))
    if mse == 0.0:
        return math.inf
    peak = float(np.abs(reference.tensor.data).max())
    if peak == 0.0:
        raise ValueError("reference image is identically zero")
    return 10.0 * math.log10(peak**2 / mse)


def denoise(
    img: ImageTensor,
    t: Transform | None = None,
    solver_cfg: SolverConfig | None = None,
) -> tuple[ImageTensor, TrpcaSolution]:
    """Separate the image into low-rank content and sparse corruption.

    The recovered image is the low-rank component clamped to [0, 1]. The DCT
    transform is the default (random transforms recover images poorly).
    """
    if t is None:
        t = make_dct(3)
    sol = solve(img.tensor, t, solver_cfg)
    recovered = ImageTensor(
        Tensor3(np.clip(sol.low_rank.data, 0.0, 1.0)), max_value=img.max_value
    )
    return recovered, sol


def synthetic_low_rank_image(
    height: int = 48, width: int = 48, seed: int = 0
) -> ImageTensor:
    """Smooth rank-3 color test pattern.

    Each DCT-domain channel slice is a rank-3 sum of outer products of smooth
    cosine profiles, so the image is (approximately, after range rescaling)
    of low tubal rank under the DCT transform.
    """
    rng = np.random.default_rng(seed)

    def profiles(n: int) -> np.ndarray:
        grid = np.linspace(0.0, 1.0, n)
        freqs = rng.uniform(0.5, 2.5, size=3)
        phases = rng.uniform(0.0, 2.0 * np.pi, size=3)
        return np.stack(
            [np.cos(2.0 * np.pi * f * grid + p) for f, p in zip(freqs, phases)],
            axis=1,
        )

    slice_weights = (1.0, 0.25, 0.1)  # DC-heavy: most energy in the first slice
    bar = np.zeros((height, width, 3))
    for c, weight in enumerate(slice_weights):
        rows, cols = profiles(height), profiles(width)
        gains = rng.uniform(0.5, 1.0, size=3)
        bar[:, :, c] = weight * (rows * gains) @ cols.T
    data = make_dct(3).apply_inverse_array(bar)
    lo, hi = data.min(), data.max()
    data = 0.05 + 0.9 * (data - lo) / (hi - lo)
    return ImageTensor(Tensor3(data))
