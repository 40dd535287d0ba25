"""Portable graymap I/O and synthetic dataset generation.

Images are binary P5 files (maxval 255).  Color P6 input is converted
to luma on ingest with the BT.601 weights.
"""

from pathlib import Path

import numpy as np

from .errors import IoError


def _read_tokens(data: bytes, count: int):
    """First `count` whitespace tokens after the magic, skipping comments."""
    tokens = []
    i = 0
    while len(tokens) < count:
        while i < len(data) and data[i : i + 1].isspace():
            i += 1
        if i < len(data) and data[i : i + 1] == b"#":
            while i < len(data) and data[i : i + 1] != b"\n":
                i += 1
            continue
        start = i
        while i < len(data) and not data[i : i + 1].isspace():
            i += 1
        if start == i:
            raise IoError("truncated graymap header")
        tokens.append(data[start:i])
    return tokens, i + 1  # single whitespace after maxval precedes raster


def read_image(path) -> np.ndarray:
    """Read P5 (grayscale) or P6 (color, converted to luma) at maxval 255."""
    try:
        data = Path(path).read_bytes()
    except OSError as e:
        raise IoError(str(e)) from e
    magic = data[:2]
    if magic not in (b"P5", b"P6"):
        raise IoError(f"not a binary PNM file: {path}")
    try:
        (w, h, maxval), offset = _read_tokens(data[2:], 3)
        width, height, maxval = int(w), int(h), int(maxval)
    except (IoError, ValueError) as e:
        raise IoError(f"bad PNM header in {path}") from e
    if maxval != 255:
        raise IoError(f"only maxval 255 supported, got {maxval} in {path}")
    channels = 1 if magic == b"P5" else 3
    raster = data[2 + offset :]
    need = width * height * channels
    if len(raster) < need:
        raise IoError(f"truncated raster in {path}")
    pixels = np.frombuffer(raster[:need], dtype=np.uint8)
    if channels == 1:
        return pixels.reshape(height, width).copy()
    rgb = pixels.reshape(height, width, 3).astype(np.float64)
    luma = 0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2]
    return np.clip(np.rint(luma), 0, 255).astype(np.uint8)


def write_image(img: np.ndarray, path) -> None:
    if img.ndim != 2 or img.dtype != np.uint8:
        raise IoError(f"can only write 2-D uint8 images, got {img.shape} {img.dtype}")
    h, w = img.shape
    try:
        with open(path, "wb") as f:
            f.write(b"P5\n%d %d\n255\n" % (w, h))
            f.write(img.tobytes())
    except OSError as e:
        raise IoError(str(e)) from e


def smooth_gradient(size: int) -> np.ndarray:
    """Fixed low-frequency test image; index 0 of every generated dataset."""
    ii, jj = np.meshgrid(np.arange(size), np.arange(size), indexing="ij")
    u = ii / max(size - 1, 1)
    v = jj / max(size - 1, 1)
    g = (
        0.30 * (u + v) / 2.0
        + 0.28
        + 0.18 * np.sin(2.0 * np.pi * 5.3 * u) * np.cos(2.0 * np.pi * 4.1 * v)
        + 0.12 * np.sin(2.0 * np.pi * (9.7 * u + 7.9 * v))
        + 0.08 * np.cos(2.0 * np.pi * 13.1 * v)
    )
    return np.clip(np.rint(g * 255.0), 0, 255).astype(np.uint8)


def _synthetic_image(size: int, rng: np.random.Generator) -> np.ndarray:
    ii, jj = np.meshgrid(np.arange(size), np.arange(size), indexing="ij")
    u = ii / max(size - 1, 1)
    v = jj / max(size - 1, 1)
    kind = rng.integers(3)
    if kind == 0:  # tilted gradient
        theta = rng.uniform(0, 2 * np.pi)
        g = 0.5 + 0.45 * (np.cos(theta) * (u - 0.5) + np.sin(theta) * (v - 0.5))
    elif kind == 1:  # gaussian blobs
        g = np.full((size, size), rng.uniform(0.1, 0.3))
        for _ in range(rng.integers(1, 4)):
            cx, cy = rng.uniform(0.2, 0.8, size=2)
            s = rng.uniform(0.05, 0.25)
            g = g + rng.uniform(0.3, 0.7) * np.exp(-(((u - cx) ** 2 + (v - cy) ** 2) / (2 * s * s)))
    else:  # stripes
        freq = rng.uniform(2, 8)
        phase = rng.uniform(0, 2 * np.pi)
        theta = rng.uniform(0, np.pi)
        g = 0.5 + 0.4 * np.sin(2 * np.pi * freq * (np.cos(theta) * u + np.sin(theta) * v) + phase)
    return np.clip(np.rint(g * 255.0), 0, 255).astype(np.uint8)


def make_dataset(out_dir, count: int, size: int, seed: int) -> list[Path]:
    """Write `count` seeded P5 images; index 0 is the smooth gradient."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    paths = []
    for i in range(count):
        img = smooth_gradient(size) if i == 0 else _synthetic_image(size, rng)
        path = out / f"img_{i:04d}.pgm"
        write_image(img, path)
        paths.append(path)
    return paths
