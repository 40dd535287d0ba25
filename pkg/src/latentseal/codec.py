"""Latent codecs: map 8-bit grayscale images to m-element vectors and back.

Two codecs honor the same contract.  The deterministic reference codec
keeps the first m zigzag coefficients of the orthonormal 2-D DCT of the
normalized image.  The neural codec is a small fully-connected
autoencoder (tanh hidden layers, sigmoid output) trained in train.py.

Both encoders round their latent values to the nearest 32-bit float so
the pipeline's 4-byte wire serialization is an exact round trip.
"""

import struct
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.fft import dctn, idctn

from .errors import IoError, MTooLargeError, ShapeMismatchError

MODEL_MAGIC = b"LSCM"
MODEL_VERSION = 1
KIND_DCT = 0
KIND_NEURAL = 1


def check_image(img: np.ndarray) -> np.ndarray:
    img = np.asarray(img)
    if img.ndim != 2 or img.size == 0:
        raise ShapeMismatchError(f"expected non-empty 2-D image, got shape {img.shape}")
    if img.dtype != np.uint8:
        raise ShapeMismatchError(f"expected uint8 pixels, got {img.dtype}")
    return img


@lru_cache(maxsize=32)
def zigzag_indices(height: int, width: int) -> tuple[np.ndarray, np.ndarray]:
    """Row/column index arrays visiting an H x W grid in zigzag order."""
    order = []
    for s in range(height + width - 1):
        diag = [(i, s - i) for i in range(max(0, s - width + 1), min(s, height - 1) + 1)]
        if s % 2 == 0:
            diag.reverse()  # even anti-diagonals run bottom-left to top-right
        order.extend(diag)
    rows, cols = zip(*order)
    return np.array(rows), np.array(cols)


def dct2(img: np.ndarray) -> np.ndarray:
    """Full orthonormal 2-D DCT-II of the normalized image, float64."""
    img = check_image(img)
    return dctn(img.astype(np.float64) / 255.0, norm="ortho")


def dct_encode(img: np.ndarray, m: int) -> np.ndarray:
    """First m zigzag coefficients of dct2, rounded to 32-bit floats."""
    img = check_image(img)
    if m < 1 or m > img.size:
        raise MTooLargeError(f"m={m} out of range for {img.size}-pixel image")
    rows, cols = zigzag_indices(*img.shape)
    coeffs = dct2(img)[rows[:m], cols[:m]]
    return coeffs.astype(np.float32).astype(np.float64)


def dct_decode_float(v: np.ndarray, width: int, height: int) -> np.ndarray:
    """Continuous reconstruction in [0, 255] scale, before quantization."""
    v = np.asarray(v, dtype=np.float64)
    if v.size > width * height:
        raise MTooLargeError(f"{v.size} coefficients exceed {width * height} pixels")
    coeffs = np.zeros((height, width), dtype=np.float64)
    rows, cols = zigzag_indices(height, width)
    coeffs[rows[: v.size], cols[: v.size]] = v
    return idctn(coeffs, norm="ortho") * 255.0


def quantize(pixels: np.ndarray) -> np.ndarray:
    """Round half-to-even and clamp to the 8-bit range."""
    return np.clip(np.rint(pixels), 0, 255).astype(np.uint8)


def dct_decode(v: np.ndarray, width: int, height: int) -> np.ndarray:
    return quantize(dct_decode_float(v, width, height))


@dataclass
class Layer:
    W: np.ndarray  # (n_out, n_in)
    b: np.ndarray  # (n_out,)


@dataclass
class CodecModel:
    """Either the parameterless DCT codec or a trained neural autoencoder."""

    kind: str  # "dct" | "neural"
    m: int
    encoder: list[Layer] = field(default_factory=list)
    decoder: list[Layer] = field(default_factory=list)

    @property
    def codec_id(self) -> int:
        return KIND_DCT if self.kind == "dct" else KIND_NEURAL

    @property
    def input_size(self) -> int | None:
        return self.encoder[0].W.shape[1] if self.encoder else None

    def encode(self, img: np.ndarray) -> np.ndarray:
        if self.kind == "dct":
            return dct_encode(img, self.m)
        return neural_encode(self, img)

    def decode(self, v: np.ndarray, width: int, height: int) -> np.ndarray:
        if self.kind == "dct":
            return dct_decode(v, width, height)
        return neural_decode(self, v, width, height)


def dct_model(m: int) -> CodecModel:
    return CodecModel(kind="dct", m=m)


def _forward_encoder(model: CodecModel, x: np.ndarray) -> np.ndarray:
    h = x
    for layer in model.encoder[:-1]:
        h = np.tanh(layer.W @ h + layer.b)
    last = model.encoder[-1]
    return last.W @ h + last.b


def _forward_decoder(model: CodecModel, z: np.ndarray) -> np.ndarray:
    h = z
    for layer in model.decoder[:-1]:
        h = np.tanh(layer.W @ h + layer.b)
    last = model.decoder[-1]
    return sigmoid(last.W @ h + last.b)


def sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def neural_encode(model: CodecModel, img: np.ndarray) -> np.ndarray:
    img = check_image(img)
    if model.kind != "neural":
        raise ShapeMismatchError("model is not a neural codec")
    x = img.astype(np.float64).ravel() / 255.0
    if x.size != model.input_size:
        raise ShapeMismatchError(
            f"image has {x.size} pixels, model expects {model.input_size}"
        )
    z = _forward_encoder(model, x)
    return z.astype(np.float32).astype(np.float64)


def neural_decode(model: CodecModel, v: np.ndarray, width: int, height: int) -> np.ndarray:
    if model.kind != "neural":
        raise ShapeMismatchError("model is not a neural codec")
    v = np.asarray(v, dtype=np.float64)
    if v.size != model.m:
        raise ShapeMismatchError(f"latent size {v.size}, model expects {model.m}")
    out = _forward_decoder(model, v) * 255.0
    if out.size != width * height:
        raise ShapeMismatchError(
            f"decoder emits {out.size} pixels, header says {width * height}"
        )
    return quantize(out.reshape(height, width))


def _write_layers(f, layers: list[Layer]) -> None:
    f.write(struct.pack("<I", len(layers)))
    for layer in layers:
        n_out, n_in = layer.W.shape
        f.write(struct.pack("<II", n_out, n_in))
        f.write(layer.W.astype("<f8").tobytes())
        f.write(layer.b.astype("<f8").tobytes())


def _read_layers(f) -> list[Layer]:
    (count,) = struct.unpack("<I", f.read(4))
    layers = []
    for _ in range(count):
        n_out, n_in = struct.unpack("<II", f.read(8))
        W = np.frombuffer(f.read(8 * n_out * n_in), dtype="<f8").reshape(n_out, n_in)
        b = np.frombuffer(f.read(8 * n_out), dtype="<f8")
        layers.append(Layer(W.copy(), b.copy()))
    return layers


def save_model(model: CodecModel, path) -> None:
    with open(path, "wb") as f:
        f.write(MODEL_MAGIC)
        f.write(struct.pack("<BBI", MODEL_VERSION, model.codec_id, model.m))
        if model.kind == "neural":
            _write_layers(f, model.encoder)
            _write_layers(f, model.decoder)


def load_model(path) -> CodecModel:
    try:
        with open(path, "rb") as f:
            magic = f.read(4)
            if magic != MODEL_MAGIC:
                raise IoError(f"not a codec model file: {path}")
            version, kind_id, m = struct.unpack("<BBI", f.read(6))
            if version != MODEL_VERSION:
                raise IoError(f"unsupported model version {version}")
            if kind_id == KIND_DCT:
                return dct_model(m)
            if kind_id != KIND_NEURAL:
                raise IoError(f"unknown codec kind {kind_id}")
            encoder = _read_layers(f)
            decoder = _read_layers(f)
    except (OSError, struct.error) as e:
        raise IoError(f"bad model file: {path}") from e
    model = CodecModel(kind="neural", m=m, encoder=encoder, decoder=decoder)
    _check_shapes(model)
    return model


def _check_shapes(model: CodecModel) -> None:
    dims = [layer.W.shape for layer in model.encoder + model.decoder]
    for layer in model.encoder + model.decoder:
        if not (np.all(np.isfinite(layer.W)) and np.all(np.isfinite(layer.b))):
            raise IoError("non-finite model weights")
    chain = model.encoder + model.decoder
    for prev, nxt in zip(chain, chain[1:]):
        if prev.W.shape[0] != nxt.W.shape[1]:
            raise IoError(f"layer shapes do not chain: {dims}")
    if model.encoder and model.encoder[-1].W.shape[0] != model.m:
        raise IoError("encoder bottleneck does not match m")
