"""End-to-end composition: codec -> keyed shuffle -> ECIES, and back.

Sender: encode the image to an m-element latent, shuffle it with the
permutation derived from the symmetric key's chaotic orbit, serialize
as 32-bit little-endian floats, and seal with the recipient public
key.  Receiver inverts each step.  The crypto and shuffle layers are
exactly lossless: the only loss in the chain is the codec's.
"""

import struct
from dataclasses import dataclass

import numpy as np

from .codec import CodecModel
from .ecies import OVERHEAD, EciesCiphertext, ecies_decrypt, ecies_encrypt
from .errors import BadHeaderError, ShapeMismatchError
from .henon import SymKey, deshuffle, permutation_for_key, shuffle
from .metrics import QualityReport, SsimParams, mse, psnr, ssim, timed

PAYLOAD_MAGIC = b"LSP1"
PAYLOAD_VERSION = 1
HEADER_LEN = 12  # magic(4) version(1) codec_id(1) m(2) width(2) height(2)


@dataclass(frozen=True)
class EncryptedPayload:
    version: int
    codec_id: int
    m: int
    width: int
    height: int
    ciphertext: EciesCiphertext

    def header_bytes(self) -> bytes:
        return PAYLOAD_MAGIC + struct.pack(
            "<BBHHH", self.version, self.codec_id, self.m, self.width, self.height
        )

    def serialize(self) -> bytes:
        return self.header_bytes() + self.ciphertext.serialize()

    @classmethod
    def parse(cls, data: bytes) -> "EncryptedPayload":
        if len(data) < HEADER_LEN or data[:4] != PAYLOAD_MAGIC:
            raise BadHeaderError("missing payload magic")
        version, codec_id, m, width, height = struct.unpack("<BBHHH", data[4:HEADER_LEN])
        if version != PAYLOAD_VERSION:
            raise BadHeaderError(f"unsupported payload version {version}")
        body = data[HEADER_LEN:]
        if len(body) != 4 * m + OVERHEAD:
            raise BadHeaderError(
                f"body length {len(body)} inconsistent with m={m}"
            )
        if m < 1 or width < 1 or height < 1:
            raise BadHeaderError("degenerate payload dimensions")
        return cls(version, codec_id, m, width, height, EciesCiphertext.parse(body))


def _serialize_latent(v: np.ndarray) -> bytes:
    return np.asarray(v, dtype="<f4").tobytes()


def _deserialize_latent(data: bytes, m: int) -> np.ndarray:
    return np.frombuffer(data, dtype="<f4").astype(np.float64)


def compress_encrypt(
    img: np.ndarray,
    codec: CodecModel,
    sym: SymKey,
    pub: bytes,
    eph_seed: bytes | None = None,
) -> tuple[EncryptedPayload, float]:
    """Encode, shuffle, seal; returns the payload and elapsed seconds."""

    def run() -> EncryptedPayload:
        latent = codec.encode(img)
        perm = permutation_for_key(sym, len(latent))
        shuffled = shuffle(latent, perm)
        h, w = img.shape
        header = PAYLOAD_MAGIC + struct.pack(
            "<BBHHH", PAYLOAD_VERSION, codec.codec_id, len(latent), w, h
        )
        # header rides as AEAD associated data, so any header tampering
        # that survives parsing still fails authentication
        ct = ecies_encrypt(_serialize_latent(shuffled), pub, eph_seed, aad=header)
        return EncryptedPayload(PAYLOAD_VERSION, codec.codec_id, len(latent), w, h, ct)

    return timed(run)


def decrypt_reconstruct(
    payload: EncryptedPayload, codec: CodecModel, sym: SymKey, priv: int
) -> tuple[np.ndarray, float]:
    """Open, deshuffle, decode; returns the image and elapsed seconds.

    A wrong private key fails authentication; a wrong symmetric key is
    cryptographically undetectable and simply yields a scrambled latent.
    """
    if payload.codec_id != codec.codec_id:
        raise ShapeMismatchError(
            f"payload codec id {payload.codec_id} != model {codec.codec_id}"
        )

    def run() -> np.ndarray:
        plain = ecies_decrypt(payload.ciphertext, priv, aad=payload.header_bytes())
        shuffled = _deserialize_latent(plain, payload.m)
        perm = permutation_for_key(sym, payload.m)
        latent = deshuffle(shuffled, perm)
        return codec.decode(latent, payload.width, payload.height)

    return timed(run)


def evaluate(
    img: np.ndarray,
    codec: CodecModel,
    sym: SymKey,
    pub: bytes,
    priv: int,
    ssim_params: SsimParams = SsimParams(),
) -> QualityReport:
    """One report row: quality of the round trip plus both timings."""
    payload, enc_s = compress_encrypt(img, codec, sym, pub)
    recon, dec_s = decrypt_reconstruct(payload, codec, sym, priv)
    return QualityReport(
        ssim=ssim(img, recon, ssim_params),
        mse=mse(img, recon),
        psnr=psnr(img, recon),
        encrypt_seconds=enc_s,
        decrypt_seconds=dec_s,
    )
