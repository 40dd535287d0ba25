"""ECIES over secp256r1: ephemeral ECDH KEM + AES-256-GCM DEM.

Ciphertext is the tuple {K, C, T}: a 33-byte compressed ephemeral
public key, a ciphertext the same length as the plaintext, and a
16-byte authentication tag.  Key and nonce are disjoint segments of
HKDF-SHA-256 output keyed on the shared secret concatenated with K.
"""

import hashlib
import secrets
from dataclasses import dataclass

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives import hashes
from cryptography.hazmat.primitives.asymmetric import ec
from cryptography.hazmat.primitives.ciphers.aead import AESGCM
from cryptography.hazmat.primitives.kdf.hkdf import HKDF
from cryptography.hazmat.primitives.serialization import (
    Encoding,
    PublicFormat,
)

from .errors import AuthFailureError, InvalidPointError, IoError

CURVE = ec.SECP256R1()
CURVE_ORDER = 0xFFFFFFFF00000000FFFFFFFFFFFFFFFFBCE6FAADA7179E84F3B9CAC2FC632551
KDF_INFO = b"latentseal-v1"
KEY_LEN = 33  # compressed point
TAG_LEN = 16
OVERHEAD = KEY_LEN + TAG_LEN


@dataclass(frozen=True)
class EciesCiphertext:
    K: bytes  # compressed ephemeral public key
    C: bytes  # same length as plaintext
    T: bytes  # GCM tag

    def serialize(self) -> bytes:
        return self.K + self.C + self.T

    @classmethod
    def parse(cls, data: bytes) -> "EciesCiphertext":
        if len(data) < OVERHEAD + 1:
            raise InvalidPointError("ciphertext too short")
        return cls(data[:KEY_LEN], data[KEY_LEN:-TAG_LEN], data[-TAG_LEN:])


@dataclass(frozen=True)
class EciesKeypair:
    private_scalar: int
    public_bytes: bytes  # 33-byte compressed point

    @property
    def private_key(self) -> ec.EllipticCurvePrivateKey:
        return ec.derive_private_key(self.private_scalar, CURVE)


def _compress(pub: ec.EllipticCurvePublicKey) -> bytes:
    return pub.public_bytes(Encoding.X962, PublicFormat.CompressedPoint)


def _load_point(data: bytes) -> ec.EllipticCurvePublicKey:
    try:
        return ec.EllipticCurvePublicKey.from_encoded_point(CURVE, data)
    except ValueError as e:
        raise InvalidPointError(str(e)) from e


def keygen(seed: bytes | None = None) -> EciesKeypair:
    """Generate a keypair; a 32-byte seed makes it deterministic.

    Seeded mode rejection-samples: out-of-range candidates are replaced
    by their SHA-256 digest until a valid scalar appears.
    """
    if seed is None:
        seed = secrets.token_bytes(32)
    elif len(seed) != 32:
        raise ValueError("seed must be exactly 32 bytes")
    candidate = seed
    while True:
        scalar = int.from_bytes(candidate, "big")
        if 1 <= scalar < CURVE_ORDER:
            break
        candidate = hashlib.sha256(candidate).digest()
    priv = ec.derive_private_key(scalar, CURVE)
    return EciesKeypair(scalar, _compress(priv.public_key()))


def _derive_key_nonce(shared: bytes, eph_pub: bytes) -> tuple[bytes, bytes]:
    okm = HKDF(
        algorithm=hashes.SHA256(), length=44, salt=None, info=KDF_INFO
    ).derive(shared + eph_pub)
    return okm[:32], okm[32:]


def ecies_encrypt(
    plaintext: bytes, pub: bytes, eph_seed: bytes | None = None, aad: bytes = b""
) -> EciesCiphertext:
    """Encrypt under a 33-byte compressed recipient public key.

    Optional associated data is authenticated but not encrypted; the
    pipeline uses it to bind its payload header to the tag.
    """
    if not plaintext:
        raise ValueError("plaintext must be non-empty")
    recipient = _load_point(pub)
    eph = keygen(eph_seed)
    shared = eph.private_key.exchange(ec.ECDH(), recipient)
    key, nonce = _derive_key_nonce(shared, eph.public_bytes)
    sealed = AESGCM(key).encrypt(nonce, plaintext, aad or None)
    return EciesCiphertext(eph.public_bytes, sealed[:-TAG_LEN], sealed[-TAG_LEN:])


def ecies_decrypt(ct: EciesCiphertext, private_scalar: int, aad: bytes = b"") -> bytes:
    """Open {K, C, T}; raises AuthFailureError on any tag mismatch."""
    eph_pub = _load_point(ct.K)
    priv = ec.derive_private_key(private_scalar, CURVE)
    shared = priv.exchange(ec.ECDH(), eph_pub)
    key, nonce = _derive_key_nonce(shared, ct.K)
    try:
        return AESGCM(key).decrypt(nonce, ct.C + ct.T, aad or None)
    except InvalidTag as e:
        raise AuthFailureError("authentication tag mismatch") from e


def save_private_key(kp: EciesKeypair, path) -> None:
    with open(path, "w") as f:
        f.write(kp.private_scalar.to_bytes(32, "big").hex() + "\n")


def save_public_key(kp: EciesKeypair, path) -> None:
    with open(path, "w") as f:
        f.write(kp.public_bytes.hex() + "\n")


def load_private_key(path) -> int:
    try:
        with open(path) as f:
            text = f.read().strip()
        scalar = int(text, 16)
    except (OSError, ValueError) as e:
        raise IoError(f"bad private key file: {path}") from e
    if not 1 <= scalar < CURVE_ORDER:
        raise IoError(f"private scalar out of range: {path}")
    return scalar


def load_public_key(path) -> bytes:
    try:
        with open(path) as f:
            data = bytes.fromhex(f.read().strip())
    except (OSError, ValueError) as e:
        raise IoError(f"bad public key file: {path}") from e
    _load_point(data)  # reject off-curve points at load time
    return data
