"""latentseal: latent-space image compression with chaotic shuffling and ECIES."""

from .codec import CodecModel, dct_decode, dct_encode, dct_model, load_model, save_model
from .ecies import EciesCiphertext, EciesKeypair, ecies_decrypt, ecies_encrypt, keygen
from .henon import (
    HenonParams,
    HenonState,
    SymKey,
    deshuffle,
    henon_sequence,
    henon_step,
    permutation_from_sequence,
    shuffle,
)
from .metrics import QualityReport, SsimParams, mse, psnr, ssim, timed
from .pipeline import EncryptedPayload, compress_encrypt, decrypt_reconstruct, evaluate
from .train import TrainConfig, gan_objective, train_adversarial, train_autoencoder

__version__ = "0.1.0"

__all__ = [
    "CodecModel",
    "EciesCiphertext",
    "EciesKeypair",
    "EncryptedPayload",
    "HenonParams",
    "HenonState",
    "QualityReport",
    "SsimParams",
    "SymKey",
    "TrainConfig",
    "compress_encrypt",
    "dct_decode",
    "dct_encode",
    "dct_model",
    "decrypt_reconstruct",
    "deshuffle",
    "ecies_decrypt",
    "ecies_encrypt",
    "evaluate",
    "gan_objective",
    "henon_sequence",
    "henon_step",
    "keygen",
    "load_model",
    "mse",
    "permutation_from_sequence",
    "psnr",
    "save_model",
    "shuffle",
    "ssim",
    "timed",
    "train_adversarial",
    "train_autoencoder",
]
