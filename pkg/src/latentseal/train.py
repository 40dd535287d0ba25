"""Desk-scale trainers for the neural codec.

Plain SGD with hand-derived gradients: pixel-MSE autoencoding, plus an
optional adversarial term from a single image discriminator played as
a minimax game.  Everything is deterministic under a fixed seed.
"""

from dataclasses import dataclass, field

import numpy as np

from .codec import CodecModel, Layer, check_image, sigmoid
from .errors import EmptyBatchError, NonFiniteLossError

PROB_CLAMP = 1e-12


def gan_objective(d_real: np.ndarray, d_fake: np.ndarray) -> float:
    """mean log D(real) + mean log(1 - D(fake)), natural log.

    The empirical minimax value; -2 ln 2 when every probability is 0.5.
    """
    d_real = np.asarray(d_real, dtype=np.float64)
    d_fake = np.asarray(d_fake, dtype=np.float64)
    if d_real.size == 0 or d_fake.size == 0:
        raise EmptyBatchError("gan_objective needs non-empty batches")
    d_real = np.clip(d_real, PROB_CLAMP, 1.0 - PROB_CLAMP)
    d_fake = np.clip(d_fake, PROB_CLAMP, 1.0 - PROB_CLAMP)
    return float(np.mean(np.log(d_real)) + np.mean(np.log1p(-d_fake)))


@dataclass
class TrainConfig:
    m: int = 16
    hidden: tuple[int, ...] = (64,)
    lr: float = 0.05
    epochs: int = 100
    seed: int = 0
    batch_size: int = 8
    # adversarial extras
    disc_hidden: tuple[int, ...] = (32,)
    lam: float = 0.0
    disc_lr: float = 0.05


@dataclass
class AdversarialResult:
    model: CodecModel
    ae_losses: list[float]
    disc_losses: list[float]
    discriminator: list[Layer] = field(default_factory=list)


def _init_layers(dims: list[int], rng: np.random.Generator) -> list[Layer]:
    layers = []
    for n_in, n_out in zip(dims, dims[1:]):
        W = rng.normal(0.0, 1.0 / np.sqrt(n_in), size=(n_out, n_in))
        layers.append(Layer(W, np.zeros(n_out)))
    return layers


def init_model(input_size: int, config: TrainConfig, rng: np.random.Generator) -> CodecModel:
    enc_dims = [input_size, *config.hidden, config.m]
    dec_dims = [config.m, *reversed(config.hidden), input_size]
    return CodecModel(
        kind="neural",
        m=config.m,
        encoder=_init_layers(enc_dims, rng),
        decoder=_init_layers(dec_dims, rng),
    )


def _dataset_matrix(dataset: list[np.ndarray]) -> np.ndarray:
    if not dataset:
        raise ValueError("dataset must be non-empty")
    shapes = {check_image(img).shape for img in dataset}
    if len(shapes) != 1:
        raise ValueError(f"dataset images differ in shape: {shapes}")
    return np.stack([img.astype(np.float64).ravel() / 255.0 for img in dataset])


def _forward(model: CodecModel, X: np.ndarray):
    """Batch forward pass keeping post-activation values for backprop."""
    acts = [X]
    h = X
    chain = model.encoder + model.decoder
    for i, layer in enumerate(chain):
        z = h @ layer.W.T + layer.b
        if i == len(model.encoder) - 1:
            h = z  # linear bottleneck
        elif i == len(chain) - 1:
            h = sigmoid(z)
        else:
            h = np.tanh(z)
        acts.append(h)
    return acts


def _backward(model: CodecModel, acts: list[np.ndarray], d_out: np.ndarray):
    """Gradients of a scalar loss given d loss / d output activation."""
    chain = model.encoder + model.decoder
    grads: list[tuple[np.ndarray, np.ndarray]] = [None] * len(chain)
    da = d_out
    for i in range(len(chain) - 1, -1, -1):
        a = acts[i + 1]
        if i == len(chain) - 1:
            dz = da * a * (1.0 - a)  # sigmoid output
        elif i == len(model.encoder) - 1:
            dz = da  # linear bottleneck
        else:
            dz = da * (1.0 - a * a)  # tanh
        grads[i] = (dz.T @ acts[i], dz.sum(axis=0))
        da = dz @ chain[i].W
    return grads, da


def loss_and_gradients(model: CodecModel, X: np.ndarray):
    """Reconstruction loss and its analytic gradients.

    The loss is the squared pixel error summed per image and averaged
    over the batch; the per-pixel sum keeps gradient magnitudes usable
    at small learning rates.
    """
    acts = _forward(model, X)
    out = acts[-1]
    diff = out - X
    loss = float(np.mean(np.sum(diff * diff, axis=1)))
    d_out = 2.0 * diff / X.shape[0]
    grads, _ = _backward(model, acts, d_out)
    return loss, grads


def reconstruction_loss(model: CodecModel, dataset: list[np.ndarray]) -> float:
    X = _dataset_matrix(dataset)
    out = _forward(model, X)[-1]
    return float(np.mean(np.sum((out - X) ** 2, axis=1)))


def _apply_sgd(chain: list[Layer], grads, lr: float, sign: float = -1.0) -> None:
    for layer, (dW, db) in zip(chain, grads):
        layer.W += sign * lr * dW
        layer.b += sign * lr * db


def train_autoencoder(dataset: list[np.ndarray], config: TrainConfig):
    """SGD on pixel MSE; returns (model, per-epoch loss trace)."""
    X = _dataset_matrix(dataset)
    rng = np.random.default_rng(config.seed)
    model = init_model(X.shape[1], config, rng)
    trace: list[float] = []
    for _ in range(config.epochs):
        trace.append(_run_epoch(model, X, config, rng))
    return model, trace


def _run_epoch(model, X, config, rng, adversary=None) -> float:
    order = rng.permutation(X.shape[0])
    losses = []
    for start in range(0, X.shape[0], config.batch_size):
        batch = X[order[start : start + config.batch_size]]
        acts = _forward(model, batch)
        diff = acts[-1] - batch
        loss = float(np.mean(np.sum(diff * diff, axis=1)))
        if not np.isfinite(loss):
            raise NonFiniteLossError(f"loss diverged to {loss}; lower the learning rate")
        d_out = 2.0 * diff / batch.shape[0]
        if adversary is not None and config.lam != 0.0:
            d_out = d_out + config.lam * _generator_term_grad(adversary, acts[-1])
        grads, _ = _backward(model, acts, d_out)
        _apply_sgd(model.encoder + model.decoder, grads, config.lr)
        losses.append(loss)
    return float(np.mean(losses))


def _disc_forward(disc: list[Layer], X: np.ndarray):
    acts = [X]
    h = X
    for i, layer in enumerate(disc):
        z = h @ layer.W.T + layer.b
        h = sigmoid(z) if i == len(disc) - 1 else np.tanh(z)
        acts.append(h)
    return acts


def disc_probabilities(disc: list[Layer], images: np.ndarray) -> np.ndarray:
    return _disc_forward(disc, images)[-1].ravel()


def _disc_backward(disc: list[Layer], acts, dz_out):
    grads = [None] * len(disc)
    dz = dz_out
    for i in range(len(disc) - 1, -1, -1):
        grads[i] = (dz.T @ acts[i], dz.sum(axis=0))
        da = dz @ disc[i].W
        if i > 0:
            a = acts[i]
            dz = da * (1.0 - a * a)
        else:
            dz = da
    return grads, dz


def _generator_term_grad(disc: list[Layer], fake: np.ndarray) -> np.ndarray:
    """d mean(log(1 - D(fake))) / d fake, for the saturating generator term."""
    acts = _disc_forward(disc, fake)
    p = acts[-1]
    # d/dz log(1 - sigmoid(z)) = -sigmoid(z)
    dz_out = -p / p.shape[0]
    _, d_input = _disc_backward(disc, acts, dz_out)
    return d_input


def _disc_step(disc: list[Layer], real: np.ndarray, fake: np.ndarray, lr: float) -> float:
    """One ascent step on the minimax value; returns the objective."""
    acts_r = _disc_forward(disc, real)
    acts_f = _disc_forward(disc, fake)
    p_r, p_f = acts_r[-1], acts_f[-1]
    value = gan_objective(p_r.ravel(), p_f.ravel())
    # d/dz log sigmoid(z) = 1 - p ; d/dz log(1 - sigmoid(z)) = -p
    grads_r, _ = _disc_backward(disc, acts_r, (1.0 - p_r) / p_r.shape[0])
    grads_f, _ = _disc_backward(disc, acts_f, -p_f / p_f.shape[0])
    for layer, (dWr, dbr), (dWf, dbf) in zip(disc, grads_r, grads_f):
        layer.W += lr * (dWr + dWf)
        layer.b += lr * (dbr + dbf)
    return value


def train_adversarial(dataset: list[np.ndarray], config: TrainConfig) -> AdversarialResult:
    """Alternating discriminator-ascent / autoencoder-descent training.

    With lam == 0 the autoencoder parameter trajectory is bitwise
    identical to train_autoencoder under the same seed: the
    discriminator draws from an independent RNG stream.
    """
    X = _dataset_matrix(dataset)
    rng = np.random.default_rng(config.seed)
    d_rng = np.random.default_rng((config.seed, 0x9E3779B9))
    model = init_model(X.shape[1], config, rng)
    disc = _init_layers([X.shape[1], *config.disc_hidden, 1], d_rng)
    ae_trace: list[float] = []
    d_trace: list[float] = []
    for _ in range(config.epochs):
        fake = _forward(model, X)[-1]
        idx = d_rng.permutation(X.shape[0])
        d_vals = []
        for start in range(0, X.shape[0], config.batch_size):
            sel = idx[start : start + config.batch_size]
            d_vals.append(_disc_step(disc, X[sel], fake[sel], config.disc_lr))
        d_value = float(np.mean(d_vals))
        if not np.isfinite(d_value):
            raise NonFiniteLossError("discriminator objective diverged")
        d_trace.append(d_value)
        ae_trace.append(_run_epoch(model, X, config, rng, adversary=disc))
    return AdversarialResult(model, ae_trace, d_trace, disc)
