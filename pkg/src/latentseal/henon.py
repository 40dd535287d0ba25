"""Henon-map orbits, keyed argsort permutations, and latent shuffling.

The map is x' = 1 - a*x^2 + y, y' = b*x with classical parameters
a = 1.4, b = 0.3.  A symmetric key is an initial point (x0, y0) plus
the map parameters and a burn-in count; the emitted pseudo-random
sequence is the x-component of the post-burn-in orbit, and the keyed
permutation is the stable argsort of that sequence.
"""

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import _kernels
from .errors import DivergenceError, IoError, LengthMismatchError

CLASSICAL_A = 1.4
CLASSICAL_B = 0.3
GUARD = 100.0
DEFAULT_BURN_IN = 1000


class HenonState(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class HenonParams:
    a: float = CLASSICAL_A
    b: float = CLASSICAL_B

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ValueError("map parameters must be finite")


@dataclass(frozen=True)
class SymKey:
    """Symmetric key: orbit start point, map parameters, burn-in."""

    x0: float
    y0: float
    params: HenonParams = field(default_factory=HenonParams)
    burn_in: int = DEFAULT_BURN_IN

    def __post_init__(self):
        if not (math.isfinite(self.x0) and math.isfinite(self.y0)):
            raise ValueError("key point must be finite")
        if abs(self.x0) > GUARD or abs(self.y0) > GUARD:
            raise ValueError("key point outside guarded region")
        if self.burn_in < 0:
            raise ValueError("burn_in must be non-negative")

    def validate(self, m: int = 100) -> None:
        """Check the orbit survives burn_in + m steps without diverging."""
        henon_sequence(self, m)


def henon_step(state: HenonState, params: HenonParams) -> HenonState:
    """One iteration of the map, fixed evaluation order, double precision."""
    xn = 1.0 - params.a * state.x * state.x + state.y
    yn = params.b * state.x
    if abs(xn) > GUARD or abs(yn) > GUARD:
        raise DivergenceError(f"orbit escaped guard at ({xn}, {yn})")
    return HenonState(xn, yn)


def henon_sequence(key: SymKey, n: int) -> np.ndarray:
    """x-components of n orbit points after the key's burn-in.

    Bitwise deterministic for a fixed key; the key point itself is
    never emitted (step 0 already applies the map once).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    xs, _, diverged = _kernels.henon_orbit(
        key.x0, key.y0, key.params.a, key.params.b, key.burn_in, n, GUARD
    )
    if diverged >= 0:
        raise DivergenceError(f"orbit escaped guard at step {diverged}")
    return xs


def henon_trajectory(key: SymKey, n: int) -> np.ndarray:
    """(n, 2) array of post-burn-in (x, y) points, for trajectory export."""
    if n == 0:
        return np.empty((0, 2), dtype=np.float64)
    xs, ys, diverged = _kernels.henon_orbit(
        key.x0, key.y0, key.params.a, key.params.b, key.burn_in, n, GUARD
    )
    if diverged >= 0:
        raise DivergenceError(f"orbit escaped guard at step {diverged}")
    return np.column_stack([xs, ys])


def permutation_from_sequence(seq: np.ndarray) -> np.ndarray:
    """Stable argsort indices: position i holds where the i-th smallest sat."""
    seq = np.asarray(seq, dtype=np.float64)
    if seq.size < 1:
        raise ValueError("sequence must be non-empty")
    if not np.all(np.isfinite(seq)):
        raise ValueError("sequence values must be finite")
    return np.argsort(seq, kind="stable")


def permutation_for_key(key: SymKey, m: int) -> np.ndarray:
    return permutation_from_sequence(henon_sequence(key, m))


def shuffle(v: np.ndarray, p: np.ndarray) -> np.ndarray:
    """out[k] = v[p[k]]."""
    v = np.asarray(v)
    if len(v) != len(p):
        raise LengthMismatchError(f"vector length {len(v)} != permutation {len(p)}")
    return v[p]


def deshuffle(v: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Exact inverse of shuffle: out[p[k]] = v[k]."""
    v = np.asarray(v)
    if len(v) != len(p):
        raise LengthMismatchError(f"vector length {len(v)} != permutation {len(p)}")
    out = np.empty_like(v)
    out[p] = v
    return out


def save_sym_key(key: SymKey, path) -> None:
    """Text format: 'x0 y0' / optional 'a b' / optional burn_in."""
    with open(path, "w") as f:
        f.write(f"{key.x0!r} {key.y0!r}\n")
        f.write(f"{key.params.a!r} {key.params.b!r}\n")
        f.write(f"{key.burn_in}\n")


def load_sym_key(path) -> SymKey:
    try:
        with open(path) as f:
            lines = [ln.strip() for ln in f if ln.strip()]
    except OSError as e:
        raise IoError(str(e)) from e
    if not lines:
        raise IoError(f"empty sym key file: {path}")
    try:
        x0, y0 = (float(t) for t in lines[0].split())
        a, b = (
            (float(t) for t in lines[1].split()) if len(lines) > 1 else (CLASSICAL_A, CLASSICAL_B)
        )
        burn_in = int(lines[2]) if len(lines) > 2 else DEFAULT_BURN_IN
    except (ValueError, IndexError) as e:
        raise IoError(f"malformed sym key file: {path}") from e
    key = SymKey(x0, y0, HenonParams(a, b), burn_in)
    key.validate()
    return key


def random_sym_key(rng: np.random.Generator) -> SymKey:
    """Sample a key from the attractor basin, rejecting divergent orbits."""
    while True:
        key = SymKey(
            float(rng.uniform(-0.5, 0.5)),
            float(rng.uniform(-0.2, 0.2)),
        )
        try:
            key.validate()
            return key
        except DivergenceError:
            continue
