"""Seeded random matrices, states and channels for tests and searches."""
from __future__ import annotations

import numpy as np

__all__ = [
    "rng_from",
    "random_unitary",
    "random_isometry",
    "random_vector",
    "random_pure_state",
    "random_density",
    "random_psd",
]


def rng_from(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _ginibre(rng, rows, cols):
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def random_unitary(dim: int, seed=0) -> np.ndarray:
    """Haar-random unitary (QR of a Ginibre matrix with phase fix)."""
    rng = rng_from(seed)
    q, r = np.linalg.qr(_ginibre(rng, dim, dim))
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_isometry(rows: int, cols: int, seed=0) -> np.ndarray:
    if cols > rows:
        raise ValueError("an isometry needs rows >= cols")
    return random_unitary(rows, seed)[:, :cols]


def random_vector(dim: int, seed=0) -> np.ndarray:
    rng = rng_from(seed)
    v = _ginibre(rng, dim, 1)[:, 0]
    return v / np.linalg.norm(v)


def random_pure_state(dim: int, seed=0) -> np.ndarray:
    v = random_vector(dim, seed)
    return np.outer(v, v.conj())


def random_psd(dim: int, rank: int | None = None, seed=0) -> np.ndarray:
    rng = rng_from(seed)
    a = _ginibre(rng, dim, rank or dim)
    return a @ a.conj().T


def random_density(dim: int, rank: int | None = None, seed=0) -> np.ndarray:
    rho = random_psd(dim, rank, seed)
    return rho / np.trace(rho).real
