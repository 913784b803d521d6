"""Finite-dimensional quantum channels in Kraus form.

A channel ``Phi(rho) = sum_k V_k rho V_k^dag`` is stored as a
:class:`KrausChannel`.  Complementary channels use the standard
representation ``rho -> sum_{k,l} Tr[V_k rho V_l^dag] |k><l|`` built from a
minimal (Choi-orthogonal) Kraus set, so the environment dimension equals the
Choi rank.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .exceptions import (DimensionMismatch, InvalidChannel, InvalidParameter, InvalidProbability,
                         InvalidState, NotOrthonormal)
from .numerics import DEFAULT_TOL, Tolerance, as_matrix, dagger, hermitian_eigh
from .sampling import random_isometry

__all__ = [
    "density_matrix",
    "StateFamily",
    "KrausChannel",
    "apply",
    "dual_apply",
    "complementary",
    "weak_complementary_pair",
    "stinespring_isometry",
    "mixture",
    "cq_channel",
    "compose",
    "tensor",
    "identity_channel",
    "unitary_channel",
    "dephasing_channel",
    "depolarizing_channel",
    "random_channel",
    "channels_equal",
]


def density_matrix(x, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Validate ``x`` as a state (Hermitian, PSD, unit trace) and return it as an array."""
    rho = as_matrix(x, "state")
    if rho.shape[0] != rho.shape[1]:
        raise InvalidState(f"state must be square, got {rho.shape}")
    if not np.allclose(rho, dagger(rho), rtol=0, atol=tol.eq_eps):
        raise InvalidState("state is not Hermitian")
    w = np.linalg.eigvalsh((rho + dagger(rho)) / 2)
    if w[0] < -tol.eq_eps * max(1.0, w[-1]):
        raise InvalidState(f"state has negative eigenvalue {w[0]:.3e}")
    if abs(np.trace(rho) - 1) > tol.eq_eps * max(1, rho.shape[0]):
        raise InvalidState(f"state has trace {np.trace(rho).real:.12g}")
    return rho


@dataclass(frozen=True)
class StateFamily:
    """A finite family of states of one dimension, with optional labels."""

    states: tuple
    labels: tuple = field(default=())

    def __post_init__(self):
        states = tuple(density_matrix(s) for s in self.states)
        if not states:
            raise ValueError("a state family must be nonempty")
        dim = states[0].shape[0]
        if any(s.shape[0] != dim for s in states):
            raise DimensionMismatch("all states in a family must have the same dimension")
        labels = tuple(self.labels) or tuple(str(i) for i in range(len(states)))
        if len(labels) != len(states):
            raise ValueError("one label per state is required")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_vectors(cls, vectors: Iterable, labels: Sequence[str] = ()) -> "StateFamily":
        states = []
        for v in vectors:
            v = np.asarray(v, dtype=np.complex128).ravel()
            v = v / np.linalg.norm(v)
            states.append(np.outer(v, v.conj()))
        return cls(tuple(states), tuple(labels))

    @property
    def dim(self) -> int:
        return self.states[0].shape[0]

    def __len__(self):
        return len(self.states)

    def __iter__(self):
        return iter(self.states)

    def average(self, weights=None) -> np.ndarray:
        w = _weights(weights, len(self))
        return sum(p * s for p, s in zip(w, self.states))


def _weights(weights, n: int) -> np.ndarray:
    if weights is None:
        return np.full(n, 1.0 / n)
    w = np.asarray(weights, dtype=float)
    if w.shape != (n,) or np.any(w <= 0) or abs(w.sum() - 1) > 1e-9:
        raise InvalidProbability("weights must be positive and sum to one")
    return w


class KrausChannel:
    """Completely positive trace-preserving map given by Kraus operators.

    Each Kraus operator has shape ``(dim_out, dim_in)``.  The completeness
    relation ``sum_k V_k^dag V_k = I`` is checked at ``tol.eq_eps`` unless
    ``check=False``.
    """

    def __init__(self, kraus, tol: Tolerance = DEFAULT_TOL, check: bool = True):
        ops = tuple(as_matrix(v, "Kraus operator") for v in kraus)
        if not ops:
            raise InvalidChannel("a channel needs at least one Kraus operator")
        shape = ops[0].shape
        if any(v.shape != shape for v in ops):
            raise DimensionMismatch("Kraus operators must share one shape")
        for v in ops:
            v.setflags(write=False)
        self.kraus = ops
        self.dim_out, self.dim_in = shape
        self.tol = tol
        if check and self.completeness_residual() > tol.eq_eps:
            raise InvalidChannel(
                f"Kraus operators are not trace preserving (residual {self.completeness_residual():.3e})")

    @classmethod
    def normalized(cls, kraus, max_residual: float = 1e-6, tol: Tolerance = DEFAULT_TOL):
        """Build a channel after removing a small completeness defect.

        Operators are replaced by ``V_k S^{-1/2}`` with ``S = sum V_k^dag V_k``;
        inputs whose residual exceeds ``max_residual`` are rejected.
        """
        ops = [as_matrix(v, "Kraus operator") for v in kraus]
        if not ops:
            raise InvalidChannel("a channel needs at least one Kraus operator")
        s = sum(dagger(v) @ v for v in ops)
        residual = float(np.abs(s - np.eye(s.shape[0])).max())
        if residual > max_residual:
            raise InvalidChannel(f"completeness residual {residual:.3e} exceeds {max_residual:.1e}")
        w, u = np.linalg.eigh((s + dagger(s)) / 2)
        s_inv_half = (u / np.sqrt(w)) @ dagger(u)
        return cls([v @ s_inv_half for v in ops], tol=tol)

    def __len__(self):
        return len(self.kraus)

    def __repr__(self):
        return f"KrausChannel(dim_in={self.dim_in}, dim_out={self.dim_out}, n_kraus={len(self)})"

    def completeness_residual(self) -> float:
        s = sum(dagger(v) @ v for v in self.kraus)
        return float(np.abs(s - np.eye(self.dim_in)).max())

    def apply(self, rho) -> np.ndarray:
        rho = as_matrix(rho, "input")
        if rho.shape != (self.dim_in, self.dim_in):
            raise DimensionMismatch(f"input of shape {rho.shape} for channel with dim_in={self.dim_in}")
        return sum(v @ rho @ dagger(v) for v in self.kraus)

    __call__ = apply

    def dual(self, a) -> np.ndarray:
        """Heisenberg-picture map ``A -> sum_k V_k^dag A V_k``."""
        a = as_matrix(a, "observable")
        if a.shape != (self.dim_out, self.dim_out):
            raise DimensionMismatch(f"observable of shape {a.shape} for dim_out={self.dim_out}")
        return sum(dagger(v) @ a @ v for v in self.kraus)

    def choi(self) -> np.ndarray:
        """``sum_{ij} |i><j| (x) Phi(|i><j|)`` with the input factor first."""
        vecs = np.array([v.T.reshape(-1) for v in self.kraus])
        return vecs.T @ vecs.conj()

    def canonical(self, tol: Tolerance | None = None) -> "KrausChannel":
        """Minimal Kraus set: scaled eigenvectors of the Choi matrix above the rank cutoff."""
        tol = tol or self.tol
        w, u, keep = hermitian_eigh(self.choi(), tol)
        ops = [np.sqrt(w[i]) * u[:, i].reshape(self.dim_in, self.dim_out).T
               for i in np.flatnonzero(keep)[::-1]]
        return KrausChannel.normalized(ops, tol=tol)

    def choi_rank(self, tol: Tolerance | None = None) -> int:
        tol = tol or self.tol
        _, _, keep = hermitian_eigh(self.choi(), tol)
        return int(keep.sum())


def apply(channel: KrausChannel, rho) -> np.ndarray:
    return channel.apply(rho)


def dual_apply(channel: KrausChannel, a) -> np.ndarray:
    return channel.dual(a)


def complementary(channel: KrausChannel, canonical: bool = True) -> KrausChannel:
    """Complementary channel ``rho -> sum_{k,l} Tr[V_k rho V_l^dag] |k><l|``.

    Its Kraus operators are ``W_j = sum_k |k><j| V_k``, one per output basis
    vector of ``channel``.
    """
    ch = channel.canonical() if canonical else channel
    v = np.array(ch.kraus)  # (r, dim_out, dim_in)
    return KrausChannel([v[:, j, :] for j in range(ch.dim_out)], tol=channel.tol)


def stinespring_isometry(channel: KrausChannel) -> np.ndarray:
    """Isometry ``H_in -> H_out (x) H_env`` with ``V = sum_k V_k (x) |k>``."""
    r = len(channel)
    v = np.array(channel.kraus)  # (r, out, in)
    return np.transpose(v, (1, 0, 2)).reshape(channel.dim_out * r, channel.dim_in)


def weak_complementary_pair(unitary, dims: Sequence[int], env_state=None,
                            env_decomposition=None, tol: Tolerance = DEFAULT_TOL):
    """Channel and weak complementary channel of a unitary dilation.

    ``unitary`` maps ``H_A (x) H_D`` into ``H_B (x) H_E``; ``dims`` is
    ``(d_A, d_D, d_B, d_E)``.  The environment state is given either as a
    density matrix or as an explicit pure-state decomposition
    ``[(weight, vector), ...]``.  Each pure component contributes a
    complementary block; the weighted sum is the weak complementary channel.

    Returns ``(Phi, Phi_hat_w)``.
    """
    d_a, d_d, d_b, d_e = (int(d) for d in dims)
    u = as_matrix(unitary, "dilation")
    if u.shape != (d_b * d_e, d_a * d_d):
        raise DimensionMismatch(f"dilation of shape {u.shape} does not match dims {dims}")
    if env_decomposition is None:
        if env_state is None:
            raise ValueError("give env_state or env_decomposition")
        w, vecs, keep = hermitian_eigh(density_matrix(env_state, tol), tol)
        env_decomposition = [(w[i], vecs[:, i]) for i in np.flatnonzero(keep)]
    t = u.reshape(d_b, d_e, d_a, d_d)
    main, comp = [], []
    for weight, vec in env_decomposition:
        vec = np.asarray(vec, dtype=np.complex128).ravel()
        if vec.shape != (d_d,):
            raise DimensionMismatch("environment vector has the wrong dimension")
        m = np.sqrt(weight) * np.einsum("beaf,f->bea", t, vec / np.linalg.norm(vec))
        main.extend(m[:, e, :] for e in range(d_e))
        comp.extend(m[b, :, :] for b in range(d_b))
    return KrausChannel(main, tol=tol), KrausChannel(comp, tol=tol)


def mixture(p: float, first: KrausChannel, second: KrausChannel) -> KrausChannel:
    """Convex combination ``p*first + (1-p)*second``."""
    if not 0 < p < 1:
        raise InvalidProbability(f"mixing weight must lie in (0, 1), got {p}")
    if (first.dim_in, first.dim_out) != (second.dim_in, second.dim_out):
        raise DimensionMismatch("channels in a mixture must share dimensions")
    ops = [np.sqrt(p) * v for v in first.kraus] + [np.sqrt(1 - p) * v for v in second.kraus]
    return KrausChannel(ops, tol=first.tol)


def cq_channel(basis, sigmas, tol: Tolerance = DEFAULT_TOL) -> KrausChannel:
    """Discrete classical-quantum channel ``rho -> sum_i <i|rho|i> sigma_i``.

    ``basis`` holds the orthonormal input basis as columns.
    """
    b = as_matrix(basis, "basis")
    dim = b.shape[0]
    if b.shape != (dim, dim) or not np.allclose(dagger(b) @ b, np.eye(dim), rtol=0, atol=tol.eq_eps * 10):
        raise NotOrthonormal("basis must be an orthonormal basis of the input space")
    sigmas = [density_matrix(s, tol) for s in sigmas]
    if len(sigmas) != dim:
        raise DimensionMismatch("one output state per basis vector is required")
    ops = []
    for i, sigma in enumerate(sigmas):
        w, v, keep = hermitian_eigh(sigma, tol)
        for k in np.flatnonzero(keep):
            ops.append(np.sqrt(w[k]) * np.outer(v[:, k], b[:, i].conj()))
    return KrausChannel.normalized(ops, tol=tol)


def compose(outer: KrausChannel, inner: KrausChannel) -> KrausChannel:
    """``outer o inner``: apply ``inner`` first."""
    if inner.dim_out != outer.dim_in:
        raise DimensionMismatch("output of the inner channel must feed the outer one")
    return KrausChannel([a @ b for a in outer.kraus for b in inner.kraus], tol=outer.tol)


def tensor(first: KrausChannel, second: KrausChannel) -> KrausChannel:
    return KrausChannel([np.kron(a, b) for a in first.kraus for b in second.kraus], tol=first.tol)


def identity_channel(dim: int) -> KrausChannel:
    return KrausChannel([np.eye(dim)])


def unitary_channel(u) -> KrausChannel:
    return KrausChannel([as_matrix(u, "unitary")])


def dephasing_channel(dim: int, basis=None) -> KrausChannel:
    """Complete dephasing in ``basis`` (columns; computational basis by default)."""
    b = np.eye(dim) if basis is None else as_matrix(basis)
    return KrausChannel([np.outer(b[:, i], b[:, i].conj()) for i in range(dim)])


def depolarizing_channel(dim_in: int, sigma=None) -> KrausChannel:
    """Completely depolarizing channel ``rho -> sigma Tr rho`` (``sigma = I/d`` by default)."""
    sigma = np.eye(dim_in) / dim_in if sigma is None else sigma
    return cq_channel(np.eye(dim_in), [sigma] * dim_in)


def random_channel(dim_in: int, dim_out: int | None = None, n_kraus: int = 2, seed=0) -> KrausChannel:
    """Channel obtained from a random Stinespring isometry."""
    dim_out = dim_in if dim_out is None else dim_out
    if dim_out * n_kraus < dim_in:
        raise InvalidParameter(f"need dim_out * n_kraus >= dim_in, got {dim_out} * {n_kraus} < {dim_in}")
    v = random_isometry(dim_out * n_kraus, dim_in, seed).reshape(dim_out, n_kraus, dim_in)
    return KrausChannel.normalized([v[:, k, :] for k in range(n_kraus)])


def channels_equal(first: KrausChannel, second: KrausChannel, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Equality as maps, decided on Choi matrices."""
    if (first.dim_in, first.dim_out) != (second.dim_in, second.dim_out):
        return False
    return bool(np.allclose(first.choi(), second.choi(), rtol=0, atol=tol.eq_eps * 10))
