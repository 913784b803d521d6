"""Dense complex matrix utilities with an explicit tolerance policy.

Every finite-dimensional routine in qrev funnels its rank and equality
decisions through :class:`Tolerance`.  Rank decisions are relative to the
largest eigenvalue / singular value, equality checks are absolute.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exceptions import DimensionMismatch, NotCommuting, NotPSD

__all__ = [
    "Tolerance",
    "DEFAULT_TOL",
    "as_matrix",
    "dagger",
    "is_hermitian",
    "hermitian_eigh",
    "support_projector",
    "psd_sqrt_and_pinv_sqrt",
    "partial_trace",
    "common_eigenbasis",
    "trace_norm",
    "trace_distance",
    "orthonormal_columns",
]


@dataclass(frozen=True)
class Tolerance:
    """Numerical thresholds.

    rank_eps is a relative singular-value cutoff, eq_eps an absolute
    entrywise comparison threshold.
    """

    rank_eps: float = 1e-9
    eq_eps: float = 1e-10

    def __post_init__(self):
        if not (self.rank_eps > 0 and self.eq_eps > 0):
            raise ValueError("tolerances must be strictly positive")


DEFAULT_TOL = Tolerance()


def as_matrix(x, name: str = "matrix") -> np.ndarray:
    """Return ``x`` as a 2-d complex128 array, rejecting NaN/Inf."""
    a = np.asarray(x, dtype=np.complex128)
    if a.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-dimensional, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
    return a


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def is_hermitian(a: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> bool:
    a = np.asarray(a)
    return a.shape[0] == a.shape[1] and np.allclose(a, dagger(a), rtol=0, atol=tol.eq_eps)


def hermitian_eigh(rho, tol: Tolerance = DEFAULT_TOL, check_psd: bool = True):
    """Eigen-decompose a Hermitian PSD matrix.

    Returns ``(eigenvalues, eigenvectors, keep)`` where ``keep`` masks the
    eigenvalues above ``rank_eps * lambda_max``.  Raises :class:`NotPSD`
    for eigenvalues below ``-eq_eps * lambda_max``.
    """
    a = as_matrix(rho)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    if not np.allclose(a, dagger(a), rtol=0, atol=max(tol.eq_eps, tol.eq_eps * np.abs(a).max())):
        raise NotPSD("matrix is not Hermitian")
    w, v = np.linalg.eigh((a + dagger(a)) / 2)
    lam_max = max(w[-1], 0.0) if w.size else 0.0
    if check_psd and w.size and w[0] < -tol.eq_eps * max(lam_max, 1.0):
        raise NotPSD(f"negative eigenvalue {w[0]:.3e}")
    keep = w > tol.rank_eps * lam_max
    return w, v, keep


def support_projector(rho, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Orthogonal projector onto the support of a PSD matrix.

    >>> support_projector(np.diag([0.5, 0.5, 0.0])).real
    array([[1., 0., 0.],
           [0., 1., 0.],
           [0., 0., 0.]])
    """
    _, v, keep = hermitian_eigh(rho, tol)
    vs = v[:, keep]
    return vs @ dagger(vs)


def psd_sqrt_and_pinv_sqrt(rho, tol: Tolerance = DEFAULT_TOL):
    """Return ``(rho**(1/2), rho**(-1/2))`` with the inverse taken on the support."""
    w, v, keep = hermitian_eigh(rho, tol)
    root = np.where(keep, np.sqrt(np.clip(w, 0, None)), 0.0)
    inv_root = np.zeros_like(root)
    inv_root[keep] = 1.0 / root[keep]
    return (v * root) @ dagger(v), (v * inv_root) @ dagger(v)


def partial_trace(x, dims: Sequence[int], which: int) -> np.ndarray:
    """Trace out tensor factor ``which`` (0 or 1) of an operator on C^d1 (x) C^d2."""
    a = as_matrix(x)
    d1, d2 = (int(d) for d in dims)
    if a.shape != (d1 * d2, d1 * d2):
        raise DimensionMismatch(f"operator of shape {a.shape} does not act on {d1}x{d2}")
    t = a.reshape(d1, d2, d1, d2)
    if which == 0:
        return np.einsum("ijik->jk", t)
    if which == 1:
        return np.einsum("ijkj->ik", t)
    raise ValueError("which must be 0 or 1")


def trace_norm(a) -> float:
    return float(np.sum(np.linalg.svd(np.asarray(a), compute_uv=False)))


def trace_distance(rho, sigma) -> float:
    """Half the trace norm of the difference."""
    return 0.5 * trace_norm(np.asarray(rho) - np.asarray(sigma))


def orthonormal_columns(vectors, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (as columns) of the span of the given columns."""
    a = np.asarray(vectors, dtype=np.complex128)
    if a.size == 0:
        return np.zeros((a.shape[0], 0), dtype=np.complex128)
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return np.zeros((a.shape[0], 0), dtype=np.complex128)
    return u[:, s > tol.rank_eps * s[0]]


def _offdiag_norm(m: np.ndarray) -> float:
    return float(np.abs(m - np.diag(np.diag(m))).max()) if m.size else 0.0


def common_eigenbasis(family, tol: Tolerance = DEFAULT_TOL, seed: int = 0,
                      retries: int = 3) -> np.ndarray:
    """Unitary whose columns simultaneously diagonalize every member of ``family``.

    The family must consist of pairwise commuting normal matrices; otherwise
    :class:`NotCommuting` is raised.  A seeded random Hermitian combination is
    diagonalized and the result is verified, so a returned basis is always
    correct to ``eq_eps`` (relative to each member's norm).
    """
    mats = [as_matrix(m) for m in family]
    if not mats:
        raise ValueError("empty family")
    n = mats[0].shape[0]
    for m in mats:
        if m.shape != (n, n):
            raise DimensionMismatch("family members must be square and of equal size")
    norms = [max(np.linalg.norm(m, 2), 1e-300) for m in mats]
    for m, nm in zip(mats, norms):
        if np.abs(m @ dagger(m) - dagger(m) @ m).max() > tol.eq_eps * nm * nm:
            raise NotCommuting("family contains a non-normal matrix")
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            comm = mats[i] @ mats[j] - mats[j] @ mats[i]
            if np.linalg.norm(comm, 2) > tol.eq_eps * norms[i] * norms[j]:
                raise NotCommuting(f"members {i} and {j} do not commute")
    # Hermitian generators: real and imaginary parts of each normal member.
    herm = []
    for m, nm in zip(mats, norms):
        herm.append((m + dagger(m)) / (2 * nm))
        herm.append((m - dagger(m)) / (2j * nm))
    rng = np.random.default_rng(seed)
    for _ in range(retries):
        coeffs = rng.standard_normal(len(herm))
        h = sum(c * g for c, g in zip(coeffs, herm))
        _, u = np.linalg.eigh(h)
        if all(_offdiag_norm(dagger(u) @ m @ u) <= tol.eq_eps * nm for m, nm in zip(mats, norms)):
            return u
    raise NotCommuting("could not verify a common eigenbasis")
