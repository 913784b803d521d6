"""Reversibility tests for finite-dimensional channels.

Everything here is phrased through the noncommutative graph
``G = span{V_k^dag V_l}``, which is the range of the dual of the
complementary channel.  Two pure inputs give orthogonal outputs exactly when
every element of ``G`` has a vanishing matrix element between them.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares
from scipy.sparse.csgraph import connected_components

from .channels import KrausChannel, StateFamily, complementary, _weights
from .exceptions import DimensionMismatch, NotCommuting, RankTooSmall
from .numerics import (DEFAULT_TOL, Tolerance, as_matrix, common_eigenbasis, dagger,
                       hermitian_eigh, orthonormal_columns, psd_sqrt_and_pinv_sqrt,
                       support_projector, trace_distance)
from .sampling import rng_from

__all__ = [
    "OperatorSubspace",
    "ONDPartition",
    "ReversibilityIndex",
    "ReversibilityCheck",
    "TriState",
    "noncommutative_graph",
    "ond_decompose",
    "petz_recovery",
    "is_reversible_for",
    "check_orthogonal_criterion",
    "orthogonal_criterion_residual",
    "perfectly_reversible_on",
    "block_kraus_representation",
    "pure_family_criterion",
    "search_pair",
    "exhaustive_pair_search",
    "pair_residual",
    "reversibility_index",
    "zero_error_positivity",
]

# Residual below which a polished pair counts as found (before exact re-check).
PAIR_CERT_THRESHOLD = 1e-10
REVERSIBLE_THRESHOLD = 1e-6


class TriState(str, enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"

    @classmethod
    def of(cls, value):
        if value is None:
            return cls.UNKNOWN
        return cls.YES if value else cls.NO


@dataclass(frozen=True)
class OperatorSubspace:
    """Adjoint-closed matrix subspace with a Hilbert-Schmidt orthonormal Hermitian basis."""

    dim_space: int
    basis: tuple

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __len__(self):
        return self.dim

    def stacked(self) -> np.ndarray:
        return np.array(self.basis).reshape(self.dim, self.dim_space, self.dim_space)

    def matrix_elements(self, phi, psi) -> np.ndarray:
        """``<phi|g|psi>`` for every basis element ``g``."""
        return np.einsum("i,gij,j->g", np.conj(phi), self.stacked(), psi)

    def project(self, x) -> np.ndarray:
        x = as_matrix(x)
        coeffs = [np.vdot(g, x) for g in self.basis]
        return sum(c * g for c, g in zip(coeffs, self.basis))

    def contains(self, x, tol: Tolerance = DEFAULT_TOL) -> bool:
        x = as_matrix(x)
        return bool(np.abs(x - self.project(x)).max() <= tol.eq_eps * max(1.0, np.abs(x).max()))

    def is_adjoint_closed(self, tol: Tolerance = DEFAULT_TOL) -> bool:
        return all(self.contains(dagger(g), tol) for g in self.basis)


def _hermitian_span(generators, dim: int, tol: Tolerance) -> OperatorSubspace:
    herm = []
    for g in generators:
        herm.append((g + dagger(g)) / 2)
        herm.append((g - dagger(g)) / 2j)
    vecs = np.array([np.concatenate([h.real.ravel(), h.imag.ravel()]) for h in herm])
    _, s, vt = np.linalg.svd(vecs, full_matrices=False)
    keep = s > tol.rank_eps * s[0]
    basis = []
    for row in vt[keep]:
        m = row[: dim * dim].reshape(dim, dim) + 1j * row[dim * dim:].reshape(dim, dim)
        basis.append((m + dagger(m)) / 2)
    return OperatorSubspace(dim, tuple(basis))


def noncommutative_graph(channel: KrausChannel, tol: Tolerance | None = None) -> OperatorSubspace:
    """``span{V_k^dag V_l}`` with a Hermitian orthonormal basis."""
    tol = tol or channel.tol
    gens = [dagger(a) @ b for a in channel.kraus for b in channel.kraus]
    return _hermitian_span(gens, channel.dim_in, tol)


@dataclass(frozen=True)
class ONDPartition:
    """Blocks of a state family with mutually orthogonal supports."""

    blocks: tuple
    projectors: tuple

    def __len__(self):
        return len(self.blocks)

    @property
    def total_projector(self) -> np.ndarray:
        return sum(self.projectors)

    @classmethod
    def from_projectors(cls, projectors) -> "ONDPartition":
        projectors = tuple(as_matrix(p) for p in projectors)
        return cls(tuple((i,) for i in range(len(projectors))), projectors)


def ond_decompose(family: StateFamily, tol: Tolerance = DEFAULT_TOL) -> ONDPartition:
    """Split a family into orthogonally non-decomposable blocks.

    Two states share a block iff a chain of pairwise non-orthogonal supports
    connects them.
    """
    supports = [support_projector(s, tol) for s in family.states]
    n = len(supports)
    adj = np.zeros((n, n), dtype=bool)
    for i, j in itertools.combinations(range(n), 2):
        if np.linalg.norm(supports[i] @ supports[j], 2) > tol.eq_eps:
            adj[i, j] = adj[j, i] = True
    _, labels = connected_components(adj, directed=False)
    order = []
    for lab in labels:
        if lab not in order:
            order.append(lab)
    blocks = tuple(tuple(int(i) for i in np.flatnonzero(labels == lab)) for lab in order)
    projectors = tuple(support_projector(sum(supports[i] for i in b), tol) for b in blocks)
    return ONDPartition(blocks, projectors)


def petz_recovery(channel: KrausChannel, reference, tol: Tolerance | None = None) -> KrausChannel:
    """Petz transpose channel of ``channel`` at the reference state.

    ``Psi(s) = r^{1/2} Phi^*(Phi(r)^{-1/2} s Phi(r)^{-1/2}) r^{1/2}`` on the
    support of ``Phi(r)``; the remaining weight is sent to ``r`` itself.
    """
    tol = tol or channel.tol
    ref = as_matrix(reference, "reference state")
    if ref.shape != (channel.dim_in, channel.dim_in):
        raise DimensionMismatch("reference state must live on the channel input")
    ref_sqrt, _ = psd_sqrt_and_pinv_sqrt(ref, tol)
    _, out_inv_sqrt = psd_sqrt_and_pinv_sqrt(channel.apply(ref), tol)
    ops = [ref_sqrt @ dagger(v) @ out_inv_sqrt for v in channel.kraus]
    defect = np.eye(channel.dim_out) - sum(dagger(r) @ r for r in ops)
    mu, q = np.linalg.eigh((defect + dagger(defect)) / 2)
    lam, a, keep_ref = hermitian_eigh(ref, tol)
    for j in np.flatnonzero(mu > tol.rank_eps):
        for i in np.flatnonzero(keep_ref):
            ops.append(np.sqrt(lam[i] * mu[j]) * np.outer(a[:, i], q[:, j].conj()))
    return KrausChannel.normalized(ops, max_residual=1e-4, tol=tol)


@dataclass(frozen=True)
class ReversibilityCheck:
    reversible: bool
    residual: float
    residuals: tuple
    recovery: KrausChannel = field(repr=False)

    def __bool__(self):
        return self.reversible


def is_reversible_for(channel: KrausChannel, family: StateFamily, weights=None,
                      threshold: float = REVERSIBLE_THRESHOLD,
                      tol: Tolerance | None = None) -> ReversibilityCheck:
    """Decide reversibility with the Petz map at the weighted average state.

    The residual is the largest trace distance between a family member and
    its recovered image.
    """
    if family.dim != channel.dim_in:
        raise DimensionMismatch("family and channel input dimensions differ")
    w = _weights(weights, len(family))
    recovery = petz_recovery(channel, family.average(w), tol)
    residuals = tuple(trace_distance(recovery.apply(channel.apply(rho)), rho) for rho in family)
    worst = max(residuals)
    return ReversibilityCheck(worst <= threshold, worst, residuals, recovery)


def orthogonal_criterion_residual(channel: KrausChannel, partition: ONDPartition,
                                  graph: OperatorSubspace | None = None) -> float:
    """Largest ``|P_i g P_k|`` over graph basis elements and blocks ``i != k``."""
    graph = graph or noncommutative_graph(channel)
    worst = 0.0
    for g in graph.basis:
        for (i, p), (k, q) in itertools.permutations(enumerate(partition.projectors), 2):
            worst = max(worst, float(np.abs(p @ g @ q).max()))
    return worst


def check_orthogonal_criterion(channel: KrausChannel, partition: ONDPartition,
                               atol: float | None = None) -> bool:
    """Block annihilation test ``P_i Phi_hat^*(A) P_k = 0`` for ``i != k``."""
    atol = channel.tol.eq_eps if atol is None else atol
    return orthogonal_criterion_residual(channel, partition) <= atol


def _projector_rank(p: np.ndarray) -> int:
    return int(round(np.trace(p).real))


def perfectly_reversible_on(channel: KrausChannel, projector, atol: float | None = None) -> bool:
    """Knill-Laflamme compression: ``P g P = lambda_g P`` for every graph element."""
    p = as_matrix(projector, "projector")
    if p.shape != (channel.dim_in, channel.dim_in):
        raise DimensionMismatch("projector must act on the channel input")
    rank = _projector_rank(p)
    if rank < 2:
        raise RankTooSmall("perfect reversibility needs a subspace of dimension >= 2")
    atol = channel.tol.eq_eps if atol is None else atol
    for g in noncommutative_graph(channel).basis:
        c = p @ g @ p
        if np.abs(c - np.trace(c) / rank * p).max() > atol:
            return False
    return True


def block_kraus_representation(channel: KrausChannel, partition: ONDPartition,
                               tol: Tolerance | None = None) -> dict:
    """Kraus operators ``W_{i,m} = K_m P_i`` of the complementary channel, block by block.

    For a reversed orthogonal family these reproduce the complementary
    channel on the span of the blocks, and their ranks are bounded by the
    block ranks.  Returns ``operators``, ``ranks``, ``max_rank``,
    ``block_rank`` and the reproduction ``residual``.
    """
    tol = tol or channel.tol
    comp = complementary(channel)
    total = partition.total_projector
    ops, ranks = [], []
    for p in partition.projectors:
        for k in comp.kraus:
            w = k @ p
            ops.append(w)
            s = np.linalg.svd(w, compute_uv=False)
            ranks.append(int(np.sum(s > tol.rank_eps * max(s[0], 1.0))) if s.size else 0)
    dim = channel.dim_in
    residual = 0.0
    for a, b in itertools.product(range(dim), repeat=2):
        e = np.zeros((dim, dim), dtype=complex)
        e[a, b] = 1
        x = total @ e @ total
        lhs = comp.apply(x)
        rhs = sum(w @ x @ dagger(w) for w in ops)
        residual = max(residual, float(np.abs(lhs - rhs).max()))
    return {
        "operators": ops,
        "ranks": ranks,
        "max_rank": max(ranks) if ranks else 0,
        "block_rank": max(_projector_rank(p) for p in partition.projectors),
        "residual": residual,
    }


def pure_family_criterion(channel: KrausChannel, family: StateFamily,
                          tol: Tolerance | None = None) -> dict:
    """Exact test for pure families via the complementary subchannel.

    The family is reversible iff, on the span of the family, the
    complementary channel is ``rho -> sum_k Tr[P_k rho] sigma_k`` for the
    OND projectors ``P_k``.  Also reports the rank bound ``m`` on the
    ``sigma_k`` as a diagnostic.
    """
    tol = tol or channel.tol
    partition = ond_decompose(family, tol)
    graph = noncommutative_graph(channel, tol)
    residual = 0.0
    for g in graph.basis:
        for i, p in enumerate(partition.projectors):
            for k, q in enumerate(partition.projectors):
                c = p @ g @ q
                if i == k:
                    c = c - np.trace(c) / np.trace(p).real * p
                residual = max(residual, float(np.abs(c).max()))
    comp = complementary(channel)
    sigmas = [comp.apply(p / np.trace(p).real) for p in partition.projectors]
    sigma_ranks = [int(hermitian_eigh(s, tol)[2].sum()) for s in sigmas]
    # m = min(dim ker[P Phi^*(.) P on B(H_B^S)] + 1, dim H_B^S)
    p_s = partition.total_projector
    out_basis = orthonormal_columns(support_projector(channel.apply(p_s), tol), tol)
    n_b = out_basis.shape[1]
    cols = []
    for a, b in itertools.product(range(n_b), repeat=2):
        x = np.outer(out_basis[:, a], out_basis[:, b].conj())
        cols.append((p_s @ channel.dual(x) @ p_s).ravel())
    mat = np.array(cols).T
    s = np.linalg.svd(mat, compute_uv=False)
    rank = int(np.sum(s > tol.rank_eps * s[0])) if s.size and s[0] > 0 else 0
    m = min(n_b * n_b - rank + 1, n_b)
    return {
        "reversible": residual <= tol.eq_eps * 10,
        "residual": residual,
        "partition": partition,
        "sigmas": sigmas,
        "sigma_ranks": sigma_ranks,
        "m": m,
        "rank_bound_ok": all(r <= m for r in sigma_ranks),
    }


# ---------------------------------------------------------------------------
# pair search for the reversibility index
# ---------------------------------------------------------------------------

def pair_residual(graph: OperatorSubspace, phi, psi, kl: bool = False) -> float:
    """Residual of the rank-one (and optionally Knill-Laflamme) pair conditions.

    Vectors are normalized first.  The pair conditions are
    ``<phi|g|psi> = 0`` and, with ``kl``, ``<phi|g|phi> = <psi|g|psi>``.
    """
    phi = np.asarray(phi, dtype=complex) / np.linalg.norm(phi)
    psi = np.asarray(psi, dtype=complex) / np.linalg.norm(psi)
    r = np.abs(graph.matrix_elements(phi, psi))
    if kl:
        r = np.concatenate([r, np.abs(graph.matrix_elements(phi, phi) - graph.matrix_elements(psi, psi))])
    return float(r.max()) if r.size else 0.0


def _split(x, d):
    phi = x[:d] + 1j * x[d:2 * d]
    psi = x[2 * d:3 * d] + 1j * x[3 * d:]
    return phi, psi


def _residual_vector(x, stack, d, kl):
    phi, psi = _split(x, d)
    cross = np.einsum("i,gij,j->g", phi.conj(), stack, psi)
    parts = [cross.real, cross.imag, [np.vdot(phi, phi).real - 1, np.vdot(psi, psi).real - 1]]
    if kl:
        parts.append((np.einsum("i,gij,j->g", phi.conj(), stack, phi)
                      - np.einsum("i,gij,j->g", psi.conj(), stack, psi)).real)
    return np.concatenate(parts)


def _polish(x0, stack, d, kl):
    sol = least_squares(_residual_vector, x0, args=(stack, d, kl), method="trf",
                        xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=400)
    return sol.x


@dataclass(frozen=True)
class PairSearchResult:
    found: bool
    residual: float
    phi: np.ndarray
    psi: np.ndarray
    restarts: int


def _finish(graph, x, d, kl, restarts, tol):
    phi, psi = _split(x, d)
    phi, psi = phi / np.linalg.norm(phi), psi / np.linalg.norm(psi)
    res = pair_residual(graph, phi, psi, kl)
    found = res <= max(PAIR_CERT_THRESHOLD, tol.eq_eps)
    return PairSearchResult(found, res, phi, psi, restarts)


def search_pair(graph: OperatorSubspace, kl: bool = False, seed=0, budget: int = 64,
                tol: Tolerance = DEFAULT_TOL) -> PairSearchResult:
    """Seeded least-squares search for a unit pair annihilated by the graph.

    Each restart starts from a random pair and minimizes the bilinear
    residual with a trust-region least-squares solver; the best pair is
    returned.  ``found`` is set only after the exact re-check passes.
    """
    d = graph.dim_space
    stack = graph.stacked()
    rng = rng_from(seed)
    best = None
    for attempt in range(1, max(1, budget) + 1):
        x = _polish(rng.standard_normal(4 * d) / np.sqrt(2 * d), stack, d, kl)
        result = _finish(graph, x, d, kl, attempt, tol)
        if best is None or result.residual < best.residual:
            best = result
        if result.found:
            return result
    return best


def _sphere_grid(n: int):
    """Fibonacci points on the Bloch sphere as qubit vectors."""
    i = np.arange(n) + 0.5
    theta = np.arccos(1 - 2 * i / n)
    phase = np.pi * (1 + 5 ** 0.5) * i
    return np.stack([np.cos(theta / 2), np.exp(1j * phase) * np.sin(theta / 2)], axis=1)


def exhaustive_pair_search(graph: OperatorSubspace, kl: bool = False, samples: int = 10_000,
                           polish: int = 20, seed=0, tol: Tolerance = DEFAULT_TOL) -> PairSearchResult:
    """Dense sampling of candidate pairs followed by polishing of the best ones.

    In dimension 2 the first vector runs over a Fibonacci grid of the Bloch
    sphere and the second is its orthogonal complement; in higher dimension
    pairs are drawn at random and orthogonalized.  Intended for
    dimensions up to 3.
    """
    d = graph.dim_space
    stack = graph.stacked()
    if d == 2:
        phis = _sphere_grid(samples)
        psis = np.stack([-phis[:, 1].conj(), phis[:, 0].conj()], axis=1)
    else:
        rng = rng_from(seed)
        raw = rng.standard_normal((samples, 2, d)) + 1j * rng.standard_normal((samples, 2, d))
        phis = raw[:, 0] / np.linalg.norm(raw[:, 0], axis=1, keepdims=True)
        psis = raw[:, 1] - np.sum(phis.conj() * raw[:, 1], axis=1, keepdims=True) * phis
        psis /= np.linalg.norm(psis, axis=1, keepdims=True)
    cross = np.einsum("si,gij,sj->sg", phis.conj(), stack, psis)
    score = np.sum(np.abs(cross) ** 2, axis=1)
    if kl:
        diag = (np.einsum("si,gij,sj->sg", phis.conj(), stack, phis)
                - np.einsum("si,gij,sj->sg", psis.conj(), stack, psis))
        score += np.sum(np.abs(diag) ** 2, axis=1)
    best = None
    for idx in np.argsort(score)[:polish]:
        x0 = np.concatenate([phis[idx].real, phis[idx].imag, psis[idx].real, psis[idx].imag])
        result = _finish(graph, _polish(x0, stack, d, kl), d, kl, samples, tol)
        if best is None or result.residual < best.residual:
            best = result
        if result.found:
            break
    return best


@dataclass
class ReversibilityIndex:
    """Two-digit reversibility index with certificates.

    ``ri2_certified`` is False when ``ri2`` is only a lower bound found
    within the search budget.
    """

    ri1: int
    ri2: int
    ri2_certified: bool = True
    certificates: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)
    narrative: str = ""

    def __post_init__(self):
        if not self.narrative:
            object.__setattr__(self, "narrative", _describe(self.ri1, self.ri2, self.ri2_certified))

    @property
    def value(self) -> str:
        return f"{self.ri1}{self.ri2}"

    @property
    def status(self) -> str:
        return "certified" if self.ri2_certified else "unknown"

    def __str__(self):
        return self.value


_COMPLETE = {
    0: "no complete family of pure states is reversed",
    1: "complete orthogonal families in some basis are reversed, nonorthogonal ones are not",
    2: "some complete family containing nonorthogonal states is reversed",
}
_NONCOMPLETE = {
    0: "no pair of distinct pure states is reversed",
    1: "some orthogonal pair is reversed but no nonorthogonal pair",
    2: "some nonorthogonal pair is reversed",
}


def _describe(ri1: int, ri2: int, certified: bool) -> str:
    text = f"{_COMPLETE[ri1].capitalize()}; {_NONCOMPLETE[ri2]}."
    if not certified:
        text += " The second digit is a lower bound: the search budget ran out without a certificate."
    return text


def _kl_pair_check(graph, phi, psi, tol):
    return pair_residual(graph, phi, psi, kl=True) <= tol.eq_eps


def reversibility_index(channel: KrausChannel, seed=0, budget: int = 64,
                        tol: Tolerance | None = None) -> ReversibilityIndex:
    """Reversibility index of a finite-dimensional channel.

    ``ri1`` is exact: it is positive iff the noncommutative graph is
    commutative, and equals 2 iff two joint eigenvectors carry identical
    diagonals.  ``ri2`` is upgraded from ``ri1`` when possible, decided
    exactly in dimension 2 and for a full graph, and otherwise searched.
    Negative search outcomes are certified only in dimension 3 (by dense
    sampling plus polishing); above that they are reported as unknown.
    """
    tol = tol or channel.tol
    d = channel.dim_in
    graph = noncommutative_graph(channel, tol)
    certs: dict = {}
    residuals: dict = {}

    ri1 = 0
    try:
        u = common_eigenbasis(graph.basis, tol, seed=seed)
    except NotCommuting:
        u = None
    if u is not None:
        ri1 = 1
        diags = np.array([[np.vdot(u[:, i], g @ u[:, i]).real for g in graph.basis] for i in range(d)])
        certs["orthonormal_basis"] = u
        for i, j in itertools.combinations(range(d), 2):
            if np.abs(diags[i] - diags[j]).max() <= tol.eq_eps:
                ri1 = 2
                certs["kl_pair"] = (u[:, i], u[:, j])
                residuals["kl_pair"] = pair_residual(graph, u[:, i], u[:, j], kl=True)
                break

    if ri1 == 2:
        return ReversibilityIndex(ri1, 2, True, certs, residuals)
    if graph.dim == d * d:
        # The graph is the full matrix algebra: no nonzero operator annihilates it.
        certs["full_graph"] = True
        return ReversibilityIndex(ri1, ri1, True, certs, residuals)
    if d == 2:
        # Any orthonormal pair spans C^2, so pair conditions reduce to the ri1 tests.
        certs["dimension_two_reduction"] = True
        return ReversibilityIndex(ri1, ri1, True, certs, residuals)

    ri2 = ri1
    certified = True
    if ri1 == 0:
        found = search_pair(graph, kl=False, seed=seed, budget=budget, tol=tol)
        residuals["rank_one_search"] = found.residual
        if not found.found and d <= 3:
            found = exhaustive_pair_search(graph, kl=False, seed=seed, tol=tol)
            residuals["rank_one_exhaustive"] = found.residual
        if found.found:
            ri2 = 1
            certs["rank_one_pair"] = (found.phi, found.psi)
        elif d > 3:
            certified = False
    if ri2 >= 1:
        kl = search_pair(graph, kl=True, seed=seed, budget=budget, tol=tol)
        residuals["kl_search"] = kl.residual
        if not kl.found and d <= 3:
            kl = exhaustive_pair_search(graph, kl=True, seed=seed, tol=tol)
            residuals["kl_exhaustive"] = kl.residual
        if kl.found and _kl_pair_check(graph, kl.phi, kl.psi, tol):
            ri2 = 2
            certs["kl_pair"] = (kl.phi, kl.psi)
        elif d > 3:
            certified = False
    return ReversibilityIndex(ri1, ri2, certified, certs, residuals)


def zero_error_positivity(channel: KrausChannel, seed=0, budget: int = 64,
                          tol: Tolerance | None = None):
    """One-shot zero-error positivity ``(C0 > 0, Q0 > 0)`` as tri-state answers."""
    idx = reversibility_index(channel, seed, budget, tol)
    if idx.ri2_certified:
        return TriState.of(idx.ri2 >= 1), TriState.of(idx.ri2 == 2)
    c0 = TriState.YES if idx.ri2 >= 1 else TriState.UNKNOWN
    q0 = TriState.YES if idx.ri2 == 2 else TriState.UNKNOWN
    return c0, q0
