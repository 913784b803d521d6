"""Bosonic Gaussian channels given by (K, l, α) and their reversibility index.

The channel maps Weyl operators of the output system B back to the input
system A, ``W_B(z) -> W_A(K z) exp(i l z - z^T α z / 2)``, so ``K`` is
``2 s_A x 2 s_B`` and α lives on ``Z_B``.  Coordinates are interleaved
(q_1, p_1, q_2, p_2, ...) as in :mod:`qrev.symplectic`.

Classification works on exact rationals: floating-point entries are snapped
with denominator at most 10**6 and the largest move is recorded.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _exact as ex
from .exceptions import DilationInvalid, InvalidParameter, InvalidShape, SnapTooCoarse
from .numerics import DEFAULT_TOL, Tolerance
from .reversibility import ReversibilityIndex
from .symplectic import (
    DilationBlocks,
    SubspaceKind,
    SymplecticBasis,
    SymplecticSpace,
    SymplecticSubspace,
    classify_subspace,
    is_symplectic_transform,
    skew_complement,
    standard_form,
    symplectic_basis_through,
    verify_dilation,
)

__all__ = [
    "SNAP_DENOMINATOR",
    "SNAP_BOUND",
    "snap",
    "GaussianChannelParams",
    "GaussianEnvironment",
    "ValidationReport",
    "ReversedSubspaceReport",
    "validate",
    "kernel_Zf",
    "gaussian_reversibility_index",
    "onemode_canonical",
    "weak_complementary_params",
    "reversed_subspace_report",
    "b1_dilation",
]

SNAP_DENOMINATOR = 10**6
SNAP_BOUND = 1e-6


def snap(a, max_denominator: int = SNAP_DENOMINATOR):
    """Exact copy of ``a`` and the largest distance moved by rounding floats.

    Entries that are already exact (ints, Fractions, "p/q" strings) are kept.
    """
    arr = np.asarray(a, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    dist = 0.0
    for idx, x in np.ndenumerate(arr):
        if isinstance(x, (float, np.floating)):
            if not np.isfinite(x):
                raise InvalidParameter("non-finite entry")
            q = Fraction(float(x)).limit_denominator(max_denominator)
            dist = max(dist, abs(float(x) - float(q)))
            out[idx] = q
        else:
            out[idx] = ex.frac(x)
    return out, dist


def _as_float(a) -> np.ndarray:
    arr = np.asarray(a, dtype=object)
    out = np.empty(arr.shape, dtype=float)
    for idx, x in np.ndenumerate(arr):
        out[idx] = float(x) if isinstance(x, (float, np.floating)) else float(ex.frac(x))
    return out


@dataclass(frozen=True, eq=False)
class GaussianChannelParams:
    """Parameters ``(K, l, α)`` of a Bosonic Gaussian channel.

    ``zf_basis`` admits a general Bosonic linear channel: the noise-free
    subspace is then supplied directly and ``alpha`` may be omitted.
    """

    K: np.ndarray
    alpha: np.ndarray | None = None
    l: np.ndarray | None = None
    modes_in: int | None = None
    modes_out: int | None = None
    zf_basis: np.ndarray | None = None
    snap_bound: float = SNAP_BOUND
    K_exact: np.ndarray = field(init=False, repr=False)
    alpha_exact: np.ndarray | None = field(init=False, repr=False)
    snap_distance: float = field(init=False)

    def __post_init__(self):
        raw_k = np.asarray(self.K, dtype=object)
        if raw_k.ndim != 2:
            raise InvalidShape("K must be a matrix")
        rows, cols = raw_k.shape
        s_a = self.modes_in if self.modes_in is not None else rows // 2
        s_b = self.modes_out if self.modes_out is not None else cols // 2
        if raw_k.size == 0:
            raw_k = np.zeros((2 * s_a, 2 * s_b), dtype=object)
        if raw_k.shape != (2 * s_a, 2 * s_b):
            raise InvalidShape(f"K must be {2 * s_a}x{2 * s_b}, got {raw_k.shape}")
        k_exact, dist = snap(raw_k)
        alpha_exact = None
        if self.alpha is not None:
            raw_a = np.asarray(self.alpha, dtype=object)
            if raw_a.shape != (2 * s_b, 2 * s_b):
                raise InvalidShape(f"alpha must be {2 * s_b}x{2 * s_b}, got {raw_a.shape}")
            alpha_exact, d2 = snap(raw_a)
            dist = max(dist, d2)
            if not ex.equal(alpha_exact, alpha_exact.T):
                raise InvalidShape("alpha must be symmetric")
        elif self.zf_basis is None:
            raise InvalidParameter("either alpha or zf_basis is required")
        l = np.zeros(2 * s_b) if self.l is None else np.asarray(self.l, dtype=float).reshape(-1)
        if l.shape != (2 * s_b,):
            raise InvalidShape(f"l must have length {2 * s_b}")
        zf = None
        if self.zf_basis is not None:
            zf, d3 = snap(np.asarray(self.zf_basis, dtype=object).reshape(-1, 2 * s_b))
            dist = max(dist, d3)
        object.__setattr__(self, "modes_in", s_a)
        object.__setattr__(self, "modes_out", s_b)
        object.__setattr__(self, "K", _as_float(raw_k))
        object.__setattr__(self, "alpha", None if alpha_exact is None else _as_float(self.alpha))
        object.__setattr__(self, "l", l)
        object.__setattr__(self, "zf_basis", zf)
        object.__setattr__(self, "K_exact", k_exact)
        object.__setattr__(self, "alpha_exact", alpha_exact)
        object.__setattr__(self, "snap_distance", dist)

    @property
    def z_a(self) -> SymplecticSpace:
        return SymplecticSpace(self.modes_in)

    @property
    def z_b(self) -> SymplecticSpace:
        return SymplecticSpace(self.modes_out)

    def commutator_defect(self) -> np.ndarray:
        """Exact ``Δ_B - Kᵀ Δ_A K``."""
        k = self.K_exact
        return ex.exact(standard_form(self.modes_out) - k.T @ standard_form(self.modes_in) @ k)

    def check_snap(self):
        if self.snap_distance > self.snap_bound:
            raise SnapTooCoarse(
                f"rational snapping moved an entry by {self.snap_distance:.3g} > {self.snap_bound:.3g}"
            )


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    min_eigenvalues: tuple
    threshold: float
    note: str = ""

    def __bool__(self):
        return self.valid


def validate(params: GaussianChannelParams, tol: Tolerance = DEFAULT_TOL) -> ValidationReport:
    """Checks ``α ≥ ± (i/2)(Δ_B - Kᵀ Δ_A K)`` numerically."""
    if params.alpha is None:
        return ValidationReport(True, (), 0.0, "noise function supplied only through its noise-free subspace")
    defect = ex.to_float(params.commutator_defect())
    mins = []
    scale = 1.0
    for sign in (1, -1):
        m = params.alpha - sign * 0.5j * defect
        scale = max(scale, float(np.linalg.norm(m, 2)) if m.size else 0.0)
        mins.append(float(np.linalg.eigvalsh(m)[0]) if m.size else 0.0)
    thr = tol.eq_eps * scale
    return ValidationReport(min(mins) >= -thr, tuple(mins), thr)


def kernel_Zf(params: GaussianChannelParams) -> SymplecticSubspace:
    """Noise-free subspace ``Z_f = ker α`` of ``Z_B``, computed exactly."""
    params.check_snap()
    z = params.z_b
    if params.zf_basis is not None:
        return z.span(list(params.zf_basis)) if params.zf_basis.shape[0] else z.zero()
    if z.dim == 0:
        return z.zero()
    return z.span(list(ex.nullspace(params.alpha_exact)))


def _is_noiseless(params: GaussianChannelParams) -> bool:
    if params.alpha_exact is None or not ex.is_zero(params.alpha_exact):
        return False
    if params.modes_in != params.modes_out:
        return False
    return is_symplectic_transform(params.K_exact, params.z_a)


def _vec_str(v) -> str:
    return "(" + ", ".join(str(x) for x in v) + ")"


def gaussian_reversibility_index(params: GaussianChannelParams) -> ReversibilityIndex:
    """Index 22 for noiseless channels, otherwise 00 / 01 / 02 from the type of ker α."""
    params.check_snap()
    zf = kernel_Zf(params)
    cls = classify_subspace(zf)
    certs = {
        "ker_alpha_basis": ex.to_strings(zf.basis),
        "classification": cls.kind.value if zf.dim else "trivial",
        "radical_basis": ex.to_strings(cls.radical.basis),
        "snap_distance": params.snap_distance,
    }
    if _is_noiseless(params):
        certs["noiseless"] = True
        return ReversibilityIndex(
            2, 2, True, certs, {},
            "α = 0 and K is symplectic: the channel is a symplectic unitary and reverses every family.",
        )
    certs["noiseless"] = False
    basis = ", ".join(_vec_str(v) for v in zf.basis)
    if zf.dim == 0:
        return ReversibilityIndex(
            0, 0, True, certs, {},
            "α is nondegenerate, so no canonical variable is noise-free; no family of two or more pure states is reversed.",
        )
    if cls.kind is SubspaceKind.ISOTROPIC:
        return ReversibilityIndex(
            0, 1, True, certs, {},
            f"ker α = span{{{basis}}} is isotropic: its canonical variables are noise-free and mutually commuting, "
            "so orthogonal noncomplete families survive but no nonorthogonal one does.",
        )
    return ReversibilityIndex(
        0, 2, True, certs, {},
        f"ker α = span{{{basis}}} contains a pair z1, z2 with Δ_B(z1, z2) ≠ 0: noise-free canonically conjugate "
        "variables exist, so nonorthogonal families can be reversed.",
    )


def _minimal_alpha_level(k, tol: Tolerance = DEFAULT_TOL, iters: int = 80) -> Fraction:
    """Smallest t with ``t I ≥ ± (i/2)(Δ - Kᵀ Δ K)``, by bisection then snapping."""
    k = np.asarray(k, dtype=float)
    s = k.shape[0] // 2
    d = ex.to_float(standard_form(s))
    m = 0.5j * (d - k.T @ d @ k)

    def ok(t):
        return np.linalg.eigvalsh(t * np.eye(2 * s) - m)[0] >= -tol.eq_eps

    lo, hi = 0.0, 1.0
    while not ok(hi):
        hi *= 2
    for _ in range(iters):
        mid = (lo + hi) / 2
        lo, hi = (lo, mid) if ok(mid) else (mid, hi)
    t = Fraction(hi).limit_denominator(SNAP_DENOMINATOR)
    if not ok(float(t)):
        t = Fraction(hi)
    return t


def onemode_canonical(kind: str, N=0, k=None) -> GaussianChannelParams:
    """One-mode canonical channels A1, A2, B1, B2, C, D with exact entries."""
    kind = kind.upper().replace("_", "")
    n = ex.frac(N)
    if n < 0:
        raise InvalidParameter("noise N must be nonnegative")
    half = Fraction(1, 2)
    eye = ex.identity(2)
    if kind in ("C", "D"):
        if k is None:
            raise InvalidParameter(f"type {kind} needs a gain k")
        kk = ex.frac(k)
        if kk <= 0 or (kind == "C" and kk == 1):
            raise InvalidParameter("gain must satisfy k > 0 (and k != 1 for type C)")
    if kind == "A1":
        K, alpha = ex.zeros(2, 2), (n + half) * eye
    elif kind == "A2":
        K = ex.exact([[1, 0], [0, 0]])
        alpha = (n + _minimal_alpha_level(ex.to_float(K))) * eye
    elif kind == "B1":
        K, alpha = eye, ex.exact([[0, 0], [0, Fraction(1, 4)]])
    elif kind == "B2":
        K, alpha = eye, n * eye
    elif kind == "C":
        K, alpha = kk * eye, abs(1 - kk * kk) * (n + half) * eye
    elif kind == "D":
        K, alpha = kk * ex.exact([[1, 0], [0, -1]]), (1 + kk * kk) * (n + half) * eye
    else:
        raise InvalidParameter(f"unknown canonical type {kind!r}")
    return GaussianChannelParams(K, alpha)


@dataclass(frozen=True, eq=False)
class GaussianEnvironment:
    """Symplectic dilation blocks together with the environment covariance α_D."""

    blocks: DilationBlocks
    alpha_D: np.ndarray

    def __post_init__(self):
        a = ex.exact(self.alpha_D, 2)
        dd = self.blocks.z_d.dim
        if a.shape != (dd, dd):
            raise InvalidShape(f"alpha_D must be {dd}x{dd}")
        if not ex.equal(a, a.T):
            raise InvalidShape("alpha_D must be symmetric")
        if dd and ex.rank(a) != dd:
            raise InvalidParameter("alpha_D must be nondegenerate")
        if dd:
            m = ex.to_float(a) - 0.5j * ex.to_float(self.blocks.z_d.form)
            if np.linalg.eigvalsh(m)[0] < -DEFAULT_TOL.eq_eps * max(1.0, np.linalg.norm(m, 2)):
                raise InvalidParameter("alpha_D is not a valid quantum covariance")
        rep = verify_dilation(self.blocks)
        if not rep.ok:
            raise DilationInvalid(f"dilation identities fail: {', '.join(rep.failed)}")
        object.__setattr__(self, "alpha_D", a)

    @property
    def alpha(self) -> np.ndarray:
        kd = self.blocks.K_D
        return ex.exact(kd.T @ self.alpha_D @ kd) if kd.size else ex.zeros(self.blocks.z_b.dim, self.blocks.z_b.dim)

    def channel_params(self) -> GaussianChannelParams:
        b = self.blocks
        return GaussianChannelParams(b.K, self.alpha, modes_in=b.z_a.modes, modes_out=b.z_b.modes)


def weak_complementary_params(env: GaussianEnvironment):
    """``(L, α_w)`` with ``α_w = L_Dᵀ α_D L_D`` for the weak complementary channel A -> E."""
    rep = verify_dilation(env.blocks)
    if not rep.ok:
        raise DilationInvalid(f"dilation identities fail: {', '.join(rep.failed)}")
    ld = env.blocks.L_D
    alpha_w = ex.exact(ld.T @ env.alpha_D @ ld) if ld.size else ex.zeros(env.blocks.z_e.dim, env.blocks.z_e.dim)
    return env.blocks.L, alpha_w


def b1_dilation() -> GaussianEnvironment:
    """One-mode-environment dilation of the B1 channel."""
    blocks = DilationBlocks(
        SymplecticSpace(1), SymplecticSpace(1), SymplecticSpace(1), SymplecticSpace(1),
        K=ex.identity(2),
        L=ex.exact([[-1, 0], [0, 0]]),
        K_D=ex.exact([[0, 0], [0, 1]]),
        L_D=ex.identity(2),
    )
    return GaussianEnvironment(blocks, ex.exact([[1, 0], [0, Fraction(1, 4)]]))


@dataclass(frozen=True)
class ReversedSubspaceReport:
    """Structure of ``K(Z_f)`` and the adapted symplectic basis of ``Z_A``.

    ``d`` counts basis pairs whose ``ẽ`` lies in ``K(Z_f)``; these are the
    first ``d`` pairs of ``basis``.
    """

    zf: SymplecticSubspace
    k_zf: SymplecticSubspace
    kind: str
    radical: SymplecticSubspace
    basis: SymplecticBasis
    d: int
    symplectic_pairs: int
    ran_L: SymplecticSubspace
    early_exit: bool
    early_exit_consistent: bool
    complete_family_reversible: bool
    index: ReversibilityIndex


def reversed_subspace_report(params: GaussianChannelParams) -> ReversedSubspaceReport:
    params.check_snap()
    zf = kernel_Zf(params)
    k_zf = zf.image(params.K_exact, params.z_a)
    cls = classify_subspace(k_zf)
    basis = symplectic_basis_through(k_zf)
    pairs = sum(1 for kind, _ in basis.inside if kind == "h")
    d = pairs + cls.radical.dim
    early = ex.rank(params.commutator_defect()) == params.z_b.dim and params.z_b.dim > 0
    idx = gaussian_reversibility_index(params)
    return ReversedSubspaceReport(
        zf=zf,
        k_zf=k_zf,
        kind=cls.kind.value if k_zf.dim else "trivial",
        radical=cls.radical,
        basis=basis,
        d=d,
        symplectic_pairs=pairs,
        ran_L=skew_complement(k_zf),
        early_exit=early,
        early_exit_consistent=(not early) or (zf.dim == 0 and idx.value == "00"),
        complete_family_reversible=zf.dim > 0,
        index=idx,
    )
