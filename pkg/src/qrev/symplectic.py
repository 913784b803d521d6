"""Exact symplectic linear algebra on (Z, Δ).

Coordinates are interleaved: for s modes the standard basis is
``e_1, h_1, e_2, h_2, ...`` (indices 0, 1, 2, 3, ...) and the standard form is
the block-diagonal sum of ``[[0, 1], [-1, 0]]``, so ``Δ(e_k, h_k) = 1``.
Everything here is exact over the rationals; there is no tolerance.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _exact as ex
from .exceptions import DilationInvalid, DimensionMismatch, InvalidParameter
from .sampling import rng_from

__all__ = [
    "standard_form",
    "SymplecticSpace",
    "SymplecticSubspace",
    "SubspaceKind",
    "Classification",
    "SymplecticBasis",
    "DilationBlocks",
    "DilationReport",
    "MainLemmaReport",
    "skew_complement",
    "classify_subspace",
    "symplectic_gram_schmidt",
    "symplectic_basis_through",
    "is_symplectic_transform",
    "verify_dilation",
    "lemma_mainl_check",
    "random_symplectic",
    "random_subspace",
    "random_dilation",
]


def standard_form(modes: int) -> np.ndarray:
    d = ex.zeros(2 * modes, 2 * modes)
    for k in range(modes):
        d[2 * k, 2 * k + 1] = Fraction(1)
        d[2 * k + 1, 2 * k] = Fraction(-1)
    return d


@dataclass(frozen=True, eq=False)
class SymplecticSpace:
    """Real 2s-dimensional space with a nondegenerate skew-symmetric form."""

    modes: int
    form: np.ndarray = None

    def __post_init__(self):
        if self.modes < 0:
            raise InvalidParameter("mode count must be nonnegative")
        form = standard_form(self.modes) if self.form is None else ex.exact(self.form, 2)
        n = 2 * self.modes
        if form.shape != (n, n):
            raise DimensionMismatch(f"form must be {n}x{n}, got {form.shape}")
        if not ex.is_zero(form + form.T):
            raise InvalidParameter("form is not skew-symmetric")
        if ex.rank(form) != n:
            raise InvalidParameter("form is degenerate")
        object.__setattr__(self, "form", form)

    @property
    def dim(self) -> int:
        return 2 * self.modes

    def pair(self, x, y) -> Fraction:
        return (np.asarray(x, dtype=object) @ self.form @ np.asarray(y, dtype=object))

    def e(self, k: int) -> np.ndarray:
        """Standard vector e_{k+1} (zero-based ``k``)."""
        v = ex.zeros(1, self.dim)[0]
        v[2 * k] = Fraction(1)
        return v

    def h(self, k: int) -> np.ndarray:
        v = ex.zeros(1, self.dim)[0]
        v[2 * k + 1] = Fraction(1)
        return v

    def __eq__(self, other):
        return isinstance(other, SymplecticSpace) and self.modes == other.modes and ex.equal(self.form, other.form)

    def __hash__(self):
        return hash((self.modes, tuple(self.form.flat)))

    def __repr__(self):
        return f"SymplecticSpace(modes={self.modes})"

    def zero(self) -> "SymplecticSubspace":
        return SymplecticSubspace(self, ex.zeros(0, self.dim))

    def whole(self) -> "SymplecticSubspace":
        return SymplecticSubspace(self, ex.identity(self.dim))

    def span(self, vectors) -> "SymplecticSubspace":
        """Subspace spanned by possibly dependent vectors."""
        rows = ex.exact(vectors).reshape(-1, self.dim) if len(vectors) else ex.zeros(0, self.dim)
        return SymplecticSubspace(self, ex.row_span(rows))


@dataclass(frozen=True, eq=False)
class SymplecticSubspace:
    """Subspace of a symplectic space given by independent basis rows."""

    ambient: SymplecticSpace
    basis: np.ndarray
    canonical: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        n = self.ambient.dim
        b = ex.exact(self.basis).reshape(-1, n) if np.size(self.basis) else ex.zeros(0, n)
        canon = ex.row_span(b)
        if canon.shape[0] != b.shape[0]:
            raise InvalidParameter("basis vectors are linearly dependent")
        object.__setattr__(self, "basis", b)
        object.__setattr__(self, "canonical", canon)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def gram(self) -> np.ndarray:
        return self.basis @ self.ambient.form @ self.basis.T

    def contains(self, v) -> bool:
        v = ex.exact(v).reshape(1, -1)
        return ex.rank(np.concatenate([self.canonical, v])) == self.dim

    def issubset(self, other: "SymplecticSubspace") -> bool:
        return all(other.contains(b) for b in self.basis)

    def intersection(self, other: "SymplecticSubspace") -> "SymplecticSubspace":
        return SymplecticSubspace(self.ambient, ex.intersect_rows(self.canonical, other.canonical))

    def join(self, other: "SymplecticSubspace") -> "SymplecticSubspace":
        return SymplecticSubspace(self.ambient, ex.row_span(np.concatenate([self.basis, other.basis])))

    def image(self, t, target: SymplecticSpace) -> "SymplecticSubspace":
        """``T(L)`` for a matrix ``T : Z -> target``."""
        t = ex.exact(t, 2)
        if self.dim == 0:
            return target.zero()
        return SymplecticSubspace(target, ex.row_span((t @ self.basis.T).T))

    def __eq__(self, other):
        return (
            isinstance(other, SymplecticSubspace)
            and self.ambient == other.ambient
            and ex.equal(self.canonical, other.canonical)
        )

    def __hash__(self):
        return hash((self.ambient, tuple(self.canonical.flat)))

    def __repr__(self):
        return f"SymplecticSubspace(dim={self.dim}, basis={ex.to_strings(self.basis)})"


def skew_complement(sub: SymplecticSubspace) -> SymplecticSubspace:
    """``L^⊥ = {z : Δ(z, z') = 0 for all z' in L}``."""
    z = sub.ambient
    if sub.dim == 0:
        return z.whole()
    return SymplecticSubspace(z, ex.row_span(ex.nullspace(sub.basis @ z.form)))


class SubspaceKind(enum.Enum):
    SYMPLECTIC = "symplectic"
    ISOTROPIC = "isotropic"
    MIXED = "mixed"


@dataclass(frozen=True)
class Classification:
    kind: SubspaceKind
    radical: SymplecticSubspace

    def __iter__(self):
        return iter((self.kind, self.radical))


def _radical(sub: SymplecticSubspace) -> SymplecticSubspace:
    if sub.dim == 0:
        return sub
    coeffs = ex.nullspace(sub.gram())
    return SymplecticSubspace(sub.ambient, ex.row_span(coeffs @ sub.basis) if coeffs.shape[0] else ex.zeros(0, sub.ambient.dim))


def classify_subspace(sub: SymplecticSubspace) -> Classification:
    """Symplectic if Δ is nondegenerate on L, isotropic if it vanishes, else mixed.

    The zero subspace counts as both; it is reported as isotropic.
    """
    rad = _radical(sub)
    if rad.dim == sub.dim:
        kind = SubspaceKind.ISOTROPIC
    elif rad.dim == 0:
        kind = SubspaceKind.SYMPLECTIC
    else:
        kind = SubspaceKind.MIXED
    return Classification(kind, rad)


def _project_out(space: SymplecticSpace, x, e, h):
    # Removes the span{e, h} component of x, given Δ(e, h) = 1.
    return x - space.pair(x, h) * e + space.pair(x, e) * h


def symplectic_gram_schmidt(space: SymplecticSpace, vectors) -> list:
    """Symplectic basis ``[(e, h), ...]`` of the span of ``vectors``.

    The span must be a symplectic subspace; the first nonzero vector is kept
    as the first ``e``.
    """
    work = [np.asarray(v, dtype=object) for v in vectors]
    work = [v for v in work if not ex.is_zero(v)]
    pairs = []
    while work:
        e = work.pop(0)
        j = next((i for i, w in enumerate(work) if space.pair(e, w) != 0), None)
        if j is None:
            raise InvalidParameter("vectors do not span a symplectic subspace")
        w = work.pop(j)
        h = w / space.pair(e, w)
        pairs.append((e, h))
        work = [_project_out(space, x, e, h) for x in work]
        work = [x for x in work if not ex.is_zero(x)]
    return pairs


@dataclass(frozen=True, eq=False)
class SymplecticBasis:
    """Full symplectic basis ``{ẽ_k, h̃_k}`` of Z built around a subspace L.

    ``inside`` lists the vectors of the basis that lie in L (exactly dim L of them).
    """

    ambient: SymplecticSpace
    e: tuple
    h: tuple
    inside: tuple

    def matrix(self) -> np.ndarray:
        """Change-of-basis matrix with columns ``ẽ_1, h̃_1, ẽ_2, h̃_2, ...``."""
        n = self.ambient.dim
        m = ex.zeros(n, n)
        for k, (e, h) in enumerate(zip(self.e, self.h)):
            m[:, 2 * k] = e
            m[:, 2 * k + 1] = h
        return m

    def vectors_in_subspace(self) -> list:
        return [self.e[k] if kind == "e" else self.h[k] for kind, k in self.inside]

    @property
    def count_in_subspace(self) -> int:
        return len(self.inside)

    def is_valid(self) -> bool:
        z = self.ambient
        s = z.modes
        for i in range(s):
            for j in range(s):
                if z.pair(self.e[i], self.e[j]) != 0 or z.pair(self.h[i], self.h[j]) != 0:
                    return False
                if z.pair(self.e[i], self.h[j]) != int(i == j):
                    return False
        return True


def _solve_in(space: SymplecticSpace, w_basis, constraints, targets):
    """Vector ``x`` in span(w_basis) with ``Δ(c_i, x) = t_i``.

    The basis is scanned in reverse so that, with free coefficients set to
    zero, later standard vectors are preferred (this picks ``h`` partners for
    ``e`` vectors in the standard basis).
    """
    w = w_basis[::-1]
    a = np.array([[space.pair(c, b) for b in w] for c in constraints], dtype=object)
    coef = ex.solve(a, np.array(targets, dtype=object))
    if coef is None:
        raise InvalidParameter("no partner vector exists")
    return coef @ w


def symplectic_basis_through(sub: SymplecticSubspace) -> SymplecticBasis:
    """Symplectic basis of Z of which exactly dim L vectors lie in L.

    Split ``L = L_1 + L_2`` with ``L_1 = L ∩ L^⊥`` the radical and ``L_2`` a
    complement (symplectic).  ``L_2`` gets a symplectic basis from Gram–Schmidt,
    the radical vectors become ``ẽ``'s whose partners are found one at a time
    in ``L_2^⊥``, and the remainder is completed inside the leftover
    symplectic subspace.
    """
    z = sub.ambient
    rad = _radical(sub)
    # Complement of the radical inside L, chosen among L's own basis vectors.
    l2 = []
    acc = rad.basis
    for b in sub.basis:
        trial = np.concatenate([acc, b.reshape(1, -1)])
        if ex.rank(trial) > acc.shape[0]:
            acc = trial
            l2.append(b)
    pairs_l2 = symplectic_gram_schmidt(z, l2)

    es, hs, inside = [], [], []
    for e, h in pairs_l2:
        inside += [("e", len(es)), ("h", len(es))]
        es.append(e)
        hs.append(h)

    # W = L_2^⊥ is symplectic and contains the radical as an isotropic subspace.
    l2_span = z.span(l2) if l2 else z.zero()
    w = skew_complement(l2_span).basis
    radical = [r for r in rad.basis]
    while radical:
        f = radical.pop(0)
        others = radical
        h = _solve_in(z, list(w), [f] + others, [1] + [0] * len(others))
        inside.append(("e", len(es)))
        es.append(f)
        hs.append(h)
        cut = skew_complement(z.span([f, h]))
        w = ex.intersect_rows(ex.row_span(np.array(list(w), dtype=object).reshape(-1, z.dim)), cut.canonical)
        w = list(w)

    for e, h in symplectic_gram_schmidt(z, w):
        es.append(e)
        hs.append(h)
    basis = SymplecticBasis(z, tuple(es), tuple(hs), tuple(inside))
    if len(es) != z.modes:
        raise AssertionError("basis construction produced the wrong number of pairs")
    return basis


def is_symplectic_transform(t, space: SymplecticSpace) -> bool:
    """Exact test of ``Tᵀ Δ T = Δ``."""
    t = ex.exact(t, 2)
    if t.shape != (space.dim, space.dim):
        raise DimensionMismatch(f"expected a {space.dim}x{space.dim} matrix, got {t.shape}")
    return ex.equal(t.T @ space.form @ t, space.form)


# --- dilations -------------------------------------------------------------


def _block(m, rows, cols, name):
    m = ex.zeros(rows, cols) if m is None else ex.exact(m)
    if m.size == 0:
        m = ex.zeros(rows, cols)
    if m.shape != (rows, cols):
        raise DimensionMismatch(f"{name} must be {rows}x{cols}, got {m.shape}")
    return m


@dataclass(frozen=True, eq=False)
class DilationBlocks:
    """Blocks of ``T = [[K, L], [K_D, L_D]] : Z_B ⊕ Z_E -> Z_A ⊕ Z_D``."""

    z_a: SymplecticSpace
    z_b: SymplecticSpace
    z_d: SymplecticSpace
    z_e: SymplecticSpace
    K: np.ndarray
    L: np.ndarray = None
    K_D: np.ndarray = None
    L_D: np.ndarray = None

    def __post_init__(self):
        a, b, d, e = self.z_a.dim, self.z_b.dim, self.z_d.dim, self.z_e.dim
        if a + d != b + e:
            raise DimensionMismatch("dim Z_A + dim Z_D must equal dim Z_B + dim Z_E")
        object.__setattr__(self, "K", _block(self.K, a, b, "K"))
        object.__setattr__(self, "L", _block(self.L, a, e, "L"))
        object.__setattr__(self, "K_D", _block(self.K_D, d, b, "K_D"))
        object.__setattr__(self, "L_D", _block(self.L_D, d, e, "L_D"))

    @classmethod
    def from_transform(cls, t, s_a: int, s_b: int) -> "DilationBlocks":
        """Split a square ``T`` on standard spaces with the given A and B mode counts."""
        t = ex.exact(t, 2)
        n = t.shape[0]
        if t.shape != (n, n) or n % 2:
            raise DimensionMismatch("T must be square of even size")
        s = n // 2
        if not (0 <= s_a <= s and 0 <= s_b <= s):
            raise DimensionMismatch("mode counts exceed the size of T")
        a, b = 2 * s_a, 2 * s_b
        return cls(
            SymplecticSpace(s_a), SymplecticSpace(s_b), SymplecticSpace(s - s_a), SymplecticSpace(s - s_b),
            t[:a, :b], t[:a, b:], t[a:, :b], t[a:, b:],
        )

    def transform(self) -> np.ndarray:
        top = np.concatenate([self.K, self.L], axis=1)
        bottom = np.concatenate([self.K_D, self.L_D], axis=1)
        return np.concatenate([top, bottom], axis=0)


@dataclass(frozen=True)
class DilationReport:
    ok: bool
    residuals: dict
    failed: tuple


def verify_dilation(blocks: DilationBlocks) -> DilationReport:
    """Checks the six block identities equivalent to T and Tᵀ being symplectic."""
    da, db, dd, de = (blocks.z_a.form, blocks.z_b.form, blocks.z_d.form, blocks.z_e.form)
    k, l, kd, ld = blocks.K, blocks.L, blocks.K_D, blocks.L_D
    res = {
        "delta_B": db - (k.T @ da @ k + kd.T @ dd @ kd),
        "cross_BE": -(l.T @ da @ k + ld.T @ dd @ kd),
        "delta_E": de - (l.T @ da @ l + ld.T @ dd @ ld),
        "delta_A": da - (k @ db @ k.T + l @ de @ l.T),
        "cross_AD": -(kd @ db @ k.T + ld @ de @ l.T),
        "delta_D": dd - (kd @ db @ kd.T + ld @ de @ ld.T),
    }
    res = {name: ex.exact(r) if r.size else r for name, r in res.items()}
    failed = tuple(name for name, r in res.items() if not ex.is_zero(r))
    return DilationReport(not failed, res, failed)


@dataclass(frozen=True)
class MainLemmaReport:
    ran_L: SymplecticSubspace
    ran_L_perp: SymplecticSubspace
    ker_K_D: SymplecticSubspace
    K_of_ker: SymplecticSubspace
    back_image: SymplecticSubspace
    forward_equal: bool
    backward_equal: bool
    preserves_form: bool

    @property
    def ok(self) -> bool:
        return self.forward_equal and self.backward_equal and self.preserves_form


def lemma_mainl_check(blocks: DilationBlocks) -> MainLemmaReport:
    """``[Ran L]^⊥ = K(ker K_D)``, the reverse map, and K symplectic on ker K_D."""
    rep = verify_dilation(blocks)
    if not rep.ok:
        raise DilationInvalid(f"blocks do not form a symplectic dilation; failed: {', '.join(rep.failed)}")
    za, zb = blocks.z_a, blocks.z_b
    ran_l = SymplecticSubspace(za, ex.row_span(blocks.L.T)) if blocks.L.size else za.zero()
    perp = skew_complement(ran_l)
    if blocks.K_D.shape[0]:
        ker = SymplecticSubspace(zb, ex.row_span(ex.nullspace(blocks.K_D)))
    else:
        ker = zb.whole()
    k_ker = ker.image(blocks.K, za)
    back = perp.image(zb.form @ blocks.K.T @ za.form, zb)
    kb = (blocks.K @ ker.basis.T).T if ker.dim else ker.basis
    preserves = ex.equal(kb @ za.form @ kb.T, ker.basis @ zb.form @ ker.basis.T) if ker.dim else True
    return MainLemmaReport(ran_l, perp, ker, k_ker, back, k_ker == perp, back == ker, preserves)


# --- seeded generators ------------------------------------------------------

_ROTATIONS = ((Fraction(3, 5), Fraction(4, 5)), (Fraction(4, 5), Fraction(3, 5)), (Fraction(5, 13), Fraction(12, 13)))
_SCALES = (Fraction(2), Fraction(1, 2), Fraction(3), Fraction(1, 3), Fraction(3, 2))
_COEFFS = (Fraction(1), Fraction(-1), Fraction(1, 2), Fraction(-1, 2), Fraction(2))


def _elementary(modes: int, rng) -> np.ndarray:
    n = 2 * modes
    t = ex.identity(n)
    kind = rng.integers(4) if modes > 1 else rng.choice([0, 1, 3])
    if kind == 0:
        # Transvection x -> x + c Δ(v, x) v.
        v = ex.exact(rng.integers(-1, 2, size=n))
        if ex.is_zero(v):
            v[rng.integers(n)] = Fraction(1)
        c = _COEFFS[rng.integers(len(_COEFFS))]
        return t + c * np.outer(v, v @ standard_form(modes))
    if kind == 1:
        k = rng.integers(modes)
        r = _SCALES[rng.integers(len(_SCALES))]
        t[2 * k, 2 * k], t[2 * k + 1, 2 * k + 1] = r, 1 / r
        return t
    cs, sn = _ROTATIONS[rng.integers(len(_ROTATIONS))]
    if rng.integers(2):
        sn = -sn
    if kind == 2:
        # Beam-splitter rotation of two modes acting identically on e's and h's.
        i, j = rng.choice(modes, size=2, replace=False)
        for off in (0, 1):
            a, b = 2 * i + off, 2 * j + off
            t[a, a], t[a, b], t[b, a], t[b, b] = cs, -sn, sn, cs
        return t
    k = rng.integers(modes)
    a, b = 2 * k, 2 * k + 1
    t[a, a], t[a, b], t[b, a], t[b, b] = cs, -sn, sn, cs
    return t


def random_symplectic(modes: int, seed=0, steps: int | None = None) -> np.ndarray:
    """Seeded exact symplectic matrix: a product of elementary generators."""
    rng = rng_from(seed)
    t = ex.identity(2 * modes)
    if modes == 0:
        return t
    for _ in range(steps if steps is not None else 2 * modes + 1):
        t = _elementary(modes, rng) @ t
    return t


def random_subspace(space: SymplecticSpace, dim: int | None = None, seed=0) -> SymplecticSubspace:
    """Seeded subspace with small integer basis entries, sometimes sparse to hit degenerate cases."""
    rng = rng_from(seed)
    n = space.dim
    k = int(rng.integers(0, n + 1)) if dim is None else dim
    if k == 0:
        return space.zero()
    for _ in range(100):
        if rng.random() < 0.3:
            rows = ex.identity(n)[rng.choice(n, size=k, replace=False)]
            if rng.random() < 0.5 and k > 1:
                rows[0] = rows[0] + rows[1] * Fraction(int(rng.integers(-2, 3)))
        else:
            rows = ex.exact(rng.integers(-2, 3, size=(k, n)))
        if ex.rank(rows) == k:
            return SymplecticSubspace(space, rows)
    raise AssertionError("failed to draw an independent set")


def random_dilation(s_a: int, s_b: int, s_e: int, seed=0, direct: int | None = None) -> DilationBlocks:
    """Seeded exact dilation ``T`` on ``Z_B ⊕ Z_E -> Z_A ⊕ Z_D``.

    ``direct`` modes of B are routed straight to A (then mixed by local
    symplectic maps on each side), which gives K_D a nontrivial kernel.
    """
    rng = rng_from(seed)
    n = s_b + s_e
    s_d = n - s_a
    if s_d < 0:
        raise InvalidParameter("need s_B + s_E >= s_A")
    cap = min(s_a, s_b)
    k = int(rng.integers(0, cap + 1)) if direct is None else min(direct, cap)
    # Middle: modes [0, k) of B go to modes [0, k) of A unchanged; the rest mix.
    rest = n - k
    middle = ex.identity(2 * n)
    if rest:
        mix = random_symplectic(rest, rng, steps=2 * rest + 1)
        middle[2 * k:, 2 * k:] = mix
    # Reorder output coordinates so the direct block lands inside A, and input
    # coordinates so the direct block comes from B.
    def local(s1, s2):
        out = ex.zeros(2 * (s1 + s2), 2 * (s1 + s2))
        out[: 2 * s1, : 2 * s1] = random_symplectic(s1, rng, steps=s1 + 1)
        out[2 * s1 :, 2 * s1 :] = random_symplectic(s2, rng, steps=s2 + 1)
        return out
    t = local(s_a, s_d) @ middle @ local(s_b, s_e)
    return DilationBlocks.from_transform(t, s_a, s_b)
