"""Pure-state families of a Gaussian channel described by wave-function supports.

A member of the family is abstracted to the support of its wave function, a
finite union of rational boxes in R^{s_A}.  The first ``d`` coordinates are
the noise-free ones; a family is reversed when supports stay disjoint under
every shift of the remaining coordinates.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from . import _exact as ex
from .exceptions import InvalidParameter, NotDisjoint

__all__ = [
    "BoxSupport",
    "ReversedFamilySpec",
    "ShiftCheck",
    "check_shift_disjoint",
    "product_family",
    "b1_family_check",
]


def _interval(iv) -> tuple:
    lo, hi = (ex.frac(x) for x in iv)
    if not lo < hi:
        raise InvalidParameter(f"empty interval [{lo}, {hi}]")
    return (lo, hi)


def _overlap(a: tuple, b: tuple):
    """Common open part of two boxes, or None if it has measure zero."""
    out = []
    for (lo1, hi1), (lo2, hi2) in zip(a, b):
        lo, hi = max(lo1, lo2), min(hi1, hi2)
        if not lo < hi:
            return None
        out.append((lo, hi))
    return tuple(out)


@dataclass(frozen=True)
class BoxSupport:
    """Finite union of axis-aligned boxes in R^dim; boxes may overlap."""

    dim: int
    boxes: tuple

    def __post_init__(self):
        if self.dim < 0:
            raise InvalidParameter("dimension must be nonnegative")
        boxes = []
        for b in self.boxes:
            b = tuple(_interval(iv) for iv in b)
            if len(b) != self.dim:
                raise InvalidParameter(f"box has {len(b)} intervals, expected {self.dim}")
            boxes.append(b)
        if not boxes:
            raise InvalidParameter("a support needs at least one box")
        object.__setattr__(self, "boxes", tuple(boxes))

    @classmethod
    def interval(cls, lo, hi) -> "BoxSupport":
        return cls(1, (((lo, hi),),))

    def project(self, k: int) -> "BoxSupport":
        """Projection onto the first ``k`` coordinates."""
        return BoxSupport(k, tuple(b[:k] for b in self.boxes))

    def normalized(self) -> tuple:
        """Disjoint boxes with the same union, from the grid of all endpoints."""
        cuts = [sorted({x for b in self.boxes for x in b[i]}) for i in range(self.dim)]
        cells = []
        for idx in product(*(range(len(c) - 1) for c in cuts)):
            cell = tuple((cuts[i][j], cuts[i][j + 1]) for i, j in enumerate(idx))
            if any(all(lo <= c_lo and c_hi <= hi for (lo, hi), (c_lo, c_hi) in zip(b, cell)) for b in self.boxes):
                cells.append(cell)
        return tuple(cells)

    def measure(self) -> Fraction:
        total = Fraction(0)
        for cell in self.normalized():
            vol = Fraction(1)
            for lo, hi in cell:
                vol *= hi - lo
            total += vol
        return total

    def times(self, other: "BoxSupport") -> "BoxSupport":
        return BoxSupport(self.dim + other.dim, tuple(a + b for a in self.boxes for b in other.boxes))


@dataclass(frozen=True)
class ReversedFamilySpec:
    """Candidate reversed family: ``members`` are supports in R^{s_A}."""

    s_A: int
    d: int
    members: tuple

    def __post_init__(self):
        if not 0 < self.d <= self.s_A:
            raise InvalidParameter("need 0 < d <= s_A")
        members = tuple(self.members)
        for m in members:
            if m.dim != self.s_A:
                raise InvalidParameter("member support has the wrong dimension")
        object.__setattr__(self, "members", members)


@dataclass(frozen=True)
class ShiftCheck:
    ok: bool
    witness: tuple | None = None  # (i, j, box_i, box_j, overlap) on the first d coordinates

    def __bool__(self):
        return self.ok


def check_shift_disjoint(spec: ReversedFamilySpec) -> ShiftCheck:
    """True iff distinct members stay disjoint under all shifts of the last ``s_A - d`` coordinates.

    Shifting only the tail coordinates can always align the tails, so the
    test reduces to measure-zero overlap of the projections onto the first
    ``d`` coordinates.
    """
    heads = [m.project(spec.d) for m in spec.members]
    for i in range(len(heads)):
        for j in range(i + 1, len(heads)):
            for a in heads[i].boxes:
                for b in heads[j].boxes:
                    ov = _overlap(a, b)
                    if ov is not None:
                        return ShiftCheck(False, (i, j, a, b, ov))
    return ShiftCheck(True)


def product_family(phis, phi_tail: BoxSupport | None = None) -> ReversedFamilySpec:
    """Members ``φ_i(head) φ(tail)`` from pairwise disjoint head supports."""
    phis = list(phis)
    if not phis:
        raise InvalidParameter("need at least one head support")
    d = phis[0].dim
    if any(p.dim != d for p in phis):
        raise InvalidParameter("head supports must share one dimension")
    head_check = check_shift_disjoint(ReversedFamilySpec(d, d, tuple(phis))) if d else ShiftCheck(True)
    if not head_check:
        i, j, _, _, ov = head_check.witness
        raise NotDisjoint(f"head supports {i} and {j} overlap on {ov}")
    if phi_tail is None or phi_tail.dim == 0:
        members = tuple(phis)
    else:
        members = tuple(p.times(phi_tail) for p in phis)
    return ReversedFamilySpec(members[0].dim, d, members)


def b1_family_check(supports) -> ShiftCheck:
    """One-mode case: supports must be pairwise disjoint up to measure zero."""
    supports = tuple(supports)
    return check_shift_disjoint(ReversedFamilySpec(1, 1, supports))
