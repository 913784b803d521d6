"""The one-mode channel B1: noise-free position, noisy momentum.

Run with ``python3 demos/gaussian_b1.py``.
"""
from fractions import Fraction

from qrev import (
    BoxSupport,
    GaussianChannelParams,
    b1_family_check,
    gaussian_reversibility_index,
    onemode_canonical,
    reversed_subspace_report,
    validate,
)
from qrev import _exact as ex

params = GaussianChannelParams([[1, 0], [0, 1]], [[0, 0], [0, Fraction(1, 4)]])
print("valid:", validate(params).valid)

idx = gaussian_reversibility_index(params)
print("index:", idx.value)
print("ker alpha:", idx.certificates["ker_alpha_basis"], idx.certificates["classification"])
print(idx.narrative)

rep = reversed_subspace_report(params)
print("K(Z_f) is", rep.kind, "with d =", rep.d)
print("adapted basis (columns e1, h1):", ex.to_strings(rep.basis.matrix()))

iv = BoxSupport.interval
print("supports [0,1], [2,3] reversed:", bool(b1_family_check([iv(0, 1), iv(2, 3)])))
check = b1_family_check([iv(0, 1), iv(Fraction(1, 2), Fraction(3, 2))])
lo, hi = check.witness[4][0]
print("supports [0,1], [1/2,3/2] reversed:", bool(check), f"(overlap [{lo}, {hi}])")

print("\nOne-mode canonical channels")
for kind, n, k in [("A1", 0, None), ("A2", 0, None), ("B1", 0, None), ("B2", 0, None), ("B2", 1, None),
                   ("C", 0, 2), ("D", 0, 2)]:
    p = onemode_canonical(kind, N=n, k=k)
    label = kind if kind == "B1" else f"{kind}[N={n}{'' if k is None else f', k={k}'}]"
    print(f"  {label:12s} -> {gaussian_reversibility_index(p).value}")
