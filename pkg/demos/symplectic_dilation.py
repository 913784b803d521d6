"""Exact symplectic algebra: adapted bases and the range/kernel identity of a dilation.

Run with ``python3 demos/symplectic_dilation.py``.
"""
from qrev import SymplecticSpace, classify_subspace, lemma_mainl_check, skew_complement, symplectic_basis_through
from qrev import _exact as ex
from qrev.symplectic import random_dilation

z = SymplecticSpace(2)
sub = z.span([z.e(0), z.e(1), z.h(1)])
cls = classify_subspace(sub)
print("span{e1, e2, h2}:", cls.kind.value, "radical", ex.to_strings(cls.radical.basis))
print("skew complement:", ex.to_strings(skew_complement(sub).basis))
basis = symplectic_basis_through(sub)
print("adapted basis columns:", ex.to_strings(basis.matrix()))
print("vectors inside L:", basis.inside)

blocks = random_dilation(2, 2, 1, seed=3, direct=1)
rep = lemma_mainl_check(blocks)
print("\nrandom dilation with one direct mode")
print("  K =", ex.to_strings(blocks.K))
print("  ker K_D =", ex.to_strings(rep.ker_K_D.basis))
print("  [Ran L]^perp == K(ker K_D):", rep.forward_equal)
print("  reverse identity:", rep.backward_equal, " K symplectic on ker K_D:", rep.preserves_form)
