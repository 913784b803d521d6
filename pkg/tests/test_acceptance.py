"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line (printed, and repeated in the pytest
terminal summary).  Run alone with ``pytest tests/test_acceptance.py -s``.
"""
import math
import time
from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import least_squares

from acceptance_log import criterion
from corpus import block_channel, states_in, two_block_instance
from qrev import _exact as ex
from qrev.channels import (
    KrausChannel,
    StateFamily,
    complementary,
    cq_channel,
    dephasing_channel,
    depolarizing_channel,
    identity_channel,
    mixture,
    random_channel,
    unitary_channel,
)
from qrev.entropy import Ensemble, holevo_gap
from qrev.families import BoxSupport, b1_family_check
from qrev.gaussian import (
    GaussianChannelParams,
    gaussian_reversibility_index,
    kernel_Zf,
    onemode_canonical,
    reversed_subspace_report,
    validate,
)
from qrev.reversibility import check_orthogonal_criterion, is_reversible_for, ond_decompose, reversibility_index
from qrev.sampling import random_density, random_pure_state, random_unitary
from qrev.symplectic import (
    SymplecticSpace,
    is_symplectic_transform,
    lemma_mainl_check,
    random_dilation,
    random_subspace,
    skew_complement,
    standard_form,
    symplectic_basis_through,
    verify_dilation,
)

pytestmark = pytest.mark.acceptance
F = Fraction
HALF = F(1, 2)


def test_criterion_01_onemode_table():
    cases = [("B2", 0, None, "22"), ("B1", 0, None, "01")]
    for n in (0, HALF, 1):
        cases += [("A1", n, None, "00"), ("A2", n, None, "00")]
        cases += [(kind, n, k, "00") for kind in ("C", "D") for k in (HALF, 2)]
    cases += [("B2", HALF, None, "00"), ("B2", 1, None, "00")]
    with criterion(1, "one-mode Gaussian classification table") as info:
        start = time.perf_counter()
        bad = []
        for kind, n, k, expected in cases:
            p = onemode_canonical(kind, N=n, k=k)
            got = gaussian_reversibility_index(p).value
            if not validate(p).valid or got != expected:
                bad.append((kind, n, k, got))
        secs = time.perf_counter() - start
        info["detail"] = f"{len(cases) - len(bad)}/{len(cases)} cases match"
        assert not bad, bad
        assert secs < 1.0


def test_criterion_02_b1_example():
    with criterion(2, "B1 worked example") as info:
        p = GaussianChannelParams(ex.identity(2), ex.exact([[0, 0], [0, F(1, 4)]]))
        z = SymplecticSpace(1)
        assert validate(p).valid
        assert kernel_Zf(p) == z.span([z.e(0)])
        rep = reversed_subspace_report(p)
        assert rep.kind == "isotropic" and rep.d == 1 and rep.index.value == "01"
        assert b1_family_check([BoxSupport.interval(0, 1), BoxSupport.interval(2, 3)])
        assert not b1_family_check([BoxSupport.interval(0, 1), BoxSupport.interval(HALF, F(3, 2))])
        info["detail"] = "ker alpha = span{(1,0)}, isotropic, d = 1, index 01, supports accepted/rejected"


def _nondegenerate_defect_params(seed):
    rng = np.random.default_rng(seed)
    while True:
        s_a, s_b = int(rng.integers(1, 3)), int(rng.integers(1, 3))
        k = np.array([[F(int(rng.integers(-3, 4)), int(rng.integers(1, 3))) for _ in range(2 * s_b)]
                      for _ in range(2 * s_a)], dtype=object)
        m = ex.exact(standard_form(s_b) - k.T @ standard_form(s_a) @ k)
        if ex.rank(m) == 2 * s_b:
            break
    norm = float(np.linalg.norm(ex.to_float(m), 2))
    c = F(math.ceil(norm * 50) + 1, 100)  # c >= |M| / 2
    g = np.array([[F(int(rng.integers(-2, 3)), 2) for _ in range(2 * s_b)] for _ in range(2 * s_b)], dtype=object)
    alpha = ex.exact(c * ex.identity(2 * s_b) + g.T @ g)
    return GaussianChannelParams(k, alpha, modes_in=s_a, modes_out=s_b)


def test_criterion_03_early_exit_consistency():
    with criterion(3, "nondegenerate commutator defect implies 00") as info:
        start = time.perf_counter()
        agree = 0
        for seed in range(50):
            p = _nondegenerate_defect_params(seed)
            assert validate(p).valid
            rep = reversed_subspace_report(p)
            agree += rep.early_exit and kernel_Zf(p).dim == 0 and rep.index.value == "00" and rep.early_exit_consistent
        secs = time.perf_counter() - start
        info["detail"] = f"{agree}/50 parameter sets agree"
        assert agree == 50 and secs < 5.0


def test_criterion_04_main_lemma():
    with criterion(4, "range/kernel lemma on random dilations") as info:
        start = time.perf_counter()
        ok = 0
        nontrivial = 0
        for seed in range(100):
            rng = np.random.default_rng(seed)
            s_b, s_e = int(rng.integers(1, 4)), int(rng.integers(1, 4))
            s_a = int(rng.integers(1, min(3, s_b + s_e) + 1))
            blocks = random_dilation(s_a, s_b, s_e, seed=seed)
            assert verify_dilation(blocks).ok
            rep = lemma_mainl_check(blocks)
            ok += rep.forward_equal and rep.backward_equal and rep.preserves_form
            nontrivial += 0 < rep.ker_K_D.dim
        secs = time.perf_counter() - start
        info["detail"] = f"{ok}/100 dilations, {nontrivial} with nonzero ker K_D"
        assert ok == 100 and secs < 10.0


def test_criterion_05_subspaces():
    with criterion(5, "skew complements and adapted symplectic bases") as info:
        start = time.perf_counter()
        ok = 0
        for seed in range(200):
            z = SymplecticSpace(1 + seed % 4)
            sub = random_subspace(z, seed=seed)
            perp = skew_complement(sub)
            basis = symplectic_basis_through(sub)
            inside = basis.vectors_in_subspace()
            ok += (
                sub.dim + perp.dim == z.dim
                and skew_complement(perp) == sub
                and basis.is_valid()
                and is_symplectic_transform(basis.matrix(), z)
                and len(inside) == sub.dim
                and all(sub.contains(v) for v in inside)
            )
        secs = time.perf_counter() - start
        info["detail"] = f"{ok}/200 subspaces"
        assert ok == 200 and secs < 10.0


def test_criterion_06_orthogonal_criterion_vs_petz():
    with criterion(6, "block-annihilation criterion vs Petz recovery") as info:
        agree = rev = 0
        for seed in range(100):
            ch, fam, _ = two_block_instance(seed)
            petz = is_reversible_for(ch, fam).residual <= 1e-6
            crit = check_orthogonal_criterion(ch, ond_decompose(fam), atol=1e-8)
            agree += petz == crit
            rev += petz
        info["detail"] = f"{agree}/100 agree ({rev} reversible, {100 - rev} not)"
        assert agree == 100 and 0 < rev < 100


# --- criterion 7: independent brute-force oracle for dimension 2 -------------

def _bloch_pair(theta, phi):
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    u = np.array([c, np.exp(1j * phi) * s])
    v = np.array([-np.exp(-1j * phi) * s, c])
    return u, v


def _oracle_ri2(channel, samples=10_000, polish=20):
    """ri2 from a Fibonacci grid on the Bloch sphere plus least-squares polishing."""
    ops = np.array([a.conj().T @ b for a in channel.kraus for b in channel.kraus])
    i = np.arange(samples) + 0.5
    thetas = np.arccos(1 - 2 * i / samples)
    phis = np.pi * (1 + 5 ** 0.5) * i

    def residuals(x, kl):
        u, v = _bloch_pair(*x)
        parts = [np.einsum("i,kij,j->k", u.conj(), ops, v)]
        if kl:
            parts.append(np.einsum("i,kij,j->k", u.conj(), ops, u) - np.einsum("i,kij,j->k", v.conj(), ops, v))
        r = np.concatenate(parts)
        return np.concatenate([r.real, r.imag])

    c, s = np.cos(thetas / 2), np.sin(thetas / 2)
    us = np.stack([c, np.exp(1j * phis) * s], axis=1)
    vs = np.stack([-np.exp(-1j * phis) * s, c], axis=1)
    found = []
    for kl in (False, True):
        vals = np.abs(np.einsum("ni,kij,nj->nk", us.conj(), ops, vs)).max(axis=1)
        if kl:
            diag = np.einsum("ni,kij,nj->nk", us.conj(), ops, us) - np.einsum("ni,kij,nj->nk", vs.conj(), ops, vs)
            vals = np.maximum(vals, np.abs(diag).max(axis=1))
        best = np.inf
        for n in np.argsort(vals)[:polish]:
            sol = least_squares(residuals, [thetas[n], phis[n]], args=(kl,), xtol=1e-15, ftol=1e-15, gtol=1e-15)
            best = min(best, np.abs(sol.fun).max())
        found.append(best <= 1e-7)
    return 2 if found[1] else 1 if found[0] else 0


def _dim2_channel(seed):
    rng = np.random.default_rng(seed)
    kind = seed % 6
    u = random_unitary(2, seed)
    if kind == 0:
        return random_channel(2, int(rng.integers(1, 4)), 2 + seed % 2, seed=seed)
    if kind == 1:
        return unitary_channel(u)
    if kind == 2:
        return mixture(float(rng.uniform(0.1, 0.9)), dephasing_channel(2, u), identity_channel(2))
    if kind == 3:
        return cq_channel(u, [random_density(2, seed=seed + 1), random_density(2, seed=seed + 2)])
    if kind == 4:
        g = float(rng.uniform(0.1, 0.9))
        damp = KrausChannel([np.diag([1, math.sqrt(1 - g)]), np.array([[0, math.sqrt(g)], [0, 0]])])
        return KrausChannel([v @ u for v in damp.kraus])
    return random_channel(2, 3, 1, seed=seed)


def test_criterion_07_index_oracle():
    with criterion(7, "dimension-2 index vs brute-force pair grid") as info:
        start = time.perf_counter()
        for ch, expected in [(identity_channel(2), "22"), (dephasing_channel(2), "11"), (depolarizing_channel(2), "00")]:
            assert reversibility_index(ch, seed=0).value == expected
        agree = 0
        seen = set()
        for seed in range(50):
            ch = _dim2_channel(seed)
            idx = reversibility_index(ch, seed=seed)
            oracle = _oracle_ri2(ch)
            agree += idx.ri2 == oracle and idx.status == "certified"
            seen.add(idx.value)
        secs = time.perf_counter() - start
        info["detail"] = f"{agree}/50 agree, indices seen {sorted(seen)}, examples 22/11/00 reproduced"
        assert agree == 50 and secs < 60.0


def test_criterion_08_mixture_components():
    with criterion(8, "reversible mixtures have reversible components") as info:
        ok = controls = spoiled = 0
        for seed in range(50):
            rng = np.random.default_rng(seed)
            dim = int(rng.integers(2, 4))
            split = int(rng.integers(1, dim))
            # Shared input and output bases keep the two output blocks orthogonal for the mixture.
            w_out = random_unitary(4, seed + 2000)
            ch1, _, _, w = block_channel(dim, split, seed, int(rng.integers(1, 3)), outs=(2, 2), w_out=w_out)
            ch2 = block_channel(dim, split, seed + 1000, int(rng.integers(1, 3)), outs=(2, 2), w_in=w, w_out=w_out)[0]
            pure = bool(seed % 2)
            states = states_in(w[:, :split], 1, seed, pure) + states_in(w[:, split:], 1, seed + 1, pure)
            fam = StateFamily(tuple(states))
            mix = mixture(float(rng.uniform(0.1, 0.9)), ch1, ch2)
            assert is_reversible_for(mix, fam).residual <= 1e-8
            ok += is_reversible_for(ch1, fam).residual <= 1e-6 and is_reversible_for(ch2, fam).residual <= 1e-6
            # Contrapositive: a non-reversible component spoils the mixture.
            noisy = random_channel(dim, 4, 2, seed=seed + 3000)
            if is_reversible_for(noisy, fam).residual > 1e-6:
                controls += 1
                spoiled += is_reversible_for(mixture(0.5, ch1, noisy), fam).residual > 1e-8
        info["detail"] = f"{ok}/50 mixtures with both components reversible; {spoiled}/{controls} controls spoiled"
        assert ok == 50 and spoiled == controls > 0


def test_criterion_09_holevo():
    with criterion(9, "Holevo gap monotonicity and Petz equivalence") as info:
        worst = 0.0
        for seed in range(500):
            rng = np.random.default_rng(seed)
            d_in, d_out = int(rng.integers(1, 5)), int(rng.integers(1, 5))
            ch = random_channel(d_in, d_out, max(int(rng.integers(1, 4)), -(-d_in // d_out)), seed=seed)
            n = int(rng.integers(1, 5))
            states = tuple(random_density(d_in, rank=int(rng.integers(1, d_in + 1)), seed=10 * seed + i) for i in range(n))
            worst = min(worst, holevo_gap(ch, Ensemble(tuple(rng.dirichlet(np.ones(n))), states)))
        agree = 0
        for seed in range(100):
            ch, fam, _ = two_block_instance(seed)
            gap = holevo_gap(ch, Ensemble((0.5, 0.5), fam.states))
            agree += (gap <= 1e-8) == (is_reversible_for(ch, fam).residual <= 1e-6)
        plus, minus = np.full((2, 2), 0.5), np.array([[0.5, -0.5], [-0.5, 0.5]])
        deph = holevo_gap(dephasing_channel(2), Ensemble((0.5, 0.5), (plus, minus)))
        info["detail"] = f"min gap {worst:.2e} over 500, {agree}/100 agree, dephasing gap - ln2 = {deph - math.log(2):.1e}"
        assert worst >= -1e-9 and agree == 100 and abs(deph - math.log(2)) <= 1e-9


def _spectrum_gap(a, b):
    x = np.sort(np.linalg.eigvalsh(a))[::-1]
    y = np.sort(np.linalg.eigvalsh(b))[::-1]
    n = max(len(x), len(y))
    x, y = np.pad(x, (0, n - len(x))), np.pad(y, (0, n - len(y)))
    return float(np.abs(x - y).max())


def test_criterion_10_double_complement():
    with criterion(10, "double-complement output spectra") as info:
        worst = 0.0
        for seed in range(100):
            rng = np.random.default_rng(seed)
            d_in, d_out = int(rng.integers(1, 4)), int(rng.integers(1, 4))
            ch = random_channel(d_in, d_out, max(int(rng.integers(1, 4)), -(-d_in // d_out)), seed=seed)
            comp = complementary(ch)
            double = complementary(comp)
            psi = random_pure_state(d_in, seed=seed + 500)
            out = ch.apply(psi)
            worst = max(worst, _spectrum_gap(out, double.apply(psi)), _spectrum_gap(out, comp.apply(psi)))
        info["detail"] = f"max spectral deviation {worst:.1e} over 100 inputs"
        assert worst <= 1e-8


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
