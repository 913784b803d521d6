import numpy as np
import pytest

from corpus import block_channel, code_channel, states_in, two_block_instance
from qrev.channels import (
    StateFamily,
    channels_equal,
    dephasing_channel,
    depolarizing_channel,
    identity_channel,
    random_channel,
    tensor,
    unitary_channel,
)
from qrev.exceptions import RankTooSmall
from qrev.numerics import trace_distance
from qrev.reversibility import (
    ONDPartition,
    TriState,
    block_kraus_representation,
    check_orthogonal_criterion,
    exhaustive_pair_search,
    is_reversible_for,
    noncommutative_graph,
    ond_decompose,
    pair_residual,
    perfectly_reversible_on,
    petz_recovery,
    pure_family_criterion,
    reversibility_index,
    search_pair,
    zero_error_positivity,
)
from qrev.sampling import random_density, random_unitary, random_vector

KET0, KET1 = np.array([1, 0]), np.array([0, 1])
PLUS, MINUS = np.array([1, 1]) / np.sqrt(2), np.array([1, -1]) / np.sqrt(2)


def span_contains(graph, m):
    return np.linalg.norm(graph.project(m) - m) < 1e-9


def test_graph_examples():
    g = noncommutative_graph(identity_channel(3))
    assert g.dim == 1 and span_contains(g, np.eye(3))
    g = noncommutative_graph(dephasing_channel(2))
    assert g.dim == 2 and span_contains(g, np.diag([1, 0])) and not span_contains(g, np.array([[0, 1], [0, 0]]))
    assert noncommutative_graph(depolarizing_channel(2)).dim == 4


@pytest.mark.parametrize("seed", range(10))
def test_graph_adjoint_closed_contains_identity(seed):
    g = noncommutative_graph(random_channel(3, 3, 1 + seed % 3, seed=seed))
    assert g.is_adjoint_closed()
    assert span_contains(g, np.eye(3))


def test_graph_soundness():
    """Outputs are orthogonal exactly when every graph matrix element vanishes."""
    agree = 0
    for seed in range(200):
        rng = np.random.default_rng(seed)
        dim = int(rng.integers(2, 4))
        ch, _, _, w_in = block_channel(dim, int(rng.integers(1, dim)), seed)
        if seed % 2:
            phi, psi = w_in[:, 0], w_in[:, -1]
        else:
            phi, psi = random_vector(dim, seed + 1), random_vector(dim, seed + 2)
        a = ch.apply(np.outer(phi, phi.conj()))
        b = ch.apply(np.outer(psi, psi.conj()))
        orth = abs(np.trace(a @ b)) <= 1e-10
        elems = np.abs(noncommutative_graph(ch).matrix_elements(phi, psi)).max() <= 1e-8
        agree += orth == elems
    assert agree == 200


def test_ond_examples():
    fam = StateFamily.from_vectors([KET0, KET1])
    assert ond_decompose(fam).blocks == ((0,), (1,))
    assert ond_decompose(StateFamily.from_vectors([KET0, PLUS])).blocks == ((0, 1),)
    fam = StateFamily.from_vectors([[1, 0, 0], [1, 1, 0], [0, 0, 1]])
    part = ond_decompose(fam)
    assert part.blocks == ((0, 1), (2,))
    assert np.allclose(part.projectors[0] @ part.projectors[1], 0)


def test_petz_examples():
    u = random_unitary(3, 0)
    rec = petz_recovery(unitary_channel(u), random_density(3, seed=1))
    assert channels_equal(rec, unitary_channel(u.conj().T))
    rec = petz_recovery(dephasing_channel(2), np.eye(2) / 2)
    assert channels_equal(rec, dephasing_channel(2))
    ref = random_density(2, seed=2)
    rec = petz_recovery(depolarizing_channel(2), ref)
    for seed in range(3):
        assert np.allclose(rec.apply(random_density(2, seed=10 + seed)), ref)


@pytest.mark.parametrize("seed", range(20))
def test_petz_recovers_reference(seed):
    ch = random_channel(3, 2 + seed % 3, 2 + seed % 2, seed=seed)
    ref = random_density(3, rank=1 + seed % 3, seed=seed + 7)
    rec = petz_recovery(ch, ref)
    assert rec.completeness_residual() < 1e-9
    assert trace_distance(rec.apply(ch.apply(ref)), ref) < 1e-8


def test_is_reversible_examples():
    fam = StateFamily.from_vectors([KET0, PLUS, random_vector(2, 3)])
    res = is_reversible_for(identity_channel(2), fam)
    assert res.reversible and res.residual < 1e-12
    assert is_reversible_for(dephasing_channel(2), StateFamily.from_vectors([KET0, KET1]))
    res = is_reversible_for(dephasing_channel(2), StateFamily.from_vectors([PLUS, MINUS]))
    assert not res.reversible
    # Both outputs are I/2, which the recovery sends back to I/2.
    assert np.isclose(res.residual, 0.5)


def test_orthogonal_criterion_examples():
    part = ONDPartition.from_projectors([np.diag([1, 0]), np.diag([0, 1])])
    assert check_orthogonal_criterion(dephasing_channel(2), part)
    assert not check_orthogonal_criterion(depolarizing_channel(2), part)
    assert check_orthogonal_criterion(identity_channel(2), part)


def test_orthogonal_criterion_matches_petz():
    for seed in range(60):
        ch, fam, _ = two_block_instance(seed)
        part = ond_decompose(fam)
        assert len(part) == 2
        assert check_orthogonal_criterion(ch, part, atol=1e-8) == is_reversible_for(ch, fam).reversible


def test_perfectly_reversible_examples():
    u = random_unitary(2, 5)
    assert perfectly_reversible_on(identity_channel(3), np.diag([1, 1, 0]))
    assert not perfectly_reversible_on(dephasing_channel(2), np.eye(2))
    ch = tensor(unitary_channel(u), depolarizing_channel(2))
    phi, psi = random_unitary(2, 6)[:, 0], random_unitary(2, 6)[:, 1]
    code = np.stack([np.kron(phi, KET0), np.kron(psi, KET0)], axis=1)
    assert perfectly_reversible_on(ch, code @ code.conj().T)
    with pytest.raises(RankTooSmall):
        perfectly_reversible_on(identity_channel(2), np.diag([1, 0]))


@pytest.mark.parametrize("seed", range(10))
def test_code_channels_reverse_nonorthogonal_families(seed):
    ch, p, basis = code_channel(3, 2, seed)
    assert perfectly_reversible_on(ch, p, atol=1e-9)
    fam = StateFamily(tuple(states_in(basis, 3, seed)))
    assert is_reversible_for(ch, fam).reversible
    assert pure_family_criterion(ch, fam)["reversible"]


def test_rank_bound_on_reversed_complete_family():
    """For a reversed complete orthogonal pure family the block Kraus ranks are at most one."""
    checked = 0
    for seed in range(40):
        dim = 2 + seed % 2
        ch = dephasing_channel(dim, random_unitary(dim, seed)) if seed % 2 else random_channel(dim, dim, 2, seed=seed)
        basis = np.linalg.eigh(random_density(dim, seed=seed))[1]
        if seed % 2:
            basis = random_unitary(dim, seed)
        fam = StateFamily.from_vectors(basis.T)
        if not is_reversible_for(ch, fam).reversible:
            continue
        rep = block_kraus_representation(ch, ond_decompose(fam))
        assert rep["max_rank"] <= 1 and rep["residual"] < 1e-9
        checked += 1
    assert checked >= 15


def test_pure_family_criterion_rank_diagnostic():
    fam = StateFamily.from_vectors([KET0, KET1])
    rep = pure_family_criterion(dephasing_channel(2), fam)
    assert rep["reversible"] and rep["rank_bound_ok"]
    rep = pure_family_criterion(dephasing_channel(2), StateFamily.from_vectors([PLUS, MINUS]))
    assert not rep["reversible"]


def test_index_examples():
    for ch, expected in [
        (identity_channel(2), "22"),
        (dephasing_channel(2), "11"),
        (depolarizing_channel(2), "00"),
        (identity_channel(3), "22"),
        (dephasing_channel(3), "11"),
        (depolarizing_channel(3), "00"),
    ]:
        idx = reversibility_index(ch, seed=3)
        assert idx.value == expected and idx.status == "certified"
        assert idx.ri1 <= idx.ri2


def test_index_certificates_reverify():
    idx = reversibility_index(identity_channel(3))
    phi, psi = idx.certificates["kl_pair"]
    graph = noncommutative_graph(identity_channel(3))
    assert pair_residual(graph, phi, psi, kl=True) <= 1e-10
    ch = random_channel(3, 3, 2, seed=0)
    idx = reversibility_index(ch, seed=0)
    if "rank_one_pair" in idx.certificates:
        phi, psi = idx.certificates["rank_one_pair"]
        assert pair_residual(noncommutative_graph(ch), phi, psi) <= 1e-10


def test_index_block_channel_in_dim3_finds_orthogonal_pair():
    ch, _, _, _ = block_channel(3, 1, seed=4)
    idx = reversibility_index(ch, seed=1)
    assert idx.ri2 >= 1


def test_index_unknown_status_in_dim4_never_claims_zero():
    ch = random_channel(4, 4, 2, seed=3)
    idx = reversibility_index(ch, seed=0, budget=4)
    assert idx.status in ("certified", "unknown")
    if idx.status == "unknown":
        c0, _ = zero_error_positivity(ch, seed=0, budget=4)
        assert c0 in (TriState.YES, TriState.UNKNOWN)


def test_zero_error_positivity():
    assert zero_error_positivity(dephasing_channel(2)) == (TriState.YES, TriState.NO)
    assert zero_error_positivity(depolarizing_channel(2)) == (TriState.NO, TriState.NO)
    assert zero_error_positivity(identity_channel(2)) == (TriState.YES, TriState.YES)


def test_pair_search_on_dephasing():
    graph = noncommutative_graph(dephasing_channel(2))
    found = search_pair(graph, seed=0)
    assert found.found and found.residual < 1e-10
    assert not exhaustive_pair_search(graph, kl=True).found
