import numpy as np
import pytest

from qrev.exceptions import DimensionMismatch, NotCommuting, NotPSD
from qrev.numerics import (
    Tolerance,
    as_matrix,
    common_eigenbasis,
    partial_trace,
    psd_sqrt_and_pinv_sqrt,
    support_projector,
    trace_distance,
)
from qrev.sampling import random_density, random_psd, random_unitary

X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)


def test_tolerance_must_be_positive():
    with pytest.raises(ValueError):
        Tolerance(rank_eps=0)
    with pytest.raises(ValueError):
        Tolerance(eq_eps=-1e-3)


def test_non_finite_entries_rejected():
    with pytest.raises(ValueError):
        as_matrix([[np.nan, 0], [0, 1]])


def test_support_projector_examples():
    assert np.allclose(support_projector(np.diag([0.5, 0.5, 0])), np.diag([1, 1, 0]))
    assert np.allclose(support_projector(np.eye(3)), np.eye(3))
    v = np.array([1, 1]) / np.sqrt(2)
    p = support_projector(np.outer(v, v))
    assert np.allclose(p, [[0.5, 0.5], [0.5, 0.5]])
    assert np.allclose(p @ p, p)


def test_support_projector_rejects_negative():
    with pytest.raises(NotPSD):
        support_projector(np.diag([1.0, -0.5]))


@pytest.mark.parametrize("seed", range(20))
def test_support_projector_fixes_state(seed):
    rho = random_psd(4, rank=1 + seed % 4, seed=seed)
    p = support_projector(rho)
    assert np.allclose(p @ rho, rho, atol=1e-10)


def test_sqrt_examples():
    s, t = psd_sqrt_and_pinv_sqrt(np.diag([4.0, 9.0]))
    assert np.allclose(s, np.diag([2, 3])) and np.allclose(t, np.diag([1 / 2, 1 / 3]))
    s, t = psd_sqrt_and_pinv_sqrt(np.diag([4.0, 0.0]))
    assert np.allclose(s, np.diag([2, 0])) and np.allclose(t, np.diag([0.5, 0]))


@pytest.mark.parametrize("seed", range(20))
def test_sqrt_properties(seed):
    rho = random_psd(3, rank=1 + seed % 3, seed=seed)
    s, t = psd_sqrt_and_pinv_sqrt(rho)
    assert np.allclose(s @ s, rho, atol=1e-10)
    assert np.allclose(s, s.conj().T)
    assert np.linalg.eigvalsh(s).min() > -1e-10
    assert np.allclose(t @ rho @ t, support_projector(rho), atol=1e-8)
    assert np.allclose(t @ rho, rho @ t, atol=1e-8)


def test_partial_trace_examples():
    k00 = np.zeros((4, 4))
    k00[0, 0] = 1
    assert np.allclose(partial_trace(k00, (2, 2), 1), np.diag([1, 0]))
    bell = np.array([1, 0, 0, 1]) / np.sqrt(2)
    for which in (0, 1):
        assert np.allclose(partial_trace(np.outer(bell, bell), (2, 2), which), np.eye(2) / 2)
    with pytest.raises(DimensionMismatch):
        partial_trace(np.eye(5), (2, 2), 0)


@pytest.mark.parametrize("seed", range(100))
def test_partial_trace_product_closed_form(seed):
    rng = np.random.default_rng(seed)
    d1, d2 = rng.integers(1, 5, size=2)
    a = rng.standard_normal((d1, d1)) + 1j * rng.standard_normal((d1, d1))
    b = rng.standard_normal((d2, d2)) + 1j * rng.standard_normal((d2, d2))
    x = np.kron(a, b)
    assert np.allclose(partial_trace(x, (d1, d2), 1), a * np.trace(b))
    assert np.allclose(partial_trace(x, (d1, d2), 0), b * np.trace(a))
    assert np.isclose(np.trace(partial_trace(x, (d1, d2), 1)), np.trace(x))


def test_trace_distance():
    assert np.isclose(trace_distance(np.diag([1, 0]), np.diag([0, 1])), 1.0)
    rho = random_density(3, seed=1)
    assert trace_distance(rho, rho) < 1e-12


def test_common_eigenbasis_examples():
    u = common_eigenbasis([np.diag([1.0, 2.0]), np.diag([3.0, 3.0])])
    assert np.allclose(np.abs(u), np.eye(2)) or np.allclose(np.abs(u), np.eye(2)[::-1])
    with pytest.raises(NotCommuting):
        common_eigenbasis([X, Z])


@pytest.mark.parametrize("seed", range(10))
def test_common_eigenbasis_projector_pair(seed):
    w = random_unitary(4, seed)
    p = w[:, :2] @ w[:, :2].conj().T
    u = common_eigenbasis([p, np.eye(4) - p], seed=seed)
    assert np.allclose(u.conj().T @ u, np.eye(4), atol=1e-10)
    d = u.conj().T @ p @ u
    assert np.allclose(d, np.diag(np.diag(d)), atol=1e-10)
