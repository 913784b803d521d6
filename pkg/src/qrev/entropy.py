"""Von Neumann entropy, relative entropy and the Holevo quantity (natural logarithm)."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import KrausChannel, density_matrix
from .exceptions import DimensionMismatch, InvalidProbability
from .numerics import DEFAULT_TOL, Tolerance, dagger, hermitian_eigh

__all__ = [
    "Ensemble",
    "von_neumann_entropy",
    "relative_entropy",
    "holevo",
    "holevo_relative_form",
    "holevo_gap",
    "to_bits",
]


@dataclass(frozen=True)
class Ensemble:
    """Finite ensemble ``{p_i, rho_i}``."""

    weights: tuple
    states: tuple

    def __post_init__(self):
        w = tuple(float(p) for p in self.weights)
        states = tuple(density_matrix(s) for s in self.states)
        if len(w) != len(states) or not states:
            raise ValueError("an ensemble needs one weight per state and at least one state")
        if any(p < 0 for p in w) or abs(sum(w) - 1) > 1e-9:
            raise InvalidProbability("ensemble weights must be nonnegative and sum to one")
        if any(s.shape != states[0].shape for s in states):
            raise DimensionMismatch("ensemble states must share one dimension")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "states", states)

    @property
    def average(self) -> np.ndarray:
        return sum(p * s for p, s in zip(self.weights, self.states))

    def push_forward(self, channel: KrausChannel) -> "Ensemble":
        if channel.dim_in != self.states[0].shape[0]:
            raise DimensionMismatch("channel input does not match the ensemble")
        outs = []
        for s in self.states:
            out = channel.apply(s)
            outs.append((out + dagger(out)) / 2 / np.trace(out).real)
        return Ensemble(self.weights, tuple(outs))


def _spectrum(rho, tol: Tolerance) -> np.ndarray:
    w, _, keep = hermitian_eigh(rho, tol)
    return w[keep]


def von_neumann_entropy(rho, tol: Tolerance = DEFAULT_TOL) -> float:
    """``-Tr rho log rho``; eigenvalues under the rank cutoff count as zero."""
    lam = _spectrum(rho, tol)
    return float(max(0.0, -np.sum(lam * np.log(lam))))


def relative_entropy(rho, sigma, tol: Tolerance = DEFAULT_TOL) -> float:
    """``Tr rho (log rho - log sigma)``, or ``math.inf`` if supp rho is not inside supp sigma."""
    a, b = np.asarray(rho), np.asarray(sigma)
    if a.shape != b.shape:
        raise DimensionMismatch("states must have equal dimension")
    wa, va, ka = hermitian_eigh(a, tol)
    wb, vb, kb = hermitian_eigh(b, tol)
    # Weight of rho outside supp sigma.
    vb_out = vb[:, ~kb]
    if vb_out.size:
        leak = np.trace(dagger(vb_out) @ a @ vb_out).real
        if leak > tol.rank_eps * max(1.0, wa[-1]):
            return math.inf
    lam = wa[ka]
    first = float(np.sum(lam * np.log(lam)))
    log_sigma = (vb[:, kb] * np.log(wb[kb])) @ dagger(vb[:, kb])
    second = float(np.trace(a @ log_sigma).real)
    return max(0.0, first - second)


def holevo(ensemble: Ensemble, tol: Tolerance = DEFAULT_TOL) -> float:
    """``H(average) - sum_i p_i H(rho_i)``."""
    h_avg = von_neumann_entropy(ensemble.average, tol)
    h_mean = sum(p * von_neumann_entropy(s, tol) for p, s in zip(ensemble.weights, ensemble.states) if p > 0)
    return max(0.0, h_avg - h_mean)


def holevo_relative_form(ensemble: Ensemble, tol: Tolerance = DEFAULT_TOL) -> float:
    """``sum_i p_i H(rho_i || average)``; equals :func:`holevo` in finite dimension."""
    avg = ensemble.average
    return float(sum(p * relative_entropy(s, avg, tol) for p, s in zip(ensemble.weights, ensemble.states) if p > 0))


def holevo_gap(channel: KrausChannel, ensemble: Ensemble, tol: Tolerance = DEFAULT_TOL) -> float:
    """Loss of Holevo quantity ``chi(mu) - chi(Phi(mu))``; nonnegative by monotonicity."""
    return holevo(ensemble, tol) - holevo(ensemble.push_forward(channel), tol)


def to_bits(nats: float) -> float:
    return nats / math.log(2)
