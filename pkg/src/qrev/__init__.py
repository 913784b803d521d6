"""Reversibility of quantum channels with respect to families of states.

Finite-dimensional channels are analysed through complementary channels,
noncommutative graphs and the Petz recovery map; Bosonic Gaussian channels
through the symplectic type of their noise-free subspace, using exact
rational symplectic linear algebra.
"""

__version__ = "0.1.0"

from .channels import (
    KrausChannel,
    StateFamily,
    complementary,
    compose,
    cq_channel,
    dephasing_channel,
    depolarizing_channel,
    identity_channel,
    mixture,
    random_channel,
    stinespring_isometry,
    unitary_channel,
    weak_complementary_pair,
)
from .entropy import Ensemble, holevo, holevo_gap, relative_entropy, von_neumann_entropy
from .exceptions import *  # noqa: F401,F403
from .families import BoxSupport, ReversedFamilySpec, b1_family_check, check_shift_disjoint, product_family
from .gaussian import (
    GaussianChannelParams,
    GaussianEnvironment,
    gaussian_reversibility_index,
    kernel_Zf,
    onemode_canonical,
    reversed_subspace_report,
    validate,
    weak_complementary_params,
)
from .numerics import DEFAULT_TOL, Tolerance
from .reversibility import (
    ReversibilityIndex,
    TriState,
    check_orthogonal_criterion,
    is_reversible_for,
    noncommutative_graph,
    ond_decompose,
    perfectly_reversible_on,
    petz_recovery,
    reversibility_index,
    zero_error_positivity,
)
from .symplectic import (
    DilationBlocks,
    SymplecticSpace,
    SymplecticSubspace,
    classify_subspace,
    is_symplectic_transform,
    lemma_mainl_check,
    skew_complement,
    symplectic_basis_through,
    verify_dilation,
)
