"""Reversibility of small finite-dimensional channels.

Run with ``python3 demos/finite_dimensional.py``.
"""
import numpy as np

from qrev import (
    Ensemble,
    StateFamily,
    dephasing_channel,
    depolarizing_channel,
    holevo_gap,
    identity_channel,
    is_reversible_for,
    ond_decompose,
    reversibility_index,
)
from qrev.entropy import to_bits

KET0, KET1 = np.array([1, 0]), np.array([0, 1])
PLUS, MINUS = np.array([1, 1]) / np.sqrt(2), np.array([1, -1]) / np.sqrt(2)

print("Reversibility index")
for name, ch in [("identity", identity_channel(2)), ("dephasing", dephasing_channel(2)),
                 ("depolarizing", depolarizing_channel(2))]:
    idx = reversibility_index(ch, seed=0)
    print(f"  {name:13s} {idx.value}  {idx.narrative}")

print("\nPetz recovery for the dephasing channel")
deph = dephasing_channel(2)
for label, vecs in [("{|0>, |1>}", [KET0, KET1]), ("{|+>, |->}", [PLUS, MINUS])]:
    fam = StateFamily.from_vectors(vecs)
    res = is_reversible_for(deph, fam)
    blocks = ond_decompose(fam).blocks
    print(f"  {label}: reversible={res.reversible} residual={res.residual:.3g} blocks={blocks}")

print("\nHolevo quantity lost by the dephasing channel")
for label, vecs in [("{|0>, |1>}", [KET0, KET1]), ("{|+>, |->}", [PLUS, MINUS])]:
    ens = Ensemble((0.5, 0.5), tuple(np.outer(v, v.conj()) for v in vecs))
    print(f"  {label}: gap = {to_bits(holevo_gap(deph, ens)):.6f} bits")
