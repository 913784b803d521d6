"""Writes the JSON inputs used by the CLI examples in the README into demos/inputs/."""
from pathlib import Path

import numpy as np

from qrev import dephasing_channel
from qrev.io import channel_to_json, dumps, family_to_json

out = Path(__file__).parent / "inputs"
out.mkdir(exist_ok=True)
p0, p1 = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
files = {
    "dephasing.json": channel_to_json(dephasing_channel(2)),
    "two_orth.json": family_to_json([p0, p1], [0.5, 0.5]),
    "b1.json": {"modes_in": 1, "modes_out": 1, "K": [[1, 0], [0, 1]], "alpha": [[0, 0], [0, "1/4"]]},
    "mixed_subspace.json": {"modes": 2, "basis": [[1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]},
    "b1_dilation.json": {
        "modes_A": 1, "modes_B": 1, "modes_D": 1, "modes_E": 1,
        "K": [[1, 0], [0, 1]], "L": [[-1, 0], [0, 0]], "K_D": [[0, 0], [0, 1]], "L_D": [[1, 0], [0, 1]],
        "alpha_D": [[1, 0], [0, "1/4"]],
    },
    "overlapping_spec.json": {"s_A": 1, "d": 1, "members": [{"boxes": [[[0, 1]]]}, {"boxes": [[["1/2", "3/2"]]]}]},
}
for name, obj in files.items():
    (out / name).write_text(dumps(obj))
    print("wrote", out / name)
