"""JSON readers and a deterministic JSON writer for qrev objects.

Complex entries are ``[re, im]`` pairs (a bare number is read as real),
rationals are ``"p/q"`` strings, and floats are written with 17 significant
digits so that every float survives a round trip bit for bit.
"""
from __future__ import annotations

import json
import math
from fractions import Fraction

import numpy as np

from . import _exact as ex
from .channels import KrausChannel, StateFamily
from .entropy import Ensemble
from .exceptions import QrevError
from .families import BoxSupport, ReversedFamilySpec
from .gaussian import GaussianChannelParams, GaussianEnvironment
from .numerics import DEFAULT_TOL, Tolerance
from .symplectic import DilationBlocks, SymplecticSpace, SymplecticSubspace

__all__ = [
    "ParseError",
    "dumps",
    "loads",
    "parse_channel",
    "parse_family",
    "parse_ensemble",
    "parse_gaussian",
    "parse_subspace",
    "parse_dilation",
    "parse_family_spec",
    "channel_to_json",
    "family_to_json",
    "gaussian_to_json",
    "complex_matrix_to_json",
]


class ParseError(QrevError, ValueError):
    """Malformed input; the message starts with the JSON path of the problem."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


# --- writer ------------------------------------------------------------------


def _float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    s = format(x, ".17g")
    if "e" not in s and "." not in s and "n" not in s:
        s += ".0"
    return s


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _float(float(obj))
    if isinstance(obj, Fraction):
        return json.dumps(str(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return _encode([obj.real, obj.imag], indent, level)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist(), indent, level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        parts = [_encode(v, indent, level + 1) for v in obj]
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(parts) + "]"
        return "[\n" + ",\n".join(pad + p for p in parts) + "\n" + end + "]"
    if hasattr(obj, "value") and hasattr(obj, "name"):  # enums
        return _encode(obj.value, indent, level)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """Deterministic JSON text; key order is insertion order."""
    return _encode(obj, indent, 0) + "\n"


def loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError("$", f"invalid JSON ({err.msg} at line {err.lineno} column {err.colno})") from None


def complex_matrix_to_json(a) -> list:
    a = np.asarray(a, dtype=complex)
    return [[[float(x.real), float(x.imag)] for x in row] for row in a]


def channel_to_json(channel: KrausChannel) -> dict:
    return {
        "dim_in": channel.dim_in,
        "dim_out": channel.dim_out,
        "kraus": [complex_matrix_to_json(v) for v in channel.kraus],
    }


def family_to_json(states, weights=None) -> dict:
    out = {"dim": int(np.asarray(states[0]).shape[0]), "states": [complex_matrix_to_json(s) for s in states]}
    if weights is not None:
        out["weights"] = [float(w) for w in weights]
    return out


def gaussian_to_json(params: GaussianChannelParams) -> dict:
    out = {
        "modes_in": params.modes_in,
        "modes_out": params.modes_out,
        "K": ex.to_strings(params.K_exact),
    }
    if params.alpha_exact is not None:
        out["alpha"] = ex.to_strings(params.alpha_exact)
    out["l"] = [float(x) for x in params.l]
    if params.zf_basis is not None:
        out["zf_basis"] = ex.to_strings(params.zf_basis)
    return out


# --- readers -----------------------------------------------------------------


def _require(obj, key: str, path: str):
    if not isinstance(obj, dict):
        raise ParseError(path, "expected an object")
    if key not in obj:
        raise ParseError(f"{path}.{key}", "missing field")
    return obj[key]


def _int(x, path: str, minimum: int = 0) -> int:
    if isinstance(x, bool) or not isinstance(x, int) or x < minimum:
        raise ParseError(path, f"expected an integer >= {minimum}")
    return x


def _number(x, path: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ParseError(path, "expected a number")
    return float(x)


def _complex(x, path: str) -> complex:
    if isinstance(x, list):
        if len(x) != 2:
            raise ParseError(path, "expected [re, im]")
        return complex(_number(x[0], f"{path}[0]"), _number(x[1], f"{path}[1]"))
    return complex(_number(x, path))


def _complex_matrix(x, path: str, shape=None) -> np.ndarray:
    if not isinstance(x, list) or not x or not all(isinstance(r, list) for r in x):
        raise ParseError(path, "expected a nonempty matrix (list of rows)")
    ncols = len(x[0])
    rows = []
    for i, r in enumerate(x):
        if len(r) != ncols:
            raise ParseError(f"{path}[{i}]", f"row has {len(r)} entries, expected {ncols}")
        rows.append([_complex(v, f"{path}[{i}][{j}]") for j, v in enumerate(r)])
    a = np.array(rows, dtype=complex)
    if shape is not None and a.shape != tuple(shape):
        raise ParseError(path, f"shape {a.shape}, expected {tuple(shape)}")
    return a


def _rational(x, path: str):
    """Exact entry: int, "p/q" string, or float (kept as float for snapping)."""
    if isinstance(x, bool):
        raise ParseError(path, "expected a number or rational string")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ParseError(path, "non-finite number")
        return x
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError):
            raise ParseError(path, f"bad rational {x!r}") from None
    raise ParseError(path, "expected a number or rational string")


def _rational_matrix(x, path: str, shape=None) -> np.ndarray:
    if not isinstance(x, list) or not all(isinstance(r, list) for r in x):
        raise ParseError(path, "expected a matrix (list of rows)")
    ncols = len(x[0]) if x else 0
    out = np.empty((len(x), ncols), dtype=object)
    for i, r in enumerate(x):
        if len(r) != ncols:
            raise ParseError(f"{path}[{i}]", f"row has {len(r)} entries, expected {ncols}")
        for j, v in enumerate(r):
            out[i, j] = _rational(v, f"{path}[{i}][{j}]")
    if shape is not None and out.size and out.shape != tuple(shape):
        raise ParseError(path, f"shape {out.shape}, expected {tuple(shape)}")
    if shape is not None and not out.size:
        out = np.zeros(shape, dtype=object)
    return out


def _exact_matrix(x, path: str, shape=None) -> np.ndarray:
    m = _rational_matrix(x, path, shape)
    return ex.exact(m)


def parse_channel(data, tol: Tolerance = DEFAULT_TOL, path: str = "$") -> KrausChannel:
    """Reads a channel; small completeness defects (<= 1e-6) are normalized away."""
    if isinstance(data, str):
        data = loads(data)
    d_in = _int(_require(data, "dim_in", path), f"{path}.dim_in", 1)
    d_out = _int(_require(data, "dim_out", path), f"{path}.dim_out", 1)
    kraus = _require(data, "kraus", path)
    if not isinstance(kraus, list) or not kraus:
        raise ParseError(f"{path}.kraus", "expected a nonempty list of matrices")
    ops = [_complex_matrix(k, f"{path}.kraus[{i}]", (d_out, d_in)) for i, k in enumerate(kraus)]
    try:
        return KrausChannel.normalized(ops, max_residual=1e-6, tol=tol)
    except QrevError as err:
        raise ParseError(f"{path}.kraus", str(err)) from None


def _states(data, path: str):
    dim = _int(_require(data, "dim", path), f"{path}.dim", 1)
    states = _require(data, "states", path)
    if not isinstance(states, list) or not states:
        raise ParseError(f"{path}.states", "expected a nonempty list of matrices")
    out = []
    for i, s in enumerate(states):
        p = f"{path}.states[{i}]"
        m = _complex_matrix(s, p)
        if m.shape != (dim, dim):
            raise ParseError(p, f"shape {m.shape}, expected ({dim}, {dim})")
        out.append(m)
    weights = data.get("weights")
    if weights is not None:
        if not isinstance(weights, list) or len(weights) != len(out):
            raise ParseError(f"{path}.weights", "expected one weight per state")
        weights = [_number(w, f"{path}.weights[{i}]") for i, w in enumerate(weights)]
    return out, weights


def parse_family(data, path: str = "$"):
    """Returns ``(StateFamily, weights or None)``."""
    if isinstance(data, str):
        data = loads(data)
    states, weights = _states(data, path)
    try:
        fam = StateFamily(tuple(states))
        if weights is not None:
            fam.average(weights)
    except QrevError as err:
        raise ParseError(path, str(err)) from None
    return fam, weights


def parse_ensemble(data, path: str = "$") -> Ensemble:
    if isinstance(data, str):
        data = loads(data)
    states, weights = _states(data, path)
    if weights is None:
        weights = [1.0 / len(states)] * len(states)
    try:
        return Ensemble(tuple(weights), tuple(states))
    except (QrevError, ValueError) as err:
        raise ParseError(path, str(err)) from None


def parse_gaussian(data, path: str = "$") -> GaussianChannelParams:
    if isinstance(data, str):
        data = loads(data)
    s_a = _int(_require(data, "modes_in", path), f"{path}.modes_in")
    s_b = _int(_require(data, "modes_out", path), f"{path}.modes_out")
    k = _rational_matrix(_require(data, "K", path), f"{path}.K", (2 * s_a, 2 * s_b))
    alpha = data.get("alpha")
    if alpha is not None:
        alpha = _rational_matrix(alpha, f"{path}.alpha", (2 * s_b, 2 * s_b))
    l = data.get("l")
    if l is not None:
        if not isinstance(l, list) or len(l) != 2 * s_b:
            raise ParseError(f"{path}.l", f"expected a list of {2 * s_b} numbers")
        l = [float(_rational(x, f"{path}.l[{i}]")) for i, x in enumerate(l)]
    zf = data.get("zf_basis")
    if zf is not None:
        zf = _rational_matrix(zf, f"{path}.zf_basis") if zf else np.zeros((0, 2 * s_b), dtype=object)
    try:
        return GaussianChannelParams(k, alpha, l, modes_in=s_a, modes_out=s_b, zf_basis=zf)
    except QrevError as err:
        raise ParseError(path, str(err)) from None


def parse_subspace(data, path: str = "$") -> SymplecticSubspace:
    """``{"modes": s, "basis": [[...], ...]}`` with optional ``"form"``."""
    if isinstance(data, str):
        data = loads(data)
    s = _int(_require(data, "modes", path), f"{path}.modes")
    form = data.get("form")
    try:
        space = SymplecticSpace(s, None if form is None else _exact_matrix(form, f"{path}.form", (2 * s, 2 * s)))
    except QrevError as err:
        raise ParseError(f"{path}.form", str(err)) from None
    basis = _require(data, "basis", path)
    rows = _exact_matrix(basis, f"{path}.basis") if basis else ex.zeros(0, 2 * s)
    if rows.shape[0] and rows.shape[1] != 2 * s:
        raise ParseError(f"{path}.basis", f"vectors must have length {2 * s}")
    return space.span(list(rows))


def parse_dilation(data, path: str = "$"):
    """Dilation as ``{"modes_A", "modes_B", "T"}`` or explicit blocks, plus optional ``alpha_D``.

    Returns ``(DilationBlocks, GaussianEnvironment or None)``.
    """
    if isinstance(data, str):
        data = loads(data)
    s_a = _int(_require(data, "modes_A", path), f"{path}.modes_A")
    s_b = _int(_require(data, "modes_B", path), f"{path}.modes_B")
    try:
        if "T" in data:
            blocks = DilationBlocks.from_transform(_exact_matrix(data["T"], f"{path}.T"), s_a, s_b)
        else:
            s_d = _int(_require(data, "modes_D", path), f"{path}.modes_D")
            s_e = _int(_require(data, "modes_E", path), f"{path}.modes_E")
            a, b, d, e = 2 * s_a, 2 * s_b, 2 * s_d, 2 * s_e
            blocks = DilationBlocks(
                SymplecticSpace(s_a), SymplecticSpace(s_b), SymplecticSpace(s_d), SymplecticSpace(s_e),
                _exact_matrix(_require(data, "K", path), f"{path}.K", (a, b)),
                _exact_matrix(data.get("L", []), f"{path}.L", (a, e)),
                _exact_matrix(data.get("K_D", []), f"{path}.K_D", (d, b)),
                _exact_matrix(data.get("L_D", []), f"{path}.L_D", (d, e)),
            )
    except ParseError:
        raise
    except QrevError as err:
        raise ParseError(path, str(err)) from None
    env = None
    if "alpha_D" in data:
        alpha_d = _exact_matrix(data["alpha_D"], f"{path}.alpha_D")
        try:
            env = GaussianEnvironment(blocks, alpha_d)
        except QrevError as err:
            raise ParseError(f"{path}.alpha_D", str(err)) from None
    return blocks, env


def parse_family_spec(data, path: str = "$") -> ReversedFamilySpec:
    if isinstance(data, str):
        data = loads(data)
    s_a = _int(_require(data, "s_A", path), f"{path}.s_A", 1)
    d = _int(_require(data, "d", path), f"{path}.d", 1)
    members = _require(data, "members", path)
    if not isinstance(members, list):
        raise ParseError(f"{path}.members", "expected a list")
    sups = []
    for i, m in enumerate(members):
        p = f"{path}.members[{i}]"
        boxes = _require(m, "boxes", p)
        if not isinstance(boxes, list) or not boxes:
            raise ParseError(f"{p}.boxes", "expected a nonempty list of boxes")
        parsed = []
        for j, b in enumerate(boxes):
            bp = f"{p}.boxes[{j}]"
            if not isinstance(b, list) or len(b) != s_a:
                raise ParseError(bp, f"expected {s_a} intervals")
            ivs = []
            for c, iv in enumerate(b):
                if not isinstance(iv, list) or len(iv) != 2:
                    raise ParseError(f"{bp}[{c}]", "expected [lo, hi]")
                lo, hi = (ex.frac(_rational(x, f"{bp}[{c}][{t}]")) for t, x in enumerate(iv))
                if not lo < hi:
                    raise ParseError(f"{bp}[{c}]", "empty interval")
                ivs.append((lo, hi))
            parsed.append(tuple(ivs))
        sups.append(BoxSupport(s_a, tuple(parsed)))
    try:
        return ReversedFamilySpec(s_a, d, tuple(sups))
    except QrevError as err:
        raise ParseError(path, str(err)) from None
