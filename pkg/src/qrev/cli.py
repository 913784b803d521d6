"""Command-line front end: ``qrev <verb> [inputs] [flags]``.

Every verb prints one JSON report on stdout.  Exit status is 0 for a
definite answer, 2 when a search ended without a certificate, and 1 for
input errors (the message names the JSON path at fault).
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import __version__
from . import _exact as ex
from .entropy import holevo, to_bits
from .exceptions import QrevError
from .families import check_shift_disjoint
from .gaussian import gaussian_reversibility_index, reversed_subspace_report, validate as validate_gaussian
from .gaussian import weak_complementary_params
from .io import (
    ParseError,
    channel_to_json,
    dumps,
    gaussian_to_json,
    loads,
    parse_channel,
    parse_dilation,
    parse_ensemble,
    parse_family,
    parse_family_spec,
    parse_gaussian,
    parse_subspace,
)
from .numerics import Tolerance
from .reversibility import (
    is_reversible_for,
    ond_decompose,
    reversibility_index,
)
from .symplectic import classify_subspace, lemma_mainl_check, skew_complement, symplectic_basis_through, verify_dilation

EXIT_OK, EXIT_INPUT, EXIT_UNKNOWN = 0, 1, 2


def _load(path: str, label: str):
    try:
        text = Path(path).read_text()
    except OSError as err:
        raise ParseError(label, f"cannot read {path}: {err.strerror}") from None
    try:
        return loads(text)
    except ParseError as err:
        raise ParseError(label, str(err)) from None


def _need(args, name: str):
    value = getattr(args, name)
    if value is None:
        raise ParseError(f"--{name}", "this verb needs the option")
    return _load(value, f"--{name}")


def _index_report(idx) -> dict:
    return {
        "ri1": idx.ri1,
        "ri2": idx.ri2,
        "index": idx.value,
        "status": idx.status,
        "certificates": idx.certificates,
        "residuals": idx.residuals,
        "narrative": idx.narrative,
    }


def cmd_validate(args, tol):
    if args.params:
        params = parse_gaussian(_load(args.params, "--params"))
        rep = validate_gaussian(params, tol)
        out = {
            "kind": "gaussian",
            "valid": rep.valid,
            "min_eigenvalues": list(rep.min_eigenvalues),
            "threshold": rep.threshold,
            "snap_distance": params.snap_distance,
            "params": gaussian_to_json(params),
        }
        return out, EXIT_OK if rep.valid else EXIT_INPUT
    if args.channel:
        ch = parse_channel(_load(args.channel, "--channel"), tol)
        out = {
            "kind": "channel",
            "valid": True,
            "completeness_residual": ch.completeness_residual(),
            "choi_rank": ch.choi_rank(tol),
            "channel": channel_to_json(ch),
        }
        return out, EXIT_OK
    if args.family:
        fam, weights = parse_family(_load(args.family, "--family"))
        return {"kind": "family", "valid": True, "size": len(fam), "dim": fam.dim}, EXIT_OK
    raise ParseError("--channel", "validate needs --channel, --params or --family")


def cmd_ri(args, tol):
    ch = parse_channel(_need(args, "channel"), tol)
    idx = reversibility_index(ch, seed=args.seed, budget=args.budget, tol=tol)
    return _index_report(idx), EXIT_OK if idx.ri2_certified else EXIT_UNKNOWN


def cmd_gaussian_ri(args, tol):
    params = parse_gaussian(_need(args, "params"))
    rep = validate_gaussian(params, tol)
    if not rep.valid:
        raise ParseError("--params", f"parameters violate the validity inequality (min eigenvalue {min(rep.min_eigenvalues):.3g})")
    idx = gaussian_reversibility_index(params)
    sub = reversed_subspace_report(params)
    out = {
        "index": idx.value,
        "ker_alpha_basis": idx.certificates["ker_alpha_basis"],
        "classification": idx.certificates["classification"],
        "narrative": idx.narrative,
        "snap_distance": params.snap_distance,
        "noiseless": idx.certificates["noiseless"],
        "K_of_Zf_basis": ex.to_strings(sub.k_zf.basis),
        "K_of_Zf_classification": sub.kind,
        "d": sub.d,
        "adapted_basis": ex.to_strings(sub.basis.matrix()),
        "early_exit_00": sub.early_exit,
        "early_exit_consistent": sub.early_exit_consistent,
        "complete_orthogonal_family_reversible": sub.complete_family_reversible,
    }
    return out, EXIT_OK


def cmd_petz_check(args, tol):
    ch = parse_channel(_need(args, "channel"), tol)
    fam, weights = parse_family(_need(args, "family"))
    res = is_reversible_for(ch, fam, weights, threshold=args.threshold, tol=tol)
    return {
        "reversible": res.reversible,
        "residual": res.residual,
        "residuals": list(res.residuals),
        "threshold": args.threshold,
    }, EXIT_OK


def cmd_ond(args, tol):
    fam, _ = parse_family(_need(args, "family"))
    part = ond_decompose(fam, tol)
    return {"blocks": [list(b) for b in part.blocks], "count": len(part)}, EXIT_OK


def cmd_holevo(args, tol):
    ens = parse_ensemble(_need(args, "ensemble"))
    conv = to_bits if args.bits else float
    out = {"chi": conv(holevo(ens, tol)), "unit": "bits" if args.bits else "nats"}
    if args.channel:
        ch = parse_channel(_load(args.channel, "--channel"), tol)
        chi_out = holevo(ens.push_forward(ch), tol)
        out["chi_out"] = conv(chi_out)
        out["gap"] = out["chi"] - out["chi_out"]
    return out, EXIT_OK


def cmd_symplectic_basis(args, tol):
    sub = parse_subspace(_need(args, "subspace"))
    cls = classify_subspace(sub)
    basis = symplectic_basis_through(sub)
    return {
        "dim": sub.dim,
        "classification": cls.kind.value,
        "radical": ex.to_strings(cls.radical.basis),
        "skew_complement": ex.to_strings(skew_complement(sub).basis),
        "e": [ex.to_strings(v) for v in basis.e],
        "h": [ex.to_strings(v) for v in basis.h],
        "matrix": ex.to_strings(basis.matrix()),
        "inside": [f"{kind}{k + 1}" for kind, k in basis.inside],
    }, EXIT_OK


def cmd_dilation_check(args, tol):
    blocks, env = parse_dilation(_need(args, "dilation"))
    rep = verify_dilation(blocks)
    out = {
        "symplectic": rep.ok,
        "failed": list(rep.failed),
        "residuals": {k: ex.to_strings(v) for k, v in rep.residuals.items()},
    }
    if rep.ok:
        lem = lemma_mainl_check(blocks)
        out["lemma"] = {
            "ran_L": ex.to_strings(lem.ran_L.basis),
            "ran_L_perp": ex.to_strings(lem.ran_L_perp.basis),
            "ker_K_D": ex.to_strings(lem.ker_K_D.basis),
            "K_of_ker_K_D": ex.to_strings(lem.K_of_ker.basis),
            "forward_equal": lem.forward_equal,
            "backward_equal": lem.backward_equal,
            "preserves_form": lem.preserves_form,
            "ok": lem.ok,
        }
        if env is not None:
            l, alpha_w = weak_complementary_params(env)
            out["weak_complementary"] = {"L": ex.to_strings(l), "alpha_w": ex.to_strings(alpha_w)}
            out["alpha"] = ex.to_strings(env.alpha)
    return out, EXIT_OK


def cmd_family_check(args, tol):
    spec = parse_family_spec(_need(args, "spec"))
    res = check_shift_disjoint(spec)
    out = {"disjoint": res.ok, "s_A": spec.s_A, "d": spec.d, "members": len(spec.members)}
    if res.witness is not None:
        i, j, a, b, ov = res.witness
        out["witness"] = {
            "members": [i, j],
            "box_i": [[str(lo), str(hi)] for lo, hi in a],
            "box_j": [[str(lo), str(hi)] for lo, hi in b],
            "overlap": [[str(lo), str(hi)] for lo, hi in ov],
        }
    return out, EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "ri": cmd_ri,
    "gaussian-ri": cmd_gaussian_ri,
    "petz-check": cmd_petz_check,
    "ond": cmd_ond,
    "holevo": cmd_holevo,
    "symplectic-basis": cmd_symplectic_basis,
    "dilation-check": cmd_dilation_check,
    "family-check": cmd_family_check,
}


def _default_seed() -> int:
    raw = os.environ.get("QREV_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qrev", description="Reversibility analysis of quantum channels.")
    p.add_argument("verb", choices=sorted(COMMANDS))
    p.add_argument("--channel", help="channel JSON")
    p.add_argument("--family", help="state family JSON")
    p.add_argument("--ensemble", help="ensemble JSON")
    p.add_argument("--params", help="Gaussian channel parameters JSON")
    p.add_argument("--subspace", help="symplectic subspace JSON")
    p.add_argument("--dilation", help="symplectic dilation JSON")
    p.add_argument("--spec", help="reversed family spec JSON")
    p.add_argument("--seed", type=int, default=None, help="random seed (default: $QREV_SEED or 0)")
    p.add_argument("--budget", type=int, default=64, help="search restarts for the ri2 search")
    p.add_argument("--rank-eps", type=float, default=1e-9)
    p.add_argument("--eq-eps", type=float, default=1e-10)
    p.add_argument("--threshold", type=float, default=1e-6, help="Petz residual threshold")
    p.add_argument("--bits", action="store_true", help="report entropies in bits")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.seed is None:
        args.seed = _default_seed()
    if args.seed < 0 or args.seed >= 2**64:
        print("error: --seed must be an unsigned 64-bit integer", file=sys.stderr)
        return EXIT_INPUT
    try:
        tol = Tolerance(rank_eps=args.rank_eps, eq_eps=args.eq_eps)
    except (QrevError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT
    try:
        result, code = COMMANDS[args.verb](args, tol)
    except QrevError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT
    report = {
        "tool": "qrev",
        "version": __version__,
        "verb": args.verb,
        "seed": args.seed,
        "tolerances": {"rank_eps": tol.rank_eps, "eq_eps": tol.eq_eps},
    }
    report.update(result)
    sys.stdout.write(dumps(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
