"""JSON command-line interface: ``cartan-orbits <command> ...``."""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .cartan import AlgebraKind, bracket, member, p_power
from .gf import FieldDesc, field_make
from .normw import (
    centralizer_element_W,
    fixes_torus,
    induced_weyl_W,
    is_in_normalizer_W,
    matches_form_star,
    normalizer_element_W,
    random_params,
)
from .oracle import TooLarge, oracle_report
from .orbits import chain_composite, intertwines, orbit_label, same_orbit
from .tori import TorusElem, index_of, standard_torus, weight_decomposition


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _field(args) -> FieldDesc:
    return field_make(args.p, args.k, args.modulus)


def _kind(args) -> AlgebraKind:
    kind = AlgebraKind(args.kind, args.n)
    return kind


def _json_arg(raw):
    if isinstance(raw, str):
        try:
            return json.loads(raw)
        except json.JSONDecodeError as exc:
            raise UsageError(f"invalid JSON argument: {exc}") from None
    return raw


def _elem(raw, args) -> TorusElem:
    obj = _json_arg(raw)
    desc = FieldDesc.from_json(obj["field"]) if "field" in obj else _field(args)
    return TorusElem.from_json(obj, desc)


def cmd_tori(args) -> dict:
    kind, desc = _kind(args), _field(args)
    out = []
    for r in range(kind.mu + 1):
        t = standard_torus(kind, r, desc, check=False)
        toral = [p_power(d) == d for d in t.basis]
        commute = all(bracket(d, e).is_zero() for d in t.basis for e in t.basis)
        members = [bool(member(kind, d)) for d in t.basis]
        out.append(
            {
                "r": r,
                "basis": [d.to_json() for d in t.basis],
                "basis_text": [repr(d) for d in t.basis],
                "toral": toral,
                "commute": commute,
                "member": members,
            }
        )
    return {"kind": kind.to_json(), "field": desc.to_json(), "mu": kind.mu, "tori": out}


def cmd_index(args) -> dict:
    kind, desc = _kind(args), _field(args)
    lam = _json_arg(args.lam)
    e = standard_torus(kind, args.r, desc).elem(lam)
    r_min, chain, final = index_of(e)
    composite = chain_composite(chain, desc, kind.n)
    return {
        "r_min": r_min,
        "chain": [phi.to_json() for phi in chain],
        "final": final.to_json(),
        "verified": intertwines(composite, e.realize(), final.realize()),
    }


def cmd_label(args) -> dict:
    e = _elem(args.elem, args)
    _, _, final = index_of(e)
    return orbit_label(final).to_json()


def cmd_same_orbit(args) -> dict:
    e1, e2 = _elem(args.e1, args), _elem(args.e2, args)
    same, witness = same_orbit(e1, e2)
    out = {"same": same}
    if witness is not None:
        out["witness"] = witness.to_json()
    return out


def cmd_weights(args) -> dict:
    kind, desc = _kind(args), _field(args)
    table = weight_decomposition(kind, args.s, _json_arg(args.a), desc)
    rows = [
        {"weight": w.to_json(), "monomials": [list(e) for e in sorted(ms)]}
        for w, ms in sorted(table.items(), key=lambda kv: kv[0].sort_key())
    ]
    return {"kind": kind.to_json(), "s": args.s, "field": desc.to_json(), "weights": rows}


def cmd_normalizer_sample(args) -> dict:
    desc = _field(args)
    n, r = args.n, args.r
    if not 0 <= r <= n:
        raise UsageError(f"r must lie in [0, {n}]")
    rng = np.random.default_rng(args.seed)
    samples = []
    for _ in range(args.count):
        params = random_params(n, r, desc, rng)
        phi = normalizer_element_W(params, desc)
        w = induced_weyl_W(phi, r)
        samples.append(
            {
                "params": params.to_json(),
                "automorphism": phi.to_json(),
                "in_normalizer": is_in_normalizer_W(phi, r),
                "matches_form": matches_form_star(phi, r) is not None,
                "weyl": w.to_json(),
            }
        )
    cent = centralizer_element_W(n, r, [desc.one] * (n - r), desc)
    return {
        "n": n,
        "r": r,
        "field": desc.to_json(),
        "seed": args.seed,
        "samples": samples,
        "centralizer_identity_fixes_torus": fixes_torus(cent, r),
    }


def cmd_oracle(args) -> dict:
    kind = _kind(args)
    if args.q is not None:
        k = 1
        while args.p**k < args.q:
            k += 1
        if args.p**k != args.q:
            raise UsageError(f"q={args.q} is not a power of p={args.p}")
        args.k = k
    desc = _field(args)
    report = oracle_report(desc, kind)
    if not args.full:
        report["pairs"] = [pr for pr in report["pairs"] if not pr["agree"]] or []
        report["pairs_omitted"] = True
    return report


COMMANDS = {
    "tori": cmd_tori,
    "index": cmd_index,
    "label": cmd_label,
    "same-orbit": cmd_same_orbit,
    "weights": cmd_weights,
    "normalizer-sample": cmd_normalizer_sample,
    "oracle": cmd_oracle,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cartan-orbits", description="Semisimple orbits in W, S and H over GF(p^k).")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--config", help="JSON file with default values for the flags")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def field_flags(sp):
        sp.add_argument("--p", type=int, default=3)
        sp.add_argument("--k", type=int, default=1)
        sp.add_argument("--modulus", type=json.loads, default=None, help="[c0, ..., c_{k-1}, 1]")

    def kind_flags(sp, default_kind="W"):
        sp.add_argument("--kind", choices=["W", "S1", "S", "H2", "H"], default=default_kind)
        sp.add_argument("--n", type=int, default=1)

    sp = sub.add_parser("tori", help="bases of all standard tori with their checks")
    kind_flags(sp)
    field_flags(sp)

    sp = sub.add_parser("index", help="index of a torus element")
    kind_flags(sp)
    field_flags(sp)
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--lambda", dest="lam", required=True, help="JSON list of field elements")

    sp = sub.add_parser("label", help="orbit label of a torus element")
    field_flags(sp)
    sp.add_argument("--elem", required=True, help='JSON {"kind", "r", "lambda"}')

    sp = sub.add_parser("same-orbit", help="decide conjugacy of two torus elements")
    field_flags(sp)
    sp.add_argument("--e1", required=True)
    sp.add_argument("--e2", required=True)

    sp = sub.add_parser("weights", help="weight decomposition of A(n)")
    kind_flags(sp)
    field_flags(sp)
    sp.add_argument("--s", type=int, default=0)
    sp.add_argument("--a", required=True, help="JSON list of coefficients")

    sp = sub.add_parser("normalizer-sample", help="random normalizer elements of t_r in Aut W(n)")
    field_flags(sp)
    sp.add_argument("--n", type=int, default=2)
    sp.add_argument("--r", type=int, default=1)
    sp.add_argument("--count", type=int, default=5)
    sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("oracle", help="brute-force agreement report for W(1)")
    kind_flags(sp)
    field_flags(sp)
    sp.add_argument("--q", type=int, default=None)
    sp.add_argument("--full", action="store_true", help="include every pair in the output")
    return parser


_ALIASES = {"S": "S1", "H": "H2"}


def _apply_config(parser, argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return {}
    try:
        with open(known.config) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config: {exc}") from None
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    return {key.replace("-", "_"): val for key, val in cfg.items()}


def run(argv=None) -> dict:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    defaults = _apply_config(parser, argv)
    if defaults:
        if "lambda" in defaults:
            defaults["lam"] = defaults.pop("lambda")
        for action in parser._subparsers._group_actions:
            for sp in action.choices.values():
                sp.set_defaults(**defaults)
        parser.set_defaults(**defaults)
    args = parser.parse_args(argv)
    if not args.command:
        raise UsageError("a command is required")
    for flag in ("lam", "elem", "e1", "e2", "a"):
        val = getattr(args, flag, None)
        if val is not None and not isinstance(val, str):
            setattr(args, flag, json.dumps(val))
    if hasattr(args, "kind"):
        args.kind = _ALIASES.get(args.kind, args.kind)
        _kind(args).check_field(_field(args))
    return COMMANDS[args.command](args)


def _fail(exc, code: int) -> int:
    json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
    sys.stderr.write("\n")
    return code


def main(argv=None) -> int:
    try:
        out = run(argv)
    except (ValueError, KeyError, TypeError, IndexError, TooLarge) as exc:
        return _fail(exc, 2)
    except ArithmeticError as exc:
        # a constructed map failed its own verification
        return _fail(exc, 1)
    json.dump(out, sys.stdout, sort_keys=True)
    sys.stdout.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
