"""Command-line front end: ``motint <command> ...``.

Exit codes: 0 success, 2 the input is outside the supported class,
1 an internal consistency check failed, 64 bad usage or unparsable input.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field

from . import gammaring, rvcalc
from .errors import (DualPathMismatch, MathematicalRejection, MembershipViolation,
                     MotintError, PolySyntaxError, RegionSyntaxError)
from .grothring import (DEFAULT_CAP, SCHEMA_VERSION, euler, rational_to_json, render,
                        render_rational, to_latex, vclass_to_json)
from .milnor import (action_lcm, choose_primes, decompose, milnor_fiber, parse_poly,
                     sample_membership, strata, verify)
from .semilinear import chi_b, chi_g, describe_set, format_form, parse_region

log = logging.getLogger("motint")

EXIT_OK, EXIT_INTERNAL, EXIT_REJECTED, EXIT_USAGE = 0, 1, 2, 64


@dataclass
class Config:
    cap: int = DEFAULT_CAP
    default_primes: tuple = (7, 13)
    format: str = "text"
    seed: int = 0
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_env(cls, **overrides):
        cfg = cls()
        raw = os.environ.get("MOTINT_CAP")
        if raw:
            try:
                cfg.cap = int(float(raw))
            except ValueError:
                raise UsageError(f"MOTINT_CAP must be an integer, got {raw!r}") from None
        for k, v in overrides.items():
            if v is not None:
                setattr(cfg, k, v)
        if cfg.cap < 1000:
            raise UsageError(f"enumeration cap must be at least 1000, got {cfg.cap}")
        return cfg


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _emit(cfg, text, payload, latex=None):
    if cfg.format == "json":
        payload = {"schema_version": SCHEMA_VERSION, **payload}
        print(json.dumps(payload, indent=2, default=str))
    elif cfg.format == "latex":
        print(latex if latex is not None else text)
    else:
        print(text)


def _poly_opts(args):
    return {"assume_nondegenerate": args.assume_nondegenerate,
            "allow_nonconvenient": args.allow_nonconvenient}


# ---------------------------------------------------------------------------
# commands

def cmd_zeta(args, cfg):
    f = parse_poly(args.poly)
    x = decompose(f, **_poly_opts(args))
    Z = rvcalc.zeta(x)
    _emit(cfg, f"Z_f(T) = {render_rational(Z)}",
          {"poly": str(f), "zeta": rational_to_json(Z, with_schema=False)}, to_latex(Z))
    return EXIT_OK


def _block_rows(f, sts):
    rows = []
    for st in sts:
        b = st.block
        names = [f"g_{f.variables[i]}" for i in st.face.support]
        rows.append({"stratum": st.label(f.variables), "cls": render(b.cls),
                     "P": describe_set(b.P, names), "omega_f": format_form(b.omega_f, names),
                     "discs": {f"g_{f.variables[j]}": format_form(d.radius, names)
                               for j, d in zip(st.rest, b.discs)}})
    return rows


def cmd_milnor(args, cfg):
    f = parse_poly(args.poly)
    opts = _poly_opts(args)
    res = milnor_fiber(f, **opts)
    chi = euler(res.fiber)
    rows = _block_rows(f, strata(f, **opts))
    lines = [f"S_f = {render(res.fiber)}", f"chi(S_f) = {chi}", "", "blocks:"]
    for r in rows:
        discs = ", ".join(f"{k} > {v}" for k, v in r["discs"].items()) or "-"
        lines.append(f"  {r['stratum']}: cls = {r['cls']}; P = {{{r['P']}}}; "
                     f"omega_f = {r['omega_f']}; discs: {discs}")
    payload = {"poly": str(f), "milnor_fiber": vclass_to_json(res.fiber, with_schema=False),
               "milnor_fiber_text": render(res.fiber), "euler": chi, "blocks": rows,
               "class": rvcalc.rvclass_to_json(res.blocks)}
    _emit(cfg, "\n".join(lines), payload, to_latex(res.fiber))
    return EXIT_OK


def cmd_verify(args, cfg):
    f = parse_poly(args.poly)
    x = decompose(f, **_poly_opts(args))
    primes = [args.p] if args.p else choose_primes(action_lcm(x), cfg.default_primes, f.d,
                                                   args.max_m, cfg.cap)
    reports = []
    for p in primes:
        reports += verify(f, p, args.max_m, cfg.cap, x=x, workers=args.workers)
    lines = [f"{'p':>4} {'m':>3} {'oracle':>14} {'pipeline':>14}  match"]
    for r in reports:
        lines.append(f"{r.p:>4} {r.m:>3} {str(r.oracle):>14} {str(r.pipeline):>14}  "
                     f"{'yes' if r.match else 'NO'}")
    _emit(cfg, "\n".join(lines), {"poly": str(f), "rows": [r.to_json() for r in reports]})
    return EXIT_OK if all(r.match for r in reports) else EXIT_INTERNAL


def cmd_sample(args, cfg):
    f = parse_poly(args.poly)
    seed = cfg.seed if args.sample_seed is None else args.sample_seed
    rep = sample_membership(f, args.trials, seed, strict=False, **_poly_opts(args))
    lines = [f"{rep.consistent}/{rep.trials} consistent "
             f"({rep.members} members, {rep.nonmembers} non-members)"]
    for label, n in rep.hits.items():
        lines.append(f"  {label}: {n} hits")
    for v in rep.violations[:5]:
        lines.append(f"  violation: {v['point']} -> {v['blocks']}")
    _emit(cfg, "\n".join(lines), {"poly": str(f), **rep.to_json()})
    return EXIT_OK if rep.ok else EXIT_INTERNAL


def cmd_euler(args, cfg):
    S = parse_region(args.set)
    cg, cb = chi_g(S), chi_b(S)
    value = cb if args.bounded else cg
    name = "chi_b" if args.bounded else "chi_g"
    _emit(cfg, f"{name} = {value}", {"chi_g": cg, "chi_b": cb, "value": value})
    return EXIT_OK


def cmd_conv(args, cfg):
    fn = gammaring.parse_expr(args.expr, args.chi)
    if isinstance(fn, int):
        fn = gammaring.one() * fn
    text = gammaring.render(fn)
    _emit(cfg, text, {"expr": args.expr, "chi": args.chi, "result": text,
                      "breaks": [str(b) for b in fn.breaks], "values": list(fn.vals)})
    return EXIT_OK


def _load_class(path):
    with open(path) as fh:
        return rvcalc.rvclass_from_json(json.load(fh))


def cmd_retract(args, cfg):
    x = _load_class(args.cls)
    fn = {"eb": rvcalc.e_b, "eg": rvcalc.e_g, "ediamond": rvcalc.e_diamond}[args.map]
    v = fn(x)
    _emit(cfg, render(v), {"map": args.map, "value": vclass_to_json(v, with_schema=False)},
          to_latex(v))
    return EXIT_OK


def cmd_zeta_class(args, cfg):
    x = _load_class(args.cls)
    Z = rvcalc.zeta(x)
    _emit(cfg, f"Z(T) = {render_rational(Z)}", {"zeta": rational_to_json(Z, with_schema=False)},
          to_latex(Z))
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser():
    ap = _Parser(prog="motint", description="Motivic zeta functions and Milnor fibres "
                 "from Newton polyhedra, with brute-force arc-count checks.")
    ap.add_argument("--format", choices=("text", "json", "latex"), default=None)
    ap.add_argument("--cap", type=int, default=None, help="enumeration cap (default MOTINT_CAP or 1e7)")
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def poly_cmd(name, helptext):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--poly", required=True)
        p.add_argument("--allow-nonconvenient", action="store_true")
        p.add_argument("--assume-nondegenerate", action="store_true")
        p.add_argument("--format", choices=("text", "json", "latex"), default=None,
                       dest="sub_format")
        return p

    poly_cmd("zeta", "closed form of the motivic zeta function").set_defaults(run=cmd_zeta)
    poly_cmd("milnor", "motivic Milnor fibre, its Euler characteristic and the blocks") \
        .set_defaults(run=cmd_milnor)
    p = poly_cmd("verify", "compare zeta coefficients with truncated-arc counts")
    p.add_argument("--p", type=int, default=None)
    p.add_argument("--max-m", type=int, default=3)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(run=cmd_verify)
    p = poly_cmd("sample", "random Puiseux points against the strata")
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--seed", type=int, default=None, dest="sample_seed")
    p.set_defaults(run=cmd_sample)

    p = sub.add_parser("euler", help="o-minimal Euler characteristic of a semilinear region")
    p.add_argument("--set", required=True)
    p.add_argument("--bounded", action="store_true", help="report chi_b instead of chi_g")
    p.add_argument("--format", choices=("text", "json", "latex"), default=None, dest="sub_format")
    p.set_defaults(run=cmd_euler)

    p = sub.add_parser("conv", help="evaluate an expression in the convolution ring")
    p.add_argument("--expr", required=True)
    p.add_argument("--chi", choices=("g", "b"), default="g")
    p.add_argument("--format", choices=("text", "json", "latex"), default=None, dest="sub_format")
    p.set_defaults(run=cmd_conv)

    p = sub.add_parser("retract", help="apply e_b, e_g or e_diamond to a class file")
    p.add_argument("--class", required=True, dest="cls")
    p.add_argument("--map", choices=("eb", "eg", "ediamond"), required=True)
    p.add_argument("--format", choices=("text", "json", "latex"), default=None, dest="sub_format")
    p.set_defaults(run=cmd_retract)

    p = sub.add_parser("zeta-class", help="zeta function of a class file")
    p.add_argument("--class", required=True, dest="cls")
    p.add_argument("--format", choices=("text", "json", "latex"), default=None, dest="sub_format")
    p.set_defaults(run=cmd_zeta_class)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = Config.from_env(cap=args.cap, format=args.sub_format or args.format,
                              seed=args.seed)
        return args.run(args, cfg)
    except (UsageError, PolySyntaxError, RegionSyntaxError, FileNotFoundError) as e:
        print(f"motint: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (DualPathMismatch, MembershipViolation) as e:
        print(f"motint: internal check failed: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    except MathematicalRejection as e:
        print(f"motint: rejected: {e}", file=sys.stderr)
        return EXIT_REJECTED
    except MotintError as e:
        print(f"motint: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_REJECTED
    except ValueError as e:
        print(f"motint: {e}", file=sys.stderr)
        return EXIT_USAGE
    except Exception:
        log.exception("unexpected failure")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
