"""Command-line entry point: ``quotsing <command> [options]``.

Every command writes JSON (or DOT for quivers) to standard output or to
``--output``.  A TOML config file supplies defaults that explicit flags
override.  Exit codes: 0 success, 2 a cell claimed to vanish is nonzero,
3 some cell is window-limited, 64 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from quotsing import __version__
from quotsing.algebra import (
    build_skew_ext,
    build_skew_poly,
    cartan_matrix,
    corner,
    global_dimension,
    nonzero_characters,
    quiver_presentation,
    quotient_by_trivial_block,
)
from quotsing.errors import QuotsingError
from quotsing.monomials import covariant_hilbert
from quotsing.quiver import emit, folded_quiver, mckay_quiver, stable_folded_quiver
from quotsing.resolve.ext import ExtEngine, ext_dims, stable_grid
from quotsing.resolve.modules import covariant_module, free_module, koszul_summand, residue_field
from quotsing.weights import (
    acts_freely_off_origin,
    group_from_config,
    is_small,
    is_special_linear,
    parse_group,
)

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

EXIT_OK = 0
EXIT_FAILED = 2
EXIT_INCONCLUSIVE = 3
EXIT_USAGE = 64

CONFIG_VERSION = 1


class UsageError(Exception):
    pass


# -- config ----------------------------------------------------------------------------


def load_config(path) -> dict:
    if not path:
        return {}
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    version = doc.get("version", CONFIG_VERSION)
    if version != CONFIG_VERSION:
        raise UsageError(f"config version {version} is not supported (expected {CONFIG_VERSION})")
    return doc


def merged(args, config: dict, key: str, default=None):
    """Flag value if given, else the config's command table, else its top level, else default."""
    value = getattr(args, key, None)
    if value is not None:
        return value
    table = config.get(args.command.replace("-", "_"), {})
    if isinstance(table, dict) and key in table:
        return table[key]
    if key in config and not isinstance(config[key], dict):
        return config[key]
    return default


def resolve_group(args, config):
    if args.group:
        return parse_group(args.group)
    doc = config.get("group")
    if isinstance(doc, str):
        return parse_group(doc)
    if isinstance(doc, dict):
        return group_from_config(doc)
    raise UsageError("no group given: pass --group or set one in the config")


def parse_range(text, name: str) -> list:
    """``a:b`` (inclusive), a single integer, or a list from the config."""
    if isinstance(text, (list, tuple)):
        return [int(x) for x in text]
    if isinstance(text, int):
        return [text]
    try:
        if ":" in text:
            lo, hi = (int(x) for x in text.split(":", 1))
            return list(range(lo, hi + 1))
        return [int(text)]
    except ValueError as exc:
        raise UsageError(f"bad {name} range {text!r}; expected a:b") from exc


def parse_character(G, text: str):
    parts = text.split("/")
    try:
        value = [int(x) for x in parts]
    except ValueError as exc:
        raise UsageError(f"bad character {text!r}") from exc
    return G.char(value[0] if len(value) == 1 else value)


def parse_module(G, text: str):
    """Module descriptors: ``R``, ``k``, ``S:i=1:shift=2``, ``Npi:p=2:i=1``."""
    head, *fields = text.strip().split(":")
    opts = {}
    for f in fields:
        if "=" not in f:
            raise UsageError(f"bad module field {f!r} in {text!r}")
        key, value = f.split("=", 1)
        opts[key.strip()] = value.strip()
    try:
        shift = int(opts.pop("shift", 0))
    except ValueError as exc:
        raise UsageError(f"bad shift in {text!r}") from exc
    if head == "R":
        M = free_module(G)
    elif head == "k":
        if shift:
            raise UsageError("the residue field takes no shift")
        M = residue_field(G)
    elif head == "S":
        M = covariant_module(G, parse_character(G, opts.pop("i", "0")), shift=shift)
        shift = 0
    elif head in ("Npi", "U"):
        try:
            p = int(opts.pop("p"))
        except (KeyError, ValueError) as exc:
            raise UsageError(f"{text!r} needs an integer p") from exc
        if not 1 <= p <= G.d:
            raise UsageError(f"p={p} must lie in 1..{G.d}")
        M = koszul_summand(G, p, parse_character(G, opts.pop("i", "0")))
    else:
        raise UsageError(f"unknown module {head!r}; expected R, k, S or Npi")
    if opts:
        raise UsageError(f"unknown fields {sorted(opts)} in {text!r}")
    if shift:
        M = M.twist(shift)
    return M


# -- output --------------------------------------------------------------------------------


def write(args, text: str):
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def dump(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def stamp(args, doc: dict, start: float) -> dict:
    if not args.no_timestamp:
        doc["runtime"] = round(time.perf_counter() - start, 3)
    return doc


# -- commands ----------------------------------------------------------------------------


def cmd_analyze(args, config) -> int:
    G = resolve_group(args, config)
    doc = {
        "group": G.compact(),
        "invariant_factors": list(G.invariant_factors),
        "weights": [list(a) for a in G.weights],
        "d": G.d,
        "order": G.order,
        "characters": [G.label(c) if G.r == 1 else list(c) for c in G.characters()],
        "sl": is_special_linear(G),
        "small": is_small(G),
        "isolated": acts_freely_off_origin(G),
    }
    write(args, dump(doc))
    return EXIT_OK


def cmd_hilbert(args, config) -> int:
    G = resolve_group(args, config)
    degmax = int(merged(args, config, "degmax", 12))
    chars = [parse_character(G, args.character)] if args.character else G.characters()
    doc = {str(G.label(c)): covariant_hilbert(G, c, degmax) for c in chars}
    write(args, dump(doc))
    return EXIT_OK


def cmd_mckay(args, config) -> int:
    G = resolve_group(args, config)
    which = merged(args, config, "which", "plain")
    fmt = merged(args, config, "format", "json")
    if which == "plain":
        Q = mckay_quiver(G)
    elif which == "folded":
        Q = folded_quiver(G)
    elif which == "stable":
        Q = stable_folded_quiver(G)
    else:
        raise UsageError(f"unknown quiver {which!r}; expected plain, folded or stable")
    write(args, emit(Q, fmt))
    return EXIT_OK


def endo_algebra(G, which: str):
    if which == "T":
        return build_skew_poly(G)
    if which == "T_stable":
        return quotient_by_trivial_block(build_skew_poly(G))
    if which == "Utilde":
        return build_skew_ext(G)
    if which == "U_stable":
        return corner(build_skew_ext(G), nonzero_characters(G))
    raise UsageError(f"unknown algebra {which!r}; expected T, T_stable, Utilde or U_stable")


def cmd_endo(args, config) -> int:
    G = resolve_group(args, config)
    which = merged(args, config, "which", "T")
    fmt = merged(args, config, "format", "json")
    A = endo_algebra(G, which)
    Q = quiver_presentation(A).quiver
    if fmt == "dot":
        write(args, Q.to_dot())
        return EXIT_OK
    gd = global_dimension(A) if args.global_dimension else None
    doc = {
        "group": G.compact(),
        "algebra": which,
        "dim": A.dim,
        "vertices": json.loads(Q.to_json())["vertices"],
        "quiver": json.loads(Q.to_json()),
        "cartan": cartan_matrix(A),
    }
    if gd is not None:
        doc["global_dimension"] = gd if isinstance(gd, int) else str(gd)
    if args.basis:
        doc["basis"] = A.to_dict()["basis"]
    write(args, dump(doc))
    return EXIT_OK


def cmd_ext(args, config) -> int:
    start = time.perf_counter()
    G = resolve_group(args, config)
    X = parse_module(G, merged(args, config, "source", "k"))
    Y = parse_module(G, merged(args, config, "target", "R"))
    nmax = int(merged(args, config, "nmax", G.d))
    twists = parse_range(merged(args, config, "twists", f"{-2 * G.d}:{2 * G.d}"), "twist")
    degmax = merged(args, config, "degmax")
    engine = ExtEngine(G, cap=None if degmax is None else int(degmax))
    if args.stable:
        nmin = int(merged(args, config, "nmin", -nmax))
        table = stable_grid(X, Y, range(nmin, nmax + 1), twists, engine)
    else:
        table = ext_dims(X, Y, nmax, twists, engine, method=args.method)
    doc = stamp(args, table.to_dict(), start)
    doc["group"] = G.compact()
    write(args, dump(doc))
    return EXIT_OK if table.conclusive() else EXIT_INCONCLUSIVE


def claimed_zero(name: str, d: int, n: int) -> bool:
    """Cells the construction promises to vanish: all n != 0 for U, n > 0 or n < 2 - d for T."""
    if name == "T":
        return n > 0 or n < 2 - d
    return n != 0


def verification_exit(report, d: int) -> int:
    for cell in report.cells:
        if cell["dim"] and claimed_zero(report.candidate, d, cell["n"]):
            return EXIT_FAILED
    return EXIT_OK if report.conclusive else EXIT_INCONCLUSIVE


def cmd_verify(args, config) -> int:
    from quotsing.tilt import build_T, build_U, vanishing_grid

    G = resolve_group(args, config)
    obj = merged(args, config, "object", "U")
    nmax = int(merged(args, config, "nmax", G.d + 2))
    degmax = merged(args, config, "degmax")
    engine = ExtEngine(G, cap=None if degmax is None else int(degmax))
    if obj == "T":
        C = build_T(G)
    elif obj == "U":
        C = build_U(G)
    else:
        raise UsageError(f"unknown object {obj!r}; expected T or U")
    report = vanishing_grid(C, range(-nmax, nmax + 1), 0, engine)
    write(args, report.to_json(timestamp=not args.no_timestamp))
    return verification_exit(report, G.d)


def cmd_report(args, config) -> int:
    from quotsing.tilt import build_T, build_U, cross_check_endomorphisms, vanishing_grid, \
        verify_koszul_hom_exactness

    start = time.perf_counter()
    G = resolve_group(args, config)
    engine = ExtEngine(G)
    doc = {"group": G.compact(), "version": __version__,
           "assumptions": ["stable Ext in positive degrees equals Ext for maximal Cohen-Macaulay modules"]}
    doc["quivers"] = {
        "mckay": mckay_quiver(G).to_dict(),
        "folded": folded_quiver(G).to_dict(),
        "stable_folded": stable_folded_quiver(G).to_dict(),
    }
    doc["algebras"] = {w: endo_algebra(G, w).dim for w in ("T", "T_stable", "Utilde", "U_stable")}
    status = EXIT_OK
    if acts_freely_off_origin(G):
        cross = cross_check_endomorphisms(G, engine=engine)
        doc["endomorphism_mismatches"] = [list(m) for m in cross["mismatches"]]
        doc["U_stable_total"] = cross["U_stable_total"]
        koszul = verify_koszul_hom_exactness(G, engine=engine)
        doc["koszul_hom"] = {k: koszul[k] for k in ("exact", "non_surjective_a", "non_surjective_b", "passed")}
        if cross["mismatches"] or not koszul["passed"]:
            status = EXIT_FAILED
        if args.full:
            doc["verdicts"] = {}
            for C in (build_T(G), build_U(G)):
                rep = vanishing_grid(C, None, 0, engine)
                doc["verdicts"][C.name] = {"verdict": rep.verdict, "conclusive": rep.conclusive,
                                           "nonzero": rep.nonzero}
                status = max(status, verification_exit(rep, G.d))
    write(args, dump(stamp(args, doc, start)))
    return status


COMMANDS = {
    "analyze": cmd_analyze,
    "hilbert": cmd_hilbert,
    "mckay": cmd_mckay,
    "endo": cmd_endo,
    "ext": cmd_ext,
    "verify-tilting": cmd_verify,
    "report": cmd_report,
}


# -- argument parsing ------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--group", "-g", help="compact group spec such as m=5:a=1,2,2")
    common.add_argument("--config", "-c", help="TOML file with defaults")
    common.add_argument("--output", "-o", help="write to this file instead of stdout")
    common.add_argument("--no-timestamp", action="store_true", help="omit runtimes for reproducible output")

    parser = _Parser(prog="quotsing", description="Exact computations for abelian quotient singularities.")
    parser.add_argument("--version", action="version", version=f"quotsing {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    sub.add_parser("analyze", parents=[common], help="group predicates and characters")

    p = sub.add_parser("hilbert", parents=[common], help="Hilbert functions of the covariant modules")
    p.add_argument("--degmax", type=int)
    p.add_argument("--character", help="only this character, e.g. 2 or 1/0")

    p = sub.add_parser("mckay", parents=[common], help="McKay and folded quivers")
    p.add_argument("--which", choices=["plain", "folded", "stable"])
    p.add_argument("--format", choices=["json", "dot"])

    p = sub.add_parser("endo", parents=[common], help="endomorphism algebras and their quivers")
    p.add_argument("--which", choices=["T", "T_stable", "Utilde", "U_stable"])
    p.add_argument("--format", choices=["json", "dot"])
    p.add_argument("--global-dimension", action="store_true", help="also compute the global dimension")
    p.add_argument("--basis", action="store_true", help="include the basis listing")

    p = sub.add_parser("ext", parents=[common], help="graded Ext or stable Hom table")
    p.add_argument("--source", "-X", help="module descriptor: R, k, S:i=1:shift=2, Npi:p=2:i=1")
    p.add_argument("--target", "-Y", help="module descriptor")
    p.add_argument("--nmax", type=int)
    p.add_argument("--nmin", type=int, help="lowest shift for --stable")
    p.add_argument("--twists", help="inclusive range a:b")
    p.add_argument("--degmax", type=int, help="degree cap for resolutions")
    p.add_argument("--method", choices=["auto", "direct", "duality"], default="auto")
    p.add_argument("--stable", action="store_true", help="stable Hom with shifts, negative n by Serre duality")

    p = sub.add_parser("verify-tilting", parents=[common], help="vanishing grid and verdict for T or U")
    p.add_argument("--object", choices=["T", "U"])
    p.add_argument("--nmax", type=int, help="grid covers n in [-nmax, nmax]")
    p.add_argument("--degmax", type=int, help="degree cap for resolutions")

    p = sub.add_parser("report", parents=[common], help="summary of all checks for one group")
    p.add_argument("--full", action="store_true", help="include the tilting grids")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            raise UsageError("a command is required: " + " | ".join(COMMANDS))
        config = load_config(args.config)
        return COMMANDS[args.command](args, config)
    except UsageError as exc:
        print(f"quotsing: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QuotsingError as exc:
        print(f"quotsing: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
