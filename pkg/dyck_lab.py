"""
dyck_lab: generate the parametric graph families, decide minors, embeddings and
Kuratowski-connectivity, compute packing / cover / EP values on small hosts, and verify the
claim registry.

    python dyck_lab.py gen --family dyck --k 2 --h 1 --c 0 --emit g6 --tags
    python dyck_lab.py minor --pattern k5 --host dyck:2,1,0
    python dyck_lab.py pack --z k5 --host j --k 2 --half
    python dyck_lab.py disk --in k4 --x 0,1,2
    python dyck_lab.py verify paper
"""

import argparse
import json
import logging
import re
import sys
from pathlib import Path

import pandas as pd
from pydantic import ValidationError

from modules.claims import EXIT_CONFIG, EXIT_FAIL, EXIT_PASS, EXIT_REFUSED, verify_suite
from modules.config_loader import get_settings
from modules.data_logging import DataLogger, log_search_stats
from modules.embedder import disk_embeddable, embeds, euler_genus, minimum_surfaces
from modules.errors import ConfigError, LabError, SearchRefused
from modules.family_gen import FamilySpec, family_minor_model, generate, parse_family_token
from modules.graph_core import Separation
from modules.graph_io import format_edge_list, graph6_encode, resolve_graph, to_dot
from modules.kuratowski import core_component, is_kuratowski_connected
from modules.minor_engine import is_minor
from modules.packing import cover, ep_parameter, pack, packing_number
from modules.search_budget import SearchBudget
from modules.surface_alg import (closed_set_from_members, format_surfaces, parse_surface,
                                 surfaces_excluding)

logger = logging.getLogger("dyck_lab")

EMIT_CHOICES = ["json", "csv", "dot", "g6", "edges"]

GRAPH_VERBS = ("genus", "embeds", "disk", "kc", "core")


class LabArgumentParser(argparse.ArgumentParser):
    """Usage errors become ConfigError so they exit with the config code, not argparse's 2."""

    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


def split_tokens(values):
    """
    Split comma-separated graph tokens, keeping commas that belong to a token.

    A piece starting with a digit continues the previous token, so "k5,k3,3" gives
    ["k5", "k3,3"] and "grid:3,4,k4" gives ["grid:3,4", "k4"].
    """
    tokens = []
    for value in values or []:
        for piece in value.split(","):
            piece = piece.strip()
            if not piece:
                continue
            if piece[0].isdigit() and tokens:
                tokens[-1] += "," + piece
            else:
                tokens.append(piece)
    return tokens


def int_list(values):
    try:
        return [int(x) for value in values or [] for x in value.split(",") if x.strip()]
    except ValueError as e:
        raise ConfigError(f"expected a comma-separated list of vertices, got {values!r}") from e


def _family_or_none(token):
    try:
        return parse_family_token(token)
    except ConfigError:
        return None


def _host(token):
    spec = _family_or_none(token)
    if spec is None:
        return resolve_graph(token), None, None
    gen = generate(spec)
    return gen.graph, spec, gen.canonical_embedding


def _gen_spec(args):
    if args.token is not None:
        return parse_family_token(args.token)
    fields = {"family": args.family, "k": args.k, "h": args.h, "c": args.c,
              "n": args.n, "m": args.m, "index": args.index}
    try:
        return FamilySpec.model_validate({key: value for key, value in fields.items() if value is not None})
    except ValidationError as e:
        raise ConfigError(f"invalid family parameters: {e.errors()[0]['msg']}") from e


def write_tags_sidecar(gen, directory):
    path = Path(directory) / (re.sub(r"[^0-9a-z]+", "_", gen.spec.token()).strip("_") + ".tags.json")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps({"family": gen.spec.token(), "tags": gen.tags_json()}, indent=2))
    logger.info("wrote tags to %s", path)
    return path


# ---------------------------------------------------------------- verbs
# Each takes (args, budget) and returns (payload, graph or None).

def cmd_gen(args, budget):
    gen = generate(_gen_spec(args))
    payload = {
        "family": gen.spec.token(),
        "n": gen.graph.n,
        "m": gen.graph.num_edges,
        "degenerate": gen.degenerate,
        "edges": [list(e) for e in gen.graph.edges()],
        "tags": gen.tags_json(),
        "canonical_embedding": gen.canonical_embedding.as_dict() if gen.canonical_embedding else None,
    }
    if args.tags:
        payload["tags_file"] = str(write_tags_sidecar(gen, args.tags_dir or get_settings().report_dir))
    return payload, gen.graph


def cmd_minor(args, budget):
    h, g = resolve_graph(args.pattern), resolve_graph(args.host)
    small, large = _family_or_none(args.pattern), _family_or_none(args.host)
    hint = family_minor_model(small, large) if small is not None and large is not None else None
    model = is_minor(h, g, budget, hint=hint)
    return {"minor": model is not None, "model": model.as_dict() if model is not None else None}, None


def cmd_pack(args, budget):
    z = [resolve_graph(t) for t in args.z]
    g, _, embedding = _host(args.host)
    if args.k is None:
        result = packing_number(z, g, args.multiplicity, args.kind, budget, embedding, args.k_max)
    else:
        result = pack(z, g, args.k, args.multiplicity, args.kind, budget, embedding)
    if result.status == "refused":
        raise SearchRefused(f"pack refused: {result.note}", result.stats)
    return result.as_dict(), None


def cmd_cover(args, budget):
    z = [resolve_graph(t) for t in args.z]
    g, _, _ = _host(args.host)
    return cover(z, g, args.cap, budget, args.level_budget).as_dict(), None


def cmd_ep(args, budget):
    z = [resolve_graph(t) for t in args.z]
    g, spec, _ = _host(args.host)
    result = ep_parameter(z, g, args.k_max, budget, host_spec=spec)
    return {"value": result.value, "degenerate": result.degenerate, "trace": result.trace}, None


def cmd_genus(args, budget):
    g = resolve_graph(args.graph)
    eg_o, eg_n = minimum_surfaces(g, args.eg_max, budget)
    result = euler_genus(g, args.eg_max, budget)
    return {"orientable_euler_genus": eg_o, "nonorientable_euler_genus": eg_n, **result.as_dict()}, None


def cmd_embeds(args, budget):
    ok, witness = embeds(resolve_graph(args.graph), parse_surface(args.surface), budget)
    return {"embeds": ok, "witness": witness.as_dict() if witness is not None else None}, None


def cmd_disk(args, budget):
    return {"disk_embeddable": disk_embeddable(resolve_graph(args.graph), args.x)}, None


def cmd_kc(args, budget):
    verdict, violation = is_kuratowski_connected(resolve_graph(args.graph))
    return {"kuratowski_connected": verdict,
            "violation": violation.as_dict() if violation is not None else None}, None


def cmd_core(args, budget):
    return core_component(resolve_graph(args.graph), Separation(args.a, args.b)).as_dict(), None


def cmd_sobs(args, budget):
    if args.members is not None:
        excluded = closed_set_from_members(parse_surface(m) for m in args.members)
    elif args.z:
        excluded = surfaces_excluding([resolve_graph(t) for t in args.z], budget=budget)
    else:
        raise ConfigError("sobs needs --members or --z")
    return {"sobs": format_surfaces(excluded.obstructions)}, None


# ---------------------------------------------------------------- arguments

def _graph_input(p):
    p.add_argument("graph", nargs="?", help="graph token, graph6 string or file")
    p.add_argument("--in", dest="graph_in", default=None, help="same as the positional GRAPH")


def _antichain_input(p):
    p.add_argument("z", nargs="*", help="pattern tokens")
    p.add_argument("--z", dest="z_opt", nargs="+", default=None, help="comma-separated pattern tokens")


def _global_options(parser, suppress=False):
    # Verbs accept the global options too; SUPPRESS keeps the top-level value when a verb omits them.
    def default(value):
        return argparse.SUPPRESS if suppress else value

    parser.add_argument("--emit", choices=EMIT_CHOICES, default=default("json"))
    parser.add_argument("--budget", type=int, default=default(None),
                        help="node budget (default: DYCK_LAB_BUDGET)")
    parser.add_argument("--log-level", default=default("WARNING"))


def build_parser():
    parser = LabArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    _global_options(parser)
    common = LabArgumentParser(add_help=False)
    _global_options(common, suppress=True)
    sub = parser.add_subparsers(dest="verb", required=True)

    def add_verb(name, **kwargs):
        return sub.add_parser(name, parents=[common], **kwargs)

    p = add_verb("gen", help="generate a family member")
    p.add_argument("token", nargs="?")
    p.add_argument("--family", default=None)
    for name in ("k", "h", "c", "n", "m", "index"):
        p.add_argument(f"--{name}", type=int, default=None)
    p.add_argument("--tags", action="store_true", help="write the substructure tags as a JSON sidecar")
    p.add_argument("--tags-dir", default=None, help="sidecar directory (default: DYCK_LAB_REPORT_DIR)")
    p.set_defaults(func=cmd_gen)

    p = add_verb("minor", help="is PATTERN a minor of HOST")
    p.add_argument("pattern_pos", nargs="?", metavar="pattern")
    p.add_argument("host_pos", nargs="?", metavar="host")
    p.add_argument("--pattern", default=None)
    p.add_argument("--host", default=None)
    p.set_defaults(func=cmd_minor)

    p = add_verb("pack", help="packing search")
    _antichain_input(p)
    p.add_argument("--host", required=True)
    p.add_argument("--k", type=int, default=None, help="target size; the packing number when omitted")
    p.add_argument("--kmax", "--k-max", dest="k_max", type=int, default=None)
    p.add_argument("--multiplicity", type=int, choices=[1, 2], default=1)
    p.add_argument("--half", action="store_true", help="half-integral packing (multiplicity 2)")
    p.add_argument("--kind", choices=["single", "mixed"], default="single")
    p.add_argument("--mixed", action="store_true", help="models may realize different patterns")
    p.set_defaults(func=cmd_pack)

    p = add_verb("cover", help="smallest cover")
    _antichain_input(p)
    p.add_argument("--host", required=True)
    p.add_argument("--cap", type=int, default=4)
    p.add_argument("--level-budget", type=int, default=None)
    p.set_defaults(func=cmd_cover)

    p = add_verb("ep", help="EP parameter over the Dyck family of sobs(S_Z)")
    _antichain_input(p)
    p.add_argument("--host", required=True)
    p.add_argument("--kmax", "--k-max", dest="k_max", type=int, default=3)
    p.set_defaults(func=cmd_ep)

    p = add_verb("genus", help="orientable and non-orientable Euler genus")
    _graph_input(p)
    p.add_argument("--eg-max", type=int, default=6)
    p.set_defaults(func=cmd_genus)

    p = add_verb("embeds", help="does GRAPH embed in SURFACE (h,c)")
    _graph_input(p)
    p.add_argument("surface_pos", nargs="?", metavar="surface")
    p.add_argument("--surface", default=None)
    p.set_defaults(func=cmd_embeds)

    p = add_verb("disk", help="X-disk embeddability")
    _graph_input(p)
    p.add_argument("--x", nargs="*", default=[], help="comma-separated boundary vertices")
    p.set_defaults(func=cmd_disk)

    p = add_verb("kc", help="Kuratowski-connectivity")
    _graph_input(p)
    p.set_defaults(func=cmd_kc)

    p = add_verb("core", help="core component of a separation (A, B)")
    _graph_input(p)
    p.add_argument("--a", nargs="+", required=True)
    p.add_argument("--b", nargs="+", required=True)
    p.set_defaults(func=cmd_core)

    p = add_verb("sobs", help="obstruction surfaces")
    p.add_argument("--members", nargs="*", default=None)
    p.add_argument("--z", nargs="*", default=None)
    p.set_defaults(func=cmd_sobs)

    p = add_verb("verify", help="run a claim suite")
    p.add_argument("suite")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--report-dir", default=None)
    p.set_defaults(func=None)
    return parser


def _pick(parser, option, value, alias):
    if value is not None and alias is not None and value != alias:
        parser.error(f"{option} given twice with different values")
    return value if value is not None else alias


def parse_args(argv=None):
    """
    Parse the command line and fold the flag spellings into one attribute per input.

    Usage errors raise ConfigError.
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.verb in GRAPH_VERBS:
        args.graph = _pick(parser, "--in", args.graph_in, args.graph)
        if args.graph is None:
            parser.error(f"{args.verb} needs a graph (--in)")
    if args.verb == "embeds":
        args.surface = _pick(parser, "--surface", args.surface, args.surface_pos)
        if args.surface is None:
            parser.error("embeds needs --surface")
    if args.verb == "disk":
        args.x = int_list(args.x)
    if args.verb == "core":
        args.a, args.b = int_list(args.a), int_list(args.b)
    if args.verb == "minor":
        args.pattern = _pick(parser, "--pattern", args.pattern, args.pattern_pos)
        args.host = _pick(parser, "--host", args.host, args.host_pos)
        if args.pattern is None or args.host is None:
            parser.error("minor needs --pattern and --host")
    if args.verb in ("pack", "cover", "ep"):
        args.z = split_tokens(args.z) + split_tokens(args.z_opt)
        if not args.z:
            parser.error(f"{args.verb} needs at least one pattern (--z)")
    if args.verb == "pack":
        if args.half:
            args.multiplicity = 2
        if args.mixed:
            args.kind = "mixed"
    if args.verb == "sobs" and args.z is not None:
        args.z = split_tokens(args.z)
    if args.verb == "gen" and args.token is None and args.family is None:
        parser.error("gen needs a family token or --family")
    return args


def emit(payload, graph, fmt, out=None):
    out = out or sys.stdout
    if fmt == "json":
        out.write(json.dumps(payload, indent=2, default=str) + "\n")
    elif fmt == "csv":
        pd.json_normalize(payload, sep=".").to_csv(out, index=False)
    elif graph is None:
        raise ConfigError(f"--emit {fmt} needs a graph-valued verb such as gen")
    elif fmt == "dot":
        out.write(to_dot(graph))
    elif fmt == "g6":
        out.write(graph6_encode(graph).decode("ascii") + "\n")
    else:
        out.write(format_edge_list(graph))


def run_verify(args):
    reports, code = verify_suite(args.suite, args.budget, args.workers, args.report_dir)
    rows = [{"claim_id": r.claim_id, "status": r.status, "runtime_ms": r.runtime_ms, "note": r.note}
            for r in reports]
    if args.emit == "csv":
        pd.DataFrame(rows).to_csv(sys.stdout, index=False)
    else:
        sys.stdout.write(json.dumps({"suite": args.suite, "exit_code": code, "reports": rows}, indent=2) + "\n")
    return code


def main(argv=None):
    try:
        args = parse_args(argv)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(level=args.log_level.upper(),
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        if args.verb == "verify":
            return run_verify(args)
        settings = get_settings()
        budget = SearchBudget(args.budget or settings.budget, args.verb)
        stats_logger = DataLogger(Path(settings.report_dir) / "cli_stats.csv")
        try:
            payload, graph = args.func(args, budget)
        except SearchRefused as e:
            log_search_stats(stats_logger, args.verb, {**budget.stats(), **e.stats}, "refused")
            raise
        log_search_stats(stats_logger, args.verb, budget.stats(), "ok")
        emit(payload, graph, args.emit)
        return EXIT_PASS
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except SearchRefused as e:
        print(f"refused: {e}", file=sys.stderr)
        return EXIT_REFUSED
    except LabError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
