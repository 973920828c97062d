"""Command-line entry point.

Reports are JSON (sorted keys, no timestamps) carrying the tool version, the
run configuration and a sha256 of every input file, so repeated runs with the
same inputs and flags produce identical bytes.

Exit codes: 0 success, 1 domain error (hypotheses, ambiguity, failed checks),
2 usage or input-format error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from pathlib import Path

from . import __version__
from .corpus import NAMED, corpus_gen, named_graph
from .errors import GraphFormatError, GraphRigidityError
from .graph import Multigraph, betti_number, bfs_spanning_tree, format_graph, parse_graph, sort_key
from .iso import canonical_form, deck_from_cards, edge_deck
from .measure import (
    build_measure_table,
    check_eigen_relation,
    conformality_check,
    min_eigen_radius,
    rigidity_compare,
)
from .nb import DEFAULT_TOL, pf_eigenpair, build_nb_matrix
from .reconstruction import (
    MODES,
    RULES,
    HiddenGraphOracle,
    deck_context,
    kelly_count,
    reconstruct_graph,
    validate_hypotheses,
)
from .verify import ACCEPTANCE, ORACLES, run_checks, summary_matrix
from .walks import build_walk_basis, overlap_table, universal_cover_ball, word_to_str

DECK_MANIFEST = "deck.json"


class UsageError(Exception):
    """Bad flags or unreadable input; exit code 2."""


# ---------------------------------------------------------------------------
# input and output


def load_graph(spec: str, inputs: dict) -> Multigraph:
    """Read a graph file, or a named graph written ``named:<name>``."""
    if spec.startswith("named:"):
        name = spec[len("named:"):]
        if name not in NAMED:
            raise UsageError(f"unknown named graph {name!r}; known: {', '.join(sorted(NAMED))}")
        inputs[spec] = "named"
        return named_graph(name)
    path = Path(spec)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {spec}: {exc.strerror}") from None
    inputs[spec] = hashlib.sha256(data).hexdigest()
    try:
        return parse_graph(data.decode("utf-8"))
    except GraphFormatError as exc:
        raise GraphFormatError(f"{spec}: {exc}", None) from None
    except UnicodeDecodeError:
        raise GraphFormatError(f"{spec}: not UTF-8 text", None) from None


def dump_report(report: dict, args, inputs: dict) -> str:
    body = {
        "tool": "graphrigidity",
        "version": __version__,
        "config": config_dict(args),
        "inputs": dict(sorted(inputs.items())),
        **report,
    }
    return json.dumps(body, sort_keys=True, indent=2, default=str) + "\n"


def config_dict(args) -> dict:
    skip = {"func"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def emit(text: str, args):
    if getattr(args, "output", None):
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_analyze(args, inputs) -> int:
    G = load_graph(args.graph, inputs)
    G.require_connected()
    out = {
        "n_vertices": G.n_vertices,
        "n_edges": G.n_edges,
        "betti": betti_number(G),
        "min_degree": G.min_degree(),
        "hypotheses": validate_hypotheses(G).as_dict(),
    }
    try:
        pf = pf_eigenpair(build_nb_matrix(G), tol=args.tol)
    except GraphRigidityError as exc:
        out["spectrum"] = {"error": str(exc)}
    else:
        out["spectrum"] = {
            "lambda": pf.lam,
            "dimension": math.log(pf.lam),
            "residual": pf.residual,
            "iterations": pf.iterations,
            "p": pf.as_dict(),
        }
    emit(dump_report({"analysis": out}, args, inputs), args)
    return 0


def _base_vertex(G: Multigraph, name):
    if name is None:
        return G.vertices[0]
    for x in G.vertices:
        if str(x) == name:
            return x
    raise UsageError(f"no vertex {name!r} in the graph")


def cmd_measure(args, inputs) -> int:
    G = load_graph(args.graph, inputs)
    v0 = _base_vertex(G, args.base)
    pf = pf_eigenpair(build_nb_matrix(G), tol=args.tol)
    table = build_measure_table(G, v0, bfs_spanning_tree(G, v0), args.depth, pf)
    if args.format == "csv":
        emit(table.to_csv(), args)
    else:
        rows = [
            {"word": word_to_str(w), "depth": len(w), "value": v}
            for w, v in sorted(table.values.items(), key=lambda t: (len(t[0]), [(abs(x), x < 0) for x in t[0]]))
        ]
        report = {
            "measure": {
                "base": str(v0),
                "lambda": pf.lam,
                "additivity_residual": table.additivity_residual(),
                "cylinders": rows,
            }
        }
        emit(dump_report(report, args, inputs), args)
    return 0


def cmd_compare(args, inputs) -> int:
    G = load_graph(args.first, inputs)
    H = load_graph(args.second, inputs)
    verdict = rigidity_compare(G, H, depth=args.depth)
    emit(dump_report({"comparison": verdict.as_dict()}, args, inputs), args)
    return 0


def _canonical_card(card: Multigraph) -> Multigraph:
    """Relabel a card by its canonical vertex order so the files carry no trace of the source labels."""
    rank = {x: i for i, x in enumerate(canonical_form(card).order)}
    pairs = sorted(tuple(sorted((rank[u], rank[v]))) for _, u, v in card.edges)
    return Multigraph(range(card.n_vertices), [(i, u, v) for i, (u, v) in enumerate(pairs)])


def cmd_deck(args, inputs) -> int:
    G = load_graph(args.graph, inputs)
    deck = edge_deck(G)
    out_dir = Path(args.out) if args.out else None
    classes = []
    for i, c in enumerate(deck.classes):
        card = _canonical_card(c.card)
        entry = {"file": f"card-{i:03d}.txt", "multiplicity": c.multiplicity}
        if out_dir is not None:
            out_dir.mkdir(parents=True, exist_ok=True)
            (out_dir / entry["file"]).write_text(
                format_graph(card, f"edge card class {i}, multiplicity {c.multiplicity}"), encoding="utf-8"
            )
        classes.append(entry)
    manifest = {"n_edges": G.n_edges, "n_vertices": G.n_vertices, "cards": classes}
    if out_dir is not None:
        (out_dir / DECK_MANIFEST).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    summary = {"classes": len(classes), "size": deck.size, "manifest": manifest}
    try:
        ctx = deck_context(deck)
        summary["context"] = ctx.as_dict()
        summary["cycle_counts"] = {str(r): kelly_count(deck, r) for r in range(2, deck.size)}
    except GraphRigidityError as exc:
        summary["context_error"] = str(exc)
    emit(dump_report({"deck": summary}, args, inputs), args)
    return 0


def read_deck(directory: str, inputs: dict):
    root = Path(directory)
    manifest_path = root / DECK_MANIFEST
    try:
        raw = manifest_path.read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {manifest_path}: {exc.strerror}") from None
    inputs[str(manifest_path)] = hashlib.sha256(raw).hexdigest()
    try:
        manifest = json.loads(raw)
        entries = [(e["file"], int(e["multiplicity"])) for e in manifest["cards"]]
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"{manifest_path}: malformed manifest ({exc})") from None
    cards = []
    for name, mult in entries:
        if mult < 1:
            raise UsageError(f"{manifest_path}: multiplicity of {name} must be positive")
        cards.append((load_graph(str(root / name), inputs), mult))
    return deck_from_cards(cards)


def cmd_reconstruct(args, inputs) -> int:
    deck = read_deck(args.deck, inputs)
    if args.hidden is None:
        ctx = deck_context(deck)
        report = {
            "reconstruction": {
                "success": False,
                "context": ctx.as_dict(),
                "error": "the overlap data s(gamma_0, gamma_i) must come from an oracle; pass --hidden",
            }
        }
        emit(dump_report(report, args, inputs), args)
        return 1
    hidden = load_graph(args.hidden, inputs)
    rep = reconstruct_graph(
        deck, HiddenGraphOracle(hidden), hidden=hidden, all_cards=args.all_cards,
        mode=args.mode, cap=args.cap, rule=args.rule,
    )
    emit(dump_report({"reconstruction": rep.as_dict()}, args, inputs), args)
    return 0 if rep.success else 1


def cmd_corpus_gen(args, inputs) -> int:
    graphs = corpus_gen(args.max_edges)
    out_dir = Path(args.out) if args.out else None
    rows = []
    for i, G in enumerate(graphs):
        name = f"corpus-{i:03d}"
        text = format_graph(G, name)
        if out_dir is not None:
            out_dir.mkdir(parents=True, exist_ok=True)
            (out_dir / f"{name}.txt").write_text(text, encoding="utf-8")
        rows.append({
            "name": name,
            "n_vertices": G.n_vertices,
            "n_edges": G.n_edges,
            "betti": betti_number(G),
            "min_degree": G.min_degree(),
            "graph": text,
        })
    emit(dump_report({"corpus": {"count": len(rows), "graphs": rows}}, args, inputs), args)
    return 0


def _parse_selection(text: str | None):
    """``--only 1,2,oracles`` -> (acceptance keys, oracle keys)."""
    if text is None:
        return None, None
    acc, orc = [], []
    for item in text.split(","):
        item = item.strip()
        if item == "oracles":
            orc.extend(ORACLES)
        elif item == "acceptance":
            acc.extend(ACCEPTANCE)
        elif item in ORACLES:
            orc.append(item)
        elif item.isdigit() and int(item) in ACCEPTANCE:
            acc.append(int(item))
        else:
            raise UsageError(f"unknown check {item!r}; use 1-10, oracle names {sorted(ORACLES)}, 'oracles' or 'acceptance'")
    return acc, orc


def cmd_verify(args, inputs) -> int:
    acc, orc = _parse_selection(args.only)
    results = run_checks(args.max_edges, args.seed, acceptance=acc, oracles=orc)
    for r in results:
        print(r.line(), file=sys.stderr)
    print(summary_matrix(results), file=sys.stderr)
    report = {"checks": [r.as_dict() for r in results], "all_passed": all(r.passed for r in results)}
    emit(dump_report(report, args, inputs), args)
    return 0 if report["all_passed"] else 1


def cmd_cover(args, inputs) -> int:
    G = load_graph(args.graph, inputs)
    v0 = _base_vertex(G, args.base)
    R = args.radius if args.radius is not None else max(6, min_eigen_radius(G, v0))
    pf = pf_eigenpair(build_nb_matrix(G), tol=args.tol)
    ball = universal_cover_ball(G, v0, R)
    need = min_eigen_radius(G, v0)
    out = {"base": str(v0), "radius": R, "nodes": ball.size, "lambda": pf.lam}
    if R >= need:
        rel = check_eigen_relation(G, v0, R, pf)
        out["eigen_relation"] = {"residual": rel.residual, "relative_residual": rel.relative_residual}
    else:
        out["eigen_relation"] = {"error": f"radius must be at least {need}"}
    conf = conformality_check(G, v0, R, samples=args.samples, seed=args.seed, pf=pf, ball=ball)
    out["conformality"] = {
        "samples": conf.samples,
        "busemann_exact": conf.busemann_exact,
        "max_ratio_error": conf.max_ratio_error,
        "passed": conf.passed,
    }
    emit(dump_report({"cover": out}, args, inputs), args)
    return 0


def cmd_basis(args, inputs) -> int:
    G = load_graph(args.graph, inputs)
    v0 = _base_vertex(G, args.base)
    basis = build_walk_basis(G, v0, bfs_spanning_tree(G, v0))
    overlaps = overlap_table(basis)
    out = {
        "base": str(v0),
        "tree": sorted((str(e) for e in basis.tree), key=sort_key),
        "generators": [
            {"letter": i, "edge": oe.key, "length": len(g), "walk": [x.key for x in g]}
            for i, (oe, g) in enumerate(zip(basis.edges, basis.generators), start=1)
        ],
        "overlaps": {f"{x},{y}": s for (x, y), s in sorted(overlaps.items())},
    }
    emit(dump_report({"basis": out}, args, inputs), args)
    return 0


# ---------------------------------------------------------------------------
# parser


def _positive_float(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not x > 0 or not math.isfinite(x):
        raise argparse.ArgumentTypeError("must be positive")
    return x


def _at_least(n: int):
    def parse(text: str) -> int:
        try:
            x = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
        if x < n:
            raise argparse.ArgumentTypeError(f"must be >= {n}")
        return x

    return parse


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=_positive_float, default=DEFAULT_TOL, help="power-iteration residual tolerance")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled and relabelled checks")
    common.add_argument("--format", choices=("json", "csv"), default=None, help="csv for measure (its default), json elsewhere")
    common.add_argument("-o", "--output", help="write the report here instead of stdout")

    ap = argparse.ArgumentParser(
        prog="graphrigidity",
        description="Non-backtracking spectra, boundary measures and edge reconstruction of small multigraphs.",
    )
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    graph_help = "graph file (v/e line format) or named:<K4|K33|theta|...>"

    p = sub.add_parser("analyze", parents=[common], help="lambda, dimension, Betti number, hypothesis check")
    p.add_argument("graph", help=graph_help)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("measure", parents=[common], help="cylinder measure table")
    p.add_argument("graph", help=graph_help)
    p.add_argument("--depth", type=_at_least(1), default=3)
    p.add_argument("--base", help="base vertex (default: first declared)")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("compare", parents=[common], help="rigidity verdict for two graphs")
    p.add_argument("first", help=graph_help)
    p.add_argument("second", help=graph_help)
    p.add_argument("--depth", type=_at_least(1), default=3)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("deck", parents=[common], help="edge deck: card files and class multiplicities")
    p.add_argument("graph", help=graph_help)
    p.add_argument("--out", help="directory for card files and deck.json")
    p.set_defaults(func=cmd_deck)

    p = sub.add_parser("reconstruct", parents=[common], help="rebuild a graph from its deck")
    p.add_argument("--deck", required=True, help="directory with deck.json and card files")
    p.add_argument("--hidden", help="hidden graph supplying the overlap oracle")
    p.add_argument("--rule", choices=RULES, default="direct")
    p.add_argument("--mode", choices=MODES, default="forward")
    p.add_argument("--cap", type=_at_least(2), default=None, help="D search bound (default l0 + 2 max|gen| + |V|)")
    p.add_argument("--all-cards", action="store_true", help="run every eligible card class")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("corpus-gen", parents=[common], help="all hypothesis-passing multigraphs up to N edges")
    p.add_argument("--max-edges", type=_at_least(1), required=True)
    p.add_argument("--out", help="also write one graph file per corpus member here")
    p.set_defaults(func=cmd_corpus_gen)

    p = sub.add_parser("verify", parents=[common], help="brute-force oracle suites and acceptance checks")
    p.add_argument("--max-edges", type=_at_least(2), default=8)
    p.add_argument("--only", help="comma list: 1-10, oracle names, 'oracles', 'acceptance'")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("cover", parents=[common], help="universal cover ball: eigen relation and conformality")
    p.add_argument("graph", help=graph_help)
    p.add_argument("--radius", type=_at_least(2), default=None)
    p.add_argument("--base", help="base vertex (default: first declared)")
    p.add_argument("--samples", type=_at_least(1), default=8)
    p.set_defaults(func=cmd_cover)

    p = sub.add_parser("basis", parents=[common], help="tree-path generators and their overlaps")
    p.add_argument("graph", help=graph_help)
    p.add_argument("--base", help="base vertex (default: first declared)")
    p.set_defaults(func=cmd_basis)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = "csv" if args.func is cmd_measure else "json"
    elif args.format == "csv" and args.func is not cmd_measure:
        parser.error("--format csv is only available for measure")
    inputs: dict = {}
    try:
        return args.func(args, inputs)
    except UsageError as exc:
        print(f"graphrigidity: error: {exc}", file=sys.stderr)
        return 2
    except GraphFormatError as exc:
        print(f"graphrigidity: format error: {exc}", file=sys.stderr)
        return 2
    except GraphRigidityError as exc:
        print(f"graphrigidity: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
