"""Command-line front end.

Exit codes: 0 yes or done, 2 decided no, 3 input or usage error, 4 resource
limit. Every drawing written by a subcommand is recounted before it leaves.
"""

from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path
from typing import Sequence

from .brute import DEFAULT_NODE_LIMIT, ResourceLimitError, UnsatisfiableConstraints, branch_and_bound, brute_min, solve3_exact
from .core import (
    Drawing,
    Instance,
    InvariantError,
    LayeredGraph,
    ParseError,
    check_drawing,
    count_crossings,
    decode_constraints,
    decode_drawing,
    decode_instance,
    encode_drawing,
    encode_instance,
)

EXIT_YES = 0
EXIT_NO = 2
EXIT_INPUT = 3
EXIT_LIMIT = 4

FAMILIES = ("z", "zhat", "u", "uhat", "f", "c", "s", "shat", "r", "rhat", "nokern4", "eth5", "df-random")
ALGORITHMS = ("brute", "bnb", "subexp2", "exact3")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ------------------------------------------------------------------ SVG

X_STEP = 60
Y_STEP = 80
RADIUS = 6
MARGIN = 30


def svg_text(graph: LayeredGraph, drawing: Drawing) -> str:
    """Straight-line rendering; layer ``i``, position ``j`` sits at
    ``(60 j, 80 (h - i))``."""
    check_drawing(graph, drawing)
    h = graph.h
    pos = drawing.positions()
    xy = {v: (X_STEP * pos[v], Y_STEP * (h - graph.layer(v))) for v in graph.vertices()}
    total = count_crossings(graph, drawing).total
    widest = max((len(o) for o in drawing.orders), default=1)
    width = X_STEP * max(widest - 1, 0) + 2 * MARGIN
    height = Y_STEP * (h - 1) + 2 * MARGIN + 20
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="{-MARGIN} {-MARGIN} {width} {height}">',
        '<g stroke="black" stroke-width="1">',
    ]
    for u, v, mult in graph.edges:
        (x1, y1), (x2, y2) = xy[u], xy[v]
        extra = f' stroke-width="{mult}"' if mult > 1 else ""
        out.append(f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}"{extra}/>')
    out.append("</g>")
    out.append('<g fill="white" stroke="black">')
    for v in graph.vertices():
        x, y = xy[v]
        out.append(f'<circle cx="{x}" cy="{y}" r="{RADIUS}"><title>{v}</title></circle>')
    out.append("</g>")
    out.append(f'<text x="0" y="{Y_STEP * (h - 1) + MARGIN}" font-family="monospace" font-size="12">'
               f"crossings: {total}</text>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_svg(graph: LayeredGraph, drawing: Drawing, path) -> None:
    Path(path).write_bytes(svg_text(graph, drawing).encode("utf-8"))


# -------------------------------------------------------------- helpers


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _instance(path: str) -> Instance:
    return decode_instance(_read(path))


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _emit_drawing(graph: LayeredGraph, drawing: Drawing, expected: int | None, path: str | None) -> None:
    check_drawing(graph, drawing)
    if expected is not None and count_crossings(graph, drawing).total != expected:
        raise InvariantError("emitted drawing does not recount to the reported value")
    _emit(encode_drawing(drawing), path)


def _budget(args, inst: Instance) -> int:
    k = inst.k if args.k is None else args.k
    if k < 0:
        raise UsageError("-k must be non-negative")
    return k


# ---------------------------------------------------------- subcommands


def cmd_count(args) -> int:
    inst = _instance(args.graph)
    drawing = decode_drawing(_read(args.drawing))
    check_drawing(inst.graph, drawing)
    report = count_crossings(inst.graph, drawing)
    print(f"crossings: {report.total}")
    print("per gap: " + " ".join(map(str, report.per_gap)))
    return EXIT_YES


def cmd_verify(args) -> int:
    inst = _instance(args.graph)
    drawing = decode_drawing(_read(args.drawing))
    check_drawing(inst.graph, drawing)
    k = _budget(args, inst)
    total = count_crossings(inst.graph, drawing).total
    ok = total <= k
    print(f"{'ok' if ok else 'over budget'}: {total} crossings, budget {k}")
    return EXIT_YES if ok else EXIT_NO


def cmd_planar(args) -> int:
    from .planarity import OrderConstraints, crossing_free_with_orders

    inst = _instance(args.graph)
    graph = inst.graph
    cons = OrderConstraints.empty()
    if args.constraints:
        cons = decode_constraints(_read(args.constraints), graph.h)
    drawing = crossing_free_with_orders(graph, cons)
    if drawing is None:
        print("no")
        return EXIT_NO
    print("yes", file=sys.stderr)
    _emit_drawing(graph, drawing, 0, args.output)
    return EXIT_YES


def cmd_kernel(args) -> int:
    from .graphs import WorkGraph
    from .kernel2 import Decided, kernelize2
    from .kernel3 import kernelize3

    inst = _instance(args.graph)
    if args.k is not None:
        inst = Instance(inst.graph, _budget(args, inst))
    if inst.graph.h != args.layers:
        raise UsageError(f"--layers {args.layers} given for a {inst.graph.h}-layer graph")
    if args.layers == 2:
        if args.mode != "scheduled":
            raise UsageError("--mode applies to the 3-layer kernel only")
        if not WorkGraph.from_layered(inst.graph).is_connected():
            raise UsageError("the 2-layer kernel needs a connected graph; split components first")
        result = kernelize2(inst)
    else:
        result = kernelize3(inst, args.mode)
    if result is Decided.YES:
        print("yes")
        return EXIT_YES
    if result is Decided.NO:
        print("no")
        return EXIT_NO
    if args.trace:
        lines = [f"{app.rule} deleted={list(app.deleted)} added={list(app.added)} locus={list(app.locus)}"
                 for app in result.trace]
        lines.append("map " + " ".join(map(str, result.vertex_map)))
        Path(args.trace).write_text("\n".join(lines) + "\n", encoding="utf-8")
    g = result.instance.graph
    print(f"kernel: {g.n} vertices, {g.m} edges, k={result.instance.k}", file=sys.stderr)
    _emit(encode_instance(result.instance), args.output)
    return EXIT_YES


def cmd_solve(args) -> int:
    inst = _instance(args.graph)
    k = _budget(args, inst)
    graph = inst.graph
    if args.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    if args.alg == "brute":
        best, drawing = brute_min(graph, cap=k)
        found = (best, drawing) if best <= k else None
    elif args.alg == "bnb":
        found = branch_and_bound(graph, k, args.node_limit)
    elif args.alg == "subexp2":
        from .subexp2 import Config, solve2_min

        if graph.h != 2:
            raise UsageError("subexp2 solves 2-layer instances")
        found = solve2_min(Instance(graph, k), Config(node_limit=args.node_limit))
    else:
        if graph.h != 3:
            raise UsageError("exact3 solves 3-layer instances")
        found = solve3_exact(Instance(graph, k), args.node_limit)
    if found is None:
        print("no")
        return EXIT_NO
    best, drawing = found
    print(f"yes {best}", file=sys.stderr)
    _emit_drawing(graph, drawing, best, args.output)
    return EXIT_YES


def _df_from(args):
    from .gadgets import DFInstance

    if args.string is None or args.k is None:
        raise UsageError(f"family {args.family} needs --string and --k")
    return DFInstance(args.string, args.k)


def _random_string(k: int, length: int, seed: int) -> str:
    rng = random.Random(seed)
    letters = "abcdefghijklmnopqrstuvwxyz"[:k]
    return "".join(rng.choice(letters) for _ in range(length))


def cmd_gen(args) -> int:
    from . import gadgets as gd

    fam = args.family
    if fam == "df-random":
        if args.seed is None:
            raise UsageError("df-random needs --seed")
        if args.k is None:
            raise UsageError("df-random needs --k")
        length = args.length if args.length is not None else 2 * args.k + 2
        args.string = _random_string(args.k, length, args.seed)
    if args.k is None:
        raise UsageError(f"family {fam} needs --k")
    params = gd.GadgetParams.make(args.k, args.p)
    notes = [f"c family {fam} k {args.k} p {params.p}"]
    budget = 0
    if fam in ("z", "zhat", "u", "uhat", "f", "c"):
        kind = {"z": "Z", "zhat": "Zhat", "u": "U", "uhat": "Uhat", "f": "F", "c": "C"}[fam]
        gadget = gd.build_gadget(kind, params)
        graph, drawing = gadget.graph, gadget.drawing
    elif fam in ("s", "shat"):
        if not 1 <= args.symbol <= args.k:
            raise UsageError("--symbol must lie in 1..k")
        gadget = (gd.build_S if fam == "s" else gd.build_Shat)(args.symbol, params)
        graph, drawing = gadget.graph, gadget.drawing
        notes.append(f"c symbol {args.symbol}")
    elif fam in ("r", "rhat"):
        gadget = gd.build_R(_df_from(args), params) if fam == "r" else gd.build_Rhat(params)
        graph, drawing = gadget.graph, gadget.drawing
    else:
        df = _df_from(args)
        notes.append(f"c string {df.s}")
        witness = gd.df_solve(df)
        build = gd.build_nokern4 if fam == "nokern4" else gd.build_eth5
        inst, drawing = build(df, params, witness)
        graph, budget = inst.graph, inst.k
        notes.append("c disjoint factors: " + ("yes" if witness is not None else "no"))
    text = "\n".join(notes) + "\n" + encode_instance(Instance(graph, budget))
    _emit(text, args.output)
    if args.ord is not None:
        if drawing is None:
            print("no companion drawing: the string has no disjoint factors", file=sys.stderr)
        else:
            _emit_drawing(graph, drawing, None, args.ord)
            print(f"companion drawing: {count_crossings(graph, drawing).total} crossings", file=sys.stderr)
    return EXIT_YES


def cmd_df(args) -> int:
    from .gadgets import DFInstance, df_solve

    witness = df_solve(DFInstance(args.string, args.k))
    if witness is None:
        print("no")
        return EXIT_NO
    print("yes " + " ".join(args.string[a - 1:b] for a, b in witness))
    print(" ".join(f"{a}-{b}" for a, b in witness))
    return EXIT_YES


def cmd_render(args) -> int:
    inst = _instance(args.graph)
    if args.drawing:
        drawing = decode_drawing(_read(args.drawing))
    else:
        drawing = Drawing.of(inst.graph.layers())
    render_svg(inst.graph, drawing, args.output)
    return EXIT_YES


# --------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="layercross", description="Layered crossing minimisation toolkit.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("count", help="count the crossings of a drawing")
    p.add_argument("graph")
    p.add_argument("drawing")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("verify", help="check a drawing against a crossing budget")
    p.add_argument("graph")
    p.add_argument("drawing")
    p.add_argument("-k", type=int, help="budget (default: the k of the .lgr header)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("planar", help="crossing-free drawing under optional order constraints")
    p.add_argument("graph")
    p.add_argument("--constraints")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_planar)

    p = sub.add_parser("kernel", help="apply a kernelization")
    p.add_argument("graph")
    p.add_argument("--layers", type=int, choices=(2, 3), required=True)
    p.add_argument("--mode", choices=("scheduled", "fixpoint"), default="scheduled")
    p.add_argument("--trace")
    p.add_argument("-k", type=int)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("solve", help="decide whether k crossings suffice")
    p.add_argument("graph")
    p.add_argument("--alg", choices=ALGORITHMS, default="brute")
    p.add_argument("-k", type=int)
    p.add_argument("-o", "--output")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--node-limit", type=int, default=DEFAULT_NODE_LIMIT)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("gen", help="generate a gadget or lower-bound instance")
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--p", type=int)
    p.add_argument("--string")
    p.add_argument("--symbol", type=int, default=1)
    p.add_argument("--length", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("-o", "--output")
    p.add_argument("--ord")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("df", help="solve Disjoint Factors")
    p.add_argument("--string", required=True)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_df)

    p = sub.add_parser("render", help="write an SVG of a drawing")
    p.add_argument("graph")
    p.add_argument("drawing", nargs="?")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_render)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
    except (ParseError, InvariantError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
    except UnsatisfiableConstraints as exc:
        print(f"no: {exc}")
        return EXIT_NO
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except OSError as exc:
        print(f"input error: {exc}", file=sys.stderr)
    return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
