"""Command-line entry point: ``wlign <command> <action> [options]``.

Exit codes: 0 success (certify: all PASS), 1 certify FAIL, 2 certify SKIP only,
64 usage error, 74 unreadable or invalid input / unwritable output, 70 internal error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import traceback
from pathlib import Path

from . import certify, ign, logic
from .graphs import CORPUS_NAMES, GraphFormatError, corpus, dump_graph, load_graph
from .jsonio import emit_report
from .patterns import basis_descriptor, enumerate_patterns
from .wl import first_distinguishing_round, joint_stable_round, wl_equivalent_at, wl_pair, wl_run

EX_USAGE, EX_SOFTWARE, EX_IOERR = 64, 70, 74


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")


def _int_list(text: str) -> list:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _global_options(parser, suppress: bool):
    def default(value):
        return argparse.SUPPRESS if suppress else value

    parser.add_argument("--mode", choices=ign.MODES, default=default(ign.RATIONAL),
                        help="numeric mode for IGN evaluation")
    parser.add_argument("--jobs", type=int, default=default(os.cpu_count() or 1),
                        help="worker processes for per-model loops")
    parser.add_argument("--seed", type=int, default=default(7), help="random seed")
    parser.add_argument("--out", default=default(None), help="output path (default: stdout)")
    parser.add_argument("--timing", action="store_true", default=default(False),
                        help="include wall-clock time in certification reports")


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    root = _Parser(prog="wlign", description="Weisfeiler-Leman, invariant graph networks and C^k logic.",
                   formatter_class=fmt)
    _global_options(root, suppress=False)
    common = _Parser(add_help=False)
    _global_options(common, suppress=True)
    cmds = root.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def leaf(group, name, help_text):
        return group.add_parser(name, help=help_text, parents=[common], formatter_class=fmt)

    c = cmds.add_parser("corpus", help="named test pairs").add_subparsers(dest="action", required=True,
                                                                          parser_class=_Parser)
    leaf(c, "list", "list pair names")
    p = leaf(c, "emit", "write both graphs of a pair as JSON")
    p.add_argument("name", choices=CORPUS_NAMES)
    p.add_argument("--out-dir", required=True, help="directory for g.json and h.json")

    w = cmds.add_parser("wl", help="k-WL refinement").add_subparsers(dest="action", required=True,
                                                                     parser_class=_Parser)
    p = leaf(w, "run", "refine one graph and write its history")
    p.add_argument("--graph", required=True)
    p.add_argument("-k", type=int, required=True)
    p.add_argument("--rounds", type=int, default=None, help="round cap (default n^k)")
    p = leaf(w, "distinguish", "compare two graphs round by round")
    p.add_argument("--g", required=True)
    p.add_argument("--h", required=True)
    p.add_argument("-k", type=int, required=True)
    p.add_argument("--rounds", type=int, default=None, help="report at least this many rounds")

    pt = cmds.add_parser("patterns", help="equality patterns").add_subparsers(dest="action", required=True,
                                                                             parser_class=_Parser)
    p = leaf(pt, "enum", "list patterns in canonical id order")
    p.add_argument("--arity", type=int, required=True)
    p.add_argument("-k", type=int, default=None, help="annotate class kinds (default arity/2 when even)")

    i = cmds.add_parser("ign", help="invariant graph networks").add_subparsers(dest="action", required=True,
                                                                              parser_class=_Parser)
    p = leaf(i, "sample", "write a seeded random model")
    p.add_argument("-k", type=int, required=True)
    p.add_argument("--channels", type=_int_list, required=True, help="s0,s1,...,sd")
    p.add_argument("--invariant-dim", type=int, default=None)
    p.add_argument("--mlp", type=_int_list, default=[4, 2], help="MLP widths")
    p.add_argument("--activation", default="relu", choices=ign.FLOAT_ACTIVATIONS)
    p = leaf(i, "run", "evaluate a model on a graph")
    p.add_argument("--model", required=True)
    p.add_argument("--graph", required=True)
    p.add_argument("--with", dest="partner", default=None,
                   help="second graph sharing the channel palette")
    p.add_argument("--trunc", type=int, default=None, help="emit F^(t) rows instead of the output")
    p = leaf(i, "distinguish", "compare two graphs under a model")
    p.add_argument("--model", required=True)
    p.add_argument("--g", required=True)
    p.add_argument("--h", required=True)

    lg = cmds.add_parser("logic", help="counting logic C^k").add_subparsers(dest="action", required=True,
                                                                           parser_class=_Parser)
    p = leaf(lg, "eval", "evaluate a formula")
    p.add_argument("--graph", required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--formula", help="file holding an s-expression")
    src.add_argument("--expr", help="s-expression given inline")
    p.add_argument("--assign", default="", help='e.g. "x1=0,x2=3"')
    p.add_argument("-k", type=int, default=None, help="reject variables beyond x_k")
    p = leaf(lg, "agree", "evaluate sampled sentences on two graphs")
    p.add_argument("--g", required=True)
    p.add_argument("--h", required=True)
    p.add_argument("-k", type=int, required=True)
    p.add_argument("--qr", type=int, required=True)
    p.add_argument("--samples", type=int, default=500)

    ce = cmds.add_parser("certify", help="certification suites").add_subparsers(dest="action", required=True,
                                                                               parser_class=_Parser)
    p = leaf(ce, "run", "run a suite on a graph pair")
    p.add_argument("--suite", choices=certify.SUITES, default="all")
    p.add_argument("--g", required=True)
    p.add_argument("--h", required=True)
    p.add_argument("-k", type=int, required=True)
    p.add_argument("--models", type=int, default=20)
    p.add_argument("--m-max", type=int, default=3, help="Key Lemma multiples m = 1..m_max")
    p.add_argument("--n-max", type=int, default=None, help="universe bound for pattern sweeps")
    return root


# -- helpers ---------------------------------------------------------------------------

def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _graph(path: str):
    try:
        return load_graph(_read(path))
    except GraphFormatError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _model(path: str) -> ign.IgnModel:
    try:
        return ign.model_from_dict(json.loads(_read(path)))
    except (json.JSONDecodeError, UnicodeDecodeError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def _emit(args, payload) -> None:
    data = emit_report(payload) + b"\n"
    if args.out is None:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
        return
    try:
        Path(args.out).write_bytes(data)
    except OSError as exc:
        raise InputError(f"cannot write {args.out}: {exc.strerror or exc}") from exc


def _positive(name, value, minimum=1):
    if value is not None and value < minimum:
        raise UsageError(f"{name} must be >= {minimum}")


# -- commands ----------------------------------------------------------------------------

def cmd_corpus(args) -> int:
    if args.action == "list":
        _emit(args, {"pairs": list(CORPUS_NAMES)})
        return 0
    g, h = corpus(args.name)
    out = Path(args.out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        (out / "g.json").write_text(dump_graph(g) + "\n")
        (out / "h.json").write_text(dump_graph(h) + "\n")
    except OSError as exc:
        raise InputError(f"cannot write to {out}: {exc.strerror or exc}") from exc
    _emit(args, {"name": args.name, "g": str(out / "g.json"), "h": str(out / "h.json")})
    return 0


def cmd_wl(args) -> int:
    _positive("-k", args.k, 2)
    _positive("--rounds", args.rounds, 0)
    if args.action == "run":
        _emit(args, wl_run(_graph(args.graph), args.k, args.rounds))
        return 0
    g, h = _graph(args.g), _graph(args.h)
    hg, hh = wl_pair(g, h, args.k)
    if g.n == h.n:
        last = joint_stable_round((hg, hh))
    else:
        last = max(hg.stable_round or 0, hh.stable_round or 0)
    if args.rounds is not None:
        last = max(last, args.rounds)
    _emit(args, {
        "k": args.k,
        "equivalent_at": [wl_equivalent_at((hg, hh), t) for t in range(last + 1)],
        "stable_round_g": hg.stable_round,
        "stable_round_h": hh.stable_round,
        "first_distinguishing_round": first_distinguishing_round((hg, hh)),
    })
    return 0


def cmd_patterns(args) -> int:
    _positive("--arity", args.arity)
    k = args.k if args.k is not None else (args.arity // 2 if args.arity % 2 == 0 else None)
    pats = enumerate_patterns(args.arity)
    _emit(args, {"arity": args.arity, "k": k, "count": len(pats),
                 "patterns": [basis_descriptor(p, k if k is not None else 0) for p in pats]})
    return 0


def _encode_for(model, g, partner):
    if model.k < 2:
        raise UsageError("model order must be >= 2")
    if partner is not None:
        return ign.encode_pair(g, partner, model.k)[0]
    return ign.encode(g, model.k)


def cmd_ign(args) -> int:
    if args.action == "sample":
        _positive("-k", args.k, 2)
        if not args.channels or any(c < 1 for c in args.channels):
            raise UsageError("--channels needs positive widths s0,...,sd")
        model = ign.sample_model(args.k, len(args.channels) - 1, args.channels, args.seed, args.mode,
                                 args.invariant_dim, args.mlp, args.activation)
        _emit(args, ign.model_to_dict(model))
        return 0
    model = _model(args.model)
    if args.action == "run":
        g = _graph(args.graph)
        partner = _graph(args.partner) if args.partner else None
        a = _encode_for(model, g, partner)
        if a.channels != model.in_channels:
            raise InputError(f"graph encodes to {a.channels} channels, model expects {model.in_channels}; "
                             "pass --with to share a palette")
        if args.trunc is not None:
            if not 0 <= args.trunc <= model.depth:
                raise UsageError(f"--trunc must lie in 0..{model.depth}")
            _emit(args, ign.forward_trunc(model, a, args.trunc))
        else:
            _emit(args, {"output": list(ign.forward(model, a))})
        return 0
    g, h = _graph(args.g), _graph(args.h)
    if g.n != h.n:
        raise InputError("IGN comparison needs graphs with equal vertex counts")
    ag, ah = ign.encode_pair(g, h, model.k)
    if ag.channels != model.in_channels:
        raise InputError(f"pair encodes to {ag.channels} channels, model expects {model.in_channels}")
    truncs_g, out_g = ign.forward_all(model, ag)
    truncs_h, out_h = ign.forward_all(model, ah)
    _emit(args, {
        "equivalent_at": [ign.row_multiset(a) == ign.row_multiset(b) for a, b in zip(truncs_g, truncs_h)],
        "equal_output": out_g == out_h,
        "output_g": list(out_g),
        "output_h": list(out_h),
    })
    return 0


def cmd_logic(args) -> int:
    if args.action == "eval":
        g = _graph(args.graph)
        text = args.expr if args.expr is not None else _read(args.formula).decode("utf-8", "replace")
        try:
            phi = logic.parse_formula(text)
            value = logic.evaluate(g, phi, logic.parse_assignment(args.assign), args.k)
        except logic.FormulaError as exc:
            raise InputError(str(exc)) from exc
        _emit(args, {"formula": logic.format_formula(phi), "value": value, "qr": phi.qr,
                     "free": sorted(phi.free)})
        return 0
    _positive("-k", args.k)
    _positive("--qr", args.qr, 0)
    _positive("--samples", args.samples, 0)
    g, h = _graph(args.g), _graph(args.h)
    alphabet = sorted(set(g.colours) | set(h.colours))
    sentences = [logic.sample_sentence(args.k, args.qr, alphabet, args.seed * 100003 + i)
                 for i in range(args.samples)]
    _emit(args, dict(logic.agree_on((g, h), sentences), k=args.k, seed=args.seed))
    return 0


def cmd_certify(args) -> int:
    _positive("-k", args.k, 2)
    _positive("--models", args.models, 0)
    _positive("--m-max", args.m_max)
    _positive("--jobs", args.jobs)
    if args.mode != ign.RATIONAL:
        raise UsageError("certification runs in rational mode only")
    g, h = _graph(args.g), _graph(args.h)
    report = certify.run_suite(args.suite, g, h, args.k, models=args.models, seed=args.seed,
                               jobs=args.jobs, m_max=args.m_max, n_max=args.n_max, timing=args.timing)
    _emit(args, report)
    return certify.exit_code(report)


COMMANDS = {"corpus": cmd_corpus, "wl": cmd_wl, "patterns": cmd_patterns, "ign": cmd_ign,
            "logic": cmd_logic, "certify": cmd_certify}


def dispatch(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        sys.stderr.write(str(exc).rstrip() + "\n")
        return EX_USAGE
    except InputError as exc:
        sys.stderr.write(f"wlign: {exc}\n")
        return EX_IOERR
    except SystemExit as exc:  # --help
        return exc.code if isinstance(exc.code, int) else 0
    except Exception as exc:  # noqa: BLE001
        sys.stderr.write(f"wlign: internal error: {exc!r}\n")
        traceback.print_exc(file=sys.stderr)
        return EX_SOFTWARE


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
