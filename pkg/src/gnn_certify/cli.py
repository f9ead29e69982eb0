"""Command-line front end.

Exit codes: 0 success, 1 validation failed, 2 usage/parse error,
3 domain error, 4 resource limit.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

import numpy as np

from . import bounds, gaussmath, localize, recursion, reports, simulate, tables, validate
from .activations import make_activation, parse_activation
from .errors import CertifyError, DomainError, ResourceLimitError
from .recursion import Architecture

EXIT_VALIDATION_FAILED = 1
EXIT_USAGE = 2

# builtin defaults applied after the config file; flags default to None so
# that "not given" is distinguishable from "given the default value"
DEFAULTS = {
    "activation": "relu",
    "cb": 1.0,
    "cw": 1.0,
    "input": "0,0,0,0",
    "widths": "100",
    "nout": 1,
    "metric": "all",
    "format": "json",
    "seed": 42,
    "samples": 100_000,
    "workers": 1,
    "method": "weights",
}
COMMAND_DEFAULTS = {
    "table": {"format": "csv"},
    "compare": {"activation": "monomial:3", "input": "1", "widths": "1"},
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(p: argparse.ArgumentParser, net: bool = True) -> None:
    p.add_argument("--config", help="JSON file whose keys mirror the long flags")
    p.add_argument("--format", choices=("json", "csv", "text"))
    p.add_argument("--output", "-o", help="write to this file instead of stdout")
    p.add_argument("--quad-nodes", type=int, dest="quad_nodes", help="initial quadrature node count")
    if not net:
        return
    p.add_argument("--activation", help="relu, perceptron, sigmoid, tanh, sine, softplus, swish, "
                   "sqrt_relu, monomial:K, constant:C, or custom (with --base)")
    p.add_argument("--base", help="catalog function for --activation custom")
    p.add_argument("--lip", type=float)
    p.add_argument("--lip-sq", type=float, dest="lip_sq")
    p.add_argument("--growth", help="r1,r2,gamma")
    p.add_argument("--cb", type=float, help="bias variance C_b")
    p.add_argument("--cw", type=float, help="weight variance scale C_W")
    p.add_argument("--input", help="comma-separated input vector")
    p.add_argument("--input-file", dest="input_file", help="file with the input vector")
    p.add_argument("--widths", help="hidden widths n_1,...,n_L")
    p.add_argument("--nout", type=int, help="output width")


def _sampling(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--workers", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gnn-certify", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("bound", help="certified distance bounds")
    p.add_argument("mode", choices=("shallow", "deep"))
    p.add_argument("--metric", choices=("all",) + bounds.METRICS)
    _common(p)

    p = sub.add_parser("localize", help="certified probability of a rectangle")
    p.add_argument("--rect", required=True, help='"lo:hi,lo:hi,..." (inf / -inf allowed)')
    p.add_argument("--mode", choices=localize.MODES)
    _common(p)

    p = sub.add_parser("simulate", help="Monte-Carlo draws of the network output")
    p.add_argument("--layer", type=int, help="sample the collective observable of this hidden layer instead")
    p.add_argument("--method", choices=("weights", "conditional"))
    p.add_argument("--export-bin", dest="export_bin")
    p.add_argument("--export-csv", dest="export_csv")
    _common(p)
    _sampling(p)

    p = sub.add_parser("validate", help="check bound dominance against Monte Carlo")
    p.add_argument("--preset", choices=sorted(validate.PRESETS))
    _common(p)
    _sampling(p)

    p = sub.add_parser("table", help="reproduce a parameter-sweep table")
    p.add_argument("--id", type=int, required=True, choices=(1, 2, 3, 4), dest="table_id")
    p.add_argument("--table2-normalized", action="store_true", dest="table2_normalized", default=None)
    _common(p, net=False)

    p = sub.add_parser("compare", help="BFF comparison constants vs the Stein shallow constants")
    _common(p)
    return parser


def _load_config(path: Optional[str]) -> dict:
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise UsageError("config file must hold a JSON object")
    return {k.replace("-", "_"): v for k, v in cfg.items()}


def _merge(args: argparse.Namespace) -> argparse.Namespace:
    cfg = _load_config(args.config)
    known = vars(args)
    for key, val in cfg.items():
        if key not in known:
            raise UsageError(f"unknown config key {key!r}")
        if known[key] is None:
            setattr(args, key, val)
    defaults = dict(DEFAULTS, **COMMAND_DEFAULTS.get(args.command, {}))
    for key, val in defaults.items():
        if getattr(args, key, "absent") is None:
            setattr(args, key, val)
    return args


def _floats(text, what: str) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    try:
        return [float(v) for v in str(text).replace(";", ",").split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"bad {what}: {text!r}") from None


def _activation(args):
    if args.activation == "custom":
        growth = _floats(args.growth, "growth") if args.growth is not None else None
        return make_activation("custom", base=args.base, lip=args.lip, lip_sq=args.lip_sq, growth=growth)
    return parse_activation(args.activation)


def _network(args, n_out_default: Optional[int] = None):
    act = _activation(args)
    if args.input_file:
        try:
            with open(args.input_file, encoding="utf-8") as fh:
                x = _floats(fh.read().replace("\n", ","), "input file")
        except OSError as exc:
            raise UsageError(str(exc)) from None
    else:
        x = _floats(args.input, "input")
    hidden = [int(w) for w in _floats(args.widths, "widths")]
    n_out = args.nout if n_out_default is None else n_out_default
    arch = Architecture(len(x), tuple(hidden), int(n_out), float(args.cb), float(args.cw))
    return act, arch, tuple(x)


def _config_record(act, arch, x) -> dict:
    return {"activation": act.describe(), "architecture": arch.to_dict(), "input": list(x)}


def _emit(text: str, args) -> None:
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_doc(doc: dict, args) -> None:
    if args.format == "json":
        _emit(reports.dumps_json(doc), args)
    elif args.format == "csv":
        _emit(reports.flat_csv(doc), args)
    else:
        _emit(reports.flat_text(doc), args)


def cmd_bound(args) -> int:
    act, arch, x = _network(args)
    if args.mode == "shallow":
        shallow = bounds.shallow_bounds(act, arch, x)
        if args.metric == "all":
            selected = list(shallow.values())
        elif args.metric in shallow:
            selected = [shallow[args.metric]]
        else:
            raise DomainError(f"metric {args.metric!r} is not available for shallow bounds")
    else:
        conv = bounds.deep_convex_bound(act, arch, x)
        w1 = bounds.deep_w1_bound(act, arch, x)
        if args.metric == "all":
            selected = [conv, w1, bounds.convex_from_w1_report(w1, arch.n_out)]
        elif args.metric == "convex":
            selected = [conv]
        elif args.metric == "wasserstein1":
            selected = [w1]
        else:
            raise DomainError(f"metric {args.metric!r} is not available for deep bounds")
    if args.format == "json":
        _emit(reports.dumps_json(reports.bound_document(selected, _config_record(act, arch, x))), args)
    elif args.format == "csv":
        _emit(reports.bound_reports_csv(selected), args)
    else:
        _emit(reports.bound_reports_text(selected), args)
    return 0


def cmd_localize(args) -> int:
    act, arch, x = _network(args)
    rect = localize.Rect.parse(args.rect)
    rep = localize.certified_interval(act, arch, x, rect, args.mode)
    doc = dict(rep.to_dict(), rect=rect.format(), config=_config_record(act, arch, x))
    _emit_doc(doc, args)
    return 0


def cmd_simulate(args) -> int:
    act, arch, x = _network(args)
    stats = recursion.layer_stats(act, arch, x)
    doc = {"config": _config_record(act, arch, x), "samples": args.samples, "seed": args.seed}
    if args.layer is not None:
        draws = simulate.sample_collective(act, arch, x, args.layer, args.samples, args.seed,
                                           args.workers, args.method)
        target = stats.o_seq[args.layer - 1]
        doc.update(
            layer=args.layer,
            target=target,
            mean=float(np.mean(draws)),
            collective_rms=simulate.collective_rms_error(draws, target).to_dict(),
        )
        _emit_doc(doc, args)
        return 0
    batch = simulate.sample_outputs(act, arch, x, args.samples, args.seed, args.workers, args.method)
    if args.export_bin:
        simulate.write_batch_binary(batch, args.export_bin)
    if args.export_csv:
        simulate.write_batch_csv(batch, args.export_csv)
    doc.update(
        fingerprint=batch.fingerprint,
        nu_sq=stats.nu_sq,
        mean=[float(v) for v in batch.values.mean(axis=0)],
        variance=[float(v) for v in batch.values.var(axis=0)],
        ks=[simulate.empirical_ks(batch.values[:, i], stats.nu_sq).to_dict() for i in range(batch.n_out)],
        w1=[simulate.empirical_w1(batch.values[:, i], stats.nu_sq).to_dict() for i in range(batch.n_out)],
    )
    _emit_doc(doc, args)
    return 0


def cmd_validate(args) -> int:
    if args.preset:
        preset = validate.get_preset(args.preset)
        act, arch, x = preset.act, preset.arch, preset.x
    else:
        act, arch, x = _network(args)
    doc = validate.run_validation(act, arch, x, args.samples, args.seed, args.workers)
    if args.preset:
        doc["preset"] = args.preset
    _emit_doc(doc, args)
    return 0 if doc["passed"] else EXIT_VALIDATION_FAILED


def cmd_table(args) -> int:
    rows, meta = tables.reproduce_table(args.table_id, bool(args.table2_normalized))
    fmt = args.format
    if fmt == "csv":
        _emit(tables.format_csv(rows), args)
    elif fmt == "text":
        text = tables.format_text(rows)
        if meta.get("note"):
            text = f"# {meta['note']}\n" + text
        _emit(text, args)
    else:
        _emit(reports.dumps_json({"table": args.table_id, "meta": meta, "rows": rows}), args)
    return 0


def cmd_compare(args) -> int:
    act, arch, x = _network(args, n_out_default=1)
    rows = tables.comparison_table(act, arch.C_b, arch.C_W, x)
    doc = {
        "config": _config_record(act, arch, x),
        "note": "width-free constants: each bound multiplied by sqrt(n1)",
        "constants": {r["quantity"]: r["value"] * arch.hidden[0] ** 0.5 for r in rows},
    }
    if args.format == "csv":
        _emit(tables.format_csv(rows), args)
    else:
        _emit_doc(doc, args)
    return 0


COMMANDS = {
    "bound": cmd_bound,
    "localize": cmd_localize,
    "simulate": cmd_simulate,
    "validate": cmd_validate,
    "table": cmd_table,
    "compare": cmd_compare,
}


def _error(kind: str, message: str, code: int) -> int:
    sys.stderr.write(json.dumps({"error": {"type": kind, "message": message, "exit_code": code}}) + "\n")
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        _merge(args)
        if args.quad_nodes is not None:
            gaussmath.configure(args.quad_nodes)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        return _error("usage", str(exc), EXIT_USAGE)
    except ResourceLimitError as exc:
        return _error(type(exc).__name__, str(exc), exc.exit_code)
    except CertifyError as exc:
        return _error(type(exc).__name__, str(exc), exc.exit_code)
    finally:
        gaussmath.configure(None)


if __name__ == "__main__":
    sys.exit(main())
