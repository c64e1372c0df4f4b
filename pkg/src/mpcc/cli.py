"""Command-line driver: check | lower | opt | estimate | run | emit.

Exit codes: 0 success, 1 program or usage error, 2 environment error
(unreadable files, bad JSON). Stage inputs may be `.hml` source or a
circuit JSON produced by an earlier stage, so every stage is pipeable
through files.
"""

from __future__ import annotations

import argparse
import json
import sys

from .backends.clear import flatten_inputs, interpret_clear
from .backends.gatelist import emit_gatelist
from .backends.shares import simulate_shared
from .bitblast import bitblast
from .circuit import Circuit, Level
from .errors import CompilerError, TypeCheckFailure
from .estimator import (
    default_model_for, estimate, load_model, rank_backends,
)
from .frontend import parse_source
from .lowering import lower_program
from .optimizer import DEFAULT_PASSES, run_passes
from .pipeline import PipelineConfig
from .sectypes import AdditiveShare, Generic, Scheme, Tfhe
from .typecheck import check_program


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="mpcc",
        description="compile ownership-annotated programs to oblivious "
                    "circuits, estimate their cost, and run them on "
                    "simulated backends")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, with_pipeline=True):
        p.add_argument("source", help=".hml source or circuit .json")
        p.add_argument("--spec", help="JSON file with default settings "
                                      "(flags win)")
        p.add_argument("--scheme", choices=["generic", "tfhe", "additive"])
        p.add_argument("-n", "--parties", type=int,
                       help="party count for the additive scheme/backend")
        if with_pipeline:
            p.add_argument("--bitwidth", type=int)
            p.add_argument("--level", choices=["arith", "bool"])
            p.add_argument("--encoding",
                           choices=["direct", "rewrite", "auto"],
                           help="comparison encoding")
            p.add_argument("--passes", help="comma-separated pass list")
            p.add_argument("--no-opt", action="store_true",
                           help="disable all optimization passes")
        p.add_argument("-o", "--output", help="write result here instead "
                                              "of stdout")

    common(sub.add_parser("check", help="type-check a program"),
           with_pipeline=False)
    common(sub.add_parser("lower", help="compile to circuit JSON without "
                                        "optimization"))
    common(sub.add_parser("opt", help="optimize a circuit"))
    p_est = sub.add_parser("estimate", help="resource report for a circuit")
    common(p_est)
    p_est.add_argument("--cost-model", action="append", default=[],
                       help="builtin name or JSON path; repeat to rank")
    p_est.add_argument("--objective", default=None,
                       help="resource used for ranking several models")
    p_run = sub.add_parser("run", help="execute on a simulated backend")
    common(p_run)
    p_run.add_argument("--backend", choices=["clear", "shares"],
                       default="clear")
    p_run.add_argument("--inputs", required=True,
                       help='JSON {"parties": {"1": {"x": 5}}}')
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--trace", help="write the execution trace JSON here")
    common(sub.add_parser("emit", help="emit a boolean gate list "
                                       "(requires --level bool)"))
    return ap


def load_spec_defaults(args):
    if not args.spec:
        return {}
    with open(args.spec, encoding="utf-8") as fh:
        return json.load(fh)


def setting(args, spec: dict, name: str, default=None):
    v = getattr(args, name, None)
    if v is not None and v is not False:
        return v
    if name in spec:
        return spec[name]
    return default


def scheme_of(args, spec) -> Scheme:
    name = setting(args, spec, "scheme", "generic")
    if name == "tfhe":
        return Tfhe()
    if name == "additive":
        return AdditiveShare(setting(args, spec, "parties", 3))
    return Generic()


def pipeline_config(args, spec) -> PipelineConfig:
    passes = None
    if getattr(args, "no_opt", False) or spec.get("no_opt"):
        passes = []
    else:
        raw = setting(args, spec, "passes")
        if isinstance(raw, str):
            passes = [p for p in raw.split(",") if p]
        elif isinstance(raw, list):
            passes = raw
    return PipelineConfig(
        scheme=scheme_of(args, spec),
        bitwidth=int(setting(args, spec, "bitwidth", 64)),
        target_level=Level(setting(args, spec, "level", "arith")),
        comparison_encoding=setting(args, spec, "encoding", "auto"),
        passes=passes,
    )


def read_source(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as ex:
        raise EnvironmentError(f"cannot read {path}: {ex}") from ex


def obtain_circuit(args, cfg: PipelineConfig, optimize: bool) -> Circuit:
    """Load a circuit JSON or compile source up to the requested stage
    (always at the arith level; emit bitblasts afterwards)."""
    if args.source.endswith(".json"):
        c = Circuit.from_json(read_source(args.source))
    else:
        tp = check_program(parse_source(read_source(args.source)),
                           cfg.scheme)
        c = lower_program(tp, cfg.lower_config())
    if optimize:
        passes = DEFAULT_PASSES if cfg.passes is None else cfg.passes
        if passes:
            c = run_passes(c, passes, cfg.model)
    return c


def write_out(args, text: str):
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_check(args, spec) -> int:
    source = read_source(args.source)
    try:
        check_program(parse_source(source), scheme_of(args, spec))
    except TypeCheckFailure as ex:
        for err in ex.errors:
            line, col = err.pos or (0, 0)
            print(f"{args.source}:{line}:{col}: error[{err.rule}]: "
                  f"{err.message}", file=sys.stderr)
        return 1
    return 0


def to_level(c: Circuit, cfg: PipelineConfig) -> Circuit:
    if cfg.target_level == Level.BOOL and c.level != Level.BOOL:
        return bitblast(c, cfg.bitwidth)
    return c


def cmd_lower(args, spec) -> int:
    cfg = pipeline_config(args, spec)
    c = obtain_circuit(args, cfg, optimize=False)
    write_out(args, to_level(c, cfg).to_json())
    return 0


def cmd_opt(args, spec) -> int:
    cfg = pipeline_config(args, spec)
    c = obtain_circuit(args, cfg, optimize=True)
    write_out(args, to_level(c, cfg).to_json())
    return 0


def cmd_estimate(args, spec) -> int:
    cfg = pipeline_config(args, spec)
    c = to_level(obtain_circuit(args, cfg, optimize=True), cfg)
    model_names = args.cost_model or spec.get("cost_model") or []
    if isinstance(model_names, str):
        model_names = [model_names]
    models = [load_model(m) for m in model_names]
    if not models:
        models = [default_model_for(c)]
    if len(models) == 1:
        report = estimate(c, models[0])
        write_out(args, report.to_json())
        return 0
    objective = args.objective or spec.get("objective")
    if not objective:
        print("ranking several models needs --objective", file=sys.stderr)
        return 1
    ranking = rank_backends(c, models, objective)
    write_out(args, json.dumps(
        {"objective": objective,
         "ranking": [{"model": name, "total": float(total)}
                     for name, total in ranking]}, indent=2) + "\n")
    return 0


def cmd_run(args, spec) -> int:
    cfg = pipeline_config(args, spec)
    c = obtain_circuit(args, cfg, optimize=True)
    try:
        with open(args.inputs, encoding="utf-8") as fh:
            inputs = flatten_inputs(json.load(fh).get("parties", {}))
    except OSError as ex:
        raise EnvironmentError(f"cannot read {args.inputs}: {ex}") from ex
    backend = setting(args, spec, "backend", "clear")
    if backend == "shares":
        n = setting(args, spec, "parties", 3)
        outputs, trace = simulate_shared(c, inputs, int(n),
                                         seed=int(setting(args, spec,
                                                          "seed", 0)))
        if args.trace:
            with open(args.trace, "w", encoding="utf-8") as fh:
                json.dump(trace.to_json_obj(), fh, indent=2)
        print(json.dumps(trace.to_json_obj()), file=sys.stderr)
    else:
        outputs = interpret_clear(c, inputs)
    write_out(args, json.dumps(outputs) + "\n")
    return 0


def cmd_emit(args, spec) -> int:
    cfg = pipeline_config(args, spec)
    if cfg.target_level != Level.BOOL:
        print("emit requires --level bool", file=sys.stderr)
        return 1
    c = to_level(obtain_circuit(args, cfg, optimize=True), cfg)
    write_out(args, emit_gatelist(c))
    return 0


COMMANDS = {"check": cmd_check, "lower": cmd_lower, "opt": cmd_opt,
            "estimate": cmd_estimate, "run": cmd_run, "emit": cmd_emit}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = load_spec_defaults(args)
    except OSError as ex:
        print(f"mpcc: {ex}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as ex:
        print(f"mpcc: bad spec file: {ex}", file=sys.stderr)
        return 2
    try:
        return COMMANDS[args.command](args, spec)
    except EnvironmentError as ex:
        print(f"mpcc: {ex}", file=sys.stderr)
        return 2
    except TypeCheckFailure as ex:
        for err in ex.errors:
            line, col = err.pos or (0, 0)
            print(f"{args.source}:{line}:{col}: error[{err.rule}]: "
                  f"{err.message}", file=sys.stderr)
        return 1
    except CompilerError as ex:
        print(f"{args.source}: error: {ex}", file=sys.stderr)
        return 1
    except json.JSONDecodeError as ex:
        print(f"mpcc: bad JSON input: {ex}", file=sys.stderr)
        return 2
    except ValueError as ex:
        print(f"mpcc: {ex}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
