"""Convenience wrappers running frontend, checker, lowering and passes as
one in-process pipeline; the CLI and the tests share these."""

from __future__ import annotations

from dataclasses import dataclass

from .circuit import Circuit, Level
from .estimator import CostModel
from .frontend import parse_source
from .lowering import LowerConfig, lower_program
from .optimizer import DEFAULT_PASSES, run_passes
from .sectypes import Scheme, Generic
from .typecheck import TypedProgram, check_program


@dataclass
class PipelineConfig:
    scheme: Scheme = Generic()
    bitwidth: int = 64
    target_level: Level = Level.ARITH
    comparison_encoding: str = "auto"
    passes: list[str] | None = None  # None = DEFAULT_PASSES, [] = no-opt
    model: CostModel | None = None

    def lower_config(self) -> LowerConfig:
        passes = DEFAULT_PASSES if self.passes is None else self.passes
        return LowerConfig(
            bitwidth=self.bitwidth,
            target_level=Level.ARITH,  # bitblast happens after passes
            comparison_encoding=self.comparison_encoding,
            scheme=self.scheme,
            pow_rewrite="pow_rewrite" in passes,
        )


def check_source(source: str, scheme: Scheme) -> TypedProgram:
    return check_program(parse_source(source), scheme)


def compile_source(source: str, cfg: PipelineConfig | None = None) -> Circuit:
    """parse -> check -> lower -> optimize (-> bitblast for bool level)."""
    cfg = cfg or PipelineConfig()
    tp = check_source(source, cfg.scheme)
    c = lower_program(tp, cfg.lower_config())
    passes = DEFAULT_PASSES if cfg.passes is None else cfg.passes
    if passes:
        c = run_passes(c, passes, cfg.model)
    if cfg.target_level == Level.BOOL:
        from .bitblast import bitblast
        c = bitblast(c, cfg.bitwidth)
    return c
