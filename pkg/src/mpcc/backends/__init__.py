from .clear import ClearInterpreter, interpret_clear, flatten_inputs
from .boolsim import BoolInterpreter, interpret_bool
from .shares import (
    PRIME, BeaverTriple, ExecTrace, ShareVector, SharedSimulator,
    beaver_mul, centered, make_triple, reconstruct, share, simulate_shared,
)
from .gatelist import emit_gatelist, eval_gatelist, parse_gatelist

__all__ = [
    "ClearInterpreter", "interpret_clear", "flatten_inputs",
    "BoolInterpreter", "interpret_bool",
    "PRIME", "BeaverTriple", "ExecTrace", "ShareVector", "SharedSimulator",
    "beaver_mul", "centered", "make_triple", "reconstruct", "share",
    "simulate_shared",
    "emit_gatelist", "eval_gatelist", "parse_gatelist",
]
