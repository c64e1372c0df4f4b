"""Resource estimation: walk a circuit once and accumulate abstract gate
costs, weighted critical-path depth and offline-phase budgets.

The walker keeps one accumulator (gate counts plus current depth); a
different accumulation structure would slot into the same walk, but only
this instance ships. Costs are exact rationals so reports never drift.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .circuit import Circuit, GateKind, Level
from .errors import ModelCoverageError, ObjectiveMissingError

# structurally free node kinds, excluded from gate counts
ZERO_COST_KINDS = frozenset({GateKind.CONST, GateKind.INPUT,
                             GateKind.CONST_BIT, GateKind.INPUT_BIT})

COMPARISON_KINDS = frozenset({GateKind.LT, GateKind.LEQ, GateKind.EQ})
TRIPLE_KINDS = frozenset({GateKind.MUL, GateKind.MUX})


@dataclass
class CostModel:
    name: str
    gate_costs: dict[GateKind, dict[str, Fraction]]
    depth_weights: dict[GateKind, int] = field(default_factory=dict)
    # edges are free unless a (producer, consumer) kind pair is priced
    edge_costs: dict[tuple[GateKind, GateKind], dict[str, Fraction]] = \
        field(default_factory=dict)
    triples_per_mul: Fraction = Fraction(1)
    # None means "derive from the circuit bitwidth": 20w triples and w
    # random bits per comparison
    triples_per_comparison: Fraction | None = None
    bits_per_comparison: Fraction | None = None
    prime_modulus: int | None = None

    def resources(self) -> set[str]:
        out: set[str] = set()
        for costs in self.gate_costs.values():
            out |= set(costs)
        for costs in self.edge_costs.values():
            out |= set(costs)
        return out


@dataclass
class ResourceReport:
    model_name: str
    totals: dict[str, Fraction]
    gate_counts: dict[GateKind, int]
    depth: int
    triples: Fraction
    random_bits: Fraction

    def to_json_obj(self) -> dict:
        return {
            "model": self.model_name,
            "totals": {k: _num(v) for k, v in sorted(self.totals.items())},
            "gate_counts": {k.value: v for k, v in
                            sorted(self.gate_counts.items(),
                                   key=lambda kv: kv[0].value)},
            "depth": self.depth,
            "preprocessing": {"triples": _num(self.triples),
                              "random_bits": _num(self.random_bits)},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2) + "\n"


def _num(x: Fraction):
    return int(x) if x.denominator == 1 else float(x)


def critical_path(c: Circuit, depth_weights: dict[GateKind, int]) -> int:
    """Longest weighted path; Const and Input contribute no depth."""
    best = 0
    depth = [0] * len(c.nodes)
    for nid, node in enumerate(c.nodes):
        up = max((depth[o] for o in node.operands), default=0)
        depth[nid] = up + depth_weights.get(node.kind, 0)
        best = max(best, depth[nid])
    return best


def estimate(c: Circuit, model: CostModel) -> ResourceReport:
    counts: dict[GateKind, int] = {}
    totals: dict[str, Fraction] = {r: Fraction(0) for r in model.resources()}
    for node in c.nodes:
        if node.kind not in model.gate_costs:
            raise ModelCoverageError(
                f"model '{model.name}' does not price {node.kind.value}")
        if model.edge_costs:
            for o in node.operands:
                pair = (c.nodes[o].kind, node.kind)
                for resource, cost in model.edge_costs.get(pair, {}).items():
                    totals[resource] += cost
        if node.kind in ZERO_COST_KINDS:
            continue
        counts[node.kind] = counts.get(node.kind, 0) + 1
        for resource, cost in model.gate_costs[node.kind].items():
            totals[resource] += cost
    tpc = (model.triples_per_comparison if model.triples_per_comparison
           is not None else Fraction(20 * c.bitwidth))
    bpc = (model.bits_per_comparison if model.bits_per_comparison
           is not None else Fraction(c.bitwidth))
    n_triple_gates = sum(counts.get(k, 0) for k in TRIPLE_KINDS)
    n_comparisons = sum(counts.get(k, 0) for k in COMPARISON_KINDS)
    return ResourceReport(
        model_name=model.name,
        totals=totals,
        gate_counts=counts,
        depth=critical_path(c, model.depth_weights),
        triples=model.triples_per_mul * n_triple_gates + tpc * n_comparisons,
        random_bits=bpc * n_comparisons,
    )


def rank_backends(c: Circuit, models: list[CostModel],
                  objective: str) -> list[tuple[str, Fraction]]:
    """Order models by their total for one shared resource, ascending;
    ties break on the model name."""
    ranked = []
    for model in models:
        report = estimate(c, model)
        if objective not in report.totals:
            raise ObjectiveMissingError(
                f"model '{model.name}' does not measure '{objective}'")
        ranked.append((model.name, report.totals[objective]))
    ranked.sort(key=lambda pair: (pair[1], pair[0]))
    return ranked


# -- built-in models --

def _costs(mapping: dict[GateKind, dict[str, int | float | str]]):
    return {kind: {r: Fraction(str(v)) for r, v in costs.items()}
            for kind, costs in mapping.items()}


def arith_model() -> CostModel:
    """Homomorphic-style word model: multiplications dominate, so the
    depth weight tracks multiplicative depth."""
    zero = {GateKind.CONST: {}, GateKind.INPUT: {}, GateKind.REVEAL: {}}
    costs = _costs({
        **zero,
        GateKind.ADD: {"adds": 1},
        GateKind.SUB: {"adds": 1},
        GateKind.MUL: {"mults": 1},
        GateKind.MUL_PLAIN: {"plain_mults": 1},
        GateKind.LT: {"comparisons": 1},
        GateKind.LEQ: {"comparisons": 1},
        GateKind.EQ: {"comparisons": 1},
        GateKind.MUX: {"mults": 1},
    })
    weights = {GateKind.MUL: 1, GateKind.MUX: 1, GateKind.LT: 1,
               GateKind.LEQ: 1, GateKind.EQ: 1}
    return CostModel("arith", costs, weights)


def additive_model() -> CostModel:
    """n-out-of-n additive sharing: adds are free, a multiplication costs
    one round and one multicast, a comparison costs seven rounds and an
    equality one and a half comparisons."""
    costs = _costs({
        GateKind.CONST: {}, GateKind.INPUT: {},
        GateKind.ADD: {}, GateKind.SUB: {}, GateKind.MUL_PLAIN: {},
        GateKind.MUL: {"rounds": 1, "multicasts": 1},
        GateKind.MUX: {"rounds": 1, "multicasts": 1},
        GateKind.LT: {"rounds": 7, "multicasts": 7},
        GateKind.LEQ: {"rounds": 7, "multicasts": 7},
        GateKind.EQ: {"rounds": "10.5", "multicasts": "10.5"},
        GateKind.REVEAL: {"rounds": 1, "multicasts": 1},
    })
    weights = {GateKind.MUL: 1, GateKind.MUX: 1, GateKind.LT: 7,
               GateKind.LEQ: 7, GateKind.EQ: 10, GateKind.REVEAL: 1}
    return CostModel("additive", costs, weights,
                     prime_modulus=(1 << 61) - 1)


def boolean_model() -> CostModel:
    """Gate-by-gate boolean backend: every logic gate costs one bootstrap."""
    costs = _costs({
        GateKind.CONST_BIT: {}, GateKind.INPUT_BIT: {},
        GateKind.REVEAL_BIT: {},
        GateKind.AND: {"gates": 1},
        GateKind.OR: {"gates": 1},
        GateKind.XOR: {"gates": 1},
        GateKind.NOT: {"gates": 1},
        GateKind.MUX_BIT: {"gates": 1},
    })
    weights = {GateKind.AND: 1, GateKind.OR: 1, GateKind.XOR: 1,
               GateKind.NOT: 1, GateKind.MUX_BIT: 1}
    return CostModel("boolean", costs, weights)


BUILTIN_MODELS = {"arith": arith_model, "additive": additive_model,
                  "boolean": boolean_model}


def default_model_for(c: Circuit) -> CostModel:
    return boolean_model() if c.level == Level.BOOL else arith_model()


# -- JSON interchange --

def model_to_json_obj(m: CostModel) -> dict:
    return {
        "name": m.name,
        "gate_costs": {k.value: {r: _num(v) for r, v in costs.items()}
                       for k, costs in m.gate_costs.items()},
        "depth_weights": {k.value: w for k, w in m.depth_weights.items()},
        "edge_costs": {f"{src.value}->{dst.value}":
                       {r: _num(v) for r, v in costs.items()}
                       for (src, dst), costs in m.edge_costs.items()},
        "preprocessing": {
            "triples_per_mul": _num(m.triples_per_mul),
            "triples_per_comparison": (
                None if m.triples_per_comparison is None
                else _num(m.triples_per_comparison)),
            "bits_per_comparison": (None if m.bits_per_comparison is None
                                    else _num(m.bits_per_comparison)),
        },
        "prime_modulus": m.prime_modulus,
    }


def model_from_json_obj(obj: dict) -> CostModel:
    def to_kind(name: str) -> GateKind:
        try:
            return GateKind(name)
        except ValueError:
            raise ModelCoverageError(f"unknown gate kind '{name}' in model "
                                     f"'{obj.get('name', '?')}'") from None

    def frac(v) -> Fraction:
        f = Fraction(str(v))
        if f < 0:
            raise ModelCoverageError("costs must be nonnegative")
        return f

    gate_costs = {to_kind(k): {r: frac(v) for r, v in costs.items()}
                  for k, costs in obj["gate_costs"].items()}
    weights = {to_kind(k): int(w)
               for k, w in obj.get("depth_weights", {}).items()}
    if any(w < 0 for w in weights.values()):
        raise ModelCoverageError("depth weights must be nonnegative")
    edge_costs = {}
    for pair, costs in obj.get("edge_costs", {}).items():
        src, _, dst = pair.partition("->")
        edge_costs[(to_kind(src), to_kind(dst))] = {
            r: frac(v) for r, v in costs.items()}
    pre = obj.get("preprocessing", {})

    def opt_frac(key):
        v = pre.get(key)
        return None if v is None else frac(v)

    return CostModel(
        name=obj["name"],
        gate_costs=gate_costs,
        depth_weights=weights,
        edge_costs=edge_costs,
        triples_per_mul=(frac(pre["triples_per_mul"])
                         if "triples_per_mul" in pre else Fraction(1)),
        triples_per_comparison=opt_frac("triples_per_comparison"),
        bits_per_comparison=opt_frac("bits_per_comparison"),
        prime_modulus=obj.get("prime_modulus"),
    )


def load_model(path_or_name: str) -> CostModel:
    if path_or_name in BUILTIN_MODELS:
        return BUILTIN_MODELS[path_or_name]()
    with open(path_or_name, encoding="utf-8") as fh:
        return model_from_json_obj(json.load(fh))
