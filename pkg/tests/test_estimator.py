import json
from fractions import Fraction

import pytest

from conftest import ROOT, build
from mpcc.circuit import Circuit, GateKind, PlainMeta
from mpcc.errors import ModelCoverageError, ObjectiveMissingError
from mpcc.estimator import (
    CostModel, additive_model, arith_model, boolean_model, critical_path,
    estimate, load_model, model_from_json_obj, model_to_json_obj,
    rank_backends,
)
from mpcc.optimizer import run_passes
from mpcc.sectypes import owners


def chain_circuit(kind, length, fan_in=1):
    c = Circuit()
    a = c.add_input(1, "a")
    b = c.add_input(1, "b")
    acc = a
    for _ in range(length):
        acc = c.add_node(kind, (acc, b))
    r = c.add_node(GateKind.REVEAL, (acc,), PlainMeta(owners(1)))
    c.add_output(r, owners(1), "out")
    return c


def test_pow8_reports():
    opt = run_passes(build("pow8"))
    raw = build("pow8", pow_rewrite=False)
    r_opt = estimate(opt, arith_model())
    r_raw = estimate(raw, arith_model())
    assert r_opt.gate_counts[GateKind.MUL] == 3
    assert r_opt.depth == 3
    assert r_raw.gate_counts[GateKind.MUL] == 7
    assert r_raw.depth == 7


def test_gate_counts_exclude_structural_kinds():
    r = estimate(build("pow8"), arith_model())
    assert GateKind.CONST not in r.gate_counts
    assert GateKind.INPUT not in r.gate_counts


def test_depth_of_add_chain():
    c = chain_circuit(GateKind.ADD, 5)
    assert critical_path(c, {GateKind.ADD: 1}) == 5


def test_depth_of_balanced_tree():
    c = build("sum8")
    assert critical_path(c, {GateKind.ADD: 1}) == 3


def test_depth_of_empty_circuit():
    assert critical_path(Circuit(), {GateKind.ADD: 1}) == 0


def test_depth_ignores_zero_weight_kinds():
    c = chain_circuit(GateKind.ADD, 4)
    assert critical_path(c, {GateKind.MUL: 1}) == 0


def test_totals_are_count_times_cost():
    c = chain_circuit(GateKind.MUL, 4)
    r = estimate(c, additive_model())
    assert r.totals["rounds"] == 4 + 1  # 4 muls + 1 reveal
    assert r.gate_counts[GateKind.MUL] == 4


def test_preprocessing_budget_formulas():
    c = Circuit(bitwidth=16)
    a = c.add_input(1, "a")
    b = c.add_input(2, "b")
    m = c.add_node(GateKind.MUL, (a, b))
    lt = c.add_node(GateKind.LT, (m, a))
    x = c.add_node(GateKind.MUX, (lt, m, a))
    r = c.add_node(GateKind.REVEAL, (x,), PlainMeta(owners(1)))
    c.add_output(r, owners(1), "out")
    rep = estimate(c, additive_model())
    # 1 per Mul and Mux, 20*16 per comparison
    assert rep.triples == 2 + 320
    assert rep.random_bits == 16


def test_single_mul_needs_one_triple():
    c = chain_circuit(GateKind.MUL, 1)
    assert estimate(c, additive_model()).triples == 1


def test_model_coverage_error():
    tiny = CostModel("tiny", {GateKind.ADD: {}})
    with pytest.raises(ModelCoverageError):
        estimate(chain_circuit(GateKind.MUL, 1), tiny)


def test_rank_backends_orders_and_breaks_ties():
    c = chain_circuit(GateKind.MUL, 3)
    cheap = CostModel("cheap", {
        GateKind.INPUT: {}, GateKind.CONST: {}, GateKind.REVEAL: {},
        GateKind.MUL: {"comm": Fraction(1)}})
    pricey = CostModel("pricey", {
        GateKind.INPUT: {}, GateKind.CONST: {}, GateKind.REVEAL: {},
        GateKind.MUL: {"comm": Fraction(7)}})
    twin = CostModel("apricot", {
        GateKind.INPUT: {}, GateKind.CONST: {}, GateKind.REVEAL: {},
        GateKind.MUL: {"comm": Fraction(1)}})
    ranked = rank_backends(c, [pricey, cheap, twin], "comm")
    assert ranked == [("apricot", 3), ("cheap", 3), ("pricey", 21)]


def test_rank_single_model():
    c = chain_circuit(GateKind.MUL, 2)
    assert rank_backends(c, [additive_model()], "rounds")[0][0] == "additive"


def test_rank_missing_objective():
    c = chain_circuit(GateKind.MUL, 1)
    with pytest.raises(ObjectiveMissingError):
        rank_backends(c, [additive_model()], "wombats")


def test_additivity_over_partition():
    c = build("auction", bitwidth=16)
    full = estimate(c, additive_model())
    # splitting the node list at any point and re-counting gives the sums
    half = len(c.nodes) // 2
    counts_lo: dict = {}
    counts_hi: dict = {}
    from mpcc.estimator import ZERO_COST_KINDS
    for nid, node in enumerate(c.nodes):
        if node.kind in ZERO_COST_KINDS:
            continue
        tgt = counts_lo if nid < half else counts_hi
        tgt[node.kind] = tgt.get(node.kind, 0) + 1
    merged = dict(counts_lo)
    for k, v in counts_hi.items():
        merged[k] = merged.get(k, 0) + v
    assert merged == full.gate_counts


def test_depth_monotone_under_extension():
    c = chain_circuit(GateKind.MUL, 3)
    before = estimate(c, additive_model()).depth
    c.add_node(GateKind.MUL, (len(c.nodes) - 2, 0))
    after = estimate(c, additive_model()).depth
    assert after >= before


def test_gate_counts_identical_across_models():
    c = build("auction", bitwidth=16)
    r1 = estimate(c, additive_model())
    r2 = estimate(c, arith_model())
    assert r1.gate_counts == r2.gate_counts


def test_optimizer_never_raises_default_totals():
    for name in ("gcd", "auction", "mergesort", "matvec", "pow8", "sum8"):
        c = build(name, bitwidth=16)
        copt = run_passes(c)
        before = estimate(c, additive_model()).totals
        after = estimate(copt, additive_model()).totals
        for resource, total in after.items():
            assert total <= before[resource], (name, resource)


# -- JSON interchange --

def test_builtin_models_round_trip_through_json():
    for model in (arith_model(), additive_model(), boolean_model()):
        obj = model_to_json_obj(model)
        again = model_from_json_obj(json.loads(json.dumps(obj)))
        assert again == model


def test_shipped_model_files_load():
    for name in ("arith", "additive", "boolean"):
        m = load_model(str(ROOT / "corpus" / "models" / f"{name}.json"))
        assert m.name == name


def test_unknown_gate_kind_is_load_error():
    with pytest.raises(ModelCoverageError):
        model_from_json_obj({"name": "x", "gate_costs": {"Frobnicate": {}}})


def test_negative_cost_rejected():
    with pytest.raises(ModelCoverageError):
        model_from_json_obj({"name": "x",
                             "gate_costs": {"Mul": {"rounds": -1}}})


def test_fractional_costs_stay_exact():
    m = model_from_json_obj({"name": "x",
                             "gate_costs": {"Eq": {"rounds": 10.5}}})
    assert m.gate_costs[GateKind.EQ]["rounds"] == Fraction(21, 2)


def test_edge_costs_priced_per_kind_pair():
    c = chain_circuit(GateKind.MUL, 3)
    model = model_from_json_obj({
        "name": "edges",
        "gate_costs": {"Input": {}, "Const": {}, "Reveal": {},
                       "Mul": {"work": 1}},
        "edge_costs": {"Mul->Mul": {"hops": 2}},
    })
    r = estimate(c, model)
    assert r.totals["work"] == 3
    assert r.totals["hops"] == 4  # two Mul->Mul edges in the chain
    again = model_from_json_obj(json.loads(json.dumps(
        model_to_json_obj(model))))
    assert again == model
