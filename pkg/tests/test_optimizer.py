from fractions import Fraction

import pytest

from astref import reference_run
from conftest import build
from mpcc.backends.clear import interpret_clear
from mpcc.circuit import Circuit, GateKind, PlainMeta
from mpcc.estimator import CostModel, additive_model, critical_path
from mpcc.lowering import LowerConfig, lower_program
from mpcc.optimizer import (
    cmp_rewrite, const_fold, cse, dce, peephole, run_passes,
    strength_reduce, tree_reduce,
)
from mpcc.sectypes import Generic, owners
from mpcc.typecheck import check_program
from proggen import random_inputs, random_program


def two_input_circuit():
    c = Circuit()
    a = c.add_input(1, "a")
    b = c.add_input(2, "b")
    return c, a, b


def reveal_out(c, nid, name="out"):
    r = c.add_node(GateKind.REVEAL, (nid,), PlainMeta(owners(1)))
    c.add_output(r, owners(1), name)
    return c


def kinds(c):
    return [n.kind for n in c.nodes]


# -- const_fold --

def test_fold_add_of_constants():
    c = Circuit()
    x = c.add_node(GateKind.CONST, (), payload=2)
    y = c.add_node(GateKind.CONST, (), payload=3)
    s = c.add_node(GateKind.ADD, (x, y))
    reveal_out(c, s)
    out = const_fold(c)
    assert out.nodes[s].kind == GateKind.CONST
    assert out.nodes[s].payload == 5


def test_fold_constant_comparison():
    c = Circuit()
    x = c.add_node(GateKind.CONST, (), payload=1)
    y = c.add_node(GateKind.CONST, (), payload=2)
    lt = c.add_node(GateKind.LT, (x, y))
    reveal_out(c, lt)
    out = const_fold(c)
    assert out.nodes[lt].kind == GateKind.CONST
    assert out.nodes[lt].payload == 1


def test_fold_leaves_mul_by_const_zero_alone():
    c, a, _ = two_input_circuit()
    z = c.add_node(GateKind.CONST, (), payload=0)
    m = c.add_node(GateKind.MUL, (z, a))
    reveal_out(c, m)
    out = const_fold(c)
    assert out.nodes[m].kind == GateKind.MUL  # strength_reduce's job


# -- peephole --

def test_peephole_and_true():
    from mpcc.circuit import Level
    c = Circuit(Level.BOOL)
    a = c.add_node(GateKind.INPUT_BIT, ())
    c.inputs.append((a, 1, "a"))
    t = c.add_node(GateKind.CONST_BIT, (), payload=1)
    g = c.add_node(GateKind.AND, (a, t))
    r = c.add_node(GateKind.REVEAL_BIT, (g,), PlainMeta(owners(1)))
    c.add_output(r, owners(1), "out")
    out = peephole(c)
    # the And is gone; the reveal reads the input directly
    reveal = next(n for n in out.nodes if n.kind == GateKind.REVEAL_BIT)
    assert out.nodes[reveal.operands[0]].kind == GateKind.INPUT_BIT


def test_peephole_add_zero_and_mux_same_arms():
    c, a, b = two_input_circuit()
    z = c.add_node(GateKind.CONST, (), payload=0)
    s = c.add_node(GateKind.ADD, (a, z))
    sel = c.add_node(GateKind.LT, (a, b))
    m = c.add_node(GateKind.MUX, (sel, s, s))
    reveal_out(c, m)
    out = dce(peephole(c))
    assert GateKind.MUX not in out.counts()
    assert GateKind.ADD not in out.counts()


# -- cse --

def test_cse_shares_repeated_subexpression():
    c, a, b = two_input_circuit()
    s1 = c.add_node(GateKind.ADD, (a, b))
    s2 = c.add_node(GateKind.ADD, (a, b))
    m = c.add_node(GateKind.MUL, (s1, s2))
    reveal_out(c, m)
    out = dce(cse(c))
    assert out.counts()[GateKind.ADD] == 1


def test_cse_commutative_canonicalization():
    c, a, b = two_input_circuit()
    s1 = c.add_node(GateKind.ADD, (a, b))
    s2 = c.add_node(GateKind.ADD, (b, a))
    m = c.add_node(GateKind.MUL, (s1, s2))
    reveal_out(c, m)
    out = dce(cse(c))
    assert out.counts()[GateKind.ADD] == 1
    for a_v in (2, 3):
        assert interpret_clear(out, {(1, "a"): a_v, (2, "b"): 5}) == \
            interpret_clear(c, {(1, "a"): a_v, (2, "b"): 5})


def test_cse_does_not_merge_sub():
    c, a, b = two_input_circuit()
    s1 = c.add_node(GateKind.SUB, (a, b))
    s2 = c.add_node(GateKind.SUB, (b, a))
    m = c.add_node(GateKind.MUL, (s1, s2))
    reveal_out(c, m)
    assert dce(cse(c)).counts()[GateKind.SUB] == 2


def test_cse_no_duplicates_is_identity():
    c = build("auction", bitwidth=16)
    once = cse(c)
    assert cse(once).nodes == once.nodes


# -- dce --

def test_dce_removes_unused_const():
    c, a, _ = two_input_circuit()
    c.add_node(GateKind.CONST, (), payload=99)
    reveal_out(c, a)
    out = dce(c)
    assert GateKind.CONST not in out.counts()
    assert len(out.nodes) == 3


def test_dce_keeps_everything_reachable():
    c, a, b = two_input_circuit()
    s = c.add_node(GateKind.ADD, (a, b))
    reveal_out(c, s)
    assert len(dce(c).nodes) == len(c.nodes)


def test_dce_renumbers_topologically():
    c = dce(cse(build("mergesort", bitwidth=16)))
    for nid, node in enumerate(c.nodes):
        for o in node.operands:
            assert o < nid
    assert c.validate() == []


# -- strength_reduce --

def test_mul_by_const_becomes_mulplain():
    c, a, _ = two_input_circuit()
    k = c.add_node(GateKind.CONST, (), payload=7)
    m = c.add_node(GateKind.MUL, (a, k))
    reveal_out(c, m)
    out = strength_reduce(c)
    assert out.counts()[GateKind.MUL_PLAIN] == 1
    assert GateKind.MUL not in out.counts()


def test_mulplain_identities():
    c, a, _ = two_input_circuit()
    m0 = c.add_node(GateKind.MUL_PLAIN, (a,), payload=0)
    m1 = c.add_node(GateKind.MUL_PLAIN, (a,), payload=1)
    m7 = c.add_node(GateKind.MUL_PLAIN, (a,), payload=7)
    s = c.add_node(GateKind.ADD, (m0, m1))
    s2 = c.add_node(GateKind.ADD, (s, m7))
    reveal_out(c, s2)
    out = strength_reduce(c)
    assert out.counts()[GateKind.MUL_PLAIN] == 1  # only the *7 stays
    assert interpret_clear(out, {(1, "a"): 5, (2, "b"): 0}) == \
        {"out": 0 + 5 + 35}


def test_matvec_strength_reduction_counts():
    raw = build("matvec")
    reduced = strength_reduce(raw)
    assert raw.counts()[GateKind.MUL_PLAIN] == 30
    assert reduced.counts()[GateKind.MUL_PLAIN] == 15


# -- pow rewrite (applied during lowering) --

def test_pow_counts_for_powers_of_two():
    from mpcc.frontend import parse_source
    for k in range(1, 7):
        src = (f"parties 1;\ninput x : int from 1;\n"
               f"output eval({{1}}, pow(x, {1 << k}));\n")
        tp = check_program(parse_source(src), Generic())
        c = lower_program(tp, LowerConfig(pow_rewrite=True))
        assert c.counts()[GateKind.MUL] == k
        assert critical_path(c, {GateKind.MUL: 1}) == k


def test_pow_general_exponent_bound():
    from mpcc.frontend import parse_source
    import math
    for n in (3, 5, 6, 7, 9, 12, 15, 31):
        src = (f"parties 1;\ninput x : int from 1;\n"
               f"output eval({{1}}, pow(x, {n}));\n")
        tp = check_program(parse_source(src), Generic())
        c = lower_program(tp, LowerConfig(pow_rewrite=True))
        assert c.counts()[GateKind.MUL] <= 2 * int(math.log2(n))
        assert interpret_clear(c, {(1, "x"): 3}) == {"out0": 3 ** n}


def test_pow_one_is_wire():
    from mpcc.frontend import parse_source
    src = "parties 1;\ninput x : int from 1;\noutput eval({1}, pow(x, 1));\n"
    tp = check_program(parse_source(src), Generic())
    c = lower_program(tp, LowerConfig(pow_rewrite=True))
    assert GateKind.MUL not in c.counts()


# -- cmp_rewrite --

def geq_circuit(encoding):
    from mpcc.frontend import parse_source
    src = ("parties 1, 2;\ninput a : int from 1;\ninput b : int from 2;\n"
           "output eval({1, 2}, a >= b);\n")
    tp = check_program(parse_source(src), Generic())
    return lower_program(tp, LowerConfig(comparison_encoding=encoding))


def test_cmp_rewrite_prefers_sub_form_under_sharing_model():
    c = geq_circuit("direct")
    out = dce(cmp_rewrite(c, additive_model()))
    counts = out.counts()
    assert counts[GateKind.LT] == 1
    assert counts[GateKind.SUB] == 1
    assert GateKind.EQ not in counts
    for a, b in [(1, 2), (2, 2), (3, 2)]:
        assert interpret_clear(out, {(1, "a"): a, (2, "b"): b}) == \
            {"out0": int(a >= b)}


def test_cmp_rewrite_keeps_direct_when_eq_is_free():
    model = CostModel("weird", {
        GateKind.LT: {"c": Fraction(1)},
        GateKind.EQ: {},
        GateKind.ADD: {},
        GateKind.SUB: {"c": Fraction(10 ** 9)},
    })
    c = geq_circuit("direct")
    out = dce(cmp_rewrite(c, model))
    counts = out.counts()
    assert counts[GateKind.EQ] == 1
    assert counts[GateKind.ADD] == 1
    assert GateKind.SUB not in counts


def test_cmp_rewrite_converts_rewrite_to_direct_when_cheaper():
    model = CostModel("weird", {
        GateKind.LT: {"c": Fraction(1)},
        GateKind.EQ: {},
        GateKind.ADD: {},
        GateKind.SUB: {"c": Fraction(10 ** 9)},
    })
    c = geq_circuit("rewrite")
    out = dce(cmp_rewrite(c, model))
    counts = out.counts()
    assert GateKind.SUB not in counts
    assert counts[GateKind.EQ] == 1
    for a, b in [(1, 2), (2, 2), (3, 2)]:
        assert interpret_clear(out, {(1, "a"): a, (2, "b"): b}) == \
            {"out0": int(a >= b)}


def test_cmp_rewrite_neq_both_directions():
    from mpcc.frontend import parse_source
    src = ("parties 1, 2;\ninput a : int from 1;\ninput b : int from 2;\n"
           "output eval({1, 2}, a != b);\n")
    tp = check_program(parse_source(src), Generic())
    direct = lower_program(tp, LowerConfig(comparison_encoding="direct"))
    out = dce(cmp_rewrite(direct, additive_model()))
    assert out.counts()[GateKind.EQ] == 1
    assert out.counts().get(GateKind.LT) is None
    for a, b in [(1, 2), (2, 2)]:
        assert interpret_clear(out, {(1, "a"): a, (2, "b"): b}) == \
            {"out0": int(a != b)}


# -- tree_reduce --

def test_tree_reduce_rebalances_add_chain():
    c = Circuit()
    leaves = [c.add_input(1, f"x{i}") for i in range(8)]
    acc = leaves[0]
    for leaf in leaves[1:]:
        acc = c.add_node(GateKind.ADD, (acc, leaf))
    reveal_out(c, acc)
    assert critical_path(c, {GateKind.ADD: 1}) == 7
    out = tree_reduce(c)
    assert out.counts()[GateKind.ADD] == 7
    assert critical_path(out, {GateKind.ADD: 1}) == 3
    ins = {(1, f"x{i}"): i for i in range(8)}
    assert interpret_clear(out, ins) == interpret_clear(c, ins)


def test_tree_reduce_leaves_short_chains():
    c = Circuit()
    leaves = [c.add_input(1, f"x{i}") for i in range(3)]
    acc = c.add_node(GateKind.ADD, (leaves[0], leaves[1]))
    acc = c.add_node(GateKind.ADD, (acc, leaves[2]))
    reveal_out(c, acc)
    assert tree_reduce(c).nodes == c.nodes


def test_tree_reduce_respects_shared_intermediates():
    c = Circuit()
    leaves = [c.add_input(1, f"x{i}") for i in range(5)]
    acc = leaves[0]
    mids = []
    for leaf in leaves[1:]:
        acc = c.add_node(GateKind.ADD, (acc, leaf))
        mids.append(acc)
    # mids[1] has a second user, so the chain may only rebalance above it
    extra = c.add_node(GateKind.MUL, (mids[1], leaves[0]))
    s = c.add_node(GateKind.ADD, (acc, extra))
    reveal_out(c, s)
    out = tree_reduce(c)
    ins = {(1, f"x{i}"): i + 1 for i in range(5)}
    assert interpret_clear(out, ins) == interpret_clear(c, ins)


# -- pipeline properties --

def test_pipeline_idempotent_on_corpus():
    for name in ("gcd", "auction", "mergesort", "matvec", "pow8"):
        c = build(name, bitwidth=16)
        once = run_passes(c)
        twice = run_passes(once)
        assert twice.nodes == once.nodes
        assert twice.outputs == once.outputs


def test_unknown_pass_rejected():
    from mpcc.errors import LowerError
    with pytest.raises(LowerError):
        run_passes(build("pow8"), ["mystery_pass"])


@pytest.mark.parametrize("seed", range(120))
def test_passes_preserve_semantics_and_never_grow(seed):
    program = random_program(seed)
    tp = check_program(program, Generic())
    c0 = lower_program(tp, LowerConfig(pow_rewrite=False))
    c1 = run_passes(c0)
    assert len(c1.nodes) <= len(c0.nodes)
    for name, fn in (("cse", cse), ("dce", dce), ("peephole", peephole),
                     ("strength_reduce", strength_reduce)):
        assert len(fn(c0).nodes) <= len(c0.nodes), name
    for j in range(3):
        ins = random_inputs(seed * 101 + j)
        assert interpret_clear(c0, ins) == interpret_clear(c1, ins)
        assert interpret_clear(c1, ins) == reference_run(program, ins)


def test_peephole_double_negation_and_xor_zero():
    from mpcc.circuit import Level
    c = Circuit(Level.BOOL)
    a = c.add_node(GateKind.INPUT_BIT, ())
    c.inputs.append((a, 1, "a"))
    z = c.add_node(GateKind.CONST_BIT, (), payload=0)
    n1 = c.add_node(GateKind.NOT, (a,))
    n2 = c.add_node(GateKind.NOT, (n1,))
    x = c.add_node(GateKind.XOR, (n2, z))
    r = c.add_node(GateKind.REVEAL_BIT, (x,), PlainMeta(owners(1)))
    c.add_output(r, owners(1), "out")
    out = dce(peephole(peephole(c)))
    assert GateKind.NOT not in out.counts()
    assert GateKind.XOR not in out.counts()
