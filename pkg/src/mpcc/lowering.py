"""Lowering from a type-checked program to a validated arithmetic circuit.

Every expression is translated directly into gates ("2+3" really emits
Const/Const/Add); alongside each wire the lowering tracks a static value
when one is known at compile time. Static values drive everything that
must be resolved during compilation: loop unrolling, recursion fuel,
array lengths, slice bounds and plaintext array indices. Private control
flow never consults values, so the produced circuit is a function of the
program and its public parameters only.
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuit import (
    Circuit, EncMeta, GateKind, Level, PLAIN, PlainMeta, SharedMeta,
    combine_meta,
)
from .errors import LowerError
from .frontend import syntax as S
from .sectypes import AdditiveShare, Generic, Scheme
from .typecheck import TypedProgram


@dataclass
class LowerConfig:
    bitwidth: int = 64
    target_level: Level = Level.ARITH
    comparison_encoding: str = "auto"  # "direct" | "rewrite" | "auto"
    scheme: Scheme = Generic()
    keep_selectors: bool = True  # emit Mux gates instead of b*x + (1-b)*y
    pow_rewrite: bool = True     # square-and-multiply instead of a chain

    def __post_init__(self):
        if not (2 <= self.bitwidth <= 64):
            raise LowerError("BadBitwidth",
                             f"bitwidth {self.bitwidth} outside [2, 64]")
        if self.comparison_encoding not in ("direct", "rewrite", "auto"):
            raise LowerError("BadEncoding", self.comparison_encoding)


@dataclass(frozen=True)
class Wire:
    nid: int
    static: int | bool | None = None


Value = Wire | list  # arrays are lists of Wire


class Scope:
    """Lexical environment; tracking scopes buffer writes to outer names
    so both branches of an oblivious conditional can be merged."""

    def __init__(self, parent: "Scope | None" = None, track: bool = False):
        self.vars: dict[str, Value] = {}
        self.parent = parent
        self.track = track
        self.writes: dict[str, Value] = {}

    def lookup(self, name: str) -> Value:
        if name in self.vars:
            return self.vars[name]
        if name in self.writes:
            return self.writes[name]
        if self.parent is not None:
            return self.parent.lookup(name)
        raise LowerError("Unbound", f"variable '{name}'")

    def declare(self, name: str, v: Value):
        self.vars[name] = v

    def assign(self, name: str, v: Value):
        if name in self.vars:
            self.vars[name] = v
        elif self.track:
            self.writes[name] = v
        elif self.parent is not None:
            self.parent.assign(name, v)
        else:
            raise LowerError("Unbound", f"assignment to '{name}'")


def branch_has_effects(block: S.Block) -> bool:
    """Outputs, reveals and inputs inside an oblivious branch cannot be
    made data independent; they are detected syntactically."""
    exprs = []
    for st in S.walk_stmts(block):
        match st:
            case S.Output():
                return True
            case S.ValDecl(init=e) | S.Assign(value=e):
                exprs.append(e)
            case S.ArrUpdate(index=i, value=v):
                exprs += [i, v]
            case S.While(bound=b):
                exprs.append(b)
            case S.IfStmt(cond=c):
                exprs.append(c)
    for root in exprs:
        for e in S.walk_exprs(root):
            if isinstance(e, (S.Eval, S.InputExpr)):
                return True
    return False


def expr_calls(e: S.Expr, name: str) -> bool:
    return any(isinstance(sub, S.Call) and sub.name == name
               for sub in S.walk_exprs(e))


class Lowering:
    def __init__(self, tp: TypedProgram, cfg: LowerConfig):
        self.tp = tp
        self.cfg = cfg
        self.circuit = Circuit(Level.ARITH, cfg.bitwidth)
        self.functions = {f.name: f for f in tp.program.functions}
        self.inline_stack: dict[str, int | None] = {}
        self.out_counter = 0
        self.out_names: set[str] = set()
        self.stats = {"inline_copies": {}, "base_copies": {}}

    # -- gate emission helpers --

    def emit(self, kind: GateKind, operands: list[Wire], static=None,
             payload=None, meta=None) -> Wire:
        if meta is None:
            meta = PLAIN
            for w in operands:
                meta = combine_meta(meta, self.circuit.nodes[w.nid].meta,
                                    self.cfg.scheme)
        nid = self.circuit.add_node(kind, [w.nid for w in operands], meta,
                                    payload)
        return Wire(nid, static)

    def const(self, value) -> Wire:
        payload = int(value)
        return self.emit(GateKind.CONST, [], static=value, payload=payload)

    def input_meta(self, party: int):
        if isinstance(self.cfg.scheme, AdditiveShare):
            players = frozenset(range(self.cfg.scheme.n))
            if party not in players:
                raise LowerError(
                    "PartyOutOfRange",
                    f"party {party} does not fit {self.cfg.scheme.n}-party "
                    f"additive sharing")
            return SharedMeta(frozenset({party}), players, players,
                              self.cfg.scheme.n)
        return EncMeta(frozenset({party}))

    def add_binary(self, kind: GateKind, a: Wire, b: Wire, static) -> Wire:
        return self.emit(kind, [a, b], static)

    def mux(self, cond: Wire, then: Wire, els: Wire) -> Wire:
        if self.cfg.keep_selectors:
            return self.emit(GateKind.MUX, [cond, then, els])
        # b*x + (1 - b)*y
        one = self.const(1)
        nb = self.emit(GateKind.SUB, [one, cond])
        t = self.emit(GateKind.MUL, [cond, then])
        e = self.emit(GateKind.MUL, [nb, els])
        return self.emit(GateKind.ADD, [t, e])

    def mux_value(self, cond: Wire, then: Value, els: Value) -> Value:
        if isinstance(then, list) or isinstance(els, list):
            if not (isinstance(then, list) and isinstance(els, list)
                    and len(then) == len(els)):
                raise LowerError("ArrayShape",
                                 "oblivious branches produce arrays of "
                                 "different shape")
            return [self.mux_value(cond, t, e) for t, e in zip(then, els)]
        return self.mux(cond, then, els)

    # -- program entry --

    def lower_program(self) -> Circuit:
        root = Scope()
        self.lower_block(self.tp.program.main, root)
        return self.circuit

    def lower_block(self, block: S.Block, scope: Scope):
        for st in block.stmts:
            self.lower_stmt(st, scope)

    # -- statements --

    def lower_stmt(self, st: S.Stmt, scope: Scope):
        match st:
            case S.Skip():
                return
            case S.ValDecl(name=name, ty=ty, init=init):
                self.decl_name = name  # input nodes keep the declared name
                scope.declare(name, self.lower_decl_init(ty, init, scope))
            case S.Assign(name=name, value=value):
                scope.assign(name, self.lower_expr(value, scope))
            case S.ArrUpdate(name=name, index=idx, value=value):
                self.lower_update(st, scope)
            case S.While():
                self.unroll_while(st, scope)
            case S.IfStmt():
                self.lower_if_stmt(st, scope)
            case S.Output(expr=expr):
                self.lower_output(expr, scope)
            case _:
                raise AssertionError(st)

    def lower_decl_init(self, ty, init, scope) -> Value:
        if isinstance(ty, S.ArrType) and not isinstance(init, S.InputExpr):
            v = self.lower_expr(init, scope)
            if isinstance(v, list):
                return v
            # scalar initializer fills a fresh array of the declared length
            length = self.static_int(ty.length, scope, "NonConstLength",
                                     "array length")
            return [self.emit_fill(v) for _ in range(length)]
        return self.lower_expr(init, scope)

    def emit_fill(self, v: Wire) -> Wire:
        if v.static is not None:
            return self.const(v.static)
        return v

    def lower_update(self, st: S.ArrUpdate, scope: Scope):
        arr = scope.lookup(st.name)
        if not isinstance(arr, list):
            raise LowerError("NotArray", st.name, st.pos)
        idx = self.lower_expr(st.index, scope)
        val = self.lower_expr(st.value, scope)
        if idx.static is not None:
            k = int(idx.static)
            if not (0 <= k < len(arr)):
                raise LowerError("IndexOutOfRange",
                                 f"{st.name}({k}) with length {len(arr)}",
                                 st.pos)
            new = list(arr)
            new[k] = val
        else:
            new = self.private_update(arr, idx, val)
        scope.assign(st.name, new)

    def private_update(self, arr: list[Wire], idx: Wire,
                       val: Wire) -> list[Wire]:
        if not arr:
            raise LowerError("EmptyArray", "update of empty array")
        out = []
        for k, old in enumerate(arr):
            hit = self.emit(GateKind.EQ, [idx, self.const(k)])
            out.append(self.mux(hit, val, old))
        return out

    def unroll_while(self, st: S.While, scope: Scope):
        bound_w = self.lower_expr(st.bound, scope)
        if bound_w.static is None:
            raise LowerError("NonConstBound",
                             "while bound is not a compile-time constant",
                             st.pos)
        bound = int(bound_w.static)
        counter = scope.lookup(st.var)
        if not isinstance(counter, Wire) or counter.static is None:
            raise LowerError("NonConstBound",
                             f"loop counter '{st.var}' is not a compile-time "
                             f"constant", st.pos)
        while True:
            current = scope.lookup(st.var)
            if not isinstance(current, Wire) or current.static is None:
                raise LowerError("NonConstBound",
                                 f"loop counter '{st.var}' lost its "
                                 f"compile-time value", st.pos)
            if int(current.static) >= bound:
                break
            body_scope = Scope(scope)
            self.lower_block(st.body, body_scope)
            after = scope.lookup(st.var)
            if (not isinstance(after, Wire) or after.static is None
                    or int(after.static) <= int(current.static)):
                raise LowerError("LoopCounterStuck",
                                 f"loop counter '{st.var}' must strictly "
                                 f"increase each iteration", st.pos)

    def lower_if_stmt(self, st: S.IfStmt, scope: Scope):
        cond = self.lower_expr(st.cond, scope)
        if cond.static is not None:
            taken = st.then if cond.static else st.els
            if taken is not None:
                self.lower_block(taken, Scope(scope))
            return
        for block in (st.then, st.els):
            if block is not None and branch_has_effects(block):
                raise LowerError("SideEffectUndetectable",
                                 "oblivious branches may not contain "
                                 "output, eval or input", st.pos)
        then_scope = Scope(scope, track=True)
        self.lower_block(st.then, then_scope)
        else_scope = Scope(scope, track=True)
        if st.els is not None:
            self.lower_block(st.els, else_scope)
        for name in sorted(set(then_scope.writes) | set(else_scope.writes)):
            before = scope.lookup(name)
            t = then_scope.writes.get(name, before)
            e = else_scope.writes.get(name, before)
            scope.assign(name, self.mux_value(cond, t, e))

    def lower_output(self, expr: S.Expr, scope: Scope):
        if isinstance(expr, S.Eval):
            wire = self.lower_expr(expr, scope)  # emits the Reveal node
            audience = frozenset(expr.audience)
            name = expr.expr.name if isinstance(expr.expr, S.Var) else None
        else:
            value = self.lower_expr(expr, scope)
            audience = frozenset(self.tp.program.parties) or frozenset({0})
            wire = self.emit(GateKind.REVEAL, [value],
                             meta=PlainMeta(audience))
            name = expr.name if isinstance(expr, S.Var) else None
        if name is None or name in self.out_names:
            name = f"out{self.out_counter}"
        self.out_counter += 1
        self.out_names.add(name)
        self.circuit.add_output(wire.nid, audience, name)

    # -- expressions --

    def lower_expr(self, e: S.Expr, scope: Scope) -> Value:
        match e:
            case S.IntLit(value=v):
                return self.const(v)
            case S.BoolLit(value=v):
                return self.const(v)
            case S.Var(name=name):
                return scope.lookup(name)
            case S.Eval(audience=aud, expr=sub):
                v = self.lower_expr(sub, scope)
                if isinstance(v, list):
                    raise LowerError("EvalArray", "eval of an array", e.pos)
                return self.emit(GateKind.REVEAL, [v], static=v.static,
                                 meta=PlainMeta(frozenset(aud)))
            case S.BinOp():
                return self.lower_binop(e, scope)
            case S.IfExpr(cond=c, then=t, els=f):
                cond = self.lower_expr(c, scope)
                if cond.static is not None:
                    return self.lower_expr(t if cond.static else f, scope)
                return self.mux_value(cond, self.lower_expr(t, scope),
                                      self.lower_expr(f, scope))
            case S.Call():
                return self.lower_call(e, scope)
            case S.ArrIndex(name=name, index=idx):
                arr = self.expect_array(name, scope, e.pos)
                iw = self.lower_expr(idx, scope)
                if iw.static is not None:
                    k = int(iw.static)
                    if not (0 <= k < len(arr)):
                        raise LowerError("IndexOutOfRange",
                                         f"{name}({k}) with length {len(arr)}",
                                         e.pos)
                    return arr[k]
                return self.private_index(arr, iw)
            case S.ArrSlice(name=name, lo=lo, hi=hi):
                arr = self.expect_array(name, scope, e.pos)
                lo_v = self.static_int(lo, scope, "NonConstLength",
                                       "slice bound")
                hi_v = self.static_int(hi, scope, "NonConstLength",
                                       "slice bound")
                if not (0 <= lo_v <= hi_v <= len(arr)):
                    raise LowerError("SliceOutOfRange",
                                     f"slice({lo_v}, {hi_v}) of length "
                                     f"{len(arr)}", e.pos)
                return arr[lo_v:hi_v]
            case S.ArrLen(name=name):
                arr = self.expect_array(name, scope, e.pos)
                return self.const(len(arr))
            case S.Reduce(op=op, array=arr_e):
                arr = self.lower_expr(arr_e, scope)
                if not isinstance(arr, list):
                    raise LowerError("NotArray", "reduce of a scalar", e.pos)
                if not arr:
                    raise LowerError("EmptyArray", "reduce of empty array",
                                     e.pos)
                return self.balanced_reduce(op, arr)
            case S.Pow(base=b, exponent=n):
                return self.lower_pow(self.lower_expr(b, scope), n)
            case S.InputExpr(party=party, ty=ty):
                return self.lower_input(e, party, ty, scope)
        raise AssertionError(e)

    def expect_array(self, name, scope, pos) -> list:
        v = scope.lookup(name)
        if not isinstance(v, list):
            raise LowerError("NotArray", name, pos)
        return v

    def static_int(self, expr, scope, code, what) -> int:
        if expr is None:
            raise LowerError(code, f"{what} is missing")
        w = self.lower_expr(expr, scope)
        if not isinstance(w, Wire) or w.static is None:
            raise LowerError(code, f"{what} is not a compile-time constant",
                             expr.pos)
        return int(w.static)

    def lower_input(self, e, party, ty, scope) -> Value:
        meta = self.input_meta(party)
        name = self.decl_name
        if isinstance(ty, S.ArrType):
            length = self.static_int(ty.length, scope, "NonConstLength",
                                     "input array length")
            wires = []
            for k in range(length):
                nid = self.circuit.add_node(GateKind.INPUT, (), meta)
                self.circuit.inputs.append((nid, party, f"{name}[{k}]"))
                wires.append(Wire(nid))
            return wires
        nid = self.circuit.add_node(GateKind.INPUT, (), meta)
        self.circuit.inputs.append((nid, party, name))
        return Wire(nid)

    decl_name = "in"

    # -- operators --

    def lower_binop(self, e: S.BinOp, scope: Scope) -> Wire:
        op = e.op
        a = self.lower_expr(e.lhs, scope)
        b = self.lower_expr(e.rhs, scope)
        if isinstance(a, list) or isinstance(b, list):
            raise LowerError("NotScalar", f"'{op}' on arrays", e.pos)
        sa, sb = a.static, b.static
        if op == "+":
            st = sa + sb if sa is not None and sb is not None else None
            return self.add_binary(GateKind.ADD, a, b, st)
        if op == "-":
            st = sa - sb if sa is not None and sb is not None else None
            return self.add_binary(GateKind.SUB, a, b, st)
        if op == "*":
            return self.lower_mul(a, b)
        if op == "/":
            if sa is None or sb is None:
                raise LowerError("NonConstDivisor",
                                 "division needs compile-time operands",
                                 e.pos)
            if sb == 0:
                raise LowerError("DivisionByZero", "division by zero", e.pos)
            q = int(sa) // int(sb)
            return self.const(q)
        if op == "%":
            return self.lower_mod(a, b, e.pos)
        if op in ("<", "<=", ">", ">=", "==", "!="):
            return self.lower_comparison(op, a, b)
        if op in ("&&", "||"):
            return self.lower_logic(op, a, b)
        raise AssertionError(op)

    def lower_mul(self, a: Wire, b: Wire) -> Wire:
        sa, sb = a.static, b.static
        st = sa * sb if sa is not None and sb is not None else None
        if sb is not None and sa is None:
            return self.emit(GateKind.MUL_PLAIN, [a], static=st,
                             payload=int(sb))
        if sa is not None and sb is None:
            return self.emit(GateKind.MUL_PLAIN, [b], static=st,
                             payload=int(sa))
        return self.add_binary(GateKind.MUL, a, b, st)

    def lower_mod(self, a: Wire, b: Wire, pos) -> Wire:
        if b.static is None:
            raise LowerError("NonConstDivisor",
                             "modulo divisor must be a compile-time constant",
                             pos)
        m = int(b.static)
        if m <= 0:
            raise LowerError("DivisionByZero", f"modulo by {m}", pos)
        if a.static is not None:
            return self.const(int(a.static) % m)
        # conditional subtraction of shifted multiples; dividend must be
        # nonnegative and below 2^(bitwidth-2)
        r = a
        max_shift = max(0, self.cfg.bitwidth - 2 - m.bit_length() + 1)
        for j in range(max_shift, -1, -1):
            c = self.const(m << j)
            fits = self.emit(GateKind.LEQ, [c, r])
            diff = self.emit(GateKind.SUB, [r, c])
            r = self.mux(fits, diff, r)
        return Wire(r.nid, None)

    def lower_comparison(self, op: str, a: Wire, b: Wire) -> Wire:
        sa, sb = a.static, b.static
        st = None
        if sa is not None and sb is not None:
            st = {"<": sa < sb, "<=": sa <= sb, ">": sa > sb, ">=": sa >= sb,
                  "==": sa == sb, "!=": sa != sb}[op]
        if op == "<":
            return self.add_binary(GateKind.LT, a, b, st)
        if op == ">":
            return self.add_binary(GateKind.LT, b, a, st)
        if op == "==":
            return self.add_binary(GateKind.EQ, a, b, st)
        rewrite = self.cfg.comparison_encoding == "rewrite"
        if op == ">=":
            if rewrite:
                return self.negate_bit(self.emit(GateKind.LT, [a, b]), st)
            lt = self.emit(GateKind.LT, [b, a])
            eq = self.emit(GateKind.EQ, [a, b])
            return self.add_binary(GateKind.ADD, lt, eq, st)
        if op == "<=":
            if rewrite:
                return self.negate_bit(self.emit(GateKind.LT, [b, a]), st)
            lt = self.emit(GateKind.LT, [a, b])
            eq = self.emit(GateKind.EQ, [a, b])
            return self.add_binary(GateKind.ADD, lt, eq, st)
        if op == "!=":
            if rewrite:
                return self.negate_bit(self.emit(GateKind.EQ, [a, b]), st)
            lt = self.emit(GateKind.LT, [a, b])
            gt = self.emit(GateKind.LT, [b, a])
            return self.add_binary(GateKind.ADD, lt, gt, st)
        raise AssertionError(op)

    def negate_bit(self, w: Wire, static) -> Wire:
        one = self.const(1)
        return self.emit(GateKind.SUB, [one, w], static=static)

    def lower_logic(self, op: str, a: Wire, b: Wire) -> Wire:
        sa, sb = a.static, b.static
        st = None
        if sa is not None and sb is not None:
            st = bool(sa and sb) if op == "&&" else bool(sa or sb)
        if op == "&&":
            return self.add_binary(GateKind.MUL, a, b, st)
        # a || b  ==  a + b - a*b on {0,1}
        s = self.emit(GateKind.ADD, [a, b])
        p = self.emit(GateKind.MUL, [a, b])
        return self.add_binary(GateKind.SUB, s, p, st)

    def lower_pow(self, base: Value, n: int) -> Wire:
        if isinstance(base, list):
            raise LowerError("NotScalar", "pow of an array")
        st = base.static ** n if base.static is not None else None
        if n == 0:
            return self.const(1)
        if not self.cfg.pow_rewrite:
            acc = base
            for _ in range(n - 1):
                acc = self.emit(GateKind.MUL, [acc, base])
            return Wire(acc.nid, st)
        memo: dict[int, Wire] = {1: base}

        def pw(k: int) -> Wire:
            if k in memo:
                return memo[k]
            if k % 2 == 0:
                half = pw(k // 2)
                out = self.emit(GateKind.MUL, [half, half])
            else:
                out = self.emit(GateKind.MUL, [base, pw(k - 1)])
            memo[k] = out
            return out

        return Wire(pw(n).nid, st)

    def balanced_reduce(self, op: str, wires: list[Wire]) -> Wire:
        def combine(x: Wire, y: Wire) -> Wire:
            if op == "+":
                return self.emit(GateKind.ADD, [x, y])
            if op == "*":
                return self.emit(GateKind.MUL, [x, y])
            if op == "max":
                return self.mux(self.emit(GateKind.LT, [x, y]), y, x)
            if op == "min":
                return self.mux(self.emit(GateKind.LT, [y, x]), y, x)
            raise AssertionError(op)

        layer = list(wires)
        while len(layer) > 1:
            nxt = []
            for i in range(0, len(layer) - 1, 2):
                nxt.append(combine(layer[i], layer[i + 1]))
            if len(layer) % 2:
                nxt.append(layer[-1])
            layer = nxt
        return layer[0]

    def private_index(self, arr: list[Wire], idx: Wire) -> Wire:
        """Balanced multiplexer tree; selector depth is ceil(log2 len)."""
        if not arr:
            raise LowerError("EmptyArray", "index into empty array")

        def select(lo: int, wires: list[Wire]) -> Wire:
            if len(wires) == 1:
                return wires[0]
            half = (len(wires) + 1) // 2
            pivot = self.const(lo + half)
            in_left = self.emit(GateKind.LT, [idx, pivot])
            left = select(lo, wires[:half])
            right = select(lo + half, wires[half:])
            return self.mux(in_left, left, right)

        return select(0, arr)

    # -- calls and fuel --

    def lower_call(self, e: S.Call, scope: Scope) -> Value:
        fn = self.functions.get(e.name)
        if fn is None:
            raise LowerError("UnknownFunction", e.name, e.pos)
        args = [self.lower_expr(a, scope) for a in e.args]
        if e.name in self.inline_stack:
            remaining = self.inline_stack[e.name]
            if remaining is None:
                raise LowerError("BoundMissing",
                                 f"recursive function '{e.name}' has no "
                                 f"bound annotation", e.pos)
            if remaining <= 0:
                # recursion outside a collapsible result conditional
                raise LowerError("FuelExhausted",
                                 f"'{e.name}' still recursing with no fuel "
                                 f"left", e.pos)
            fuel = remaining - 1
        elif fn.bound is not None:
            fuel = self.eval_bound(fn, args, e.pos)
        else:
            fuel = None
        return self.inline_with_fuel(fn, args, fuel)

    def eval_bound(self, fn: S.FuncDef, args: list[Value], pos) -> int:
        env = Scope()
        for (pname, _ty), v in zip(fn.params, args):
            env.declare(pname, v)
        w = self.lower_expr(fn.bound, env)
        if not isinstance(w, Wire) or w.static is None:
            raise LowerError("NonConstBound",
                             f"bound of '{fn.name}' is not a compile-time "
                             f"constant", pos)
        d = int(w.static)
        if d < 0:
            raise LowerError("BoundNegative",
                             f"bound of '{fn.name}' evaluated to {d}", pos)
        return d

    def inline_with_fuel(self, fn: S.FuncDef, args: list[Value],
                         fuel: int | None) -> Value:
        env = Scope()
        for (pname, _ty), v in zip(fn.params, args):
            env.declare(pname, v)
        saved = self.inline_stack.get(fn.name, "absent")
        self.inline_stack[fn.name] = fuel
        counter = "base_copies" if fuel == 0 else "inline_copies"
        self.stats[counter][fn.name] = self.stats[counter].get(fn.name, 0) + 1
        try:
            self.lower_block(fn.body, env)
            result = self.lower_result(fn, fn.body.result, env, fuel)
        finally:
            if saved == "absent":
                del self.inline_stack[fn.name]
            else:
                self.inline_stack[fn.name] = saved
        return result

    def lower_result(self, fn: S.FuncDef, expr: S.Expr, env: Scope,
                     fuel: int | None) -> Value:
        """Lower a function result; with exhausted fuel, conditionals whose
        one branch recurses collapse to the other branch unconditionally."""
        if isinstance(expr, S.IfExpr):
            rec_then = expr_calls(expr.then, fn.name)
            rec_else = expr_calls(expr.els, fn.name)
            if rec_then or rec_else:
                cond = self.lower_expr(expr.cond, env)
                if cond.static is not None:
                    taken = expr.then if cond.static else expr.els
                    if expr_calls(taken, fn.name) and fuel == 0:
                        raise LowerError(
                            "FuelExhausted",
                            f"'{fn.name}' still recursing with no fuel left",
                            expr.pos)
                    return self.lower_result(fn, taken, env, fuel)
                if fuel == 0:
                    if rec_then and rec_else:
                        raise LowerError("NoBaseCase",
                                         f"'{fn.name}' recurses in both "
                                         f"branches", expr.pos)
                    base = expr.els if rec_then else expr.then
                    return self.lower_result(fn, base, env, fuel)
                then_v = self.lower_result(fn, expr.then, env, fuel)
                else_v = self.lower_result(fn, expr.els, env, fuel)
                return self.mux_value(cond, then_v, else_v)
        if fuel == 0 and expr_calls(expr, fn.name):
            raise LowerError("FuelExhausted",
                             f"'{fn.name}' recurses unconditionally",
                             expr.pos)
        return self.lower_expr(expr, env)


def lower_with_stats(tp: TypedProgram,
                     cfg: LowerConfig | None = None) -> tuple[Circuit, dict]:
    """Like lower_program, also returning the inlining statistics."""
    cfg = cfg or LowerConfig()
    lw = Lowering(tp, cfg)
    circuit = lw.lower_program()
    violations = circuit.validate(cfg.scheme)
    if violations:
        raise LowerError("InvalidCircuit", "; ".join(violations))
    if cfg.target_level == Level.BOOL:
        from .bitblast import bitblast
        circuit = bitblast(circuit, cfg.bitwidth)
    return circuit, lw.stats


def lower_program(tp: TypedProgram, cfg: LowerConfig | None = None) -> Circuit:
    """Compile a typed program to a validated circuit at cfg.target_level."""
    circuit, _stats = lower_with_stats(tp, cfg)
    return circuit
