"""Big-step reference interpreter over the typed AST.

Independent of the circuit pipeline: statements execute, conditionals
branch, loops loop. The only circuit-flavored bits are the ones the
language definition itself fixes: recursion fuel falls back to the
non-recursive branch when exhausted, and private indexing clamps out-of-
range indices to the nearest end (the multiplexer tree does the same).
"""

from mpcc.frontend import syntax as S
from mpcc.lowering import expr_calls


class RefError(Exception):
    pass


class RefInterp:
    def __init__(self, program: S.Program,
                 inputs: dict[tuple[int, str], int]):
        self.program = program
        self.functions = {f.name: f for f in program.functions}
        self.inputs = inputs
        self.outputs: dict[str, int] = {}
        self.out_counter = 0
        self.fuel: dict[str, int] = {}

    def run(self) -> dict[str, int]:
        env: dict = {}
        self.exec_block(self.program.main, env)
        return self.outputs

    # -- statements --

    def exec_block(self, block: S.Block, env: dict):
        for st in block.stmts:
            self.exec_stmt(st, env)

    def exec_stmt(self, st: S.Stmt, env: dict):
        match st:
            case S.Skip():
                pass
            case S.ValDecl(name=name, ty=ty, init=init):
                v = self.eval(init, env, name=name)
                if isinstance(ty, S.ArrType) and not isinstance(v, list):
                    length = self.eval(ty.length, env)
                    v = [v] * length
                env[name] = v
            case S.Assign(name=name, value=value):
                env[name] = self.eval(value, env)
            case S.ArrUpdate(name=name, index=idx, value=value):
                arr = list(env[name])
                i = self.eval(idx, env)
                v = self.eval(value, env)
                if 0 <= i < len(arr):
                    arr[i] = v
                env[name] = arr
            case S.While(var=var, bound=bound, body=body):
                limit = self.eval(bound, env)
                while env[var] < limit:
                    before = env[var]
                    self.exec_stmt_scope(body, env)
                    if env[var] <= before:
                        raise RefError("loop counter stuck")
            case S.IfStmt(cond=c, then=t, els=f):
                if self.eval(c, env):
                    self.exec_stmt_scope(t, env)
                elif f is not None:
                    self.exec_stmt_scope(f, env)
            case S.Output(expr=expr):
                v = self.eval(expr, env)
                name = None
                if isinstance(expr, S.Eval) and isinstance(expr.expr, S.Var):
                    name = expr.expr.name
                elif isinstance(expr, S.Var):
                    name = expr.name
                if name is None or name in self.outputs:
                    name = f"out{self.out_counter}"
                self.out_counter += 1
                self.outputs[name] = int(v)
            case _:
                raise AssertionError(st)

    def exec_stmt_scope(self, block: S.Block, env: dict):
        """Nested blocks: declarations are local, assignments escape."""
        inner = dict(env)
        self.exec_block(block, inner)
        for name in env:
            env[name] = inner[name]

    # -- expressions --

    def eval(self, e: S.Expr, env: dict, name: str | None = None):
        match e:
            case S.IntLit(value=v):
                return v
            case S.BoolLit(value=v):
                return int(v)
            case S.Var(name=n):
                return env[n]
            case S.Eval(expr=sub):
                return self.eval(sub, env)
            case S.BinOp(op=op, lhs=a, rhs=b):
                x, y = self.eval(a, env), self.eval(b, env)
                return self.binop(op, x, y)
            case S.IfExpr(cond=c, then=t, els=f):
                return self.eval(t if self.eval(c, env) else f, env)
            case S.Call(name=fname, args=args):
                return self.call(fname, [self.eval(a, env) for a in args])
            case S.ArrIndex(name=n, index=idx):
                arr = env[n]
                i = self.eval(idx, env)
                return arr[min(max(i, 0), len(arr) - 1)]
            case S.ArrSlice(name=n, lo=lo, hi=hi):
                return env[n][self.eval(lo, env):self.eval(hi, env)]
            case S.ArrLen(name=n):
                return len(env[n])
            case S.Reduce(op=op, array=arr_e):
                arr = self.eval(arr_e, env)
                acc = arr[0]
                for v in arr[1:]:
                    acc = {"+": acc + v, "*": acc * v,
                           "max": max(acc, v), "min": min(acc, v)}[op]
                return acc
            case S.Pow(base=b, exponent=n):
                return self.eval(b, env) ** n
            case S.InputExpr(party=party, ty=ty):
                if isinstance(ty, S.ArrType):
                    length = self.eval(ty.length, env)
                    return [self.inputs[(party, f"{name}[{k}]")]
                            for k in range(length)]
                return self.inputs[(party, name)]
        raise AssertionError(e)

    def binop(self, op, x, y):
        match op:
            case "+":
                return x + y
            case "-":
                return x - y
            case "*":
                return x * y
            case "/":
                return int(x) // int(y)
            case "%":
                return x % y
            case "<":
                return int(x < y)
            case "<=":
                return int(x <= y)
            case ">":
                return int(x > y)
            case ">=":
                return int(x >= y)
            case "==":
                return int(x == y)
            case "!=":
                return int(x != y)
            case "&&":
                return int(bool(x) and bool(y))
            case "||":
                return int(bool(x) or bool(y))
        raise AssertionError(op)

    # -- calls with fuel --

    def call(self, fname: str, args: list):
        fn = self.functions[fname]
        if fname in self.fuel:
            if self.fuel[fname] is None:
                raise RefError("recursion without a bound")
            if self.fuel[fname] <= 0:
                raise RefError("fuel exhausted")
            fuel = self.fuel[fname] - 1
        elif fn.bound is not None:
            env = {p: v for (p, _t), v in zip(fn.params, args)}
            fuel = self.eval(fn.bound, env)
            if fuel < 0:
                raise RefError("negative bound")
        else:
            fuel = None
        env = {p: v for (p, _t), v in zip(fn.params, args)}
        saved = self.fuel.get(fname, "absent")
        self.fuel[fname] = fuel
        try:
            self.exec_block(fn.body, env)
            return self.result(fn, fn.body.result, env, fuel)
        finally:
            if saved == "absent":
                del self.fuel[fname]
            else:
                self.fuel[fname] = saved

    def result(self, fn, expr, env, fuel):
        if fuel == 0 and isinstance(expr, S.IfExpr):
            rec_then = expr_calls(expr.then, fn.name)
            rec_else = expr_calls(expr.els, fn.name)
            if rec_then and rec_else:
                raise RefError("no base case")
            if rec_then or rec_else:
                return self.result(fn, expr.els if rec_then else expr.then,
                                   env, fuel)
        if fuel == 0 and expr_calls(expr, fn.name):
            raise RefError("fuel exhausted")
        return self.eval(expr, env)


def reference_run(program: S.Program,
                  inputs: dict[tuple[int, str], int]) -> dict[str, int]:
    return RefInterp(program, inputs).run()
