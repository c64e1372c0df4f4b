"""n-out-of-n additive secret sharing over a prime field, with an
explicit offline phase (Beaver triples, random bits) feeding an online
gate-by-gate simulation.

All parties run inside one process, but their share tables are kept
separate: crossing them is only possible through `reconstruct`, and the
simulator logs every reconstruction with the context that performed it
(revealing an output, opening the masked Beaver values, or the idealized
comparison functionality). Comparisons never run a real bit-decomposition
protocol; they open the operands inside the functionality, compare, and
re-share the result bit, consuming the preprocessing budget a real
protocol would.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from ..circuit import Circuit, GateKind, Level
from ..errors import (
    BudgetExceededError, IncompleteSharesError, LevelError,
    MissingInputError, OverflowContractError, PlayerMismatchError,
    TripleExhaustedError,
)
from ..estimator import CostModel, additive_model, estimate

PRIME = (1 << 61) - 1
INPUT_LIMIT = 1 << 31

ROUNDS_PER_COMPARISON = 7
MULTICASTS_PER_COMPARISON = 7


def centered(v: int, p: int = PRIME) -> int:
    """Lift a field element to the integer in (-p/2, p/2]."""
    v %= p
    return v - p if v > p // 2 else v


@dataclass
class ShareVector:
    shares: list[int | None]
    players: frozenset
    threshold: int
    provider: frozenset = frozenset()
    observers: frozenset = frozenset()

    def __post_init__(self):
        if len(self.shares) != len(self.players):
            raise PlayerMismatchError(
                f"{len(self.shares)} shares for {len(self.players)} players")
        if self.threshold != len(self.players):
            raise PlayerMismatchError(
                "additive sharing is n-out-of-n: threshold must equal the "
                "player count")


def share(value: int, n: int, rng: random.Random, p: int = PRIME,
          provider: frozenset = frozenset(),
          observers: frozenset = frozenset()) -> ShareVector:
    """Split value into n additive shares: n-1 uniform, last one fixes
    the sum."""
    if n < 2:
        raise PlayerMismatchError("need at least 2 parties")
    parts = [rng.randrange(p) for _ in range(n - 1)]
    last = (value - sum(parts)) % p
    return ShareVector(parts + [last], frozenset(range(n)), n,
                       provider, observers)


def reconstruct(sv: ShareVector, p: int = PRIME) -> int:
    if any(s is None for s in sv.shares):
        missing = [i for i, s in enumerate(sv.shares) if s is None]
        raise IncompleteSharesError(
            f"shares of players {missing} are missing; all {sv.threshold} "
            f"are required")
    return sum(sv.shares) % p


@dataclass
class BeaverTriple:
    a: ShareVector
    b: ShareVector
    c: ShareVector
    consumed: bool = False


def make_triple(n: int, rng: random.Random, p: int = PRIME) -> BeaverTriple:
    a = rng.randrange(p)
    b = rng.randrange(p)
    return BeaverTriple(share(a, n, rng, p), share(b, n, rng, p),
                        share(a * b % p, n, rng, p))


def beaver_mul(x: ShareVector, y: ShareVector, t: BeaverTriple,
               p: int = PRIME) -> ShareVector:
    """One multiplication: open d = x-a and e = y-b, then combine
    c + d*b + e*a + d*e share-wise (the d*e constant lands on player 0)."""
    if x.players != y.players or x.players != t.a.players:
        raise PlayerMismatchError("operands and triple must share players")
    if t.consumed:
        raise TripleExhaustedError("Beaver triple already consumed")
    t.consumed = True
    d = (reconstruct(x, p) - reconstruct(t.a, p)) % p
    e = (reconstruct(y, p) - reconstruct(t.b, p)) % p
    out = []
    for i in range(len(x.shares)):
        s = (t.c.shares[i] + d * t.b.shares[i] + e * t.a.shares[i]) % p
        if i == 0:
            s = (s + d * e) % p
        out.append(s)
    return ShareVector(out, x.players, x.threshold,
                       x.provider | y.provider, x.observers | y.observers)


@dataclass
class ExecTrace:
    rounds: int = 0
    multicasts: int = 0
    triples_consumed: int = 0
    bits_consumed: int = 0

    def to_json_obj(self):
        return {"rounds": self.rounds, "multicasts": self.multicasts,
                "triples_consumed": self.triples_consumed,
                "bits_consumed": self.bits_consumed}


class SharedSimulator:
    """Executes one validated word-level circuit under additive sharing."""

    def __init__(self, circuit: Circuit, n: int, seed: int = 0,
                 model: CostModel | None = None):
        if circuit.level != Level.ARITH:
            raise LevelError("the sharing simulator runs word-level circuits")
        if n < 2:
            raise PlayerMismatchError("need at least 2 parties")
        self.circuit = circuit
        self.n = n
        self.model = model or additive_model()
        self.p = self.model.prime_modulus or PRIME
        self.rng = random.Random(seed)
        self.players = frozenset(range(n))
        self.trace = ExecTrace()
        self.open_log: list[tuple[str, int]] = []
        self.triples: list[BeaverTriple] = []
        self.random_bits: list[ShareVector] = []

    # -- offline phase --

    def offline_phase(self):
        """Generate exactly the budget the estimator computes for the
        circuit: triples for multiplications and comparisons, random bits
        for comparisons."""
        report = estimate(self.circuit, self.model)
        n_triples = math.ceil(report.triples)
        n_bits = math.ceil(report.random_bits)
        self.triples = [make_triple(self.n, self.rng, self.p)
                        for _ in range(n_triples)]
        self.random_bits = [share(self.rng.randrange(2), self.n, self.rng,
                                  self.p) for _ in range(n_bits)]

    def take_triple(self) -> BeaverTriple:
        while self.triples:
            t = self.triples.pop()
            if not t.consumed:
                self.trace.triples_consumed += 1
                return t
        raise BudgetExceededError(
            "online phase needs more Beaver triples than the offline phase "
            "produced")

    def take_bits(self, count: int):
        if count > len(self.random_bits):
            raise BudgetExceededError(
                "online phase needs more random bits than the offline phase "
                "produced")
        del self.random_bits[-count:]
        self.trace.bits_consumed += count

    # -- share-table access --

    def open(self, sv: ShareVector, context: str) -> int:
        """The only way values cross party boundaries; every use is
        logged with its context."""
        self.open_log.append((context, len(self.open_log)))
        return reconstruct(sv, self.p)

    def public(self, value: int) -> ShareVector:
        shares = [value % self.p] + [0] * (self.n - 1)
        return ShareVector(shares, self.players, self.n)

    def local(self, fn, *svs: ShareVector) -> ShareVector:
        """Apply a per-party local operation share-wise."""
        shares = [fn(*(sv.shares[i] for sv in svs)) % self.p
                  for i in range(self.n)]
        provider = frozenset().union(*(sv.provider for sv in svs))
        observers = frozenset().union(*(sv.observers for sv in svs))
        return ShareVector(shares, self.players, self.n, provider, observers)

    # -- online phase --

    def multiply(self, x: ShareVector, y: ShareVector) -> ShareVector:
        t = self.take_triple()
        t.consumed = True
        d = self.local(lambda xs, as_: xs - as_, x, t.a)
        e = self.local(lambda ys, bs: ys - bs, y, t.b)
        d_open = self.open(d, "beaver-open")
        e_open = self.open(e, "beaver-open")
        self.trace.rounds += 1
        self.trace.multicasts += 2
        out = []
        for i in range(self.n):
            s = (t.c.shares[i] + d_open * t.b.shares[i]
                 + e_open * t.a.shares[i]) % self.p
            if i == 0:
                s = (s + d_open * e_open) % self.p
            out.append(s)
        return ShareVector(out, self.players, self.n,
                           x.provider | y.provider, x.observers | y.observers)

    def compare(self, kind: GateKind, x: ShareVector,
                y: ShareVector) -> ShareVector:
        """Idealized comparison: operands are opened only inside this
        functionality, the result bit is re-shared, and the preprocessing
        cost of a real protocol is charged."""
        tpc = (self.model.triples_per_comparison
               if self.model.triples_per_comparison is not None
               else 20 * self.circuit.bitwidth)
        bpc = (self.model.bits_per_comparison
               if self.model.bits_per_comparison is not None
               else self.circuit.bitwidth)
        for _ in range(math.ceil(tpc)):
            self.take_triple()
        self.take_bits(math.ceil(bpc))
        self.trace.rounds += ROUNDS_PER_COMPARISON
        self.trace.multicasts += MULTICASTS_PER_COMPARISON
        a = centered(self.open(x, "comparison"), self.p)
        b = centered(self.open(y, "comparison"), self.p)
        bit = {GateKind.LT: a < b, GateKind.LEQ: a <= b,
               GateKind.EQ: a == b}[kind]
        return share(int(bit), self.n, self.rng, self.p,
                     x.provider | y.provider, x.observers | y.observers)

    def run(self, inputs: dict[tuple[int, str], int]) -> dict[str, int]:
        c = self.circuit
        self.offline_phase()
        table: list[ShareVector | None] = [None] * len(c.nodes)
        outputs: dict[str, int] = {}
        out_names = {nid: name for nid, _aud, name in c.outputs}
        for nid in c.topological_eval_order():
            node = c.nodes[nid]
            a = node.operands
            match node.kind:
                case GateKind.CONST:
                    sv = self.public(node.payload)
                case GateKind.INPUT:
                    party, name = next((p, nm) for i, p, nm in c.inputs
                                       if i == nid)
                    if (party, name) not in inputs:
                        raise MissingInputError(
                            f"missing input {name} from party {party}")
                    v = int(inputs[(party, name)])
                    if abs(v) >= INPUT_LIMIT:
                        raise OverflowContractError(
                            f"input {name}={v} exceeds |v| < 2^31")
                    sv = share(v, self.n, self.rng, self.p,
                               provider=frozenset({party}),
                               observers=self.players)
                case GateKind.ADD:
                    sv = self.local(lambda u, v: u + v, table[a[0]],
                                    table[a[1]])
                case GateKind.SUB:
                    sv = self.local(lambda u, v: u - v, table[a[0]],
                                    table[a[1]])
                case GateKind.MUL_PLAIN:
                    k = node.payload
                    sv = self.local(lambda u: u * k, table[a[0]])
                case GateKind.MUL:
                    sv = self.multiply(table[a[0]], table[a[1]])
                case GateKind.MUX:
                    # sel*(t - e) + e needs a single multiplication
                    diff = self.local(lambda t, e: t - e, table[a[1]],
                                      table[a[2]])
                    prod = self.multiply(table[a[0]], diff)
                    sv = self.local(lambda m, e: m + e, prod, table[a[2]])
                case GateKind.LT | GateKind.LEQ | GateKind.EQ:
                    sv = self.compare(node.kind, table[a[0]], table[a[1]])
                case GateKind.REVEAL:
                    v = centered(self.open(table[a[0]], "reveal"), self.p)
                    if nid in out_names:
                        outputs[out_names[nid]] = v
                    sv = self.public(v)
                case _:
                    raise LevelError(f"{node.kind.value} in word-level "
                                     f"circuit")
            table[nid] = sv
        return outputs


def simulate_shared(circuit: Circuit, inputs: dict[tuple[int, str], int],
                    n: int, seed: int = 0,
                    model: CostModel | None = None
                    ) -> tuple[dict[str, int], ExecTrace]:
    sim = SharedSimulator(circuit, n, seed, model)
    outputs = sim.run(inputs)
    return outputs, sim.trace
