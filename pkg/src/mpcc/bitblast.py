"""Word-to-bit lowering (two's complement, LSB first) and the reverse
mapping from boolean gates to arithmetic over Z_2.

Adders are ripple-carry with a full cell per bit (2 Xor, 2 And, 1 Or);
subtraction negates then adds; Lt copies the sign bit of the difference,
which is sound for |a-b| < 2^(bitwidth-1). Words whose value is known to
be a bit (comparison outputs and the like) are tracked so multiplying by
them degenerates to And gates instead of full multipliers.
"""

from __future__ import annotations

from .circuit import (
    Circuit, GateKind, Level, PLAIN, PlainMeta, combine_meta,
)
from .errors import BitblastError, LevelError


class _BitBuilder:
    def __init__(self, source: Circuit, width: int):
        self.out = Circuit(Level.BOOL, width, source.signed)
        self.width = width
        self._const_cache: dict[int, int] = {}

    def emit(self, kind, operands, meta=None, payload=None) -> int:
        if meta is None:
            meta = PLAIN
            for o in operands:
                meta = combine_meta(meta, self.out.nodes[o].meta)
        return self.out.add_node(kind, operands, meta, payload)

    def const_bit(self, b: int) -> int:
        if b not in self._const_cache:
            self._const_cache[b] = self.out.add_node(GateKind.CONST_BIT, (),
                                                     PLAIN, b)
        return self._const_cache[b]

    def const_word(self, value: int) -> list[int]:
        value &= (1 << self.width) - 1
        return [self.const_bit((value >> i) & 1) for i in range(self.width)]

    def full_adder(self, a: int, b: int, cin: int) -> tuple[int, int]:
        x1 = self.emit(GateKind.XOR, (a, b))
        s = self.emit(GateKind.XOR, (x1, cin))
        g = self.emit(GateKind.AND, (a, b))
        h = self.emit(GateKind.AND, (x1, cin))
        cout = self.emit(GateKind.OR, (g, h))
        return s, cout

    def ripple_add(self, a: list[int], b: list[int], cin: int) -> list[int]:
        out = []
        carry = cin
        for i in range(self.width):
            s, carry = self.full_adder(a[i], b[i], carry)
            out.append(s)
        return out

    def negate_then_add(self, a: list[int], b: list[int]) -> list[int]:
        nb = [self.emit(GateKind.NOT, (bit,)) for bit in b]
        return self.ripple_add(a, nb, self.const_bit(1))

    def sign_of_difference(self, a: list[int], b: list[int]) -> int:
        return self.negate_then_add(a, b)[self.width - 1]

    def zero_extend(self, bit: int) -> list[int]:
        zero = self.const_bit(0)
        return [bit] + [zero] * (self.width - 1)

    def and_tree(self, bits: list[int]) -> int:
        layer = list(bits)
        while len(layer) > 1:
            nxt = []
            for i in range(0, len(layer) - 1, 2):
                nxt.append(self.emit(GateKind.AND, (layer[i], layer[i + 1])))
            if len(layer) % 2:
                nxt.append(layer[-1])
            layer = nxt
        return layer[0]

    def equals(self, a: list[int], b: list[int]) -> int:
        xnors = [self.emit(GateKind.NOT, (self.emit(GateKind.XOR, (x, y)),))
                 for x, y in zip(a, b)]
        return self.and_tree(xnors)

    def scale_by_bit(self, bit: int, word: list[int]) -> list[int]:
        return [self.emit(GateKind.AND, (bit, w)) for w in word]

    def shifted(self, word: list[int], k: int) -> list[int]:
        zero = self.const_bit(0)
        return ([zero] * k + word)[:self.width]

    def multiply(self, a: list[int], b: list[int]) -> list[int]:
        acc = self.scale_by_bit(b[0], a)
        for j in range(1, self.width):
            row = self.scale_by_bit(b[j], a[:self.width - j])
            acc = self.ripple_add(acc, self.shifted(row, j),
                                  self.const_bit(0))
        return acc

    def mul_plain(self, a: list[int], c: int) -> list[int]:
        c &= (1 << self.width) - 1
        if c == 0:
            return self.const_word(0)
        acc = None
        for j in range(self.width):
            if (c >> j) & 1:
                term = self.shifted(a, j)
                acc = term if acc is None else self.ripple_add(
                    acc, term, self.const_bit(0))
        return acc


def bitblast(c: Circuit, width: int | None = None) -> Circuit:
    """Lower a word-level circuit to boolean gates; semantics are
    preserved modulo 2^width."""
    if c.level == Level.BOOL:
        raise LevelError("circuit is already at the bool level")
    width = width or c.bitwidth
    bb = _BitBuilder(c, width)
    bits: dict[int, list[int]] = {}
    boolish: set[int] = set()
    outputs: list[tuple[int, frozenset, str]] = []

    for nid, node in enumerate(c.nodes):
        a = node.operands
        match node.kind:
            case GateKind.CONST:
                bits[nid] = bb.const_word(node.payload)
                if node.payload in (0, 1):
                    boolish.add(nid)
            case GateKind.INPUT:
                party, name = next((p, n) for i, p, n in c.inputs
                                   if i == nid)
                word = []
                for _ in range(width):
                    bit = bb.out.add_node(GateKind.INPUT_BIT, (), node.meta)
                    bb.out.inputs.append((bit, party, name))
                    word.append(bit)
                bits[nid] = word
            case GateKind.ADD:
                bits[nid] = bb.ripple_add(bits[a[0]], bits[a[1]],
                                          bb.const_bit(0))
            case GateKind.SUB:
                if a[1] in boolish and _is_one(c, a[0]):
                    # 1 - b on a bit is a Not
                    bits[nid] = bb.zero_extend(
                        bb.emit(GateKind.NOT, (bits[a[1]][0],)))
                    boolish.add(nid)
                else:
                    bits[nid] = bb.negate_then_add(bits[a[0]], bits[a[1]])
            case GateKind.MUL:
                if a[0] in boolish and a[1] in boolish:
                    bits[nid] = bb.zero_extend(
                        bb.emit(GateKind.AND, (bits[a[0]][0], bits[a[1]][0])))
                    boolish.add(nid)
                elif a[0] in boolish:
                    bits[nid] = bb.scale_by_bit(bits[a[0]][0], bits[a[1]])
                elif a[1] in boolish:
                    bits[nid] = bb.scale_by_bit(bits[a[1]][0], bits[a[0]])
                else:
                    bits[nid] = bb.multiply(bits[a[0]], bits[a[1]])
            case GateKind.MUL_PLAIN:
                bits[nid] = bb.mul_plain(bits[a[0]], node.payload)
                if node.payload == 1 and a[0] in boolish:
                    boolish.add(nid)
            case GateKind.LT:
                bits[nid] = bb.zero_extend(
                    bb.sign_of_difference(bits[a[0]], bits[a[1]]))
                boolish.add(nid)
            case GateKind.LEQ:
                gt = bb.sign_of_difference(bits[a[1]], bits[a[0]])
                bits[nid] = bb.zero_extend(bb.emit(GateKind.NOT, (gt,)))
                boolish.add(nid)
            case GateKind.EQ:
                bits[nid] = bb.zero_extend(bb.equals(bits[a[0]], bits[a[1]]))
                boolish.add(nid)
            case GateKind.MUX:
                sel = bits[a[0]][0]
                bits[nid] = [bb.emit(GateKind.MUX_BIT, (sel, t, e))
                             for t, e in zip(bits[a[1]], bits[a[2]])]
                if a[1] in boolish and a[2] in boolish:
                    boolish.add(nid)
            case GateKind.REVEAL:
                meta = PlainMeta(node.meta.audience)
                word = [bb.emit(GateKind.REVEAL_BIT, (bit,), meta=meta)
                        for bit in bits[a[0]]]
                bits[nid] = word
                if a[0] in boolish:
                    boolish.add(nid)
            case _:
                raise BitblastError(
                    f"cannot bit-blast {node.kind.value}")

    for nid, aud, name in c.outputs:
        for bit in bits[nid]:
            outputs.append((bit, aud, name))
    bb.out.outputs = outputs
    return bb.out


def _is_one(c: Circuit, nid: int) -> bool:
    node = c.nodes[nid]
    return node.kind == GateKind.CONST and node.payload == 1


def bool_to_arith(c: Circuit) -> Circuit:
    """Map boolean gates onto arithmetic over {0, 1}: And becomes Mul,
    Xor becomes a+b-2ab, Not becomes 1-a, Or becomes a+b-ab."""
    if c.level != Level.BOOL:
        raise LevelError("bool_to_arith expects a bool-level circuit")
    out = Circuit(Level.ARITH, c.bitwidth, c.signed)
    mapping: dict[int, int] = {}

    def add(kind, ops, meta=PLAIN, payload=None):
        return out.add_node(kind, ops, meta, payload)

    for nid, node in enumerate(c.nodes):
        ops = tuple(mapping[o] for o in node.operands)
        match node.kind:
            case GateKind.CONST_BIT:
                new = add(GateKind.CONST, (), node.meta, node.payload)
            case GateKind.INPUT_BIT:
                new = add(GateKind.INPUT, (), node.meta)
            case GateKind.AND:
                new = add(GateKind.MUL, ops, node.meta)
            case GateKind.OR:
                s = add(GateKind.ADD, ops, node.meta)
                p = add(GateKind.MUL, ops, node.meta)
                new = add(GateKind.SUB, (s, p), node.meta)
            case GateKind.XOR:
                s = add(GateKind.ADD, ops, node.meta)
                p = add(GateKind.MUL, ops, node.meta)
                two_p = add(GateKind.MUL_PLAIN, (p,), node.meta, 2)
                new = add(GateKind.SUB, (s, two_p), node.meta)
            case GateKind.NOT:
                one = add(GateKind.CONST, (), PLAIN, 1)
                new = add(GateKind.SUB, (one, ops[0]), node.meta)
            case GateKind.MUX_BIT:
                new = add(GateKind.MUX, ops, node.meta)
            case GateKind.REVEAL_BIT:
                new = add(GateKind.REVEAL, ops, node.meta)
            case _:
                raise LevelError(f"{node.kind.value} in bool circuit")
        mapping[nid] = new
    out.inputs = [(mapping[nid], p, n) for nid, p, n in c.inputs]
    out.outputs = [(mapping[nid], a, n) for nid, a, n in c.outputs]
    return out
