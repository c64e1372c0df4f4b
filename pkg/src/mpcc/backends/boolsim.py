"""Evaluator for bool-level circuits over word-valued inputs.

Input bits produced by the bit-blaster share the declaring variable's
name; consecutive entries with one (party, name) pair form a word, LSB
first. Outputs reassemble the same way, with a signed (centered) lift
when the circuit is marked signed.
"""

from ..circuit import Circuit, GateKind, Level
from ..errors import LevelError, MissingInputError


def interpret_bool(circuit: Circuit,
                   inputs: dict[tuple[int, str], int]) -> dict[str, int]:
    return BoolInterpreter(circuit).run(inputs)


class BoolInterpreter:
    def __init__(self, circuit: Circuit):
        if circuit.level != Level.BOOL:
            raise LevelError("boolean evaluator expects a bool-level circuit")
        self.circuit = circuit
        self.gate_evaluations = 0

    def run(self, inputs: dict[tuple[int, str], int]) -> dict[str, int]:
        c = self.circuit
        bit_index: dict[tuple[int, str], int] = {}
        input_bits: dict[int, int] = {}
        for nid, party, name in c.inputs:
            if (party, name) not in inputs:
                raise MissingInputError(f"missing input {name} from party "
                                        f"{party}")
            k = bit_index.get((party, name), 0)
            bit_index[(party, name)] = k + 1
            input_bits[nid] = (int(inputs[(party, name)]) >> k) & 1

        values = [0] * len(c.nodes)
        self.gate_evaluations = 0
        for nid in c.topological_eval_order():
            node = c.nodes[nid]
            a = node.operands
            match node.kind:
                case GateKind.CONST_BIT:
                    v = node.payload & 1
                case GateKind.INPUT_BIT:
                    v = input_bits[nid]
                case GateKind.AND:
                    v = values[a[0]] & values[a[1]]
                case GateKind.OR:
                    v = values[a[0]] | values[a[1]]
                case GateKind.XOR:
                    v = values[a[0]] ^ values[a[1]]
                case GateKind.NOT:
                    v = 1 - values[a[0]]
                case GateKind.MUX_BIT:
                    v = values[a[1]] if values[a[0]] else values[a[2]]
                case GateKind.REVEAL_BIT:
                    v = values[a[0]]
                case _:
                    raise LevelError(f"{node.kind.value} in bool circuit")
            values[nid] = v
            self.gate_evaluations += 1

        words: dict[str, list[int]] = {}
        order: list[str] = []
        for nid, _aud, name in c.outputs:
            if name not in words:
                words[name] = []
                order.append(name)
            words[name].append(values[nid])
        out: dict[str, int] = {}
        for name in order:
            bits = words[name]
            v = 0
            for k, bit in enumerate(bits):
                v |= bit << k
            # single bits are booleans; words of 2+ bits lift signed
            if c.signed and len(bits) >= 2 and bits[-1]:
                v -= 1 << len(bits)
            out[name] = v
        return out
