"""Acyclic circuit IR with ownership metadata.

Node ids double as topological order: a node may only reference smaller
ids, so acyclicity is a local check and id order is an evaluation order.
Circuits are built append-only and treated as immutable once validated;
passes produce new circuits.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum

from .errors import (
    ArityError, ForwardReferenceError, ShareMismatchError,
)
from .sectypes import AdditiveShare, Generic, Scheme


class Level(str, Enum):
    ARITH = "arith"
    BOOL = "bool"
    MIXED = "mixed"


class GateKind(str, Enum):
    # word level
    CONST = "Const"
    INPUT = "Input"
    ADD = "Add"
    SUB = "Sub"
    MUL = "Mul"
    MUL_PLAIN = "MulPlain"
    LT = "Lt"
    LEQ = "Leq"
    EQ = "Eq"
    MUX = "Mux"
    REVEAL = "Reveal"
    # bit level
    CONST_BIT = "ConstBit"
    INPUT_BIT = "InputBit"
    AND = "And"
    OR = "Or"
    XOR = "Xor"
    NOT = "Not"
    MUX_BIT = "MuxBit"
    REVEAL_BIT = "RevealBit"


ARITH_KINDS = frozenset({
    GateKind.CONST, GateKind.INPUT, GateKind.ADD, GateKind.SUB, GateKind.MUL,
    GateKind.MUL_PLAIN, GateKind.LT, GateKind.LEQ, GateKind.EQ, GateKind.MUX,
    GateKind.REVEAL,
})
BOOL_KINDS = frozenset({
    GateKind.CONST_BIT, GateKind.INPUT_BIT, GateKind.AND, GateKind.OR,
    GateKind.XOR, GateKind.NOT, GateKind.MUX_BIT, GateKind.REVEAL_BIT,
})

ARITY = {
    GateKind.CONST: 0, GateKind.INPUT: 0, GateKind.ADD: 2, GateKind.SUB: 2,
    GateKind.MUL: 2, GateKind.MUL_PLAIN: 1, GateKind.LT: 2, GateKind.LEQ: 2,
    GateKind.EQ: 2, GateKind.MUX: 3, GateKind.REVEAL: 1,
    GateKind.CONST_BIT: 0, GateKind.INPUT_BIT: 0, GateKind.AND: 2,
    GateKind.OR: 2, GateKind.XOR: 2, GateKind.NOT: 1, GateKind.MUX_BIT: 3,
    GateKind.REVEAL_BIT: 1,
}

PAYLOAD_KINDS = frozenset({GateKind.CONST, GateKind.CONST_BIT,
                           GateKind.MUL_PLAIN})

# commutative gates canonicalize operand order during CSE
COMMUTATIVE = frozenset({GateKind.ADD, GateKind.MUL, GateKind.EQ,
                         GateKind.AND, GateKind.OR, GateKind.XOR})


# -- node metadata --

@dataclass(frozen=True)
class PlainMeta:
    audience: frozenset | None = None  # set only on Reveal nodes


@dataclass(frozen=True)
class EncMeta:
    provider: frozenset


@dataclass(frozen=True)
class SharedMeta:
    provider: frozenset
    players: frozenset
    observers: frozenset
    threshold: int


Meta = PlainMeta | EncMeta | SharedMeta
PLAIN = PlainMeta()


def combine_share_meta(a: SharedMeta, b: SharedMeta,
                       scheme: Scheme) -> SharedMeta:
    """Metadata of a gate combining two shared operands.

    The provider becomes the union. Observers follow the general rule
    (union) or the refined additive rule (intersection); additive sharing
    additionally requires the n-out-of-n shape |players| == threshold.
    """
    if a.players != b.players:
        raise ShareMismatchError(
            f"players differ: {sorted(a.players)} vs {sorted(b.players)}")
    if a.threshold != b.threshold:
        raise ShareMismatchError(
            f"thresholds differ: {a.threshold} vs {b.threshold}")
    if isinstance(scheme, AdditiveShare):
        if len(a.players) != a.threshold:
            raise ShareMismatchError(
                f"additive sharing requires players.size == threshold "
                f"({len(a.players)} != {a.threshold})")
        observers = a.observers & b.observers
    else:
        observers = a.observers | b.observers
    return SharedMeta(a.provider | b.provider, a.players, observers,
                      a.threshold)


def combine_meta(a: Meta, b: Meta, scheme: Scheme = Generic()) -> Meta:
    """Metadata combination for any operand pair; plain is neutral."""
    if isinstance(a, PlainMeta):
        return b if not isinstance(b, PlainMeta) else PLAIN
    if isinstance(b, PlainMeta):
        return a
    if isinstance(a, SharedMeta) and isinstance(b, SharedMeta):
        return combine_share_meta(a, b, scheme)
    if isinstance(a, EncMeta) and isinstance(b, EncMeta):
        return EncMeta(a.provider | b.provider)
    raise ShareMismatchError("cannot mix encrypted and shared metadata")


@dataclass(frozen=True)
class Node:
    kind: GateKind
    operands: tuple[int, ...]
    meta: Meta = PLAIN
    payload: int | None = None


@dataclass
class Circuit:
    level: Level = Level.ARITH
    bitwidth: int = 64
    signed: bool = True
    nodes: list[Node] = field(default_factory=list)
    inputs: list[tuple[int, int, str]] = field(default_factory=list)
    outputs: list[tuple[int, frozenset, str]] = field(default_factory=list)

    def add_node(self, kind: GateKind, operands=(), meta: Meta = PLAIN,
                 payload=None) -> int:
        operands = tuple(operands)
        if len(operands) != ARITY[kind]:
            raise ArityError(
                f"{kind.value} takes {ARITY[kind]} operands, got {len(operands)}")
        nid = len(self.nodes)
        for o in operands:
            if not (0 <= o < nid):
                raise ForwardReferenceError(
                    f"operand {o} of node {nid} is not an earlier node")
        if kind in PAYLOAD_KINDS and payload is None:
            raise ArityError(f"{kind.value} requires a payload")
        self.nodes.append(Node(kind, operands, meta, payload))
        return nid

    def add_input(self, party: int, name: str,
                  meta: Meta | None = None) -> int:
        kind = (GateKind.INPUT if self.level != Level.BOOL
                else GateKind.INPUT_BIT)
        nid = self.add_node(kind, (), meta if meta is not None
                            else EncMeta(frozenset({party})))
        self.inputs.append((nid, party, name))
        return nid

    def add_output(self, nid: int, audience: frozenset, name: str):
        self.outputs.append((nid, frozenset(audience), name))

    def validate(self, scheme: Scheme = Generic()) -> list[str]:
        """Well-formedness check; returns a list of violations (empty = ok)."""
        violations = []
        allowed = {Level.ARITH: ARITH_KINDS, Level.BOOL: BOOL_KINDS,
                   Level.MIXED: ARITH_KINDS | BOOL_KINDS}[self.level]
        for nid, node in enumerate(self.nodes):
            if node.kind not in allowed:
                violations.append(
                    f"node {nid}: {node.kind.value} not allowed at level "
                    f"{self.level.value}")
            if len(node.operands) != ARITY[node.kind]:
                violations.append(f"node {nid}: bad arity")
            for o in node.operands:
                if not (0 <= o < nid):
                    violations.append(f"node {nid}: forward reference to {o}")
            if node.kind in PAYLOAD_KINDS and node.payload is None:
                violations.append(f"node {nid}: missing payload")
            if node.kind in (GateKind.REVEAL, GateKind.REVEAL_BIT):
                if not (isinstance(node.meta, PlainMeta)
                        and node.meta.audience):
                    violations.append(f"node {nid}: reveal without audience")
            metas = [self.nodes[o].meta for o in node.operands
                     if 0 <= o < nid]
            if len(metas) >= 2:
                try:
                    m = metas[0]
                    for other in metas[1:]:
                        m = combine_meta(m, other, scheme)
                except ShareMismatchError as ex:
                    violations.append(f"node {nid}: {ex.message}")
            if isinstance(node.meta, SharedMeta):
                if node.meta.threshold > len(node.meta.players):
                    violations.append(
                        f"node {nid}: threshold exceeds player count")
        for nid, _party, _name in self.inputs:
            if not (0 <= nid < len(self.nodes)):
                violations.append(f"input id {nid} out of range")
        for nid, _aud, _name in self.outputs:
            if not (0 <= nid < len(self.nodes)):
                violations.append(f"output id {nid} out of range")
            elif self.nodes[nid].kind not in (GateKind.REVEAL,
                                              GateKind.REVEAL_BIT):
                violations.append(f"output id {nid} is not a reveal node")
        return violations

    def topological_eval_order(self) -> range:
        # ids are a topological order by construction
        return range(len(self.nodes))

    def counts(self) -> dict[GateKind, int]:
        out: dict[GateKind, int] = {}
        for node in self.nodes:
            out[node.kind] = out.get(node.kind, 0) + 1
        return out

    # -- serialization --

    def to_json_obj(self) -> dict:
        return {
            "level": self.level.value,
            "bitwidth": self.bitwidth,
            "signed": self.signed,
            "nodes": [
                {
                    "id": nid,
                    "kind": n.kind.value,
                    "operands": list(n.operands),
                    "meta": meta_to_json(n.meta),
                    "payload": n.payload,
                }
                for nid, n in enumerate(self.nodes)
            ],
            "inputs": [[nid, party, name] for nid, party, name in self.inputs],
            "outputs": [[nid, sorted(aud), name]
                        for nid, aud, name in self.outputs],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2) + "\n"

    @staticmethod
    def from_json_obj(obj: dict) -> "Circuit":
        c = Circuit(Level(obj["level"]), obj["bitwidth"],
                    obj.get("signed", True))
        for entry in obj["nodes"]:
            nid = c.add_node(GateKind(entry["kind"]),
                             tuple(entry["operands"]),
                             meta_from_json(entry["meta"]),
                             entry.get("payload"))
            if nid != entry["id"]:
                raise ForwardReferenceError(
                    f"node id {entry['id']} does not match position {nid}")
        c.inputs = [(nid, party, name) for nid, party, name in obj["inputs"]]
        c.outputs = [(nid, frozenset(aud), name)
                     for nid, aud, name in obj["outputs"]]
        return c

    @staticmethod
    def from_json(text: str) -> "Circuit":
        return Circuit.from_json_obj(json.loads(text))


def meta_to_json(m: Meta) -> dict:
    match m:
        case PlainMeta(audience=None):
            return {"type": "plain"}
        case PlainMeta(audience=aud):
            return {"type": "plain", "audience": sorted(aud)}
        case EncMeta(provider=prov):
            return {"type": "enc", "provider": sorted(prov)}
        case SharedMeta(provider=prov, players=players, observers=obs,
                        threshold=t):
            return {"type": "shared", "provider": sorted(prov),
                    "players": sorted(players), "observers": sorted(obs),
                    "threshold": t}
    raise AssertionError(m)


def meta_from_json(obj: dict) -> Meta:
    match obj["type"]:
        case "plain":
            aud = obj.get("audience")
            return PlainMeta(frozenset(aud) if aud is not None else None)
        case "enc":
            return EncMeta(frozenset(obj["provider"]))
        case "shared":
            return SharedMeta(frozenset(obj["provider"]),
                              frozenset(obj["players"]),
                              frozenset(obj["observers"]), obj["threshold"])
    raise AssertionError(obj)
