"""Stable JSON encodings for the domain objects.

Every encoder builds dicts in a fixed field order and every decoder
validates shape before touching constructors, so files round-trip
byte-for-byte and malformed input fails with a usage error rather than a
traceback.  Infinite cardinalities appear in JSON as the string "inf".
"""

from __future__ import annotations

import json

from .core import (
    Family,
    OrderType,
    Pattern,
    Snapshot,
    StructureDescriptor,
    UnaryTail,
    Vocabulary,
    order_type,
    unary_vocab,
)
from .errors import ExprSyntaxError, UsageError
from .learn import Sigma2Sentence
from .orderalg import INF, format_expr
from .sessions import SessionResult, SwapEvidence, Verdict
from .trees import FinTree


def _expect(cond, message):
    if not cond:
        raise UsageError(message)


def _expect_keys(obj, keys, what):
    _expect(isinstance(obj, dict), f"{what} must be a JSON object")
    _expect(
        set(obj) == set(keys),
        f"{what} must have exactly the fields {', '.join(keys)}",
    )


def card_to_json(c):
    return "inf" if c == INF else c


def card_from_json(value, what):
    if value == "inf":
        return INF
    _expect(isinstance(value, int) and value >= 0, f"{what} must be a natural or 'inf'")
    return value


# ---------------------------------------------------------------------------
# Snapshots
# ---------------------------------------------------------------------------


def snapshot_to_json(snap: Snapshot) -> dict:
    return {
        "vocab": [[name, arity] for name, arity in snap.vocab.relations],
        "size": snap.size,
        "relations": {
            name: sorted(list(t) for t in snap.relation(name))
            for name, _ in snap.vocab.relations
        },
    }


def snapshot_from_json(obj) -> Snapshot:
    _expect_keys(obj, ("vocab", "size", "relations"), "a snapshot")
    _expect(
        isinstance(obj["vocab"], list)
        and all(
            isinstance(r, list) and len(r) == 2 and isinstance(r[0], str)
            and isinstance(r[1], int)
            for r in obj["vocab"]
        ),
        "vocab must be a list of [name, arity] pairs",
    )
    _expect(isinstance(obj["size"], int), "size must be an integer")
    _expect(isinstance(obj["relations"], dict), "relations must be an object")
    mapping = {}
    for name, rows in obj["relations"].items():
        _expect(
            isinstance(rows, list)
            and all(isinstance(row, list) and all(isinstance(i, int) for i in row)
                    for row in rows),
            f"relation {name} must be a list of integer lists",
        )
        mapping[name] = [tuple(row) for row in rows]
    try:
        vocab = Vocabulary(tuple((name, arity) for name, arity in obj["vocab"]))
        return Snapshot.make(vocab, obj["size"], mapping)
    except ValueError as exc:
        raise UsageError(f"bad snapshot: {exc}") from exc


# ---------------------------------------------------------------------------
# Descriptors
# ---------------------------------------------------------------------------


def descriptor_to_json(d: StructureDescriptor) -> dict:
    if isinstance(d, UnaryTail):
        return {
            "kind": "unary",
            "vocab": list(d.vocab.names()),
            "exceptional": [[sorted(t), count] for t, count in d.exceptional],
            "tail": sorted(d.tail),
        }
    return {"kind": "order", "expr": format_expr(d.expr)}


def descriptor_from_json(obj) -> StructureDescriptor:
    _expect(isinstance(obj, dict) and "kind" in obj, "a descriptor needs a 'kind' tag")
    if obj["kind"] == "order":
        _expect_keys(obj, ("kind", "expr"), "an order descriptor")
        _expect(isinstance(obj["expr"], str), "expr must be a string")
        try:
            return order_type(obj["expr"])
        except ExprSyntaxError as exc:
            raise UsageError(f"bad order expression: {exc}") from exc
    _expect(obj["kind"] == "unary", f"unknown descriptor kind {obj['kind']!r}")
    _expect_keys(obj, ("kind", "vocab", "exceptional", "tail"), "a unary descriptor")
    names = obj["vocab"]
    _expect(
        isinstance(names, list) and all(isinstance(n, str) for n in names),
        "unary vocab must be a list of predicate names",
    )
    _expect(
        isinstance(obj["exceptional"], list)
        and all(
            isinstance(e, list) and len(e) == 2 and isinstance(e[0], list)
            and isinstance(e[1], int)
            for e in obj["exceptional"]
        ),
        "exceptional must be a list of [type, count] pairs",
    )
    _expect(isinstance(obj["tail"], list), "tail must be a list of predicate names")
    try:
        return UnaryTail.make(
            unary_vocab(*names),
            {frozenset(t): count for t, count in obj["exceptional"]},
            frozenset(obj["tail"]),
        )
    except ValueError as exc:
        raise UsageError(f"bad unary descriptor: {exc}") from exc


# ---------------------------------------------------------------------------
# Families
# ---------------------------------------------------------------------------


def _pattern_to_json(pattern: Pattern) -> dict:
    if pattern.cycle == (0, 1):
        tail = "parity"
    elif len(pattern.cycle) == 1:
        tail = pattern.cycle[0]
    else:
        tail = list(pattern.cycle)
    return {"initial": list(pattern.initial), "tail": tail}


def _pattern_from_json(obj) -> Pattern:
    _expect_keys(obj, ("initial", "tail"), "a pattern")
    _expect(
        isinstance(obj["initial"], list)
        and all(isinstance(i, int) for i in obj["initial"]),
        "pattern initial must be a list of indices",
    )
    tail = obj["tail"]
    if tail == "parity":
        cycle = (0, 1)
    elif isinstance(tail, int):
        cycle = (tail,)
    elif isinstance(tail, list) and tail and all(isinstance(i, int) for i in tail):
        cycle = tuple(tail)
    else:
        raise UsageError("pattern tail must be an index, 'parity', or an index list")
    try:
        return Pattern(tuple(obj["initial"]), cycle)
    except ValueError as exc:
        raise UsageError(f"bad pattern: {exc}") from exc


def family_to_json(fam: Family) -> dict:
    return {
        "base": [descriptor_to_json(d) for d in fam.base],
        "pattern": _pattern_to_json(fam.pattern),
    }


def family_from_json(obj) -> Family:
    _expect_keys(obj, ("base", "pattern"), "a family")
    _expect(isinstance(obj["base"], list) and obj["base"], "base must be nonempty")
    base = tuple(descriptor_from_json(d) for d in obj["base"])
    pattern = _pattern_from_json(obj["pattern"])
    try:
        return Family(base, pattern)
    except ValueError as exc:
        raise UsageError(f"bad family: {exc}") from exc


# ---------------------------------------------------------------------------
# Trees
# ---------------------------------------------------------------------------


def tree_to_json(t: FinTree) -> dict:
    return {"nodes": sorted(list(node) for node in t.nodes)}


def tree_from_json(obj) -> FinTree:
    _expect_keys(obj, ("nodes",), "a tree")
    _expect(
        isinstance(obj["nodes"], list)
        and all(
            isinstance(node, list) and all(isinstance(i, int) for i in node)
            for node in obj["nodes"]
        ),
        "nodes must be a list of integer lists",
    )
    try:
        return FinTree(frozenset(tuple(node) for node in obj["nodes"]))
    except ValueError as exc:
        raise UsageError(f"bad tree: {exc}") from exc


# ---------------------------------------------------------------------------
# Sentences
# ---------------------------------------------------------------------------


def _term_to_json(term):
    return [term[0], term[1]]


def _term_from_json(value):
    _expect(
        isinstance(value, list) and len(value) == 2 and value[0] in ("x", "y")
        and isinstance(value[1], int),
        "a term must be ['x'|'y', index]",
    )
    return (value[0], value[1])


def _atom_to_json(atom):
    if atom[0] == "rel":
        return ["rel", atom[1], [_term_to_json(t) for t in atom[2]]]
    return ["eq", _term_to_json(atom[1]), _term_to_json(atom[2])]


def _atom_from_json(value):
    _expect(isinstance(value, list) and value, "an atom must be a tagged list")
    if value[0] == "rel":
        _expect(
            len(value) == 3 and isinstance(value[1], str) and isinstance(value[2], list),
            "a relation atom must be ['rel', name, terms]",
        )
        return ("rel", value[1], tuple(_term_from_json(t) for t in value[2]))
    _expect(value[0] == "eq" and len(value) == 3, "an atom is tagged 'rel' or 'eq'")
    return ("eq", _term_from_json(value[1]), _term_from_json(value[2]))


def sentence_to_json(sentence: Sigma2Sentence) -> dict:
    return {
        "x_arity": sentence.x_arity,
        "y_arity": sentence.y_arity,
        "matrix": [
            [[positive, _atom_to_json(atom)] for positive, atom in clause]
            for clause in sentence.matrix
        ],
    }


def sentence_from_json(obj) -> Sigma2Sentence:
    _expect_keys(obj, ("x_arity", "y_arity", "matrix"), "a sentence")
    _expect(
        isinstance(obj["x_arity"], int) and isinstance(obj["y_arity"], int),
        "arities must be integers",
    )
    _expect(isinstance(obj["matrix"], list), "matrix must be a list of clauses")
    clauses = []
    for clause in obj["matrix"]:
        _expect(isinstance(clause, list), "every clause must be a list of literals")
        literals = []
        for lit in clause:
            _expect(
                isinstance(lit, list) and len(lit) == 2 and isinstance(lit[0], bool),
                "a literal must be [sign, atom]",
            )
            literals.append((lit[0], _atom_from_json(lit[1])))
        clauses.append(tuple(literals))
    try:
        return Sigma2Sentence(obj["x_arity"], obj["y_arity"], tuple(clauses))
    except ValueError as exc:
        raise UsageError(f"bad sentence: {exc}") from exc


def sentences_to_json(named: dict) -> dict:
    return {name: sentence_to_json(s) for name, s in named.items()}


def sentences_from_json(obj) -> dict:
    _expect(isinstance(obj, dict) and obj, "a sentence file maps names to sentences")
    return {name: sentence_from_json(value) for name, value in obj.items()}


# ---------------------------------------------------------------------------
# Session results and verdicts
# ---------------------------------------------------------------------------


def session_to_json(r: SessionResult) -> dict:
    return {
        "trace": list(r.trace),
        "stabilized_at": r.stabilized_at,
        "final": r.final,
        "horizon": r.horizon,
        "family": r.family_ref,
        "presentation": r.presentation_ref,
    }


def _evidence_to_json(e: SwapEvidence) -> dict:
    return {
        "family": family_to_json(e.family),
        "stage": e.stage,
        "trace_segment": list(e.trace_segment),
        "seed": e.seed,
        "phase": e.phase,
    }


def verdict_to_json(v: Verdict) -> dict:
    return {
        "outcome": v.outcome.value,
        "evidence": None if v.evidence is None else _evidence_to_json(v.evidence),
        "diagnostics": list(v.diagnostics),
    }


def witness_to_json(witness) -> list:
    if all(isinstance(t, frozenset) for t in witness):
        return [sorted(t) for t in witness]
    return [card_to_json(c) for c in witness]


def report_to_json(report) -> dict | None:
    if report is None:
        return None
    return {str(i): witness_to_json(w) for i, w in report.items()}


# ---------------------------------------------------------------------------
# File helpers
# ---------------------------------------------------------------------------


def load_json(path):
    try:
        with open(path, encoding="utf-8") as handle:
            return json.load(handle)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc


def load_structure(path):
    """Read a snapshot or descriptor file.

    A path ending in .ord holds a bare order expression; anything else is
    JSON, either a tagged descriptor or an untagged snapshot object.
    """
    if str(path).endswith(".ord"):
        try:
            with open(path, encoding="utf-8") as handle:
                return order_type(handle.read().strip())
        except OSError as exc:
            raise UsageError(f"cannot read {path}: {exc}") from exc
        except ExprSyntaxError as exc:
            raise UsageError(f"bad order expression in {path}: {exc}") from exc
    obj = load_json(path)
    if isinstance(obj, dict) and "kind" in obj:
        return descriptor_from_json(obj)
    return snapshot_from_json(obj)


def dump(obj) -> str:
    return json.dumps(obj, indent=2)
