"""Vocabularies, finite snapshots, structure descriptors, and presentations.

A Snapshot is a finite relational structure on the domain {0, ..., size-1}.
A StructureDescriptor finitely describes an infinite structure on universe
omega: either a unary structure that is constant from some point on
(UnaryTail) or a linear order denoted by an order expression (OrderType).
A PresentationStream enumerates such a structure one element per stage, so
that restrict(stream, s) is the induced substructure on the first s+1
elements presented.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Callable, Iterator

from .errors import (
    UnsupportedError,
    VariantMismatchError,
    VocabularyMismatchError,
)
from .orderalg import (
    INF,
    Atom,
    Fin,
    OrderExpr,
    Prod,
    Sum,
    cardinality,
    expr_equal,
    format_expr,
    normalize,
    w_free,
)


@dataclass(frozen=True)
class Vocabulary:
    """A finite relational vocabulary: (name, arity) pairs."""

    relations: tuple[tuple[str, int], ...]

    def __post_init__(self):
        if not self.relations:
            raise ValueError("vocabulary must be nonempty")
        names = [name for name, _ in self.relations]
        if len(set(names)) != len(names):
            raise ValueError("relation names must be pairwise distinct")
        for name, arity in self.relations:
            if not name.isidentifier():
                raise ValueError(f"relation name {name!r} is not an identifier")
            if arity < 1:
                raise ValueError(f"arity of {name} must be at least 1")

    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.relations)

    def arity(self, name: str) -> int:
        for rel, arity in self.relations:
            if rel == name:
                return arity
        raise KeyError(name)

    @property
    def all_unary(self) -> bool:
        return all(arity == 1 for _, arity in self.relations)


ORDER_VOCAB = Vocabulary((("lt", 2),))


def unary_vocab(*names: str) -> Vocabulary:
    return Vocabulary(tuple((name, 1) for name in names))


@dataclass(frozen=True)
class Snapshot:
    """A finite structure on domain {0, ..., size-1}.

    interp lists (relation name, set of tuples) sorted by name, one entry
    per vocabulary relation.  Equality and hashing are structural.  The
    lightweight constructor trusts its caller on tuple contents; build
    through Snapshot.make to get full validation.
    """

    vocab: Vocabulary
    size: int
    interp: tuple[tuple[str, frozenset[tuple[int, ...]]], ...]

    def __post_init__(self):
        names = tuple(name for name, _ in self.interp)
        if names != tuple(sorted(self.vocab.names())):
            raise ValueError("interpretation must list each vocabulary relation once, sorted")
        if self.size < 0:
            raise ValueError("size must be a natural number")

    @classmethod
    def make(cls, vocab: Vocabulary, size: int, mapping: dict) -> "Snapshot":
        interp = []
        for name in sorted(vocab.names()):
            arity = vocab.arity(name)
            tuples = frozenset(tuple(t) for t in mapping.get(name, ()))
            for t in tuples:
                if len(t) != arity:
                    raise ValueError(f"tuple {t} has wrong arity for {name}")
                if any(not (0 <= e < size) for e in t):
                    raise ValueError(f"tuple {t} out of range for size {size}")
            interp.append((name, tuples))
        return cls(vocab, size, tuple(interp))

    def relation(self, name: str) -> frozenset[tuple[int, ...]]:
        for rel, tuples in self.interp:
            if rel == name:
                return tuples
        raise KeyError(name)


def induced_prefix(snap: Snapshot, size: int) -> Snapshot:
    """The induced substructure of snap on the domain {0, ..., size-1}."""
    if size > snap.size:
        raise ValueError("prefix larger than the snapshot")
    interp = tuple(
        (name, frozenset(t for t in tuples if all(e < size for e in t)))
        for name, tuples in snap.interp
    )
    return Snapshot(snap.vocab, size, interp)


def extends_prefix(snap: Snapshot, prev: Snapshot) -> bool:
    """Whether prev equals the induced prefix of snap one element back.

    Equivalent to induced_prefix(snap, snap.size - 1) == prev but decided
    without building the prefix: the previous tuples must all survive and
    every added tuple must mention the new element.  Tuples of prev stay
    below its size by construction, so nothing else needs checking.
    """
    if prev.size != snap.size - 1 or prev.vocab != snap.vocab:
        return False
    cut = prev.size
    for (name, tuples), (prev_name, prev_tuples) in zip(snap.interp, prev.interp):
        if name != prev_name or not prev_tuples <= tuples:
            return False
        for t in tuples - prev_tuples:
            if t and max(t) < cut:
                return False
    return True


def unary_types(snap: Snapshot) -> tuple[frozenset[str], ...]:
    """Per-element sets of satisfied unary predicates, for all-unary snapshots."""
    if not snap.vocab.all_unary:
        raise UnsupportedError("unary_types needs an all-unary vocabulary")
    types = [set() for _ in range(snap.size)]
    for name, tuples in snap.interp:
        for (e,) in tuples:
            types[e].add(name)
    return tuple(frozenset(t) for t in types)


def iso_snapshots(a: Snapshot, b: Snapshot) -> bool:
    """Exhaustive isomorphism test; intended for sizes up to about 8."""
    if a.vocab != b.vocab:
        raise VocabularyMismatchError("snapshots have different vocabularies")
    if a.size != b.size:
        return False
    for (name, ta), (_, tb) in zip(a.interp, b.interp):
        if len(ta) != len(tb):
            return False
    rels = [(ta, tb) for (_, ta), (_, tb) in zip(a.interp, b.interp)]
    for perm in permutations(range(a.size)):
        if all(
            frozenset(tuple(perm[e] for e in t) for t in ta) == tb
            for ta, tb in rels
        ):
            return True
    return False


# ---------------------------------------------------------------------------
# Structure descriptors
# ---------------------------------------------------------------------------


def _type_key(t: frozenset[str]):
    return tuple(sorted(t))


@dataclass(frozen=True)
class UnaryTail:
    """An infinite all-unary structure, constant from some point on.

    exceptional maps a 1-type (the exact set of predicates an element
    satisfies) to how many elements carry it; every other element carries
    the tail type.  Canonical element order: exceptional elements first,
    grouped by sorted type, then the tail elements.
    """

    vocab: Vocabulary
    exceptional: tuple[tuple[frozenset[str], int], ...]
    tail: frozenset[str]

    def __post_init__(self):
        if not self.vocab.all_unary:
            raise ValueError("UnaryTail vocabulary must be all unary")
        preds = set(self.vocab.names())
        if not self.tail <= preds:
            raise ValueError("tail type uses unknown predicates")
        keys = [_type_key(t) for t, _ in self.exceptional]
        if keys != sorted(keys) or len(set(keys)) != len(keys):
            raise ValueError("exceptional types must be sorted and distinct")
        for t, count in self.exceptional:
            if not t <= preds:
                raise ValueError("exceptional type uses unknown predicates")
            if count < 1:
                raise ValueError("exceptional counts must be at least 1")

    @classmethod
    def make(cls, vocab: Vocabulary, exceptional: dict, tail) -> "UnaryTail":
        items = sorted(
            ((frozenset(t), count) for t, count in exceptional.items()),
            key=lambda item: _type_key(item[0]),
        )
        return cls(vocab, tuple(items), frozenset(tail))

    def folded_exceptional(self) -> tuple[tuple[frozenset[str], int], ...]:
        """Exceptional entries with tail-typed entries absorbed into the tail."""
        return tuple((t, c) for t, c in self.exceptional if t != self.tail)

    def exceptional_total(self) -> int:
        return sum(count for _, count in self.exceptional)

    def rank_type(self, rank: int) -> frozenset[str]:
        """The 1-type of the element at the given canonical position."""
        for t, count in self.exceptional:
            if rank < count:
                return t
            rank -= count
        return self.tail


@dataclass(frozen=True)
class OrderType:
    """An infinite linear order denoted by an order expression."""

    expr: OrderExpr

    def __post_init__(self):
        if cardinality(self.expr) != INF:
            raise ValueError("an OrderType descriptor must denote an infinite order")


StructureDescriptor = UnaryTail | OrderType


def order_type(text: str) -> OrderType:
    from .orderalg import parse_expr

    return OrderType(parse_expr(text))


def descriptor_vocab(d: StructureDescriptor) -> Vocabulary:
    return d.vocab if isinstance(d, UnaryTail) else ORDER_VOCAB


def iso_described(a: StructureDescriptor, b: StructureDescriptor) -> bool:
    """Isomorphism of described structures, decided per descriptor class."""
    if isinstance(a, UnaryTail) and isinstance(b, UnaryTail):
        if a.vocab != b.vocab:
            raise VocabularyMismatchError("descriptors have different vocabularies")
        return a.tail == b.tail and a.folded_exceptional() == b.folded_exceptional()
    if isinstance(a, OrderType) and isinstance(b, OrderType):
        return expr_equal(a.expr, b.expr)
    raise VariantMismatchError("cannot compare descriptors of different classes")


# ---------------------------------------------------------------------------
# Canonical enumeration of order points
# ---------------------------------------------------------------------------
#
# An abstract point of the order denoted by an expression is an address:
#   Fin(k), w, w*:  an integer position (for w*, counted from the top)
#   q:              a dyadic Fraction strictly between 0 and 1
#   Sum:            (part index, sub-address)
#   Prod(a, b):     (address in b, address in a)


def _iter_addresses(e: OrderExpr) -> Iterator:
    if isinstance(e, Fin):
        yield from range(e.size)
    elif e == Atom("q"):
        level = 1
        while True:
            den = 2**level
            for num in range(1, den, 2):
                yield Fraction(num, den)
            level += 1
    elif isinstance(e, Atom):
        if e.symbol == "W":
            raise UnsupportedError("W denotes an uncountable order; it cannot be enumerated")
        n = 0
        while True:
            yield n
            n += 1
    elif isinstance(e, Sum):
        active = [(i, _iter_addresses(p)) for i, p in enumerate(e.parts)]
        while active:
            still = []
            for i, gen in active:
                try:
                    yield (i, next(gen))
                    still.append((i, gen))
                except StopIteration:
                    pass
            active = still
    else:
        yield from _iter_product_addresses(e)


def _iter_product_addresses(e: Prod) -> Iterator:
    outer = _iter_addresses(e.right)
    inner = _iter_addresses(e.left)
    outs, ins = [], []
    out_done = in_done = False
    d = 0
    while True:
        while not out_done and len(outs) <= d:
            try:
                outs.append(next(outer))
            except StopIteration:
                out_done = True
        while not in_done and len(ins) <= d:
            try:
                ins.append(next(inner))
            except StopIteration:
                in_done = True
        for i in range(d + 1):
            j = d - i
            if i < len(outs) and j < len(ins):
                yield (outs[i], ins[j])
        if out_done and in_done and d >= len(outs) + len(ins):
            return
        d += 1


def _address_lt(e: OrderExpr, p, q) -> bool:
    if isinstance(e, Fin):
        return p < q
    if isinstance(e, Atom):
        if e.symbol == "w*":
            return p > q
        return p < q
    if isinstance(e, Sum):
        (i, pa), (j, qa) = p, q
        if i != j:
            return i < j
        return _address_lt(e.parts[i], pa, qa)
    (pb, pa), (qb, qa) = p, q
    if pb != qb:
        return _address_lt(e.right, pb, qb)
    return _address_lt(e.left, pa, qa)


# ---------------------------------------------------------------------------
# Presentations
# ---------------------------------------------------------------------------


class PresentationStream:
    """A stagewise enumeration of the structure a descriptor denotes.

    schedule maps each stage to the canonical rank of the element presented
    at that stage; it must be injective and must cover every rank
    eventually.  All observable behavior is pure; the instance only caches.
    """

    def __init__(self, descriptor: StructureDescriptor, schedule: Callable[[int], int], label: str):
        self.descriptor = descriptor
        self.schedule = schedule
        self.label = label
        self._ranks: list[int] = []
        if isinstance(descriptor, OrderType):
            if not w_free(descriptor.expr):
                raise UnsupportedError(
                    f"{format_expr(descriptor.expr)} contains W and has no countable presentation"
                )
            self._expr = normalize(descriptor.expr)
            self._addr_gen = _iter_addresses(self._expr)
            self._addrs: list = []
            self._sorted_slots: list[int] = []
            self._lt_acc: set[tuple[int, int]] = set()
        else:
            self._pred_acc: dict[str, set[tuple[int]]] = {
                name: set() for name in descriptor.vocab.names()
            }
        self._acc_stage = -1

    def rank_at(self, stage: int) -> int:
        while len(self._ranks) <= stage:
            rank = self.schedule(len(self._ranks))
            if rank in self._ranks:
                raise ValueError(f"schedule repeats rank {rank}")
            self._ranks.append(rank)
        return self._ranks[stage]

    def _address(self, rank: int):
        while len(self._addrs) <= rank:
            self._addrs.append(next(self._addr_gen))
        return self._addrs[rank]

    def slot_lt(self, s: int, t: int) -> bool:
        """Whether the element presented at stage s precedes the one at stage t."""
        pa = self._address(self.rank_at(s))
        qa = self._address(self.rank_at(t))
        return _address_lt(self._expr, pa, qa)

    def slot_type(self, s: int) -> frozenset[str]:
        return self.descriptor.rank_type(self.rank_at(s))

    def _advance(self, stage: int) -> None:
        while self._acc_stage < stage:
            t = self._acc_stage + 1
            if isinstance(self.descriptor, OrderType):
                for old in range(t):
                    if self.slot_lt(old, t):
                        self._lt_acc.add((old, t))
                    else:
                        self._lt_acc.add((t, old))
            else:
                for name in self.slot_type(t):
                    self._pred_acc[name].add((t,))
            self._acc_stage = t

    def snapshot(self, stage: int) -> Snapshot:
        vocab = descriptor_vocab(self.descriptor)
        size = stage + 1
        self._advance(stage)
        if isinstance(self.descriptor, OrderType):
            if stage == self._acc_stage:
                lt = frozenset(self._lt_acc)
            else:
                lt = frozenset(
                    (s, t) if self.slot_lt(s, t) else (t, s)
                    for s in range(size)
                    for t in range(s + 1, size)
                )
            return Snapshot(vocab, size, (("lt", lt),))
        interp = tuple(
            (name, frozenset(t for t in self._pred_acc[name] if t[0] < size))
            for name in sorted(vocab.names())
        )
        return Snapshot(vocab, size, interp)


def restrict(p: PresentationStream, s: int) -> Snapshot:
    """The finite substructure on the first s+1 presented elements."""
    return p.snapshot(s)


def canonical_presentation(d: StructureDescriptor) -> PresentationStream:
    return PresentationStream(d, lambda n: n, "canonical")


def permuted_presentation(d: StructureDescriptor, seed: int) -> PresentationStream:
    """A deterministic pseudo-random presentation of the described structure.

    Seed 0 is the canonical in-order enumeration.  For seed >= 1, stage n
    presents the least not-yet-presented canonical rank when n % 3 == 2 and
    otherwise skips ahead by 1 + j ranks, where j is drawn as
    random.Random(seed * 1_000_003 + n).randrange(4).  Every third stage
    consuming the least remaining rank keeps the schedule total; the
    per-stage generators make it reproducible and splittable.
    """
    if seed == 0:
        return canonical_presentation(d)

    presented: set[int] = set()
    order: list[int] = []

    def schedule(n: int) -> int:
        while len(order) <= n:
            m = len(order)
            if m % 3 == 2:
                skip = 0
            else:
                skip = 1 + random.Random(seed * 1_000_003 + m).randrange(4)
            rank = 0
            while True:
                if rank not in presented:
                    if skip == 0:
                        break
                    skip -= 1
                rank += 1
            presented.add(rank)
            order.append(rank)
        return order[n]

    return PresentationStream(d, schedule, f"seed:{seed}")


def swap_adjacent_schedule(n: int) -> int:
    """The adjacent-transposition enumeration 1, 0, 3, 2, 5, 4, ..."""
    return n + 1 if n % 2 == 0 else n - 1


def presentation_with_schedule(
    d: StructureDescriptor, schedule: Callable[[int], int], label: str
) -> PresentationStream:
    """A presentation with an explicitly supplied (injective, total) schedule."""
    return PresentationStream(d, schedule, label)


# ---------------------------------------------------------------------------
# Families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Pattern:
    """A total map from stages of omega to base indices.

    index(n) is initial[n] for n < len(initial) and afterwards cycles
    through `cycle`.  This covers identity-then-constant defaults as well
    as parity patterns.
    """

    initial: tuple[int, ...]
    cycle: tuple[int, ...]

    def __post_init__(self):
        if not self.cycle:
            raise ValueError("pattern cycle must be nonempty")

    def index(self, n: int) -> int:
        if n < len(self.initial):
            return self.initial[n]
        return self.cycle[(n - len(self.initial)) % len(self.cycle)]


@dataclass(frozen=True)
class Family:
    """A finite base of descriptors assigned to every index in omega."""

    base: tuple[StructureDescriptor, ...]
    pattern: Pattern

    def __post_init__(self):
        if not self.base:
            raise ValueError("family base must be nonempty")
        bound = len(self.base)
        for i in tuple(self.pattern.initial) + tuple(self.pattern.cycle):
            if not (0 <= i < bound):
                raise ValueError(f"pattern index {i} out of base range")

    @classmethod
    def default(cls, base) -> "Family":
        """Identity on the base's positions, then constantly the last one."""
        base = tuple(base)
        return cls(base, Pattern(tuple(range(len(base))), (len(base) - 1,)))

    @classmethod
    def parity(cls, even: StructureDescriptor, odd: StructureDescriptor) -> "Family":
        return cls((even, odd), Pattern((), (0, 1)))

    def index(self, n: int) -> int:
        return self.pattern.index(n)

    def entry(self, n: int) -> StructureDescriptor:
        return self.base[self.pattern.index(n)]
