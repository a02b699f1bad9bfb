"""Bounded back-and-forth relations on snapshots, unary descriptors, and orders.

The asymmetric relation (A, abar) <=_n (B, bbar) holds when for every m < n
and every extension tuple dbar over B there is a response cbar over A with
(B, bbar+dbar) <=_m (A, abar+cbar); the base case <=_0 is atomic-type
agreement.  Note the role swap: challenges come from the right argument.

Three engines decide it on the three input classes:

  * leq_n_snapshots plays the literal game on finite snapshots, with
    extension tuples normalized to fresh distinct elements (duplicate and
    re-used entries add only equality-pattern information, which the
    response must copy anyway).
  * leq_n_unary plays the game on per-type element counts truncated at a
    cap, for the co-finite unary descriptors.
  * leq2_order decides depth 2 on order expressions through interval
    cardinality profiles.

pi_n_oracle independently decides Pi_n-theory inclusion on small snapshots
by enumerating sentences through their atomic-type semantics; the test
suite plays it against the game.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations, product

from .core import Snapshot, StructureDescriptor, UnaryTail, OrderType
from .errors import (
    BoundExceededError,
    LengthMismatchError,
    VariantMismatchError,
    VocabularyMismatchError,
)
from .orderalg import INF, Atom, Fin, OrderExpr, Prod, Sum, cardinality


@dataclass(frozen=True)
class PointedSnapshot:
    """A snapshot with a distinguished tuple (repeats allowed)."""

    snapshot: Snapshot
    tuple: tuple[int, ...]

    def __post_init__(self):
        for e in self.tuple:
            if not (0 <= e < self.snapshot.size):
                raise ValueError(f"tuple entry {e} outside the domain")


def pointed(snapshot: Snapshot, *elements: int) -> PointedSnapshot:
    return PointedSnapshot(snapshot, tuple(elements))


# ---------------------------------------------------------------------------
# Atomic types and <=_0
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _atom_list(vocab, m: int) -> tuple:
    """The documented enumeration of atomic formulas over x_0..x_{m-1}.

    Equality atoms come first, ordered by (i, j); then relation atoms
    ordered by (relation index in the vocabulary, variable tuple).
    """
    atoms = [("eq", i, j) for i in range(m) for j in range(i + 1, m)]
    for name, arity in vocab.relations:
        atoms.extend((name, vt) for vt in product(range(m), repeat=arity))
    return tuple(atoms)


def _atom_holds(snap: Snapshot, tup: tuple[int, ...], atom) -> bool:
    if atom[0] == "eq":
        return tup[atom[1]] == tup[atom[2]]
    name, vt = atom
    return tuple(tup[v] for v in vt) in snap.relation(name)


@lru_cache(maxsize=None)
def _atomic_type(snap: Snapshot, tup: tuple[int, ...]) -> frozenset:
    atoms = _atom_list(snap.vocab, len(tup))
    return frozenset(i for i, atom in enumerate(atoms) if _atom_holds(snap, tup, atom))


_ENUM_RE = re.compile(r"^Enumerated\((\d+)\)$")


def leq0(a: PointedSnapshot, b: PointedSnapshot, mode: str = "AllAtomic") -> bool:
    """Atomic-type agreement between the two pointed snapshots.

    mode "AllAtomic" compares every atomic formula over the tuple
    variables; mode "Enumerated(k)" compares only the first k atoms of the
    documented enumeration.
    """
    if len(a.tuple) != len(b.tuple):
        raise LengthMismatchError("pointed tuples have different lengths")
    if a.snapshot.vocab != b.snapshot.vocab:
        raise VocabularyMismatchError("pointed snapshots have different vocabularies")
    if mode == "AllAtomic":
        return _atomic_type(a.snapshot, a.tuple) == _atomic_type(b.snapshot, b.tuple)
    match = _ENUM_RE.match(mode)
    if not match:
        raise ValueError(f"unknown mode {mode!r}")
    k = int(match.group(1))
    atoms = _atom_list(a.snapshot.vocab, len(a.tuple))[:k]
    return all(
        _atom_holds(a.snapshot, a.tuple, atom) == _atom_holds(b.snapshot, b.tuple, atom)
        for atom in atoms
    )


# ---------------------------------------------------------------------------
# The game on snapshots
# ---------------------------------------------------------------------------


def _fresh_tuples(snap: Snapshot, used: tuple[int, ...], max_len: int):
    """All tuples of distinct elements outside `used`, length 0..max_len."""
    free = [e for e in range(snap.size) if e not in set(used)]
    for length in range(0, min(max_len, len(free)) + 1):
        yield from permutations(free, length)


def _responses(snap: Snapshot, used: tuple[int, ...], length: int):
    free = [e for e in range(snap.size) if e not in set(used)]
    return permutations(free, length)


@lru_cache(maxsize=None)
def _game(sa: Snapshot, ta: tuple, sb: Snapshot, tb: tuple, n: int, bounds) -> bool:
    if n == 0:
        return _atomic_type(sa, ta) == _atomic_type(sb, tb)
    # <=_n refines <=_0 (the empty extension played down to depth 0)
    if _atomic_type(sa, ta) != _atomic_type(sb, tb):
        return False
    limit = bounds[0] if bounds else sb.size
    rest = bounds[1:] if bounds and len(bounds) > 1 else None
    for m in range(n):
        sub = rest if m > 0 else None
        for d in _fresh_tuples(sb, tb, limit):
            if not any(
                _game(sb, tb + d, sa, ta + c, m, sub)
                for c in _responses(sa, ta, len(d))
            ):
                return False
    return True


def leq_n_snapshots(
    a: PointedSnapshot, b: PointedSnapshot, n: int, bounds: tuple[int, ...] | None = None
) -> bool:
    """The depth-n back-and-forth relation between pointed snapshots.

    bounds, when given, caps the challenge tuple length per round
    (bounds[0] for the first alternation, bounds[1] for the next, ...);
    without it every round allows up to |dom| fresh elements, which is
    never restrictive.
    """
    if len(a.tuple) != len(b.tuple):
        raise LengthMismatchError("pointed tuples have different lengths")
    if a.snapshot.vocab != b.snapshot.vocab:
        raise VocabularyMismatchError("pointed snapshots have different vocabularies")
    return _game(a.snapshot, a.tuple, b.snapshot, b.tuple, n, tuple(bounds) if bounds else None)


# ---------------------------------------------------------------------------
# The game on unary descriptors
# ---------------------------------------------------------------------------


def _truncated_counts(d: UnaryTail, cap: int) -> tuple:
    counts: dict = {}
    for t, c in d.folded_exceptional():
        counts[t] = min(counts.get(t, 0) + c, cap)
    counts[d.tail] = cap
    return tuple(sorted(counts.items(), key=lambda item: tuple(sorted(item[0]))))


def _count_challenges(counts: tuple, cap: int):
    """All multisets of types drawable from counts, total size <= cap."""
    types = [t for t, _ in counts]
    avail = [c for _, c in counts]

    def rec(i, budget):
        if i == len(types):
            yield ()
            return
        for take in range(min(avail[i], budget) + 1):
            for rest in rec(i + 1, budget - take):
                yield (take,) + rest

    yield from rec(0, cap)


def leq_n_unary(a: UnaryTail, b: UnaryTail, n: int, cap: int) -> bool:
    """The depth-n relation on unary descriptors via capped type counts.

    Every per-type element count (the tail type counts as infinite) is
    truncated to min(count, cap); a move is a multiset of types of total
    size at most cap, drawn from the right side and answered by an equal
    multiset from the left.
    """
    if a.vocab != b.vocab:
        raise VocabularyMismatchError("descriptors have different vocabularies")
    if cap < 1:
        raise ValueError("cap must be at least 1")
    ca = _truncated_counts(a, cap)
    cb = _truncated_counts(b, cap)
    types = sorted(
        {t for t, _ in ca} | {t for t, _ in cb}, key=lambda t: tuple(sorted(t))
    )
    va = tuple(dict(ca).get(t, 0) for t in types)
    vb = tuple(dict(cb).get(t, 0) for t in types)

    @lru_cache(maxsize=None)
    def game(left: tuple, right: tuple, depth: int) -> bool:
        for m in range(depth):
            for move in _challenge_vectors(right, cap):
                if any(move[i] > left[i] for i in range(len(move))):
                    return False
                taken_left = tuple(l - mv for l, mv in zip(left, move))
                taken_right = tuple(r - mv for r, mv in zip(right, move))
                if not game(taken_right, taken_left, m):
                    return False
        return True

    return game(va, vb, n)


@lru_cache(maxsize=None)
def _challenge_vectors(avail: tuple, cap: int) -> tuple:
    out = []

    def rec(i, budget, acc):
        if i == len(avail):
            out.append(tuple(acc))
            return
        for take in range(min(avail[i], budget) + 1):
            acc.append(take)
            rec(i + 1, budget - take, acc)
            acc.pop()

    rec(0, cap, [])
    return tuple(out)


# ---------------------------------------------------------------------------
# Interval profiles and <=_2 on order expressions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CardProfile:
    """Cardinalities of the open intervals cut out by marked points."""

    cards: tuple

    def __post_init__(self):
        if not self.cards:
            raise ValueError("a profile has at least one interval")
        for c in self.cards:
            if c != INF and (not isinstance(c, int) or c < 0):
                raise ValueError(f"bad interval cardinality {c!r}")


def leq1_intervals(a: CardProfile, b: CardProfile) -> bool:
    """Pointwise domination: every interval of a at least as big as b's."""
    if len(a.cards) != len(b.cards):
        raise LengthMismatchError("profiles have different lengths")
    return all(x == INF or (y != INF and x >= y) for x, y in zip(a.cards, b.cards))


def _add(cap: int, x, y):
    if x == INF or y == INF:
        return INF
    return min(x + y, cap)


def _mul(cap: int, d, card):
    if d == 0 or card == 0:
        return 0
    if d == INF or card == INF:
        return INF
    return min(d * card, cap)


def _glue(cap: int, left: tuple, right: tuple) -> tuple:
    return left[:-1] + (_add(cap, left[-1], right[0]),) + right[1:]


def _compositions(total: int, parts: int):
    """All tuples of `parts` naturals summing to total."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _positive_compositions(total: int, parts: int):
    for comp in _compositions(total - parts, parts):
        yield tuple(c + 1 for c in comp)


_profile_cache: dict = {}


def _profiles(e: OrderExpr, p: int, cap: int, minimal: bool) -> frozenset:
    key = (e, p, cap, minimal)
    if key in _profile_cache:
        return _profile_cache[key]
    result = _reduce(_profiles_raw(e, p, cap, minimal), minimal)
    _profile_cache[key] = result
    return result


def _profiles_raw(e: OrderExpr, p: int, cap: int, minimal: bool) -> set:
    if isinstance(e, Fin):
        if p > e.size:
            return set()
        return set(_compositions(e.size - p, p + 1))
    if isinstance(e, Atom):
        if e.symbol == "w":
            finite = (0,) if minimal else tuple(range(cap + 1))
            return {c + (INF,) for c in product(finite, repeat=p)}
        if e.symbol == "w*":
            finite = (0,) if minimal else tuple(range(cap + 1))
            return {(INF,) + c for c in product(finite, repeat=p)}
        if e.symbol == "z":
            return _combine_sum((Atom("w*"), Atom("w")), p, cap, minimal)
        if e.symbol == "q":
            return {(INF,) * (p + 1)}
        # W: each bounded interval may take any size, including infinite
        finite = (0,) if minimal else tuple(range(cap + 1)) + (INF,)
        return {c + (INF,) for c in product(finite, repeat=p)}
    if isinstance(e, Sum):
        return _combine_sum(e.parts, p, cap, minimal)
    return _combine_prod(e, p, cap, minimal)


def _combine_sum(parts: tuple, p: int, cap: int, minimal: bool) -> set:
    acc = {None}
    for i, part in enumerate(parts):
        nxt = set()
        remaining = len(parts) - 1 - i
        for prof in acc:
            used = 0 if prof is None else len(prof) - 1
            for q in range(p - used + 1):
                if remaining == 0 and q != p - used:
                    continue
                for right in _profiles(part, q, cap, minimal):
                    nxt.add(right if prof is None else _glue(cap, prof, right))
        acc = _reduce(nxt, minimal)
    return {prof for prof in acc if len(prof) == p + 1}


def _combine_prod(e: Prod, p: int, cap: int, minimal: bool) -> set:
    card_left = cardinality(e.left)
    out = set()
    for m in range(p + 1):
        if m == 0:
            for q in _profiles(e.right, 0, cap, minimal):
                out.add((_mul(cap, q[0], card_left),))
            continue
        for q in _profiles(e.right, m, cap, minimal):
            for sizes in _positive_compositions(p, m):
                inner_sets = [_profiles(e.left, s, cap, minimal) for s in sizes]
                if any(not s for s in inner_sets):
                    continue
                for rs in product(*inner_sets):
                    prof = [_add(cap, _mul(cap, q[0], card_left), rs[0][0])]
                    for j in range(m):
                        prof.extend(rs[j][1:-1])
                        host = _mul(cap, q[j + 1], card_left)
                        if j + 1 < m:
                            mid = _add(cap, rs[j][-1], _add(cap, host, rs[j + 1][0]))
                            prof.append(mid)
                        else:
                            prof.append(_add(cap, rs[j][-1], host))
                    out.add(tuple(prof))
    return {prof for prof in out if len(prof) == p + 1}


def _dominates(x: tuple, y: tuple) -> bool:
    """x >= y pointwise, INF on x's side matching anything below it."""
    if len(x) != len(y):
        return False
    return all(a == INF or (b != INF and a >= b) for a, b in zip(x, y))


def _reduce(profiles: set, minimal: bool) -> frozenset:
    if not minimal:
        return frozenset(profiles)
    items = sorted(profiles)
    keep = []
    for x in items:
        if not any(x != y and _dominates(x, y) for y in items):
            keep.append(x)
    return frozenset(keep)


def interval_profiles(e: OrderExpr, points: int, cap: int) -> frozenset:
    """All cardinality profiles achievable by marking `points` distinct
    elements of the order e denotes.

    Entries are truncated at cap: a finite value at least cap is reported
    as cap, an infinite one as INF.
    """
    if points < 0:
        raise ValueError("points must be a natural number")
    if cap < 1:
        raise ValueError("cap must be at least 1")
    return frozenset(CardProfile(prof) for prof in _profiles(e, points, cap, False))


def minimal_interval_profiles(e: OrderExpr, points: int, cap: int) -> frozenset:
    """The pointwise-minimal antichain of interval_profiles(e, points, cap)."""
    if points < 0:
        raise ValueError("points must be a natural number")
    if cap < 1:
        raise ValueError("cap must be at least 1")
    return frozenset(CardProfile(prof) for prof in _profiles(e, points, cap, True))


def leq2_order(a: OrderExpr, b: OrderExpr, cap: int = 6) -> bool:
    """The depth-2 relation on order expressions via profile domination.

    a <=_2 b holds when every profile of b, for every number of marked
    points up to cap, is dominated by some profile of a with the same
    number of intervals (the role swap: the response must satisfy
    (B, marks) <=_1 (A, response), i.e. b's intervals at least as large).
    """
    if cap < 2:
        raise ValueError("cap must be at least 2")
    for p in range(cap + 1):
        b_min = _profiles(b, p, cap, True)
        a_min = _profiles(a, p, cap, True)
        for q in b_min:
            if not any(_dominates(q, r) for r in a_min):
                return False
    return True


def equiv2_described(a: StructureDescriptor, b: StructureDescriptor, cap: int | None = None) -> bool:
    """Depth-2 equivalence of described structures, both directions."""
    if isinstance(a, UnaryTail) and isinstance(b, UnaryTail):
        if cap is None:
            cap = 3 * (max(a.exceptional_total(), b.exceptional_total()) + 1)
        return leq_n_unary(a, b, 2, cap) and leq_n_unary(b, a, 2, cap)
    if isinstance(a, OrderType) and isinstance(b, OrderType):
        if cap is None:
            cap = 6
        return leq2_order(a.expr, b.expr, cap) and leq2_order(b.expr, a.expr, cap)
    raise VariantMismatchError("cannot compare descriptors of different classes")


# ---------------------------------------------------------------------------
# The sentence-enumeration oracle
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _extension_types(snap: Snapshot, k: int, l: int) -> dict:
    """For each k-tuple, the set of atomic types of its l-extensions."""
    table = {}
    for base in product(range(snap.size), repeat=k):
        table[base] = frozenset(
            _atomic_type(snap, base + ext)
            for ext in product(range(snap.size), repeat=l)
        )
    return table


def pi_n_oracle(a: Snapshot, b: Snapshot, n: int, var_bound: int) -> bool:
    """Whether every Pi_n sentence with at most var_bound variables that is
    true in a is true in b.

    Decided through atomic-type semantics rather than by listing sentences:
    a quantifier-free matrix is any boolean function of the atomic type, so
    Pi_1 inclusion means every realized type of b is realized in a, and
    Pi_2 inclusion means every universal prefix choice in b can be answered
    by one in a whose extension types all recur in b's.
    """
    if a.vocab != b.vocab:
        raise VocabularyMismatchError("snapshots have different vocabularies")
    if n not in (0, 1, 2):
        raise BoundExceededError("only n in {0, 1, 2} is supported")
    if a.size > 4 or b.size > 4 or var_bound > 4:
        raise BoundExceededError("oracle is restricted to sizes and bounds up to 4")
    if n == 0:
        return True
    if n == 1:
        for k in range(var_bound + 1):
            types_a = frozenset(
                _atomic_type(a, t) for t in product(range(a.size), repeat=k)
            )
            types_b = frozenset(
                _atomic_type(b, t) for t in product(range(b.size), repeat=k)
            )
            if not types_b <= types_a:
                return False
        return True
    for k in range(var_bound + 1):
        for l in range(var_bound - k + 1):
            ext_a = _extension_types(a, k, l)
            ext_b = _extension_types(b, k, l)
            for bbar, tb in ext_b.items():
                if not any(ta <= tb for ta in ext_a.values()):
                    return False
    return True


def clear_comparison_caches() -> None:
    """Drop the memo tables keyed by snapshots.

    The game and oracle caches are unbounded because a typical run compares
    a handful of structures over and over. A long batch sweep over many
    distinct snapshots instead grows them without limit, so such a sweep
    should call this between blocks to keep memory flat.
    """
    _game.cache_clear()
    _atomic_type.cache_clear()
    _extension_types.cache_clear()
