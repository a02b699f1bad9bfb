"""Learners over growing snapshots and translations between them.

A finite-form learner maps a snapshot to a hypothesis index and nothing
else, so its whole history is recoverable from the latest snapshot by
taking induced prefixes.  The concrete learners here exploit that: they
memoize per-prefix state inside the instance and extend it one stage at a
time when stepped along a presentation.

Sentences are existential-universal with a quantifier-free matrix given as
clause data, never as code: a matrix is a conjunction of clauses, a clause
a disjunction of signed atoms, an atom either a relation applied to terms
or an equality of terms, and a term a reference into the x-tuple or the
y-tuple.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import Callable

from .core import (
    Family,
    PresentationStream,
    Snapshot,
    UnaryTail,
    extends_prefix,
    induced_prefix,
    iso_described,
    restrict,
)
from .bfgame import equiv2_described
from .orderalg import INF


def _check_term(term, x_arity, y_arity):
    if not (isinstance(term, tuple) and len(term) == 2 and term[0] in ("x", "y")):
        raise ValueError(f"bad term {term!r}")
    bound = x_arity if term[0] == "x" else y_arity
    if not (isinstance(term[1], int) and 0 <= term[1] < bound):
        raise ValueError(f"term index out of range in {term!r}")


@dataclass(frozen=True)
class Sigma2Sentence:
    """An exists-x-tuple forall-y-tuple sentence with a clause-list matrix."""

    x_arity: int
    y_arity: int
    matrix: tuple[tuple[tuple[bool, tuple], ...], ...]

    def __post_init__(self):
        if self.x_arity < 0 or self.y_arity < 0:
            raise ValueError("arities must not be negative")
        for clause in self.matrix:
            for positive, atom in clause:
                if not isinstance(positive, bool):
                    raise ValueError("literal sign must be a boolean")
                if atom[0] == "rel":
                    _, name, terms = atom
                    if not isinstance(name, str):
                        raise ValueError("relation name must be a string")
                    for term in terms:
                        _check_term(term, self.x_arity, self.y_arity)
                elif atom[0] == "eq":
                    _, left, right = atom
                    _check_term(left, self.x_arity, self.y_arity)
                    _check_term(right, self.x_arity, self.y_arity)
                else:
                    raise ValueError(f"unknown atom kind {atom[0]!r}")


def _matrix_holds(rels, matrix, xs, ys):
    for clause in matrix:
        for positive, atom in clause:
            if atom[0] == "eq":
                _, left, right = atom
                a = xs[left[1]] if left[0] == "x" else ys[left[1]]
                b = xs[right[1]] if right[0] == "x" else ys[right[1]]
                value = a == b
            else:
                _, name, terms = atom
                tup = tuple(
                    xs[t[1]] if t[0] == "x" else ys[t[1]] for t in terms
                )
                value = tup in rels[name]
            if value == positive:
                break
        else:
            return False
    return True


def _relation_map(snap):
    return {name: snap.relation(name) for name, _ in snap.vocab.relations}


def eval_sigma2_bounded(snap, sentence):
    """Evaluate the sentence with both quantifiers bounded to the domain."""
    rels = _relation_map(snap)
    domain = range(snap.size)
    for xs in product(domain, repeat=sentence.x_arity):
        if all(
            _matrix_holds(rels, sentence.matrix, xs, ys)
            for ys in product(domain, repeat=sentence.y_arity)
        ):
            return True
    return False


_WITNESS_TABLES: dict[int, list[tuple[int, ...]]] = {}


def witness_tuple(arity, code):
    """Decode a witness code to a tuple, ordered by (max entry, lex).

    Arity zero has the single code 0; decoding any other arity-zero code
    returns None, as does nothing else.
    """
    if code < 0:
        raise ValueError("witness codes are naturals")
    if arity == 0:
        return () if code == 0 else None
    table = _WITNESS_TABLES.setdefault(arity, [])
    while len(table) <= code:
        ceiling = max(table[-1]) + 1 if table else 0
        table.extend(
            t for t in product(range(ceiling + 1), repeat=arity) if max(t) == ceiling
        )
    return table[code]


@dataclass(frozen=True)
class Learner:
    """A total deterministic map from snapshots to hypothesis indices."""

    step: Callable[[Snapshot], int]


@dataclass(frozen=True)
class StreamLearner:
    """A learner reading a presentation stream directly.

    step(p, n) is the hypothesis at stage n; use(p, n) reports the largest
    stage queried to produce it.
    """

    step: Callable[[PresentationStream, int], int]
    use: Callable[[PresentationStream, int], int]


def _tuples_with_elem(size, arity, elem):
    """All arity-tuples over range(size) containing elem, given elem == size-1."""
    for k in range(arity):
        for pre in product(range(elem), repeat=k):
            for post in product(range(size), repeat=arity - 1 - k):
                yield pre + (elem,) + post


def _falsified(rels, sentence, xs, ys_iter):
    for ys in ys_iter:
        if not _matrix_holds(rels, sentence.matrix, xs, ys):
            return True
    return False


def qss_learner(sentences):
    """The lexicographic minimal-witness learner over a sentence list.

    Per sentence the learner tracks the least witness code whose tuple the
    current snapshot fails to refute; refutations are permanent because
    snapshots only grow.  At stage n it outputs the sentence index i <= n
    minimizing the pair (current witness code, i), treating a sentence
    whose codes up to n are all refuted as unavailable, and outputs 0 when
    every sentence is unavailable.
    """
    sentences = tuple(sentences)
    if not sentences:
        raise ValueError("qss_learner needs at least one sentence")
    memo: dict[Snapshot, tuple[int, ...]] = {}

    def advance(snap, rels, sentence, pointer, fresh):
        # fresh means the pointer's tuple was never verified against any
        # prefix; otherwise only tuples touching the newest element matter
        size = snap.size
        newest = size - 1
        while True:
            tup = witness_tuple(sentence.x_arity, pointer)
            if tup is None:
                return pointer
            if tup and max(tup) >= size:
                return pointer
            if fresh or (tup and max(tup) == newest):
                ys = product(range(size), repeat=sentence.y_arity)
            else:
                ys = _tuples_with_elem(size, sentence.y_arity, newest)
            if not _falsified(rels, sentence, tup, ys):
                return pointer
            pointer += 1
            fresh = True

    last = None

    def ensure(snap):
        nonlocal last
        if snap in memo:
            last = snap
            return memo[snap]
        if last is not None and extends_prefix(snap, last):
            rels = _relation_map(snap)
            memo[snap] = tuple(
                advance(snap, rels, s, p, False)
                for s, p in zip(sentences, memo[last])
            )
            last = snap
            return memo[snap]
        pending = []
        current = snap
        while current not in memo and current.size > 1:
            pending.append(current)
            current = induced_prefix(current, current.size - 1)
        if current not in memo:
            rels = _relation_map(current)
            memo[current] = tuple(
                advance(current, rels, s, 0, True) for s in sentences
            )
        previous_snap = current
        for step_snap in reversed(pending):
            rels = _relation_map(step_snap)
            memo[step_snap] = tuple(
                advance(step_snap, rels, s, p, False)
                for s, p in zip(sentences, memo[previous_snap])
            )
            previous_snap = step_snap
        last = snap
        return memo[snap]

    def step(snap):
        pointers = ensure(snap)
        stage = snap.size - 1
        best = None
        for i, sentence in enumerate(sentences):
            if i > stage:
                break
            pointer = pointers[i]
            if pointer > stage or witness_tuple(sentence.x_arity, pointer) is None:
                continue
            if best is None or (pointer, i) < best:
                best = (pointer, i)
        return best[1] if best is not None else 0

    return Learner(step)


def counter_learner(psi, theta):
    """The two-sentence occurrence-counting learner.

    At stage s it finds the least in-range witness code for each sentence
    that the snapshot does not refute, counts how many stages so far share
    that exact minimum, and outputs 2s+2 when the psi count exceeds the
    theta count, 2s+1 otherwise.  An undefined minimum counts zero.
    """
    memo: dict[Snapshot, tuple[tuple[int | None, int | None], ...]] = {}

    def minimum(snap, rels, sentence):
        size = snap.size
        code = 0
        while True:
            tup = witness_tuple(sentence.x_arity, code)
            if tup is None or (tup and max(tup) >= size):
                return None
            if not _falsified(
                rels, sentence, tup, product(range(size), repeat=sentence.y_arity)
            ):
                return code
            code += 1

    last = None

    def ensure(snap):
        nonlocal last
        if snap in memo:
            last = snap
            return memo[snap]
        if last is not None and extends_prefix(snap, last):
            rels = _relation_map(snap)
            memo[snap] = memo[last] + (
                (minimum(snap, rels, psi), minimum(snap, rels, theta)),
            )
            last = snap
            return memo[snap]
        pending = []
        current = snap
        while current not in memo and current.size > 1:
            pending.append(current)
            current = induced_prefix(current, current.size - 1)
        if current not in memo:
            rels = _relation_map(current)
            memo[current] = ((minimum(current, rels, psi), minimum(current, rels, theta)),)
        previous_snap = current
        for step_snap in reversed(pending):
            rels = _relation_map(step_snap)
            memo[step_snap] = memo[previous_snap] + (
                (minimum(step_snap, rels, psi), minimum(step_snap, rels, theta)),
            )
            previous_snap = step_snap
        last = snap
        return memo[snap]

    def step(snap):
        history = ensure(snap)
        s = snap.size - 1
        a_s, b_s = history[s]
        c_a = sum(1 for a, _ in history if a == a_s) if a_s is not None else 0
        c_b = sum(1 for _, b in history if b == b_s) if b_s is not None else 0
        return 2 * s + 2 if c_a > c_b else 2 * s + 1

    return Learner(step)


def _first_matching_index(fam, target_base, same_class):
    i = 0
    while True:
        if same_class(fam.base[fam.index(i)], fam.base[target_base]):
            return i
        i += 1


def min_iso_translate(fam, L):
    """Remap L's outputs to the least family index of the same iso class."""
    memo = {}

    def translate(j):
        key = fam.index(j)
        if key not in memo:
            memo[key] = _first_matching_index(fam, key, iso_described)
        return memo[key]

    return Learner(lambda snap: translate(L.step(snap)))


def equiv2_translate(fam, L):
    """Remap L's outputs to the least family index of the same depth-2 class."""
    memo = {}

    def translate(j):
        key = fam.index(j)
        if key not in memo:
            memo[key] = _first_matching_index(fam, key, equiv2_described)
        return memo[key]

    return Learner(lambda snap: translate(L.step(snap)))


def freeze_translate(fam, L):
    """Output L's first-stage hypothesis forever.

    A deliberately bad translation candidate for the swap adversary: it
    commits to the hypothesis formed on the one-element snapshot and never
    revises, so a family edit at the committed index goes unnoticed.
    """
    del fam
    return Learner(lambda snap: L.step(induced_prefix(snap, 1)))


def uniform_equiv2_translate(L):
    """Wrap a family-reading learner with the depth-2 minimization pointwise."""
    memo: dict[tuple[Family, int], int] = {}

    def wrapped(fam, stream, stage):
        j = L(fam, stream, stage)
        key = (fam, fam.index(j))
        if key not in memo:
            memo[key] = _first_matching_index(fam, fam.index(j), equiv2_described)
        return memo[key]

    return wrapped


def dedup_family(fam):
    """One representative per iso class, ordered by first pattern occurrence.

    Base members the pattern never reaches are appended afterwards in base
    order, so every original member stays represented.
    """
    reps = []
    span = len(fam.pattern.initial) + len(fam.pattern.cycle)
    candidates = [fam.entry(n) for n in range(span)] + list(fam.base)
    for d in candidates:
        if not any(iso_described(d, r) for r in reps):
            reps.append(d)
    return Family.default(tuple(reps))


def adapt(f):
    """Lift a finite-form learner to a stream learner reading whole prefixes."""
    return StreamLearner(
        step=lambda p, n: f.step(restrict(p, n)),
        use=lambda p, n: n,
    )


class _CeilingReached(Exception):
    pass


class _SnapshotStream:
    """A stream proxy backed by one snapshot, recording the stages queried."""

    def __init__(self, snap):
        self._snap = snap
        self.max_queried = -1

    def snapshot(self, stage):
        self.max_queried = max(self.max_queried, stage)
        if stage >= self._snap.size:
            raise _CeilingReached
        return induced_prefix(self._snap, stage + 1)


def adapt_back(L):
    """Recover a finite-form learner from a stream learner.

    On a snapshot covering stages 0..n the result replays L at successive
    stages through an instrumented proxy and returns the output of the
    largest stage whose recorded accesses stayed within n, or 0 when even
    stage 0 reads past the snapshot.
    """

    def step(snap):
        stage_bound = snap.size - 1
        output = 0
        for k in range(stage_bound + 1):
            proxy = _SnapshotStream(snap)
            try:
                output_k = L.step(proxy, k)
            except _CeilingReached:
                break
            output = output_k
        return output

    return Learner(step)


def witness_sentence(descriptor, witness):
    """Build the sentence asserting a witness tuple and its universal facts.

    For a unary descriptor the witness is a multiset of 1-types (an
    iterable of frozensets of predicate names): the sentence posits
    pairwise distinct elements of those types and, for every type with a
    finite count left over, that no further elements of it exist beyond
    the leftover bound.  For an order descriptor the witness is an
    interval cardinality profile: the sentence posits an increasing tuple
    whose finite intervals hold at most the stated number of points, with
    finite entries read as exact counts.
    """
    if isinstance(descriptor, UnaryTail):
        return _unary_witness_sentence(descriptor, witness)
    return _order_witness_sentence(witness)


def _unary_witness_sentence(descriptor, witness):
    witness = tuple(witness)
    preds = descriptor.vocab.names()
    remaining = dict(descriptor.folded_exceptional())
    tail = descriptor.tail
    remaining[tail] = INF
    for t in witness:
        if remaining.get(t, 0) == 0:
            raise ValueError(f"witness type {set(t)!r} is not realizable")
        if remaining[t] != INF:
            remaining[t] -= 1
    clauses = []
    for r, t in enumerate(witness):
        for p in preds:
            clauses.append(((p in t, ("rel", p, (("x", r),))),))
    for r in range(len(witness)):
        for s in range(r + 1, len(witness)):
            clauses.append(((False, ("eq", ("x", r), ("x", s))),))
    bounds = []
    for size in range(len(preds) + 1):
        for t in map(frozenset, combinations(preds, size)):
            count = remaining.get(t, 0)
            if count != INF:
                bounds.append((t, count))
    y_arity = max((count + 1 for _, count in bounds), default=0)
    for t, count in bounds:
        clause = []
        for a in range(count + 1):
            for b in range(a + 1, count + 1):
                clause.append((True, ("eq", ("y", a), ("y", b))))
        for a in range(count + 1):
            for r in range(len(witness)):
                clause.append((True, ("eq", ("y", a), ("x", r))))
            for p in preds:
                clause.append((p not in t, ("rel", p, (("y", a),))))
        clauses.append(tuple(clause))
    return Sigma2Sentence(len(witness), y_arity, tuple(clauses))


def _order_witness_sentence(witness):
    profile = tuple(witness)
    if not profile:
        raise ValueError("an interval profile has at least one entry")
    k = len(profile) - 1
    clauses = []
    for r in range(k - 1):
        clauses.append(((True, ("rel", "lt", (("x", r), ("x", r + 1)))),))
    finite = [c for c in profile if c != INF]
    y_arity = max((c + 1 for c in finite), default=0)
    for j, count in enumerate(profile):
        if count == INF:
            continue
        clause = []
        for a in range(count + 1):
            for b in range(a + 1, count + 1):
                clause.append((True, ("eq", ("y", a), ("y", b))))
        for a in range(count + 1):
            if j > 0:
                clause.append((False, ("rel", "lt", (("x", j - 1), ("y", a)))))
            if j < k:
                clause.append((False, ("rel", "lt", (("y", a), ("x", j)))))
        clauses.append(tuple(clause))
    return Sigma2Sentence(k, y_arity, tuple(clauses))
