"""Learning sessions, the swap adversary, and family learnability checks.

Everything here is horizon-bounded: a session runs a learner along a
presentation up to a stage and records the trace, success evaluation reads
stabilization and correctness off that trace, and the swap experiment
reports refutations found at the horizon, never limit claims.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass
from itertools import combinations_with_replacement

from .bfgame import (
    CardProfile,
    equiv2_described,
    interval_profiles,
    leq1_intervals,
    leq_n_unary,
    minimal_interval_profiles,
)
from .core import (
    Family,
    OrderType,
    Pattern,
    UnaryTail,
    iso_described,
    permuted_presentation,
    restrict,
)
from .errors import (
    PreconditionError,
    UnsupportedError,
    VariantMismatchError,
    VocabularyMismatchError,
)
from .learn import counter_learner, witness_sentence
from .orderalg import INF, format_expr


def descriptor_label(d):
    """A short stable text identifier for a structure descriptor."""
    if isinstance(d, UnaryTail):
        def fmt(t):
            return "&".join(sorted(t)) if t else "-"

        exc = ",".join(f"{count}x{fmt(t)}" for t, count in d.exceptional)
        return f"unary({exc or 'pure'};tail {fmt(d.tail)})"
    return format_expr(d.expr)


def family_label(fam):
    return " | ".join(descriptor_label(d) for d in fam.base)


@dataclass(frozen=True)
class SessionResult:
    """The full record of one learner run along one presentation."""

    trace: tuple[int, ...]
    stabilized_at: int | None
    final: int
    horizon: int
    family_ref: str
    presentation_ref: str

    def __post_init__(self):
        if len(self.trace) != self.horizon + 1:
            raise ValueError("trace length must be horizon + 1")
        if self.final != self.trace[-1]:
            raise ValueError("final must equal the last trace entry")


def run_session(fam, p, L, horizon):
    """Step the learner along the presentation and record the trace.

    stabilized_at is the least stage from which the trace is constant
    through the horizon, and is absent when the trace still changes at the
    horizon itself.
    """
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    trace = tuple(L.step(restrict(p, n)) for n in range(horizon + 1))
    settle = horizon
    while settle > 0 and trace[settle - 1] == trace[horizon]:
        settle -= 1
    return SessionResult(
        trace=trace,
        stabilized_at=settle if settle < horizon else None,
        final=trace[-1],
        horizon=horizon,
        family_ref=family_label(fam),
        presentation_ref=p.label,
    )


def evaluate_success(result, fam, truth, mode, window, diagnostics=None):
    """Horizon-bounded reading of the two success notions.

    Ex: the trace stabilized and its final entry names a structure
    isomorphic to the truth.  Bc: every entry in the closing window does.
    A hypothesis whose descriptor cannot be compared with the truth counts
    as failure; a note is appended to diagnostics when a list is given.
    """
    if window > result.horizon:
        raise ValueError("window must not exceed the horizon")
    if mode not in ("Ex", "Bc"):
        raise ValueError(f"unknown success mode {mode!r}")

    def correct(index):
        try:
            return iso_described(fam.entry(index), truth)
        except VariantMismatchError:
            if diagnostics is not None:
                diagnostics.append(
                    f"hypothesis {index} names a descriptor of a different kind"
                )
            return False

    if mode == "Ex":
        return result.stabilized_at is not None and correct(result.final)
    lo = result.horizon - window
    return all(correct(result.trace[n]) for n in range(lo, result.horizon + 1))


class Outcome(enum.Enum):
    REFUTED_AT_HORIZON = "RefutedAtHorizon"
    NO_REFUTATION_FOUND = "NoRefutationFound"


@dataclass(frozen=True)
class SwapEvidence:
    """What a refutation points at: the swapped family, the pivot stage
    the first run stabilized to, the failing trace tail, and where it
    happened."""

    family: Family
    stage: int
    trace_segment: tuple[int, ...]
    seed: int
    phase: int


@dataclass(frozen=True)
class Verdict:
    outcome: Outcome
    evidence: SwapEvidence | None
    diagnostics: tuple[str, ...] = ()

    def __post_init__(self):
        if self.outcome is Outcome.REFUTED_AT_HORIZON and self.evidence is None:
            raise ValueError("a refutation needs its evidence attached")


def _swapped_parity(a1, a2, pivot):
    # the parity family with the single entry at the pivot index flipped
    initial = tuple(n % 2 for n in range(pivot)) + (1 - pivot % 2,)
    cycle = ((pivot + 1) % 2, (pivot + 2) % 2)
    return Family((a1, a2), Pattern(initial, cycle))


def _variant(d):
    return "unary" if isinstance(d, UnaryTail) else "order"


def _unary_available(d):
    avail = dict(d.folded_exceptional())
    avail[d.tail] = INF
    return avail


def _unary_abstractions(d, tuple_bound):
    avail = _unary_available(d)
    types = sorted(avail, key=sorted)
    combos = []
    for k in range(tuple_bound + 1):
        for combo in combinations_with_replacement(types, k):
            if _realizable(combo, avail):
                combos.append(combo)
    return combos


def _realizable(combo, avail):
    counts = Counter(combo)
    return all(avail.get(t, 0) == INF or counts[t] <= avail.get(t, 0) for t in counts)


def _unary_remainder(d, combo):
    counts = dict(d.folded_exceptional())
    for t in combo:
        if t != d.tail and t in counts:
            counts[t] -= 1
    return UnaryTail.make(
        d.vocab, {t: c for t, c in counts.items() if c > 0}, d.tail
    )


def _order_abstractions(d, tuple_bound, cap):
    def sort_key(profile):
        return tuple(cap + 1 if c == INF else c for c in profile.cards)

    out = []
    for k in range(tuple_bound + 1):
        for profile in sorted(interval_profiles(d.expr, k, cap), key=sort_key):
            out.append(profile.cards)
    return out


def _abstractions(d, tuple_bound, cap):
    if isinstance(d, UnaryTail):
        return _unary_abstractions(d, tuple_bound)
    return _order_abstractions(d, tuple_bound, cap)


def _dominated_somewhere(di, abstraction, dj, cap):
    """Whether some same-shape tuple abstraction over dj sits above this one."""
    if isinstance(di, UnaryTail):
        if not _realizable(abstraction, _unary_available(dj)):
            return False
        try:
            return leq_n_unary(
                _unary_remainder(di, abstraction),
                _unary_remainder(dj, abstraction),
                1,
                cap,
            )
        except VocabularyMismatchError:
            return False
    marks = len(abstraction) - 1
    mine = CardProfile(abstraction)
    return any(
        leq1_intervals(mine, q)
        for q in minimal_interval_profiles(dj.expr, marks, cap)
    )


def _iso_quiet(a, b):
    try:
        return iso_described(a, b)
    except VariantMismatchError:
        return False


def _condition3_core(fam, tuple_bound, cap, strict):
    if tuple_bound < 1:
        raise ValueError("tuple bound must be at least 1")
    witnesses = {}
    for i, di in enumerate(fam.base):
        found = None
        for abstraction in _abstractions(di, tuple_bound, cap):
            ok = True
            for j, dj in enumerate(fam.base):
                if strict and j == i:
                    continue
                if not strict and _iso_quiet(di, dj):
                    continue
                if _variant(di) != _variant(dj):
                    continue
                if _dominated_somewhere(di, abstraction, dj, cap):
                    ok = False
                    break
            if ok:
                found = abstraction
                break
        if found is None:
            return None
        witnesses[i] = found
    return witnesses


def condition3_report(fam, tuple_bound, cap):
    """Per-index separating tuple abstractions, or None when some index
    has none.

    An index i is served by an abstraction over fam[i] such that no
    same-shape abstraction over any non-isomorphic fam[j] sits above it in
    the depth-1 pointed comparison.
    """
    return _condition3_core(fam, tuple_bound, cap, strict=False)


def condition3_check(fam, tuple_bound, cap):
    return condition3_report(fam, tuple_bound, cap) is not None


def condition3a_check(fam, tuple_bound, cap):
    """The strict variant: no iso escape hatch, all other indices opposed.

    The base must be pairwise non-isomorphic; duplicated entries are an
    error because this check doubles as the duplicate-free membership
    test.
    """
    base = fam.base
    for i in range(len(base)):
        for j in range(i + 1, len(base)):
            if _iso_quiet(base[i], base[j]):
                raise PreconditionError(
                    f"base contains isomorphic duplicates at indices {i} and {j}"
                )
    return _condition3_core(fam, tuple_bound, cap, strict=True) is not None


def _auto_sentences(a1, a2, tuple_bound, cap):
    witnesses = _condition3_core(Family.parity(a1, a2), tuple_bound, cap, strict=True)
    if witnesses is None:
        raise UnsupportedError(
            "no depth-1 separating witnesses at these bounds; supply sentences"
        )
    return (
        witness_sentence(a1, witnesses[0]),
        witness_sentence(a2, witnesses[1]),
    )


def swap_experiment(
    translate, a1, a2, horizon, seeds, sentences=None, tuple_bound=3, cap=4
):
    """Try to refute a learner translation with a single swapped entry.

    For each seed the translated counting learner runs on a presentation
    of a1 over the parity family; if it stabilizes to a pivot index, the
    family entry at the pivot is flipped and the translated learner runs
    again on the same presentation.  A stabilized run whose named entry is
    not isomorphic to a1, in either phase, is a refutation; everything
    else is reported as not refuted, with per-seed diagnostics.
    """
    if equiv2_described(a1, a2):
        raise PreconditionError(
            "the swap adversary needs a depth-2 separated pair of descriptors"
        )
    if sentences is None:
        sentences = _auto_sentences(a1, a2, tuple_bound, cap)
    psi, theta = sentences
    fam = Family.parity(a1, a2)
    notes = []
    for seed in seeds:
        p = permuted_presentation(a1, seed)
        L = counter_learner(psi, theta)
        first = run_session(fam, p, translate(fam, L), horizon)
        if first.stabilized_at is None:
            notes.append(f"seed {seed}: no stabilization at horizon {horizon}")
            continue
        pivot = first.final
        swapped = _swapped_parity(a1, a2, pivot)
        if not iso_described(fam.entry(pivot), a1):
            return Verdict(
                Outcome.REFUTED_AT_HORIZON,
                SwapEvidence(
                    family=swapped,
                    stage=pivot,
                    trace_segment=first.trace[first.stabilized_at :],
                    seed=seed,
                    phase=1,
                ),
                tuple(notes),
            )
        second = run_session(swapped, p, translate(swapped, L), horizon)
        if second.stabilized_at is None:
            notes.append(f"seed {seed}: rerun did not stabilize at horizon {horizon}")
            continue
        if not iso_described(swapped.entry(second.final), a1):
            return Verdict(
                Outcome.REFUTED_AT_HORIZON,
                SwapEvidence(
                    family=swapped,
                    stage=pivot,
                    trace_segment=second.trace[second.stabilized_at :],
                    seed=seed,
                    phase=2,
                ),
                tuple(notes),
            )
        notes.append(f"seed {seed}: rerun stabilized to an entry matching the target")
    return Verdict(Outcome.NO_REFUTATION_FOUND, None, tuple(notes))
