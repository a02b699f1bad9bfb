"""Tests for snapshots, descriptors, presentations, and isomorphism checks."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bflearn.core import (
    ORDER_VOCAB,
    Family,
    Pattern,
    PresentationStream,
    Snapshot,
    UnaryTail,
    Vocabulary,
    canonical_presentation,
    extends_prefix,
    induced_prefix,
    iso_described,
    iso_snapshots,
    order_type,
    permuted_presentation,
    presentation_with_schedule,
    restrict,
    swap_adjacent_schedule,
    unary_types,
    unary_vocab,
)
from bflearn.errors import (
    UnsupportedError,
    VariantMismatchError,
    VocabularyMismatchError,
)

P_VOCAB = unary_vocab("P")
ALL_P = UnaryTail.make(P_VOCAB, {}, {"P"})
ONE_NOT_P = UnaryTail.make(P_VOCAB, {frozenset(): 1}, {"P"})


def chain(n):
    lt = {(i, j) for i in range(n) for j in range(i + 1, n)}
    return Snapshot.make(ORDER_VOCAB, n, {"lt": lt})


def test_vocabulary_validation():
    with pytest.raises(ValueError):
        Vocabulary(())
    with pytest.raises(ValueError):
        Vocabulary((("P", 1), ("P", 2)))
    with pytest.raises(ValueError):
        Vocabulary((("P", 0),))
    assert unary_vocab("P", "Q").all_unary
    assert ORDER_VOCAB.arity("lt") == 2


def test_snapshot_make_validates():
    with pytest.raises(ValueError):
        Snapshot.make(ORDER_VOCAB, 2, {"lt": {(0, 1, 2)}})
    with pytest.raises(ValueError):
        Snapshot.make(ORDER_VOCAB, 2, {"lt": {(0, 5)}})
    s = Snapshot.make(ORDER_VOCAB, 2, {"lt": {(0, 1)}})
    assert s.relation("lt") == {(0, 1)}


def test_restrict_all_p_structure():
    p = canonical_presentation(ALL_P)
    s = restrict(p, 2)
    assert s.size == 3
    assert s.relation("P") == {(0,), (1,), (2,)}


def test_restrict_omega_first_stage():
    s = restrict(canonical_presentation(order_type("w")), 0)
    assert s.size == 1
    assert s.relation("lt") == frozenset()


def test_restrict_two_block_order_default_schedule():
    # The default schedule interleaves the two blocks: stage order is
    # block0[0], block1[0], block0[1], block1[1], so as elements
    # 0 < 2 < 1 < 3.
    p = canonical_presentation(order_type("w+w"))
    s = restrict(p, 3)
    assert s.size == 4
    assert s.relation("lt") == {(0, 1), (0, 2), (0, 3), (2, 1), (2, 3), (1, 3)}


def test_restrict_is_coherent_prefixwise():
    p = canonical_presentation(order_type("z"))
    for s in range(8):
        assert induced_prefix(restrict(p, s + 1), s + 1) == restrict(p, s)


def test_iso_snapshots_examples():
    assert iso_snapshots(chain(2), chain(2))
    antichain = Snapshot.make(ORDER_VOCAB, 2, {"lt": set()})
    assert not iso_snapshots(chain(2), antichain)
    reordered = Snapshot.make(ORDER_VOCAB, 3, {"lt": {(2, 0), (0, 1), (2, 1)}})
    assert iso_snapshots(chain(3), reordered)


def test_iso_snapshots_vocabulary_mismatch():
    with pytest.raises(VocabularyMismatchError):
        iso_snapshots(chain(2), restrict(canonical_presentation(ALL_P), 1))


def test_iso_snapshots_is_equivalence_on_corpus():
    rng = random.Random(7)
    corpus = []
    for _ in range(12):
        n = rng.randrange(1, 4)
        pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
        rel = {p for p in pairs if rng.random() < 0.4}
        corpus.append(Snapshot.make(ORDER_VOCAB, n, {"lt": rel}))
    for a in corpus:
        assert iso_snapshots(a, a)
        for b in corpus:
            assert iso_snapshots(a, b) == iso_snapshots(b, a)
            for c in corpus:
                if iso_snapshots(a, b) and iso_snapshots(b, c):
                    assert iso_snapshots(a, c)


def test_iso_described_examples():
    assert iso_described(ALL_P, ALL_P)
    assert not iso_described(ONE_NOT_P, ALL_P)
    assert iso_described(order_type("w + w"), order_type("w*2"))


def test_iso_described_folds_tail_typed_exceptions():
    padded = UnaryTail.make(P_VOCAB, {frozenset({"P"}): 3}, {"P"})
    assert iso_described(padded, ALL_P)
    mixed = UnaryTail.make(P_VOCAB, {frozenset({"P"}): 3, frozenset(): 1}, {"P"})
    assert iso_described(mixed, ONE_NOT_P)


def test_iso_described_cross_variant_rejected():
    with pytest.raises(VariantMismatchError):
        iso_described(ALL_P, order_type("w"))


def test_unary_tail_validation():
    with pytest.raises(ValueError):
        UnaryTail.make(ORDER_VOCAB, {}, set())
    with pytest.raises(ValueError):
        UnaryTail.make(P_VOCAB, {frozenset({"Q"}): 1}, {"P"})
    with pytest.raises(ValueError):
        UnaryTail.make(P_VOCAB, {frozenset(): 0}, {"P"})


def test_order_type_must_be_infinite():
    with pytest.raises(ValueError):
        order_type("3")
    with pytest.raises(ValueError):
        order_type("2*3")
    assert order_type("w+1").expr is not None


def test_w_bearing_orders_cannot_be_presented():
    with pytest.raises(UnsupportedError):
        canonical_presentation(order_type("W"))
    with pytest.raises(UnsupportedError):
        canonical_presentation(order_type("W + W*q"))


def test_seed_zero_is_canonical():
    p = permuted_presentation(ONE_NOT_P, 0)
    assert [p.rank_at(n) for n in range(6)] == [0, 1, 2, 3, 4, 5]


def test_seeded_presentation_delays_the_exception():
    # For every seed >= 1 the least unpresented rank is consumed exactly at
    # stages 2 mod 3, so the single exceptional element (canonical rank 0)
    # appears at stage 2.
    p = permuted_presentation(ONE_NOT_P, 7)
    ranks = [p.rank_at(n) for n in range(3)]
    assert ranks[0] != 0 and ranks[1] != 0 and ranks[2] == 0
    s1 = restrict(p, 1)
    assert s1.relation("P") == {(0,), (1,)}
    s2 = restrict(p, 2)
    assert s2.relation("P") == {(0,), (1,)}
    assert unary_types(s2)[2] == frozenset()


def test_seeded_presentation_of_omega_is_coherent():
    p = permuted_presentation(order_type("w"), 3)
    for s in range(10):
        assert induced_prefix(restrict(p, s + 1), s + 1) == restrict(p, s)


def test_schedules_are_total():
    # rank r is consumed no later than stage 3r+2
    for seed in (1, 2, 7, 11):
        p = permuted_presentation(order_type("w"), seed)
        seen = [p.rank_at(n) for n in range(32)]
        for r in range(10):
            assert r in seen[: 3 * r + 3]


def test_swap_adjacent_schedule():
    p = presentation_with_schedule(order_type("w"), swap_adjacent_schedule, "swapped")
    assert [p.rank_at(n) for n in range(6)] == [1, 0, 3, 2, 5, 4]
    s = restrict(p, 3)
    # elements appear as 1,0,3,2 so slot order is 1 < 0 < 3 < 2
    assert s.relation("lt") == {(1, 0), (1, 3), (1, 2), (0, 3), (0, 2), (3, 2)}


def test_schedule_repeats_are_rejected():
    p = presentation_with_schedule(order_type("w"), lambda n: 0, "broken")
    with pytest.raises(ValueError):
        p.rank_at(1)


_ORDER_POOL = ["w", "w*", "z", "q", "w+w", "w*2", "w + 1 + w*", "q + w", "(w+2)*3", "3*w"]


def _random_descriptor(rng):
    if rng.random() < 0.5:
        names = ("P",) if rng.random() < 0.5 else ("P", "Q")
        vocab = unary_vocab(*names)
        types = [frozenset(t) for t in _powerset(names)]
        exceptional = {}
        for t in types:
            if rng.random() < 0.4:
                exceptional[t] = rng.randrange(1, 4)
        tail = rng.choice(types)
        return UnaryTail.make(vocab, exceptional, tail)
    return order_type(rng.choice(_ORDER_POOL))


def _powerset(names):
    out = [()]
    for n in names:
        out += [t + (n,) for t in out]
    return out


def test_coherence_fuzz():
    rng = random.Random(20260817)
    for _ in range(1000):
        d = _random_descriptor(rng)
        seed = rng.randrange(0, 40)
        s = rng.randrange(0, 30)
        p = permuted_presentation(d, seed)
        assert induced_prefix(restrict(p, s + 1), s + 1) == restrict(p, s)


def test_iso_snapshots_invariant_under_permuted_copies():
    for seed in (1, 4, 9):
        a = restrict(permuted_presentation(ALL_P, 0), 4)
        b = restrict(permuted_presentation(ALL_P, seed), 4)
        assert iso_snapshots(a, b)
        c = restrict(permuted_presentation(ONE_NOT_P, 0), 4)
        d = restrict(permuted_presentation(ONE_NOT_P, seed), 4)
        assert iso_snapshots(c, d)


def test_iso_described_matches_aligned_snapshots_for_unary():
    # descriptors that are iso produce iso snapshots at aligned stages
    padded = UnaryTail.make(P_VOCAB, {frozenset({"P"}): 2}, {"P"})
    for s in range(6):
        a = restrict(canonical_presentation(ALL_P), s)
        b = restrict(canonical_presentation(padded), s)
        assert iso_snapshots(a, b)


def test_family_patterns():
    fam = Family.parity(ALL_P, ONE_NOT_P)
    assert [fam.index(n) for n in range(6)] == [0, 1, 0, 1, 0, 1]
    assert fam.entry(4) is ALL_P

    dflt = Family.default((ALL_P, ONE_NOT_P))
    assert [dflt.index(n) for n in range(5)] == [0, 1, 1, 1, 1]

    custom = Family((ALL_P, ONE_NOT_P), Pattern((1, 1), (0,)))
    assert [custom.index(n) for n in range(4)] == [1, 1, 0, 0]


def test_family_validation():
    with pytest.raises(ValueError):
        Family((), Pattern((), (0,)))
    with pytest.raises(ValueError):
        Family((ALL_P,), Pattern((), (1,)))
    with pytest.raises(ValueError):
        Pattern((), ())


def test_induced_prefix_bounds():
    with pytest.raises(ValueError):
        induced_prefix(chain(2), 3)
    assert induced_prefix(chain(3), 0).size == 0


def test_extends_prefix_matches_induced_prefix():
    assert extends_prefix(chain(4), chain(3))
    assert not extends_prefix(chain(4), chain(2))
    assert not extends_prefix(chain(3), chain(3))
    # same sizes, but an old pair is rewired: not a prefix extension
    twisted = Snapshot.make(ORDER_VOCAB, 4, {"lt": {(1, 0), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)}})
    assert not extends_prefix(twisted, chain(3))
    # dropping an old pair is caught by the subset test
    gappy = Snapshot.make(ORDER_VOCAB, 4, {"lt": {(0, 1), (0, 2), (0, 3), (1, 3), (2, 3)}})
    assert not extends_prefix(gappy, chain(3))
    other = Snapshot.make(Vocabulary((("r", 2),)), 4, {"r": set()})
    assert not extends_prefix(other, chain(3))
    for text in ("w", "w*", "q", "w+w"):
        p = canonical_presentation(order_type(text))
        for s in range(1, 8):
            assert extends_prefix(restrict(p, s), restrict(p, s - 1))


def test_unary_types_requires_unary_vocab():
    with pytest.raises(UnsupportedError):
        unary_types(chain(2))


@given(st.integers(min_value=0, max_value=25), st.sampled_from(_ORDER_POOL))
@settings(max_examples=40, deadline=None)
def test_order_snapshots_are_linear(stage, text):
    snap = restrict(canonical_presentation(order_type(text)), stage)
    lt = snap.relation("lt")
    for i in range(snap.size):
        for j in range(snap.size):
            if i != j:
                assert ((i, j) in lt) != ((j, i) in lt)
            if i == j:
                assert (i, j) not in lt
    for i, j in lt:
        for j2, k in lt:
            if j == j2 and (i, k) not in lt:
                assert False, "transitivity violated"
