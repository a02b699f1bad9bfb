"""Tests for sessions, success evaluation, the swap adversary, and the
family learnability conditions."""

import pytest

from bflearn.core import (
    Family,
    UnaryTail,
    order_type,
    permuted_presentation,
    unary_vocab,
)
from bflearn.errors import PreconditionError, UnsupportedError
from bflearn.learn import (
    Learner,
    counter_learner,
    equiv2_translate,
    freeze_translate,
    min_iso_translate,
    qss_learner,
    witness_sentence,
)
from bflearn.orderalg import INF
from bflearn.sessions import (
    Outcome,
    SessionResult,
    condition3_check,
    condition3_report,
    condition3a_check,
    descriptor_label,
    evaluate_success,
    family_label,
    run_session,
    swap_experiment,
)

V = unary_vocab("P")
VPQ = unary_vocab("P", "Q")
ALL_P = UnaryTail.make(V, {}, {"P"})
ONE_NOT_P = UnaryTail.make(V, {frozenset(): 1}, {"P"})
TWO_NOT_P = UnaryTail.make(V, {frozenset(): 2}, {"P"})
THREE_NOT_P = UnaryTail.make(V, {frozenset(): 3}, {"P"})
ALL_NOT_P = UnaryTail.make(V, {}, frozenset())
ALL_PQ = UnaryTail.make(VPQ, {}, {"P", "Q"})
ALL_P_ONLY = UnaryTail.make(VPQ, {}, {"P"})
PHI_ALL = witness_sentence(ALL_P, ())
PHI_ONE = witness_sentence(ONE_NOT_P, (frozenset(),))
PARITY = Family.parity(ALL_P, ONE_NOT_P)

W = order_type("w")
W_PLUS_1 = order_type("w+1")
W_PLUS_W = order_type("w+w")
W_STAR = order_type("w*")
ETA = order_type("q")
ZETA = order_type("z")


def identity_translate(fam, L):
    return L


# ---------------------------------------------------------------------------
# run_session
# ---------------------------------------------------------------------------


def test_run_session_constant_learner():
    p = permuted_presentation(ALL_P, 0)
    r = run_session(PARITY, p, Learner(lambda snap: 0), 10)
    assert r.trace == (0,) * 11
    assert r.stabilized_at == 0
    assert r.final == 0
    assert r.horizon == 10
    assert r.presentation_ref == p.label
    assert "unary" in r.family_ref


def test_run_session_counter_never_stabilizes():
    p = permuted_presentation(ALL_P, 0)
    r = run_session(PARITY, p, counter_learner(PHI_ALL, PHI_ONE), 20)
    assert r.trace == tuple(2 * s + 2 for s in range(21))
    assert r.stabilized_at is None
    assert r.final == 42


def test_run_session_qss_settles_on_the_exceptional_structure():
    fam = Family.default((ALL_P, ONE_NOT_P))
    p = permuted_presentation(ONE_NOT_P, 0)
    r = run_session(fam, p, qss_learner([PHI_ALL, PHI_ONE]), 50)
    assert r.stabilized_at is not None
    assert r.final == 1


def test_run_session_rejects_zero_horizon():
    p = permuted_presentation(ALL_P, 0)
    with pytest.raises(ValueError):
        run_session(PARITY, p, Learner(lambda snap: 0), 0)


def test_session_result_validates_shape():
    with pytest.raises(ValueError):
        SessionResult((0, 0), None, 0, 5, "f", "p")
    with pytest.raises(ValueError):
        SessionResult((0, 0, 1), None, 0, 2, "f", "p")


def test_labels_are_readable():
    assert descriptor_label(W_PLUS_W) == "w + w"
    assert "tail P" in descriptor_label(ONE_NOT_P)
    assert "|" in family_label(PARITY)


# ---------------------------------------------------------------------------
# evaluate_success
# ---------------------------------------------------------------------------


def test_ex_success_on_a_stabilized_correct_run():
    fam = Family.default((ALL_P, ONE_NOT_P))
    p = permuted_presentation(ONE_NOT_P, 0)
    r = run_session(fam, p, qss_learner([PHI_ALL, PHI_ONE]), 50)
    assert evaluate_success(r, fam, ONE_NOT_P, "Ex", 10)
    assert evaluate_success(r, fam, ONE_NOT_P, "Bc", 10)
    assert not evaluate_success(r, fam, ALL_P, "Ex", 10)


def test_counter_is_bc_but_not_ex():
    p = permuted_presentation(ALL_P, 3)
    r = run_session(PARITY, p, counter_learner(PHI_ALL, PHI_ONE), 40)
    assert evaluate_success(r, PARITY, ALL_P, "Bc", 10)
    assert not evaluate_success(r, PARITY, ALL_P, "Ex", 10)


def test_flicker_between_non_iso_indices_fails_bc():
    p = permuted_presentation(ALL_P, 0)
    r = run_session(PARITY, p, Learner(lambda snap: snap.size % 2), 20)
    assert not evaluate_success(r, PARITY, ALL_P, "Bc", 10)
    assert not evaluate_success(r, PARITY, ALL_P, "Ex", 10)


def test_evaluate_success_argument_validation():
    p = permuted_presentation(ALL_P, 0)
    r = run_session(PARITY, p, Learner(lambda snap: 0), 10)
    with pytest.raises(ValueError):
        evaluate_success(r, PARITY, ALL_P, "Ex", 11)
    with pytest.raises(ValueError):
        evaluate_success(r, PARITY, ALL_P, "limit", 5)


def test_cross_kind_hypothesis_counts_as_failure_with_diagnostic():
    fam = Family.default((ALL_P, W))
    p = permuted_presentation(ALL_P, 0)
    r = run_session(fam, p, Learner(lambda snap: 1), 10)
    notes = []
    assert not evaluate_success(r, fam, ALL_P, "Ex", 5, diagnostics=notes)
    assert notes and "different kind" in notes[0]


def test_ex_implies_bc_at_the_residual_window():
    fam = Family.default((ALL_P, ONE_NOT_P))
    for seed in range(3):
        p = permuted_presentation(ONE_NOT_P, seed)
        r = run_session(fam, p, qss_learner([PHI_ALL, PHI_ONE]), 40)
        if evaluate_success(r, fam, ONE_NOT_P, "Ex", 0):
            window = r.horizon - r.stabilized_at
            assert evaluate_success(r, fam, ONE_NOT_P, "Bc", window)


# ---------------------------------------------------------------------------
# swap_experiment
# ---------------------------------------------------------------------------


def test_swap_identity_reports_no_stabilization():
    v = swap_experiment(
        identity_translate, ALL_P, ONE_NOT_P, 30, [0, 1],
        sentences=(PHI_ALL, PHI_ONE),
    )
    assert v.outcome is Outcome.NO_REFUTATION_FOUND
    assert v.evidence is None
    assert len(v.diagnostics) == 2
    assert all("no stabilization" in note for note in v.diagnostics)


def test_swap_does_not_refute_the_min_iso_translation():
    v = swap_experiment(
        min_iso_translate, ALL_P, ONE_NOT_P, 40, [0, 1],
        sentences=(PHI_ALL, PHI_ONE),
    )
    assert v.outcome is Outcome.NO_REFUTATION_FOUND
    assert all("matching the target" in note for note in v.diagnostics)


def test_swap_does_not_refute_the_depth2_translation():
    v = swap_experiment(
        equiv2_translate, ALL_P, ONE_NOT_P, 40, [0, 1],
        sentences=(PHI_ALL, PHI_ONE),
    )
    assert v.outcome is Outcome.NO_REFUTATION_FOUND


def test_swap_refutes_the_frozen_first_hypothesis():
    v = swap_experiment(
        freeze_translate, ALL_P, ONE_NOT_P, 40, [0, 1],
        sentences=(PHI_ALL, PHI_ONE),
    )
    assert v.outcome is Outcome.REFUTED_AT_HORIZON
    assert v.evidence is not None
    assert v.evidence.seed == 0
    assert v.evidence.phase == 2
    assert v.evidence.stage == 2
    assert set(v.evidence.trace_segment) == {2}
    assert v.evidence.family.entry(2) == ONE_NOT_P
    assert v.evidence.family.entry(0) == ALL_P
    assert v.evidence.family.entry(4) == ALL_P


def test_swap_is_deterministic():
    runs = [
        swap_experiment(
            freeze_translate, ALL_P, ONE_NOT_P, 40, [0, 1],
            sentences=(PHI_ALL, PHI_ONE),
        )
        for _ in range(2)
    ]
    assert runs[0] == runs[1]


def test_swap_builds_the_witness_sentences_itself():
    explicit = swap_experiment(
        freeze_translate, ALL_P, ONE_NOT_P, 40, [0],
        sentences=(PHI_ALL, PHI_ONE),
    )
    auto = swap_experiment(freeze_translate, ALL_P, ONE_NOT_P, 40, [0])
    assert auto == explicit


def test_swap_requires_a_separated_pair():
    copy = UnaryTail.make(V, {}, {"P"})
    with pytest.raises(PreconditionError):
        swap_experiment(identity_translate, ALL_P, copy, 20, [0])


def test_swap_auto_sentences_need_a_depth1_witness():
    with pytest.raises(UnsupportedError):
        swap_experiment(identity_translate, W, W_PLUS_1, 20, [0])


# ---------------------------------------------------------------------------
# condition3_check and condition3a_check
# ---------------------------------------------------------------------------


def test_condition3_on_the_unary_pair():
    fam = Family.default((ALL_P, ONE_NOT_P))
    assert condition3_check(fam, 2, 3)
    report = condition3_report(fam, 2, 3)
    assert report == {0: (), 1: (frozenset(),)}


def test_condition3_fails_on_omega_vs_omega_plus_omega():
    fam = Family.default((W, W_PLUS_W))
    assert not condition3_check(fam, 2, 3)
    assert condition3_report(fam, 2, 3) is None


def test_condition3_on_singletons_and_duplicates():
    assert condition3_check(Family.default((W,)), 1, 3)
    assert condition3_check(Family.default((ETA, ETA)), 1, 3)
    report = condition3_report(Family.default((ETA, ETA)), 1, 3)
    assert report == {0: (INF,), 1: (INF,)}


def test_condition3_on_order_pairs():
    assert condition3_report(Family.default((W, W_STAR)), 2, 3) == {
        0: (0, INF),
        1: (INF, 0),
    }
    assert condition3_check(Family.default((W_PLUS_W, W_STAR)), 2, 3)
    assert not condition3_check(Family.default((W, W_PLUS_1)), 2, 3)
    assert not condition3_check(Family.default((W, ZETA)), 2, 3)


def test_condition3_across_kinds_is_vacuous():
    assert condition3_check(Family.default((ALL_P, W)), 1, 3)


def test_condition3_exception_count_ladder():
    fam = Family.default((ONE_NOT_P, TWO_NOT_P, THREE_NOT_P))
    report = condition3_report(fam, 3, 4)
    assert report == {
        0: (),
        1: (frozenset(), frozenset()),
        2: (frozenset(), frozenset(), frozenset()),
    }
    assert not condition3_check(fam, 2, 4)


def test_condition3_rejects_a_zero_tuple_bound():
    with pytest.raises(ValueError):
        condition3_check(Family.default((ALL_P,)), 0, 3)


def test_condition3a_matches_condition3_on_non_iso_bases():
    assert condition3a_check(Family.default((ALL_P, ONE_NOT_P)), 2, 3)
    assert not condition3a_check(Family.default((W, W_PLUS_W)), 2, 3)


def test_condition3a_rejects_duplicates():
    copy = UnaryTail.make(V, {}, {"P"})
    with pytest.raises(PreconditionError, match="duplicates"):
        condition3a_check(Family.default((ALL_P, copy)), 1, 3)


def test_condition3a_implies_condition3():
    corpus = [
        Family.default((ALL_P, ONE_NOT_P)),
        Family.default((ALL_P, TWO_NOT_P)),
        Family.default((ALL_P, ALL_NOT_P)),
        Family.default((ALL_PQ, ALL_P_ONLY)),
        Family.default((ALL_P, ALL_NOT_P, ONE_NOT_P)),
        Family.default((W, W_STAR)),
        Family.default((W_PLUS_W, W_STAR)),
        Family.default((W, W_PLUS_W)),
        Family.default((W, ZETA)),
    ]
    for fam in corpus:
        if condition3a_check(fam, 3, 4):
            assert condition3_check(fam, 3, 4)


def test_condition3_report_is_deterministic():
    fam = Family.default((ALL_P, ALL_NOT_P, ONE_NOT_P))
    assert condition3_report(fam, 3, 4) == condition3_report(fam, 3, 4)
