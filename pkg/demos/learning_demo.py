"""Walkthrough of the learning pipeline: sessions, translations, the swap
adversary, and the separation condition.

Run with: python3 demos/learning_demo.py
"""

from bflearn.core import Family, UnaryTail, permuted_presentation, unary_vocab
from bflearn.learn import (
    counter_learner,
    equiv2_translate,
    freeze_translate,
    qss_learner,
    witness_sentence,
)
from bflearn.sessions import (
    condition3_check,
    condition3_report,
    evaluate_success,
    run_session,
    swap_experiment,
)

V = unary_vocab("P")
ALL_P = UnaryTail.make(V, {}, {"P"})
ONE_NOT_P = UnaryTail.make(V, {frozenset(): 1}, {"P"})


def main():
    parity = Family.parity(ALL_P, ONE_NOT_P)
    phi_all = witness_sentence(ALL_P, ())
    phi_one = witness_sentence(ONE_NOT_P, (frozenset(),))

    print("== A learner that is right without ever settling ==")
    p = permuted_presentation(ONE_NOT_P, 5)
    raw = run_session(parity, p, counter_learner(phi_all, phi_one), 60)
    print(f"  first hypotheses: {raw.trace[:8]} ...")
    print(f"  stabilized: {raw.stabilized_at}   "
          f"Bc-success (window 10): "
          f"{evaluate_success(raw, parity, ONE_NOT_P, 'Bc', 10)}")
    print("  Its indices keep growing, but from some stage on they all")
    print("  name structures isomorphic to the target.")

    print()
    print("== Upgrading it by translation ==")
    lifted = run_session(
        parity, p, equiv2_translate(parity, counter_learner(phi_all, phi_one)), 60
    )
    print(f"  translated trace: {lifted.trace[:8]} ...")
    print(f"  stabilized at {lifted.stabilized_at}   "
          f"Ex-success: {evaluate_success(lifted, parity, ONE_NOT_P, 'Ex', 0)}")

    print()
    print("== The swap adversary ==")
    print("A translation must keep working when the family is edited at the")
    print("index it committed to.  A candidate that freezes its first guess")
    print("is caught; the real translations are not:")
    for name, translate in (
        ("freeze", freeze_translate),
        ("equiv2", equiv2_translate),
    ):
        verdict = swap_experiment(translate, ALL_P, ONE_NOT_P, 60, (0, 1))
        print(f"  {name:7} -> {verdict.outcome.value}")

    print()
    print("== The separation condition and the learner it builds ==")
    fam = Family.default((ALL_P, ONE_NOT_P))
    print(f"  condition3_check: {condition3_check(fam, 3, 4)}")
    report = condition3_report(fam, 3, 4)
    print(f"  witnesses: {report}")
    sentences = [witness_sentence(fam.base[i], report[i]) for i in range(2)]
    for target in fam.base:
        res = run_session(
            fam, permuted_presentation(target, 9), qss_learner(sentences), 60
        )
        print(f"  presented index {fam.base.index(target)}: final hypothesis "
              f"{res.final}, Ex {evaluate_success(res, fam, target, 'Ex', 0)}")


if __name__ == "__main__":
    main()
