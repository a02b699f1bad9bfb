"""Walkthrough of the bounded back-and-forth comparisons.

Run with: python3 demos/backforth_demo.py
"""

from bflearn.bfgame import leq2_order, leq_n_snapshots, leq_n_unary, pi_n_oracle, pointed
from bflearn.core import ORDER_VOCAB, Snapshot, UnaryTail, unary_vocab
from bflearn.orderalg import expr_equal, format_expr, normalize, parse_expr


def chain(n):
    lt = {(i, j) for i in range(n) for j in range(i + 1, n)}
    return Snapshot.make(ORDER_VOCAB, n, {"lt": lt})


def main():
    print("== Finite chains ==")
    print("A chain answers depth-1 challenges from another chain exactly")
    print("when it is at least as long:")
    for k, l in ((5, 3), (3, 5), (4, 4)):
        got = leq_n_snapshots(pointed(chain(k)), pointed(chain(l)), 1)
        print(f"  chain({k}) <=_1 chain({l})  ->  {got}")

    print()
    print("== Game versus sentence oracle ==")
    print("On small snapshots the game agrees with a direct check of")
    print("universal-prefix theory inclusion:")
    loop = Snapshot.make(ORDER_VOCAB, 3, {"lt": {(0, 1), (1, 2), (2, 0)}})
    for a, b in ((chain(3), loop), (loop, chain(3)), (chain(3), chain(3))):
        for n in (1, 2):
            game = leq_n_snapshots(pointed(a), pointed(b), n)
            oracle = pi_n_oracle(a, b, n, 4)
            print(f"  depth {n}: game {game!s:5}  oracle {oracle!s:5}")

    print()
    print("== Unary descriptors ==")
    v = unary_vocab("P")
    all_p = UnaryTail.make(v, {}, {"P"})
    one_not = UnaryTail.make(v, {frozenset(): 1}, {"P"})
    print("Infinitely many P's, versus the same with one exception:")
    print(f"  exceptional side below pure side at depth 1: "
          f"{leq_n_unary(one_not, all_p, 1, 4)}")
    print(f"  pure side below exceptional side at depth 1: "
          f"{leq_n_unary(all_p, one_not, 1, 4)}")

    print()
    print("== Infinite linear orders ==")
    w, w1 = parse_expr("w"), parse_expr("w+1")
    print(f"  leq2_order(w+1, w) = {leq2_order(w1, w)}   "
          f"(the extra top point can be hidden)")
    print(f"  leq2_order(w, w+1) = {leq2_order(w, w1)}   "
          f"(no point of w has nothing above it)")

    print()
    print("== Products that collapse at depth 2 ==")
    target = parse_expr("W + W*q")
    for text in ("3", "w", "w*2"):
        left = parse_expr(f"({text})*w")
        both = leq2_order(left, target, 6) and leq2_order(target, left, 6)
        print(f"  ({text})*w ==_2 W + W*q: {both}; "
              f"expressions equal: {expr_equal(left, target)}")

    print()
    print("== The absorption identity ==")
    for text in ("3", "w", "w+2"):
        e = parse_expr(f"(W + W*q + {text})*w")
        print(f"  (W + W*q + {text})*w  normalizes to  "
              f"{format_expr(normalize(e))}")


if __name__ == "__main__":
    main()
