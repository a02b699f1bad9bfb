"""Walkthrough of the tree toolkit: linearization, interleaving, and the
descending-sequence construction.

Run with: python3 demos/trees_demo.py
"""

from bflearn.orderalg import Fin
from bflearn.trees import (
    FinTree,
    TreeGen,
    descending_tree,
    has_path,
    interleave_trees,
    kb_linearize,
)


def main():
    t = FinTree.close([(0, 0), (1,), (0, 1)])
    print("== Linearizing a finite tree ==")
    print(f"  nodes: {sorted(t.nodes)}")
    snap = kb_linearize(t)
    lt = dict(snap.interp)["lt"]
    below = [0] * snap.size
    for _, j in lt:
        below[j] += 1
    order = sorted(range(snap.size), key=lambda e: below[e])
    print("  total order on node indices, children before parents and "
          f"left before right: {order}")

    print()
    print("== Interleaving halves path lengths ==")
    s = FinTree.close([(2, 0, 1)])
    prod = interleave_trees(t, s)
    print(f"  factors have longest paths "
          f"{max(len(n) for n in t.nodes)} and {max(len(n) for n in s.nodes)}; "
          f"the interleaving has {max(len(n) for n in prod.nodes)}")
    for d in range(4):
        both = has_path(t, d) and has_path(s, d)
        print(f"  depth {d}: both factors {both!s:5}  "
              f"interleaving at 2x{d}: {has_path(prod, 2 * d)}")

    print()
    print("== Descending sequences of a chain ==")
    print("Every subset of a finite chain appears exactly once as a")
    print("descending sequence, so the tree doubles per point:")
    for n in (3, 5, 8):
        print(f"  {n}-chain -> {len(descending_tree(Fin(n)).nodes)} nodes")

    print()
    print("== Generator trees ==")
    spine = TreeGen(lambda node: all(x == 0 for x in node), branching=2, depth=12)
    print("An infinite branch shows up as paths of every length within the")
    print(f"exploration bound: {[has_path(spine, d) for d in (3, 8, 12)]}")


if __name__ == "__main__":
    main()
