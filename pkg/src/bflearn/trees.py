"""Finite trees, generator-backed truncations, and their linearizations.

Trees are prefix-closed sets of finite sequences of naturals.  The module
provides the even-length interleaving of two trees, the Kleene-Brouwer
comparison and its compilation to a finite linear-order snapshot, trees of
strictly descending sequences, bounded path search, and a parity family of
order descriptors built from linearized truncations.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

from .core import ORDER_VOCAB, Family, OrderType, Snapshot
from .errors import BoundExceededError, InfiniteInputError, PreconditionError
from .orderalg import INF, OMEGA, Fin, Prod, cardinality, normalize


@dataclass(frozen=True)
class FinTree:
    """A finite prefix-closed set of finite sequences of naturals."""

    nodes: frozenset[tuple[int, ...]]

    def __post_init__(self):
        if () not in self.nodes:
            raise ValueError("tree must contain the empty sequence")
        for node in self.nodes:
            if any(not isinstance(x, int) or x < 0 for x in node):
                raise ValueError("tree nodes must be sequences of naturals")
            if node and node[:-1] not in self.nodes:
                raise ValueError(f"tree is not prefix-closed at {node}")

    @classmethod
    def close(cls, nodes):
        """Build a tree from arbitrary sequences by closing under prefixes."""
        closed = {()}
        for node in nodes:
            node = tuple(node)
            for k in range(1, len(node) + 1):
                closed.add(node[:k])
        return cls(frozenset(closed))

    def depth(self):
        return max(len(node) for node in self.nodes)


@dataclass(frozen=True)
class TreeGen:
    """A tree given by a membership predicate, explored within bounds.

    The predicate must be pure and prefix-closed over the explored region:
    whenever it accepts a sequence it accepts every prefix.  Children of a
    node range over ``0 .. branching-1`` and exploration never goes deeper
    than ``depth``.
    """

    membership: Callable[[tuple[int, ...]], bool]
    branching: int
    depth: int

    def __post_init__(self):
        if self.branching < 1:
            raise ValueError("branching bound must be at least 1")
        if self.depth < 0:
            raise ValueError("depth bound must not be negative")

    def truncate(self, trunc_depth):
        """The finite tree of member sequences of length at most trunc_depth."""
        if trunc_depth > self.depth:
            raise BoundExceededError(
                f"truncation depth {trunc_depth} exceeds exploration bound {self.depth}"
            )
        nodes = {()}
        stack = [()]
        while stack:
            node = stack.pop()
            if len(node) == trunc_depth:
                continue
            for c in range(self.branching):
                child = node + (c,)
                if self.membership(child):
                    nodes.add(child)
                    stack.append(child)
        return FinTree(frozenset(nodes))


def interleave_trees(t, s):
    """Interleave two trees along equal-length node pairs.

    Every pair of nodes of the same length contributes the sequence that
    alternates their entries.  The raw set contains only even-length
    sequences, so the result is closed under prefixes to stay a tree.
    """
    by_len = {}
    for tau in s.nodes:
        by_len.setdefault(len(tau), []).append(tau)
    woven = []
    for sigma in t.nodes:
        for tau in by_len.get(len(sigma), ()):
            pair = [x for duo in zip(sigma, tau) for x in duo]
            woven.append(tuple(pair))
    return FinTree.close(woven)


class Ordering(enum.Enum):
    LESS = "less"
    EQUAL = "equal"
    GREATER = "greater"


def kb_compare(a, b):
    """Three-way Kleene-Brouwer comparison of two sequences.

    A proper extension sorts below its prefix; incomparable sequences sort
    by the entry at their first disagreement.
    """
    a, b = tuple(a), tuple(b)
    if a == b:
        return Ordering.EQUAL
    for x, y in zip(a, b):
        if x != y:
            return Ordering.LESS if x < y else Ordering.GREATER
    return Ordering.LESS if len(a) > len(b) else Ordering.GREATER


def kb_linearize(t, max_nodes=512):
    """Compile a finite tree to the snapshot of its Kleene-Brouwer order.

    Nodes are indexed in sorted serialization order; the snapshot relates
    index i below index j exactly when node i compares LESS.
    """
    if len(t.nodes) > max_nodes:
        raise BoundExceededError(f"tree has {len(t.nodes)} nodes, bound is {max_nodes}")
    nodes = sorted(t.nodes)
    lt = {
        (i, j)
        for i, a in enumerate(nodes)
        for j, b in enumerate(nodes)
        if kb_compare(a, b) is Ordering.LESS
    }
    return Snapshot.make(ORDER_VOCAB, len(nodes), {"lt": lt})


def _linear_snapshot(snap):
    lt = snap.relation("lt")
    for i in range(snap.size):
        if (i, i) in lt:
            raise PreconditionError("order snapshot is not irreflexive")
        for j in range(snap.size):
            if i != j and ((i, j) in lt) == ((j, i) in lt):
                raise PreconditionError("order snapshot is not a linear order")
    for i, j in lt:
        for k in range(snap.size):
            if (j, k) in lt and (i, k) not in lt:
                raise PreconditionError("order snapshot is not transitive")
    return lt


def descending_tree(order):
    """The tree of strictly descending sequences of a finite linear order.

    Accepts either a finite order expression or a finite linear-order
    snapshot.  A sequence is a node when each entry lies strictly below its
    predecessor.
    """
    if isinstance(order, Snapshot):
        size = order.size
        lt = _linear_snapshot(order)
    else:
        size = cardinality(order)
        if size == INF:
            raise InfiniteInputError("descending tree needs a finite order")
        lt = {(i, j) for i in range(size) for j in range(i + 1, size)}
    nodes = {()}
    stack = [(a,) for a in range(size)]
    while stack:
        node = stack.pop()
        nodes.add(node)
        for b in range(size):
            if (b, node[-1]) in lt:
                stack.append(node + (b,))
    return FinTree(frozenset(nodes))


def has_path(t, d):
    """Whether the tree has a node of length d.

    Finite trees are inspected directly.  Generator trees are searched
    depth-first within their branching bound; d must not exceed the
    exploration depth bound.
    """
    if d < 0:
        raise ValueError("path length must not be negative")
    if isinstance(t, FinTree):
        return any(len(node) == d for node in t.nodes)
    if d > t.depth:
        raise BoundExceededError(f"path length {d} exceeds exploration bound {t.depth}")
    stack = [()]
    while stack:
        node = stack.pop()
        if len(node) == d:
            return True
        for c in range(t.branching):
            child = node + (c,)
            if t.membership(child):
                stack.append(child)
    return False


def reduction_family(t_x, t_h, trunc_depth, max_nodes=512):
    """Compile the parity family of linearized-tree order descriptors.

    The even entry scales the linearized interleaving of t_x with the
    truncation of t_h by omega; the odd entry does the same for the
    truncation alone.  Long paths through the interleaving exist exactly
    when both trees reach the matching depth, so the even entry tracks the
    joint depth of the pair.
    """
    trunc = t_h.truncate(trunc_depth)
    woven = interleave_trees(t_x, trunc)
    even = normalize(Prod(Fin(kb_linearize(woven, max_nodes).size), OMEGA))
    odd = normalize(Prod(Fin(kb_linearize(trunc, max_nodes).size), OMEGA))
    return Family.parity(OrderType(even), OrderType(odd))
