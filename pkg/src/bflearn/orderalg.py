"""Symbolic linear-order expressions: parsing, printing, and rewriting.

An OrderExpr is a term over the constructors

    Fin(k)      the finite order with k points
    Atom("w")   omega, the order of the naturals
    Atom("w*")  omega-star, the reversed naturals
    Atom("z")   zeta, the order of the integers
    Atom("q")   eta, the order of the rationals
    Atom("W")   the abstract uncountable well-order symbol
    Sum(parts)  concatenation, left to right
    Prod(a, b)  b-many copies of a (replace each point of b by a copy of a)

normalize() rewrites a term to a canonical irreducible form under a small
confluent rule set (finite arithmetic, zeta expansion, absorption into W,
eta absorption, and the product-over-omega unfolding).  expr_equal() compares
normal forms; it is sound for isomorphism of the denoted orders but makes no
claim of completeness outside the rule set.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import ExprSyntaxError

INF = float("inf")

_ATOM_SYMBOLS = ("w", "w*", "z", "q", "W")


@dataclass(frozen=True)
class Fin:
    """The finite linear order with `size` points."""

    size: int

    def __post_init__(self):
        if not isinstance(self.size, int) or self.size < 0:
            raise ValueError(f"Fin size must be a natural number, got {self.size!r}")


@dataclass(frozen=True)
class Atom:
    """One of the named infinite orders: w, w*, z, q, or W."""

    symbol: str

    def __post_init__(self):
        if self.symbol not in _ATOM_SYMBOLS:
            raise ValueError(f"unknown atom {self.symbol!r}")


OMEGA = Atom("w")
OMEGA_STAR = Atom("w*")
ZETA = Atom("z")
ETA = Atom("q")
BIG_W = Atom("W")


@dataclass(frozen=True)
class Sum:
    """Concatenation of two or more orders, left to right."""

    parts: tuple["OrderExpr", ...]

    def __post_init__(self):
        if len(self.parts) < 2:
            raise ValueError("Sum needs at least two parts")


@dataclass(frozen=True)
class Prod:
    """`right`-many copies of `left`: each point of right becomes a copy of left."""

    left: "OrderExpr"
    right: "OrderExpr"


OrderExpr = Fin | Atom | Sum | Prod

# A NormalForm is an OrderExpr on which no rewrite rule applies; see normalize().
NormalForm = OrderExpr


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_FACTOR_START = {"num", "w", "z", "q", "W", "("}


def _tokenize(text: str) -> list[tuple[str, int, int]]:
    """Split text into (kind, value, position) tokens.

    Kinds are 'num', 'w', 'z', 'q', 'W', '*', '+', '(', ')', 'end'; value is
    the integer for 'num' tokens and 0 otherwise.
    """
    tokens = []
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            tokens.append(("num", int(text[i:j]), i))
            i = j
            continue
        if c in "wzqW+*()":
            tokens.append((c, 0, i))
            i += 1
            continue
        raise ExprSyntaxError(f"unexpected character {c!r}", i)
    tokens.append(("end", 0, len(text)))
    return tokens


class _Parser:
    """Recursive-descent parser for the order-expression grammar.

        expr   := term ('+' term)*
        term   := factor ('*' factor)*
        factor := 'w' | 'w*' | 'z' | 'q' | 'W' | natural | '(' expr ')'

    '*' binds tighter than '+' and both associate to the left.  The only
    ambiguity is a '*' directly after 'w': it is the omega-star suffix when
    the token after it cannot start a factor, and the product operator
    otherwise.  So "w*" and "w* + 1" contain omega-star, while "w*2" and
    "w*w" are products, and "w**q" is omega-star times eta.
    """

    def __init__(self, tokens: list[tuple[str, int, int]]):
        self.tokens = tokens
        self.idx = 0

    def peek(self, ahead: int = 0) -> tuple[str, int, int]:
        return self.tokens[min(self.idx + ahead, len(self.tokens) - 1)]

    def advance(self) -> tuple[str, int, int]:
        tok = self.tokens[self.idx]
        if tok[0] != "end":
            self.idx += 1
        return tok

    def expect(self, kind: str) -> tuple[str, int, int]:
        tok = self.advance()
        if tok[0] != kind:
            raise ExprSyntaxError(f"expected {kind!r}, got {tok[0]!r}", tok[2])
        return tok

    def parse(self) -> OrderExpr:
        e = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ExprSyntaxError(f"unexpected {tok[0]!r} after expression", tok[2])
        return e

    def expr(self) -> OrderExpr:
        parts = [self.term()]
        while self.peek()[0] == "+":
            self.advance()
            parts.append(self.term())
        if len(parts) == 1:
            return parts[0]
        return Sum(tuple(parts))

    def term(self) -> OrderExpr:
        e = self.factor()
        while self.peek()[0] == "*":
            self.advance()
            e = Prod(e, self.factor())
        return e

    def factor(self) -> OrderExpr:
        tok = self.advance()
        kind = tok[0]
        if kind == "num":
            return Fin(tok[1])
        if kind == "w":
            if self.peek()[0] == "*" and self.peek(1)[0] not in _FACTOR_START:
                self.advance()
                return OMEGA_STAR
            return OMEGA
        if kind == "z":
            return ZETA
        if kind == "q":
            return ETA
        if kind == "W":
            return BIG_W
        if kind == "(":
            e = self.expr()
            self.expect(")")
            return e
        raise ExprSyntaxError(f"expected a factor, got {kind!r}", tok[2])


def parse_expr(text: str) -> OrderExpr:
    """Parse order-expression text into a term tree.

    Raises ExprSyntaxError (with a character position) on empty input or any
    text outside the grammar.
    """
    tokens = _tokenize(text)
    if tokens[0][0] == "end":
        raise ExprSyntaxError("empty input", 0)
    return _Parser(tokens).parse()


def format_expr(e: OrderExpr) -> str:
    """Print a term in the same grammar parse_expr reads.

    Round-trips: parse_expr(format_expr(e)) == e for every OrderExpr.
    """
    return _format(e, 0)


def _format(e: OrderExpr, level: int) -> str:
    # level 0: sum context, 1: product context, 2: right factor context
    if isinstance(e, Fin):
        return str(e.size)
    if isinstance(e, Atom):
        return e.symbol
    if isinstance(e, Sum):
        text = " + ".join(_format(p, 1) for p in e.parts)
        return f"({text})" if level >= 1 else text
    text = f"{_format(e.left, 1)}*{_format(e.right, 2)}"
    return f"({text})" if level >= 2 else text


# ---------------------------------------------------------------------------
# Rewriting
# ---------------------------------------------------------------------------


def w_free(e: OrderExpr) -> bool:
    """True when the symbol W does not occur anywhere in the term."""
    if isinstance(e, Atom):
        return e is not BIG_W and e.symbol != "W"
    if isinstance(e, Fin):
        return True
    if isinstance(e, Sum):
        return all(w_free(p) for p in e.parts)
    return w_free(e.left) and w_free(e.right)


def _make_sum(parts: list[OrderExpr]) -> OrderExpr:
    if not parts:
        return Fin(0)
    if len(parts) == 1:
        return parts[0]
    return Sum(tuple(parts))


def _unfolds_over_omega(left: OrderExpr) -> bool:
    """Pattern for the product-over-omega rule: W + W*q + (W-free tail)."""
    return (
        isinstance(left, Sum)
        and len(left.parts) >= 2
        and left.parts[0] == BIG_W
        and left.parts[1] == Prod(BIG_W, ETA)
        and all(w_free(p) for p in left.parts[2:])
    )


def _sum_rewrites(parts: tuple[OrderExpr, ...]) -> list[OrderExpr]:
    """All results of applying one sum-level rule to one position."""
    out = []
    for i, p in enumerate(parts):
        if isinstance(p, Sum):
            out.append(_make_sum(list(parts[:i]) + list(p.parts) + list(parts[i + 1 :])))
        if p == Fin(0):
            out.append(_make_sum(list(parts[:i]) + list(parts[i + 1 :])))
    for i in range(len(parts) - 1):
        a, b = parts[i], parts[i + 1]
        if isinstance(a, Fin) and isinstance(b, Fin):
            merged = [Fin(a.size + b.size)]
            out.append(_make_sum(list(parts[:i]) + merged + list(parts[i + 2 :])))
        if b == BIG_W and w_free(a):
            out.append(_make_sum(list(parts[:i]) + list(parts[i + 1 :])))
    for i in range(len(parts) - 2):
        a, b, c = parts[i], parts[i + 1], parts[i + 2]
        # X*q + X + X*q -> X*q.  A Sum middle is excluded: flattening splices
        # it into the part list first, and the spliced form stays put.
        if (
            a == c
            and isinstance(a, Prod)
            and a.right == ETA
            and a.left == b
            and not isinstance(b, Sum)
        ):
            out.append(_make_sum(list(parts[:i]) + [a] + list(parts[i + 3 :])))
    return out


def _node_rewrites(e: OrderExpr) -> list[OrderExpr]:
    """All results of applying one rule at the root of e."""
    if isinstance(e, Atom):
        return [Sum((OMEGA_STAR, OMEGA))] if e == ZETA else []
    if isinstance(e, Fin):
        return []
    if isinstance(e, Sum):
        return _sum_rewrites(e.parts)
    out = []
    left, right = e.left, e.right
    if right == Fin(1):
        out.append(left)
    if left == Fin(1):
        out.append(right)
    if right == Fin(0) or left == Fin(0):
        out.append(Fin(0))
    if isinstance(left, Fin) and isinstance(right, Fin):
        out.append(Fin(left.size * right.size))
    if isinstance(right, Fin) and right.size >= 2:
        out.append(_make_sum([left] * right.size))
    if right == OMEGA and _unfolds_over_omega(left):
        out.append(Sum((BIG_W, Prod(BIG_W, ETA))))
    return out


def rewrite_steps(e: OrderExpr) -> list[OrderExpr]:
    """Every expression reachable from e by one rewrite step anywhere.

    Empty exactly when e is a normal form.  Exposed so tests can replay the
    rules in arbitrary orders and confirm the result never depends on the
    order.
    """
    steps = list(_node_rewrites(e))
    if isinstance(e, Sum):
        for i, p in enumerate(e.parts):
            for q in rewrite_steps(p):
                steps.append(Sum(e.parts[:i] + (q,) + e.parts[i + 1 :]))
    elif isinstance(e, Prod):
        for q in rewrite_steps(e.left):
            steps.append(Prod(q, e.right))
        for q in rewrite_steps(e.right):
            steps.append(Prod(e.left, q))
    return steps


def normalize_random(e: OrderExpr, rng: random.Random) -> NormalForm:
    """Rewrite to a fixed point choosing each step uniformly at random."""
    while True:
        steps = rewrite_steps(e)
        if not steps:
            return e
        e = rng.choice(steps)


def normalize(e: OrderExpr) -> NormalForm:
    """Deterministic bottom-up rewriting to the unique irreducible form."""
    if isinstance(e, Atom):
        return Sum((OMEGA_STAR, OMEGA)) if e == ZETA else e
    if isinstance(e, Fin):
        return e
    if isinstance(e, Sum):
        return _normal_sum([normalize(p) for p in e.parts])
    return _normal_prod(normalize(e.left), normalize(e.right))


def _normal_sum(parts: list[OrderExpr]) -> OrderExpr:
    flat: list[OrderExpr] = []
    for p in parts:
        if isinstance(p, Sum):
            flat.extend(p.parts)
        else:
            flat.append(p)
    changed = True
    while changed:
        changed = False
        out: list[OrderExpr] = []
        i = 0
        while i < len(flat):
            p = flat[i]
            if p == Fin(0):
                i += 1
                changed = True
                continue
            if out and isinstance(out[-1], Fin) and isinstance(p, Fin):
                out[-1] = Fin(out[-1].size + p.size)
                i += 1
                changed = True
                continue
            if out and p == BIG_W and w_free(out[-1]):
                out.pop()
                out.append(p)
                i += 1
                changed = True
                continue
            if (
                len(out) >= 2
                and isinstance(out[-2], Prod)
                and out[-2].right == ETA
                and out[-2].left == out[-1]
                and p == out[-2]
            ):
                out.pop()
                i += 1
                changed = True
                continue
            out.append(p)
            i += 1
        flat = out
    return _make_sum(flat)


def _normal_prod(left: OrderExpr, right: OrderExpr) -> OrderExpr:
    if left == Fin(0) or right == Fin(0):
        return Fin(0)
    if right == Fin(1):
        return left
    if left == Fin(1):
        return right
    if isinstance(left, Fin) and isinstance(right, Fin):
        return Fin(left.size * right.size)
    if isinstance(right, Fin):
        return _normal_sum([left] * right.size)
    if right == OMEGA and _unfolds_over_omega(left):
        return Sum((BIG_W, Prod(BIG_W, ETA)))
    return Prod(left, right)


def expr_equal(a: OrderExpr, b: OrderExpr) -> bool:
    """Structural equality of normal forms.

    Sound for isomorphism of the denoted orders.  Incomplete outside the
    rule set: a False answer means "not provably equal here", and some
    isomorphic pairs (for example 2*w and w) normalize to distinct terms.
    """
    return normalize(a) == normalize(b)


def cardinality(e: OrderExpr):
    """Number of points in the denoted order: an int, or INF.

    Every atom is infinite; sums and products combine with INF absorbing,
    except that a factor with zero points makes the product empty.
    """
    if isinstance(e, Fin):
        return e.size
    if isinstance(e, Atom):
        return INF
    if isinstance(e, Sum):
        total = 0
        for p in e.parts:
            total = _card_add(total, cardinality(p))
        return total
    return _card_mul(cardinality(e.left), cardinality(e.right))


def _card_add(a, b):
    if a == INF or b == INF:
        return INF
    return a + b


def _card_mul(a, b):
    if a == 0 or b == 0:
        return 0
    if a == INF or b == INF:
        return INF
    return a * b
