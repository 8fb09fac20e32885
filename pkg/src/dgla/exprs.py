"""Bracket expression grammar: the one wire syntax for Lie elements.

    expr     := term (('+' | '-') term)*
    term     := rational '*' monomial | rational | monomial
    monomial := IDENT | '[' expr ',' expr ']'
    rational := INT ('/' POSINT)?

Whitespace is insignificant; '0' denotes the zero polynomial.  Parsing
produces a formal sum of fully parenthesized bracket words over identifiers
(a *tree term list*): brackets of sums are expanded bilinearly.  A tree is
either an identifier or a pair (left_tree, right_tree).

Printing is the exact inverse used for all canonical serialization: terms
come in a caller-chosen order, the first coefficient keeps its sign inside
the rational, later terms join with ' + ' / ' - ', and unit coefficients are
dropped in front of monomials.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ParseError

Tree = object  # str | tuple[Tree, Tree]
Terms = list[tuple[Fraction, Tree]]


def tree_leaves(tree) -> list[str]:
    if isinstance(tree, str):
        return [tree]
    left, right = tree
    return tree_leaves(left) + tree_leaves(right)


def tree_word_length(tree) -> int:
    if isinstance(tree, str):
        return 1
    left, right = tree
    return tree_word_length(left) + tree_word_length(right)


def format_tree(tree) -> str:
    if isinstance(tree, str):
        return tree
    left, right = tree
    return f"[{format_tree(left)},{format_tree(right)}]"


def tree_sort_key(tree) -> tuple:
    return (tree_word_length(tree), format_tree(tree))


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def _coords(self, pos: int) -> tuple[int, int]:
        line = self.text.count("\n", 0, pos) + 1
        last_nl = self.text.rfind("\n", 0, pos)
        return line, pos - last_nl

    def error(self, message: str) -> ParseError:
        line, col = self._coords(self.pos)
        return ParseError(message, line, col)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, ch: str):
        if self.peek() != ch:
            raise self.error(f"expected {ch!r}")
        self.pos += 1

    def ident(self) -> str:
        self.skip_ws()
        start = self.pos
        if self.pos < len(self.text) and (
            self.text[self.pos].isalpha() or self.text[self.pos] == "_"
        ):
            self.pos += 1
            while self.pos < len(self.text) and (
                self.text[self.pos].isalnum() or self.text[self.pos] == "_"
            ):
                self.pos += 1
        if start == self.pos:
            raise self.error("expected identifier")
        return self.text[start:self.pos]

    def integer(self, sign_ok: bool = True) -> int:
        self.skip_ws()
        start = self.pos
        if sign_ok and self.pos < len(self.text) and self.text[self.pos] == "-":
            self.pos += 1
        digits = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == digits:
            self.pos = start
            raise self.error("expected integer")
        return int(self.text[start:self.pos])


def parse_expr(text: str) -> Terms:
    """Parse an expression into a combined list of (coefficient, tree) terms."""
    sc = _Scanner(text)
    terms = _expr(sc)
    sc.skip_ws()
    if sc.pos != len(sc.text):
        raise sc.error("unexpected trailing input")
    combined: dict[tuple, tuple[Fraction, Tree]] = {}
    for coeff, tree in terms:
        key = tree_sort_key(tree)
        if key in combined:
            prev, _ = combined[key]
            combined[key] = (prev + coeff, tree)
        else:
            combined[key] = (coeff, tree)
    return [
        (coeff, tree)
        for key, (coeff, tree) in sorted(combined.items())
        if coeff != 0
    ]


def _expr(sc: _Scanner) -> Terms:
    terms = _term(sc)
    while True:
        op = sc.peek()
        if op == "+":
            sc.take("+")
            terms += _term(sc)
        elif op == "-":
            sc.take("-")
            terms += [(-c, t) for c, t in _term(sc)]
        else:
            return terms


def _term(sc: _Scanner) -> Terms:
    ch = sc.peek()
    if ch.isdigit() or ch == "-":
        coeff = _rational(sc)
        if sc.peek() == "*":
            sc.take("*")
            return [(coeff * c, t) for c, t in _monomial(sc)]
        if coeff != 0:
            raise sc.error("nonzero constant term: elements have no degree-0 part")
        return []
    return _monomial(sc)


def _rational(sc: _Scanner) -> Fraction:
    num = sc.integer(sign_ok=True)
    if sc.peek() == "/":
        sc.take("/")
        den = sc.integer(sign_ok=False)
        if den <= 0:
            raise sc.error("denominator must be positive")
        return Fraction(num, den)
    return Fraction(num)


def _monomial(sc: _Scanner) -> Terms:
    ch = sc.peek()
    if ch == "[":
        sc.take("[")
        left = _expr(sc)
        sc.take(",")
        right = _expr(sc)
        sc.take("]")
        out: Terms = []
        for cl, tl in left:
            for cr, tr in right:
                out.append((cl * cr, (tl, tr)))
        return out
    name = sc.ident()
    return [(Fraction(1), name)]


def format_terms(terms: Terms) -> str:
    """Canonical text for a term list (in the order given); '0' when empty."""
    parts: list[str] = []
    for coeff, tree in terms:
        if coeff == 0:
            continue
        mono = format_tree(tree)
        mag = abs(coeff)
        body = mono if mag == 1 else f"{mag}*{mono}"
        if not parts:
            parts.append(body if coeff > 0 else (f"-{mag}*{mono}" if mag != 1 else f"-1*{mono}"))
        else:
            parts.append((" + " if coeff > 0 else " - ") + body)
    return "".join(parts) if parts else "0"
