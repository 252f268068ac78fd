"""Exact arithmetic in Z[a, a^-1][x].

Values of the two-variable bracket invariant live here: polynomials in x
(nonnegative degrees only) whose coefficients are integer Laurent
polynomials in a.  A polynomial is stored as a mapping from (xdeg, aexp)
to a nonzero integer coefficient.
"""

from __future__ import annotations

import re
from typing import Dict, Iterable, Iterator, Tuple

Term = Tuple[int, int]  # (x degree, a exponent)


class PolyParseError(ValueError):
    """Malformed polynomial text; carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class XPolynomial:
    """Element of Z[a, a^-1][x with nonnegative degree].

    Instances are immutable and hashable; all arithmetic returns new values.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Iterable[Tuple[Term, int]] | Dict[Term, int] | None = None):
        items = terms.items() if isinstance(terms, dict) else (terms or ())
        acc: Dict[Term, int] = {}
        for (xdeg, aexp), coeff in items:
            if xdeg < 0:
                raise ValueError("x degree must be nonnegative")
            key = (xdeg, aexp)
            c = acc.get(key, 0) + coeff
            if c:
                acc[key] = c
            elif key in acc:
                del acc[key]
        self._terms = dict(sorted(acc.items()))

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls) -> "XPolynomial":
        return cls()

    @classmethod
    def one(cls) -> "XPolynomial":
        return cls.monomial(1, 0, 0)

    @classmethod
    def monomial(cls, coeff: int, xdeg: int = 0, aexp: int = 0) -> "XPolynomial":
        return cls([((xdeg, aexp), coeff)] if coeff else [])

    @classmethod
    def x(cls) -> "XPolynomial":
        return cls.monomial(1, 1, 0)

    # -- basic queries -------------------------------------------------

    def terms(self) -> Dict[Term, int]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def x_degrees(self) -> Tuple[int, ...]:
        return tuple(sorted({xd for xd, _ in self._terms}))

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __iter__(self) -> Iterator[Tuple[Term, int]]:
        return iter(self._terms.items())

    def __eq__(self, other: object) -> bool:
        return isinstance(other, XPolynomial) and self._terms == other._terms

    def __hash__(self) -> int:
        return hash(tuple(self._terms.items()))

    def __repr__(self) -> str:
        return f"XPolynomial({self.encode()!r})"

    # -- ring operations ------------------------------------------------

    def __add__(self, other: "XPolynomial") -> "XPolynomial":
        acc = dict(self._terms)
        for key, c in other._terms.items():
            s = acc.get(key, 0) + c
            if s:
                acc[key] = s
            elif key in acc:
                del acc[key]
        return XPolynomial(acc)

    def __neg__(self) -> "XPolynomial":
        return XPolynomial({k: -c for k, c in self._terms.items()})

    def __sub__(self, other: "XPolynomial") -> "XPolynomial":
        return self + (-other)

    def __mul__(self, other: "XPolynomial") -> "XPolynomial":
        acc: Dict[Term, int] = {}
        for (x1, a1), c1 in self._terms.items():
            for (x2, a2), c2 in other._terms.items():
                key = (x1 + x2, a1 + a2)
                s = acc.get(key, 0) + c1 * c2
                if s:
                    acc[key] = s
                elif key in acc:
                    del acc[key]
        return XPolynomial(acc)

    def scale(self, c: int) -> "XPolynomial":
        if c == 0:
            return XPolynomial()
        return XPolynomial({k: c * v for k, v in self._terms.items()})

    def shift_a(self, k: int) -> "XPolynomial":
        """Multiply by a^k."""
        return XPolynomial({(xd, ae + k): c for (xd, ae), c in self._terms.items()})

    def mirror_a(self) -> "XPolynomial":
        """Substitute a -> a^-1 (the image under global crossing change)."""
        return XPolynomial({(xd, -ae): c for (xd, ae), c in self._terms.items()})

    def pow(self, k: int) -> "XPolynomial":
        if k < 0:
            raise ValueError("negative powers are not defined here")
        out = XPolynomial.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- canonical order -------------------------------------------------

    def sort_key(self) -> Tuple[Tuple[int, int, int], ...]:
        return tuple((xd, ae, c) for (xd, ae), c in self._terms.items())

    # -- text codec -------------------------------------------------------

    def encode(self) -> str:
        """Canonical text form: terms by descending x degree, then descending a exponent."""
        if not self._terms:
            return "0"
        pieces = []
        for (xd, ae) in sorted(self._terms, key=lambda t: (-t[0], -t[1])):
            c = self._terms[(xd, ae)]
            parts = []
            if abs(c) != 1 or (xd == 0 and ae == 0):
                parts.append(str(abs(c)))
            if xd == 1:
                parts.append("x")
            elif xd > 1:
                parts.append(f"x^{xd}")
            if ae != 0:
                parts.append(f"a^{ae}")
            body = "*".join(parts)
            if not pieces:
                pieces.append(("-" if c < 0 else "") + body)
            else:
                pieces.append(("-" if c < 0 else "+") + body)
        return "".join(pieces)

    @classmethod
    def decode(cls, text: str) -> "XPolynomial":
        return _Parser(text).parse()

    def __str__(self) -> str:
        return self.encode()


def canonical_compare(p: XPolynomial, q: XPolynomial) -> int:
    """Total order on normalized polynomials: -1, 0 or 1.

    Compares the sorted term sequences (xdeg, aexp, coeff) lexicographically;
    a shorter sequence that is a prefix of the other comes first.
    """
    kp, kq = p.sort_key(), q.sort_key()
    if kp < kq:
        return -1
    if kp > kq:
        return 1
    return 0


def circle_power(gamma: int) -> XPolynomial:
    """(-a^2 - a^-2)^gamma, the weight of gamma trivial circles."""
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    loop = XPolynomial({(0, 2): -1, (0, -2): -1})
    return loop.pow(gamma)


_TOKEN_RE = re.compile(r"\s*(?:(?P<int>\d+)|(?P<sym>[xa*^()+-]))")


class _Parser:
    """Recursive-descent parser for polynomial text.

    Accepts the flat canonical grammar and, as a convenience superset,
    parenthesized groups such as ``x*(-2*a^-8 - a^-4)``.
    """

    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.tokens: list[Tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if m is None:
                raise PolyParseError("unexpected character", pos)
            if m.group("int") is not None:
                self.tokens.append(("int", m.group("int"), m.start("int")))
            else:
                self.tokens.append(("sym", m.group("sym"), m.start("sym")))
            pos = m.end()
        self.tokens.append(("end", "", len(text)))
        self.idx = 0

    def peek(self) -> Tuple[str, str, int]:
        return self.tokens[self.idx]

    def advance(self) -> Tuple[str, str, int]:
        tok = self.tokens[self.idx]
        self.idx += 1
        return tok

    def parse(self) -> XPolynomial:
        value = self.parse_expr()
        kind, _, pos = self.peek()
        if kind != "end":
            raise PolyParseError("trailing input", pos)
        return value

    def parse_expr(self) -> XPolynomial:
        sign = 1
        kind, val, _ = self.peek()
        if kind == "sym" and val in "+-":
            self.advance()
            sign = -1 if val == "-" else 1
        total = self.parse_product().scale(sign)
        while True:
            kind, val, _ = self.peek()
            if kind == "sym" and val in "+-":
                self.advance()
                term = self.parse_product()
                total = total + (term.scale(-1) if val == "-" else term)
            else:
                return total

    def parse_product(self) -> XPolynomial:
        value = self.parse_factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "sym" and val == "*":
                self.advance()
                value = value * self.parse_factor()
            else:
                return value

    def parse_factor(self) -> XPolynomial:
        kind, val, pos = self.advance()
        if kind == "int":
            return XPolynomial.monomial(int(val))
        if kind == "sym" and val == "(":
            inner = self.parse_expr()
            kind, val, pos = self.advance()
            if not (kind == "sym" and val == ")"):
                raise PolyParseError("expected ')'", pos)
            return inner
        if kind == "sym" and val == "x":
            exp = 1
            if self.peek()[:2] == ("sym", "^"):
                self.advance()
                exp = self._read_int(signed=False)
            return XPolynomial.monomial(1, exp, 0)
        if kind == "sym" and val == "a":
            exp = 1
            if self.peek()[:2] == ("sym", "^"):
                self.advance()
                exp = self._read_int(signed=True)
            return XPolynomial.monomial(1, 0, exp)
        raise PolyParseError("expected a term", pos)

    def _read_int(self, signed: bool) -> int:
        sign = 1
        kind, val, pos = self.advance()
        if signed and kind == "sym" and val == "-":
            sign = -1
            kind, val, pos = self.advance()
        if kind != "int":
            raise PolyParseError("expected an integer exponent", pos)
        return sign * int(val)
