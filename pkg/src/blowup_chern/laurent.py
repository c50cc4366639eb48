"""Polynomials in z (Laurent) and u over the rationals, and the bundle normal form.

A monomial ``z^k u^i`` is keyed by the pair ``(k, i)`` with ``i >= 0``.
Terms are kept in canonical order (``i`` ascending, then ``k``), so equality
and hashing are structural and printing is deterministic.

The two charts of the blown-up plane are ``U = Spec Q[z, u]`` and
``V = Spec Q[xi, v]`` glued by ``xi = 1/z``, ``v = z u``.  In U-coordinates a
monomial is regular on U iff ``k >= 0`` and regular on V iff ``k <= i``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from .errors import ParseError, WindowViolation

Monomial = tuple[int, int]  # (k, i): exponent of z, exponent of u


def _key(mono: Monomial) -> tuple[int, int]:
    return (mono[1], mono[0])


class BiLaurentPoly:
    """Immutable sparse polynomial in ``z, 1/z, u`` with rational coefficients."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, object] | Iterable[tuple[Monomial, object]] = ()):
        if isinstance(terms, Mapping):
            items = terms.items()
        else:
            items = terms
        acc: dict[Monomial, Fraction] = {}
        for (k, i), c in items:
            if i < 0:
                raise ValueError(f"negative u-exponent in monomial z^{k} u^{i}")
            c = Fraction(c)
            if c:
                key = (int(k), int(i))
                acc[key] = acc.get(key, 0) + c
        self._terms = {m: c for m, c in sorted(acc.items(), key=lambda t: _key(t[0])) if c}
        self._hash = None

    # construction helpers
    @classmethod
    def zero(cls) -> "BiLaurentPoly":
        return cls()

    @classmethod
    def one(cls) -> "BiLaurentPoly":
        return cls({(0, 0): 1})

    @classmethod
    def monomial(cls, k: int, i: int, coeff=1) -> "BiLaurentPoly":
        return cls({(k, i): coeff})

    @classmethod
    def _raw(cls, terms: dict[Monomial, Fraction]) -> "BiLaurentPoly":
        obj = cls.__new__(cls)
        obj._terms = {m: terms[m] for m in sorted(terms, key=_key)}
        obj._hash = None
        return obj

    # container protocol
    @property
    def terms(self) -> dict[Monomial, Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __iter__(self) -> Iterator[Monomial]:
        return iter(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def coeff(self, k: int, i: int) -> Fraction:
        return self._terms.get((k, i), Fraction(0))

    def __eq__(self, other) -> bool:
        if isinstance(other, BiLaurentPoly):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == BiLaurentPoly({(0, 0): other})
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(self._terms.items()))
        return self._hash

    # arithmetic
    def __add__(self, other) -> "BiLaurentPoly":
        if not isinstance(other, BiLaurentPoly):
            other = BiLaurentPoly({(0, 0): other})
        acc = dict(self._terms)
        for m, c in other._terms.items():
            v = acc.get(m, 0) + c
            if v:
                acc[m] = v
            else:
                acc.pop(m, None)
        return BiLaurentPoly._raw(acc)

    __radd__ = __add__

    def __neg__(self) -> "BiLaurentPoly":
        return BiLaurentPoly._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other) -> "BiLaurentPoly":
        if not isinstance(other, BiLaurentPoly):
            other = BiLaurentPoly({(0, 0): other})
        return self + (-other)

    def __rsub__(self, other) -> "BiLaurentPoly":
        return (-self) + other

    def scalar_mul(self, c) -> "BiLaurentPoly":
        c = Fraction(c)
        if not c:
            return BiLaurentPoly()
        return BiLaurentPoly._raw({m: v * c for m, v in self._terms.items()})

    def __mul__(self, other) -> "BiLaurentPoly":
        if not isinstance(other, BiLaurentPoly):
            return self.scalar_mul(other)
        acc: dict[Monomial, Fraction] = {}
        for (k1, i1), c1 in self._terms.items():
            for (k2, i2), c2 in other._terms.items():
                m = (k1 + k2, i1 + i2)
                v = acc.get(m, 0) + c1 * c2
                if v:
                    acc[m] = v
                else:
                    acc.pop(m, None)
        return BiLaurentPoly._raw(acc)

    __rmul__ = __mul__

    def shift(self, dk: int = 0, di: int = 0) -> "BiLaurentPoly":
        """Multiply by the monomial ``z^dk u^di``."""
        if di < 0 and any(i + di < 0 for _, i in self._terms):
            raise ValueError("shift would create a negative u-exponent")
        return BiLaurentPoly._raw({(k + dk, i + di): c for (k, i), c in self._terms.items()})

    # structure
    def is_zero(self) -> bool:
        return not self._terms

    def u_degree(self) -> int:
        """Largest u-exponent; -1 for the zero polynomial."""
        return max((i for _, i in self._terms), default=-1)

    def u_order(self) -> int | None:
        return min((i for _, i in self._terms), default=None)

    def z_range(self) -> tuple[int, int] | None:
        if not self._terms:
            return None
        ks = [k for k, _ in self._terms]
        return (min(ks), max(ks))

    def z_span(self) -> int:
        r = self.z_range()
        return 0 if r is None else r[1] - r[0]

    def truncate_u(self, n: int) -> "BiLaurentPoly":
        """Reduce modulo ``u^(n+1)``."""
        if n < 0:
            raise ValueError("truncation order must be non-negative")
        return BiLaurentPoly._raw({m: c for m, c in self._terms.items() if m[1] <= n})

    def to_v_chart(self) -> "BiLaurentPoly":
        """Rewrite in V-chart coordinates: ``z^k u^i -> xi^(i-k) v^i``.

        The result uses the same ``(k, i)`` keys for ``(xi-exponent, v-exponent)``.
        The substitution is its own inverse.
        """
        return BiLaurentPoly._raw({(i - k, i): c for (k, i), c in self._terms.items()})

    def is_u_holomorphic(self) -> bool:
        return all(k >= 0 for k, _ in self._terms)

    def is_v_holomorphic(self) -> bool:
        return all(k <= i for k, i in self._terms)

    # text
    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"BiLaurentPoly({format_poly(self)!r})"


def format_poly(p: BiLaurentPoly) -> str:
    """Canonical text form; :func:`parse_poly` inverts it exactly."""
    if not p:
        return "0"
    pieces = []
    for n, ((k, i), c) in enumerate(p.items()):
        atoms = []
        if k == 1:
            atoms.append("z")
        elif k:
            atoms.append(f"z^{k}")
        if i == 1:
            atoms.append("u")
        elif i:
            atoms.append(f"u^{i}")
        mag = abs(c)
        if atoms and mag == 1:
            body = "*".join(atoms)
        else:
            num = str(mag.numerator) if mag.denominator == 1 else f"{mag.numerator}/{mag.denominator}"
            body = "*".join([num] + atoms)
        if n == 0:
            pieces.append(("-" if c < 0 else "") + body)
        else:
            pieces.append((" - " if c < 0 else " + ") + body)
    return "".join(pieces)


_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<op>[-+*/^])|(?P<var>[zu]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(text, start, ("integer", "'z'", "'u'", "'+'", "'-'", "'*'", "'/'", "'^'"))
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.pos]

    def take(self) -> tuple[str, str, int]:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, expected: tuple[str, ...]):
        raise ParseError(self.text, self.peek()[2], expected)

    def expect_int(self, signed: bool) -> int:
        sign = 1
        if signed and self.peek()[:2] == ("op", "-"):
            self.take()
            sign = -1
        if self.peek()[0] != "int":
            self.fail(("integer",))
        return sign * int(self.take()[1])

    def parse(self) -> BiLaurentPoly:
        total: dict[Monomial, Fraction] = {}
        sign = 1
        if self.peek()[:2] in (("op", "-"), ("op", "+")):
            sign = -1 if self.take()[1] == "-" else 1
        while True:
            mono, coeff = self.term()
            total[mono] = total.get(mono, 0) + sign * coeff
            kind, val, _ = self.peek()
            if kind == "end":
                break
            if kind == "op" and val in "+-":
                self.take()
                sign = -1 if val == "-" else 1
                continue
            self.fail(("'+'", "'-'", "end of input"))
        return BiLaurentPoly(total)

    def term(self) -> tuple[Monomial, Fraction]:
        coeff = Fraction(1)
        seen_part = False
        if self.peek()[0] == "int":
            num = int(self.take()[1])
            den = 1
            if self.peek()[:2] == ("op", "/"):
                self.take()
                den = self.expect_int(signed=False)
                if den == 0:
                    raise ParseError(self.text, self.tokens[self.pos - 1][2], ("non-zero denominator",))
            coeff = Fraction(num, den)
            seen_part = True
        k = i = 0
        while True:
            kind, val, _ = self.peek()
            star = False
            if (kind, val) == ("op", "*"):
                if not seen_part:
                    self.fail(("integer", "'z'", "'u'"))
                self.take()
                star = True
                kind, val, _ = self.peek()
            if kind != "var":
                if star:
                    self.fail(("'z'", "'u'"))
                break
            self.take()
            exp = 1
            if self.peek()[:2] == ("op", "^"):
                self.take()
                exp = self.expect_int(signed=(val == "z"))
            if val == "z":
                k += exp
            else:
                i += exp
            seen_part = True
        if not seen_part:
            self.fail(("integer", "'z'", "'u'"))
        return (k, i), coeff


def parse_poly(text: str) -> BiLaurentPoly:
    """Parse the text grammar for polynomials in ``z, z^-1, u``.

    >>> str(parse_poly("3*z*u^2 - 1/2*z^-1*u"))
    '-1/2*z^-1*u + 3*z*u^2'
    """
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# normal form of the transition matrix


def window_monomials(j: int) -> list[Monomial]:
    """Monomials allowed in ``p`` for splitting type ``j``, canonical order."""
    return [(k, i) for i in range(1, 2 * j - 1) for k in range(i - j + 1, j)]


def in_window(j: int, mono: Monomial) -> bool:
    k, i = mono
    return 1 <= i <= 2 * j - 2 and i - j + 1 <= k <= j - 1


@dataclass(frozen=True)
class BundleData:
    """A rank-2 bundle near the exceptional line, transition matrix ``[[z^j, p], [0, z^-j]]``.

    The matrix maps U-chart coordinates of a section to V-chart coordinates:
    a section is a pair ``(a, b)`` regular on U whose image
    ``(z^j a + p b, z^-j b)`` is regular on V.
    """

    j: int
    p: BiLaurentPoly

    def to_v(self, a: BiLaurentPoly, b: BiLaurentPoly) -> tuple[BiLaurentPoly, BiLaurentPoly]:
        """Apply the transition matrix."""
        return (a.shift(self.j) + self.p * b, b.shift(-self.j))

    def from_v(self, a: BiLaurentPoly, b: BiLaurentPoly) -> tuple[BiLaurentPoly, BiLaurentPoly]:
        """Apply the inverse ``[[z^-j, -p], [0, z^j]]``."""
        return (a.shift(-self.j) - self.p * b, b.shift(self.j))

    @property
    def p_u_degree(self) -> int:
        return max(self.p.u_degree(), 0)

    def __str__(self) -> str:
        return f"(j={self.j}, p={format_poly(self.p)})"


def validate_bundle(j: int, p: BiLaurentPoly | str) -> BundleData:
    if isinstance(p, str):
        p = parse_poly(p)
    if isinstance(j, bool) or int(j) != j or j < 0:
        raise ValueError(f"splitting type must be a non-negative integer, got {j!r}")
    j = int(j)
    for mono in p:
        if not in_window(j, mono):
            raise WindowViolation(j, mono)
    return BundleData(j, p)
