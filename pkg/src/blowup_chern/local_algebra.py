"""Finitely presented modules over ``R = Q[x, y]`` and their local invariants at the origin.

A :class:`Presentation` ``(g, relations)`` stands for ``R^g / <relations>``.
Duals are computed as kernels of the transposed relation matrix, the double
dual map by evaluation, and lengths at the origin by truncating with powers of
the maximal ideal ``m = (x, y)`` until the dimension stops growing.  Working
with polynomial (not power series) presentations is enough because every
invariant is read off after truncation at the origin.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import NonFiniteLength, RankDeficient
from .groebner import GroebnerBasis, Lifter, Term, groebner, syzygies
from .linalg import SparseRatMatrix, _eliminate, rank


class XYPoly:
    """Immutable sparse polynomial in ``x, y`` over the rationals."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[tuple[int, int], object] | None = None):
        acc = {}
        for (a, b), c in (terms or {}).items():
            if a < 0 or b < 0:
                raise ValueError("negative exponent in a polynomial")
            c = Fraction(c)
            if c:
                acc[(int(a), int(b))] = acc.get((int(a), int(b)), 0) + c
        self._terms = {m: c for m, c in sorted(acc.items()) if c}
        self._hash = None

    @classmethod
    def const(cls, c) -> "XYPoly":
        return cls({(0, 0): c})

    @classmethod
    def x(cls) -> "XYPoly":
        return cls({(1, 0): 1})

    @classmethod
    def y(cls) -> "XYPoly":
        return cls({(0, 1): 1})

    @property
    def terms(self) -> dict[tuple[int, int], Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, XYPoly):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == XYPoly.const(other)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(self._terms.items()))
        return self._hash

    def __add__(self, other) -> "XYPoly":
        if not isinstance(other, XYPoly):
            other = XYPoly.const(other)
        acc = dict(self._terms)
        for m, c in other._terms.items():
            acc[m] = acc.get(m, 0) + c
        return XYPoly(acc)

    __radd__ = __add__

    def __neg__(self) -> "XYPoly":
        return XYPoly({m: -c for m, c in self._terms.items()})

    def __sub__(self, other) -> "XYPoly":
        if not isinstance(other, XYPoly):
            other = XYPoly.const(other)
        return self + (-other)

    def __rsub__(self, other) -> "XYPoly":
        return (-self) + other

    def __mul__(self, other) -> "XYPoly":
        if not isinstance(other, XYPoly):
            c = Fraction(other)
            return XYPoly({m: v * c for m, v in self._terms.items()})
        acc: dict[tuple[int, int], Fraction] = {}
        for (a1, b1), c1 in self._terms.items():
            for (a2, b2), c2 in other._terms.items():
                m = (a1 + a2, b1 + b2)
                acc[m] = acc.get(m, 0) + c1 * c2
        return XYPoly(acc)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "XYPoly":
        out = XYPoly.const(1)
        for _ in range(n):
            out = out * self
        return out

    def degree(self) -> int:
        return max((a + b for a, b in self._terms), default=-1)

    def order(self) -> int | None:
        return min((a + b for a, b in self._terms), default=None)

    def at_origin(self) -> Fraction:
        return self._terms.get((0, 0), Fraction(0))

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for (a, b), c in sorted(self._terms.items(), key=lambda t: (-(t[0][0] + t[0][1]), -t[0][0])):
            mono = "*".join(
                s for s in (("x" if a == 1 else f"x^{a}") if a else "", ("y" if b == 1 else f"y^{b}") if b else "") if s
            )
            mag = abs(c)
            body = mono if (mono and mag == 1) else "*".join(s for s in (str(mag), mono) if s)
            parts.append(("-" if c < 0 else "+", body))
        text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    __repr__ = lambda self: f"XYPoly({str(self)!r})"  # noqa: E731


ModuleVector = tuple[XYPoly, ...]


def vector_to_terms(vec: Sequence[XYPoly]) -> dict[Term, Fraction]:
    out = {}
    for c, poly in enumerate(vec):
        for (a, b), v in poly.items():
            out[(c, a, b)] = v
    return out


def terms_to_vector(terms: Mapping[Term, object], rank_: int) -> ModuleVector:
    comps: list[dict[tuple[int, int], object]] = [{} for _ in range(rank_)]
    for (c, a, b), v in terms.items():
        comps[c][(a, b)] = v
    return tuple(XYPoly(d) for d in comps)


def _syz_to_vector(syz: Mapping[int, Mapping[tuple[int, int], object]], length: int) -> ModuleVector:
    return tuple(XYPoly(syz.get(i, {})) for i in range(length))


def _is_zero(vec: Sequence[XYPoly]) -> bool:
    return not any(vec)


@dataclass(frozen=True)
class Presentation:
    """The module ``R^gens / span(relations)``; each relation is a column of length ``gens``."""

    gens: int
    relations: tuple[ModuleVector, ...] = ()

    def __post_init__(self):
        rels = []
        for rel in self.relations:
            rel = tuple(p if isinstance(p, XYPoly) else XYPoly.const(p) for p in rel)
            if len(rel) != self.gens:
                raise ValueError(f"relation of length {len(rel)} for {self.gens} generators")
            if not _is_zero(rel):
                rels.append(rel)
        object.__setattr__(self, "relations", tuple(rels))

    @property
    def relation_terms(self) -> list[dict[Term, Fraction]]:
        return [vector_to_terms(r) for r in self.relations]

    def __str__(self) -> str:
        rels = "; ".join("(" + ", ".join(str(p) for p in r) + ")" for r in self.relations)
        return f"R^{self.gens} / <{rels}>"


@dataclass(frozen=True)
class ModuleMap:
    """A map given on generators: column ``i`` is the image of source generator ``i``."""

    source: Presentation
    target: Presentation
    images: tuple[ModuleVector, ...]

    def __post_init__(self):
        if len(self.images) != self.source.gens:
            raise ValueError("one image per source generator is required")
        if any(len(v) != self.target.gens for v in self.images):
            raise ValueError("image vectors must have the target's generator count")

    def apply(self, vec: Sequence[XYPoly]) -> ModuleVector:
        out = [XYPoly() for _ in range(self.target.gens)]
        for coeff, image in zip(vec, self.images):
            if coeff:
                for t in range(self.target.gens):
                    out[t] = out[t] + coeff * image[t]
        return tuple(out)

    def is_well_defined(self) -> bool:
        """Source relations must land in the span of the target relations."""
        gb = groebner(self.target.relation_terms, self.target.gens)
        return all(gb.contains(vector_to_terms(self.apply(rel))) for rel in self.source.relations)

    def cokernel(self) -> Presentation:
        return Presentation(self.target.gens, self.target.relations + self.images)


def module_groebner(columns: Iterable[Sequence[XYPoly]], rank_: int, order: str = "grevlex", truncate: int | None = None) -> GroebnerBasis:
    return groebner([vector_to_terms(c) for c in columns], rank_, order, truncate)


def module_syzygies(columns: Sequence[Sequence[XYPoly]], rank_: int, order: str = "grevlex") -> list[ModuleVector]:
    """Generators of ``{c : sum_i c_i * columns_i = 0}``."""
    syz = syzygies([vector_to_terms(c) for c in columns], rank_, order)
    return [_syz_to_vector(s, len(columns)) for s in syz]


@dataclass(frozen=True)
class HomResult:
    """``Hom(M, R)`` as a submodule of ``R^g``: generators (functionals) and their presentation."""

    generators: tuple[ModuleVector, ...]
    presentation: Presentation


def hom_to_ring(P: Presentation, order: str = "grevlex") -> HomResult:
    """Functionals ``phi in R^g`` with ``phi . r = 0`` for every relation ``r``."""
    s = len(P.relations)
    rows = [tuple(rel[i] for rel in P.relations) for i in range(P.gens)]
    gens = module_syzygies(rows, s, order) if P.gens else []
    gens = [g for g in gens if not _is_zero(g)]
    relations = module_syzygies(gens, P.gens, order) if gens else []
    return HomResult(tuple(gens), Presentation(len(gens), tuple(relations)))


def dual(P: Presentation, order: str = "grevlex") -> Presentation:
    """A presentation of ``Hom(M, R)``."""
    return hom_to_ring(P, order).presentation


@dataclass(frozen=True)
class DoubleDual:
    rho: ModuleMap
    dual: HomResult
    double_dual: HomResult


def double_dual(P: Presentation, order: str = "grevlex") -> DoubleDual:
    """The evaluation map ``M -> M^vv`` together with the intermediate duals."""
    d1 = hom_to_ring(P, order)
    if not d1.generators:
        raise RankDeficient(f"the dual of {P} is zero; the module is torsion")
    d2 = hom_to_ring(d1.presentation, order)
    t = len(d1.generators)
    lifter = Lifter([vector_to_terms(e) for e in d2.generators], t, order)
    images = []
    for i in range(P.gens):
        ev = tuple(d1.generators[c][i] for c in range(t))
        coeffs = lifter.lift(vector_to_terms(ev))
        if coeffs is None:
            raise RankDeficient(f"evaluation at generator {i} is not in the double dual; inconsistent duals")
        images.append(_syz_to_vector(coeffs, len(d2.generators)))
    rho = ModuleMap(P, d2.presentation, tuple(images))
    return DoubleDual(rho, d1, d2)


def double_dual_map(P: Presentation, order: str = "grevlex") -> ModuleMap:
    """The natural map ``rho: M -> M^vv`` given by evaluation."""
    return double_dual(P, order).rho


def truncated_dimension(P: Presentation, m: int, order: str = "grevlex") -> int:
    """``dim_Q R^g / (relations + m^m R^g)``."""
    gb = groebner(P.relation_terms, P.gens, order, truncate=m)
    return gb.quotient_dimension()


def prune(P: Presentation) -> Presentation:
    """An isomorphic presentation with fewer generators.

    While some relation has a non-zero constant (a bare scalar) in some
    position, that generator is a combination of the others: substitute it
    away and drop both the generator and the relation.  Only exact polynomial
    operations are used, so the module is unchanged globally.
    """
    gens = list(range(P.gens))
    rels = [list(r) for r in P.relations]
    while True:
        best = None
        for ri, r in enumerate(rels):
            for g in gens:
                p = r[g]
                if p and p.degree() == 0:
                    size = sum(len(q.terms) for q in r)
                    if best is None or size < best[0]:
                        best = (size, ri, g)
        if best is None:
            break
        _, ri, g = best
        pivot = rels.pop(ri)
        c = pivot[g].at_origin()
        for r in rels:
            f = r[g]
            if f:
                factor = f * (1 / c)
                for h in gens:
                    if pivot[h]:
                        r[h] = r[h] - factor * pivot[h]
        gens.remove(g)
    return Presentation(len(gens), tuple(tuple(r[g] for g in gens) for r in rels))


@dataclass(frozen=True)
class Colength:
    value: int
    m: int
    history: tuple[tuple[int, int], ...] = field(default=())


def colength(P: Presentation, m0: int | None = None, order: str = "grevlex", limit: int | None = None) -> Colength:
    """Length of the localisation of ``P`` at the origin, certified by stabilisation.

    Counts ``dim R^g / (relations + m^m R^g)`` for ``m = m0, m0 + 1, ...``
    and stops at the first repeat.  Equal values at ``m`` and ``m + 1`` give
    ``m^m M_0 = m^(m+1) M_0``, hence ``m^m M_0 = 0`` by Nakayama, so the value
    is the length.  Raises once ``m`` passes ``limit`` (by default four times
    twice the largest relation degree, plus two).
    """
    P = prune(P)
    if P.gens == 0:
        return Colength(0, 0, ())
    m0 = max(1 if m0 is None else m0, 1)
    if limit is None:
        limit = 4 * (2 * max((p.degree() for r in P.relations for p in r), default=0) + 2)
    limit = max(limit, m0 + 1)
    history = [(m0, truncated_dimension(P, m0, order))]
    for m in range(m0 + 1, limit + 1):
        history.append((m, truncated_dimension(P, m, order)))
        if history[-1][1] == history[-2][1]:
            return Colength(history[-1][1], m - 1, tuple(history))
    raise NonFiniteLength(f"truncated dimensions keep growing up to m={limit}: {history[-3:]}")


def colength_at_origin(P: Presentation, m0: int | None = None, order: str = "grevlex") -> int:
    return colength(P, m0, order).value


def l_of_Q(M: Presentation, m0: int | None = None, order: str = "grevlex") -> int:
    """``dim coker(M -> M^vv)`` at the origin."""
    return colength(double_dual_map(M, order).cokernel(), m0, order).value


def transpose_cokernel(P: Presentation) -> Presentation:
    """``coker(A^T)`` for the relation matrix ``A`` of ``P``.

    When the relation map is injective this presents ``Ext^1(M, R)``.
    """
    rels = P.relations
    return Presentation(len(rels), tuple(tuple(r[i] for r in rels) for i in range(P.gens)))


def _to_sympy(poly: XYPoly, gens):
    from sympy import Poly, QQ

    return Poly.from_dict({k: QQ(v.numerator, v.denominator) for k, v in poly.items()}, *gens, domain=QQ)


def _from_sympy(poly) -> XYPoly:
    return XYPoly({k: Fraction(int(v.numerator), int(v.denominator)) for k, v in poly.as_dict().items()})


def _primitive_minors(columns: Sequence[Sequence[XYPoly]], triple: tuple[int, int, int], gens) -> ModuleVector | None:
    a, b, c = (columns[i] for i in triple)
    minors = (b[0] * c[1] - c[0] * b[1], c[0] * a[1] - a[0] * c[1], a[0] * b[1] - b[0] * a[1])
    if not any(minors):
        return None
    polys = [_to_sympy(m, gens) for m in minors]
    g = polys[0]
    for q in polys[1:]:
        g = g.gcd(q)
    out = [XYPoly() for _ in columns]
    for i, q in zip(triple, polys):
        if not q.is_zero:
            out[i] = _from_sympy(q.exquo(g))
    return tuple(out)


def rank_two_kernel(columns: Sequence[Sequence[XYPoly]]) -> ModuleVector | None:
    """Generator of the syzygies of three vectors in ``R^2`` spanning a rank 2 module.

    The kernel of a ``2 x 3`` matrix of rank 2 over a UFD is free of rank one,
    spanned by the vector of signed maximal minors divided by their gcd.
    Returns ``None`` when the columns have rank below 2.
    """
    if len(columns) != 3:
        raise ValueError("need exactly three columns")
    from sympy import symbols

    return _primitive_minors(columns, (0, 1, 2), symbols("x y"))


def _det(rows: list[list[XYPoly]]) -> XYPoly:
    if len(rows) == 1:
        return rows[0][0]
    out = XYPoly()
    for i, p in enumerate(rows[0]):
        if p:
            minor = _det([r[:i] + r[i + 1 :] for r in rows[1:]])
            out = out + p * minor if i % 2 == 0 else out - p * minor
    return out


def _locally_saturated(vectors: Sequence[ModuleVector], gens) -> bool:
    """Whether the maximal minors of ``vectors`` have a gcd that is a unit at the origin."""
    from itertools import combinations

    r = len(vectors)
    g = None
    for rows in combinations(range(len(vectors[0])), r):
        m = _det([[vectors[c][i] for c in range(r)] for i in rows])
        if not m:
            continue
        q = _to_sympy(m, gens)
        g = q if g is None else g.gcd(q)
        if g.is_ground:
            return True
    return g is not None and g.eval({gens[0]: 0, gens[1]: 0}) != 0


def local_kernel_basis(
    columns: Sequence[Sequence[XYPoly]],
    candidates: Sequence[ModuleVector] = (),
    budget: int = 400,
) -> tuple[ModuleVector, ...] | None:
    """A basis near the origin of the syzygies of ``g`` columns of rank 2 in ``R^2``.

    The syzygy module is free of rank ``g - 2`` near the origin.  A choice
    ``S`` of ``g - 2`` syzygies is a basis there exactly when
    ``0 -> R^(g-2) -> R^g -> R^2`` is exact, which by the Buchsbaum-Eisenbud
    criterion means the maximal minors of ``S`` generate an ideal of depth 2
    at the origin: their gcd must be a local unit.  The same gcd condition on
    a partial choice is necessary, which prunes a depth-first search over the
    primitive minor vectors of column triples followed by ``candidates``.
    Returns ``None`` when ``budget`` gcd tests find nothing.
    """
    from itertools import combinations

    from sympy import symbols

    g = len(columns)
    if g < 3:
        raise ValueError("need at least three columns")
    gens = symbols("x y")
    pool: list[ModuleVector] = []
    for triple in combinations(range(g), 3):
        v = _primitive_minors(columns, triple, gens)
        if v is not None and v not in pool:
            pool.append(v)
    pool.sort(key=lambda v: (max(p.degree() for p in v if p), sum(len(p.terms) for p in v)))
    for v in sorted(candidates, key=lambda v: (max(p.degree() for p in v if p), sum(len(p.terms) for p in v))):
        if any(v) and v not in pool:
            pool.append(v)
    r = g - 2
    tests = 0

    def search(chosen: list[ModuleVector], start: int) -> tuple[ModuleVector, ...] | None:
        nonlocal tests
        if len(chosen) == r:
            return tuple(chosen)
        for i in range(start, len(pool)):
            if tests >= budget:
                return None
            tests += 1
            trial = chosen + [pool[i]]
            if _locally_saturated(trial, gens):
                found = search(trial, i + 1)
                if found is not None:
                    return found
        return None

    return search([], 0)


def minimal_relation_count(P: Presentation, order: str = "grevlex") -> int:
    """Number of relations in a minimal presentation of ``P`` localised at the origin.

    Equals ``dim Tor_1(M, k)`` when the generators are already minimal: the
    relation count minus the rank of the second syzygies evaluated at 0.
    """
    return len(minimalize_relations(P, order).relations)


def minimalize_relations(P: Presentation, order: str = "grevlex") -> Presentation:
    """Drop relations that are redundant after localising at the origin.

    A relation is dropped when some second syzygy has a non-zero constant
    coefficient on it; the corresponding block of second syzygies is a unit
    near the origin, so the remaining relations generate the same local module.
    """
    rels = list(P.relations)
    if not rels:
        return P
    second = module_syzygies(rels, P.gens, order)
    const = SparseRatMatrix.from_columns(
        len(rels),
        [{i: s[i].at_origin() for i in range(len(rels)) if s[i].at_origin()} for s in second],
    )
    rows = const.transpose().row_dicts()  # one row per second syzygy
    drop = {c for c, _ in _eliminate(rows, len(rels))}
    kept = tuple(r for i, r in enumerate(rels) if i not in drop)
    return Presentation(P.gens, kept)


def local_generator_count(P: Presentation) -> int:
    """Minimal number of generators of the localisation: ``g - rank(relations at 0)``."""
    if not P.relations:
        return P.gens
    mat = SparseRatMatrix.from_columns(
        P.gens, [{i: r[i].at_origin() for i in range(P.gens) if r[i].at_origin()} for r in P.relations]
    )
    return P.gens - rank(mat)
