"""The module of formal sections ``M = lim H^0(l_n)`` and a finite presentation of it.

``x`` acts on a section ``(a, b)`` by multiplication with ``u`` and ``y`` by
multiplication with ``z u``.  Sections embed R-linearly in ``R^2`` through

    z^k u^i  ->  x^(i + j - k) y^k     (component-wise, after multiplying by u^j),

which is well defined because every section satisfies ``0 <= k <= i + j``.
Generators are picked from exact polynomial sections computed by the Cech
engine, relations are the syzygies of their images in ``R^2``, and the result
is certified by comparing the dimensions of ``M / F^(n+1) M`` (sections modulo
``u^(n+1)`` that lift) with the same dimensions read off the embedded module.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import numpy as np

from .cech import Section, h0, h0_sections
from .errors import CertificationFailure
from .laurent import BiLaurentPoly, BundleData
from .linalg import EchelonSpan
from .local_algebra import (
    ModuleVector,
    Presentation,
    XYPoly,
    colength,
    double_dual_map,
    minimalize_relations,
    module_syzygies,
    local_kernel_basis,
    rank_two_kernel,
    transpose_cokernel,
    truncated_dimension,
)

_U = BiLaurentPoly.monomial(0, 1)
_ZU = BiLaurentPoly.monomial(1, 1)


def act_x(s: Section) -> Section:
    return (s[0] * _U, s[1] * _U)


def act_y(s: Section) -> Section:
    return (s[0] * _ZU, s[1] * _ZU)


def act(poly: XYPoly, s: Section) -> Section:
    """Action of a polynomial in ``x, y`` on a section."""
    a = BiLaurentPoly()
    b = BiLaurentPoly()
    for (ex, ey), c in poly.items():
        mono = BiLaurentPoly.monomial(ey, ex + ey, c)
        a = a + s[0] * mono
        b = b + s[1] * mono
    return (a, b)


def section_order(s: Section) -> int:
    orders = [o for o in (s[0].u_order(), s[1].u_order()) if o is not None]
    return min(orders) if orders else -1


def truncate_section(s: Section, n: int) -> Section:
    return (s[0].truncate_u(n), s[1].truncate_u(n))


def section_vector(s: Section) -> dict[tuple[int, int, int], Fraction]:
    """Sparse coordinates keyed by ``(i, component, k)``, lowest monomial first."""
    out = {}
    for comp, poly in enumerate(s):
        for (k, i), c in poly.items():
            out[(i, comp, k)] = c
    return out


def embed(bundle: BundleData, s: Section) -> ModuleVector:
    """Image of a section in ``R^2``."""
    j = bundle.j
    comps = []
    for poly in s:
        terms = {}
        for (k, i), c in poly.items():
            if not 0 <= k <= i + j:
                raise ValueError(f"monomial z^{k} u^{i} cannot occur in a section for j={j}")
            terms[(i + j - k, k)] = c
        comps.append(XYPoly(terms))
    return tuple(comps)


@dataclass(frozen=True)
class SectionBasisTower:
    """Bases of ``M / F^(n+1) M`` for ``n = 0 .. top``.

    ``levels[n]`` spans the sections modulo ``u^(n+1)`` that lift to genuine
    sections; ``raw_h0[n]`` is ``dim H^0(l_n)``, which can be larger for small
    ``n`` because not every section on ``l_n`` lifts.
    """

    N: int
    top: int
    exact_sections: tuple[Section, ...]
    levels: tuple[tuple[Section, ...], ...]
    raw_h0: tuple[int, ...]

    def dims(self) -> tuple[int, ...]:
        return tuple(len(level) for level in self.levels)


@dataclass(frozen=True)
class GeneratorSet:
    sections: tuple[Section, ...]
    levels: tuple[int, ...]


@dataclass(frozen=True)
class SectionsModule:
    bundle: BundleData
    N: int
    tower: SectionBasisTower
    generators: GeneratorSet
    embedding: tuple[ModuleVector, ...]
    presentation: Presentation
    minimal: Presentation
    presented_dims: tuple[int, ...]

    @property
    def certified_levels(self) -> int:
        return len(self.presented_dims)


def _span_basis(sections) -> tuple[Section, ...]:
    span = EchelonSpan()
    out = []
    for s in sections:
        if span.add(section_vector(s)):
            out.append(s)
    return tuple(out)


def section_tower(bundle: BundleData, N: int) -> SectionBasisTower:
    """Exact sections of u-degree at most ``N`` and their truncations.

    Truncations are complete up to ``top = N - deg_u(p)``: below that every
    liftable section on ``l_n`` has a lift of u-degree at most ``N``.
    """
    deg = bundle.p_u_degree
    exact = tuple(h0_sections(bundle, N + deg, max_u_degree=N))
    top = N - deg
    levels = tuple(_span_basis(truncate_section(s, n) for s in exact) for n in range(top + 1))
    raw = tuple(h0(bundle, n) for n in range(top + 1))
    return SectionBasisTower(N, top, exact, levels, raw)


def _m_span(tower: SectionBasisTower, n: int) -> EchelonSpan:
    """Span of ``x M + y M`` modulo ``u^(n+1)``."""
    span = EchelonSpan()
    if n == 0:
        return span
    for s in tower.levels[n - 1]:
        for t in (act_x(s), act_y(s)):
            span.add(section_vector(truncate_section(t, n)))
    return span


def choose_generators(tower: SectionBasisTower, n: int) -> GeneratorSet:
    """Minimal generators read off ``M / (m M + F^(n+1) M)``, lowest order first."""
    span = _m_span(tower, n)
    chosen, levels = [], []
    candidates = sorted(tower.exact_sections, key=lambda s: (section_order(s), min(section_vector(s))))
    for s in candidates:
        if span.add(section_vector(truncate_section(s, n))):
            chosen.append(s)
            levels.append(section_order(s))
    return GeneratorSet(tuple(chosen), tuple(levels))


CERT_PRIMES = (2_147_483_647, 2_147_483_629)


def _integer_columns(embedding) -> list[dict[tuple[int, int, int], int]]:
    cols = []
    for vec in embedding:
        terms = {(comp, a, b): c for comp, poly in enumerate(vec) for (a, b), c in poly.items()}
        den = lcm(*(c.denominator for c in terms.values())) if terms else 1
        cols.append({t: int(c * den) for t, c in terms.items()})
    return cols


def _rank_mod_p(rows: np.ndarray, prime: int) -> int:
    m = rows % prime
    rank = 0
    n_rows, n_cols = m.shape
    for col in range(n_cols):
        if rank == n_rows:
            break
        nz = np.nonzero(m[rank:, col])[0]
        if nz.size == 0:
            continue
        piv = rank + nz[0]
        if piv != rank:
            m[[rank, piv]] = m[[piv, rank]]
        inv = pow(int(m[rank, col]), prime - 2, prime)
        m[rank] = (m[rank] * inv) % prime
        below = np.nonzero(m[rank + 1 :, col])[0] + rank + 1
        if below.size:
            factors = m[below, col].reshape(-1, 1)
            m[below] = (m[below] - (factors * m[rank]) % prime) % prime
        rank += 1
    return rank


def _modular_image_dim(cols, t: int, prime: int) -> int:
    """Rank over F_p of ``(image + m^t) / m^t``; never more than the rank over Q."""
    index = {(c, a, d - a): i for i, (c, d, a) in enumerate((c, d, a) for c in range(2) for d in range(t) for a in range(d + 1))}
    rows = []
    for col in cols:
        order = min(a + b for _, a, b in col) if col else t
        for d in range(t - order):
            for a in range(d + 1):
                row = np.zeros(len(index), dtype=np.int64)
                for (c, ca, cb), v in col.items():
                    key = (c, ca + a, cb + d - a)
                    if key in index:
                        row[index[key]] = v % prime
                rows.append(row)
    if not rows:
        return 0
    return _rank_mod_p(np.array(rows), prime)


def presented_dimensions(bundle: BundleData, embedding, top: int, expected=None) -> tuple[int, ...]:
    """``dim M / F^(n+1) M`` for ``n <= top`` computed from the embedded generators.

    ``F^(n+1) M`` is the part of the image inside ``m^(n+1+j) R^2``, so the
    dimension is ``dim R^2/m^t - dim R^2/(image + m^t)`` with ``t = n + 1 + j``.

    When ``expected`` upper bounds are known (the Cech tower contains the
    span of the generators), a rank computed modulo a prime that reaches the
    bound is already exact, since reduction mod p can only lose rank.  Other
    levels fall back to a truncated Groebner basis over Q.
    """
    image = Presentation(2, tuple(embedding))
    cols = _integer_columns(embedding)
    dims = []
    for n in range(top + 1):
        t = n + 1 + bundle.j
        if expected is not None and _modular_image_dim(cols, t, CERT_PRIMES[0]) == expected[n]:
            dims.append(expected[n])
            continue
        dims.append(t * (t + 1) - truncated_dimension(image, t))
    return tuple(dims)


def _relations(embedding) -> tuple[Presentation, Presentation]:
    """Relations among the embedded generators, plus a locally minimal subset.

    Three generators have a single primitive syzygy.  With more, a local
    basis is picked from the syzygy generators and certified; it is minimal
    because the generators are.  Only when that search fails are the
    relations minimalised through second syzygies.
    """
    g = len(embedding)
    if g == 3:
        kernel = rank_two_kernel(embedding)
        if kernel is not None:
            P = Presentation(3, (kernel,))
            return P, P
    P = Presentation(g, tuple(module_syzygies(embedding, 2)))
    if g >= 3:
        basis = local_kernel_basis(embedding, P.relations)
        if basis is not None:
            return P, Presentation(g, basis)
    return P, minimalize_relations(P)


def build_sections_module(bundle: BundleData, N: int | None = None) -> SectionsModule:
    """Compute and certify a presentation of ``M``.

    The tower bound starts at ``2j + 2 + deg_u(p)`` and grows by ``j + 2``
    until certification passes, with a hard stop at ``8j + 8``.
    """
    j = bundle.j
    if N is None:
        N = 2 * j + 2 + bundle.p_u_degree
    hard_stop = max(8 * j + 8, N)
    failures = []
    while N <= hard_stop:
        tower = section_tower(bundle, N)
        top = tower.top
        gens = choose_generators(tower, top)
        # F^(top+1) M must already sit inside m M: the count may not change one level down
        if top >= 1 and len(choose_generators(tower, top - 1).sections) != len(gens.sections):
            failures.append(f"N={N}: generator count not stable")
            N += j + 2
            continue
        embedding = tuple(embed(bundle, s) for s in gens.sections)
        presented = presented_dimensions(bundle, embedding, top, expected=tower.dims())
        if presented != tower.dims():
            failures.append(f"N={N}: tower {tower.dims()} vs presented {presented}")
            N += j + 2
            continue
        presentation, minimal = _relations(embedding)
        return SectionsModule(
            bundle=bundle,
            N=N,
            tower=tower,
            generators=gens,
            embedding=embedding,
            presentation=presentation,
            minimal=minimal,
            presented_dims=presented,
        )
    raise CertificationFailure(f"presentation of M for {bundle} not certified: {'; '.join(failures)}")


def build_presentation(bundle: BundleData, N: int | None = None) -> Presentation:
    """A presentation of ``M``, minimal after localising at the origin."""
    return build_sections_module(bundle, N).minimal


@dataclass(frozen=True)
class QLength:
    value: int
    sections_N: int
    colength_m: int


def q_length(bundle: BundleData, N: int | None = None, m0: int | None = None, via: str = "auto") -> QLength:
    """``l(Q)`` with the truncation parameters that certified it.

    ``M^vv`` is free near the origin, so ``l(Q) = l(Ext^1(M, R))``.  When the
    minimal relations are ``gens - 2`` in number they form a basis of the local
    relation module and ``Ext^1`` is the cokernel of the transposed relation
    matrix, which is much cheaper than building the double dual.  ``via``
    selects ``"ext"``, ``"double-dual"`` or ``"auto"``.
    """
    module = build_sections_module(bundle, N)
    P = module.minimal
    if via not in ("auto", "ext", "double-dual"):
        raise ValueError(f"unknown method {via!r}")
    free_relations = len(P.relations) == P.gens - 2
    if via == "ext" and not free_relations:
        raise ValueError("relation count does not match rank; Ext route unavailable")
    if via == "double-dual" or not free_relations:
        coker = double_dual_map(P).cokernel()
    else:
        coker = transpose_cokernel(P)
    col = colength(coker, m0)
    return QLength(col.value, module.N, col.m)


def l_of_Q_for_bundle(bundle: BundleData) -> int:
    return q_length(bundle).value
