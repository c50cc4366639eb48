"""Buchberger's algorithm for submodules of Q[x, y]^r.

Vectors are sparse dicts ``{(component, a, b): coefficient}`` meaning
``coefficient * x^a y^b * e_component``.  Internally every vector is kept as a
content-free integer vector (fraction-free reduction), which is much cheaper
than rational arithmetic and does not change the submodule.

Term orders are position-over-term: a smaller component index is a larger
term, and inside a component monomials are compared by ``order``.

With ``truncate=m`` the computation takes place modulo ``m^m * R^r`` where
``m = (x, y)``: terms of total degree ``>= m`` are dropped.  The result is a
Groebner basis of ``submodule + m^m R^r`` (the monomial generators are
implicit), so the quotient is finite dimensional and can be counted.
"""

from __future__ import annotations

import heapq
from fractions import Fraction
from math import gcd
from typing import Callable, Iterable, Mapping

Term = tuple[int, int, int]  # (component, a, b)
IntVec = dict[Term, int]

ORDERS = ("grevlex", "grlex", "lex")


def monomial_key(order: str) -> Callable[[int, int], tuple]:
    if order == "grevlex":
        # with two variables x > y: degree first, then the smaller y-exponent wins
        return lambda a, b: (a + b, -b)
    if order == "grlex":
        return lambda a, b: (a + b, a)
    if order == "lex":
        return lambda a, b: (a, b)
    raise ValueError(f"unknown term order {order!r}; choose from {ORDERS}")


def term_key(order: str) -> Callable[[Term], tuple]:
    mk = monomial_key(order)
    return lambda t: (-t[0], *mk(t[1], t[2]))


def to_int_vector(vec: Mapping[Term, object]) -> tuple[IntVec, Fraction]:
    """Clear denominators and content.  Returns ``(v, s)`` with ``v = s * vec``."""
    fr = {t: Fraction(c) for t, c in vec.items() if c}
    if not fr:
        return {}, Fraction(1)
    den = 1
    for c in fr.values():
        den = den * c.denominator // gcd(den, c.denominator)
    ints = {t: int(c * den) for t, c in fr.items()}
    g = 0
    for c in ints.values():
        g = gcd(g, c)
    return {t: c // g for t, c in ints.items()}, Fraction(den, g)


def _primitive(vec: IntVec) -> tuple[IntVec, int]:
    g = 0
    for c in vec.values():
        g = gcd(g, c)
        if g == 1:
            return vec, 1
    if g in (0, 1):
        return vec, 1
    return {t: c // g for t, c in vec.items()}, g


class GroebnerBasis:
    """A Groebner basis together with its reduction machinery."""

    def __init__(self, rank: int, order: str = "grevlex", truncate: int | None = None):
        self.rank = rank
        self.order = order
        self.truncate = truncate
        self._key = term_key(order)
        self.elements: list[IntVec] = []
        self.leads: list[Term] = []
        self._by_comp: dict[int, list[int]] = {}

    # -- basic helpers
    def lead(self, vec: IntVec) -> Term:
        return max(vec, key=self._key)

    def _trunc(self, vec: IntVec) -> IntVec:
        m = self.truncate
        if m is None:
            return vec
        return {t: c for t, c in vec.items() if t[1] + t[2] < m}

    def _divisor(self, t: Term) -> int | None:
        c, a, b = t
        for idx in self._by_comp.get(c, ()):
            _, la, lb = self.leads[idx]
            if la <= a and lb <= b:
                return idx
        return None

    def _append(self, vec: IntVec) -> int:
        vec, _ = _primitive(vec)
        lt = self.lead(vec)
        if vec[lt] < 0:
            vec = {t: -c for t, c in vec.items()}
        self.elements.append(vec)
        self.leads.append(lt)
        self._by_comp.setdefault(lt[0], []).append(len(self.elements) - 1)
        return len(self.elements) - 1

    def reduce(self, vec: Mapping[Term, object], full: bool = True) -> tuple[dict[Term, Fraction], Fraction]:
        """Normal form of ``vec``.

        Returns ``(r, s)`` with ``s * vec - r`` in the submodule; ``r`` has no
        term divisible by a leading term (only the leading term if ``full`` is
        false).
        """
        f, s0 = to_int_vector(vec)
        r, s = self._reduce_int(self._trunc(f), full)
        scale = s0 * s
        return {t: Fraction(c) for t, c in r.items()}, scale

    def _reduce_int(self, f: IntVec, full: bool = True) -> tuple[IntVec, Fraction]:
        key = self._key
        m = self.truncate
        f = dict(f)
        # f is only ever rescaled as a whole; a finished term remembers the scale
        # it was finished at and is brought to the final scale at the end
        finished: list[tuple[Term, int, Fraction]] = []
        scale = Fraction(1)
        elements, leads = self.elements, self.leads
        # max-heap of the terms of f with lazy deletion
        heap = [(tuple(-x for x in key(t)), t) for t in f]
        heapq.heapify(heap)
        while f:
            _, t = heapq.heappop(heap)
            if t not in f:
                continue
            idx = self._divisor(t)
            if idx is None:
                if not full:
                    finished.extend((k, v, scale) for k, v in f.items())
                    break
                finished.append((t, f.pop(t), scale))
                continue
            g = elements[idx]
            lt = leads[idx]
            cg = g[lt]
            cf = f[t]
            d = gcd(cf, cg)
            mf, mg = cg // d, cf // d  # f <- mf * f - mg * shift * g
            da, db = t[1] - lt[1], t[2] - lt[2]
            if mf != 1:
                f = {k: v * mf for k, v in f.items()}
                scale *= mf
            for (c, a, b), v in g.items():
                nt = (c, a + da, b + db)
                if m is not None and a + da + b + db >= m:
                    continue
                old = f.get(nt, 0)
                nv = old - mg * v
                if nv:
                    if not old:
                        heapq.heappush(heap, (tuple(-x for x in key(nt)), nt))
                    f[nt] = nv
                else:
                    f.pop(nt, None)
            if len(f) > 4:
                cont = 0
                for v in f.values():
                    cont = gcd(cont, v)
                    if cont == 1:
                        break
                if cont > 1:
                    f = {k: v // cont for k, v in f.items()}
                    scale /= cont
        if not finished:
            return {}, scale
        fr = {k: Fraction(v) * (scale / s) for k, v, s in finished}
        den = 1
        for c in fr.values():
            den = den * c.denominator // gcd(den, c.denominator)
        out = {k: int(c * den) for k, c in fr.items()}
        out, g = _primitive(out)
        return out, scale * den / g

    def contains(self, vec: Mapping[Term, object]) -> bool:
        r, _ = self.reduce(vec, full=False)
        return not r

    def standard_monomials(self) -> list[Term]:
        """Terms not divisible by a leading term; needs a truncated basis."""
        if self.truncate is None:
            raise ValueError("standard monomials are only finite for a truncated basis")
        out = []
        for c in range(self.rank):
            for d in range(self.truncate):
                for a in range(d, -1, -1):
                    t = (c, a, d - a)
                    if self._divisor(t) is None:
                        out.append(t)
        return out

    def quotient_dimension(self) -> int:
        return len(self.standard_monomials())

    def as_fraction_vectors(self) -> list[dict[Term, Fraction]]:
        return [{t: Fraction(c) for t, c in e.items()} for e in self.elements]

    def s_polynomial(self, i: int, j: int) -> IntVec:
        """S-vector of two basis elements with leading terms in one component."""
        gi, gj = self.elements[i], self.elements[j]
        (ci, ai, bi), (cj, aj, bj) = self.leads[i], self.leads[j]
        if ci != cj:
            return {}
        la, lb = max(ai, aj), max(bi, bj)
        li, lj = gi[self.leads[i]], gj[self.leads[j]]
        d = gcd(li, lj)
        out: IntVec = {}
        for vec, sa, sb, mult in ((gi, la - ai, lb - bi, lj // d), (gj, la - aj, lb - bj, -(li // d))):
            for (c, a, b), v in vec.items():
                nt = (c, a + sa, b + sb)
                nv = out.get(nt, 0) + mult * v
                if nv:
                    out[nt] = nv
                else:
                    out.pop(nt, None)
        return self._trunc(out)


def groebner(
    columns: Iterable[Mapping[Term, object]],
    rank: int,
    order: str = "grevlex",
    truncate: int | None = None,
    reduced: bool = True,
    track_from: int | None = None,
) -> GroebnerBasis:
    """Groebner basis of the submodule of ``R^rank`` spanned by ``columns``.

    Pairs are processed with the normal selection strategy (smallest lcm
    first).  With ``truncate`` set, every element also pairs with the implicit
    monomial generators of ``m^truncate R^rank``.

    With ``track_from`` set, components from that index on only record how
    elements were built: a remainder whose leading term lands there is kept in
    ``gb.tracked`` instead of joining the basis, and forms no pairs.  The basis
    is then a Groebner basis of the projection to the first components.
    """
    gb = GroebnerBasis(rank, order, truncate)
    gb.tracked = []

    def add(r: IntVec) -> None:
        if track_from is not None and gb.lead(r)[0] >= track_from:
            gb.tracked.append(_primitive(r)[0])
        else:
            push_pairs(gb._append(r))

    mk = monomial_key(order)
    heap: list[tuple] = []
    counter = 0

    def push_pairs(new: int) -> None:
        nonlocal counter
        c, a, b = gb.leads[new]
        for old in gb._by_comp.get(c, ()):
            if old == new:
                continue
            _, a2, b2 = gb.leads[old]
            la, lb = max(a, a2), max(b, b2)
            if truncate is not None and la + lb >= truncate:
                continue
            heapq.heappush(heap, (la + lb, mk(la, lb), counter, "pair", old, new))
            counter += 1
        if truncate is not None:
            deg = a + b
            need = truncate - deg
            for s in range(need + 1):
                heapq.heappush(heap, (truncate, mk(a + s, b + need - s), counter, "trunc", new, (s, need - s)))
                counter += 1

    for col in columns:
        vec, _ = to_int_vector({t: c for t, c in col.items()})
        if any(not (0 <= t[0] < rank) or t[1] < 0 or t[2] < 0 for t in vec):
            raise ValueError("vector term outside the free module")
        vec = gb._trunc(vec)
        r, _ = gb._reduce_int(vec, full=False)
        if r:
            add(r)

    while heap:
        _, _, _, kind, i, j = heapq.heappop(heap)
        if kind == "pair":
            s = gb.s_polynomial(i, j)
        else:
            sa, sb = j
            s = gb._trunc({(c, a + sa, b + sb): v for (c, a, b), v in gb.elements[i].items()})
        if not s:
            continue
        r, _ = gb._reduce_int(s, full=False)
        if r:
            add(r)

    if reduced:
        _interreduce(gb)
    return gb


def _interreduce(gb: GroebnerBasis) -> None:
    """Drop redundant elements and tail-reduce the rest."""
    keep = []
    for idx, lt in enumerate(gb.leads):
        c, a, b = lt
        redundant = False
        for jdx, lt2 in enumerate(gb.leads):
            if jdx == idx or lt2[0] != c:
                continue
            if lt2[1] <= a and lt2[2] <= b and (lt2 != lt or jdx < idx):
                redundant = True
                break
        if not redundant:
            keep.append(idx)
    elements = [gb.elements[i] for i in keep]
    gb.elements, gb.leads, gb._by_comp = [], [], {}
    for e in elements:
        gb._append(e)
    for idx in range(len(gb.elements)):
        e = gb.elements[idx]
        lt = gb.leads[idx]
        tail = {t: v for t, v in e.items() if t != lt}
        # reduce the tail against the other elements only
        saved = gb._by_comp[lt[0]]
        gb._by_comp[lt[0]] = [k for k in saved if k != idx]
        r, s = gb._reduce_int(tail, full=True)
        gb._by_comp[lt[0]] = saved
        lead_coeff = e[lt] * s
        new = {t: Fraction(v) for t, v in r.items()}
        new[lt] = Fraction(lead_coeff)
        vec, _ = to_int_vector(new)
        if vec[lt] < 0:
            vec = {t: -v for t, v in vec.items()}
        gb.elements[idx] = vec


def syzygies(columns: list[Mapping[Term, object]], rank: int, order: str = "grevlex") -> list[dict[int, dict[tuple[int, int], Fraction]]]:
    """Generators of the syzygy module of ``columns`` (vectors in ``R^rank``).

    Schreyer's construction on the augmented module ``(f_i, e_i)`` in
    ``R^(rank + s)``, original components first: every input and S-pair whose
    original part reduces to zero leaves its trace in the ``e`` components,
    and these traces generate the syzygies.  No basis of the syzygy module
    itself is computed, so the set is usually not minimal.  Each syzygy is
    returned as ``{column_index: {(a, b): coefficient}}``.
    """
    s = len(columns)
    aug = []
    for idx, col in enumerate(columns):
        vec = {t: c for t, c in col.items() if c}
        vec[(rank + idx, 0, 0)] = 1
        aug.append(vec)
    gb = groebner(aug, rank + s, order, reduced=False, track_from=rank)
    out = []
    seen = set()
    for e in gb.tracked:
        frozen = frozenset(e.items())
        if frozen in seen:
            continue
        seen.add(frozen)
        syz: dict[int, dict[tuple[int, int], Fraction]] = {}
        for (c, a, b), v in e.items():
            syz.setdefault(c - rank, {})[(a, b)] = Fraction(v)
        out.append(syz)
    return out


class Lifter:
    """Expresses members of a submodule in terms of its generating columns."""

    def __init__(self, columns: list[Mapping[Term, object]], rank: int, order: str = "grevlex"):
        self.rank = rank
        self.count = len(columns)
        aug = []
        for idx, col in enumerate(columns):
            vec = {t: c for t, c in col.items() if c}
            vec[(rank + idx, 0, 0)] = 1
            aug.append(vec)
        self.gb = groebner(aug, rank + len(columns), order, reduced=False, track_from=rank)

    def lift(self, vec: Mapping[Term, object]) -> dict[int, dict[tuple[int, int], Fraction]] | None:
        """Coefficients ``c`` with ``sum_i c_i * column_i = vec``, or None."""
        rem, scale = self.gb.reduce(vec, full=True)
        if any(t[0] < self.rank for t in rem):
            return None
        out: dict[int, dict[tuple[int, int], Fraction]] = {}
        for (c, a, b), v in rem.items():
            out.setdefault(c - self.rank, {})[(a, b)] = -v / scale
        return out
