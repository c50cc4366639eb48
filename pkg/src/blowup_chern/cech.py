"""Cech cohomology of the bundle on the infinitesimal neighbourhoods of the exceptional line.

The neighbourhood ``l_n`` is cut out by ``u^(n+1)``.  With the two-chart cover
``{U, V}`` the Cech complex is ``C^0 = G(U) + G(V) -> C^1 = G(U cap V)``,

    d(s_U, s_V) = s_U - T^-1 s_V,

where ``T^-1 = [[z^-j, -p], [0, z^j]]`` (a global section satisfies
``s_V = T s_U``).  All spaces are infinite dimensional, so we work inside a
finite z-window ``[lo, hi]`` of the intersection:

* For ``H^1`` the matrix keeps every column whose image meets the window and
  projects images onto the window.  This is exact as long as every monomial
  outside the window is itself a coboundary, which holds for ``hi >= -1`` and
  ``lo <= -j``.
* For ``H^0`` only columns whose whole image lies inside the window are kept,
  and the kernel is taken on those.

Every reported number is recomputed with the window enlarged by 2 on both
sides; a mismatch raises :class:`CertificationFailure`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import CertificationFailure, NonStabilization
from .laurent import BiLaurentPoly, BundleData
from .linalg import SparseRatMatrix, _eliminate, kernel_basis, rank

Row = tuple[int, int, int]  # (component, i, k)
Section = tuple[BiLaurentPoly, BiLaurentPoly]

CERT_PAD = 2


@dataclass(frozen=True)
class CochainBasis:
    """Enumerated basis of the windowed 1-cochains at level ``n``."""

    n: int
    window: tuple[int, int]
    rows: tuple[Row, ...] = field(repr=False)

    @classmethod
    def build(cls, n: int, window: tuple[int, int]) -> "CochainBasis":
        lo, hi = window
        rows = tuple((c, i, k) for c in (0, 1) for i in range(n + 1) for k in range(lo, hi + 1))
        return cls(n, window, rows)

    def index(self) -> dict[Row, int]:
        return {r: idx for idx, r in enumerate(self.rows)}

    def __len__(self) -> int:
        return len(self.rows)


@dataclass(frozen=True)
class CoboundaryData:
    """Windowed matrix of ``d`` with column descriptors.

    Columns are ``("U", comp, i, k)`` or ``("V", comp, i, k)``; the V-chart
    basis vectors are written in U-coordinates, so ``k <= i`` for them.
    ``complete[c]`` says whether the unprojected image of column ``c`` lies
    inside the window.
    """

    basis: CochainBasis
    matrix: SparseRatMatrix
    columns: tuple[tuple[str, int, int, int], ...]
    complete: tuple[bool, ...]


@dataclass(frozen=True)
class ProfileRow:
    n: int
    h0: int
    h1: int
    ker_restriction_dim: int | None


@dataclass(frozen=True)
class LimitResult:
    value: int
    stabilized_at: int
    horizon: int
    window_certificate: tuple[tuple[int, int], tuple[int, int], bool]
    h1_sequence: tuple[int, ...]
    image_dims: tuple[int, ...]

    @property
    def certified(self) -> bool:
        return self.window_certificate[2]


def default_window(bundle: BundleData, n: int) -> tuple[int, int]:
    """z-window for level ``n``.

    The padded analytic support ``+-(j + n + span_z(p) + 2)``, widened if the
    images of the transition matrix need more room.
    """
    j, p = bundle.j, bundle.p
    pad = j + n + p.z_span() + 2
    zr = p.z_range()
    l_min = zr[0] if zr else 0
    lo = min(-pad, min(-j, l_min - j) - 1)
    hi = max(pad, n + j + 1)
    return (lo, hi)


def enlarge(window: tuple[int, int], by: int = CERT_PAD) -> tuple[int, int]:
    return (window[0] - by, window[1] + by)


def _v_image(bundle: BundleData, comp: int, i: int, k: int, n: int) -> dict[Row, Fraction]:
    """``-T^-1`` applied to the V-chart basis vector ``z^k u^i`` in slot ``comp``, mod u^(n+1)."""
    j = bundle.j
    if comp == 0:
        return {(0, i, k - j): Fraction(-1)}
    out: dict[Row, Fraction] = {(1, i, k + j): Fraction(-1)}
    for (l, ip), c in bundle.p.items():
        if i + ip <= n:
            out[(0, i + ip, k + l)] = out.get((0, i + ip, k + l), 0) + c
    return {r: v for r, v in out.items() if v}


def coboundary_matrix(bundle: BundleData, n: int, window: tuple[int, int] | None = None) -> CoboundaryData:
    """Matrix of ``d`` at level ``n`` restricted to the window."""
    if n < 0:
        raise ValueError("level must be non-negative")
    if window is None:
        window = default_window(bundle, n)
    lo, hi = window
    if hi < -1 or lo > -bundle.j:
        raise ValueError(f"window {window} too small for an exact H^1 computation")
    basis = CochainBasis.build(n, window)
    index = basis.index()
    j = bundle.j
    zr = bundle.p.z_range() or (0, 0)
    reach = max(j, abs(zr[0]), abs(zr[1])) + 1

    columns: list[tuple[str, int, int, int]] = []
    col_data: list[dict[int, Fraction]] = []
    complete: list[bool] = []
    for comp in (0, 1):
        for i in range(n + 1):
            for k in range(max(lo, 0), hi + 1):
                columns.append(("U", comp, i, k))
                col_data.append({index[(comp, i, k)]: Fraction(1)})
                complete.append(True)
    for comp in (0, 1):
        for i in range(n + 1):
            for k in range(lo - reach, i + 1):
                image = _v_image(bundle, comp, i, k, n)
                proj = {index[r]: v for r, v in image.items() if r in index}
                if not proj:
                    continue
                columns.append(("V", comp, i, k))
                col_data.append(proj)
                complete.append(len(proj) == len(image))
    matrix = SparseRatMatrix.from_columns(len(basis), col_data)
    return CoboundaryData(basis, matrix, tuple(columns), tuple(complete))


def _h1_value(bundle: BundleData, n: int, window: tuple[int, int]) -> int:
    data = coboundary_matrix(bundle, n, window)
    return len(data.basis) - rank(data.matrix)


def _complete_submatrix(data: CoboundaryData, keep=None) -> tuple[SparseRatMatrix, list[int]]:
    cols = [
        c for c, ok in enumerate(data.complete) if ok and (keep is None or keep(data.columns[c]))
    ]
    position = {c: idx for idx, c in enumerate(cols)}
    entries = {(r, position[c]): v for (r, c), v in data.matrix.entries().items() if c in position}
    return SparseRatMatrix(data.matrix.rows, len(cols), entries), cols


def _h0_value(bundle: BundleData, n: int, window: tuple[int, int]) -> int:
    sub, cols = _complete_submatrix(coboundary_matrix(bundle, n, window))
    return len(cols) - rank(sub)


def _certify(name: str, bundle: BundleData, n: int, fn, window: tuple[int, int] | None) -> int:
    if window is None:
        window = default_window(bundle, n)
    value = fn(bundle, n, window)
    check = fn(bundle, n, enlarge(window))
    if value != check:
        raise CertificationFailure(
            f"{name} for {bundle} at n={n}: window {window} gives {value}, "
            f"enlarged window gives {check}"
        )
    return value


def h1(bundle: BundleData, n: int, window: tuple[int, int] | None = None) -> int:
    """``dim H^1(l_n, V|l_n)``, certified against an enlarged window."""
    return _certify("h1", bundle, n, _h1_value, window)


def h0(bundle: BundleData, n: int, window: tuple[int, int] | None = None) -> int:
    """``dim H^0(l_n, V|l_n)``, certified against an enlarged window."""
    return _certify("h0", bundle, n, _h0_value, window)


def _truncation_columns(basis_from: CochainBasis, index_to: dict[Row, int]) -> list[dict[int, Fraction]]:
    return [{index_to[r]: Fraction(1)} for r in basis_from.rows if r in index_to]


def _image_value(bundle: BundleData, m: int, n: int, window: tuple[int, int]) -> int:
    """``dim Im(H^1(l_m) -> H^1(l_n))`` for ``m >= n`` on a common window."""
    target = coboundary_matrix(bundle, n, window)
    source = CochainBasis.build(m, window)
    trunc = SparseRatMatrix.from_columns(len(target.basis), _truncation_columns(source, target.basis.index()))
    return rank(target.matrix.hstack(trunc)) - rank(target.matrix)


def image_dim(bundle: BundleData, m: int, n: int, window: tuple[int, int] | None = None) -> int:
    """Dimension of the image of restriction ``H^1(l_m) -> H^1(l_n)``, certified."""
    if m < n:
        raise ValueError("restriction goes from a higher level to a lower one")
    if window is None:
        window = default_window(bundle, m)
    value = _image_value(bundle, m, n, window)
    check = _image_value(bundle, m, n, enlarge(window))
    if value != check:
        raise CertificationFailure(f"image dimension for {bundle} ({m} -> {n}) not window stable")
    return value


def _kernel_value(bundle: BundleData, n: int, window: tuple[int, int]) -> int:
    upper = coboundary_matrix(bundle, n, window)
    lower = coboundary_matrix(bundle, n - 1, window)
    trunc = SparseRatMatrix.from_columns(len(lower.basis), _truncation_columns(upper.basis, lower.basis.index()))
    rank_lower = rank(lower.matrix)
    # classes at level n whose truncation is a coboundary at level n-1
    preimage = len(upper.basis) - (rank(lower.matrix.hstack(trunc)) - rank_lower)
    return preimage - rank(upper.matrix)


def restriction_kernel_dim(bundle: BundleData, n: int, window: tuple[int, int] | None = None) -> int:
    """``dim Ker(H^1(l_n) -> H^1(l_{n-1}))`` for ``n >= 1``."""
    if n < 1:
        raise ValueError("restriction kernel needs n >= 1")
    return _certify("restriction kernel", bundle, n, _kernel_value, window)


def profile(bundle: BundleData, n_stop: int) -> list[ProfileRow]:
    """h0, h1 and restriction-kernel dimensions for ``n = 0 .. n_stop``."""
    rows = []
    for n in range(n_stop + 1):
        rows.append(
            ProfileRow(
                n=n,
                h0=h0(bundle, n),
                h1=h1(bundle, n),
                ker_restriction_dim=restriction_kernel_dim(bundle, n) if n >= 1 else None,
            )
        )
    return rows


def r1_length(bundle: BundleData) -> LimitResult:
    """Length of ``R^1 pi_* V`` as the dimension of the inverse limit of ``H^1(l_n)``.

    Runs ``n = 0, 1, ...`` until h1 has been constant for ``j + 2`` consecutive
    levels and ``n >= 2j + deg_u(p)``.  The limit of an inverse system of
    finite-dimensional spaces has the dimension of the stable image, which is
    computed explicitly from the top level down to the first stable level.
    """
    j = bundle.j
    run = j + 2
    min_horizon = 2 * j + bundle.p_u_degree
    hard_stop = 8 * j + 8
    seq: list[int] = []
    n = 0
    while True:
        seq.append(h1(bundle, n))
        if n >= min_horizon and len(seq) >= run and len(set(seq[-run:])) == 1:
            break
        if n >= hard_stop:
            raise NonStabilization(f"h1 for {bundle} not stable by n={hard_stop}: {seq}")
        n += 1
    top = n
    stable = top
    while stable > 0 and seq[stable - 1] == seq[top]:
        stable -= 1
    window = default_window(bundle, top)
    images = tuple(_image_value(bundle, top, m, window) for m in range(stable, top + 1))
    enlarged = enlarge(window)
    check = _image_value(bundle, top, stable, enlarged)
    value = images[0]
    equal = check == value
    if not equal:
        raise CertificationFailure(f"inverse limit for {bundle} changes with the window")
    if any(d != value for d in images):
        raise NonStabilization(f"image dimensions for {bundle} not constant past n={stable}: {images}")
    return LimitResult(
        value=value,
        stabilized_at=stable,
        horizon=top,
        window_certificate=(window, enlarged, equal),
        h1_sequence=tuple(seq),
        image_dims=images,
    )


# ---------------------------------------------------------------------------
# global sections


def _section_order_key(col: tuple[str, int, int, int]) -> tuple[int, int, int]:
    _, comp, i, k = col
    return (i, comp, k)


def h0_sections(
    bundle: BundleData,
    n: int,
    max_u_degree: int | None = None,
    window: tuple[int, int] | None = None,
) -> list[Section]:
    """Basis of ``H^0(l_n, V|l_n)`` as pairs ``(a, b)`` in U-coordinates.

    With ``max_u_degree = D`` only U-parts of u-degree at most ``D`` are
    allowed.  When ``n >= D + deg_u(p)`` these are exactly the polynomial
    sections of the bundle of u-degree at most ``D`` (no truncation occurs).

    The basis is in reduced echelon form for the order ``(i, component, k)``
    on the lowest monomial, so each element has a distinct leading monomial.
    """
    if window is None:
        window = default_window(bundle, n)
    data = coboundary_matrix(bundle, n, window)
    keep = None
    if max_u_degree is not None:
        keep = lambda col: col[0] == "V" or col[2] <= max_u_degree  # noqa: E731
    sub, cols = _complete_submatrix(data, keep)
    kernel = kernel_basis(sub)
    u_cols = [(pos, data.columns[c]) for pos, c in enumerate(cols) if data.columns[c][0] == "U"]
    u_cols.sort(key=lambda t: _section_order_key(t[1]))
    order = {pos: rank_ for rank_, (pos, _) in enumerate(u_cols)}
    descr = [col for _, col in u_cols]
    vectors = []
    for vec in kernel:
        sparse = {order[pos]: v for pos, v in enumerate(vec) if v and pos in order}
        if sparse:
            vectors.append(sparse)
    pivots = _eliminate(vectors, len(descr))
    reduced = _reduce_echelon(pivots)
    sections = []
    for _, row in sorted(reduced, key=lambda t: t[0]):
        a: dict[tuple[int, int], Fraction] = {}
        b: dict[tuple[int, int], Fraction] = {}
        for idx, v in row.items():
            _, comp, i, k = descr[idx]
            (a if comp == 0 else b)[(k, i)] = v
        sections.append((BiLaurentPoly(a), BiLaurentPoly(b)))
    return sections


def _reduce_echelon(pivots: list[tuple[int, dict[int, Fraction]]]) -> list[tuple[int, dict[int, Fraction]]]:
    """Turn pivot rows into reduced echelon form keyed by their smallest column."""
    rows = [dict(r) for _, r in pivots]
    # re-pivot on the smallest column of each row so leading terms are lowest monomials
    out: list[tuple[int, dict[int, Fraction]]] = []
    remaining = rows
    while remaining:
        remaining = [r for r in remaining if r]
        if not remaining:
            break
        remaining.sort(key=lambda r: min(r))
        row = remaining.pop(0)
        lead = min(row)
        inv = 1 / row[lead]
        row = {k: v * inv for k, v in row.items()}
        for other in remaining:
            f = other.get(lead)
            if f:
                for k, v in row.items():
                    nv = other.get(k, 0) - f * v
                    if nv:
                        other[k] = nv
                    else:
                        other.pop(k, None)
        out.append((lead, row))
    # back-reduce so no row contains another row's leading column
    out.sort(key=lambda t: t[0], reverse=True)
    for idx, (lead, row) in enumerate(out):
        for lead2, row2 in out[:idx]:
            f = row.get(lead2)
            if f:
                for k, v in row2.items():
                    nv = row.get(k, 0) - f * v
                    if nv:
                        row[k] = nv
                    else:
                        row.pop(k, None)
    return out


def is_section(bundle: BundleData, a: BiLaurentPoly, b: BiLaurentPoly, n: int | None = None) -> bool:
    """Whether ``(a, b)`` is a section (on ``l_n`` if ``n`` is given, else exactly)."""
    va, vb = bundle.to_v(a, b)
    if n is not None:
        a, b, va, vb = (s.truncate_u(n) for s in (a, b, va, vb))
    return a.is_u_holomorphic() and b.is_u_holomorphic() and va.is_v_holomorphic() and vb.is_v_holomorphic()
