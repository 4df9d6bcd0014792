"""Cohomological functionals on a finite double complex.

Everything reduces to exact ranks and kernels: Dolbeault and del cohomology,
Bott-Chern and Aeppli, de Rham of the total complex, the pages of the
spectral sequence of the column filtration, the degeneration and ddbar-lemma
predicates, and harmonic spaces of the declared-orthonormal basis.
All operations are pure; a DoubleComplex is never mutated.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from ddbar.bicomplex import Bidegree, ComplexValidationError, DoubleComplex
from ddbar.linalg import (
    ExactMatrix,
    IncrementalSpan,
    Vec,
    subspace_dim_intersection,
    subspace_dim_sum,
    vec_add_scaled,
)
from ddbar.scalars import ONE, GaussianRational

THEORIES = ("dolbeault", "del", "bott-chern", "aeppli", "de-rham", "frolicher")


@dataclass
class CohomologyTable:
    """Dimensions (and optional representatives) per bidegree or total degree."""

    theory: str
    dims: Dict
    representatives: Optional[Dict] = None

    def dim(self, key) -> int:
        return self.dims.get(key, 0)

    def sum_along_antidiagonal(self, k: int) -> int:
        return sum(v for (p, q), v in self.dims.items() if p + q == k)


def _quotient_table(
    c: DoubleComplex, theory: str, kernel_of, image_of
) -> CohomologyTable:
    """ker/im dims with representatives chosen as the first independent
    kernel vectors extending the image, under the fixed basis order."""
    dims: Dict[Bidegree, int] = {}
    reps: Dict[Bidegree, List[Vec]] = {}
    for p, q in c.bidegrees():
        if not c.dim(p, q):
            dims[(p, q)] = 0
            continue
        span = IncrementalSpan()
        for v in image_of(p, q):
            span.insert(v)
        chosen = []
        for v in kernel_of(p, q):
            fresh, _ = span.insert(v)
            if fresh:
                chosen.append(v)
        dims[(p, q)] = len(chosen)
        reps[(p, q)] = chosen
    return CohomologyTable(theory, dims, reps)


def dolbeault(c: DoubleComplex) -> CohomologyTable:
    """ker delbar / im delbar at each bidegree."""
    return _quotient_table(
        c,
        "dolbeault",
        lambda p, q: c.delbar(p, q).kernel_basis(),
        lambda p, q: c.delbar(p, q - 1).columns if q > 0 else [],
    )


def del_cohomology(c: DoubleComplex) -> CohomologyTable:
    """ker del / im del; the conjugate-side mirror of dolbeault."""
    return _quotient_table(
        c,
        "del",
        lambda p, q: c.del_(p, q).kernel_basis(),
        lambda p, q: c.del_(p - 1, q).columns if p > 0 else [],
    )


def bott_chern(c: DoubleComplex) -> CohomologyTable:
    """(ker del int ker delbar) / im del delbar."""
    dims: Dict[Bidegree, int] = {}
    reps: Dict[Bidegree, List[Vec]] = {}
    for p, q in c.bidegrees():
        if not c.dim(p, q):
            dims[(p, q)] = 0
            continue
        ker_del = c.del_(p, q).kernel_basis()
        ker_delbar = c.delbar(p, q).kernel_basis()
        inter_dim = subspace_dim_intersection(ker_del, ker_delbar)
        # the intersection itself is the kernel of the stacked matrix
        stacked = ExactMatrix.vstack([c.del_(p, q), c.delbar(p, q)])
        inter_basis = stacked.kernel_basis()
        assert len(inter_basis) == inter_dim
        image: List[Vec] = []
        if p > 0 and q > 0:
            dd = c.del_(p - 1, q).matmul(c.delbar(p - 1, q - 1))
            image = [col for col in dd.columns if col]
            for v in image:
                assert not c.del_(p, q).apply(v) and not c.delbar(p, q).apply(v), (
                    "im del delbar not contained in ker del int ker delbar"
                )
        span = IncrementalSpan()
        for v in image:
            span.insert(v)
        rank_image = span.dim
        chosen = []
        for v in inter_basis:
            fresh, _ = span.insert(v)
            if fresh:
                chosen.append(v)
        assert len(chosen) == inter_dim - rank_image
        dims[(p, q)] = len(chosen)
        reps[(p, q)] = chosen
    return CohomologyTable("bott-chern", dims, reps)


def aeppli(c: DoubleComplex) -> CohomologyTable:
    """ker del delbar / (im del + im delbar)."""
    dims: Dict[Bidegree, int] = {}
    reps: Dict[Bidegree, List[Vec]] = {}
    for p, q in c.bidegrees():
        if not c.dim(p, q):
            dims[(p, q)] = 0
            continue
        dd = c.del_(p, q + 1).matmul(c.delbar(p, q))
        kernel = dd.kernel_basis()
        im_del = [col for col in c.del_(p - 1, q).columns if col] if p > 0 else []
        im_delbar = [col for col in c.delbar(p, q - 1).columns if col] if q > 0 else []
        for v in im_del + im_delbar:
            assert not dd.apply(v), "im del + im delbar not contained in ker del delbar"
        span = IncrementalSpan()
        for v in im_del:
            span.insert(v)
        for v in im_delbar:
            span.insert(v)
        assert span.dim == subspace_dim_sum(im_del, im_delbar)
        chosen = []
        for v in kernel:
            fresh, _ = span.insert(v)
            if fresh:
                chosen.append(v)
        dims[(p, q)] = len(chosen)
        reps[(p, q)] = chosen
    return CohomologyTable("aeppli", dims, reps)


class _TotalComplex:
    """d = del + delbar on A^k = sum of A^{p,q} with p + q = k."""

    def __init__(self, c: DoubleComplex):
        self.c = c
        self.blocks: Dict[int, List[Bidegree]] = {}
        self.offsets: Dict[Bidegree, int] = {}
        for k in range(2 * c.n + 1):
            blocks = [(p, k - p) for p in range(k + 1) if c.dim(p, k - p)]
            self.blocks[k] = blocks
            offset = 0
            for pq in blocks:
                self.offsets[pq] = offset
                offset += c.dim(*pq)

    def dim(self, k: int) -> int:
        return sum(self.c.dim(*pq) for pq in self.blocks.get(k, []))

    def d_matrix(self, k: int) -> ExactMatrix:
        rows = self.dim(k + 1)
        cols = self.dim(k)
        out = ExactMatrix.zeros(rows, cols)
        for p, q in self.blocks.get(k, []):
            col0 = self.offsets[(p, q)]
            for mat, target in (
                (self.c.del_(p, q), (p + 1, q)),
                (self.c.delbar(p, q), (p, q + 1)),
            ):
                if not self.c.dim(*target):
                    continue
                row0 = self.offsets[target]
                for j, col in enumerate(mat.columns):
                    for r, x in col.items():
                        out.columns[col0 + j][row0 + r] = x
        return out


def de_rham(c: DoubleComplex) -> CohomologyTable:
    """Betti numbers of the total complex, by total degree."""
    total = _TotalComplex(c)
    dims: Dict[int, int] = {}
    prev_rank = 0
    for k in range(2 * c.n + 2):
        n_k = total.dim(k)
        if n_k == 0:
            dims[k] = 0
            prev_rank = 0
            continue
        d_k = total.d_matrix(k)
        rank_k = d_k.rank()
        dims[k] = n_k - rank_k - prev_rank
        prev_rank = rank_k
    return CohomologyTable("de-rham", {k: v for k, v in dims.items() if k <= 2 * c.n})


def _zigzag_projection(
    c: DoubleComplex, start: Bidegree, length: int, project_on: str
) -> List[Vec]:
    """Basis of a projection of the solution space of the staircase system

        delbar x_0 = 0,  del x_i + delbar x_{i+1} = 0   (i = 0..length-2)

    with x_i in A^{start + i*(1,-1)}.  project_on selects 'first' (x_0) or
    'last' (x_{length-1}).
    """
    chain = [(start[0] + i, start[1] - i) for i in range(length)]
    sizes = [c.dim(*pq) for pq in chain]
    offsets = [0]
    for s in sizes:
        offsets.append(offsets[-1] + s)
    n_unknowns = offsets[-1]
    if n_unknowns == 0:
        return []

    rows_offset = 0
    entries: Dict[Tuple[int, int], GaussianRational] = {}

    def put_block(mat: ExactMatrix, row0: int, col0: int, negate=False):
        for j, col in enumerate(mat.columns):
            for r, x in col.items():
                entries[(row0 + r, col0 + j)] = -x if negate else x

    # delbar x_0 = 0
    m0 = c.delbar(*chain[0])
    put_block(m0, 0, offsets[0])
    rows_offset = m0.rows
    for i in range(length - 1):
        del_i = c.del_(*chain[i])
        delbar_next = c.delbar(*chain[i + 1])
        put_block(del_i, rows_offset, offsets[i])
        put_block(delbar_next, rows_offset, offsets[i + 1])
        rows_offset += del_i.rows

    system = ExactMatrix.from_entries(rows_offset or 1, n_unknowns, entries)
    kernel = system.kernel_basis()
    if project_on == "first":
        lo, hi = 0, sizes[0]
    else:
        lo, hi = offsets[-2], offsets[-1]
    projected = []
    for v in kernel:
        pv = {k - lo: x for k, x in v.items() if lo <= k < hi}
        if pv:
            projected.append(pv)
    return projected


def frolicher_page(c: DoubleComplex, r: int) -> CohomologyTable:
    """Dimensions of the r-th page of the column-filtration spectral sequence."""
    if r < 1:
        raise ValueError("page index must be >= 1")
    if r == 1:
        table = dolbeault(c)
        return CohomologyTable("frolicher-page-1", table.dims)
    if not c.has_del:
        raise ComplexValidationError(
            "spectral-sequence pages beyond the first need del matrices"
        )
    dims: Dict[Bidegree, int] = {}
    for p, q in c.bidegrees():
        if not c.dim(p, q):
            dims[(p, q)] = 0
            continue
        cycles = _zigzag_projection(c, (p, q), r, "first")
        z_span = IncrementalSpan()
        for v in cycles:
            z_span.insert(v)
        z_dim = z_span.dim
        boundaries: List[Vec] = []
        if q > 0:
            boundaries.extend(col for col in c.delbar(p, q - 1).columns if col)
        if p > 0 and r >= 2:
            arriving = _zigzag_projection(c, (p - r + 1, q + r - 2), r - 1, "last")
            del_prev = c.del_(p - 1, q)
            for w in arriving:
                img = del_prev.apply(w)
                if img:
                    boundaries.append(img)
        b_span = IncrementalSpan()
        for v in boundaries:
            b_span.insert(v)
        b_dim = b_span.dim
        for v in boundaries:
            fresh, _ = z_span.insert(v)
            assert not fresh, "boundary space not contained in cycle space"
        dims[(p, q)] = z_dim - b_dim
    return CohomologyTable(f"frolicher-page-{r}", dims)


def frolicher_pages(c: DoubleComplex, max_page: Optional[int] = None) -> List[CohomologyTable]:
    """Pages E_1, E_2, ... up to stabilization (E_{n+2} is always final)."""
    last = max_page if max_page is not None else c.n + 2
    pages = [frolicher_page(c, r) for r in range(1, last + 1)]
    return pages


def e1_degeneration(c: DoubleComplex, betti: Optional[Dict[int, int]] = None) -> bool:
    """Whether sum_{p+q=k} h_delbar^{p,q} = b_k for every k.

    For finite first-quadrant complexes this is equivalent to degeneration at
    the first page, since page dimensions are non-increasing.  betti defaults
    to the complex's own total cohomology and must be supplied for complexes
    without del matrices.
    """
    h = dolbeault(c)
    if betti is None:
        betti = de_rham(c).dims
        for k, b in betti.items():
            assert b <= h.sum_along_antidiagonal(k), "Frolicher inequality violated"
    return all(
        h.sum_along_antidiagonal(k) == betti.get(k, 0) for k in range(2 * c.n + 1)
    )


def deldelbar_lemma(c: DoubleComplex) -> bool:
    """Whether sum_{p+q=k} (h_BC + h_A) = 2 b_k for every k.

    The inequality >= holds on every complex and is asserted; equality
    characterizes the ddbar-lemma.  b_k is always the complex's own total
    cohomology, never externally supplied.
    """
    bc = bott_chern(c)
    ap = aeppli(c)
    betti = de_rham(c).dims
    ok = True
    for k in range(2 * c.n + 1):
        left = bc.sum_along_antidiagonal(k) + ap.sum_along_antidiagonal(k)
        right = 2 * betti.get(k, 0)
        assert left >= right, "Angella-Tomassini inequality violated"
        if left != right:
            ok = False
    return ok


def _compose(mats: List[ExactMatrix]) -> ExactMatrix:
    out = mats[0]
    for m in mats[1:]:
        out = out.matmul(m)
    return out


def hodge_laplacian(c: DoubleComplex, p: int, q: int, theory: str) -> ExactMatrix:
    """Laplacian at (p, q) for the declared-orthonormal basis.

    dolbeault: delbar delbar* + delbar* delbar.  bott-chern: the standard
    six-term self-adjoint operator
    del delbar delbar* del* + delbar* del* del delbar + delbar* del del* delbar
    + del* delbar delbar* del + delbar* delbar + del* del.
    """
    n = c.dim(p, q)
    delbar = c.delbar(p, q)
    delbar_below = c.delbar(p, q - 1)
    if theory == "dolbeault":
        return delbar.conj_transpose().matmul(delbar).add(
            delbar_below.matmul(delbar_below.conj_transpose())
        )
    if theory != "bott-chern":
        raise ValueError(f"no laplacian for theory {theory!r}")
    del_ = c.del_(p, q)
    del_left = c.del_(p - 1, q)
    terms = [
        # del delbar delbar* del* : (p,q) -> (p-1,q) -> (p-1,q-1) -> (p-1,q) -> (p,q)
        _compose(
            [
                c.del_(p - 1, q),
                c.delbar(p - 1, q - 1),
                c.delbar(p - 1, q - 1).conj_transpose(),
                c.del_(p - 1, q).conj_transpose(),
            ]
        ),
        # delbar* del* del delbar : (p,q) -> (p,q+1) -> (p+1,q+1) -> (p,q+1) -> (p,q)
        _compose(
            [
                c.delbar(p, q).conj_transpose(),
                c.del_(p, q + 1).conj_transpose(),
                c.del_(p, q + 1),
                c.delbar(p, q),
            ]
        ),
        # delbar* del del* delbar : (p,q) -> (p,q+1) -> (p-1,q+1) -> (p,q+1) -> (p,q)
        _compose(
            [
                c.delbar(p, q).conj_transpose(),
                c.del_(p - 1, q + 1),
                c.del_(p - 1, q + 1).conj_transpose(),
                c.delbar(p, q),
            ]
        ),
        # del* delbar delbar* del : (p,q) -> (p+1,q) -> (p+1,q-1) -> (p+1,q) -> (p,q)
        _compose(
            [
                del_.conj_transpose(),
                c.delbar(p + 1, q - 1),
                c.delbar(p + 1, q - 1).conj_transpose(),
                del_,
            ]
        ),
        delbar.conj_transpose().matmul(delbar),
        del_.conj_transpose().matmul(del_),
    ]
    out = ExactMatrix.zeros(n, n)
    for t in terms:
        out = out.add(t)
    return out


def hodge_kernels(c: DoubleComplex, theory: str) -> CohomologyTable:
    """Kernel bases of the Laplacians; dims equal the quotient dimensions."""
    quotient = dolbeault(c) if theory == "dolbeault" else bott_chern(c)
    dims: Dict[Bidegree, int] = {}
    reps: Dict[Bidegree, List[Vec]] = {}
    for p, q in c.bidegrees():
        if not c.dim(p, q):
            dims[(p, q)] = 0
            continue
        lap = hodge_laplacian(c, p, q, theory)
        kernel = lap.kernel_basis()
        for v in kernel:
            assert not c.delbar(p, q).apply(v), "harmonic element not delbar-closed"
            if theory == "bott-chern":
                assert not c.del_(p, q).apply(v), "harmonic element not del-closed"
        assert len(kernel) == quotient.dim((p, q)), (
            f"hodge kernel dimension differs from {theory} at ({p},{q})"
        )
        dims[(p, q)] = len(kernel)
        reps[(p, q)] = kernel
    return CohomologyTable(theory, dims, reps)
