"""Shared test helpers: fuzzed double complexes and a brute-force oracle.

The oracle is an independent implementation: dense row reduction over lists,
no code shared with the production sparse elimination.
"""

import random
from fractions import Fraction

from ddbar.bicomplex import DoubleComplex
from ddbar.linalg import ExactMatrix
from ddbar.scalars import G, ZERO

SCALARS = [G(1), G(-1), G(0, 1), G(0, -1), G(Fraction(1, 2)), G(2), G(1, 1)]


def random_double_complex(rng: random.Random, n: int = 2, pieces: int = 6) -> DoubleComplex:
    """Random valid complex: dots, pairs, zigzags, and squares in standard
    position, followed by random shear changes of basis per bidegree."""
    dims = {(p, q): 0 for p in range(n + 1) for q in range(n + 1)}
    del_entries = {}
    delbar_entries = {}

    def new_vec(p, q):
        dims[(p, q)] += 1
        return dims[(p, q)] - 1

    for _ in range(pieces):
        kind = rng.choice(["dot", "dpair", "dbpair", "wedgezig", "veezig", "square"])
        p = rng.randint(0, n - 1)
        q = rng.randint(0, n - 1)
        c1, c2 = rng.choice(SCALARS), rng.choice(SCALARS)
        if kind == "dot":
            new_vec(p, q)
        elif kind == "dpair":
            a, b = new_vec(p, q), new_vec(p + 1, q)
            del_entries[(p, q, b, a)] = c1
        elif kind == "dbpair":
            a, c = new_vec(p, q), new_vec(p, q + 1)
            delbar_entries[(p, q, c, a)] = c1
        elif kind == "wedgezig":
            # b <-del- a -delbar-> c
            a, b, c = new_vec(p, q), new_vec(p + 1, q), new_vec(p, q + 1)
            del_entries[(p, q, b, a)] = c1
            delbar_entries[(p, q, c, a)] = c2
        elif kind == "veezig":
            # a -del-> b <-delbar- c   with a in (p,q), c in (p+1,q-1)
            if q == 0:
                continue
            a, b = new_vec(p, q), new_vec(p + 1, q)
            c = new_vec(p + 1, q - 1)
            del_entries[(p, q, b, a)] = c1
            delbar_entries[(p + 1, q - 1, b, c)] = c2
        else:
            a = new_vec(p, q)
            b = new_vec(p + 1, q)
            c = new_vec(p, q + 1)
            d = new_vec(p + 1, q + 1)
            del_entries[(p, q, b, a)] = c1
            delbar_entries[(p, q, c, a)] = c2
            delbar_entries[(p + 1, q, d, b)] = c2
            del_entries[(p, q + 1, d, c)] = -c1

    labels = {
        (p, q): [f"v{p}{q}_{i}" for i in range(dims[(p, q)])]
        for p in range(n + 1)
        for q in range(n + 1)
    }
    del_mats = {}
    delbar_mats = {}
    for p in range(n + 1):
        for q in range(n + 1):
            del_mats[(p, q)] = ExactMatrix.from_entries(
                dims.get((p + 1, q), 0),
                dims[(p, q)],
                {
                    (r, c): x
                    for (pp, qq, r, c), x in del_entries.items()
                    if (pp, qq) == (p, q)
                },
            )
            delbar_mats[(p, q)] = ExactMatrix.from_entries(
                dims.get((p, q + 1), 0),
                dims[(p, q)],
                {
                    (r, c): x
                    for (pp, qq, r, c), x in delbar_entries.items()
                    if (pp, qq) == (p, q)
                },
            )

    # random shears: basis e_i <- e_i + c e_j at one bidegree
    for _ in range(4 * pieces):
        p, q = rng.randint(0, n), rng.randint(0, n)
        m = dims[(p, q)]
        if m < 2:
            continue
        i, j = rng.sample(range(m), 2)
        c = rng.choice(SCALARS)
        for mats, role in ((del_mats, "out"), (delbar_mats, "out")):
            mat = mats[(p, q)]
            col = dict(mat.columns[j])
            for r, x in (mat.columns[i] or {}).items():
                s = col.get(r, ZERO) + c * x if r in col else c * x
                if s:
                    col[r] = s
                elif r in col:
                    del col[r]
            mat.columns[j] = col
        for mats in (del_mats, delbar_mats):
            for (pp, qq), mat in mats.items():
                if mat.rows and (
                    (pp + 1, qq) == (p, q)
                    and mats is del_mats
                    or (pp, qq + 1) == (p, q)
                    and mats is delbar_mats
                ):
                    # row_i -= c * row_j in every matrix into (p, q)
                    for col in mat.columns:
                        xj = col.get(j)
                        if xj:
                            s = col.get(i, ZERO) - c * xj
                            if s:
                                col[i] = s
                            elif i in col:
                                del col[i]
    return DoubleComplex(n, labels, delbar_mats, del_mats)


# -- independent dense oracle --------------------------------------------------


def _dense(mat: ExactMatrix):
    return [[mat.entry(r, c) for c in range(mat.cols)] for r in range(mat.rows)]


def _row_reduce(rows):
    """Dense row echelon; returns (reduced rows, pivot columns)."""
    rows = [list(r) for r in rows]
    pivots = []
    lead = 0
    ncols = len(rows[0]) if rows else 0
    for r in range(len(rows)):
        while lead < ncols:
            pivot_row = None
            for rr in range(r, len(rows)):
                if rows[rr][lead]:
                    pivot_row = rr
                    break
            if pivot_row is None:
                lead += 1
                continue
            rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
            inv = G(1) / rows[r][lead]
            rows[r] = [x * inv for x in rows[r]]
            for rr in range(len(rows)):
                if rr != r and rows[rr][lead]:
                    factor = rows[rr][lead]
                    rows[rr] = [a - factor * b for a, b in zip(rows[rr], rows[r])]
            pivots.append(lead)
            lead += 1
            break
    return rows, pivots


def dense_rank(rows):
    if not rows or not rows[0]:
        return 0
    _, pivots = _row_reduce(rows)
    return len(pivots)


def dense_nullity(rows, ncols):
    return ncols - dense_rank(rows) if rows else ncols


def dense_mul(a, b):
    if not a or not b:
        return []
    return [
        [sum((a[r][k] * b[k][c] for k in range(len(b))), G(0)) for c in range(len(b[0]))]
        for r in range(len(a))
    ]


def oracle_tables(c: DoubleComplex):
    """Quotient dimensions of all four theories, brute force."""
    dolb, delc, bc, ae = {}, {}, {}, {}
    for p in range(c.n + 1):
        for q in range(c.n + 1):
            m = c.dim(p, q)
            if m == 0:
                dolb[(p, q)] = delc[(p, q)] = bc[(p, q)] = ae[(p, q)] = 0
                continue
            delbar_pq = _dense(c.delbar(p, q))
            del_pq = _dense(c.del_(p, q))
            delbar_in = _dense(c.delbar(p, q - 1)) if q else []
            del_in = _dense(c.del_(p - 1, q)) if p else []
            dolb[(p, q)] = dense_nullity(delbar_pq, m) - dense_rank(delbar_in)
            delc[(p, q)] = dense_nullity(del_pq, m) - dense_rank(del_in)
            stacked = delbar_pq + del_pq
            dd_in = (
                dense_mul(_dense(c.del_(p - 1, q)), _dense(c.delbar(p - 1, q - 1)))
                if p and q
                else []
            )
            bc[(p, q)] = dense_nullity(stacked, m) - dense_rank(
                [list(col) for col in zip(*dd_in)] if dd_in else []
            )
            dd_out = dense_mul(_dense(c.del_(p, q + 1)), _dense(c.delbar(p, q)))
            images = []
            if del_in:
                images.extend(list(col) for col in zip(*del_in))
            if delbar_in:
                images.extend(list(col) for col in zip(*delbar_in))
            ae[(p, q)] = dense_nullity(dd_out, m) - dense_rank(images)
    return dolb, delc, bc, ae


def oracle_betti(c: DoubleComplex):
    """Total-complex Betti numbers, brute force with dense blocks."""
    out = {}
    layout = {}
    for k in range(2 * c.n + 1):
        blocks = [(p, k - p) for p in range(k + 1) if c.dim(p, k - p)]
        layout[k] = blocks
    prev_rank = 0
    for k in range(2 * c.n + 1):
        dim_k = sum(c.dim(*pq) for pq in layout[k])
        dim_next = sum(c.dim(*pq) for pq in layout.get(k + 1, []))
        rows = [[G(0)] * dim_k for _ in range(dim_next)]
        col0 = 0
        offsets_next = {}
        off = 0
        for pq in layout.get(k + 1, []):
            offsets_next[pq] = off
            off += c.dim(*pq)
        for p, q in layout[k]:
            for mat, target in ((c.del_(p, q), (p + 1, q)), (c.delbar(p, q), (p, q + 1))):
                if target not in offsets_next:
                    continue
                row0 = offsets_next[target]
                for j in range(mat.cols):
                    for r, x in mat.columns[j].items():
                        rows[row0 + r][col0 + j] = x
            col0 += c.dim(p, q)
        rank_k = dense_rank(rows)
        out[k] = dim_k - rank_k - prev_rank
        prev_rank = rank_k
    return out
