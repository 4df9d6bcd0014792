"""Sparse exact linear algebra over the Gaussian rationals.

Vectors are dicts mapping coordinate index -> nonzero GaussianRational.
Elimination uses first-nonzero pivoting (smallest coordinate index) with
per-row normalization; zero tests are exact equality of reduced fractions.
All objects are treated as immutable once built, so they are safe to share
across concurrent computations.
"""

from __future__ import annotations

from typing import Dict, Iterable, List, Optional, Tuple

from ddbar.scalars import ONE, ZERO, GaussianRational

Vec = Dict[int, GaussianRational]


def vec_is_zero(v: Vec) -> bool:
    return not v


def vec_scale(v: Vec, c: GaussianRational) -> Vec:
    if not c:
        return {}
    return {k: c * x for k, x in v.items()}


def vec_add_scaled(dst: Vec, src: Vec, c: GaussianRational) -> None:
    """dst += c * src, dropping entries that cancel exactly."""
    if not c:
        return
    for k, x in src.items():
        s = dst.get(k)
        if s is None:
            dst[k] = c * x
        else:
            s = s + c * x
            if s:
                dst[k] = s
            else:
                del dst[k]


def vec_sub(a: Vec, b: Vec) -> Vec:
    out = dict(a)
    vec_add_scaled(out, b, GaussianRational(-1))
    return out


class IncrementalSpan:
    """Echelonized span that vectors can be inserted into one at a time.

    With track=True, each inserted vector that fails to enlarge the span is
    reported together with its exact combination over the previously kept
    (independent) insertions.
    """

    def __init__(self, track: bool = False):
        self.track = track
        self._rows: List[Vec] = []          # reduced, pivot coefficient 1
        self._combos: List[Vec] = []        # row -> combo over kept insert ids
        self._pivots: Dict[int, int] = {}   # pivot coordinate -> row index
        self.kept: List[int] = []           # insert ids that were independent
        self._count = 0

    @property
    def dim(self) -> int:
        return len(self._rows)

    def _reduce(self, vector: Vec) -> Tuple[Vec, Optional[Vec]]:
        v = dict(vector)
        combo: Optional[Vec] = {} if self.track else None
        while v:
            p = min(v)
            row_idx = self._pivots.get(p)
            if row_idx is None:
                return v, combo
            c = v[p]
            vec_add_scaled(v, self._rows[row_idx], -c)
            if combo is not None:
                vec_add_scaled(combo, self._combos[row_idx], c)
        return v, combo

    def insert(self, vector: Vec) -> Tuple[bool, Optional[Vec]]:
        """Insert; returns (independent, combo-over-kept-ids-if-dependent)."""
        insert_id = self._count
        self._count += 1
        v, combo = self._reduce(vector)
        if not v:
            return False, combo
        p = min(v)
        inv = ONE / v[p]
        v = vec_scale(v, inv)
        if self.track:
            rep = vec_scale(combo, -ONE) if combo else {}
            rep[insert_id] = ONE
            rep = vec_scale(rep, inv)
            self._combos.append(rep)
        else:
            self._combos.append({})
        self._rows.append(v)
        self._pivots[p] = len(self._rows) - 1
        self.kept.append(insert_id)
        return True, None

    def contains(self, vector: Vec) -> bool:
        v, _ = self._reduce(vector)
        return not v

    def solve(self, vector: Vec) -> Optional[Vec]:
        """Combination over kept insert ids reproducing vector, or None."""
        if not self.track:
            raise ValueError("solve requires track=True")
        v, combo = self._reduce(vector)
        if v:
            return None
        return {k: c for k, c in combo.items() if c}


def span_dim(vectors: Iterable[Vec]) -> int:
    span = IncrementalSpan()
    for v in vectors:
        span.insert(v)
    return span.dim


def subspace_dim_sum(a: Iterable[Vec], b: Iterable[Vec]) -> int:
    """dim(span a + span b): rank of all vectors together."""
    span = IncrementalSpan()
    for v in a:
        span.insert(v)
    for v in b:
        span.insert(v)
    return span.dim


def subspace_dim_intersection(a: List[Vec], b: List[Vec]) -> int:
    """dim(span a) + dim(span b) - dim(span a + span b)."""
    return span_dim(a) + span_dim(b) - subspace_dim_sum(a, b)


def solve_in_span(basis: List[Vec], target: Vec) -> Optional[Dict[int, GaussianRational]]:
    """Exact coefficients c with sum c_j basis_j = target, or None."""
    span = IncrementalSpan(track=True)
    for v in basis:
        span.insert(v)
    return span.solve(target)


class ExactMatrix:
    """Sparse matrix over the Gaussian rationals, stored column-major."""

    def __init__(self, rows: int, cols: int, columns: Optional[List[Vec]] = None):
        self.rows = rows
        self.cols = cols
        self.columns: List[Vec] = columns if columns is not None else [{} for _ in range(cols)]
        if len(self.columns) != cols:
            raise ValueError("column count mismatch")

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "ExactMatrix":
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls(n, n, [{j: ONE} for j in range(n)])

    @classmethod
    def from_entries(cls, rows: int, cols: int, entries) -> "ExactMatrix":
        m = cls(rows, cols)
        for (r, c), x in entries.items() if isinstance(entries, dict) else entries:
            x = GaussianRational.coerce(x)
            if x:
                m.columns[c][r] = x
        return m

    @classmethod
    def from_dense(cls, data) -> "ExactMatrix":
        rows = len(data)
        cols = len(data[0]) if rows else 0
        m = cls(rows, cols)
        for r, row in enumerate(data):
            for c, x in enumerate(row):
                x = GaussianRational.coerce(x)
                if x:
                    m.columns[c][r] = x
        return m

    @classmethod
    def from_columns(cls, rows: int, columns: List[Vec]) -> "ExactMatrix":
        return cls(rows, len(columns), [dict(c) for c in columns])

    def entry(self, r: int, c: int) -> GaussianRational:
        return self.columns[c].get(r, ZERO)

    def column(self, c: int) -> Vec:
        return dict(self.columns[c])

    def is_zero(self) -> bool:
        return all(not col for col in self.columns)

    def nnz(self) -> int:
        return sum(len(col) for col in self.columns)

    def rank(self) -> int:
        return span_dim(self.columns)

    def apply(self, v: Vec) -> Vec:
        out: Vec = {}
        for j, c in v.items():
            vec_add_scaled(out, self.columns[j], c)
        return out

    def matmul(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch in matmul")
        return ExactMatrix(self.rows, other.cols, [self.apply(col) for col in other.columns])

    def add(self, other: "ExactMatrix") -> "ExactMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch in add")
        cols = []
        for a, b in zip(self.columns, other.columns):
            col = dict(a)
            vec_add_scaled(col, b, ONE)
            cols.append(col)
        return ExactMatrix(self.rows, self.cols, cols)

    def conj_transpose(self) -> "ExactMatrix":
        out = ExactMatrix(self.cols, self.rows)
        for c, col in enumerate(self.columns):
            for r, x in col.items():
                out.columns[r][c] = x.conjugate()
        return out

    @staticmethod
    def vstack(blocks: List["ExactMatrix"]) -> "ExactMatrix":
        """Stack matrices with equal column counts on top of each other."""
        if not blocks:
            raise ValueError("vstack of nothing")
        cols = blocks[0].cols
        if any(b.cols != cols for b in blocks):
            raise ValueError("column count mismatch in vstack")
        total = sum(b.rows for b in blocks)
        out = ExactMatrix(total, cols)
        offset = 0
        for b in blocks:
            for c, col in enumerate(b.columns):
                for r, x in col.items():
                    out.columns[c][offset + r] = x
            offset += b.rows
        return out

    def _rref_rows(self) -> Tuple[List[Vec], Dict[int, int]]:
        """Reduced row echelon form; returns (rows, pivot column -> row idx)."""
        raw: Dict[int, Vec] = {}
        for c, col in enumerate(self.columns):
            for r, x in col.items():
                raw.setdefault(r, {})[c] = x
        rows: List[Vec] = []
        pivots: Dict[int, int] = {}
        for r in sorted(raw):
            v = raw[r]
            # Full RREF is maintained, so eliminating a pivot column never
            # reintroduces another pivot column; one pass suffices.
            for p in [k for k in sorted(v) if k in pivots]:
                c = v.get(p)
                if c:
                    vec_add_scaled(v, rows[pivots[p]], -c)
            if not v:
                continue
            p = min(v)
            v = vec_scale(v, ONE / v[p])
            for existing in rows:
                c = existing.get(p)
                if c is not None:
                    vec_add_scaled(existing, v, -c)
            pivots[p] = len(rows)
            rows.append(v)
        return rows, pivots

    def kernel_basis(self) -> List[Vec]:
        """Vectors spanning ker(self); count = cols - rank."""
        rows, pivots = self._rref_rows()
        basis: List[Vec] = []
        for free in range(self.cols):
            if free in pivots:
                continue
            v: Vec = {free: ONE}
            for p, idx in pivots.items():
                c = rows[idx].get(free)
                if c is not None:
                    v[p] = -c
            basis.append(v)
        return basis

    def solve(self, target: Vec) -> Optional[Vec]:
        """One x with self @ x = target, or None if target is not in the image."""
        return solve_in_span(self.columns, target)

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return (
            self.rows == other.rows
            and self.cols == other.cols
            and self.columns == other.columns
        )

    def __repr__(self):
        return f"ExactMatrix({self.rows}x{self.cols}, nnz={self.nnz()})"


def rank(m: ExactMatrix) -> int:
    return m.rank()


def kernel_basis(m: ExactMatrix) -> List[Vec]:
    return m.kernel_basis()
