"""Finite double complexes extracted from frame spans.

The span of a model is a sum of exterior algebras on named frame elements.
Differentials of the generators are re-expressed once in the wedge products
of a typing frame (the declared generators plus any auxiliary elements with
assigned bidegrees); differentials of basis monomials then follow by formal
Leibniz expansion, with occasional ambient solves for terms that leave a
frame set.  Spans that are only closed under delbar yield Dolbeault-only
complexes with no del matrices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from ddbar.dga import (
    Algebra,
    DgaError,
    FormExpression,
    FrameElement,
    Monomial,
    _merge_wedges,
)
from ddbar.linalg import (
    ExactMatrix,
    IncrementalSpan,
    Vec,
    vec_add_scaled,
)
from ddbar.scalars import G, ONE, GaussianRational

Bidegree = Tuple[int, int]


class ComplexValidationError(ValueError):
    """A double-complex identity fails; message names bidegree and identity."""


class NotClosedError(DgaError):
    """The declared span is not closed under the required differentials."""


@dataclass
class BasisElement:
    label: str
    set_index: int
    gens: Tuple[int, ...]  # typing generator indices, ascending


@dataclass
class ClosureReport:
    delbar_ok: bool = True
    del_ok: bool = True
    delbar_failures: List[str] = field(default_factory=list)
    del_failures: List[str] = field(default_factory=list)

    def describe(self) -> List[str]:
        out = []
        status = "closed" if self.delbar_ok else "NOT closed"
        out.append(f"span is {status} under delbar")
        status = "closed" if self.del_ok else "NOT closed"
        out.append(f"span is {status} under del")
        out.extend(self.delbar_failures)
        out.extend(self.del_failures)
        return out


class DoubleComplex:
    """Per-bidegree bases plus del and delbar matrices.

    Immutable once built; all cohomology functionals treat it read-only, so
    per-bidegree computations may run concurrently.
    """

    def __init__(
        self,
        n: int,
        labels: Dict[Bidegree, List[str]],
        delbar: Dict[Bidegree, ExactMatrix],
        del_: Optional[Dict[Bidegree, ExactMatrix]],
    ):
        self.n = n
        self._labels = {pq: list(names) for pq, names in labels.items() if names}
        self._delbar = delbar
        self._del = del_

    @property
    def has_del(self) -> bool:
        return self._del is not None

    def dim(self, p: int, q: int) -> int:
        return len(self._labels.get((p, q), ()))

    def labels(self, p: int, q: int) -> List[str]:
        return list(self._labels.get((p, q), ()))

    def bidegrees(self):
        for p in range(self.n + 1):
            for q in range(self.n + 1):
                yield (p, q)

    def total_dim(self) -> int:
        return sum(len(v) for v in self._labels.values())

    def delbar(self, p: int, q: int) -> ExactMatrix:
        m = self._delbar.get((p, q))
        if m is None:
            return ExactMatrix.zeros(self.dim(p, q + 1), self.dim(p, q))
        return m

    def del_(self, p: int, q: int) -> ExactMatrix:
        if self._del is None:
            raise ComplexValidationError(
                "complex has no del matrices (span is closed under delbar only)"
            )
        m = self._del.get((p, q))
        if m is None:
            return ExactMatrix.zeros(self.dim(p + 1, q), self.dim(p, q))
        return m

    def validate(self) -> None:
        """Check the matrix identities; raises naming the first failure."""
        for p, q in self.bidegrees():
            if not self.dim(p, q):
                continue
            if not self.delbar(p, q + 1).matmul(self.delbar(p, q)).is_zero():
                raise ComplexValidationError(f"delbar o delbar != 0 at ({p},{q})")
            if self.has_del:
                if not self.del_(p + 1, q).matmul(self.del_(p, q)).is_zero():
                    raise ComplexValidationError(f"del o del != 0 at ({p},{q})")
                anti = self.delbar(p + 1, q).matmul(self.del_(p, q)).add(
                    self.del_(p, q + 1).matmul(self.delbar(p, q))
                )
                if not anti.is_zero():
                    raise ComplexValidationError(
                        f"del o delbar + delbar o del != 0 at ({p},{q})"
                    )


class BuiltComplex:
    """A DoubleComplex together with the frame data it was built from."""

    def __init__(self, algebra, complex_, basis, gens, span_sets, closure):
        self.algebra: Algebra = algebra
        self.complex: DoubleComplex = complex_
        self.basis: Dict[Bidegree, List[BasisElement]] = basis
        self.gens: List[FrameElement] = gens
        self.span_sets: List[List[int]] = span_sets  # generator indices per set
        self.closure: ClosureReport = closure
        self._expansions: Dict[Bidegree, List[FormExpression]] = {}

    def expansions(self, p: int, q: int) -> List[FormExpression]:
        """Ambient monomial expansions of the (p, q) basis elements."""
        key = (p, q)
        cached = self._expansions.get(key)
        if cached is None:
            cached = [self._expand(el.gens) for el in self.basis.get(key, [])]
            self._expansions[key] = cached
        return cached

    def _expand(self, gens: Tuple[int, ...]) -> FormExpression:
        value = self.algebra.one()
        for g in gens:
            value = value.wedge(self.gens[g].value)
        return value

    def is_conjugation_stable(self) -> bool:
        """Whether conj maps the span onto itself (checked bidegree by bidegree)."""
        for (p, q), elements in self.basis.items():
            if not elements:
                continue
            solver = _ExpansionSolver(self.expansions(q, p))
            for form in self.expansions(p, q):
                if solver.solve(self.algebra.conjugate(form)) is None:
                    return False
        return True


class _ExpansionSolver:
    """Solves ambient forms against a fixed list of basis expansions."""

    def __init__(self, expansions: Sequence[FormExpression]):
        self._index: Dict[Monomial, int] = {}
        self._span = IncrementalSpan(track=True)
        self._frozen = False
        for form in expansions:
            self._span.insert(self._coords(form))
        self._frozen = True

    def _coords(self, form: FormExpression) -> Vec:
        v: Vec = {}
        for m, c in form.terms.items():
            idx = self._index.get(m)
            if idx is None:
                if self._frozen:
                    return {-1: ONE}  # monomial outside the span's support
                idx = len(self._index)
                self._index[m] = idx
            v[idx] = c
        return v

    def solve(self, form: FormExpression) -> Optional[Dict[int, GaussianRational]]:
        coords = self._coords(form)
        if -1 in coords:
            return None
        return self._span.solve(coords)


def _bidegree_sum(gens: Sequence[int], bidegrees: List[Bidegree]) -> Bidegree:
    p = sum(bidegrees[g][0] for g in gens)
    q = sum(bidegrees[g][1] for g in gens)
    return p, q


def bidegrees_of(gens: List[FrameElement], idx: int) -> Bidegree:
    return gens[idx].bidegree


def _merge_pair_into(pair: Tuple[int, int], rest: Tuple[int, ...]):
    """Sign and merged tuple for (a ^ b) ^ rest; repeats give (0, None)."""
    a, b = pair
    sign = 1
    if a == b:
        return 0, None
    if a > b:
        a, b = b, a
        sign = -1
    s, merged = _merge_wedges((a, b), rest)
    if s == 0:
        return 0, None
    return sign * s, merged


def build_from_frames(
    algebra: Algebra,
    span_sets: Sequence[Sequence[FrameElement]],
    typing_extras: Sequence[FrameElement] = (),
    *,
    allow_dolbeault_only: bool = False,
    mark_only: bool = False,
    validate_limit: int = 4096,
) -> BuiltComplex:
    """Build the double complex of span(Lambda(F_1) + Lambda(F_2) + ...).

    typing_extras lists auxiliary bigraded elements needed to express the
    generators' differentials (deformed conjugate partners and the like).
    Raises NotClosedError("span not d-closed ...") when the span leaks; with
    allow_dolbeault_only a del-only leak instead yields a complex without del
    matrices; with mark_only all failures are recorded in the closure report
    and nothing is raised.
    """
    gens: List[FrameElement] = []
    gen_index: Dict[str, int] = {}

    def intern(element: FrameElement) -> int:
        known = gen_index.get(element.name)
        if known is not None:
            existing = gens[known]
            if existing.bidegree != element.bidegree or existing.value != element.value:
                raise DgaError(f"conflicting declarations of frame element {element.name!r}")
            return known
        if element.value.degrees() not in ({1}, set()):
            raise DgaError(f"frame element {element.name!r} must be a 1-form")
        if element.value.is_zero():
            raise DgaError(f"frame element {element.name!r} is zero")
        gen_index[element.name] = len(gens)
        gens.append(element)
        return len(gens) - 1

    sets: List[List[int]] = []
    for frame in span_sets:
        sets.append([intern(el) for el in frame])
    for el in typing_extras:
        intern(el)
    if not sets or not any(sets):
        raise DgaError("no frame elements given")
    for members in sets:
        if len(set(members)) != len(members):
            raise DgaError("frame elements dependent (repeated generator in one set)")

    bidegrees = [g.bidegree for g in gens]

    # generator independence within each span set
    for si, members in enumerate(sets):
        span = IncrementalSpan()
        solver_index: Dict[Monomial, int] = {}
        for g in members:
            v: Vec = {}
            for m, c in gens[g].value.terms.items():
                v[solver_index.setdefault(m, len(solver_index))] = c
            fresh, _ = span.insert(v)
            if not fresh:
                raise DgaError(
                    f"frame elements dependent: {gens[g].name!r} lies in the span "
                    f"of earlier elements of set {si}"
                )

    # generator-level nilpotency, then d(gen) in typing pair products
    pair_list = list(itertools.combinations(range(len(gens)), 2))
    pair_solver = _ExpansionSolver(
        [gens[a].value.wedge(gens[b].value) for a, b in pair_list]
    )
    typing_quads: List[List[Tuple[GaussianRational, int, int]]] = []
    for g, element in enumerate(gens):
        dval = algebra.differential(element.value)
        if algebra.differential(dval):
            raise DgaError(f"d(d({element.name})) != 0; structural differentials invalid")
        if not dval:
            typing_quads.append([])
            continue
        combo = pair_solver.solve(dval)
        if combo is None:
            raise NotClosedError(
                f"span not d-closed: d({element.name}) has a component outside the "
                f"declared frame span: {algebra.format_form(dval)}"
            )
        quad = [(c, *pair_list[j]) for j, c in sorted(combo.items()) if c]
        gp, gq = element.bidegree
        for _, a, b in quad:
            shift = (
                bidegrees_of(gens, a)[0] + bidegrees_of(gens, b)[0] - gp,
                bidegrees_of(gens, a)[1] + bidegrees_of(gens, b)[1] - gq,
            )
            if shift not in ((1, 0), (0, 1)):
                raise DgaError(
                    f"d({element.name}) has a component of impure bidegree shift "
                    f"{shift}; the declared bigrading is not integrable"
                )
        typing_quads.append(quad)

    # per-set quadratic structure: prefer in-set re-expression so that formal
    # Leibniz never leaves the set when the set is honestly d-closed
    set_quads: List[Dict[int, List[Tuple[GaussianRational, int, int]]]] = []
    for members in sets:
        genset = set(members)
        in_pairs = [(a, b) for a, b in itertools.combinations(sorted(members), 2)]
        in_solver = _ExpansionSolver(
            [gens[a].value.wedge(gens[b].value) for a, b in in_pairs]
        )
        quads: Dict[int, List[Tuple[GaussianRational, int, int]]] = {}
        for g in members:
            quad = typing_quads[g]
            if all(a in genset and b in genset for _, a, b in quad):
                quads[g] = quad
                continue
            dval = algebra.differential(gens[g].value)
            combo = in_solver.solve(dval)
            if combo is not None:
                quads[g] = [(c, *in_pairs[j]) for j, c in sorted(combo.items()) if c]
            else:
                quads[g] = quad
        set_quads.append(quads)

    # span basis with cross-set deduplication by exact linear algebra
    candidates: Dict[Bidegree, List[Tuple[int, Tuple[int, ...]]]] = {}
    for si, members in enumerate(sets):
        ordered = sorted(members)
        for k in range(len(ordered) + 1):
            for combo in itertools.combinations(ordered, k):
                pq = _bidegree_sum(combo, bidegrees)
                candidates.setdefault(pq, []).append((si, combo))

    basis: Dict[Bidegree, List[BasisElement]] = {}
    formal_map: Dict[Tuple[int, Tuple[int, ...]], Tuple[str, object]] = {}
    multi_set = len(sets) > 1

    def expand(gens_tuple: Tuple[int, ...]) -> FormExpression:
        value = algebra.one()
        for g in gens_tuple:
            value = value.wedge(gens[g].value)
        return value

    for pq in sorted(candidates):
        elements: List[BasisElement] = []
        if multi_set:
            index: Dict[Monomial, int] = {}
            span = IncrementalSpan(track=True)
            kept_cols: Dict[int, int] = {}
            insert_id = 0
            for si, combo in candidates[pq]:
                value = expand(combo)
                v: Vec = {}
                for m, c in value.terms.items():
                    v[index.setdefault(m, len(index))] = c
                fresh, dependence = span.insert(v)
                if fresh:
                    kept_cols[insert_id] = len(elements)
                    label = "^".join(gens[g].name for g in combo) or "1"
                    elements.append(BasisElement(label, si, combo))
                    formal_map[(si, combo)] = ("col", kept_cols[insert_id])
                else:
                    formal_map[(si, combo)] = (
                        "combo",
                        {kept_cols[j]: c for j, c in dependence.items() if c},
                    )
                insert_id += 1
        else:
            for si, combo in candidates[pq]:
                label = "^".join(gens[g].name for g in combo) or "1"
                formal_map[(si, combo)] = ("col", len(elements))
                elements.append(BasisElement(label, si, combo))
        basis[pq] = elements

    n = 0
    for (p, q), elements in basis.items():
        if elements:
            n = max(n, p, q)

    built = BuiltComplex(algebra, None, basis, gens, sets, ClosureReport())

    # differentials of every basis element by formal Leibniz
    delbar_cols: Dict[Bidegree, List[Vec]] = {}
    del_cols: Dict[Bidegree, List[Vec]] = {}
    closure = built.closure
    solvers: Dict[Bidegree, _ExpansionSolver] = {}

    def solver_for(pq: Bidegree) -> _ExpansionSolver:
        s = solvers.get(pq)
        if s is None:
            s = _ExpansionSolver(built.expansions(*pq))
            solvers[pq] = s
        return s

    for pq in sorted(basis):
        p, q = pq
        elements = basis[pq]
        delbar_cols[pq] = []
        del_cols[pq] = []
        for el in elements:
            quads = set_quads[el.set_index]
            genset = set(sets[el.set_index])
            direct: Dict[Bidegree, Vec] = {(p + 1, q): {}, (p, q + 1): {}}
            stray: Dict[Bidegree, Dict[Tuple[int, ...], GaussianRational]] = {}
            for pos, g in enumerate(el.gens):
                rest = el.gens[:pos] + el.gens[pos + 1 :]
                base_sign = 1 if pos % 2 == 0 else -1
                for coeff, a, b in quads[g]:
                    sign, merged = _merge_pair_into((a, b), rest)
                    if sign == 0:
                        continue
                    total = coeff if sign * base_sign > 0 else -coeff
                    target = _bidegree_sum(merged, bidegrees)
                    if all(x in genset for x in merged):
                        kind, payload = formal_map[(el.set_index, merged)]
                        if kind == "col":
                            vec_add_scaled(direct[target], {payload: ONE}, total)
                        else:
                            vec_add_scaled(direct[target], payload, total)
                    else:
                        bucket = stray.setdefault(target, {})
                        prev = bucket.get(merged)
                        value = total if prev is None else prev + total
                        if value:
                            bucket[merged] = value
                        elif prev is not None:
                            del bucket[merged]
            for target, terms in sorted(stray.items()):
                if not terms:
                    continue
                part = "delbar" if target == (p, q + 1) else "del"
                if part == "del" and not closure.del_ok:
                    continue  # del already known undefined; matrices are dropped
                if part == "delbar" and not closure.delbar_ok:
                    continue
                form = FormExpression()
                for merged, c in terms.items():
                    form = form + expand(merged).scale(c)
                if form.is_zero():
                    continue
                combo = solver_for(target).solve(form)
                if combo is None:
                    message = (
                        f"span not d-closed: the {part}-part of d({el.label}) has a "
                        f"component outside the span at {target}"
                    )
                    if part == "delbar":
                        closure.delbar_ok = False
                        closure.delbar_failures.append(message)
                        if not mark_only:
                            raise NotClosedError(message)
                    else:
                        closure.del_ok = False
                        closure.del_failures.append(message)
                        if not (mark_only or allow_dolbeault_only):
                            raise NotClosedError(message)
                else:
                    vec_add_scaled(direct[target], combo, ONE)
            delbar_cols[pq].append(direct[(p, q + 1)])
            del_cols[pq].append(direct[(p + 1, q)])

    labels = {pq: [el.label for el in elements] for pq, elements in basis.items()}
    delbar_mats = {
        pq: ExactMatrix.from_columns(len(labels.get((pq[0], pq[1] + 1), ())), cols)
        for pq, cols in delbar_cols.items()
    }
    del_mats = None
    if closure.del_ok:
        del_mats = {
            pq: ExactMatrix.from_columns(len(labels.get((pq[0] + 1, pq[1]), ())), cols)
            for pq, cols in del_cols.items()
        }
    complex_ = DoubleComplex(n, labels, delbar_mats, del_mats)
    built.complex = complex_
    if complex_.total_dim() <= validate_limit and closure.delbar_ok and closure.del_ok:
        complex_.validate()
    return built


def build_double_complex(
    algebra: Algebra,
    span_sets: Sequence[Sequence[FrameElement]],
    typing_extras: Sequence[FrameElement] = (),
) -> BuiltComplex:
    """Strict build: the span must be closed under both del and delbar."""
    return build_from_frames(algebra, span_sets, typing_extras)
