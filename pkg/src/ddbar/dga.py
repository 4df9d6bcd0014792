"""Character-weighted exterior algebra with automatic Leibniz differential.

Coordinate 1-form symbols carry prescribed structural differentials; a
monomial is a character weight e^{sum_j a_j z_j + b_j zbar_j} times a signed
wedge of symbols.  Only monomials reachable from frame spans are ever
instantiated; the ambient algebra across all weights is never materialized.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from ddbar.scalars import G, ONE, ZERO, GaussianRational

WeightVector = Tuple[Tuple[GaussianRational, GaussianRational], ...]


class DgaError(ValueError):
    """Structural error in an algebra, frame, or span declaration."""


@dataclass
class CoordinateSymbol:
    index: int
    name: str
    holo: bool                  # True for (1,0), False for (0,1)
    partner: int                # index of the conjugate symbol


@dataclass
class WeightCoordinate:
    name: str
    holo_sym: int
    anti_sym: int


class Monomial:
    """Weight vector plus an ordered wedge of distinct symbol indices."""

    __slots__ = ("weight", "wedge", "_hash")

    def __init__(self, weight: WeightVector, wedge: Tuple[int, ...]):
        self.weight = weight
        self.wedge = wedge
        self._hash = hash((weight, wedge))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return (
            isinstance(other, Monomial)
            and self.weight == other.weight
            and self.wedge == other.wedge
        )

    @property
    def degree(self) -> int:
        return len(self.wedge)

    def __repr__(self):
        return f"Monomial(weight={self.weight}, wedge={self.wedge})"


def _merge_wedges(a: Tuple[int, ...], b: Tuple[int, ...]):
    """Merge two sorted index tuples; returns (sign, merged) or (0, None)."""
    out: List[int] = []
    sign = 1
    i = j = 0
    while i < len(a) and j < len(b):
        if a[i] == b[j]:
            return 0, None
        if a[i] < b[j]:
            out.append(a[i])
            i += 1
        else:
            # b[j] jumps over the remaining len(a) - i odd elements
            if (len(a) - i) % 2:
                sign = -sign
            out.append(b[j])
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return sign, tuple(out)


def _sort_wedge(wedge: Sequence[int]):
    """Sort arbitrary indices, tracking the permutation sign; repeats give 0."""
    items = list(wedge)
    sign = 1
    for i in range(1, len(items)):
        j = i
        while j > 0 and items[j - 1] > items[j]:
            items[j - 1], items[j] = items[j], items[j - 1]
            sign = -sign
            j -= 1
    for i in range(1, len(items)):
        if items[i - 1] == items[i]:
            return 0, None
    return sign, tuple(items)


def _add_weights(a: WeightVector, b: WeightVector) -> WeightVector:
    return tuple((x[0] + y[0], x[1] + y[1]) for x, y in zip(a, b))


class FormExpression:
    """Finite linear combination of monomials; no zero coefficients stored."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Dict[Monomial, GaussianRational]] = None):
        self.terms = terms or {}

    @classmethod
    def zero(cls) -> "FormExpression":
        return cls()

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other: "FormExpression") -> "FormExpression":
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m)
            if s is None:
                out[m] = c
            else:
                s = s + c
                if s:
                    out[m] = s
                else:
                    del out[m]
        return FormExpression(out)

    def __sub__(self, other: "FormExpression") -> "FormExpression":
        return self + other.scale(G(-1))

    def scale(self, c: GaussianRational) -> "FormExpression":
        if not c:
            return FormExpression()
        return FormExpression({m: c * x for m, x in self.terms.items()})

    def __neg__(self):
        return self.scale(G(-1))

    def wedge(self, other: "FormExpression") -> "FormExpression":
        out: Dict[Monomial, GaussianRational] = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                sign, wedge = _merge_wedges(ma.wedge, mb.wedge)
                if sign == 0:
                    continue
                m = Monomial(_add_weights(ma.weight, mb.weight), wedge)
                c = ca * cb if sign > 0 else -(ca * cb)
                s = out.get(m)
                if s is None:
                    out[m] = c
                else:
                    s = s + c
                    if s:
                        out[m] = s
                    else:
                        del out[m]
        return FormExpression(out)

    def shift_weight(self, delta: WeightVector) -> "FormExpression":
        return FormExpression(
            {Monomial(_add_weights(m.weight, delta), m.wedge): c for m, c in self.terms.items()}
        )

    def degrees(self) -> set:
        return {m.degree for m in self.terms}

    def __eq__(self, other):
        return isinstance(other, FormExpression) and self.terms == other.terms

    def __repr__(self):
        return f"FormExpression({self.terms!r})"


@dataclass
class FrameElement:
    """Named bigraded generator; bidegree is assigned, not inferred.

    Deformed (0,1) generators may contain raw (1,0) symbols, so the bidegree
    with respect to the deformed structure is explicit data.
    """

    name: str
    bidegree: Tuple[int, int]
    value: FormExpression

    def __post_init__(self):
        if self.bidegree not in ((1, 0), (0, 1)):
            raise DgaError(f"frame element {self.name}: bidegree must be (1,0) or (0,1)")


class Algebra:
    """Symbol table, weight coordinates, and the induced differential."""

    def __init__(self):
        self.symbols: List[CoordinateSymbol] = []
        self._by_name: Dict[str, int] = {}
        self.weights: List[WeightCoordinate] = []
        self._weight_by_name: Dict[str, int] = {}
        self._structural: Dict[int, FormExpression] = {}

    # -- declarations --------------------------------------------------------

    def declare_pair(self, holo_name: str, anti_name: str) -> Tuple[int, int]:
        for name in (holo_name, anti_name):
            if name in self._by_name:
                raise DgaError(f"duplicate symbol {name!r}")
        if holo_name == anti_name:
            raise DgaError(f"symbol {holo_name!r} cannot be its own conjugate")
        i = len(self.symbols)
        self.symbols.append(CoordinateSymbol(i, holo_name, True, i + 1))
        self.symbols.append(CoordinateSymbol(i + 1, anti_name, False, i))
        self._by_name[holo_name] = i
        self._by_name[anti_name] = i + 1
        return i, i + 1

    def declare_weight(self, name: str, holo_sym: str, anti_sym: str) -> int:
        if name in self._weight_by_name:
            raise DgaError(f"duplicate weight coordinate {name!r}")
        hs, as_ = self.symbol(holo_sym), self.symbol(anti_sym)
        if not hs.holo or as_.holo or hs.partner != as_.index:
            raise DgaError(
                f"weight coordinate {name!r}: {holo_sym} and {anti_sym} must be a conjugate pair"
            )
        self._weight_by_name[name] = len(self.weights)
        self.weights.append(WeightCoordinate(name, hs.index, as_.index))
        return len(self.weights) - 1

    def set_structural(self, sym_name: str, form: FormExpression) -> None:
        sym = self.symbol(sym_name)
        if sym.index in self._structural:
            raise DgaError(f"structural differential of {sym_name!r} already set")
        if form and form.degrees() != {2}:
            raise DgaError(f"structural differential of {sym_name!r} must be a 2-form")
        self._structural[sym.index] = form
        partner = sym.partner
        if partner not in self._structural:
            self._structural[partner] = self.conjugate(form)

    # -- lookups --------------------------------------------------------------

    def symbol(self, name: str) -> CoordinateSymbol:
        idx = self._by_name.get(name)
        if idx is None:
            raise DgaError(f"unknown symbol {name!r}")
        return self.symbols[idx]

    def symbol_name(self, index: int) -> str:
        return self.symbols[index].name

    def structural(self, index: int) -> FormExpression:
        return self._structural.get(index, _ZERO_FORM)

    def weight_index(self, name: str) -> int:
        idx = self._weight_by_name.get(name)
        if idx is None:
            raise DgaError(f"unknown weight coordinate {name!r}")
        return idx

    @property
    def zero_weight(self) -> WeightVector:
        return tuple((ZERO, ZERO) for _ in self.weights)

    # -- constructors ----------------------------------------------------------

    def monomial(
        self,
        symbols: Iterable[str] = (),
        weight: Optional[Dict[str, Tuple[GaussianRational, GaussianRational]]] = None,
        coeff: GaussianRational = ONE,
    ) -> FormExpression:
        idxs = []
        for name in symbols:
            idxs.append(self.symbol(name).index)
        sign, wedge = _sort_wedge(idxs)
        if sign == 0:
            return FormExpression()
        w = list(self.zero_weight)
        for name, (a, b) in (weight or {}).items():
            w[self.weight_index(name)] = (G(0) + a, G(0) + b)
        c = coeff if sign > 0 else -coeff
        if not c:
            return FormExpression()
        return FormExpression({Monomial(tuple(w), wedge): c})

    def one(self) -> FormExpression:
        return FormExpression({Monomial(self.zero_weight, ()): ONE})

    # -- structure maps ---------------------------------------------------------

    def raw_bidegree(self, m: Monomial) -> Tuple[int, int]:
        p = sum(1 for i in m.wedge if self.symbols[i].holo)
        return p, len(m.wedge) - p

    def conjugate(self, x: FormExpression) -> FormExpression:
        out = FormExpression()
        for m, c in x.terms.items():
            weight = tuple((b.conjugate(), a.conjugate()) for a, b in m.weight)
            sign, wedge = _sort_wedge([self.symbols[i].partner for i in m.wedge])
            if sign == 0:
                continue
            cc = c.conjugate() if sign > 0 else -c.conjugate()
            out = out + FormExpression({Monomial(weight, wedge): cc})
        return out

    def differential(self, x: FormExpression) -> FormExpression:
        """d(e^w mu) = (sum a_j dz_j + b_j dzbar_j) ^ e^w mu + e^w d(mu)."""
        out = FormExpression()
        for m, c in x.terms.items():
            base = FormExpression({m: c})
            for j, (a, b) in enumerate(m.weight):
                wc = self.weights[j]
                if a:
                    one_form = FormExpression(
                        {Monomial(self.zero_weight, (wc.holo_sym,)): a}
                    )
                    out = out + one_form.wedge(base)
                if b:
                    one_form = FormExpression(
                        {Monomial(self.zero_weight, (wc.anti_sym,)): b}
                    )
                    out = out + one_form.wedge(base)
            sign = ONE
            for pos, idx in enumerate(m.wedge):
                ds = self._structural.get(idx)
                if ds:
                    rest = Monomial(m.weight, m.wedge[:pos] + m.wedge[pos + 1 :])
                    term = ds.wedge(FormExpression({rest: c * sign}))
                    out = out + term
                sign = -sign
        return out

    def validate_structural_differentials(
        self, weights_for_symbols: Optional[Dict[str, GaussianRational]] = None
    ) -> Optional[str]:
        """Check d^2 = 0 on every symbol; returns the first violation or None.

        With weights_for_symbols (symbol name -> character exponent), also
        checks exponent compatibility: whenever d(s_k) contains s_i ^ s_j the
        exponents must satisfy w_i + w_j = w_k, so that attaching the
        characters keeps the weighted frame span closed.
        """
        for j, wc in enumerate(self.weights):
            for idx in (wc.holo_sym, wc.anti_sym):
                if self._structural.get(idx):
                    return (
                        f"weight coordinate form {self.symbol_name(idx)!r} "
                        "must have zero structural differential"
                    )
        for sym in self.symbols:
            ds = self._structural.get(sym.index)
            if not ds:
                continue
            dds = self.differential(ds)
            if dds:
                return f"d(d({sym.name})) != 0"
            if weights_for_symbols is not None:
                wk = weights_for_symbols.get(sym.name)
                if wk is None:
                    continue
                for m in ds.terms:
                    exps = []
                    for i in m.wedge:
                        wi = weights_for_symbols.get(self.symbol_name(i))
                        if wi is None:
                            exps = None
                            break
                        exps.append(wi)
                    if exps is not None and sum(exps, G(0)) != wk:
                        names = "^".join(self.symbol_name(i) for i in m.wedge)
                        return (
                            f"weight incompatibility: d({sym.name}) contains {names} "
                            f"but exponents do not add up"
                        )
        return None

    def format_form(self, x: FormExpression) -> str:
        if not x:
            return "0"
        bits = []
        for m in sorted(x.terms, key=lambda m: (m.wedge, tuple((str(a), str(b)) for a, b in m.weight))):
            c = x.terms[m]
            w = ""
            if any(a or b for a, b in m.weight):
                pairs = ",".join(f"{a},{b}" for a, b in m.weight)
                w = f"w[{pairs}]"
            body = "^".join(self.symbol_name(i) for i in m.wedge) or "1"
            bits.append(f"({c})*{w}{body}")
        return " + ".join(bits)


_ZERO_FORM = FormExpression()


def split_by_bidegree(
    algebra: Algebra, x: FormExpression, frame: List[FrameElement]
) -> Dict[Tuple[int, int], Dict[Tuple[str, ...], GaussianRational]]:
    """Coefficients of x on wedge products of frame elements, by bidegree.

    Raises DgaError("not in frame span") when x cannot be written in the
    exterior algebra of the given frame, which is exactly the failure of the
    candidate span to be closed.
    """
    from itertools import combinations

    from ddbar.linalg import IncrementalSpan

    degrees = x.degrees()
    if not degrees:
        return {}
    if len(degrees) != 1:
        raise DgaError("split_by_bidegree expects a homogeneous-degree form")
    (k,) = degrees
    products: List[Tuple[Tuple[str, ...], Tuple[int, int], FormExpression]] = []
    for combo in combinations(frame, k):
        value = combo[0].value
        for el in combo[1:]:
            value = value.wedge(el.value)
        p = sum(1 for el in combo if el.bidegree == (1, 0))
        products.append((tuple(el.name for el in combo), (p, k - p), value))

    index: Dict[Monomial, int] = {}

    def coords(form: FormExpression):
        v = {}
        for m, c in form.terms.items():
            v[index.setdefault(m, len(index))] = c
        return v

    span = IncrementalSpan(track=True)
    vecs = [coords(value) for _, _, value in products]
    target = coords(x)
    for v in vecs:
        span.insert(v)
    combo_coeffs = span.solve(target)
    if combo_coeffs is None:
        raise DgaError("not in frame span")
    out: Dict[Tuple[int, int], Dict[Tuple[str, ...], GaussianRational]] = {}
    for j, c in combo_coeffs.items():
        names, bidegree, _ = products[j]
        out.setdefault(bidegree, {})[names] = c
    return out
