"""Built-in model builders and the deformation scan.

The builders produce the solvmanifold-style complexes the engine is pointed
at: the standard two-step example with diag(e^z, e^-z) twist (variants B and
C, two deformation families), the generalized semidirect-product family with
a doubled nilpotent factor, a one-coordinate torus, and the classical
three-dimensional nilmanifold.  Character selections (which weights occur)
are input data of each builder, not derived.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from ddbar.bicomplex import BuiltComplex, DoubleComplex, build_from_frames
from ddbar.cohomology import de_rham, deldelbar_lemma, dolbeault, e1_degeneration
from ddbar.dga import Algebra, DgaError, FormExpression, FrameElement
from ddbar.scalars import G, GaussianRational


class ModelError(ValueError):
    """Inadmissible model parameters or an impossible construction."""


@dataclass
class NakamuraSpec:
    variant: str = "B"              # "B" or "C"
    deformation: str = "none"       # "none", "case1", "case2"
    t: GaussianRational = field(default_factory=lambda: G(0))

    def __post_init__(self):
        if self.variant not in ("B", "C"):
            raise ModelError(f"unknown variant {self.variant!r}")
        if self.deformation not in ("none", "case1", "case2"):
            raise ModelError(f"unknown deformation {self.deformation!r}")
        if self.deformation == "none" and self.t:
            raise ModelError("undeformed model requires t = 0")
        if self.deformation == "case1" and self.t.abs_sq() == 1:
            raise ModelError("frame change singular: case1 requires |t|^2 != 1")
        if self.variant == "C" and self.deformation == "case2" and self.t:
            raise ModelError(
                "no finite sub-double-complex: the C-style span of case2 is not "
                "closed under del and delbar for t != 0"
            )


@dataclass
class SawaiYamadaSpec:
    m: int = 1
    structure_constants: Dict[Tuple[int, int, int], int] = field(default_factory=dict)
    weights: Tuple[int, ...] = (1,)
    t: GaussianRational = field(default_factory=lambda: G(0))

    def __post_init__(self):
        if self.m < 1:
            raise ModelError("m must be >= 1")
        if len(self.weights) != self.m:
            raise ModelError("need one positive integer weight per generator")
        if any(k < 1 for k in self.weights):
            raise ModelError("weights must be positive integers")
        for (i, j, k), value in self.structure_constants.items():
            if not (1 <= i < j < k <= self.m):
                raise ModelError(
                    f"structure constant indices must satisfy 1 <= i < j < k <= m, got {(i, j, k)}"
                )
            if value and self.weights[i - 1] + self.weights[j - 1] != self.weights[k - 1]:
                raise ModelError(
                    f"weight incompatibility: bracket ({i},{j})->{k} needs "
                    f"k_{i} + k_{j} = k_{k}"
                )


@dataclass
class GeneratorListSpec:
    """Explicit generator data, the generic vehicle for user-defined models."""

    name: str
    algebra: Algebra
    frames: Dict[str, FrameElement]
    span_sets: List[List[str]]
    metric: Optional[List[str]] = None


class BuiltModel:
    """A built complex with its frame data and model-level metadata."""

    def __init__(
        self,
        name: str,
        t: GaussianRational,
        built: BuiltComplex,
        frame_sets: List[List[FrameElement]],
        metric_frame: Optional[List[FrameElement]],
        theorem_mode: str,
        reference_factory: Optional[Callable[[], "BuiltModel"]] = None,
    ):
        self.name = name
        self.t = t
        self.built = built
        self.frame_sets = frame_sets
        self.metric_frame = metric_frame
        self.theorem_mode = theorem_mode  # "dolbeault" or "double"
        self._reference_factory = reference_factory
        self._betti: Optional[Dict[int, int]] = None

    @property
    def complex(self) -> DoubleComplex:
        return self.built.complex

    def betti(self) -> Dict[int, int]:
        """Total-cohomology dimensions backing the degeneration predicate.

        For a d-closed span this is the complex's own total cohomology.  For
        a delbar-only span it is computed on the same family at t = 0 (the
        total cohomology is a deformation invariant), never read from tables.
        """
        if self._betti is None:
            if self.complex.has_del:
                self._betti = de_rham(self.complex).dims
            elif self._reference_factory is not None:
                self._betti = self._reference_factory().betti()
            else:
                raise ModelError(
                    "no del matrices and no reference family for total cohomology"
                )
        return self._betti

    def e1_degeneration(self) -> bool:
        if self.complex.has_del:
            return e1_degeneration(self.complex)
        return e1_degeneration(self.complex, betti=self.betti())

    def deldelbar_lemma(self) -> bool:
        if not self.complex.has_del:
            raise ModelError(
                "ddbar-lemma needs a d-closed span; this model is delbar-only"
            )
        return deldelbar_lemma(self.complex)


def _nakamura_algebra() -> Algebra:
    alg = Algebra()
    alg.declare_pair("dz1", "dz1b")
    alg.declare_pair("dz2", "dz2b")
    alg.declare_pair("dz3", "dz3b")
    alg.declare_weight("z1", "dz1", "dz1b")
    return alg


def _w(alg: Algebra, a: int, b: int, syms, coeff=None) -> FormExpression:
    c = G(1) if coeff is None else coeff
    return alg.monomial(syms, weight={"z1": (G(a), G(b))}, coeff=c)


def build_nakamura(spec: NakamuraSpec) -> BuiltModel:
    alg = _nakamura_algebra()
    t = spec.t
    tb = t.conjugate()
    if spec.deformation == "case2":
        f1 = FrameElement(
            "f1", (1, 0), alg.monomial(["dz1"]) + _w(alg, 1, 0, ["dz3b"], coeff=-t)
        )
        fb1 = FrameElement(
            "fb1", (0, 1), alg.monomial(["dz1b"]) + _w(alg, 0, 1, ["dz3"], coeff=-tb)
        )
    else:
        f1 = FrameElement(
            "f1", (1, 0), alg.monomial(["dz1"]) + alg.monomial(["dz1b"], coeff=-t)
        )
        fb1 = FrameElement(
            "fb1", (0, 1), alg.monomial(["dz1b"]) + alg.monomial(["dz1"], coeff=-tb)
        )
    f2 = FrameElement("f2", (1, 0), _w(alg, -1, 0, ["dz2"]))
    f3 = FrameElement("f3", (1, 0), _w(alg, 1, 0, ["dz3"]))
    fb2 = FrameElement("fb2", (0, 1), _w(alg, -1, 0, ["dz2b"]))
    fb3 = FrameElement("fb3", (0, 1), _w(alg, 1, 0, ["dz3b"]))
    g2 = FrameElement("g2", (1, 0), _w(alg, 0, -1, ["dz2"]))
    g3 = FrameElement("g3", (1, 0), _w(alg, 0, 1, ["dz3"]))
    gb2 = FrameElement("gb2", (0, 1), _w(alg, 0, -1, ["dz2b"]))
    gb3 = FrameElement("gb3", (0, 1), _w(alg, 0, 1, ["dz3b"]))

    a_frame = [f1, f2, f3, fb1, fb2, fb3]
    conj_frame = [f1, g2, g3, fb1, gb2, gb3]
    metric = [f1, f2, f3]

    if spec.variant == "B":
        span_sets = [a_frame]
        typing = [g2, g3, gb2, gb3] if spec.deformation == "case2" else []
        theorem_mode = "dolbeault"
    else:
        span_sets = [a_frame, conj_frame]
        typing = []
        theorem_mode = "double"

    built = build_from_frames(
        alg, span_sets, typing, allow_dolbeault_only=(spec.variant == "B")
    )

    reference = None
    if not built.complex.has_del:
        zero_spec = NakamuraSpec(spec.variant, "none", G(0))
        reference = lambda: build_nakamura(zero_spec)

    name = f"nakamura-{spec.variant}"
    if spec.deformation != "none":
        name += f"-{spec.deformation}"
    return BuiltModel(name, t, built, span_sets, metric, theorem_mode, reference)


def nakamura_case2_cstyle_frames(t: GaussianRational):
    """The case-2 analogue of the C span, for hypothesis checking only.

    This span is not closed under del or delbar for t != 0; the builder
    refuses it, but the checker reports exactly where closure fails.
    """
    spec = NakamuraSpec("B", "case2", t)  # validates t; frames rebuilt below
    alg = _nakamura_algebra()
    tb = t.conjugate()
    f1 = FrameElement(
        "f1", (1, 0), alg.monomial(["dz1"]) + _w(alg, 1, 0, ["dz3b"], coeff=-t)
    )
    fb1 = FrameElement(
        "fb1", (0, 1), alg.monomial(["dz1b"]) + _w(alg, 0, 1, ["dz3"], coeff=-tb)
    )
    f2 = FrameElement("f2", (1, 0), _w(alg, -1, 0, ["dz2"]))
    f3 = FrameElement("f3", (1, 0), _w(alg, 1, 0, ["dz3"]))
    fb2 = FrameElement("fb2", (0, 1), _w(alg, -1, 0, ["dz2b"]))
    fb3 = FrameElement("fb3", (0, 1), _w(alg, 1, 0, ["dz3b"]))
    g2 = FrameElement("g2", (1, 0), _w(alg, 0, -1, ["dz2"]))
    g3 = FrameElement("g3", (1, 0), _w(alg, 0, 1, ["dz3"]))
    gb2 = FrameElement("gb2", (0, 1), _w(alg, 0, -1, ["dz2b"]))
    gb3 = FrameElement("gb3", (0, 1), _w(alg, 0, 1, ["dz3b"]))
    a_frame = [f1, f2, f3, fb1, fb2, fb3]
    conj_frame = [f1, g2, g3, fb1, gb2, gb3]
    return alg, [a_frame, conj_frame], [f1, f2, f3]


def build_sawai_yamada(spec: SawaiYamadaSpec) -> BuiltModel:
    alg = Algebra()
    alg.declare_pair("dz", "dzb")
    alg.declare_weight("z", "dz", "dzb")
    for j in range(1, spec.m + 1):
        alg.declare_pair(f"y1_{j}", f"y1b_{j}")
    for j in range(1, spec.m + 1):
        alg.declare_pair(f"y2_{j}", f"y2b_{j}")

    by_target: Dict[int, List[Tuple[int, int, int]]] = {}
    for (i, j, k), value in sorted(spec.structure_constants.items()):
        if value:
            by_target.setdefault(k, []).append((i, j, value))
    for copy in ("y1", "y2"):
        for k, terms in by_target.items():
            form = FormExpression()
            for i, j, value in terms:
                form = form + alg.monomial([f"{copy}_{i}", f"{copy}_{j}"], coeff=G(-value))
            alg.set_structural(f"{copy}_{k}", form)

    compat = {}
    for j, k in enumerate(spec.weights, start=1):
        for name in (f"y1_{j}", f"y1b_{j}", f"y2_{j}", f"y2b_{j}"):
            compat[name] = G(k)
    violation = alg.validate_structural_differentials(compat)
    if violation:
        raise ModelError(violation)

    t = spec.t
    tb = t.conjugate()
    k1 = spec.weights[0]

    def wz(a, b, syms, coeff=None):
        c = G(1) if coeff is None else coeff
        return alg.monomial(syms, weight={"z": (G(a), G(b))}, coeff=c)

    u0 = FrameElement("u0", (1, 0), alg.monomial(["dz"]) + wz(k1, 0, ["y2b_1"], coeff=-t))
    ub0 = FrameElement("ub0", (0, 1), alg.monomial(["dzb"]) + wz(0, k1, ["y2_1"], coeff=-tb))
    span = [u0]
    typing = []
    for j, k in enumerate(spec.weights, start=1):
        span.append(FrameElement(f"u1_{j}", (1, 0), wz(-k, 0, [f"y1_{j}"])))
    for j, k in enumerate(spec.weights, start=1):
        span.append(FrameElement(f"u2_{j}", (1, 0), wz(k, 0, [f"y2_{j}"])))
    span.append(ub0)
    for j, k in enumerate(spec.weights, start=1):
        span.append(FrameElement(f"ub1_{j}", (0, 1), wz(-k, 0, [f"y1b_{j}"])))
    for j, k in enumerate(spec.weights, start=1):
        span.append(FrameElement(f"ub2_{j}", (0, 1), wz(k, 0, [f"y2b_{j}"])))
    for j, k in enumerate(spec.weights, start=1):
        typing.append(FrameElement(f"v1_{j}", (1, 0), wz(0, -k, [f"y1_{j}"])))
        typing.append(FrameElement(f"v2_{j}", (1, 0), wz(0, k, [f"y2_{j}"])))
        typing.append(FrameElement(f"vb1_{j}", (0, 1), wz(0, -k, [f"y1b_{j}"])))
        typing.append(FrameElement(f"vb2_{j}", (0, 1), wz(0, k, [f"y2b_{j}"])))

    built = build_from_frames(alg, [span], typing, allow_dolbeault_only=True)
    metric = [el for el in span if el.bidegree == (1, 0)]

    reference = None
    if not built.complex.has_del:
        zero_spec = SawaiYamadaSpec(spec.m, dict(spec.structure_constants), spec.weights, G(0))
        reference = lambda: build_sawai_yamada(zero_spec)
    return BuiltModel("sawai-yamada", t, built, [span], metric, "dolbeault", reference)


def build_torus(t: GaussianRational = None) -> BuiltModel:
    """One-coordinate torus; the constant family (t is accepted and ignored)."""
    alg = Algebra()
    alg.declare_pair("dz1", "dz1b")
    e1 = FrameElement("e1", (1, 0), alg.monomial(["dz1"]))
    eb1 = FrameElement("eb1", (0, 1), alg.monomial(["dz1b"]))
    built = build_from_frames(alg, [[e1, eb1]])
    return BuiltModel("torus", t or G(0), built, [[e1, eb1]], [e1], "double")


def build_iwasawa(t: GaussianRational = None) -> BuiltModel:
    """Invariant complex of the classical 3-dimensional nilmanifold."""
    if t:
        raise ModelError("this model has no deformation parameter; use t = 0")
    alg = Algebra()
    alg.declare_pair("s1", "s1b")
    alg.declare_pair("s2", "s2b")
    alg.declare_pair("s3", "s3b")
    alg.set_structural("s3", alg.monomial(["s1", "s2"], coeff=G(-1)))
    violation = alg.validate_structural_differentials()
    if violation:
        raise ModelError(violation)
    frame = [
        FrameElement("s1", (1, 0), alg.monomial(["s1"])),
        FrameElement("s2", (1, 0), alg.monomial(["s2"])),
        FrameElement("s3", (1, 0), alg.monomial(["s3"])),
        FrameElement("s1b", (0, 1), alg.monomial(["s1b"])),
        FrameElement("s2b", (0, 1), alg.monomial(["s2b"])),
        FrameElement("s3b", (0, 1), alg.monomial(["s3b"])),
    ]
    built = build_from_frames(alg, [frame])
    return BuiltModel("iwasawa", G(0), built, [frame], frame[:3], "double")


def build_from_spec(spec: GeneratorListSpec, theorem_mode: Optional[str] = None) -> BuiltModel:
    violation = spec.algebra.validate_structural_differentials()
    if violation:
        raise ModelError(violation)
    span_sets = []
    for names in spec.span_sets:
        try:
            span_sets.append([spec.frames[n] for n in names])
        except KeyError as exc:
            raise ModelError(f"unknown frame element {exc.args[0]!r} in complex declaration")
    in_span = {n for names in spec.span_sets for n in names}
    typing = [el for name, el in spec.frames.items() if name not in in_span]
    built = build_from_frames(spec.algebra, span_sets, typing, allow_dolbeault_only=True)
    metric = None
    if spec.metric:
        try:
            metric = [spec.frames[n] for n in spec.metric]
        except KeyError as exc:
            raise ModelError(f"unknown frame element {exc.args[0]!r} in metric declaration")
        if any(el.bidegree != (1, 0) for el in metric):
            raise ModelError("metric frame must consist of (1,0) elements")
    if theorem_mode is None:
        theorem_mode = "double" if built.complex.has_del else "dolbeault"
    return BuiltModel(spec.name, G(0), built, span_sets, metric, theorem_mode)


HEISENBERG_M3 = SawaiYamadaSpec(
    m=3, structure_constants={(1, 2, 3): 1}, weights=(1, 1, 2), t=G(0)
)


def _builtin(name: str, t: GaussianRational) -> BuiltModel:
    if name == "nakamura-B":
        return build_nakamura(NakamuraSpec("B", "none", t))
    if name == "nakamura-C":
        return build_nakamura(NakamuraSpec("C", "none", t))
    if name == "nakamura-B-case1":
        return build_nakamura(NakamuraSpec("B", "case1", t))
    if name == "nakamura-C-case1":
        return build_nakamura(NakamuraSpec("C", "case1", t))
    if name == "nakamura-B-case2":
        return build_nakamura(NakamuraSpec("B", "case2", t))
    if name == "nakamura-C-case2":
        raise ModelError(
            "no finite sub-double-complex: nakamura-C-case2 supports hypothesis "
            "checks only"
        )
    if name == "sawai-yamada":
        return build_sawai_yamada(SawaiYamadaSpec(m=1, weights=(1,), t=t))
    if name == "torus":
        return build_torus(t)
    if name == "iwasawa":
        return build_iwasawa(t)
    raise ModelError(f"unknown model {name!r}")


BUILTIN_DEFAULT_T: Dict[str, GaussianRational] = {
    "nakamura-B": G(0),
    "nakamura-C": G(0),
    "nakamura-B-case1": G("1/2"),
    "nakamura-C-case1": G("1/2"),
    "nakamura-B-case2": G("1/2"),
    "nakamura-C-case2": G("1/2"),
    "sawai-yamada": G("1/2"),
    "torus": G(0),
    "iwasawa": G(0),
}

BUILTIN_MODELS = tuple(BUILTIN_DEFAULT_T)


def build_builtin(name: str, t: Optional[GaussianRational] = None) -> BuiltModel:
    if name not in BUILTIN_DEFAULT_T:
        raise ModelError(f"unknown model {name!r}")
    if t is None:
        t = BUILTIN_DEFAULT_T[name]
    return _builtin(name, t)


@dataclass
class ScanRow:
    t: GaussianRational
    dolbeault_dims: Optional[Dict] = None
    e1: Optional[bool] = None
    lemma: Optional[bool] = None
    error: Optional[str] = None


@dataclass
class ScanReport:
    family: str
    rows: List[ScanRow]
    dim_changes: List[str]
    nonclosed: List[str]

    def summary_lines(self) -> List[str]:
        if self.nonclosed:
            return [
                f"not closed under deformation: {name} holds for all t != 0 "
                f"but fails at t = 0"
                for name in self.nonclosed
            ]
        if self.dim_changes:
            return ["no predicate changes; dimensions move: " + "; ".join(self.dim_changes)]
        return ["no property changes"]


def _family_factories(family: str):
    if family in ("nakamura-case1", "nakamura-B-case1", "nakamura-C-case1"):
        return (
            lambda t: build_nakamura(NakamuraSpec("B", "case1" if t else "none", t)),
            lambda t: build_nakamura(NakamuraSpec("C", "case1" if t else "none", t)),
        )
    if family in ("nakamura-case2", "nakamura-B-case2"):
        return (
            lambda t: build_nakamura(NakamuraSpec("B", "case2" if t else "none", t)),
            lambda t: build_nakamura(NakamuraSpec("C", "none", G(0))) if not t else None,
        )
    if family == "torus":
        return (build_torus, build_torus)
    if family == "sawai-yamada":
        return (
            lambda t: build_sawai_yamada(SawaiYamadaSpec(m=1, weights=(1,), t=t)),
            lambda t: build_sawai_yamada(SawaiYamadaSpec(m=1, weights=(1,), t=t)),
        )
    raise ModelError(f"unknown scan family {family!r}")


SCAN_FAMILIES = ("nakamura-case1", "nakamura-case2", "torus", "sawai-yamada")


def deformation_scan(family: str, t_values: Sequence[GaussianRational]) -> ScanReport:
    """Per-t property rows plus a closedness summary.

    Per-t admissibility errors are collected in the rows, not raised.
    """
    dolbeault_factory, bc_factory = _family_factories(family)
    rows: List[ScanRow] = []
    for t in t_values:
        row = ScanRow(t)
        try:
            model = dolbeault_factory(t)
            row.dolbeault_dims = dolbeault(model.complex).dims
            row.e1 = model.e1_degeneration()
            bc_model = bc_factory(t)
            if bc_model is not None and bc_model.complex.has_del:
                row.lemma = deldelbar_lemma(bc_model.complex)
        except (ModelError, DgaError) as exc:
            row.error = str(exc)
        rows.append(row)

    base = next((r for r in rows if not r.t and not r.error), None)
    deformed = [r for r in rows if r.t and not r.error]
    nonclosed: List[str] = []
    dim_changes: List[str] = []
    if base is not None and deformed:
        for label, getter in (
            ("e1-degeneration", lambda r: r.e1),
            ("ddbar-lemma", lambda r: r.lemma),
        ):
            values = [getter(r) for r in deformed]
            if all(v is True for v in values) and getter(base) is False:
                nonclosed.append(label)
        for key in sorted(base.dolbeault_dims):
            values = {r.dolbeault_dims.get(key, 0) for r in deformed}
            if len(values) == 1:
                (value,) = values
                if value != base.dolbeault_dims[key]:
                    p, q = key
                    dim_changes.append(
                        f"h[{p}][{q}]: {base.dolbeault_dims[key]} -> {value}"
                    )
    return ScanReport(family, rows, dim_changes, nonclosed)
