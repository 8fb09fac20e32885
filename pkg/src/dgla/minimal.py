"""Relative models with base: minimality, the staged construction, verification.

A relative model is a free dg Lie algebra on base generators V plus staged
fiber generators W, together with a structure map q to a target dg Lie
algebra.  Stage n contributes A-generators in degree n (killed by d) that
make H_n(q) surjective and B-generators in degree n+1 whose differentials
kill the kernel of H_n(q).  All the "choose a section" steps of the
construction are pinned to the rref pivot rule, so rebuilding from the same
input reproduces the same model byte for byte.

One deliberate deviation from the construction as usually stated: the
structure map must commute with the differentials, so a B-generator b with
d(b) = z cannot always be sent to zero; q(b) is the canonical preimage of
q(z) under the target differential (which exists exactly because [z] dies in
the target).  When q(z) = 0 this reduces to q(b) = 0.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .dg import DGLAMorphism, Element, QuasiFreeDGLA, induced_map_on_homology, validate
from .errors import (
    DegreeBoundTooSmall,
    FormatError,
    NotAChainMap,
    NotSimplyConnected,
)
from .exprs import tree_leaves
from .freelie import FreeGLA, GradedGenerator, LiePoly
from .linalg import Matrix, Subspace, kernel_basis, quotient_data, solve_pivot

_STAGE_NAME = re.compile(r"^[ab]_\d+_\d+$")


@dataclass(frozen=True)
class Stage:
    A: tuple[str, ...]
    B: tuple[str, ...]


@dataclass(frozen=True)
class MinimalityReport:
    witnesses: tuple[tuple[str, LiePoly], ...]

    @property
    def is_minimal(self) -> bool:
        return not self.witnesses


@dataclass(frozen=True)
class ModelReport:
    checks: tuple[tuple[str, bool, str], ...]

    @property
    def ok(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def failed(self) -> tuple[tuple[str, bool, str], ...]:
        return tuple(c for c in self.checks if not c[1])


class RelativeModel:
    """L(V + W) with marked base V, staged fiber W, and structure map q."""

    def __init__(
        self,
        dgla: QuasiFreeDGLA,
        base_names: tuple[str, ...],
        stages: tuple[Stage, ...],
        q: DGLAMorphism,
    ):
        self.dgla = dgla
        self.base_names = tuple(base_names)
        self.stages = tuple(stages)
        self.q = q
        if q.source is not dgla:
            raise FormatError("structure map must be defined on the model algebra")
        expected = list(self.base_names)
        for stage in self.stages:
            expected.extend(stage.A)
            expected.extend(stage.B)
        actual = [g.name for g in dgla.generators]
        if actual != expected:
            raise FormatError(
                "generator order must list the base, then each stage's "
                "A-generators followed by its B-generators"
            )
        self._by_name = {g.name: g for g in dgla.generators}
        self._sub_algebras: dict[tuple[str, ...], FreeGLA] = {}

    @property
    def target(self):
        return self.q.target

    @property
    def base_generators(self) -> tuple[GradedGenerator, ...]:
        return tuple(self._by_name[n] for n in self.base_names)

    @property
    def fiber_names(self) -> tuple[str, ...]:
        base = set(self.base_names)
        return tuple(g.name for g in self.dgla.generators if g.name not in base)

    @property
    def fiber_generators(self) -> tuple[GradedGenerator, ...]:
        return tuple(self._by_name[n] for n in self.fiber_names)

    def degree_of(self, name: str) -> int:
        return self._by_name[name].degree

    def max_generator_degree(self) -> int:
        return self.dgla.max_generator_degree()

    def stage_of(self, name: str) -> int:
        """Stage number (1-based) that introduced a fiber generator."""
        for n, stage in enumerate(self.stages, start=1):
            if name in stage.A or name in stage.B:
                return n
        raise KeyError(name)

    def fiber_atom_indices(self, k: int) -> tuple[tuple[str, int], ...]:
        """(fiber generator, its basis index) pairs in the degree-k basis."""
        base = set(self.base_names)
        out = []
        for g in self.dgla.generators:
            if g.degree == k and g.name not in base:
                _, idx = self.dgla.algebra.atom(g.name)
                out.append((g.name, idx))
        return tuple(out)

    def sub_algebra(self, names: tuple[str, ...]) -> FreeGLA:
        """Free algebra on a generator subset, in ambient order (cached)."""
        hit = self._sub_algebras.get(names)
        if hit is not None:
            return hit
        sub = FreeGLA([self._by_name[n] for n in names])
        return self._sub_algebras.setdefault(names, sub)

    def generators_up_to(self, k: int) -> tuple[str, ...]:
        """Base plus fiber generators of degree <= k (the algebra M<k>)."""
        base = set(self.base_names)
        return tuple(
            g.name
            for g in self.dgla.generators
            if g.name in base or g.degree <= k
        )


def is_minimal(model: RelativeModel) -> MinimalityReport:
    """Project each fiber differential onto the linear span of the fiber.

    Linear base terms are fine (the projection kills them); a witness is a
    fiber generator whose differential has a nonzero linear fiber part.
    """
    witnesses = []
    for g in model.fiber_generators:
        image = model.dgla.differential.get(g.name)
        if image is None or g.degree - 1 < 1:
            continue
        _, coords = model.dgla.algebra.normalize(image, g.degree - 1)
        offending = [
            (coords[idx], name)
            for name, idx in model.fiber_atom_indices(g.degree - 1)
            if coords[idx] != 0
        ]
        if offending:
            witnesses.append((g.name, LiePoly(offending)))
    return MinimalityReport(tuple(witnesses))


def _require_valid(algebra) -> None:
    report = validate(algebra)
    if report.ok:
        return
    first = report.first
    if "simply connected" in first:
        raise NotSimplyConnected(first)
    raise FormatError(first)


def build_minimal_model(f: DGLAMorphism, bound: int) -> RelativeModel:
    """Construct the minimal relative model of f: L(V) -> g, staged to `bound`.

    After stage k the structure map is an H_i-isomorphism for i <= k; the
    result is minimal and extends f.  All sections are pivot-rule canonical,
    so the output is deterministic.
    """
    if bound < 1:
        raise DegreeBoundTooSmall("the degree bound must be at least 1")
    source, target = f.source, f.target
    _require_valid(source)
    _require_valid(target)
    if not f.is_chain_map():
        raise NotAChainMap(
            "input map does not commute with the differentials on "
            + ", ".join(f.chain_defects())
        )
    for g in source.generators:
        if _STAGE_NAME.match(g.name):
            raise FormatError(
                f"base generator name {g.name!r} collides with the reserved "
                "stage naming scheme a_<stage>_<index> / b_<stage>_<index>"
            )

    gens = list(source.generators)
    diffs = dict(source.differential)
    qimages = dict(f.images)
    base_names = tuple(g.name for g in source.generators)
    stages: list[Stage] = []

    for k in range(1, bound + 1):
        current = QuasiFreeDGLA(gens, diffs)
        q = DGLAMorphism(current, target, qimages)
        h_model = current.homology(k)
        h_target = target.homology(k)
        hq = induced_map_on_homology(q, k)

        image = Subspace(h_target.dim, hq.columns())
        _, coker_reps = quotient_data(h_target.dim, image)
        a_names = []
        for i, rep in enumerate(coker_reps):
            name = f"a_{k}_{i}"
            a_names.append(name)
            gens.append(GradedGenerator(name, k))
            qimages[name] = Element(k, h_target.rep_of(rep))

        kernel = kernel_basis(hq)
        b_names = []
        for j, kappa in enumerate(kernel.basis):
            name = f"b_{k}_{j}"
            b_names.append(name)
            gens.append(GradedGenerator(name, k + 1))
            cycle = h_model.rep_of(kappa)
            diffs[name] = current.poly(Element(k, cycle))
            qv = q.apply(Element(k, cycle))
            eta = solve_pivot(target.d_matrix(k + 1), qv.coords)
            if eta is None:
                raise ArithmeticError(
                    "structure-map value of a kernel cycle is not a boundary; "
                    "this indicates an internal homology bug"
                )
            qimages[name] = Element(k + 1, eta)
        stages.append(Stage(tuple(a_names), tuple(b_names)))

    full = QuasiFreeDGLA(gens, diffs)
    q_full = DGLAMorphism(full, target, qimages)
    return RelativeModel(full, base_names, tuple(stages), q_full)


def verify_model(
    model: RelativeModel, bound: int, against: DGLAMorphism | None = None
) -> ModelReport:
    """Re-check every posted property of a relative model, independently.

    Covers: well-formedness of both algebras, the staged degree layout, the
    KS chain condition (each stage's differentials land in cycles of the
    earlier stages), the three staged-construction constraints checked below
    as condition-d (A-generators are killed by d), condition-e (B-generator
    differentials avoid the previous stage's B-generators and the whole
    current stage) and condition-f (d is injective on each stage's B-span),
    minimality, the structure map being a chain map, agreement with the
    original map on the base (when given), and H_i(q) being an isomorphism
    for i <= bound.
    """
    checks: list[tuple[str, bool, str]] = []

    report = validate(model.dgla)
    checks.append(("algebra-valid", report.ok, report.first or ""))
    treport = validate(model.target)
    checks.append(("target-valid", treport.ok, treport.first or ""))
    if not report.ok or not treport.ok:
        return ModelReport(tuple(checks))

    layout_bad = []
    for n, stage in enumerate(model.stages, start=1):
        for name in stage.A:
            if model.degree_of(name) != n:
                layout_bad.append(f"{name} should have degree {n}")
        for name in stage.B:
            if model.degree_of(name) != n + 1:
                layout_bad.append(f"{name} should have degree {n + 1}")
    checks.append(("stage-degrees", not layout_bad, "; ".join(layout_bad)))

    base = set(model.base_names)
    bad = [
        v
        for v in model.base_names
        if not model.dgla.differential.get(v, LiePoly.zero()).support() <= base
    ]
    checks.append(
        ("base-subalgebra", not bad, f"d leaves the base on {', '.join(bad)}" if bad else "")
    )

    ks_bad = []
    for n, stage in enumerate(model.stages, start=1):
        allowed = base | {
            name
            for m, s in enumerate(model.stages, start=1)
            if m < n
            for name in s.A + s.B
        }
        for name in stage.A + stage.B:
            d_im = model.dgla.differential.get(name, LiePoly.zero())
            if not d_im.support() <= allowed:
                ks_bad.append(name)
    checks.append(
        (
            "ks-chain",
            not ks_bad,
            f"differential uses later-stage generators on {', '.join(ks_bad)}"
            if ks_bad
            else "",
        )
    )

    da_bad = [
        name
        for stage in model.stages
        for name in stage.A
        if not model.dgla.differential.get(name, LiePoly.zero()).is_zero()
    ]
    checks.append(
        ("condition-d", not da_bad, f"d nonzero on {', '.join(da_bad)}" if da_bad else "")
    )

    e_bad = []
    for n, stage in enumerate(model.stages, start=1):
        veto = set(stage.A) | set(stage.B)
        if n >= 2:
            veto |= set(model.stages[n - 2].B)
        for name in stage.B:
            image = model.dgla.differential.get(name, LiePoly.zero())
            if image.is_zero():
                continue
            degree = model.degree_of(name) - 1
            _, coords = model.dgla.algebra.normalize(image, degree)
            monos = model.dgla.algebra.degree_basis(degree).monomials
            for idx, c in enumerate(coords):
                if c != 0 and set(tree_leaves(monos[idx])) & veto:
                    e_bad.append(name)
                    break
    checks.append(
        (
            "condition-e",
            not e_bad,
            f"forbidden generators in d of {', '.join(e_bad)}" if e_bad else "",
        )
    )

    f_bad = []
    for n, stage in enumerate(model.stages, start=1):
        if not stage.B:
            continue
        rows = []
        for name in stage.B:
            image = model.dgla.differential.get(name, LiePoly.zero())
            _, coords = model.dgla.algebra.normalize(image, n)
            rows.append(coords)
        if Matrix(rows, cols=model.dgla.dim(n)).rank() != len(stage.B):
            f_bad.append(str(n))
    checks.append(
        (
            "condition-f",
            not f_bad,
            f"d not injective on the B-span of stage {', '.join(f_bad)}"
            if f_bad
            else "",
        )
    )

    minreport = is_minimal(model)
    checks.append(
        (
            "minimal",
            minreport.is_minimal,
            ""
            if minreport.is_minimal
            else "linear fiber part in d of "
            + ", ".join(name for name, _ in minreport.witnesses),
        )
    )

    qchain = model.q.is_chain_map()
    checks.append(
        (
            "structure-map-chain",
            qchain,
            "" if qchain else "q fails to commute with d on "
            + ", ".join(model.q.chain_defects()),
        )
    )

    if against is not None:
        mismatches = []
        src_gens = {g.name: g.degree for g in against.source.generators}
        if {n: model.degree_of(n) for n in model.base_names} != src_gens:
            mismatches.append("base generators differ from the map's source")
        else:
            for name in model.base_names:
                d_model = model.dgla.differential.get(name, LiePoly.zero())
                d_src = against.source.differential.get(name, LiePoly.zero())
                _, a = model.dgla.algebra.embed(d_model)
                _, b = model.dgla.algebra.embed(d_src)
                if a != b:
                    mismatches.append(f"base differential differs on {name}")
                if model.q.images[name] != against.images[name]:
                    mismatches.append(f"q({name}) != f({name})")
        checks.append(("restricts-to-f", not mismatches, "; ".join(mismatches)))

    iso_bad = []
    if qchain:
        for i in range(1, bound + 1):
            hq = induced_map_on_homology(model.q, i)
            if hq.rows != hq.cols:
                iso_bad.append(f"H_{i}(q) is {hq.rows}x{hq.cols}")
            elif hq.rank() != hq.rows:
                iso_bad.append(f"H_{i}(q) is singular")
    else:
        iso_bad.append("structure map is not a chain map")
    checks.append(("quasi-iso", not iso_bad, "; ".join(iso_bad)))

    return ModelReport(tuple(checks))
