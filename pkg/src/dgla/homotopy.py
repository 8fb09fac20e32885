"""The algebraic group side: relative derivations, exp/log, equivalence.

Derivations vanishing on the base are stored by their fiber generator
images and extended by the graded derivation rule.  Degree-zero cycles of
the complex (with differential the graded commutator with d) form the Lie
algebra of the relative automorphism group; the degree-zero boundaries
exponentiate onto the subgroup of automorphisms homotopic to the identity
rel base, and that identification is what the equivalence decision runs on:

    f ~ g  iff  u = f o g^{-1} is unipotent-relative and log(u) is a boundary.

"Unipotent-relative" here demands that u fix the base exactly and that
(u - id) kill the linear fiber part of every fiber generator.  Linear *base*
terms are allowed: boundaries [d,G] produce them whenever some fiber
differential has a linear base part, and such operators are still nilpotent
in each degree (each application either raises word length or trades a
fiber letter for base letters, and base letters are annihilated).  The
strictly word-length-raising case is the one the exponential is usually
stated for; the relaxation keeps exp defined on all boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .dg import Element
from .errors import (
    DegreeBoundExceeded,
    FormatError,
    NotMinimal,
    NotRelativeAutomorphism,
    NotUnipotentRelative,
    NotWordLengthRaising,
)
from .freelie import LiePoly
from .invert import FilteredEndo, invert_relative_quasi_iso, is_relative_automorphism
from .linalg import (
    Matrix,
    Subspace,
    Vector,
    kernel_basis,
    solve_pivot,
    vec_is_zero,
    zero_vector,
)
from .minimal import RelativeModel, is_minimal


class RelDerivation:
    """A degree-homogeneous derivation of L(V + W) vanishing on L(V).

    Stored by fiber generator images (coordinates in the canonical basis of
    degree |w| + r); the extension to the whole algebra follows the graded
    rule  delta[a,b] = [delta a, b] + (-1)^{r |a|} [a, delta b].
    """

    def __init__(self, model: RelativeModel, degree: int, images: dict[str, Element]):
        self.model = model
        self.degree = degree
        fiber = set(model.fiber_names)
        self.images: dict[str, Element] = {}
        for name, el in images.items():
            if name not in fiber:
                raise FormatError(
                    f"derivation image for {name!r}, which is not a fiber generator"
                )
            expected = model.degree_of(name) + degree
            if el.degree != expected:
                raise FormatError(
                    f"derivation image of {name!r} has degree {el.degree}, "
                    f"expected {expected}"
                )
            if not el.is_zero():
                self.images[name] = el
        self._tree_cache: dict = {}
        self._matrices: dict[int, Matrix] = {}

    @classmethod
    def zero(cls, model: RelativeModel, degree: int = 0) -> "RelDerivation":
        return cls(model, degree, {})

    def image(self, name: str) -> Element:
        hit = self.images.get(name)
        if hit is not None:
            return hit
        return self.model.dgla.zero(self.model.degree_of(name) + self.degree)

    def is_zero(self) -> bool:
        return not self.images

    def value_tree(self, tree) -> Element:
        dgla = self.model.dgla
        if isinstance(tree, str):
            if tree in set(self.model.base_names):
                return dgla.zero(self.model.degree_of(tree) + self.degree)
            return self.image(tree)
        hit = self._tree_cache.get(tree)
        if hit is not None:
            return hit
        left, right = tree
        dl = self.value_tree(left)
        dr = self.value_tree(right)
        el = dgla.element(LiePoly([(Fraction(1), left)]))
        er = dgla.element(LiePoly([(Fraction(1), right)]))
        out_deg = el.degree + er.degree + self.degree
        total = dgla.zero(out_deg) if out_deg >= 1 else Element(out_deg, ())
        if out_deg >= 1:
            acc = list(total.coords)
            if not dl.is_zero() and dl.degree >= 1:
                for i, c in enumerate(dgla.bracket(dl, er).coords):
                    acc[i] += c
            sign = Fraction(-1 if (self.degree * el.degree) % 2 else 1)
            if not dr.is_zero() and dr.degree >= 1:
                for i, c in enumerate(dgla.bracket(el, dr).coords):
                    acc[i] += sign * c
            total = Element(out_deg, tuple(acc))
        return self._tree_cache.setdefault(tree, total)

    def value_poly(self, p: LiePoly, source_degree: int) -> Element:
        out_deg = source_degree + self.degree
        dim = self.model.dgla.dim(out_deg) if out_deg >= 1 else 0
        acc = [Fraction(0)] * dim
        for coeff, tree in p.terms:
            val = self.value_tree(tree)
            for i, c in enumerate(val.coords):
                acc[i] += coeff * c
        return Element(out_deg, tuple(acc))

    def matrix(self, k: int) -> Matrix:
        """The extension of the derivation as a map M_k -> M_{k+degree}."""
        hit = self._matrices.get(k)
        if hit is not None:
            return hit
        out_deg = k + self.degree
        rows = self.model.dgla.dim(out_deg) if out_deg >= 1 else 0
        cols = []
        if k >= 1:
            for tree in self.model.dgla.algebra.degree_basis(k).monomials:
                cols.append(self.value_tree(tree).coords)
        return self._matrices.setdefault(k, Matrix.from_columns(cols, rows))

    def linear_fiber_defects(self) -> list[str]:
        """Fiber generators whose image has a nonzero linear fiber part."""
        bad = []
        for g in self.model.fiber_generators:
            el = self.images.get(g.name)
            if el is None:
                continue
            for _, idx in self.model.fiber_atom_indices(el.degree):
                if el.coords[idx] != 0:
                    bad.append(g.name)
                    break
        return bad

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RelDerivation)
            and self.model is other.model
            and self.degree == other.degree
            and self.images == other.images
        )


@dataclass(frozen=True)
class DerSpace:
    """Coordinate chart on Der_r: one slot per (fiber generator, basis index)."""

    model: RelativeModel
    degree: int
    pairs: tuple[tuple[str, int], ...]
    offsets: dict

    @property
    def dim(self) -> int:
        return len(self.pairs)

    def pack(self, derivation: RelDerivation) -> Vector:
        if derivation.degree != self.degree:
            raise ValueError("derivation degree does not match the chart")
        out = []
        for name, j in self.pairs:
            out.append(derivation.image(name).coords[j])
        return tuple(out)

    def unpack(self, vec) -> RelDerivation:
        images: dict[str, Element] = {}
        for (name, j), c in zip(self.pairs, vec):
            if c == 0:
                continue
            deg = self.model.degree_of(name) + self.degree
            el = images.get(name)
            coords = list(el.coords) if el else [Fraction(0)] * self.model.dgla.dim(deg)
            coords[j] = Fraction(c)
            images[name] = Element(deg, tuple(coords))
        return RelDerivation(self.model, self.degree, images)


def der_space(model: RelativeModel, r: int) -> DerSpace:
    pairs = []
    offsets = {}
    for g in model.fiber_generators:
        deg = g.degree + r
        start = len(pairs)
        if deg >= 1:
            for j in range(model.dgla.dim(deg)):
                pairs.append((g.name, j))
        offsets[g.name] = (start, len(pairs) - start)
    return DerSpace(model, r, tuple(pairs), offsets)


def der_boundary_matrix(model: RelativeModel, r: int) -> Matrix:
    """Matrix of [d, -]: Der_r -> Der_{r-1} in the canonical charts."""
    src = der_space(model, r)
    dst = der_space(model, r - 1)
    sign = Fraction(-1 if r % 2 else 1)
    cols = []
    for name, j in src.pairs:
        deg = model.degree_of(name) + r
        unit = [Fraction(0)] * model.dgla.dim(deg)
        unit[j] = Fraction(1)
        delta = RelDerivation(model, r, {name: Element(deg, tuple(unit))})
        col = []
        for g in model.fiber_generators:
            out_deg = g.degree + r - 1
            if out_deg < 1:
                continue
            d_delta = model.dgla.d_matrix(g.degree + r).apply(
                delta.image(g.name).coords
            ) if g.degree + r >= 1 else zero_vector(model.dgla.dim(out_deg))
            d_poly = model.dgla.differential.get(g.name, LiePoly.zero())
            delta_d = delta.value_poly(d_poly, g.degree - 1).coords
            col.extend(a - sign * b for a, b in zip(d_delta, delta_d))
        cols.append(tuple(col))
    return Matrix.from_columns(cols, dst.dim)


@dataclass(frozen=True)
class DerComplexData:
    """One degree of the relative derivation complex, with its neighbours."""

    degree: int
    space: DerSpace
    boundary_out: Matrix
    boundary_in: Matrix
    cycles: Subspace
    boundaries: Subspace

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def homology_dim(self) -> int:
        return self.cycles.dim - self.boundaries.dim


def derivation_basis(model: RelativeModel, r: int, bound: int) -> DerComplexData:
    """The canonical chart on Der_r plus its cycle/boundary subspaces."""
    top = max((g.degree for g in model.fiber_generators), default=0)
    if top + r > bound:
        raise DegreeBoundExceeded(
            f"derivations of degree {r} need bases up to degree {top + r}, "
            f"beyond the bound {bound}"
        )
    space = der_space(model, r)
    out = der_boundary_matrix(model, r)
    into = der_boundary_matrix(model, r + 1)
    return DerComplexData(
        r, space, out, into, kernel_basis(out), Subspace(space.dim, into.columns())
    )


def cycles_and_boundaries(model: RelativeModel, bound: int) -> tuple[Subspace, Subspace]:
    """(Z_0, B_0) of the relative derivation complex, in the Der_0 chart."""
    data = derivation_basis(model, 0, bound)
    return data.cycles, data.boundaries


def _require_degree_zero(delta: RelDerivation):
    if delta.degree != 0:
        raise FormatError("expected a degree-0 derivation")


def exp_derivation(delta: RelDerivation, bound: int) -> FilteredEndo:
    """exp(delta) as an endomorphism, for nilpotent degree-0 derivations.

    Requires images with no linear fiber part (so every application of delta
    raises word length or trades fiber letters for base letters); the sum
    then terminates degreewise and the result fixes the base pointwise.
    """
    _require_degree_zero(delta)
    model = delta.model
    if model.max_generator_degree() > bound:
        raise DegreeBoundExceeded(
            "bound is smaller than the maximal generator degree"
        )
    bad = delta.linear_fiber_defects()
    if bad:
        raise NotWordLengthRaising(
            "derivation image has a linear fiber part on " + ", ".join(bad)
        )
    images: dict[str, Element] = {}
    for g in model.fiber_generators:
        k = g.degree
        mat = delta.matrix(k)
        acc = list(model.dgla.atom(g.name).coords)
        term = tuple(acc)
        factor = Fraction(1)
        steps = 0
        while True:
            term = mat.apply(term)
            steps += 1
            factor /= steps
            if vec_is_zero(term):
                break
            for i, c in enumerate(term):
                acc[i] += factor * c
            if steps > 2 * k + 2:
                raise ArithmeticError(
                    "exponential series failed to terminate; the derivation "
                    "is not nilpotent (internal check)"
                )
        images[g.name] = Element(k, tuple(acc))
    return FilteredEndo(model, images)


def log_unipotent(u: FilteredEndo, bound: int) -> RelDerivation:
    """log(u) for unipotent-relative u; exact inverse of exp_derivation.

    u must fix every base generator exactly and have (u - id) without linear
    fiber part on every fiber generator.
    """
    model = u.model
    if model.max_generator_degree() > bound:
        raise DegreeBoundExceeded(
            "bound is smaller than the maximal generator degree"
        )
    dgla = model.dgla
    for name in model.base_names:
        if u.image(name) != dgla.atom(name):
            raise NotUnipotentRelative(
                f"endomorphism moves the base generator {name!r}"
            )
    fiber_atom = {}
    for g in model.fiber_generators:
        fiber_atom.setdefault(g.degree, model.fiber_atom_indices(g.degree))
    for g in model.fiber_generators:
        diff = vec_sub_elements(u.image(g.name), dgla.atom(g.name))
        for _, idx in fiber_atom[g.degree]:
            if diff[idx] != 0:
                raise NotUnipotentRelative(
                    f"(u - id) has a linear fiber part on {g.name!r}"
                )
    images: dict[str, Element] = {}
    for g in model.fiber_generators:
        k = g.degree
        umat = u.matrix(k)
        n = dgla.dim(k)
        xmat = Matrix(
            [
                [umat.data[i][j] - (1 if i == j else 0) for j in range(n)]
                for i in range(n)
            ],
            cols=n,
        )
        term = xmat.apply(dgla.atom(g.name).coords)
        acc = list(term)
        p = 1
        while not vec_is_zero(term):
            term = xmat.apply(term)
            p += 1
            if vec_is_zero(term):
                break
            coeff = Fraction((-1) ** (p + 1), p)
            for i, c in enumerate(term):
                acc[i] += coeff * c
            if p > 2 * k + 2:
                raise ArithmeticError(
                    "logarithm series failed to terminate (internal check)"
                )
        images[g.name] = Element(k, tuple(acc))
    return RelDerivation(model, 0, images)


def vec_sub_elements(a: Element, b: Element) -> Vector:
    return tuple(x - y for x, y in zip(a.coords, b.coords))


@dataclass(frozen=True)
class Verdict:
    equivalent: bool
    witness: RelDerivation | None
    reason: str
    dims: dict
    truncation_degree: int


def are_homotopic_rel(f: FilteredEndo, g: FilteredEndo, bound: int) -> Verdict:
    """Decide whether two relative automorphisms are homotopic rel base.

    Computes u = f o g^{-1}; if u is not unipotent-relative it cannot lie in
    the exponential of the boundary derivations and the maps are not
    equivalent.  Otherwise log(u) is tested for membership in B_0; a
    positive answer comes with a degree-1 derivation witness G satisfying
    [d, G] = log(u) exactly.
    """
    if f.model is not g.model:
        raise FormatError("endomorphisms live on different models")
    model = f.model
    if not is_minimal(model).is_minimal:
        raise NotMinimal("the ambient model is not minimal")
    for name, endo in (("first", f), ("second", g)):
        if not is_relative_automorphism(endo):
            raise NotRelativeAutomorphism(
                f"the {name} endomorphism is not a relative automorphism"
            )
    data0 = derivation_basis(model, 0, bound)
    dims = {
        "der0": data0.dim,
        "z0": data0.cycles.dim,
        "b0": data0.boundaries.dim,
        "h0": data0.homology_dim,
    }
    m = model.max_generator_degree()

    g_inv = invert_relative_quasi_iso(g, bound)
    u = f.compose(g_inv)

    dgla = model.dgla
    for w in model.fiber_generators:
        diff = vec_sub_elements(u.image(w.name), dgla.atom(w.name))
        for _, idx in model.fiber_atom_indices(w.degree):
            if diff[idx] != 0:
                return Verdict(
                    False,
                    None,
                    f"f o g^-1 has a non-identity linear part on {w.name!r}, "
                    "so it lies outside the exponential of the boundary "
                    "derivations",
                    dims,
                    m,
                )
    theta = log_unipotent(u, bound)
    theta_vec = data0.space.pack(theta)
    if not vec_is_zero(data0.boundary_out.apply(theta_vec)):
        raise ArithmeticError(
            "log of a chain automorphism is not a cycle; internal bug"
        )
    x = solve_pivot(data0.boundary_in, theta_vec)
    if x is None:
        return Verdict(
            False,
            None,
            "log(f o g^-1) commutes with d but is not a boundary derivation",
            dims,
            m,
        )
    witness = der_space(model, 1).unpack(x)
    if data0.boundary_in.apply(x) != theta_vec:
        raise ArithmeticError("witness reconstruction failed; internal bug")
    return Verdict(True, witness, "", dims, m)


def pi0_report(model: RelativeModel, bound: int) -> dict:
    """Dimension data of the algebraic group presentation.

    Reports the truncation degree m (the maximal generator degree), the
    dimension of the truncated stage the group acts on, the derivation
    complex dimensions, and how many scalar equations each of the four
    defining algebraic conditions contributes for a matrix in that stage.
    """
    m = model.max_generator_degree()
    if m > bound:
        raise DegreeBoundExceeded(
            f"model has generators of degree {m}, beyond the bound {bound}"
        )
    dgla = model.dgla
    dims_by_degree = {k: dgla.dim(k) for k in range(1, m + 1)}
    sigma = sum(dims_by_degree.values())
    base_alg = model.sub_algebra(model.base_names)
    base_dim = sum(base_alg.dim(k) for k in range(1, m + 1))
    data0 = derivation_basis(model, 0, bound)
    bracket_eqs = 0
    for p in range(1, m):
        for q in range(1, m - p + 1):
            bracket_eqs += dims_by_degree[p] * dims_by_degree[q] * dims_by_degree[p + q]
    return {
        "truncationDegree": m,
        "sigmaDimension": sigma,
        "derivations": {
            "der0": data0.dim,
            "z0": data0.cycles.dim,
            "b0": data0.boundaries.dim,
            "h0": data0.homology_dim,
        },
        "conditions": {
            "degreePreserving": sigma * sigma
            - sum(d * d for d in dims_by_degree.values()),
            "commutesWithDifferential": sigma * sigma,
            "bracketCompatible": bracket_eqs,
            "fixesBase": base_dim * sigma,
        },
    }
