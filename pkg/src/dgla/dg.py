"""Differentials, morphisms and homology on top of the free-algebra layer.

Two kinds of dg Lie algebras are first class:

* quasi-free ones, where the differential is given on generators and
  extended by the graded Leibniz rule  d[a,b] = [da,b] + (-1)^{|a|}[a,db];
* finite-dimensional ones, given by per-degree dimensions, bracket structure
  constants and differential matrices.

Both expose the same element model: an Element is (degree, coordinate
vector) in the canonical basis of that degree, and both know how to bracket
coordinates, so morphisms defined on generators of a quasi-free source can
be evaluated into either kind of target.

Everything is computed over Q; a degree bound is always explicit in the
callers, never stored here.  Homology data is memoized single-assignment per
(algebra, degree).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from .errors import (
    FormatError,
    MixedDegrees,
    NotAChainMap,
    TargetNotFiniteType,
    UnknownGenerator,
)
from .exprs import Terms, format_terms
from .freelie import FreeGLA, GradedGenerator, LiePoly, bracket
from .linalg import (
    Matrix,
    Subspace,
    Vector,
    kernel_basis,
    membership,
    quotient_data,
    vec_is_zero,
    zero_vector,
)


class Element(NamedTuple):
    """A homogeneous element: coordinates in the canonical degree basis."""

    degree: int
    coords: Vector

    def is_zero(self) -> bool:
        return vec_is_zero(self.coords)


class HomologyData:
    """Cycles, boundaries and canonical representatives in one degree.

    Representatives are genuine cycles: boundaries are rewritten in
    cycle-basis coordinates and the quotient is taken there, so the coset
    representatives delivered by the pivot rule lift back to rows of the
    cycle basis.
    """

    def __init__(self, algebra, k: int):
        self.degree = k
        d_k = algebra.d_matrix(k)
        d_next = algebra.d_matrix(k + 1)
        self.cycles = kernel_basis(d_k)
        self.boundaries = Subspace(algebra.dim(k), d_next.columns())
        in_cycle_coords = []
        for bvec in self.boundaries.basis:
            coords = membership(bvec, self.cycles)
            if coords is None:
                raise ArithmeticError("boundary is not a cycle: d*d != 0?")
            in_cycle_coords.append(coords)
        self._b_in_z = Subspace(self.cycles.dim, in_cycle_coords)
        self._proj, qreps = quotient_data(self.cycles.dim, self._b_in_z)
        self.reps = tuple(
            tuple(
                sum((qr[i] * self.cycles.basis[i][j] for i in range(self.cycles.dim)), Fraction(0))
                for j in range(self.cycles.ambient_dim)
            )
            for qr in qreps
        )

    @property
    def dim(self) -> int:
        return self.cycles.dim - self.boundaries.dim

    def class_coords(self, v: Sequence[Fraction]) -> Vector:
        """Homology class of a cycle, in the canonical representative basis."""
        coords = membership(v, self.cycles)
        if coords is None:
            raise ValueError("vector is not a cycle")
        return self._proj.apply(coords)

    def rep_of(self, hcoords: Sequence[Fraction]) -> Vector:
        """The canonical cycle representing a homology class (section of Z->H)."""
        n = self.cycles.ambient_dim
        out = [Fraction(0)] * n
        for c, rep in zip(hcoords, self.reps):
            if c != 0:
                for j in range(n):
                    out[j] += c * rep[j]
        return tuple(out)


class QuasiFreeDGLA:
    """A free graded Lie algebra with a generator-specified differential.

    The constructor stores data without heavy checks so that `validate` can
    report problems (wrong degrees, d^2 != 0) instead of crashing; basis and
    matrix computations assume a validated object.
    """

    kind = "quasi-free"

    def __init__(self, generators: Sequence[GradedGenerator], differential: dict[str, LiePoly]):
        self.generators = tuple(generators)
        self.differential = {
            name: p for name, p in differential.items() if not p.is_zero()
        }
        self._algebra: FreeGLA | None = None
        self._d: dict[int, Matrix] = {}
        self._homology: dict[int, HomologyData] = {}

    @property
    def algebra(self) -> FreeGLA:
        if self._algebra is None:
            self._algebra = FreeGLA(self.generators)
        return self._algebra

    def dim(self, k: int) -> int:
        return self.algebra.dim(k) if k >= 1 else 0

    def zero(self, k: int) -> Element:
        return Element(k, zero_vector(self.dim(k)))

    def d_poly(self, p: LiePoly) -> LiePoly:
        out = LiePoly.zero()
        for coeff, tree in p.terms:
            out = out + coeff * self._d_tree(tree)
        return out

    def _d_tree(self, tree) -> LiePoly:
        if isinstance(tree, str):
            return self.differential.get(tree, LiePoly.zero())
        left, right = tree
        lp = LiePoly([(Fraction(1), left)])
        rp = LiePoly([(Fraction(1), right)])
        sign = Fraction(-1 if self.algebra.tree_degree(left) % 2 else 1)
        return bracket(self._d_tree(left), rp) + sign * bracket(lp, self._d_tree(right))

    def d_matrix(self, k: int) -> Matrix:
        """Matrix of d: degree k -> degree k-1 in the canonical bases."""
        hit = self._d.get(k)
        if hit is not None:
            return hit
        rows = self.dim(k - 1)
        if k < 1 or self.dim(k) == 0:
            return self._d.setdefault(k, Matrix.zero(rows, self.dim(k) if k >= 1 else 0))
        cols = []
        for tree in self.algebra.degree_basis(k).monomials:
            image = self._d_tree(tree)
            if k - 1 < 1:
                _, vec = self.algebra.embed(image)
                if vec:
                    raise MixedDegrees("differential image below degree 1 is nonzero")
                cols.append(())
            else:
                _, coords = self.algebra.normalize(image, k - 1)
                cols.append(coords)
        return self._d.setdefault(k, Matrix.from_columns(cols, rows))

    def bracket(self, a: Element, b: Element) -> Element:
        coords = self.algebra.bracket_coords(a.degree, a.coords, b.degree, b.coords)
        return Element(a.degree + b.degree, coords)

    def atoms(self) -> tuple[tuple[str, int], ...]:
        return tuple((g.name, g.degree) for g in self.generators)

    def atom(self, name: str) -> Element:
        d, i = self.algebra.atom(name)
        coords = [Fraction(0)] * self.dim(d)
        coords[i] = Fraction(1)
        return Element(d, tuple(coords))

    def element(self, p: LiePoly, degree: int | None = None) -> Element:
        d, coords = self.algebra.normalize(p, degree)
        if d is None:
            raise ValueError("zero polynomial needs an explicit degree")
        return Element(d, coords)

    def poly(self, el: Element) -> LiePoly:
        return self.algebra.poly_of_coords(el.degree, el.coords)

    def element_expr(self, el: Element) -> str:
        return format_terms(list(self.poly(el).terms))

    def eval_terms(self, terms: Terms, expected_degree: int | None = None) -> Element:
        return self.element(LiePoly.from_terms(terms), expected_degree)

    def homology(self, k: int) -> HomologyData:
        hit = self._homology.get(k)
        if hit is not None:
            return hit
        return self._homology.setdefault(k, HomologyData(self, k))

    def degrees_with_generators(self) -> tuple[int, ...]:
        return tuple(sorted({g.degree for g in self.generators}))

    def max_generator_degree(self) -> int:
        return max((g.degree for g in self.generators), default=0)


def _atom_name(k: int, i: int) -> str:
    return f"e_{k}_{i}"


class FiniteDimDGLA:
    """Graded Lie algebra given by dimensions, structure constants and d.

    Basis vectors are addressed as e_<degree>_<index>.  Structure constants
    may be given in either orientation; the missing one is filled in via
    graded antisymmetry.  Degrees absent from `dims` are zero-dimensional;
    when `max_degree` is set, asking for anything above it raises
    TargetNotFiniteType instead of silently answering zero.
    """

    kind = "finite-dimensional"

    def __init__(
        self,
        dims: dict[int, int],
        brackets: dict[tuple[int, int, int, int], Vector] | None = None,
        d_mats: dict[int, Matrix] | None = None,
        max_degree: int | None = None,
    ):
        self.dims = {int(k): int(n) for k, n in dims.items() if int(n) != 0}
        self.raw_brackets = dict(brackets or {})
        self.d_mats = {}
        for k, m in (d_mats or {}).items():
            k = int(k)
            if not isinstance(m, Matrix):
                m = (
                    Matrix(m, cols=self.dims.get(k, 0))
                    if m
                    else Matrix.zero(self.dims.get(k - 1, 0), self.dims.get(k, 0))
                )
            self.d_mats[k] = m
        self.max_degree = max_degree
        self._table: dict[tuple[int, int, int, int], Vector] | None = None
        self._conflicts: list[str] = []
        self._homology: dict[int, HomologyData] = {}

    def dim(self, k: int) -> int:
        if k < 1:
            return 0
        if self.max_degree is not None and k > self.max_degree:
            raise TargetNotFiniteType(
                f"degree {k} exceeds the declared maximum degree {self.max_degree}"
            )
        return self.dims.get(k, 0)

    def zero(self, k: int) -> Element:
        return Element(k, zero_vector(self.dim(k)))

    def degrees_with_generators(self) -> tuple[int, ...]:
        return tuple(sorted(self.dims))

    def max_generator_degree(self) -> int:
        return max(self.dims, default=0)

    def d_matrix(self, k: int) -> Matrix:
        if k in self.d_mats:
            return self.d_mats[k]
        return Matrix.zero(self.dim(k - 1), self.dim(k))

    def _bracket_table(self) -> dict[tuple[int, int, int, int], Vector]:
        if self._table is not None:
            return self._table
        table: dict[tuple[int, int, int, int], Vector] = {}
        conflicts: list[str] = []
        for (p, q, i, j), vec in sorted(self.raw_brackets.items()):
            sign = Fraction(-1 if (p * q) % 2 else 1)
            mirrored = tuple(-sign * c for c in vec)
            pairs = [((p, q, i, j), tuple(vec))]
            if (q, p, j, i) != (p, q, i, j):
                pairs.append(((q, p, j, i), mirrored))
            for key, val in pairs:
                if key in table:
                    if table[key] != val:
                        conflicts.append(
                            f"bracket [{_atom_name(key[0], key[2])},{_atom_name(key[1], key[3])}] "
                            "given twice with inconsistent values"
                        )
                else:
                    table[key] = val
        self._conflicts = conflicts
        self._table = table
        return table

    def bracket(self, a: Element, b: Element) -> Element:
        table = self._bracket_table()
        k = a.degree + b.degree
        out = [Fraction(0)] * self.dim(k)
        for i, ci in enumerate(a.coords):
            if ci == 0:
                continue
            for j, cj in enumerate(b.coords):
                if cj == 0:
                    continue
                cell = table.get((a.degree, b.degree, i, j))
                if cell is None:
                    continue
                c = ci * cj
                for t, val in enumerate(cell):
                    if val:
                        out[t] += c * val
        return Element(k, tuple(out))

    def atoms(self) -> tuple[tuple[str, int], ...]:
        out = []
        for k in sorted(self.dims):
            for i in range(self.dims[k]):
                out.append((_atom_name(k, i), k))
        return tuple(out)

    def atom(self, name: str) -> Element:
        parts = name.split("_")
        if len(parts) == 3 and parts[0] == "e":
            try:
                k, i = int(parts[1]), int(parts[2])
            except ValueError:
                raise UnknownGenerator(f"unknown basis vector {name!r}") from None
            if 0 <= i < self.dims.get(k, 0):
                coords = [Fraction(0)] * self.dim(k)
                coords[i] = Fraction(1)
                return Element(k, tuple(coords))
        raise UnknownGenerator(f"unknown basis vector {name!r}")

    def eval_terms(self, terms: Terms, expected_degree: int | None = None) -> Element:
        result: Element | None = None
        for coeff, tree in terms:
            el = self._eval_tree(tree)
            el = Element(el.degree, tuple(coeff * c for c in el.coords))
            if result is None:
                result = el
            elif result.degree != el.degree:
                raise MixedDegrees(
                    f"terms of degree {result.degree} and {el.degree} in one expression"
                )
            else:
                result = Element(
                    result.degree,
                    tuple(a + b for a, b in zip(result.coords, el.coords)),
                )
        if result is None:
            if expected_degree is None:
                raise ValueError("zero expression needs an explicit degree")
            return self.zero(expected_degree)
        if expected_degree is not None and result.degree != expected_degree:
            raise MixedDegrees(
                f"expected degree {expected_degree}, found {result.degree}"
            )
        return result

    def _eval_tree(self, tree) -> Element:
        if isinstance(tree, str):
            return self.atom(tree)
        left, right = tree
        return self.bracket(self._eval_tree(left), self._eval_tree(right))

    def element_expr(self, el: Element) -> str:
        terms = [
            (c, _atom_name(el.degree, i)) for i, c in enumerate(el.coords) if c != 0
        ]
        return format_terms(terms)

    def homology(self, k: int) -> HomologyData:
        hit = self._homology.get(k)
        if hit is not None:
            return hit
        return self._homology.setdefault(k, HomologyData(self, k))


class DGLAMorphism:
    """A dg Lie algebra map out of a quasi-free source, given on generators.

    Bracket compatibility holds by construction; commuting with the
    differentials is a property checked by `chain_defects`.
    """

    def __init__(self, source: QuasiFreeDGLA, target, images: dict[str, Element]):
        if not isinstance(source, QuasiFreeDGLA):
            raise FormatError("morphism source must be quasi-free")
        self.source = source
        self.target = target
        self.images: dict[str, Element] = {}
        for g in source.generators:
            if g.name not in images:
                raise FormatError(f"missing image for generator {g.name!r}")
            el = images[g.name]
            if el.degree != g.degree:
                raise FormatError(
                    f"image of {g.name!r} has degree {el.degree}, expected {g.degree}"
                )
            self.images[g.name] = el
        self._matrices: dict[int, Matrix] = {}
        self._tree_cache: dict = {}
        self._chain_checked: bool | None = None

    @classmethod
    def identity(cls, algebra: QuasiFreeDGLA) -> "DGLAMorphism":
        return cls(algebra, algebra, {g.name: algebra.atom(g.name) for g in algebra.generators})

    def eval_tree(self, tree) -> Element:
        if isinstance(tree, str):
            return self.images[tree]
        hit = self._tree_cache.get(tree)
        if hit is not None:
            return hit
        left, right = tree
        result = self.target.bracket(self.eval_tree(left), self.eval_tree(right))
        return self._tree_cache.setdefault(tree, result)

    def eval_poly(self, p: LiePoly, degree: int | None = None) -> Element:
        result: Element | None = None
        for coeff, tree in p.terms:
            el = self.eval_tree(tree)
            scaled = tuple(coeff * c for c in el.coords)
            if result is None:
                result = Element(el.degree, scaled)
            else:
                result = Element(
                    result.degree, tuple(a + b for a, b in zip(result.coords, scaled))
                )
        if result is None:
            if degree is None:
                raise ValueError("zero polynomial needs an explicit degree")
            return self.target.zero(degree)
        return result

    def matrix(self, k: int) -> Matrix:
        hit = self._matrices.get(k)
        if hit is not None:
            return hit
        rows = self.target.dim(k)
        cols = []
        if k >= 1:
            for tree in self.source.algebra.degree_basis(k).monomials:
                cols.append(self.eval_tree(tree).coords)
        return self._matrices.setdefault(k, Matrix.from_columns(cols, rows))

    def apply(self, el: Element) -> Element:
        return Element(el.degree, self.matrix(el.degree).apply(el.coords))

    def chain_defects(self) -> list[str]:
        """Generators on which d(f(x)) != f(d(x)); empty iff chain map."""
        defects = []
        for g in self.source.generators:
            lhs = self.target.d_matrix(g.degree).apply(self.images[g.name].coords)
            dsrc = self.source.d_poly(LiePoly.gen(g.name))
            rhs = self.eval_poly(dsrc, g.degree - 1).coords
            if g.degree - 1 < 1:
                if not vec_is_zero(lhs):
                    defects.append(g.name)
                continue
            if lhs != rhs:
                defects.append(g.name)
        return defects

    def is_chain_map(self) -> bool:
        if self._chain_checked is None:
            self._chain_checked = not self.chain_defects()
        return self._chain_checked

    def compose(self, inner: "DGLAMorphism") -> "DGLAMorphism":
        """self o inner (apply inner first)."""
        if inner.target is not self.source:
            raise FormatError("composition requires matching middle algebra")
        images = {
            g.name: self.apply(inner.images[g.name]) for g in inner.source.generators
        }
        return DGLAMorphism(inner.source, self.target, images)


def induced_map_on_homology(f: DGLAMorphism, k: int) -> Matrix:
    """Matrix of H_k(f) in the canonical representative bases.

    Shape is (dim H_k(target), dim H_k(source)); well-definedness is
    guaranteed by the chain-map check (f maps cycles to cycles and
    boundaries to boundaries).
    """
    if not f.is_chain_map():
        raise NotAChainMap(
            "morphism does not commute with the differentials on "
            + ", ".join(f.chain_defects())
        )
    hs = f.source.homology(k)
    ht = f.target.homology(k)
    cols = [ht.class_coords(f.matrix(k).apply(rep)) for rep in hs.reps]
    return Matrix.from_columns(cols, ht.dim)


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def first(self) -> str | None:
        return self.violations[0] if self.violations else None


def validate(a) -> ValidationReport:
    """Check the dg Lie algebra axioms; violations are reported, not thrown."""
    if isinstance(a, QuasiFreeDGLA):
        return _validate_quasifree(a)
    if isinstance(a, FiniteDimDGLA):
        return _validate_findim(a)
    raise TypeError(f"not a dg Lie algebra: {type(a).__name__}")


def _validate_quasifree(a: QuasiFreeDGLA) -> ValidationReport:
    violations: list[str] = []
    seen = set()
    for g in a.generators:
        if g.name in seen:
            violations.append(f"duplicate generator name {g.name!r}")
        seen.add(g.name)
    for g in a.generators:
        if not isinstance(g.degree, int) or g.degree < 1:
            violations.append(
                f"generator {g.name!r} has degree {g.degree}: not simply connected"
            )
    if violations:
        return ValidationReport(tuple(violations))
    for name in sorted(a.differential):
        if name not in seen:
            violations.append(f"differential given for unknown generator {name!r}")
    if violations:
        return ValidationReport(tuple(violations))
    for g in a.generators:
        image = a.differential.get(g.name)
        if image is None:
            continue
        unknown = sorted(n for n in image.support() if n not in seen)
        if unknown:
            violations.append(
                f"differential of {g.name!r} uses unknown generator {unknown[0]!r}"
            )
            continue
        try:
            d, vec = a.algebra.embed(image)
        except MixedDegrees:
            violations.append(f"differential of {g.name!r} is not homogeneous")
            continue
        if vec and d != g.degree - 1:
            violations.append(
                f"differential of {g.name!r} is not degree -1 "
                f"(image has degree {d}, expected {g.degree - 1})"
            )
    if violations:
        return ValidationReport(tuple(violations))
    for g in a.generators:
        dd = a.d_poly(a.d_poly(LiePoly.gen(g.name)))
        _, vec = a.algebra.embed(dd)
        if vec:
            violations.append(f"d^2 is nonzero on generator {g.name!r}")
    return ValidationReport(tuple(violations))


def _validate_findim(a: FiniteDimDGLA) -> ValidationReport:
    violations: list[str] = []
    for k in sorted(a.dims):
        if k < 1:
            violations.append(f"degree {k} piece declared: not simply connected")
        if a.dims[k] < 0:
            violations.append(f"negative dimension in degree {k}")
    if violations:
        return ValidationReport(tuple(violations))
    for (p, q, i, j), vec in sorted(a.raw_brackets.items()):
        if not (0 <= i < a.dims.get(p, 0) and 0 <= j < a.dims.get(q, 0)):
            violations.append(
                f"bracket entry references missing basis vector "
                f"({_atom_name(p, i)}, {_atom_name(q, j)})"
            )
        elif len(vec) != a.dims.get(p + q, 0):
            violations.append(
                f"bracket of {_atom_name(p, i)} and {_atom_name(q, j)} has "
                f"{len(vec)} coordinates, expected {a.dims.get(p + q, 0)}"
            )
    if violations:
        return ValidationReport(tuple(violations))
    table = a._bracket_table()
    violations.extend(a._conflicts)
    degrees = sorted(a.dims)
    for p in degrees:
        if p % 2 == 0:
            for i in range(a.dims[p]):
                cell = table.get((p, p, i, i))
                if cell and not vec_is_zero(cell):
                    violations.append(
                        f"[{_atom_name(p, i)},{_atom_name(p, i)}] is nonzero "
                        "in even degree"
                    )
    maxdeg = max(degrees, default=0)

    def brk(el1: Element, el2: Element) -> Element:
        return a.bracket(el1, el2)

    for p in degrees:
        for q in degrees:
            for r in degrees:
                if p + q + r > maxdeg:
                    continue
                for i in range(a.dims[p]):
                    ei = a.atom(_atom_name(p, i))
                    for j in range(a.dims[q]):
                        ej = a.atom(_atom_name(q, j))
                        eij = brk(ei, ej)
                        for l in range(a.dims[r]):
                            el = a.atom(_atom_name(r, l))
                            lhs = brk(ei, brk(ej, el)).coords
                            sign = Fraction(-1 if (p * q) % 2 else 1)
                            rhs1 = brk(eij, el).coords
                            rhs2 = brk(ej, brk(ei, el)).coords
                            total = tuple(
                                x - y - sign * z for x, y, z in zip(lhs, rhs1, rhs2)
                            )
                            if not vec_is_zero(total):
                                violations.append(
                                    "graded Jacobi fails on "
                                    f"({_atom_name(p, i)}, {_atom_name(q, j)}, "
                                    f"{_atom_name(r, l)})"
                                )
    if violations:
        return ValidationReport(tuple(violations))
    for k in sorted(a.d_mats):
        m = a.d_mats[k]
        if m.shape != (a.dims.get(k - 1, 0), a.dims.get(k, 0)):
            violations.append(
                f"differential matrix at degree {k} has shape {m.shape}, "
                f"expected ({a.dims.get(k - 1, 0)}, {a.dims.get(k, 0)})"
            )
    if violations:
        return ValidationReport(tuple(violations))
    for k in degrees:
        if a.max_degree is not None and k + 1 > a.max_degree:
            continue
        prod = a.d_matrix(k).mul(a.d_matrix(k + 1))
        if not prod.is_zero():
            violations.append(f"d^2 is nonzero from degree {k + 1}")
    for p in degrees:
        for q in degrees:
            if p + q - 1 < 1:
                continue
            if a.max_degree is not None and p + q > a.max_degree:
                continue
            for i in range(a.dims[p]):
                ei = a.atom(_atom_name(p, i))
                dei = Element(p - 1, a.d_matrix(p).apply(ei.coords)) if p >= 1 else None
                for j in range(a.dims[q]):
                    ej = a.atom(_atom_name(q, j))
                    dej = Element(q - 1, a.d_matrix(q).apply(ej.coords))
                    lhs = a.d_matrix(p + q).apply(a.bracket(ei, ej).coords)
                    sign = Fraction(-1 if p % 2 else 1)
                    rhs = [Fraction(0)] * a.dims.get(p + q - 1, 0)
                    if p - 1 >= 1:
                        for t, c in enumerate(a.bracket(dei, ej).coords):
                            rhs[t] += c
                    if q - 1 >= 1:
                        for t, c in enumerate(a.bracket(ei, dej).coords):
                            rhs[t] += sign * c
                    if tuple(lhs) != tuple(rhs):
                        violations.append(
                            "graded Leibniz fails on "
                            f"({_atom_name(p, i)}, {_atom_name(q, j)})"
                        )
    return ValidationReport(tuple(violations))
