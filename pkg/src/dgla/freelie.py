"""Free graded Lie algebras on finitely many positive-degree generators.

The algebra is realized inside the tensor algebra on the generators via

    [a, b]  =  a (x) b  -  (-1)^{|a||b|}  b (x) a,

which in characteristic zero is a faithful embedding, so equality of Lie
polynomials reduces to equality of tensor coordinates and all Koszul signs
take care of themselves.  A canonical basis of each homogeneous piece is
extracted by row-reducing the embedded left-normed bracket monomials in a
fixed enumeration order, so every answer is reproducible bit for bit.

Tensor-space vectors are sparse dicts keyed by words (tuples of generator
indices); words are ordered by (length, tuple), and that order drives every
pivot choice.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import MixedDegrees, NotSimplyConnected, UnknownGenerator
from .exprs import Terms, format_terms, tree_sort_key
from .linalg import Vector

Word = tuple[int, ...]
TVec = dict[Word, Fraction]


@dataclass(frozen=True)
class GradedGenerator:
    name: str
    degree: int


class LiePoly:
    """A formal sum of (rational, fully parenthesized bracket word) terms.

    Purely syntactic: degrees and normal forms live in FreeGLA.  Equal trees
    are combined and zero terms dropped at construction.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Iterable[tuple[Fraction, object]] = ()):
        combined: dict[tuple, tuple[Fraction, object]] = {}
        for coeff, tree in terms:
            key = tree_sort_key(tree)
            if key in combined:
                prev, _ = combined[key]
                combined[key] = (prev + coeff, tree)
            else:
                combined[key] = (Fraction(coeff), tree)
        object.__setattr__(
            self,
            "terms",
            tuple(
                (c, t) for _, (c, t) in sorted(combined.items()) if c != 0
            ),
        )

    def __setattr__(self, name, value):
        raise AttributeError("LiePoly is immutable")

    @classmethod
    def zero(cls) -> "LiePoly":
        return cls()

    @classmethod
    def gen(cls, name: str) -> "LiePoly":
        return cls([(Fraction(1), name)])

    @classmethod
    def from_terms(cls, terms: Terms) -> "LiePoly":
        return cls(terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "LiePoly") -> "LiePoly":
        return LiePoly(self.terms + other.terms)

    def __sub__(self, other: "LiePoly") -> "LiePoly":
        return self + (-1) * other

    def __rmul__(self, c) -> "LiePoly":
        c = Fraction(c)
        return LiePoly([(c * coeff, tree) for coeff, tree in self.terms])

    def __neg__(self) -> "LiePoly":
        return (-1) * self

    def __eq__(self, other) -> bool:
        return isinstance(other, LiePoly) and self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def support(self) -> set[str]:
        names: set[str] = set()
        for _, tree in self.terms:
            stack = [tree]
            while stack:
                t = stack.pop()
                if isinstance(t, str):
                    names.add(t)
                else:
                    stack.extend(t)
        return names

    def __repr__(self):
        return f"LiePoly({format_terms(list(self.terms))})"


def bracket(p: LiePoly, q: LiePoly) -> LiePoly:
    """Formal bracket, expanded bilinearly into bracket words."""
    return LiePoly(
        [(cp * cq, (tp, tq)) for cp, tp in p.terms for cq, tq in q.terms]
    )


def _word_key(w: Word) -> tuple[int, Word]:
    return (len(w), w)


class _Echelon:
    """Mutually reduced sparse rows with deterministic pivots.

    Rows are kept fully reduced against each other (pivot keys appear in one
    row only) and scaled to unit pivot; pivot of a row is its minimal word in
    (length, lex) order.  Optionally tracks how each row combines the
    inserted vectors, which turns reduction into a coordinate solver.
    """

    __slots__ = ("rows", "track")

    def __init__(self, track: bool = False):
        self.rows: list[tuple[Word, TVec, dict[int, Fraction] | None]] = []
        self.track = track

    def reduce(self, vec: TVec) -> tuple[TVec, dict[int, Fraction]]:
        v = dict(vec)
        combo: dict[int, Fraction] = {}
        for pivot, row, rcombo in self.rows:
            c = v.get(pivot)
            if not c:
                continue
            for w, a in row.items():
                newval = v.get(w, Fraction(0)) - c * a
                if newval:
                    v[w] = newval
                else:
                    v.pop(w, None)
            if self.track and rcombo:
                for i, a in rcombo.items():
                    newval = combo.get(i, Fraction(0)) + c * a
                    if newval:
                        combo[i] = newval
                    else:
                        combo.pop(i, None)
        return v, combo

    def insert(self, vec: TVec, tag: int | None = None) -> bool:
        """Insert a vector; returns False when it was already in the span."""
        v, combo = self.reduce(vec)
        if not v:
            return False
        pivot = min(v, key=_word_key)
        inv = 1 / v[pivot]
        v = {w: a * inv for w, a in v.items()}
        if self.track:
            combo = {i: -a * inv for i, a in combo.items()}
            if tag is not None:
                combo[tag] = combo.get(tag, Fraction(0)) + inv
        # back-substitute into existing rows so pivots stay exclusive
        for idx, (rp, row, rcombo) in enumerate(self.rows):
            c = row.get(pivot)
            if not c:
                continue
            newrow = dict(row)
            for w, a in v.items():
                nv = newrow.get(w, Fraction(0)) - c * a
                if nv:
                    newrow[w] = nv
                else:
                    newrow.pop(w, None)
            newcombo = rcombo
            if self.track:
                newcombo = dict(rcombo or {})
                for i, a in combo.items():
                    nv = newcombo.get(i, Fraction(0)) - c * a
                    if nv:
                        newcombo[i] = nv
                    else:
                        newcombo.pop(i, None)
            self.rows[idx] = (rp, newrow, newcombo)
        self.rows.append((pivot, v, combo if self.track else None))
        self.rows.sort(key=lambda r: _word_key(r[0]))
        return True

    def coords(self, vec: TVec) -> dict[int, Fraction] | None:
        """Express vec over the inserted (tagged) vectors; None if outside."""
        v, combo = self.reduce(vec)
        if v:
            return None
        return combo

    @property
    def rank(self) -> int:
        return len(self.rows)


def tensor_bracket(d1: int, v1: TVec, d2: int, v2: TVec) -> TVec:
    """[v1, v2] in tensor coordinates for homogeneous degrees d1, d2."""
    sign = Fraction(-1 if (d1 * d2) % 2 else 1)
    out: TVec = {}
    for w1, c1 in v1.items():
        for w2, c2 in v2.items():
            prod = c1 * c2
            k = w1 + w2
            nv = out.get(k, Fraction(0)) + prod
            if nv:
                out[k] = nv
            else:
                out.pop(k, None)
            k = w2 + w1
            nv = out.get(k, Fraction(0)) - sign * prod
            if nv:
                out[k] = nv
            else:
                out.pop(k, None)
    return out


@dataclass(frozen=True)
class DegreeBasis:
    """Canonical ordered basis of one homogeneous piece.

    monomials[i] is a left-normed bracket word (as a tree); vectors[i] its
    tensor coordinates; the solver expresses arbitrary tensor vectors over
    them.
    """

    degree: int
    monomials: tuple
    vectors: tuple
    solver: _Echelon

    @property
    def dim(self) -> int:
        return len(self.monomials)


class FreeGLA:
    """Free graded Lie algebra on an ordered list of positive-degree generators.

    Immutable after construction; per-degree data is computed on demand and
    memoized single-assignment, so concurrent readers see one canonical
    answer.
    """

    def __init__(self, generators: Sequence[GradedGenerator]):
        gens = tuple(generators)
        seen = set()
        for g in gens:
            if g.name in seen:
                raise ValueError(f"duplicate generator name {g.name!r}")
            seen.add(g.name)
            if not isinstance(g.degree, int) or g.degree < 1:
                raise NotSimplyConnected(
                    f"generator {g.name!r} has degree {g.degree}; "
                    "all generators must have degree >= 1"
                )
        self.generators = gens
        self._index = {g.name: i for i, g in enumerate(gens)}
        self._degrees = tuple(g.degree for g in gens)
        self._embed_cache: dict = {}
        self._basis: dict[int, DegreeBasis] = {}
        self._oracle: dict[int, list[TVec]] = {}
        self._brackets: dict[tuple[int, int], tuple] = {}
        self._atoms: dict[str, tuple[int, int]] = {}

    # -- generators ---------------------------------------------------------

    def index_of(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownGenerator(f"unknown generator {name!r}") from None

    def degree_of(self, name: str) -> int:
        return self._degrees[self.index_of(name)]

    def names(self) -> tuple[str, ...]:
        return tuple(g.name for g in self.generators)

    def tree_degree(self, tree) -> int:
        if isinstance(tree, str):
            return self.degree_of(tree)
        left, right = tree
        return self.tree_degree(left) + self.tree_degree(right)

    # -- tensor embedding ---------------------------------------------------

    def words(self, k: int) -> tuple[Word, ...]:
        """All degree-k words over the generators, in (length, lex) order."""
        out: list[Word] = []
        for length in range(1, k + 1):
            out.extend(self._index_tuples(length, k))
        return tuple(out)

    def tensor_coords(self, p: LiePoly, degree: int | None = None) -> tuple[int | None, Vector]:
        """Dense coordinates of p in the word basis of its degree."""
        d, vec = self.embed(p)
        if d is None:
            d = degree
        if d is None:
            return None, ()
        return d, tuple(vec.get(w, Fraction(0)) for w in self.words(d))

    def embed_tree(self, tree) -> tuple[int, TVec]:
        cached = self._embed_cache.get(tree) if not isinstance(tree, str) else None
        if cached is not None:
            return cached
        if isinstance(tree, str):
            i = self.index_of(tree)
            return self._degrees[i], {(i,): Fraction(1)}
        left, right = tree
        dl, vl = self.embed_tree(left)
        dr, vr = self.embed_tree(right)
        result = (dl + dr, tensor_bracket(dl, vl, dr, vr))
        self._embed_cache[tree] = result
        return result

    def embed(self, p: LiePoly) -> tuple[int | None, TVec]:
        """Tensor coordinates of p; p == 0 in L iff the vector is empty.

        The degree is None only for the termless polynomial; terms that
        cancel keep their common degree alongside an empty vector.
        """
        degree = None
        out: TVec = {}
        for coeff, tree in p.terms:
            d, vec = self.embed_tree(tree)
            if degree is None:
                degree = d
            elif degree != d:
                raise MixedDegrees(
                    f"terms of degree {degree} and {d} in one polynomial"
                )
            for w, a in vec.items():
                nv = out.get(w, Fraction(0)) + coeff * a
                if nv:
                    out[w] = nv
                else:
                    out.pop(w, None)
        if not out:
            return (None, {}) if degree is None else (degree, {})
        return degree, out

    # -- canonical bases ----------------------------------------------------

    def _index_tuples(self, length: int, degree: int):
        """Lexicographic index tuples of given length with degree sum."""
        n = len(self.generators)

        def rec(prefix: tuple[int, ...], remaining: int, slots: int):
            if slots == 0:
                if remaining == 0:
                    yield prefix
                return
            for i in range(n):
                d = self._degrees[i]
                if d <= remaining - (slots - 1):
                    yield from rec(prefix + (i,), remaining - d, slots - 1)

        yield from rec((), degree, length)

    def _left_normed(self, indices: Word):
        tree = self.generators[indices[0]].name
        for i in indices[1:]:
            tree = (tree, self.generators[i].name)
        return tree

    def degree_basis(self, k: int) -> DegreeBasis:
        """Canonical basis of the degree-k piece (k >= 1)."""
        if k < 1:
            raise ValueError("degrees start at 1")
        hit = self._basis.get(k)
        if hit is not None:
            return hit
        echelon = _Echelon()
        solver = _Echelon(track=True)
        monos = []
        vecs = []
        for length in range(1, k + 1):
            for indices in self._index_tuples(length, k):
                tree = self._left_normed(indices)
                _, vec = self.embed_tree(tree)
                if not vec:
                    continue
                if echelon.insert(vec):
                    solver.insert(vec, tag=len(monos))
                    monos.append(tree)
                    vecs.append(vec)
        basis = DegreeBasis(k, tuple(monos), tuple(vecs), solver)
        return self._basis.setdefault(k, basis)

    def dim(self, k: int) -> int:
        if k < 1:
            return 0
        return self.degree_basis(k).dim

    def normalize(self, p: LiePoly, degree: int | None = None) -> tuple[int | None, Vector]:
        """Unique coordinates of p in the canonical basis of its degree.

        Returns (degree, coords).  A zero polynomial has no intrinsic degree:
        when `degree` is supplied the zero vector of that piece is returned,
        otherwise (None, ()).
        """
        d, vec = self.embed(p)
        if d is None:
            if degree is None:
                return None, ()
            d = degree
        elif degree is not None and d != degree:
            raise MixedDegrees(f"expected degree {degree}, found {d}")
        basis = self.degree_basis(d)
        if not vec:
            return d, (Fraction(0),) * basis.dim
        combo = basis.solver.coords(vec)
        if combo is None:
            raise ArithmeticError(
                "embedded polynomial escaped the bracket span; "
                "this indicates an internal basis bug"
            )
        return d, tuple(combo.get(i, Fraction(0)) for i in range(basis.dim))

    def atom(self, name: str) -> tuple[int, int]:
        """(degree, basis index) of a generator inside its degree basis."""
        hit = self._atoms.get(name)
        if hit is not None:
            return hit
        d = self.degree_of(name)
        basis = self.degree_basis(d)
        for i, tree in enumerate(basis.monomials):
            if tree == name:
                return self._atoms.setdefault(name, (d, i))
        raise ArithmeticError(f"generator {name!r} missing from its degree basis")

    def poly_of_coords(self, k: int, coords: Sequence[Fraction]) -> LiePoly:
        basis = self.degree_basis(k)
        if len(coords) != basis.dim:
            raise ValueError("coordinate length does not match basis")
        return LiePoly(
            [(c, tree) for c, tree in zip(coords, basis.monomials) if c != 0]
        )

    # -- brackets on coordinates -------------------------------------------

    def bracket_table(self, p: int, q: int) -> tuple:
        """table[i][j] = coordinates of [e_i^(p), e_j^(q)] in degree p+q."""
        hit = self._brackets.get((p, q))
        if hit is not None:
            return hit
        bp, bq = self.degree_basis(p), self.degree_basis(q)
        target = self.degree_basis(p + q)
        table = []
        for vi in bp.vectors:
            row = []
            for vj in bq.vectors:
                vec = tensor_bracket(p, vi, q, vj)
                if not vec:
                    row.append((Fraction(0),) * target.dim)
                    continue
                combo = target.solver.coords(vec)
                if combo is None:
                    raise ArithmeticError("bracket escaped the degree basis")
                row.append(tuple(combo.get(t, Fraction(0)) for t in range(target.dim)))
            table.append(tuple(row))
        return self._brackets.setdefault((p, q), tuple(table))

    def bracket_coords(self, p: int, vp: Sequence[Fraction], q: int, vq: Sequence[Fraction]) -> Vector:
        table = self.bracket_table(p, q)
        dim_out = self.dim(p + q)
        out = [Fraction(0)] * dim_out
        for i, ci in enumerate(vp):
            if ci == 0:
                continue
            for j, cj in enumerate(vq):
                if cj == 0:
                    continue
                cell = table[i][j]
                c = ci * cj
                for t in range(dim_out):
                    if cell[t]:
                        out[t] += c * cell[t]
        return tuple(out)

    # -- independent dimension oracle ----------------------------------------

    def _oracle_rows(self, k: int) -> list[TVec]:
        hit = self._oracle.get(k)
        if hit is not None:
            return hit
        echelon = _Echelon()
        for i, g in enumerate(self.generators):
            if g.degree == k:
                echelon.insert({(i,): Fraction(1)})
        for p in range(1, k):
            q = k - p
            if q < 1:
                continue
            for u in self._oracle_rows(p):
                for v in self._oracle_rows(q):
                    vec = tensor_bracket(p, u, q, v)
                    if vec:
                        echelon.insert(vec)
        rows = [row for _, row, _ in echelon.rows]
        return self._oracle.setdefault(k, rows)

    def dim_oracle(self, k: int) -> int:
        """Dimension of the degree-k piece, assembled degree by degree.

        Independent route: spans are built bottom-up from pairwise tensor
        brackets of lower-degree pieces (never from left-normed enumeration),
        so agreement with degree_basis cross-checks both computations.
        """
        if k < 1:
            return 0
        return len(self._oracle_rows(k))
