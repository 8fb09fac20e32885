"""Seeded random generators shared by the model, inversion and homotopy tests.

Random quasi-free algebras are grown as iterated extensions whose new
differentials are cycles of what is already there, so validity is automatic;
random chain maps send cycles to cycles by construction.  Candidate
automorphism factors (scalings, swaps, transvections, exponentials) are
filtered through the real chain-map/automorphism checks, because on models
with nonzero fiber differentials not every such factor is a chain map.
"""

from fractions import Fraction

from dgla.dg import DGLAMorphism, Element, FiniteDimDGLA, QuasiFreeDGLA, validate
from dgla.freelie import GradedGenerator, LiePoly
from dgla.homotopy import derivation_basis
from dgla.invert import FilteredEndo, is_relative_automorphism
from dgla.linalg import Matrix, kernel_basis, zero_vector
from dgla.minimal import build_minimal_model


def rand_coeff(rng, lo=-2, hi=3):
    return Fraction(rng.randrange(lo, hi))


def rand_cycle(rng, algebra, degree) -> Element:
    """Random element of Z_degree with small integer coordinates."""
    if degree < 1 or algebra.dim(degree) == 0:
        return algebra.zero(max(degree, 1)) if degree >= 1 else Element(degree, ())
    cycles = kernel_basis(algebra.d_matrix(degree))
    coords = [Fraction(0)] * algebra.dim(degree)
    for basis_vec in cycles.basis:
        c = rand_coeff(rng)
        if c:
            for j, a in enumerate(basis_vec):
                coords[j] += c * a
    return Element(degree, tuple(coords))


def rand_quasifree(rng, max_gens=3, max_degree=3, prefix="t") -> QuasiFreeDGLA:
    """Random valid quasi-free dg Lie algebra (iterated cycle extensions)."""
    count = rng.randrange(1, max_gens + 1)
    gens: list[GradedGenerator] = []
    diffs: dict[str, LiePoly] = {}
    for i in range(count):
        degree = rng.randrange(1, max_degree + 1)
        name = f"{prefix}{i}"
        if gens and degree >= 2 and rng.random() < 0.6:
            partial = QuasiFreeDGLA(gens, diffs)
            cycle = rand_cycle(rng, partial, degree - 1)
            if not cycle.is_zero():
                diffs[name] = partial.poly(cycle)
        gens.append(GradedGenerator(name, degree))
    algebra = QuasiFreeDGLA(gens, diffs)
    assert validate(algebra).ok
    return algebra


def rand_findim(rng, max_cells=4, max_degree=3) -> FiniteDimDGLA:
    """Random abelian chain complex from sphere and disk cells."""
    dims: dict[int, int] = {}
    disk_entries: list[tuple[int, int, int]] = []  # (degree k+1, row, col)
    for _ in range(rng.randrange(1, max_cells + 1)):
        k = rng.randrange(1, max_degree + 1)
        if rng.random() < 0.5:
            dims[k] = dims.get(k, 0) + 1
        else:
            row = dims.get(k, 0)
            col = dims.get(k + 1, 0)
            dims[k] = row + 1
            dims[k + 1] = col + 1
            disk_entries.append((k + 1, row, col))
    d_mats = {}
    for k in sorted({d for d, _, _ in disk_entries}):
        rows = dims.get(k - 1, 0)
        cols = dims.get(k, 0)
        body = [[Fraction(0)] * cols for _ in range(rows)]
        for degree, row, col in disk_entries:
            if degree == k:
                body[row][col] = Fraction(1)
        d_mats[k] = Matrix(body, cols=cols)
    algebra = FiniteDimDGLA(dims, {}, d_mats)
    assert validate(algebra).ok
    return algebra


def rand_base(rng) -> QuasiFreeDGLA:
    """Base algebra: one or two generators, sometimes an acyclic pair."""
    roll = rng.random()
    if roll < 0.25:
        k = rng.randrange(1, 3)
        gens = [GradedGenerator("v0", k), GradedGenerator("v1", k + 1)]
        return QuasiFreeDGLA(gens, {"v1": LiePoly.gen("v0")})
    count = rng.randrange(1, 3)
    gens = [GradedGenerator(f"v{i}", rng.randrange(1, 3)) for i in range(count)]
    return QuasiFreeDGLA(gens, {})


def rand_morphism(rng, base: QuasiFreeDGLA, target) -> DGLAMorphism:
    """Random chain map out of a base whose differentials are 0 or linear."""
    images: dict[str, Element] = {}
    for g in sorted(base.generators, key=lambda g: g.degree):
        d_poly = base.differential.get(g.name)
        if d_poly is None:
            images[g.name] = rand_cycle(rng, target, g.degree)
            continue
        # base differential is a single generator (acyclic pair): pick the
        # preimage first so the chain condition is solvable exactly
        eta_dim = target.dim(g.degree)
        eta = tuple(rand_coeff(rng) for _ in range(eta_dim))
        images[g.name] = Element(g.degree, eta)
        boundary = target.d_matrix(g.degree).apply(eta)
        (dep_name,) = d_poly.support()
        images[dep_name] = Element(g.degree - 1, boundary)
    f = DGLAMorphism(base, target, images)
    assert f.is_chain_map()
    return f


def rand_model_input(rng):
    base = rand_base(rng)
    if rng.random() < 0.4:
        target = rand_findim(rng)
    else:
        target = rand_quasifree(rng)
    return rand_morphism(rng, base, target)


def rand_minimal_model(rng, bound):
    f = rand_model_input(rng)
    return build_minimal_model(f, bound), f


def sample_exp_candidate(rng, model, bound):
    """Random degree-0 cycle derivation with no linear fiber part, or None."""
    data = derivation_basis(model, 0, bound)
    cycles = data.cycles
    if cycles.dim == 0:
        return None
    bad_slots = []
    for t, (name, j) in enumerate(data.space.pairs):
        degree = model.degree_of(name)
        if any(j == idx for _, idx in model.fiber_atom_indices(degree)):
            bad_slots.append(t)
    selection = Matrix(
        [[basis_vec[t] for basis_vec in cycles.basis] for t in bad_slots],
        cols=cycles.dim,
    )
    combos = kernel_basis(selection)
    if combos.dim == 0:
        return None
    vec = list(zero_vector(data.space.dim))
    hit = False
    for combo in combos.basis:
        c = rand_coeff(rng)
        if c == 0:
            continue
        hit = True
        for i, weight in enumerate(combo):
            if weight:
                for t, a in enumerate(cycles.basis[i]):
                    vec[t] += c * weight * a
    if not hit:
        return None
    delta = data.space.unpack(tuple(vec))
    return None if delta.is_zero() else delta


def rand_relative_automorphism(rng, model, bound, max_factors=3) -> FilteredEndo:
    """Composition of accepted scaling/swap/transvection/exp factors."""
    from dgla.homotopy import exp_derivation

    bound = max(bound, model.max_generator_degree())
    result = FilteredEndo.identity(model)
    fibers = list(model.fiber_generators)
    accepted = 0
    for _ in range(10):
        if accepted >= max_factors:
            break
        kind = rng.randrange(4)
        candidate = None
        if kind == 0 and fibers:
            g = fibers[rng.randrange(len(fibers))]
            c = rng.choice([Fraction(2), Fraction(-1), Fraction(1, 2), Fraction(3)])
            candidate = FilteredEndo(
                model,
                {g.name: Element(
                    g.degree,
                    tuple(c * a for a in model.dgla.atom(g.name).coords),
                )},
            )
        elif kind == 1 and len(fibers) >= 2:
            g1 = fibers[rng.randrange(len(fibers))]
            peers = [g for g in fibers if g.degree == g1.degree and g.name != g1.name]
            if peers:
                g2 = peers[rng.randrange(len(peers))]
                candidate = FilteredEndo(
                    model,
                    {
                        g1.name: model.dgla.atom(g2.name),
                        g2.name: model.dgla.atom(g1.name),
                    },
                )
        elif kind == 2 and fibers:
            g = fibers[rng.randrange(len(fibers))]
            z = rand_cycle(rng, model.dgla, g.degree)
            if not z.is_zero():
                shifted = Element(
                    g.degree,
                    tuple(a + b for a, b in zip(model.dgla.atom(g.name).coords, z.coords)),
                )
                candidate = FilteredEndo(model, {g.name: shifted})
        else:
            delta = sample_exp_candidate(rng, model, bound)
            if delta is not None:
                candidate = exp_derivation(delta, bound)
        if candidate is None:
            continue
        if not is_relative_automorphism(candidate):
            continue
        result = candidate.compose(result)
        accepted += 1
    return result
