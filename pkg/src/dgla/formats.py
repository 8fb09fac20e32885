"""Canonical file formats: JSON documents with bracket-expression payloads.

One serialization, bit-exact: `canonical_json` fixes key order, indentation
and a trailing newline, all rationals are strings in lowest terms, and every
Lie element prints through its normalized coordinates, so dump(load(dump(x)))
equals dump(x) byte for byte.

Document kinds:

* ``dgla``            quasi-free algebra: generators + differential exprs
* ``findim_dgla``     dims per degree, bracket structure constants, d matrices
* ``dgla_morphism``   source/target (inline doc or path) + generator images
* ``relative_model``  dgla fields + base, stages, structureMap
* ``endo``            generator images over a separately supplied model
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .dg import DGLAMorphism, Element, FiniteDimDGLA, QuasiFreeDGLA
from .errors import FormatError, ParseError
from .exprs import format_terms, parse_expr
from .freelie import GradedGenerator, LiePoly
from .invert import FilteredEndo
from .linalg import Matrix, frac
from .minimal import RelativeModel, Stage


def canonical_json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def load_document(path: str | Path) -> dict:
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: {e.msg}", e.lineno, e.colno) from None
    if not isinstance(doc, dict):
        raise FormatError(f"{path}: expected a JSON object at top level")
    return doc


def _parse_field_expr(text, context: str):
    if not isinstance(text, str):
        raise FormatError(f"{context}: expected a bracket-expression string")
    try:
        return parse_expr(text)
    except ParseError as e:
        raise ParseError(f"{context}: {e}") from None


def _rational_str(x: Fraction) -> str:
    return str(x)


# -- dg Lie algebras ---------------------------------------------------------


def dgla_from_doc(doc: dict, context: str = "dgla"):
    kind = doc.get("kind")
    if kind == "dgla":
        return _quasifree_from_doc(doc, context)
    if kind == "findim_dgla":
        return _findim_from_doc(doc, context)
    raise FormatError(f"{context}: unknown document kind {kind!r}")


def _quasifree_from_doc(doc: dict, context: str) -> QuasiFreeDGLA:
    raw_gens = doc.get("generators")
    if not isinstance(raw_gens, list):
        raise FormatError(f"{context}: missing generator list")
    gens = []
    for entry in raw_gens:
        if not isinstance(entry, dict) or "name" not in entry or "degree" not in entry:
            raise FormatError(f"{context}: generator entries need name and degree")
        name, degree = entry["name"], entry["degree"]
        if not isinstance(name, str) or not isinstance(degree, int):
            raise FormatError(f"{context}: generator name/degree have wrong types")
        gens.append(GradedGenerator(name, degree))
    differential = {}
    raw_diff = doc.get("differential", {})
    if not isinstance(raw_diff, dict):
        raise FormatError(f"{context}: differential must be a mapping")
    for name in sorted(raw_diff):
        terms = _parse_field_expr(raw_diff[name], f"{context}: differential[{name}]")
        differential[name] = LiePoly.from_terms(terms)
    return QuasiFreeDGLA(gens, differential)


def _findim_from_doc(doc: dict, context: str) -> FiniteDimDGLA:
    raw_dims = doc.get("dims")
    if not isinstance(raw_dims, dict):
        raise FormatError(f"{context}: missing dims mapping")
    dims = {}
    for key, value in raw_dims.items():
        try:
            k = int(key)
        except ValueError:
            raise FormatError(f"{context}: bad degree key {key!r}") from None
        if not isinstance(value, int) or value < 0:
            raise FormatError(f"{context}: bad dimension for degree {key}")
        if value:
            dims[k] = value
    brackets = {}
    for entry in doc.get("brackets", []):
        if not isinstance(entry, dict) or not {"left", "right", "value"} <= set(entry):
            raise FormatError(f"{context}: bracket entries need left/right/value")
        left = _atom_indices(entry["left"], context)
        right = _atom_indices(entry["right"], context)
        p, i = left
        q, j = right
        value = _linear_value(
            entry["value"], p + q, dims.get(p + q, 0), f"{context}: bracket value"
        )
        key = (p, q, i, j)
        if key in brackets:
            raise FormatError(
                f"{context}: duplicate bracket entry for ({entry['left']}, "
                f"{entry['right']})"
            )
        brackets[key] = value
    d_mats = {}
    raw_d = doc.get("differential", {})
    if not isinstance(raw_d, dict):
        raise FormatError(f"{context}: differential must be a mapping")
    for key in sorted(raw_d, key=lambda s: int(s)):
        k = int(key)
        rows = raw_d[key]
        if not isinstance(rows, list):
            raise FormatError(f"{context}: differential[{key}] must be an array")
        expected = (dims.get(k - 1, 0), dims.get(k, 0))
        mat = Matrix(
            [[frac(e) for e in row] for row in rows], cols=expected[1]
        ) if rows else Matrix.zero(*expected)
        if mat.shape != expected:
            raise FormatError(
                f"{context}: differential[{key}] has shape {mat.shape}, "
                f"expected {expected}"
            )
        d_mats[k] = mat
    max_degree = doc.get("maxDegree")
    if max_degree is not None and not isinstance(max_degree, int):
        raise FormatError(f"{context}: maxDegree must be an integer")
    return FiniteDimDGLA(dims, brackets, d_mats, max_degree)


def _atom_indices(name, context: str) -> tuple[int, int]:
    if isinstance(name, str):
        parts = name.split("_")
        if len(parts) == 3 and parts[0] == "e":
            try:
                return int(parts[1]), int(parts[2])
            except ValueError:
                pass
    raise FormatError(f"{context}: expected a basis vector name e_<deg>_<i>, got {name!r}")


def _linear_value(text, degree: int, dim: int, context: str):
    terms = _parse_field_expr(text, context)
    coords = [Fraction(0)] * dim
    for coeff, tree in terms:
        if not isinstance(tree, str):
            raise FormatError(f"{context}: structure-constant values must be linear")
        k, i = _atom_indices(tree, context)
        if k != degree or not 0 <= i < dim:
            raise FormatError(
                f"{context}: {tree} does not live in degree {degree} "
                f"(dimension {dim})"
            )
        coords[i] += coeff
    return tuple(coords)


def dgla_to_doc(algebra) -> dict:
    if isinstance(algebra, QuasiFreeDGLA):
        diff = {}
        for name in sorted(algebra.differential):
            poly = algebra.differential[name]
            el = algebra.element(poly)
            if el.is_zero():
                continue  # keep dump(load(dump(x))) byte-stable
            diff[name] = algebra.element_expr(el)
        return {
            "kind": "dgla",
            "generators": [
                {"name": g.name, "degree": g.degree} for g in algebra.generators
            ],
            "differential": diff,
        }
    if isinstance(algebra, FiniteDimDGLA):
        entries = []
        table = algebra._bracket_table()
        for (p, q, i, j) in sorted(table):
            if p > q or (p == q and i > j):
                continue
            vec = table[(p, q, i, j)]
            if all(c == 0 for c in vec):
                continue
            value = format_terms(
                [(c, f"e_{p + q}_{t}") for t, c in enumerate(vec) if c != 0]
            )
            entries.append(
                {"left": f"e_{p}_{i}", "right": f"e_{q}_{j}", "value": value}
            )
        diff = {}
        for k in sorted(algebra.d_mats):
            mat = algebra.d_mats[k]
            if mat.is_zero():
                continue
            diff[str(k)] = [[_rational_str(e) for e in row] for row in mat.data]
        doc = {
            "kind": "findim_dgla",
            "dims": {str(k): n for k, n in sorted(algebra.dims.items())},
            "brackets": entries,
            "differential": diff,
        }
        if algebra.max_degree is not None:
            doc["maxDegree"] = algebra.max_degree
        return doc
    raise TypeError(f"not a dg Lie algebra: {type(algebra).__name__}")


# -- morphisms ----------------------------------------------------------------


def _resolve_algebra(ref, base_dir: Path | None, context: str):
    if isinstance(ref, str):
        path = Path(ref)
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        return dgla_from_doc(load_document(path), context=str(path))
    if isinstance(ref, dict):
        return dgla_from_doc(ref, context=context)
    raise FormatError(f"{context}: expected a path or an inline document")


def morphism_images_from_doc(
    raw_images: dict, source, target, context: str
) -> dict[str, Element]:
    if not isinstance(raw_images, dict):
        raise FormatError(f"{context}: images must be a mapping")
    images = {}
    names = {g.name: g.degree for g in source.generators}
    for name in sorted(raw_images):
        if name not in names:
            raise FormatError(f"{context}: image for unknown generator {name!r}")
        terms = _parse_field_expr(raw_images[name], f"{context}: images[{name}]")
        images[name] = target.eval_terms(terms, expected_degree=names[name])
    for name, degree in names.items():
        if name not in images:
            images[name] = target.zero(degree)
    return images


def morphism_from_doc(
    doc: dict,
    base_dir: Path | None = None,
    source=None,
    target=None,
    context: str = "morphism",
) -> DGLAMorphism:
    if doc.get("kind") not in (None, "dgla_morphism"):
        raise FormatError(f"{context}: expected a dgla_morphism document")
    if source is None:
        if "source" not in doc:
            raise FormatError(f"{context}: no source given")
        source = _resolve_algebra(doc["source"], base_dir, f"{context}: source")
    elif "source" in doc:
        embedded = _resolve_algebra(doc["source"], base_dir, f"{context}: source")
        if canonical_json(dgla_to_doc(embedded)) != canonical_json(dgla_to_doc(source)):
            raise FormatError(
                f"{context}: embedded source disagrees with the supplied one"
            )
    if target is None:
        if "target" not in doc:
            raise FormatError(f"{context}: no target given")
        target = _resolve_algebra(doc["target"], base_dir, f"{context}: target")
    elif "target" in doc:
        embedded = _resolve_algebra(doc["target"], base_dir, f"{context}: target")
        if canonical_json(dgla_to_doc(embedded)) != canonical_json(dgla_to_doc(target)):
            raise FormatError(
                f"{context}: embedded target disagrees with the supplied one"
            )
    images = morphism_images_from_doc(
        doc.get("images", {}), source, target, context
    )
    return DGLAMorphism(source, target, images)


def morphism_to_doc(f: DGLAMorphism) -> dict:
    return {
        "kind": "dgla_morphism",
        "source": dgla_to_doc(f.source),
        "target": dgla_to_doc(f.target),
        "images": {
            g.name: f.target.element_expr(f.images[g.name])
            for g in f.source.generators
        },
    }


# -- relative models -----------------------------------------------------------


def model_to_doc(model: RelativeModel) -> dict:
    algebra_doc = dgla_to_doc(model.dgla)
    return {
        "kind": "relative_model",
        "generators": algebra_doc["generators"],
        "differential": algebra_doc["differential"],
        "base": list(model.base_names),
        "stages": [{"A": list(s.A), "B": list(s.B)} for s in model.stages],
        "structureMap": {
            "target": dgla_to_doc(model.target),
            "images": {
                g.name: model.target.element_expr(model.q.images[g.name])
                for g in model.dgla.generators
            },
        },
    }


def model_from_doc(doc: dict, context: str = "model") -> RelativeModel:
    if doc.get("kind") != "relative_model":
        raise FormatError(f"{context}: expected a relative_model document")
    dgla = _quasifree_from_doc(doc, context)
    base = doc.get("base")
    if not isinstance(base, list) or not all(isinstance(n, str) for n in base):
        raise FormatError(f"{context}: base must be a list of generator names")
    raw_stages = doc.get("stages")
    if not isinstance(raw_stages, list):
        raise FormatError(f"{context}: missing stages list")
    stages = []
    for entry in raw_stages:
        if not isinstance(entry, dict):
            raise FormatError(f"{context}: stage entries must be objects")
        stages.append(Stage(tuple(entry.get("A", ())), tuple(entry.get("B", ()))))
    smap = doc.get("structureMap")
    if not isinstance(smap, dict) or "target" not in smap:
        raise FormatError(f"{context}: missing structureMap with target")
    target = dgla_from_doc(smap["target"], context=f"{context}: structureMap target")
    images = morphism_images_from_doc(
        smap.get("images", {}), dgla, target, f"{context}: structureMap"
    )
    q = DGLAMorphism(dgla, target, images)
    return RelativeModel(dgla, tuple(base), tuple(stages), q)


# -- endomorphisms --------------------------------------------------------------


def endo_from_doc(doc: dict, model: RelativeModel, context: str = "endo") -> FilteredEndo:
    if doc.get("kind") != "endo":
        raise FormatError(f"{context}: expected an endo document")
    raw_images = doc.get("images", {})
    if not isinstance(raw_images, dict):
        raise FormatError(f"{context}: images must be a mapping")
    images = {}
    degrees = {g.name: g.degree for g in model.dgla.generators}
    for name in sorted(raw_images):
        if name not in degrees:
            raise FormatError(f"{context}: image for unknown generator {name!r}")
        terms = _parse_field_expr(raw_images[name], f"{context}: images[{name}]")
        images[name] = model.dgla.eval_terms(terms, expected_degree=degrees[name])
    return FilteredEndo(model, images)


def endo_to_doc(endo: FilteredEndo) -> dict:
    return {
        "kind": "endo",
        "images": {
            g.name: endo.model.dgla.element_expr(endo.image(g.name))
            for g in endo.model.dgla.generators
        },
    }
