"""JSON bundle documents: strict parsing, evaluation, and serialization.

Every document has ``"format": 1`` and a ``"kind"``:

* ``explicit``: ``g``, ``b``, ``images`` keyed ``a1, b1, ..., ab, bb``
  (optional ``signature``, ``has_zero_section``)
* ``declared``: ``g``, ``b``, ``signature``, ``coinv_rank_lo``, ``coinv_rank_hi``,
  ``has_zero_section`` (optional ``coinv_rank_parity``)
* ``generating_set``: ``g``, ``b``, ``images`` as a list, ``origin``
  (optional ``signature``, ``has_zero_section``)
* ``construction``: ``root``, a tree of ``{"op": ...}`` nodes

Construction nodes are evaluated bottom up; a failure names the tree path.
"""
from __future__ import annotations

import json
import re
from pathlib import Path
from typing import Any

from .errors import InvariantViolation, KodfibError, SchemaError, ShapeError
from .linalg import IntMatrix
from .monodromy import (BundleSpec, DeclaredBlock, GeneratingSetRep, Provenance, SymplecticRep,
                        declared_bundle, declared_ekkos, explicit_bundle, fiber_sum_with_product,
                        generating_set_bundle, kodaira_thurston_q, product_block, restrict_to_cover,
                        section_sum, trefoil_block)
from .surface import CyclicCoverSpec, generator_name

FORMAT_VERSION = 1

_PARITY_NAMES = {0: "even", 1: "odd"}


class BuildError(KodfibError):
    """An invariant failed while evaluating a construction node."""

    def __init__(self, path: str, cause: Exception):
        super().__init__(f"{path}: {cause}")
        self.path = path
        self.cause = cause


# field helpers

def _int(obj: dict, key: str, path: str, minimum: int | None = None) -> int:
    if key not in obj:
        raise SchemaError(f"{path}: missing field {key!r}")
    v = obj[key]
    if not isinstance(v, int) or isinstance(v, bool):
        raise SchemaError(f"{path}.{key}: expected an integer, got {v!r}")
    if minimum is not None and v < minimum:
        raise SchemaError(f"{path}.{key}: must be >= {minimum}, got {v}")
    return v


def _bool(obj: dict, key: str, path: str, default: bool | None = None) -> bool:
    if key not in obj:
        if default is None:
            raise SchemaError(f"{path}: missing field {key!r}")
        return default
    v = obj[key]
    if not isinstance(v, bool):
        raise SchemaError(f"{path}.{key}: expected a boolean, got {v!r}")
    return v


def _signature(obj: dict, key: str, path: str, required: bool):
    if key not in obj:
        if required:
            raise SchemaError(f"{path}: missing field {key!r}")
        return None
    v = obj[key]
    if v is None or (isinstance(v, int) and not isinstance(v, bool)):
        return v
    if (isinstance(v, list) and len(v) == 2
            and all(isinstance(x, int) and not isinstance(x, bool) for x in v) and v[0] <= v[1]):
        return tuple(v)
    raise SchemaError(f"{path}.{key}: expected an integer, [lo, hi] or null, got {v!r}")


def _check_keys(obj: Any, allowed: set[str], required: set[str], path: str):
    if not isinstance(obj, dict):
        raise SchemaError(f"{path}: expected an object")
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise SchemaError(f"{path}: unknown field(s) {unknown}")
    missing = sorted(required - set(obj))
    if missing:
        raise SchemaError(f"{path}: missing field(s) {missing}")


def _matrix(v: Any, size: int, path: str) -> IntMatrix:
    if not isinstance(v, list) or len(v) != size:
        raise SchemaError(f"{path}: expected {size} rows")
    for i, row in enumerate(v):
        if not isinstance(row, list) or len(row) != size:
            raise SchemaError(f"{path}[{i}]: expected a row of length {size}")
        for x in row:
            if not isinstance(x, int) or isinstance(x, bool):
                raise SchemaError(f"{path}[{i}]: non-integer entry {x!r}")
    return IntMatrix(v, cols=size)


# leaves

_EXPLICIT_KEYS = {"g", "b", "images", "signature", "has_zero_section"}
_DECLARED_KEYS = {"g", "b", "signature", "coinv_rank_lo", "coinv_rank_hi", "has_zero_section",
                  "coinv_rank_parity"}
_GENSET_KEYS = {"g", "b", "images", "origin", "signature", "has_zero_section"}


def _parse_explicit(obj: dict, path: str, extra: set[str]) -> BundleSpec:
    _check_keys(obj, _EXPLICIT_KEYS | extra, {"g", "b", "images"}, path)
    g, b = _int(obj, "g", path, 1), _int(obj, "b", path, 1)
    images = obj["images"]
    expected = [generator_name(i) for i in range(2 * b)]
    if not isinstance(images, dict) or list(images) != expected:
        got = list(images) if isinstance(images, dict) else images
        raise SchemaError(f"{path}.images: expected keys {expected} in that order, got {got}")
    mats = tuple(_matrix(images[k], 2 * g, f"{path}.images.{k}") for k in expected)
    sig = _signature(obj, "signature", path, required=False)
    section = _bool(obj, "has_zero_section", path, default=False)
    try:
        return explicit_bundle(SymplecticRep(g, b, mats), sig, section)
    except InvariantViolation as exc:
        raise BuildError(path, exc) from exc


def _parse_declared(obj: dict, path: str, extra: set[str]) -> BundleSpec:
    _check_keys(obj, _DECLARED_KEYS | extra, _DECLARED_KEYS - {"coinv_rank_parity"}, path)
    g, b = _int(obj, "g", path, 1), _int(obj, "b", path, 1)
    lo, hi = _int(obj, "coinv_rank_lo", path, 0), _int(obj, "coinv_rank_hi", path, 0)
    parity = obj.get("coinv_rank_parity")
    if parity not in (None, "even", "odd"):
        raise SchemaError(f"{path}.coinv_rank_parity: expected 'even', 'odd' or null")
    try:
        block = DeclaredBlock(g, b, lo, hi, None if parity is None else int(parity == "odd"))
    except ShapeError as exc:
        raise SchemaError(f"{path}: {exc}") from exc
    return declared_bundle(block, _signature(obj, "signature", path, required=True),
                           _bool(obj, "has_zero_section", path))


def _parse_generating_set(obj: dict, path: str, extra: set[str]) -> BundleSpec:
    _check_keys(obj, _GENSET_KEYS | extra, {"g", "b", "images", "origin"}, path)
    g, b = _int(obj, "g", path, 1), _int(obj, "b", path, 1)
    if not isinstance(obj["images"], list):
        raise SchemaError(f"{path}.images: expected a list of matrices")
    if not isinstance(obj["origin"], str):
        raise SchemaError(f"{path}.origin: expected a string")
    mats = tuple(_matrix(m, 2 * g, f"{path}.images[{i}]") for i, m in enumerate(obj["images"]))
    try:
        return generating_set_bundle(GeneratingSetRep(g, b, mats, obj["origin"]),
                                     _signature(obj, "signature", path, required=False),
                                     _bool(obj, "has_zero_section", path, default=False))
    except InvariantViolation as exc:
        raise BuildError(path, exc) from exc


# construction trees

def _node_ops():
    return {
        "product": ({"g", "b"}, lambda n, p: product_block(_int(n, "g", p, 1), _int(n, "b", p, 1))),
        "trefoil": ({"b"}, lambda n, p: trefoil_block(_int(n, "b", p, 1))),
        "kodaira_thurston": ({"b"}, lambda n, p: kodaira_thurston_q(_int(n, "b", p, 1))),
    }


def _parity_arg(node: dict, path: str) -> str | None:
    parity = node.get("parity")
    if parity not in (None, "even", "odd"):
        raise SchemaError(f"{path}.parity: expected 'even', 'odd' or null")
    return parity


def build_node(node: Any, path: str = "root") -> BundleSpec:
    if not isinstance(node, dict) or "op" not in node:
        raise SchemaError(f"{path}: expected a node object with an 'op' field")
    op = node["op"]
    leaf_ops = {"explicit": _parse_explicit, "declared": _parse_declared,
                "generating_set": _parse_generating_set}
    if op in leaf_ops:
        return leaf_ops[op](node, path, {"op"})

    simple = _node_ops()
    try:
        if op in simple:
            keys, build = simple[op]
            _check_keys(node, keys | {"op"}, keys | {"op"}, path)
            return build(node, path)
        if op == "ekkos":
            _check_keys(node, {"op", "parity"}, {"op"}, path)
            return declared_ekkos(_parity_arg(node, path))
        if op == "section_sum":
            _check_keys(node, {"op", "left", "right"}, {"op", "left", "right"}, path)
            left = build_node(node["left"], f"{path}.left")
            right = build_node(node["right"], f"{path}.right")
            return section_sum(left, right)
        if op == "fiber_sum_product":
            _check_keys(node, {"op", "of", "c"}, {"op", "of", "c"}, path)
            c = _int(node, "c", path, 1)
            return fiber_sum_with_product(build_node(node["of"], f"{path}.of"), c)
        if op == "cover":
            _check_keys(node, {"op", "of", "degree", "images"}, {"op", "of", "degree", "images"}, path)
            n = _int(node, "degree", path, 1)
            images = node["images"]
            if not isinstance(images, list) or not all(
                    isinstance(x, int) and not isinstance(x, bool) for x in images):
                raise SchemaError(f"{path}.images: expected a list of integers")
            inner = build_node(node["of"], f"{path}.of")
            if len(images) != 2 * inner.base_genus:
                raise SchemaError(f"{path}.images: expected {2 * inner.base_genus} residues")
            try:
                spec = CyclicCoverSpec(n, tuple(images))
            except ValueError as exc:
                raise SchemaError(f"{path}: {exc}") from exc
            return restrict_to_cover(inner, spec)
    except (SchemaError, BuildError):
        raise
    except (InvariantViolation, KodfibError, ValueError) as exc:
        raise BuildError(path, exc) from exc
    raise SchemaError(f"{path}: unknown op {op!r}")


def parse_document(doc: Any) -> BundleSpec:
    """Evaluate a decoded JSON document into a :class:`BundleSpec`."""
    if not isinstance(doc, dict):
        raise SchemaError("document must be a JSON object")
    if doc.get("format") != FORMAT_VERSION:
        raise SchemaError(f"unsupported or missing format (expected {FORMAT_VERSION})")
    kind = doc.get("kind")
    body = {k: v for k, v in doc.items() if k not in ("format", "kind")}
    if kind == "explicit":
        return _parse_explicit(body, "document", set())
    if kind == "declared":
        return _parse_declared(body, "document", set())
    if kind == "generating_set":
        return _parse_generating_set(body, "document", set())
    if kind == "construction":
        _check_keys(body, {"root"}, {"root"}, "document")
        return build_node(body["root"])
    raise SchemaError(f"unknown document kind {kind!r}")


def loads(text: str) -> BundleSpec:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from exc
    return parse_document(doc)


def load(path: str | Path) -> BundleSpec:
    return loads(Path(path).read_text())


# serialization

def _sig_json(sig):
    return list(sig) if isinstance(sig, tuple) else sig


def _leaf_fields(prov: Provenance) -> dict:
    content = prov.leaf
    sig, section = prov.arg("signature"), prov.arg("has_zero_section")
    out: dict[str, Any] = {"g": content.fiber_genus, "b": content.base_genus}
    if prov.op == "explicit":
        out["images"] = {generator_name(i): M.tolist() for i, M in enumerate(content.images)}
        out["signature"] = _sig_json(sig)
        out["has_zero_section"] = section
    elif prov.op == "declared":
        out.update(signature=_sig_json(sig), coinv_rank_lo=content.rank_lo,
                   coinv_rank_hi=content.rank_hi, has_zero_section=section,
                   coinv_rank_parity=_PARITY_NAMES.get(content.rank_parity))
    else:
        out.update(images=[M.tolist() for M in content.images], origin=content.origin,
                   signature=_sig_json(sig), has_zero_section=section)
    return out


def node_to_json(prov: Provenance) -> dict:
    if prov.leaf is not None:
        return {"op": prov.op, **_leaf_fields(prov)}
    args = dict(prov.args)
    if prov.op in ("product", "trefoil", "kodaira_thurston"):
        return {"op": prov.op, **args}
    if prov.op == "ekkos":
        return {"op": "ekkos", **({"parity": args["parity"]} if args.get("parity") else {})}
    if prov.op == "section_sum":
        left, right = prov.children
        return {"op": "section_sum", "left": node_to_json(left), "right": node_to_json(right)}
    if prov.op == "fiber_sum_product":
        return {"op": "fiber_sum_product", "of": node_to_json(prov.children[0]), "c": args["c"]}
    if prov.op == "cover":
        return {"op": "cover", "of": node_to_json(prov.children[0]),
                "degree": args["degree"], "images": list(args["images"])}
    raise ValueError(f"cannot serialize provenance op {prov.op!r}")


def to_document(bundle: BundleSpec) -> dict:
    """Inverse of :func:`parse_document`."""
    prov = bundle.provenance
    if prov.leaf is not None:
        return {"format": FORMAT_VERSION, "kind": prov.op, **_leaf_fields(prov)}
    return {"format": FORMAT_VERSION, "kind": "construction", "root": node_to_json(prov)}


_INT_LIST = re.compile(r"\[\s*-?\d+(?:,\s*-?\d+)*\s*\]")


def dumps(bundle: BundleSpec) -> str:
    text = json.dumps(to_document(bundle), indent=2)
    # one line per matrix row
    return _INT_LIST.sub(lambda m: "[" + ", ".join(m.group(0)[1:-1].split()).replace(",,", ",") + "]", text) + "\n"


def as_generating_set_leaf(bundle: BundleSpec) -> BundleSpec:
    """Detach a restricted bundle from its construction tree."""
    if not isinstance(bundle.content, GeneratingSetRep):
        raise TypeError("expected a bundle with generating-set content")
    return generating_set_bundle(bundle.content, bundle.signature, bundle.has_zero_section)
