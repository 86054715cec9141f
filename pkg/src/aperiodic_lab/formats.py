"""File formats: rule JSON, textual configurations, series CSV, and JSON
tables for codes, pointing rules, cocycles, and weights.

JSON is always written canonically (sorted keys, two-space indent, trailing
newline) so identical inputs produce byte-identical files.  Pattern-keyed
tables use the same string form everywhere: cells joined by commas, rows
joined by semicolons.
"""

from __future__ import annotations

import hashlib
import json
import re
from pathlib import Path

import numpy as np

from .counting import ComplexitySeries
from .deformation import EdgeCocycle, VertexWeight
from .derivation import BlockCode, PointingRule, parse_pattern_key, pattern_key
from .errors import FormatError
from .geometry import Triangulation
from .recurrence import RepetitivitySeries, ReturnVectorSet
from .symbolic import Alphabet, Configuration, Provenance, SubstitutionRule

__all__ = [
    "dump_json",
    "save_json",
    "load_json",
    "sha256_file",
    "rule_to_dict",
    "rule_from_dict",
    "save_rule",
    "load_rule",
    "save_config",
    "load_config",
    "save_series",
    "load_series",
    "save_points",
    "load_points",
    "triangulation_to_dict",
    "save_code",
    "load_code",
    "save_pointing",
    "load_pointing",
    "save_cocycle",
    "load_cocycle",
    "save_weight",
    "load_weight",
    "return_vectors_to_dict",
]

_CONFIG_MAGIC = "aperiodic-lab config v1"
_SYMBOL_RE = re.compile(r"^[A-Za-z0-9_.+-]+$")


def dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def save_json(obj, path) -> None:
    Path(path).write_text(dump_json(obj))


def load_json(path):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise FormatError(f"{path}: not valid JSON ({exc})") from None


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _check_symbols(symbols) -> None:
    for s in symbols:
        if not _SYMBOL_RE.match(s):
            raise FormatError(
                f"symbol {s!r} not serializable: use letters, digits, _ . + -"
            )


# --- substitution rules -----------------------------------------------------


def rule_to_dict(rule: SubstitutionRule) -> dict:
    images = {}
    for s, img in rule.images.items():
        if rule.dimension == 1:
            images[s] = "".join(img) if all(len(t) == 1 for t in img) else list(img)
        else:
            images[s] = [list(row) for row in img]
    return {
        "dimension": rule.dimension,
        "alphabet": list(rule.alphabet.symbols),
        "images": images,
        "name": rule.rule_id,
    }


def rule_from_dict(obj, default_name: str = "rule") -> SubstitutionRule:
    if not isinstance(obj, dict):
        raise FormatError("rule document must be a JSON object")
    required = {"dimension", "alphabet", "images"}
    missing = required - obj.keys()
    if missing:
        raise FormatError(f"rule document missing keys {sorted(missing)}")
    unknown = obj.keys() - required - {"name"}
    if unknown:
        raise FormatError(f"rule document has unknown keys {sorted(unknown)}")
    dim = obj["dimension"]
    if dim not in (1, 2):
        raise FormatError(f"dimension must be 1 or 2, got {dim!r}")
    symbols = obj["alphabet"]
    if not isinstance(symbols, list) or not all(isinstance(s, str) for s in symbols):
        raise FormatError("alphabet must be a list of strings")
    _check_symbols(symbols)
    alphabet = Alphabet(tuple(symbols))
    raw = obj["images"]
    if not isinstance(raw, dict):
        raise FormatError("images must be an object")
    images = {}
    for s, img in raw.items():
        if dim == 1:
            if isinstance(img, str):
                images[s] = tuple(img)
            elif isinstance(img, list) and all(isinstance(t, str) for t in img):
                images[s] = tuple(img)
            else:
                raise FormatError(f"image of {s!r} must be a string or list of symbols")
        else:
            if not (isinstance(img, list) and all(isinstance(row, list) for row in img)):
                raise FormatError(f"image of {s!r} must be a list of rows")
            images[s] = tuple(tuple(row) for row in img)
    name = obj.get("name", default_name)
    if not isinstance(name, str):
        raise FormatError("rule name must be a string")
    return SubstitutionRule(dimension=dim, alphabet=alphabet, images=images, rule_id=name)


def save_rule(rule: SubstitutionRule, path) -> None:
    save_json(rule_to_dict(rule), path)


def load_rule(path) -> SubstitutionRule:
    return rule_from_dict(load_json(path), default_name=Path(path).stem)


# --- configurations ---------------------------------------------------------


def save_config(config: Configuration, path) -> None:
    _check_symbols(config.alphabet.symbols)
    lines = [
        _CONFIG_MAGIC,
        f"dimension={config.dimension}",
        "alphabet=" + ",".join(config.alphabet.symbols),
        "shape=" + ",".join(str(n) for n in config.shape),
        "origin=" + ",".join(str(o) for o in config.origin),
        f"certified_radius={config.certified_radius}",
    ]
    if isinstance(config.provenance, Provenance):
        p = config.provenance
        lines += [f"rule={p.rule_id}", f"seed={p.seed}", f"levels={p.levels}"]
    lines.append("---")
    cells = config.cells if config.dimension == 2 else config.cells[None, :]
    names = config.alphabet.symbols
    for row in cells:
        lines.append(",".join(names[i] for i in row))
    Path(path).write_text("\n".join(lines) + "\n")


def load_config(path) -> Configuration:
    text = Path(path).read_text()
    lines = text.splitlines()
    if not lines or lines[0].strip() != _CONFIG_MAGIC:
        raise FormatError(f"{path}: missing '{_CONFIG_MAGIC}' header")
    header = {}
    body_at = None
    for k, line in enumerate(lines[1:], start=1):
        if line.strip() == "---":
            body_at = k + 1
            break
        if "=" not in line:
            raise FormatError(f"{path}: bad header line {line!r}")
        key, _, val = line.partition("=")
        header[key.strip()] = val.strip()
    if body_at is None:
        raise FormatError(f"{path}: missing '---' separator")
    for key in ("dimension", "alphabet", "shape"):
        if key not in header:
            raise FormatError(f"{path}: header missing {key}")
    try:
        dim = int(header["dimension"])
        shape = tuple(int(n) for n in header["shape"].split(","))
        if header.get("origin"):
            origin = tuple(int(n) for n in header["origin"].split(","))
        else:
            origin = (0,) * dim
        certified = int(header.get("certified_radius", "0"))
    except ValueError as exc:
        raise FormatError(f"{path}: bad header value ({exc})") from None
    alphabet = Alphabet(tuple(header["alphabet"].split(",")))
    if dim not in (1, 2) or len(shape) != dim:
        raise FormatError(f"{path}: inconsistent dimension/shape")
    rows = [line for line in lines[body_at:] if line.strip()]
    expect_rows = shape[0] if dim == 2 else 1
    if len(rows) != expect_rows:
        raise FormatError(f"{path}: expected {expect_rows} symbol rows, found {len(rows)}")
    width = shape[1] if dim == 2 else shape[0]
    mat = []
    for line in rows:
        cells = line.split(",")
        if len(cells) != width:
            raise FormatError(f"{path}: row of width {len(cells)}, expected {width}")
        mat.append([alphabet.index(c) for c in cells])
    cells = np.asarray(mat, dtype=np.uint8)
    if dim == 1:
        cells = cells[0]
    prov = "file"
    if {"rule", "seed", "levels"} <= header.keys():
        prov = Provenance(header["rule"], header["seed"], int(header["levels"]))
    return Configuration(
        dimension=dim,
        alphabet=alphabet,
        cells=cells,
        origin=origin,
        provenance=prov,
        certified_radius=certified,
    )


# --- series ------------------------------------------------------------------


def save_series(series, path) -> None:
    Path(path).write_text(series.to_csv())


def load_series(path):
    """Sniff the header: r,count,... is a complexity series, r,value,... a
    repetitivity series."""
    text = Path(path).read_text()
    first = text.splitlines()[0].strip() if text.strip() else ""
    head = [h.strip() for h in first.split(",")]
    if head[:2] == ["r", "count"]:
        return ComplexitySeries.from_csv(text)
    if head[:2] == ["r", "value"]:
        return RepetitivitySeries.from_csv(text)
    raise FormatError(f"{path}: unrecognized series header {first!r}")


# --- point sets and triangulations ------------------------------------------


def save_points(points: np.ndarray, path) -> None:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    lines = [",".join(repr(float(c)) for c in p) for p in pts]
    Path(path).write_text("\n".join(lines) + "\n")


def load_points(path) -> np.ndarray:
    rows = []
    for line in Path(path).read_text().splitlines():
        if not line.strip():
            continue
        try:
            rows.append([float(c) for c in line.split(",")])
        except ValueError:
            raise FormatError(f"{path}: bad point line {line!r}") from None
    if not rows or len({len(r) for r in rows}) != 1:
        raise FormatError(f"{path}: empty or ragged point list")
    return np.asarray(rows)


def triangulation_to_dict(tri: Triangulation) -> dict:
    return {
        "kind": "triangulation",
        "dimension": tri.dimension,
        "points": [[float(c) for c in p] for p in tri.points],
        "simplices": [[int(v) for v in s] for s in tri.simplices],
    }


# --- pattern-keyed tables ----------------------------------------------------


def _shape_of(dimension: int, radius: int) -> tuple:
    return (2 * radius + 1,) * dimension


def save_code(code: BlockCode, path) -> None:
    shape = _shape_of(code.dimension, code.radius)
    table = {
        pattern_key(np.frombuffer(k, dtype=np.uint8).reshape(shape), code.in_alphabet):
            code.out_alphabet.symbols[v]
        for k, v in code.table.items()
    }
    save_json(
        {
            "kind": "block-code",
            "dimension": code.dimension,
            "radius": code.radius,
            "in_alphabet": list(code.in_alphabet.symbols),
            "out_alphabet": list(code.out_alphabet.symbols),
            "name": code.name,
            "table": table,
        },
        path,
    )


def load_code(path) -> BlockCode:
    obj = load_json(path)
    _expect_kind(obj, "block-code", path)
    in_alpha = Alphabet(tuple(obj["in_alphabet"]))
    out_alpha = Alphabet(tuple(obj["out_alphabet"]))
    dim, radius = int(obj["dimension"]), int(obj["radius"])
    table = {
        parse_pattern_key(k, in_alpha, dim).tobytes(): out_alpha.index(v)
        for k, v in obj["table"].items()
    }
    return BlockCode(
        dimension=dim,
        radius=radius,
        in_alphabet=in_alpha,
        out_alphabet=out_alpha,
        table=table,
        name=str(obj.get("name", Path(path).stem)),
    )


def save_pointing(rule: PointingRule, path) -> None:
    if rule.table is None or rule.alphabet is None:
        raise FormatError("only table-backed pointing rules are serializable")
    shape = _shape_of(rule.dimension, rule.radius)
    table = {
        pattern_key(np.frombuffer(k, dtype=np.uint8).reshape(shape), rule.alphabet): bool(v)
        for k, v in rule.table.items()
    }
    save_json(
        {
            "kind": "pointing-rule",
            "dimension": rule.dimension,
            "radius": rule.radius,
            "alphabet": list(rule.alphabet.symbols),
            "name": rule.name,
            "table": table,
        },
        path,
    )


def load_pointing(path) -> PointingRule:
    obj = load_json(path)
    _expect_kind(obj, "pointing-rule", path)
    alphabet = Alphabet(tuple(obj["alphabet"]))
    dim, radius = int(obj["dimension"]), int(obj["radius"])
    table = {
        parse_pattern_key(k, alphabet, dim).tobytes(): bool(v)
        for k, v in obj["table"].items()
    }
    return PointingRule(
        dimension=dim,
        radius=radius,
        name=str(obj.get("name", Path(path).stem)),
        table=table,
        alphabet=alphabet,
    )


def save_cocycle(cocycle: EdgeCocycle, path) -> None:
    if cocycle.table is None or cocycle.alphabet is None:
        raise FormatError("only table-backed cocycles are serializable")
    shape = _shape_of(cocycle.dimension, cocycle.radius)
    by_axis: dict[str, dict] = {}
    for (axis, k), v in cocycle.table.items():
        key = pattern_key(np.frombuffer(k, dtype=np.uint8).reshape(shape), cocycle.alphabet)
        by_axis.setdefault(str(axis), {})[key] = [float(c) for c in v]
    save_json(
        {
            "kind": "edge-cocycle",
            "dimension": cocycle.dimension,
            "radius": cocycle.radius,
            "alphabet": list(cocycle.alphabet.symbols),
            "name": cocycle.name,
            "edge_table": by_axis,
        },
        path,
    )


def load_cocycle(path) -> EdgeCocycle:
    obj = load_json(path)
    _expect_kind(obj, "edge-cocycle", path)
    alphabet = Alphabet(tuple(obj["alphabet"]))
    dim, radius = int(obj["dimension"]), int(obj["radius"])
    table = {}
    for axis_s, sub in obj["edge_table"].items():
        axis = int(axis_s)
        if not 0 <= axis < dim:
            raise FormatError(f"{path}: axis {axis_s} out of range")
        for k, v in sub.items():
            table[(axis, parse_pattern_key(k, alphabet, dim).tobytes())] = tuple(
                float(c) for c in v
            )
    return EdgeCocycle(
        dimension=dim,
        radius=radius,
        name=str(obj.get("name", Path(path).stem)),
        alphabet=alphabet,
        table=table,
    )


def save_weight(weight: VertexWeight, path) -> None:
    if weight.table is None or weight.alphabet is None:
        raise FormatError("only table-backed weights are serializable")
    shape = _shape_of(weight.dimension, weight.radius)
    table = {
        pattern_key(np.frombuffer(k, dtype=np.uint8).reshape(shape), weight.alphabet):
            [float(c) for c in v]
        for k, v in weight.table.items()
    }
    save_json(
        {
            "kind": "vertex-weight",
            "dimension": weight.dimension,
            "radius": weight.radius,
            "alphabet": list(weight.alphabet.symbols),
            "name": weight.name,
            "table": table,
        },
        path,
    )


def load_weight(path) -> VertexWeight:
    obj = load_json(path)
    _expect_kind(obj, "vertex-weight", path)
    alphabet = Alphabet(tuple(obj["alphabet"]))
    dim, radius = int(obj["dimension"]), int(obj["radius"])
    table = {
        parse_pattern_key(k, alphabet, dim).tobytes(): tuple(float(c) for c in v)
        for k, v in obj["table"].items()
    }
    return VertexWeight(
        dimension=dim,
        radius=radius,
        name=str(obj.get("name", Path(path).stem)),
        alphabet=alphabet,
        table=table,
    )


def _expect_kind(obj, kind: str, path) -> None:
    if not isinstance(obj, dict) or obj.get("kind") != kind:
        raise FormatError(f"{path}: expected a {kind} document")
    for key in ("dimension", "radius"):
        if key not in obj:
            raise FormatError(f"{path}: missing {key}")


def return_vectors_to_dict(rv: ReturnVectorSet) -> dict:
    vecs = sorted(rv.vectors)
    return {
        "radius": rv.radius,
        "max_norm": rv.max_norm,
        "vectors": [list(v) for v in vecs],
        "counts": [rv.vectors[v] for v in vecs],
    }
