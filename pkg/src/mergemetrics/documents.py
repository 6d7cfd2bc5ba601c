"""JSON documents for trees, barcodes and paths.

Every document carries ``format`` and ``version`` keys. Floats are written with
Python's shortest round-trip representation, so reading a document back gives
the same 64-bit values. An infinite death is written as ``null``.

Tree document::

    {"format": "mergemetrics.tree", "version": 1,
     "nodes": [{"id": "a", "parent": "r", "height": 0.0}, ...]}

Node ids may be strings or integers; ``parent`` is another id or ``null`` for
the root.
"""

from __future__ import annotations

import json
import math
from typing import Any

from .barcode import Barcode, Interval
from .errors import DocumentSyntaxError
from .paths import DiscretePath
from .tree import MergeTree, validate

__all__ = [
    "FORMAT_VERSION",
    "parse_tree",
    "serialize_tree",
    "parse_barcode",
    "serialize_barcode",
    "parse_path",
    "serialize_path",
    "parse_document",
]

FORMAT_VERSION = 1
TREE_FORMAT = "mergemetrics.tree"
BARCODE_FORMAT = "mergemetrics.barcode"
PATH_FORMAT = "mergemetrics.path"


def _load(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentSyntaxError(exc.msg, line=exc.lineno) from None


def _line_of(text: str, needle: str, nth: int) -> int | None:
    """Line on which the ``nth`` occurrence of ``needle`` starts, if any."""
    pos = -1
    for _ in range(nth + 1):
        pos = text.find(needle, pos + 1)
        if pos < 0:
            return None
    return text.count("\n", 0, pos) + 1


def _check_header(doc: Any, expected: str) -> None:
    if not isinstance(doc, dict):
        raise DocumentSyntaxError("document must be a JSON object")
    if doc.get("format") != expected:
        raise DocumentSyntaxError(f"expected format {expected!r}", field="format")
    if doc.get("version") != FORMAT_VERSION:
        raise DocumentSyntaxError(
            f"unsupported version {doc.get('version')!r}", field="version"
        )


def _number(value: Any, field: str, line: int | None = None) -> float:
    # numeric strings are accepted so that "NaN" reaches validation as a height
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise DocumentSyntaxError(f"{value!r} is not a number", line=line, field=field)
    try:
        return float(value)
    except ValueError:
        raise DocumentSyntaxError(f"{value!r} is not a number", line=line, field=field) from None


def _tree_from_nodes(records: Any, prefix: str, text: str = "") -> MergeTree:
    if not isinstance(records, list):
        raise DocumentSyntaxError("must be a list of node records", field=prefix)
    ids: dict[Any, int] = {}
    raw = []
    for i, rec in enumerate(records):
        line = _line_of(text, "{", i + 1) if text else None
        where = f"{prefix}[{i}]"
        if not isinstance(rec, dict):
            raise DocumentSyntaxError("node record must be an object", line=line, field=where)
        for key in ("id", "parent", "height"):
            if key not in rec:
                raise DocumentSyntaxError(
                    f"node record is missing {key!r}", line=line, field=f"{where}.{key}"
                )
        node_id = rec["id"]
        if isinstance(node_id, bool) or not isinstance(node_id, (str, int)):
            raise DocumentSyntaxError("id must be a string or integer", line=line, field=f"{where}.id")
        if node_id in ids:
            raise DocumentSyntaxError(f"duplicate id {node_id!r}", line=line, field=f"{where}.id")
        ids[node_id] = i
        raw.append((_number(rec["height"], f"{where}.height", line), rec["parent"]))
    nodes = []
    for height, parent in raw:
        if parent is None:
            nodes.append((height, None))
        elif isinstance(parent, (str, int)) and not isinstance(parent, bool) and parent in ids:
            nodes.append((height, ids[parent]))
        else:
            # let validation report the dangling reference
            nodes.append((height, len(raw)))
    return validate(nodes)


def _nodes_of(t: MergeTree) -> list[dict]:
    return [{"id": i, "parent": p, "height": h} for i, (h, p) in enumerate(t.to_nodes())]


def parse_tree(text: str) -> MergeTree:
    doc = _load(text)
    _check_header(doc, TREE_FORMAT)
    if "nodes" not in doc:
        raise DocumentSyntaxError("missing node list", field="nodes")
    return _tree_from_nodes(doc["nodes"], "nodes", text)


def serialize_tree(t: MergeTree) -> str:
    doc = {"format": TREE_FORMAT, "version": FORMAT_VERSION, "nodes": _nodes_of(t)}
    return json.dumps(doc, indent=2) + "\n"


def parse_barcode(text: str) -> Barcode:
    doc = _load(text)
    _check_header(doc, BARCODE_FORMAT)
    records = doc.get("intervals")
    if not isinstance(records, list):
        raise DocumentSyntaxError("missing interval list", field="intervals")
    out = []
    for i, rec in enumerate(records):
        where = f"intervals[{i}]"
        if not isinstance(rec, dict) or "birth" not in rec or "death" not in rec:
            raise DocumentSyntaxError("interval needs 'birth' and 'death'", field=where)
        birth = _number(rec["birth"], f"{where}.birth")
        death = math.inf if rec["death"] is None else _number(rec["death"], f"{where}.death")
        try:
            out.append(Interval(birth, death))
        except ValueError as exc:
            raise DocumentSyntaxError(str(exc), field=where) from None
    return Barcode(out)


def serialize_barcode(b: Barcode) -> str:
    intervals = [
        {"birth": iv.birth, "death": None if math.isinf(iv.death) else iv.death}
        for iv in b
    ]
    doc = {"format": BARCODE_FORMAT, "version": FORMAT_VERSION, "intervals": intervals}
    return json.dumps(doc, indent=2) + "\n"


def parse_path(text: str) -> DiscretePath:
    doc = _load(text)
    _check_header(doc, PATH_FORMAT)
    records = doc.get("waypoints")
    if not isinstance(records, list):
        raise DocumentSyntaxError("missing waypoint list", field="waypoints")
    params, trees = [], []
    for i, rec in enumerate(records):
        where = f"waypoints[{i}]"
        if not isinstance(rec, dict) or "t" not in rec or "nodes" not in rec:
            raise DocumentSyntaxError("waypoint needs 't' and 'nodes'", field=where)
        params.append(_number(rec["t"], f"{where}.t"))
        trees.append(_tree_from_nodes(rec["nodes"], f"{where}.nodes"))
    return DiscretePath(tuple(params), tuple(trees))


def serialize_path(p: DiscretePath) -> str:
    waypoints = [{"t": s, "nodes": _nodes_of(t)} for s, t in zip(p.params, p.trees)]
    doc = {"format": PATH_FORMAT, "version": FORMAT_VERSION, "waypoints": waypoints}
    return json.dumps(doc, indent=2) + "\n"


def parse_document(text: str) -> MergeTree | Barcode | DiscretePath:
    """Parse whichever document type ``text`` declares."""
    doc = _load(text)
    kind = doc.get("format") if isinstance(doc, dict) else None
    parsers = {TREE_FORMAT: parse_tree, BARCODE_FORMAT: parse_barcode, PATH_FORMAT: parse_path}
    if kind not in parsers:
        raise DocumentSyntaxError(f"unknown format {kind!r}", field="format")
    return parsers[kind](text)
