"""Reading and writing map-definition files (YAML, which includes JSON).

Example::

    name: remark
    space: {lo: "0", hi: "1"}
    pieces:
      - {lo: "0", hi: "1/2", lo_closed: true, hi_closed: false, a: "1", b: "0"}
      - {lo: "1/2", hi: "1", lo_closed: true, hi_closed: true, a: "1/2", b: "1/2"}

Numbers are exact: integers or ``"p/q"`` strings.  Decimals are rejected.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Union

import yaml

from .numerics import RatInterval, as_rational, format_rational
from .pcm_model import AffineBranch, PCMap, Piece


class MapFileError(ValueError):
    """A map file that cannot be parsed; the message names line and field."""


def _where(node) -> str:
    return f"line {node.start_mark.line + 1}"


def _mapping(node, what: str) -> dict:
    if not isinstance(node, yaml.MappingNode):
        raise MapFileError(f"{_where(node)}: {what} must be a mapping")
    return {k.value: v for k, v in node.value}


def _number(fields: dict, key: str, owner_node, what: str):
    if key not in fields:
        raise MapFileError(f"{_where(owner_node)}: {what} is missing field '{key}'")
    node = fields[key]
    if not isinstance(node, yaml.ScalarNode):
        raise MapFileError(f"{_where(node)}: field '{key}' of {what} must be a number")
    try:
        return as_rational(node.value)
    except (ValueError, ZeroDivisionError) as exc:
        raise MapFileError(f"{_where(node)}: field '{key}' of {what}: {exc}") from None


def _flag(fields: dict, key: str, default: bool, what: str) -> bool:
    node = fields.get(key)
    if node is None:
        return default
    value = node.value.lower() if isinstance(node, yaml.ScalarNode) else None
    if value not in ("true", "false"):
        raise MapFileError(f"{_where(node)}: field '{key}' of {what} must be true or false")
    return value == "true"


def parse_map(text: str) -> PCMap:
    try:
        root = yaml.compose(text)
    except yaml.YAMLError as exc:
        raise MapFileError(f"not valid YAML/JSON: {exc}") from None
    if root is None:
        raise MapFileError("empty map file")
    top = _mapping(root, "the document")
    if "space" not in top:
        raise MapFileError(f"{_where(root)}: missing field 'space'")
    if "pieces" not in top:
        raise MapFileError(f"{_where(root)}: missing field 'pieces'")
    sp_node = top["space"]
    sp = _mapping(sp_node, "'space'")
    lo, hi = _number(sp, "lo", sp_node, "'space'"), _number(sp, "hi", sp_node, "'space'")
    if lo >= hi:
        raise MapFileError(f"{_where(sp_node)}: 'space' must have lo < hi")
    space = RatInterval(lo, hi)
    seq = top["pieces"]
    if not isinstance(seq, yaml.SequenceNode):
        raise MapFileError(f"{_where(seq)}: field 'pieces' must be a list")
    pieces = []
    for i, node in enumerate(seq.value):
        what = f"piece {i}"
        f = _mapping(node, what)
        lo, hi = _number(f, "lo", node, what), _number(f, "hi", node, what)
        if lo > hi:
            raise MapFileError(f"{_where(node)}: {what} has lo > hi")
        pieces.append(
            Piece(
                RatInterval(lo, hi),
                _flag(f, "lo_closed", True, what),
                _flag(f, "hi_closed", False, what),
                AffineBranch(_number(f, "a", node, what), _number(f, "b", node, what)),
                i,
            )
        )
    name_node = top.get("name")
    name = name_node.value if isinstance(name_node, yaml.ScalarNode) else ""
    return PCMap.from_pieces(space, pieces, name)


def load_map(path: Union[str, Path]) -> PCMap:
    return parse_map(Path(path).read_text())


def map_to_dict(m: PCMap) -> dict:
    out = {
        "space": {"lo": format_rational(m.space.lo), "hi": format_rational(m.space.hi)},
        "pieces": [
            {
                "lo": format_rational(p.span.lo),
                "hi": format_rational(p.span.hi),
                "lo_closed": p.lo_closed,
                "hi_closed": p.hi_closed,
                "a": format_rational(p.branch.a),
                "b": format_rational(p.branch.b),
            }
            for p in m.pieces
        ],
    }
    if m.name:
        out["name"] = m.name
    return out


def dump_map(m: PCMap) -> str:
    return json.dumps(map_to_dict(m), indent=2, sort_keys=True) + "\n"
