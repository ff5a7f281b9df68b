"""Strict readers for graph, update and query files.

Graph file::

    p dgraph <n> <m> <W>
    e <u> <v> <w>          (m lines)

Update file lines are ``add u v w``, ``del u v``, ``rew u v w`` or
``delnode v``; query file lines are ``u v``.  Nodes are 1-indexed, blank
lines are ignored and every error carries its file and line number.
"""

from __future__ import annotations

import re
from pathlib import Path
from typing import Iterator

from .errors import ConfigurationError, ParseError
from .graphoracle import Delete, DeleteNode, GraphSpec, Insert, Op, Reweight, UpdateBatch

_INT = re.compile(r"-?[0-9]+\Z")
_NAT = re.compile(r"[0-9]+\Z")


def _lines(text: str) -> Iterator[tuple[int, list[str]]]:
    for number, raw in enumerate(text.splitlines(), start=1):
        fields = raw.split()
        if fields:
            yield number, fields


def _ints(fields: list[str], where: dict, *, signed_last: bool = False) -> list[int]:
    out = []
    for k, tok in enumerate(fields):
        pattern = _INT if signed_last and k == len(fields) - 1 else _NAT
        if not pattern.match(tok):
            raise ParseError(f"expected an integer, got {tok!r}", **where)
        out.append(int(tok))
    return out


def _node(v: int, n: int, where: dict) -> int:
    if not 1 <= v <= n:
        raise ParseError(f"node {v} outside 1..{n}", **where)
    return v


def parse_graph(text: str, path: str | None = None) -> GraphSpec:
    lines = list(_lines(text))
    if not lines:
        raise ParseError("empty graph file", path=path, line=1)
    number, head = lines[0]
    where = {"path": path, "line": number}
    if len(head) != 5 or head[:2] != ["p", "dgraph"]:
        raise ParseError("header must be 'p dgraph <n> <m> <W>'", **where)
    n, m, bound = _ints(head[2:], where)
    if n < 1:
        raise ParseError("node count must be positive", **where)
    if len(lines) - 1 != m:
        raise ParseError(f"header declares {m} edges, file has {len(lines) - 1}", **where)
    edges: dict[tuple[int, int], int] = {}
    for number, fields in lines[1:]:
        where = {"path": path, "line": number}
        if len(fields) != 4 or fields[0] != "e":
            raise ParseError("edge line must be 'e <u> <v> <w>'", **where)
        u, v, w = _ints(fields[1:], where, signed_last=True)
        _node(u, n, where)
        _node(v, n, where)
        if u == v:
            raise ParseError(f"self-loop at node {u}", **where)
        if abs(w) > bound:
            raise ParseError(f"weight {w} exceeds bound {bound}", **where)
        if (u, v) in edges:
            raise ParseError(f"duplicate edge {u} {v}", **where)
        edges[(u, v)] = w
    return GraphSpec(n, bound, edges)


def parse_updates(text: str, spec: GraphSpec, mode: str, path: str | None = None) -> UpdateBatch:
    """Parse an update batch and check it against ``spec`` (``mode`` is ``distance`` or ``reach``)."""
    ops: list[Op] = []
    arity = {"add": 4, "del": 3, "rew": 4, "delnode": 2}
    for number, fields in _lines(text):
        where = {"path": path, "line": number}
        kind = fields[0]
        if kind not in arity:
            raise ParseError(f"unknown update {kind!r}", **where)
        if len(fields) != arity[kind]:
            raise ParseError(f"'{kind}' takes {arity[kind] - 1} arguments", **where)
        args = _ints(fields[1:], where, signed_last=kind in ("add", "rew"))
        if kind == "delnode":
            if mode != "reach":
                raise ParseError("delnode is only allowed in reach mode", **where)
            op: Op = DeleteNode(_node(args[0], spec.n, where))
        else:
            u, v = (_node(x, spec.n, where) for x in args[:2])
            present = (u, v) in spec.edges
            if kind == "add" and present:
                raise ParseError(f"add of existing edge {u} {v}", **where)
            if kind != "add" and not present:
                raise ParseError(f"{kind} of absent edge {u} {v}", **where)
            op = {"add": Insert, "rew": Reweight}[kind](u, v, args[2]) if kind != "del" else Delete(u, v)
        try:
            UpdateBatch(tuple(ops) + (op,)).validate(spec, allow_node_deletion=mode == "reach")
        except ConfigurationError as exc:
            raise ParseError(str(exc), **where) from None
        ops.append(op)
    return UpdateBatch(tuple(ops))


def parse_queries(text: str, n: int, path: str | None = None) -> list[tuple[int, int]]:
    out = []
    for number, fields in _lines(text):
        where = {"path": path, "line": number}
        if len(fields) != 2:
            raise ParseError("query line must be '<u> <v>'", **where)
        u, v = _ints(fields, where)
        out.append((_node(u, n, where), _node(v, n, where)))
    return out


def _read(path: str | Path) -> str:
    try:
        return Path(path).read_text(encoding="ascii")
    except (OSError, UnicodeDecodeError) as exc:
        raise ParseError(f"cannot read file: {exc}", path=str(path)) from None


def read_graph(path: str | Path) -> GraphSpec:
    return parse_graph(_read(path), str(path))


def read_updates(path: str | Path, spec: GraphSpec, mode: str) -> UpdateBatch:
    return parse_updates(_read(path), spec, mode, str(path))


def read_queries(path: str | Path, n: int) -> list[tuple[int, int]]:
    return parse_queries(_read(path), n, str(path))
