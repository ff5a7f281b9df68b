from __future__ import annotations

import pytest

from sensoracle.errors import ParseError
from sensoracle.formats import parse_graph, parse_queries, parse_updates, read_graph
from sensoracle.graphoracle import Delete, DeleteNode, GraphSpec, Insert, Reweight

PATH = "p dgraph 3 2 1\ne 1 2 1\ne 2 3 -1\n"


def path_spec() -> GraphSpec:
    return parse_graph(PATH)


def test_parse_graph_example():
    spec = parse_graph("p dgraph 2 1 1\ne 1 2 -1\n")
    assert spec == GraphSpec(2, 1, {(1, 2): -1})


def test_parse_graph_with_blank_lines_and_no_edges():
    assert parse_graph("\np dgraph 4 0 2\n\n") == GraphSpec(4, 2)
    assert path_spec().edges == {(1, 2): 1, (2, 3): -1}


@pytest.mark.parametrize(
    "text,line,fragment",
    [
        ("", 1, "empty"),
        ("p graph 2 1 1\ne 1 2 0\n", 1, "header"),
        ("p dgraph 2 2 1\ne 1 2 0\n", 1, "declares 2"),
        ("p dgraph 2 1 1\ne 1 3 0\n", 2, "outside"),
        ("p dgraph 2 1 1\ne 2 2 0\n", 2, "self-loop"),
        ("p dgraph 2 1 1\ne 1 2 2\n", 2, "exceeds"),
        ("p dgraph 2 2 1\ne 1 2 0\ne 1 2 1\n", 3, "duplicate"),
        ("p dgraph 2 1 1\nx 1 2 0\n", 2, "edge line"),
        ("p dgraph 2 1 1\ne 1 two 0\n", 2, "integer"),
        ("p dgraph 0 0 1\n", 1, "positive"),
        ("p dgraph 2 1 -1\ne 1 2 0\n", 1, "integer"),
    ],
)
def test_parse_graph_errors(text, line, fragment):
    with pytest.raises(ParseError) as info:
        parse_graph(text, "g.txt")
    assert info.value.line == line
    assert fragment in str(info.value)
    assert str(info.value).startswith(f"g.txt:{line}:")


def test_parse_updates_all_kinds():
    batch = parse_updates("add 3 1 -1\n\ndel 1 2\nrew 2 3 0\n", path_spec(), "distance")
    assert batch.ops == (Insert(3, 1, -1), Delete(1, 2), Reweight(2, 3, 0))
    batch = parse_updates("delnode 2\n", path_spec(), "reach")
    assert batch.ops == (DeleteNode(2),)
    assert len(parse_updates("", path_spec(), "distance")) == 0


@pytest.mark.parametrize(
    "text,mode,line,fragment",
    [
        ("del 1 3\n", "distance", 1, "absent"),
        ("rew 3 1 0\n", "distance", 1, "absent"),
        ("add 1 2 0\n", "distance", 1, "existing"),
        ("delnode 2\n", "distance", 1, "reach mode"),
        ("add 3 1 5\n", "distance", 1, "exceeds"),
        ("del 1 2\nrew 1 2 0\n", "distance", 2, ""),
        ("delnode 2\ndelnode 2\n", "reach", 2, ""),
        ("drop 1 2\n", "distance", 1, "unknown"),
        ("del 1 2 0\n", "distance", 1, "arguments"),
        ("add 3 3 0\n", "distance", 1, "self-loop"),
        ("add 3 1 x\n", "distance", 1, "integer"),
    ],
)
def test_parse_updates_errors(text, mode, line, fragment):
    with pytest.raises(ParseError) as info:
        parse_updates(text, path_spec(), mode, "u.txt")
    assert info.value.line == line
    assert fragment in str(info.value)


def test_parse_queries():
    assert parse_queries("1 3\n\n2 2\n", 3) == [(1, 3), (2, 2)]
    for bad, fragment in (("1 4\n", "outside"), ("1\n", "query line"), ("1 -2\n", "integer")):
        with pytest.raises(ParseError) as info:
            parse_queries(bad, 3, "q.txt")
        assert fragment in str(info.value) and info.value.line == 1


def test_read_missing_file(tmp_path):
    with pytest.raises(ParseError) as info:
        read_graph(tmp_path / "missing.graph")
    assert "cannot read" in str(info.value)
