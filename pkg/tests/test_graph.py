"""Graph sampling determinism and the text round trip."""

import io

import pytest

from dilutecw.errors import CapacityError, GraphFormatError
from dilutecw.graph import GraphSeed, read_graph, sample_graph, write_graph
from dilutecw.model import DisorderGraph, ModelParams


def test_seed_validation():
    GraphSeed(0)
    GraphSeed((1 << 64) - 1)
    with pytest.raises(ValueError):
        GraphSeed(-1)
    with pytest.raises(ValueError):
        GraphSeed(1 << 64)
    with pytest.raises(ValueError):
        GraphSeed(1.5)


def test_sampling_is_deterministic():
    params = ModelParams(n=33, p=0.4, beta=1.0)
    a = sample_graph(params, GraphSeed(12345))
    b = sample_graph(params, GraphSeed(12345))
    assert a == b


def test_different_seeds_differ():
    params = ModelParams(n=33, p=0.4, beta=1.0)
    a = sample_graph(params, GraphSeed(1))
    b = sample_graph(params, GraphSeed(2))
    assert a != b


def test_p_one_gives_complete_graph():
    params = ModelParams(n=17, p=1.0, beta=1.0)
    g = sample_graph(params, GraphSeed(99))
    assert g == DisorderGraph.complete(17)


def test_edge_frequency_near_p():
    # 400 independent graphs at n=10: the pooled edge frequency estimator has
    # standard error sqrt(p(1-p)/40000) ~ 0.0023, so +-0.01 is > 4 sigma.
    params = ModelParams(n=10, p=0.3, beta=1.0)
    edges = sum(sample_graph(params, GraphSeed(s)).edge_count() for s in range(400))
    freq = edges / (400 * 100)
    assert abs(freq - 0.3) < 0.01


def test_single_edge_frequency_across_seeds():
    # one fixed matrix entry over many seeds, to catch counter-mixing bugs
    # that a pooled count would hide
    params = ModelParams(n=5, p=0.5, beta=1.0)
    hits = sum(sample_graph(params, GraphSeed(s)).has_edge(2, 3) for s in range(1000))
    assert 400 < hits < 600


def test_capacity_cap():
    params = ModelParams(n=200, p=0.5, beta=1.0)
    with pytest.raises(CapacityError, match="cap"):
        sample_graph(params, GraphSeed(0), bit_limit=10_000)


def test_roundtrip_through_text(tmp_path):
    params = ModelParams(n=23, p=0.35, beta=1.0)
    g = sample_graph(params, GraphSeed(7))
    path = tmp_path / "g.txt"
    write_graph(g, path)
    assert read_graph(path) == g


def test_roundtrip_through_buffer():
    g = DisorderGraph.from_matrix([[0, 1], [1, 1]])
    buf = io.StringIO()
    write_graph(g, buf)
    text = buf.getvalue()
    assert text == "dilute-cw-graph v1 N=2\n01\n11\n"
    assert read_graph(io.StringIO(text)) == g


def test_text_format_orientation():
    # row i holds the out-edges of site i; character j is edge (i, j)
    g = DisorderGraph.from_matrix([[0, 1, 0], [0, 0, 0], [1, 0, 0]])
    buf = io.StringIO()
    write_graph(g, buf)
    lines = buf.getvalue().splitlines()
    assert lines[1] == "010"
    assert lines[3] == "100"


@pytest.mark.parametrize(
    "text,lineno",
    [
        ("", 1),
        ("not a header\n01\n11\n", 1),
        ("dilute-cw-graph v1 N=x\n", 1),
        ("dilute-cw-graph v1 N=0\n", 1),
        ("dilute-cw-graph v1 N=2\n01\n", 3),
        ("dilute-cw-graph v1 N=2\n011\n11\n", 2),
        ("dilute-cw-graph v1 N=2\n01\n1x\n", 3),
        ("dilute-cw-graph v1 N=2\n01\n11\n10\n", 4),
    ],
)
def test_parse_errors_carry_line_numbers(text, lineno):
    with pytest.raises(GraphFormatError) as err:
        read_graph(io.StringIO(text))
    assert err.value.line == lineno


def test_read_capacity_cap():
    with pytest.raises(CapacityError):
        read_graph(io.StringIO("dilute-cw-graph v1 N=100000\n"), bit_limit=1 << 20)
