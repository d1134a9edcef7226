import pytest

from periodica.diagram import (
    SquareDiagram,
    Tridiagram,
    canonical_code,
    validate_diagram,
)
from periodica.pdgio import PdgSyntaxError, parse, parse_diagram, serialize

from conftest import (
    curl,
    empty_diagram,
    hopf,
    marker_loop,
    theta_vertex_pair,
    two_threads,
    wrapped_marked_strand,
)

FIXTURES = [
    empty_diagram,
    marker_loop,
    two_threads,
    curl,
    hopf,
    theta_vertex_pair,
    wrapped_marked_strand,
]


def test_empty_serializes_to_header_only():
    assert serialize(empty_diagram()) == "pdg 1\n"
    assert parse_diagram("pdg 1\n") == empty_diagram()


@pytest.mark.parametrize("make", FIXTURES)
def test_round_trip_preserves_code(make):
    d = make()
    text = serialize(d)
    d2 = parse_diagram(text)
    assert validate_diagram(d2).ok
    assert canonical_code(d2) == canonical_code(d)


@pytest.mark.parametrize("make", FIXTURES)
def test_serialize_is_idempotent_after_parse(make):
    text = serialize(make())
    assert serialize(parse_diagram(text)) == text


def test_comments_and_blank_lines_ignored():
    text = "pdg 1\n# hello\n\nM m0 m0.0 m0.1  # marker\nA m0.0 m0.1\n"
    d = parse_diagram(text)
    assert d.marker_count == 1


def test_tridiagram_round_trip():
    t = Tridiagram((curl(), marker_loop(), two_threads()))
    text = serialize(t)
    t2 = parse(text)
    assert isinstance(t2, Tridiagram)
    for a, b in zip(t.diagrams, t2.diagrams):
        assert canonical_code(a) == canonical_code(b)
    assert t2.diagrams[1].axis == 2
    assert serialize(parse(text)) == text


def test_free_loops_round_trip():
    d = SquareDiagram(free_loops=3)
    assert parse_diagram(serialize(d)).free_loops == 3


def test_puncture_to_puncture_arcs():
    text = serialize(two_threads())
    assert "P L 0 R.0" in text
    assert "P R 0 L.0" in text
    d = parse_diagram(text)
    assert len(d.arcs()) == 2


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("", "empty"),
        ("pdg 2\n", "header"),
        ("pdg 1\nX c0 a b c over=02\n", "X expects"),
        ("pdg 1\nX c0 a b c d over=03\n", "over pair"),
        ("pdg 1\nM m0 a b\nM m0 c d\n", "declared twice"),
        ("pdg 1\nM m0 a a\n", "declared twice"),
        ("pdg 1\nA a b\n", "unknown port"),
        ("pdg 1\nP Q 0 a\n", "edge must be"),
        ("pdg 1\nV L a\n", "reserved"),
        ("pdg 1\nZ what\n", "unknown directive"),
        ("pdg 1\nM m0 a b\n--- diagram 1\n", "before first"),
        ("pdg 1\n--- diagram 1\n--- diagram 1\n--- diagram 2\n", "axes 1, 2, 3"),
    ],
)
def test_syntax_errors_carry_positions(text, fragment):
    with pytest.raises(PdgSyntaxError) as exc:
        parse(text)
    assert fragment in str(exc.value)
    assert "line" in str(exc.value)


def test_mismatched_puncture_counts_deferred_to_validate():
    # a doubly-attached left puncture with no right partner parses fine;
    # validation reports both problems
    text = "pdg 1\nM m0 a b\nP L 0 a\nA b L.0\n"
    d = parse_diagram(text)
    rep = validate_diagram(d)
    assert not rep.ok
    assert "rule5" in rep.violated_rules()
    assert any("dangling" in e and "'R'" in e for e in rep.hard_errors)
