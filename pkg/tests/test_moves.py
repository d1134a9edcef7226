import random

import pytest

from periodica.diagram import (
    SquareDiagram,
    canonical_code,
    crossing,
    marker,
    strand_census,
    validate_diagram,
    vertex,
)
from periodica.moves import (
    CROSSING_DELTAS,
    MoveApplication,
    MoveError,
    apply_move,
    crossing_change,
    enumerate_moves,
)

from conftest import curl, hopf, marker_loop, theta_vertex_pair, two_threads, wrapped_marked_strand


def seeds():
    return [
        ("curl", curl()),
        ("hopf", hopf(True)),
        ("hopf_unlinked", hopf(False)),
        ("marker_loop", marker_loop()),
        ("two_threads", two_threads()),
        ("theta", theta_vertex_pair()),
        ("wrapped", wrapped_marked_strand()),
    ]


def grow(d, rng, steps, max_nodes=10):
    """Random walk through the move graph, validating each state."""
    for _ in range(steps):
        ms = enumerate_moves(d)
        if len(d.nodes) >= max_nodes:
            ms = [m for m in ms if m.direction != "b"]
        if not ms:
            break
        m = rng.choice(ms)
        d2 = apply_move(d, m)
        rep = validate_diagram(d2)
        assert rep.ok, (m, rep.hard_errors, rep.violations)
        d = d2
        if rng.random() < 0.2 and d.crossings():
            d = crossing_change(d, rng.choice(d.crossings()))
    return d


# ---------------------------------------------------------------------------
# targeted fixtures per move kind
# ---------------------------------------------------------------------------


def test_r1_forward_on_curl_yields_free_loop():
    d = curl()
    ms = [m for m in enumerate_moves(d, kinds=["R1"]) if m.direction == "f"]
    assert len(ms) == 2  # the figure-eight has two monogon loops
    d2 = apply_move(d, ms[0])
    assert d2.crossing_count == 0
    assert d2.free_loops == 1
    # and back
    back = [m for m in enumerate_moves(d2, kinds=["R1"]) if m.direction == "b"]
    assert any(
        canonical_code(apply_move(d2, m)) == canonical_code(d) for m in back
    )


def test_r1_backward_then_forward_roundtrip():
    d = two_threads()
    ms = [m for m in enumerate_moves(d, kinds=["R1"]) if m.direction == "b"]
    assert len(ms) == 8  # 2 arcs x side x over
    for m in ms:
        d2 = apply_move(d, m)
        assert d2.crossing_count == 1
        assert validate_diagram(d2).ok
        fwd = [x for x in enumerate_moves(d2, kinds=["R1"]) if x.direction == "f"]
        assert any(
            canonical_code(apply_move(d2, x)) == canonical_code(d) for x in fwd
        )


def test_r2_forward_requires_same_strand_over():
    linked = hopf(True)
    assert not [
        m for m in enumerate_moves(linked, kinds=["R2"]) if m.direction == "f"
    ]
    unlinked = hopf(False)
    ms = [m for m in enumerate_moves(unlinked, kinds=["R2"]) if m.direction == "f"]
    assert ms
    d2 = apply_move(unlinked, ms[0])
    assert d2.crossing_count == 0
    assert d2.free_loops == 2


def test_hopf_crossing_change_then_r2():
    d = hopf(True)
    d2 = crossing_change(d, "c1")
    ms = [m for m in enumerate_moves(d2, kinds=["R2"]) if m.direction == "f"]
    assert ms
    d3 = apply_move(d2, ms[0])
    assert d3.crossing_count == 0
    assert len(
        [s for s in __import__("periodica.diagram", fromlist=["strands"]).strands(d3)]
    ) == 2


def test_crossing_change_involution_and_shadow():
    d = hopf(True)
    d2 = crossing_change(d, "c2")
    assert canonical_code(d2) != canonical_code(d)
    assert canonical_code(d2, shadow=True) == canonical_code(d, shadow=True)
    d3 = crossing_change(d2, "c2")
    assert canonical_code(d3) == canonical_code(d)
    from periodica.diagram import Tridiagram, triplet_of_crossings

    t1 = triplet_of_crossings(Tridiagram((d, d, d)))
    t2 = triplet_of_crossings(Tridiagram((d2, d2, d2)))
    assert t1 == t2


def test_r5_and_r9_on_wrapped_strand():
    d = wrapped_marked_strand()
    # the marker can hop across the seam twice and return
    hops = [m for m in enumerate_moves(d, kinds=["R9"]) if m.variant == "hop"]
    assert len(hops) == 2
    d2 = apply_move(d, hops[0])
    assert validate_diagram(d2).ok
    assert d2.marker_count == 1 and d2.n_lr == 1
    back = [m for m in enumerate_moves(d2, kinds=["R9"]) if m.variant == "hop"]
    assert any(
        canonical_code(apply_move(d2, m)) == canonical_code(d) for m in back
    )


def test_r6_push_and_retract():
    d = marker_loop()
    pushes = [m for m in enumerate_moves(d, kinds=["R6"]) if m.direction == "b"]
    assert pushes
    for m in pushes[:6]:
        d2 = apply_move(d, m)
        assert validate_diagram(d2).ok, m
        assert d2.n_lr + d2.n_bt == 2
        tips = [x for x in enumerate_moves(d2, kinds=["R6"]) if x.direction == "f"]
        assert any(
            canonical_code(apply_move(d2, x)) == canonical_code(d) for x in tips
        )


def test_r7_carry_crossing_through_edge():
    # a crossing adjacent to the right edge: two strands cross then exit
    d = SquareDiagram(
        {"c0": crossing(over=0)},
        [
            (("n", "c0", 0), ("p", "R", 0)),
            (("n", "c0", 1), ("p", "R", 1)),
            (("n", "c0", 2), ("p", "L", 1)),
            (("n", "c0", 3), ("p", "L", 0)),
        ],
        n_lr=2,
    )
    assert validate_diagram(d).ok
    ms = enumerate_moves(d, kinds=["R7"])
    assert ms
    d2 = apply_move(d, ms[0])
    assert validate_diagram(d2).ok
    assert d2.crossing_count == 1
    assert d2.n_lr == 2
    assert strand_census(d2) == strand_census(d)
    back = enumerate_moves(d2, kinds=["R7"])
    assert any(
        canonical_code(apply_move(d2, x)) == canonical_code(d) for x in back
    )


def test_r8_corner_pass():
    # strand hugging the bottom-right corner
    d = SquareDiagram(
        {},
        [
            (("p", "R", 0), ("p", "B", 0)),
            (("p", "L", 0), ("p", "T", 0)),
        ],
        n_lr=1,
        n_bt=1,
    )
    assert validate_diagram(d).ok
    ms = enumerate_moves(d, kinds=["R8"])
    assert len(ms) >= 1
    for m in ms:
        d2 = apply_move(d, m)
        assert validate_diagram(d2).ok, m
        assert strand_census(d2) == strand_census(d)
        back = enumerate_moves(d2, kinds=["R8"])
        assert any(
            canonical_code(apply_move(d2, x)) == canonical_code(d) for x in back
        )


def test_r11_twist_untwist():
    d = theta_vertex_pair()
    twists = [m for m in enumerate_moves(d, kinds=["R11"]) if m.direction == "b"]
    assert twists
    for m in twists[:6]:
        d2 = apply_move(d, m)
        assert validate_diagram(d2).ok, m
        assert d2.crossing_count == 1
        unt = [x for x in enumerate_moves(d2, kinds=["R11"]) if x.direction == "f"]
        assert any(
            canonical_code(apply_move(d2, x)) == canonical_code(d) for x in unt
        )


def test_r12_vertex_through_depth_faces():
    d = theta_vertex_pair()
    ms = [m for m in enumerate_moves(d, kinds=["R12"]) if m.direction == "b"]
    assert len(ms) == 4  # 2 vertices x 2 orientations
    d2 = apply_move(d, ms[0])
    assert validate_diagram(d2).ok
    assert d2.marker_count == 3
    fwd = [x for x in enumerate_moves(d2, kinds=["R12"]) if x.direction == "f"]
    assert any(
        canonical_code(apply_move(d2, x)) == canonical_code(d) for x in fwd
    )


def test_r13_vertex_through_edge():
    d = theta_vertex_pair()
    ms = [m for m in enumerate_moves(d, kinds=["R13"]) if m.direction == "b"]
    assert ms
    applied = 0
    for m in ms[:8]:
        d2 = apply_move(d, m)
        assert validate_diagram(d2).ok, m
        assert d2.n_lr + d2.n_bt == 3
        applied += 1
        fwd = [x for x in enumerate_moves(d2, kinds=["R13"]) if x.direction == "f"]
        assert any(
            canonical_code(apply_move(d2, x)) == canonical_code(d) for x in fwd
        ), m
    assert applied


def test_r4_slide_across_marker():
    # marker with a parallel strand sharing a face: slide it across
    d = SquareDiagram(
        {"m0": marker()},
        [
            (("p", "L", 0), ("n", "m0", 0)),
            (("n", "m0", 1), ("p", "R", 0)),
            (("p", "L", 1), ("p", "R", 1)),
        ],
        n_lr=2,
    )
    assert validate_diagram(d).ok
    ms = [m for m in enumerate_moves(d, kinds=["R4"]) if m.direction == "b"]
    assert ms
    for m in ms:
        d2 = apply_move(d, m)
        assert validate_diagram(d2).ok, m
        assert d2.crossing_count == 2
        assert strand_census(d2) == strand_census(d)
        fwd = [x for x in enumerate_moves(d2, kinds=["R4"]) if x.direction == "f"]
        assert any(
            canonical_code(apply_move(d2, x)) == canonical_code(d) for x in fwd
        ), m


def test_r10_sweep_and_back():
    # a strand passing between two leaf vertices joined through the
    # bottom/top face pair
    d = SquareDiagram(
        {"v0": vertex(1), "v1": vertex(1)},
        [
            (("n", "v0", 0), ("p", "B", 0)),
            (("n", "v1", 0), ("p", "T", 0)),
            (("p", "L", 0), ("p", "R", 0)),
        ],
        n_lr=1,
        n_bt=1,
    )
    assert validate_diagram(d).ok
    sweeps = [m for m in enumerate_moves(d, kinds=["R10"]) if m.direction == "b"
              and m.variant.startswith("sweep")]
    assert sweeps
    done = 0
    for m in sweeps:
        d2 = apply_move(d, m)
        assert validate_diagram(d2).ok, m
        assert d2.crossing_count == 1
        runs = [x for x in enumerate_moves(d2, kinds=["R10"]) if x.variant == "run"]
        assert any(
            canonical_code(apply_move(d2, x)) == canonical_code(d) for x in runs
        ), m
        done += 1
    assert done


def test_r10_lasso_and_shed():
    # one degree-4 vertex carrying a vertical and a horizontal wrap, plus a
    # floating loop to lasso onto it
    d = SquareDiagram(
        {"v0": vertex(4)},
        [
            (("n", "v0", 0), ("p", "B", 0)),
            (("n", "v0", 1), ("p", "R", 0)),
            (("n", "v0", 2), ("p", "T", 0)),
            (("n", "v0", 3), ("p", "L", 0)),
        ],
        n_lr=1,
        n_bt=1,
        free_loops=1,
    )
    assert validate_diagram(d).ok
    lassos = [m for m in enumerate_moves(d, kinds=["R10"]) if "lasso" in m.variant]
    assert len(lassos) == 2
    for m in lassos:
        d2 = apply_move(d, m)
        assert validate_diagram(d2).ok
        assert d2.crossing_count == 4 and d2.free_loops == 0
        sheds = [x for x in enumerate_moves(d2, kinds=["R10"]) if x.variant == "shed"]
        assert sheds, m
        d3 = apply_move(d2, sheds[0])
        assert canonical_code(d3) == canonical_code(d)


# ---------------------------------------------------------------------------
# property harness
# ---------------------------------------------------------------------------


def _delta_ok(kind, direction, before, after):
    spec = CROSSING_DELTAS.get((kind, direction))
    delta = after.crossing_count - before.crossing_count
    if spec is None:
        return True  # R10: variable by arity and run length
    return delta in spec


INVERSE_DIRECTION = {"f": "b", "b": "f", "t": "t"}


def check_move(d, m, census, code):
    """One (diagram, move) probe: validity, delta, conservation, inverse."""
    d2 = apply_move(d, m)
    rep = validate_diagram(d2)
    assert rep.ok, (m, rep.hard_errors, rep.violations)
    assert _delta_ok(m.kind, m.direction, d, d2), (
        m,
        d.crossing_count,
        d2.crossing_count,
    )
    assert strand_census(d2) == census, m
    # reversibility: an inverse of the same kind restores the code, unless
    # arc structure degenerated into anonymous free loops
    want = INVERSE_DIRECTION[m.direction]
    found = False
    for x in enumerate_moves(d2, kinds=[m.kind]):
        if x.direction != want:
            continue
        try:
            if canonical_code(apply_move(d2, x)) == code:
                found = True
                break
        except Exception:
            raise AssertionError(f"inverse candidate {x} failed after {m}")
    if not found:
        assert d2.free_loops > d.free_loops, f"no inverse found for {m}"
    return d2


@pytest.mark.parametrize("name,seed", seeds())
def test_every_move_everywhere(name, seed):
    """Validity closure, delta table, conservation and reversibility."""
    rng = random.Random(hash(name) & 0xFFFF)
    states = [seed]
    d = seed
    for _ in range(3):
        d = grow(d, rng, 2, max_nodes=8)
        states.append(d)
    budget = 60
    for d in states:
        census = strand_census(d)
        code = canonical_code(d)
        ms = enumerate_moves(d)
        if len(ms) > budget:
            ms = rng.sample(ms, budget)
        for m in ms:
            check_move(d, m, census, code)


def test_enumeration_is_deterministic():
    for name, d in seeds():
        a = enumerate_moves(d)
        b = enumerate_moves(d)
        assert a == b


def test_apply_rejects_stale_moves():
    d = hopf(False)
    ms = [m for m in enumerate_moves(d, kinds=["R2"]) if m.direction == "f"]
    d2 = apply_move(d, ms[0])
    with pytest.raises(MoveError):
        apply_move(d2, ms[0])
