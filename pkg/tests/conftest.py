import random

import pytest

from periodica.diagram import Node, SquareDiagram, crossing, marker, vertex


def empty_diagram():
    return SquareDiagram()


def marker_loop():
    """A single thread along the projection axis: one marker, self arc."""
    return SquareDiagram({"m0": marker()}, [(("n", "m0", 0), ("n", "m0", 1))])


def two_threads():
    """Two disjoint strands crossing the square left to right."""
    return SquareDiagram(
        {},
        [(("p", "L", 0), ("p", "R", 0)), (("p", "L", 1), ("p", "R", 1))],
        n_lr=2,
    )


def curl():
    """Standalone figure-eight: one crossing whose loop bounds a monogon."""
    return SquareDiagram(
        {"c0": crossing(over=0)},
        [(("n", "c0", 0), ("n", "c0", 1)), (("n", "c0", 2), ("n", "c0", 3))],
    )


def hopf(linked=True):
    """The classic two-circle diagram drawn inside the square.

    With ``linked=True`` the crossings alternate (a Hopf link); otherwise
    one strand runs over both crossings and the circles pull apart.
    """
    nodes = {"c1": crossing(over=1), "c2": crossing(over=1 if linked else 0)}
    arcs = [
        (("n", "c1", 3), ("n", "c2", 0)),  # lens arc of circle A
        (("n", "c1", 2), ("n", "c2", 1)),  # lens arc of circle B
        (("n", "c1", 1), ("n", "c2", 2)),  # outer arc of A
        (("n", "c1", 0), ("n", "c2", 3)),  # outer arc of B
    ]
    return SquareDiagram(nodes, arcs)


def theta_vertex_pair():
    """Two degree-3 vertices joined by three parallel arcs."""
    return SquareDiagram(
        {"v0": vertex(3), "v1": vertex(3)},
        [
            (("n", "v0", 0), ("n", "v1", 2)),
            (("n", "v0", 1), ("n", "v1", 1)),
            (("n", "v0", 2), ("n", "v1", 0)),
        ],
    )


def wrapped_marked_strand():
    """One strand through both face pairs: homology (1, 0, 1)."""
    return SquareDiagram(
        {"m0": marker()},
        [(("p", "L", 0), ("n", "m0", 0)), (("n", "m0", 1), ("p", "R", 0))],
        n_lr=1,
    )


def relabel(d: SquareDiagram, rng: random.Random) -> SquareDiagram:
    """Random relabelling: rename nodes, rotate port numbering cyclically.

    Rotating a crossing's ports by an odd amount flips which pair index is
    the over pair; markers keep their port roles.
    """
    names = list(d.nodes)
    new_names = [f"r{i}" for i in range(len(names))]
    rng.shuffle(new_names)
    mapping = dict(zip(names, new_names))
    shifts = {}
    new_nodes = {}
    for old, nd in d.nodes.items():
        if nd.kind == "M":
            s = 0
        else:
            s = rng.randrange(nd.arity)
        shifts[old] = s
        if nd.kind == "X":
            new_nodes[mapping[old]] = Node("X", 4, over=(nd.over + s) % 2)
        else:
            new_nodes[mapping[old]] = nd

    def mv(e):
        if e[0] != "n":
            return e
        _, name, port = e
        nd = d.nodes[name]
        return ("n", mapping[name], (port - shifts[name]) % nd.arity)

    return SquareDiagram(
        new_nodes,
        [(mv(a), mv(b)) for a, b in d.arcs()],
        n_lr=d.n_lr,
        n_bt=d.n_bt,
        free_loops=d.free_loops,
        axis=d.axis,
    )


@pytest.fixture
def rng():
    return random.Random(20260810)
