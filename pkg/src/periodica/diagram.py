"""Combinatorial model of decorated diagrams in the unit square with identified edges.

A diagram lives in the square [0,1]^2 whose opposite edges are identified (a
2-torus).  It is stored as a decorated combinatorial map:

* nodes with a counterclockwise cyclic port order (the rotation system):
  - crossings (``X``): 4 ports, strands run through opposite ports, one
    opposite pair carries the over-strand;
  - graph vertices (``V``): any arity, optionally labelled;
  - markers (``M``): 2 ports recording a strand passing through the pair of
    square faces perpendicular to the projection axis; port 0 is the dot
    (front, depth 1) and port 1 the circle (back, depth 0);
* punctures on the four boundary edges ``L R B T``, slot-paired across
  opposite edges (``L[k]`` continues at ``R[k]``, ``B[k]`` at ``T[k]``);
* arcs, a perfect matching on node ports and punctures;
* a count of crossing-free closed loops that carry no decoration at all
  (those have no endpoints and cannot be expressed as arcs).

Everything downstream (validation, strand homology, canonical codes, the
rewrite engine) is derived from this structure.  Diagrams are treated as
immutable once built; all operations return new objects.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

# Endpoints are plain tuples so they stay cheap and hashable:
#   ('n', node_id, port_index)   an arc end on a node port
#   ('p', edge, slot)            an arc end on a boundary puncture
# with edge one of 'L', 'R', 'B', 'T'.
End = tuple

EDGES = ("L", "R", "B", "T")
PARTNER_EDGE = {"L": "R", "R": "L", "B": "T", "T": "B"}

# Homology increments when a strand *arrives* at a puncture or marker port:
# left-to-right, bottom-to-top and front-to-back passages count +1.
_PUNCTURE_STEP = {"R": (1, 0, 0), "L": (-1, 0, 0), "T": (0, 1, 0), "B": (0, -1, 0)}


@dataclass(frozen=True)
class Node:
    """One decorated node of the map.

    kind is 'X' (crossing), 'V' (graph vertex) or 'M' (marker).  For
    crossings ``over`` selects the over-strand pair: 0 means ports {0,2},
    1 means ports {1,3}.  Ports are numbered in counterclockwise rotation
    order; only the cyclic order is meaningful.
    """

    kind: str
    arity: int
    over: int = 0
    label: Optional[str] = None

    def __post_init__(self):
        if self.kind == "X" and self.arity != 4:
            raise ValueError("crossing arity must be 4")
        if self.kind == "M" and self.arity != 2:
            raise ValueError("marker arity must be 2")
        if self.kind == "V" and self.arity < 1:
            raise ValueError("vertex arity must be >= 1")
        if self.kind not in ("X", "V", "M"):
            raise ValueError(f"unknown node kind {self.kind!r}")


def crossing(over: int = 0) -> Node:
    return Node("X", 4, over=over)


def vertex(arity: int, label: Optional[str] = None) -> Node:
    return Node("V", arity, label=label)


def marker() -> Node:
    return Node("M", 2)


def is_over(node: Node, port: int) -> bool:
    """True if the strand through ``port`` is the over strand of a crossing."""
    return port % 2 == node.over


class SquareDiagram:
    """Immutable decorated map of the square with identified edges."""

    def __init__(
        self,
        nodes: dict[str, Node] | None = None,
        arcs: Iterable[tuple[End, End]] = (),
        n_lr: int = 0,
        n_bt: int = 0,
        free_loops: int = 0,
        axis: Optional[int] = None,
    ):
        self.nodes: dict[str, Node] = dict(nodes or {})
        self.n_lr = int(n_lr)
        self.n_bt = int(n_bt)
        self.free_loops = int(free_loops)
        self.axis = axis
        raw: list[tuple[End, End]] = []
        pairs: dict[End, End] = {}
        for a, b in arcs:
            a = tuple(a)
            b = tuple(b)
            if a == b:
                raise ValueError(f"arc with identical endpoints {a}")
            raw.append(tuple(sorted((a, b))))
            pairs[a] = b
            pairs[b] = a
        self.pairs: dict[End, End] = pairs
        # Raw list keeps duplicate attachments so validation can report them.
        self._raw_arcs = sorted(raw)
        self._arc_list = sorted({tuple(sorted((a, b))) for a, b in pairs.items()})
        self._cache: dict = {}

    # -- basic accessors -------------------------------------------------

    def arcs(self) -> list[tuple[End, End]]:
        return list(self._arc_list)

    def crossings(self) -> list[str]:
        return sorted(n for n, nd in self.nodes.items() if nd.kind == "X")

    def graph_vertices(self) -> list[str]:
        return sorted(n for n, nd in self.nodes.items() if nd.kind == "V")

    def markers(self) -> list[str]:
        return sorted(n for n, nd in self.nodes.items() if nd.kind == "M")

    @property
    def crossing_count(self) -> int:
        return sum(1 for nd in self.nodes.values() if nd.kind == "X")

    @property
    def marker_count(self) -> int:
        return sum(1 for nd in self.nodes.values() if nd.kind == "M")

    @property
    def decoration_count(self) -> int:
        return self.marker_count + self.n_lr + self.n_bt

    def endpoints(self) -> Iterator[End]:
        for name, nd in sorted(self.nodes.items()):
            for p in range(nd.arity):
                yield ("n", name, p)
        for slot in range(self.n_lr):
            yield ("p", "L", slot)
            yield ("p", "R", slot)
        for slot in range(self.n_bt):
            yield ("p", "B", slot)
            yield ("p", "T", slot)

    def __eq__(self, other):
        return (
            isinstance(other, SquareDiagram)
            and self.nodes == other.nodes
            and self.pairs == other.pairs
            and self.n_lr == other.n_lr
            and self.n_bt == other.n_bt
            and self.free_loops == other.free_loops
        )

    def __repr__(self):
        return (
            f"SquareDiagram(crossings={self.crossing_count}, "
            f"markers={self.marker_count}, lr={self.n_lr}, bt={self.n_bt}, "
            f"vertices={len(self.graph_vertices())}, loops={self.free_loops})"
        )

    # -- boundary structure ----------------------------------------------

    def boundary_sequence(self) -> list[tuple]:
        """Boundary features in counterclockwise order, corners included.

        Corners are ('c', 0..3) at BL, BR, TR, TL.  Punctures appear as their
        endpoint tuples.  Walking this sequence keeps the interior on the
        left.
        """
        seq: list[tuple] = [("c", 0)]
        seq += [("p", "B", s) for s in range(self.n_bt)]
        seq.append(("c", 1))
        seq += [("p", "R", s) for s in range(self.n_lr)]
        seq.append(("c", 2))
        seq += [("p", "T", s) for s in range(self.n_bt - 1, -1, -1)]
        seq.append(("c", 3))
        seq += [("p", "L", s) for s in range(self.n_lr - 1, -1, -1)]
        return seq


def puncture_partner(e: End) -> End:
    _, edge, slot = e
    return ("p", PARTNER_EDGE[edge], slot)


# ---------------------------------------------------------------------------
# Dart / face machinery (the square is treated as a disk whose boundary circle
# is part of the map; faces are the orbits of the usual next-dart permutation).
# ---------------------------------------------------------------------------


class MapView:
    """Dart-level view of a diagram used for face traversal and Euler checks.

    Darts on arcs are ``('a', tail, head)``; darts on the boundary circle are
    ``('b', i, +1|-1)`` where ``i`` indexes the boundary sequence and +1 walks
    counterclockwise.
    """

    def __init__(self, d: SquareDiagram):
        self.d = d
        self.bseq = d.boundary_sequence()
        self.bindex = {f: i for i, f in enumerate(self.bseq)}
        self.nb = len(self.bseq)
        self._rot: dict[tuple, list] = {}
        for name, nd in d.nodes.items():
            self._rot[("n", name)] = [
                self._arc_dart_from(("n", name, p)) for p in range(nd.arity)
            ]
        for i, f in enumerate(self.bseq):
            fwd = ("b", i, 1)
            bwd = ("b", (i - 1) % self.nb, -1)
            if f[0] == "c":
                self._rot[f] = [fwd, bwd]
            else:
                self._rot[f] = [fwd, self._arc_dart_from(f), bwd]

    def _arc_dart_from(self, e: End):
        peer = self.d.pairs.get(e)
        if peer is None:
            raise KeyError(f"dangling endpoint {e}")
        return ("a", e, peer)

    # vertex owning an endpoint / boundary feature
    def _vertex_of_end(self, e: End):
        return ("n", e[1]) if e[0] == "n" else e

    def head_vertex(self, dart):
        if dart[0] == "a":
            return self._vertex_of_end(dart[2])
        _, i, s = dart
        return self.bseq[(i + 1) % self.nb] if s == 1 else self.bseq[i]

    def rev(self, dart):
        if dart[0] == "a":
            return ("a", dart[2], dart[1])
        return ("b", dart[1], -dart[2])

    def next_in_face(self, dart):
        """Dart following ``dart`` on the face to its left."""
        v = self.head_vertex(dart)
        rot = self._rot[v if v[0] != "n" else v]
        r = self.rev(dart)
        i = rot.index(r)
        return rot[(i - 1) % len(rot)]

    def all_darts(self):
        for rot in self._rot.values():
            yield from rot

    def faces(self) -> list[tuple]:
        seen = set()
        out = []
        for dart in self.all_darts():
            if dart in seen:
                continue
            cyc = []
            cur = dart
            while cur not in seen:
                seen.add(cur)
                cyc.append(cur)
                cur = self.next_in_face(cur)
            out.append(tuple(cyc))
        return out

    def components(self) -> list[dict]:
        """Connected components with their vertex/edge/face counts."""
        adj: dict[tuple, set] = {}

        def link(u, v):
            adj.setdefault(u, set()).add(v)
            adj.setdefault(v, set()).add(u)

        for v in self._rot:
            adj.setdefault(v, set())
        for a, b in self.d._arc_list:
            link(self._vertex_of_end(a), self._vertex_of_end(b))
        for i in range(self.nb):
            link(self.bseq[i], self.bseq[(i + 1) % self.nb])

        comp_of: dict[tuple, int] = {}
        comps: list[set] = []
        for v in sorted(adj):
            if v in comp_of:
                continue
            comp = set()
            stack = [v]
            while stack:
                u = stack.pop()
                if u in comp:
                    continue
                comp.add(u)
                comp_of[u] = len(comps)
                stack.extend(adj[u])
            comps.append(comp)

        infos = [
            {"vertices": len(c), "edges": 0, "faces": 0, "members": c}
            for c in comps
        ]
        for a, b in self.d._arc_list:
            infos[comp_of[self._vertex_of_end(a)]]["edges"] += 1
        if self.nb:
            infos[comp_of[self.bseq[0]]]["edges"] += self.nb
        for f in self.faces():
            d0 = f[0]
            v = (
                self._vertex_of_end(d0[1])
                if d0[0] == "a"
                else (self.bseq[d0[1]] if d0[2] == 1 else self.bseq[(d0[1] + 1) % self.nb])
            )
            infos[comp_of[v]]["faces"] += 1
        return infos


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

RULE_IDS = (
    "rule1_2",  # crossings are 4-valent with an opposite over pair
    "rule3",    # no face intersection projected onto a double point
    "rule4_7",  # boundary punctures slot-paired across opposite edges
    "rule5",    # no double point on the square's edges
    "rule6",    # no curve point on the corners
    "rule8_9",  # no vertex on a double point or on the boundary
    "euler",    # the map embeds in the square: Euler relation per component
)


@dataclass
class ValidationReport:
    ok: bool
    hard_errors: list[str] = field(default_factory=list)
    violations: list[tuple[str, str]] = field(default_factory=list)
    checked: dict[str, str] = field(default_factory=dict)

    def violated_rules(self) -> set[str]:
        return {r for r, _ in self.violations}


def validate_diagram(d: SquareDiagram) -> ValidationReport:
    """Check structural soundness and the regular-projection rule analogues.

    Structural corruption (dangling ports, duplicate attachments) is reported
    as hard errors; everything expressible in the data model but forbidden by
    the projection rules is reported as a rule violation.  Several rules are
    unrepresentable in this combinatorial model (a marker fused with a
    crossing, a vertex sitting on the boundary); those are reported as
    structurally enforced.
    """
    rep = ValidationReport(ok=True)
    hard = rep.hard_errors
    viol = rep.violations

    counts: dict[End, int] = {}
    for a, b in d._raw_arcs:
        counts[a] = counts.get(a, 0) + 1
        counts[b] = counts.get(b, 0) + 1
    for e, peer in d.pairs.items():
        if d.pairs.get(peer) != e:
            hard.append(f"asymmetric arc pairing at {e}")

    for e in counts:
        if e[0] == "n":
            _, name, port = e
            nd = d.nodes.get(name)
            if nd is None:
                hard.append(f"arc references unknown node {name}")
            elif not (0 <= port < nd.arity):
                hard.append(f"port index {port} out of range on node {name}")
        else:
            _, edge, slot = e
            if edge not in EDGES:
                hard.append(f"unknown boundary edge {edge}")
            else:
                n = d.n_lr if edge in ("L", "R") else d.n_bt
                if not (0 <= slot < n):
                    viol.append(
                        ("rule4_7", f"puncture {edge}[{slot}] outside declared slots")
                    )

    for e in d.endpoints():
        c = counts.get(e, 0)
        if c == 0:
            hard.append(f"dangling endpoint {e}")
        elif c > 1:
            if e[0] == "p":
                viol.append(("rule5", f"{c} arc ends share puncture {e[1]}[{e[2]}]"))
            else:
                hard.append(f"{c} arc ends share port {e}")

    for name, nd in sorted(d.nodes.items()):
        if nd.kind == "X" and nd.over not in (0, 1):
            viol.append(("rule1_2", f"crossing {name} has no opposite over pair"))

    if d.free_loops < 0:
        hard.append("negative free loop count")
    if d.n_lr < 0 or d.n_bt < 0:
        hard.append("negative puncture count")

    rep.checked["rule1_2"] = "checked"
    rep.checked["rule3"] = "structurally enforced"
    rep.checked["rule4_7"] = "checked"
    rep.checked["rule5"] = "checked"
    rep.checked["rule6"] = "structurally enforced"
    rep.checked["rule8_9"] = "structurally enforced"

    if hard:
        rep.checked["euler"] = "skipped (structural errors)"
        rep.ok = False
        return rep

    try:
        mv = MapView(d)
        for info in mv.components():
            v, e_, f = info["vertices"], info["edges"], info["faces"]
            if v - e_ + f != 2:
                viol.append(
                    ("euler", f"component has V-E+F = {v - e_ + f} != 2")
                )
        rep.checked["euler"] = "checked"
    except KeyError as exc:
        hard.append(str(exc))
        rep.checked["euler"] = "skipped"

    rep.ok = not hard and not viol
    return rep


# ---------------------------------------------------------------------------
# Strands and homology classes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Strand:
    closed: bool
    arc_count: int
    homology: tuple[int, int, int]
    ends: tuple = ()  # (node, port) pairs for open strands


def _normalize_class(h: Sequence[int]) -> tuple[int, int, int]:
    for x in h:
        if x > 0:
            return tuple(h)  # type: ignore[return-value]
        if x < 0:
            return tuple(-v for v in h)  # type: ignore[return-value]
    return (0, 0, 0)


def _advance(d: SquareDiagram, arrive: End):
    """Continue a strand that arrives at ``arrive``; return (exit_end, dh).

    Returns None at a graph vertex (strands stop there).  ``dh`` is the
    homology increment of the passage.
    """
    if arrive[0] == "p":
        return puncture_partner(arrive), _PUNCTURE_STEP[arrive[1]]
    _, name, port = arrive
    nd = d.nodes[name]
    if nd.kind == "X":
        return ("n", name, (port + 2) % 4), (0, 0, 0)
    if nd.kind == "M":
        step = (0, 0, 1) if port == 0 else (0, 0, -1)
        return ("n", name, 1 - port), step
    return None


def strands(d: SquareDiagram) -> list[Strand]:
    """Follow all strands, reporting homology classes up to overall sign.

    Strands run through crossings (opposite port), markers (dot to circle)
    and puncture identifications, and terminate at graph vertices.  The class
    counts net left-to-right, bottom-to-top and front-to-back passages.
    """
    visited: set[tuple[End, End]] = set()  # directed arcs already walked
    out: list[Strand] = []

    def walk(start: End):
        """Walk from an arc end; returns (final_arrival, arcs, homology)."""
        h = [0, 0, 0]
        arcs = 0
        cur = start
        while True:
            nxt = d.pairs[cur]
            visited.add((cur, nxt))
            visited.add((nxt, cur))
            arcs += 1
            step = _advance(d, nxt)
            if step is None:
                return nxt, arcs, tuple(h)
            cur, dh = step
            h[0] += dh[0]
            h[1] += dh[1]
            h[2] += dh[2]
            if cur == start:
                return None, arcs, tuple(h)

    # open strands: start from every vertex port
    for name in d.graph_vertices():
        nd = d.nodes[name]
        for p in range(nd.arity):
            e = ("n", name, p)
            if (e, d.pairs[e]) in visited:
                continue
            end, arcs, h = walk(e)
            assert end is not None
            out.append(
                Strand(
                    closed=False,
                    arc_count=arcs,
                    homology=_normalize_class(h),
                    ends=tuple(sorted([(name, p), (end[1], end[2])])),
                )
            )

    # closed strands: whatever remains
    for e in sorted(d.pairs):
        if (e, d.pairs[e]) in visited:
            continue
        # step back through the structure feeding this arc end so the walk
        # starts on a strand-consistent dart
        end, arcs, h = walk(e)
        if end is not None:
            # arrived at a vertex without having started at one: can only
            # happen on invalid diagrams; report as open strand anyway
            out.append(Strand(False, arcs, _normalize_class(h), ()))
        else:
            out.append(Strand(True, arcs, _normalize_class(h)))

    out.extend(Strand(True, 0, (0, 0, 0)) for _ in range(d.free_loops))
    out.sort(key=lambda s: (s.closed, s.arc_count, s.homology, s.ends))
    return out


def strand_census(d: SquareDiagram) -> tuple[int, tuple]:
    """(strand count, sorted multiset of closed-strand homology classes)."""
    ss = strands(d)
    closed = tuple(sorted(s.homology for s in ss if s.closed))
    return len(ss), closed


# ---------------------------------------------------------------------------
# Canonical codes
# ---------------------------------------------------------------------------


def _component_split(d: SquareDiagram) -> tuple[set, list[set]]:
    """Nodes reachable from the boundary, plus floating components."""
    adj: dict[str, set[str]] = {n: set() for n in d.nodes}
    boundary_nodes: set[str] = set()
    for a, b in d._arc_list:
        if a[0] == "n" and b[0] == "n":
            adj[a[1]].add(b[1])
            adj[b[1]].add(a[1])
        elif a[0] == "n":
            boundary_nodes.add(a[1])
        elif b[0] == "n":
            boundary_nodes.add(b[1])

    anchored: set[str] = set()
    stack = sorted(boundary_nodes)
    while stack:
        u = stack.pop()
        if u in anchored:
            continue
        anchored.add(u)
        stack.extend(adj[u] - anchored)

    floating: list[set] = []
    left = set(d.nodes) - anchored
    for seed in sorted(left):
        if any(seed in c for c in floating):
            continue
        comp = set()
        stack = [seed]
        while stack:
            u = stack.pop()
            if u in comp:
                continue
            comp.add(u)
            stack.extend(adj[u] - comp)
        floating.append(comp)
        left -= comp
    return anchored, floating


def _traverse_code(
    d: SquareDiagram,
    seeds: list[End],
    shadow: bool,
    seed_is_node: bool = False,
) -> str:
    """Emit a relabelling-invariant code by breadth-first map traversal.

    ``seeds`` are arc ends to start from, in a fixed order that is part of
    the code's meaning.  Node identities are replaced by discovery indices
    and port indices by offsets relative to the discovery port, which is
    exactly the freedom an isomorphism of decorated rotation systems has.
    With ``seed_is_node`` the seed endpoint itself is tokenised (used for
    floating components, where there is no boundary anchor to arrive from)
    and all of its ports are expanded, entry port included.
    """
    ids: dict[str, int] = {}
    entry: dict[str, int] = {}
    queue: list[str] = []
    full_expand: set[str] = set()
    tokens: list[str] = []

    def end_token(e: End) -> str:
        if e[0] == "p":
            return f"P{e[1]}{e[2]}"
        _, name, port = e
        if name not in ids:
            ids[name] = len(ids)
            entry[name] = port
            queue.append(name)
            nd = d.nodes[name]
            if nd.kind == "X":
                bit = "?" if shadow else ("o" if is_over(nd, port) else "u")
                return f"+X{bit}"
            if nd.kind == "M":
                return "+M" + ("d" if port == 0 else "c")
            lab = nd.label or ""
            return f"+V{nd.arity}:{lab};"
        off = (port - entry[name]) % d.nodes[name].arity
        return f"={ids[name]}.{off}"

    for seed in seeds:
        if seed_is_node:
            full_expand.add(seed[1])
            tokens.append(end_token(seed))
        else:
            peer = d.pairs.get(seed)
            if peer is None:
                tokens.append("!")
                continue
            tokens.append(end_token(peer))
        while queue:
            name = queue.pop(0)
            nd = d.nodes[name]
            e0 = entry[name]
            first = 0 if name in full_expand else 1
            for k in range(first, nd.arity):
                tokens.append(end_token(d.pairs[("n", name, (e0 + k) % nd.arity)]))
            tokens.append("/")
    return "".join(tokens)


def canonical_code(
    d: SquareDiagram,
    shadow: bool = False,
    quotient_translations: bool = False,
) -> bytes:
    """Canonical byte code of a diagram up to node/arc relabelling.

    Two diagrams get equal codes exactly when they are isomorphic as
    decorated embedded maps with the boundary pointwise fixed.  With
    ``shadow=True`` the over/under assignment is erased first.  With
    ``quotient_translations=True`` the code is additionally minimised over
    the cyclic relabellings of the puncture slots on each edge pair, a
    combinatorial stand-in for sliding the square's seams.
    """
    if quotient_translations:
        return min(
            canonical_code(_rotate_slots(d, i, j), shadow=shadow)
            for i in range(max(1, d.n_lr))
            for j in range(max(1, d.n_bt))
        )

    head = f"pdg:{d.n_lr},{d.n_bt},{d.free_loops};"
    _, floating = _component_split(d)

    seeds: list[End] = []
    seeds += [("p", "L", s) for s in range(d.n_lr)]
    seeds += [("p", "R", s) for s in range(d.n_lr)]
    seeds += [("p", "B", s) for s in range(d.n_bt)]
    seeds += [("p", "T", s) for s in range(d.n_bt)]
    body = _traverse_code(d, seeds, shadow)

    comp_codes = []
    for comp in floating:
        best = None
        for name in sorted(comp):
            nd = d.nodes[name]
            for p in range(nd.arity):
                code = _traverse_code(d, [("n", name, p)], shadow, seed_is_node=True)
                if best is None or code < best:
                    best = code
        comp_codes.append(best or "")
    comp_codes.sort()

    return (head + body + "|" + "|".join(comp_codes)).encode()


def _rotate_slots(d: SquareDiagram, r_lr: int, r_bt: int) -> SquareDiagram:
    def mv(e: End) -> End:
        if e[0] != "p":
            return e
        _, edge, slot = e
        if edge in ("L", "R") and d.n_lr:
            return ("p", edge, (slot + r_lr) % d.n_lr)
        if edge in ("B", "T") and d.n_bt:
            return ("p", edge, (slot + r_bt) % d.n_bt)
        return e

    return SquareDiagram(
        d.nodes,
        [(mv(a), mv(b)) for a, b in d._arc_list],
        d.n_lr,
        d.n_bt,
        d.free_loops,
        d.axis,
    )


# ---------------------------------------------------------------------------
# Crossing triplets and tridiagrams
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CrossingTriplet:
    a: int
    b: int
    c: int

    @property
    def c_value(self) -> int:
        return self.a * self.a + self.b * self.b + self.c * self.c

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.a, self.b, self.c)


@dataclass(frozen=True)
class Tridiagram:
    """Three axis-labelled square diagrams from one unit cell.

    ``diagrams[i]`` is the projection along axis i+1.  The convention for
    diagram axes is cyclic: the projection along axis k uses axis k+1
    horizontally (punctures on L/R) and axis k+2 vertically (punctures on
    B/T), indices mod 3.
    """

    diagrams: tuple[SquareDiagram, SquareDiagram, SquareDiagram]
    provenance: Optional[str] = None

    def __post_init__(self):
        if len(self.diagrams) != 3:
            raise ValueError("a tridiagram holds exactly three diagrams")


def triplet_of_crossings(t: Tridiagram) -> CrossingTriplet:
    a, b, c = (d.crossing_count for d in t.diagrams)
    return CrossingTriplet(a, b, c)


@dataclass
class ConsistencyReport:
    consistent: bool
    counters: list[tuple[int, int, int, int]]
    # one row per axis k: (k, markers in D_k, bt pairs in D_{k+1}, lr pairs in D_{k+2})


def check_tridiagram(t: Tridiagram) -> ConsistencyReport:
    """Verify the marker/puncture cross-consistency counters.

    A strand passing through the axis-k face pair shows up once as a marker
    in the axis-k diagram, once as a B/T puncture pair in the axis-(k+1)
    diagram and once as an L/R pair in the axis-(k+2) diagram.
    """
    rows = []
    ok = True
    for k in range(3):
        m = t.diagrams[k].marker_count
        bt = t.diagrams[(k + 1) % 3].n_bt
        lr = t.diagrams[(k + 2) % 3].n_lr
        rows.append((k + 1, m, bt, lr))
        ok = ok and m == bt == lr
    return ConsistencyReport(consistent=ok, counters=rows)


def permute_axes(t: Tridiagram, perm: Sequence[int]) -> Tridiagram:
    """Relabel the axes of a tridiagram by ``perm`` (a permutation of 1..3).

    This is the explicit, logged counterpart of the axis mixing that the
    tridiagram equivalence permits; cross-consistency only survives cyclic
    permutations, so others are rejected.
    """
    if sorted(perm) != [1, 2, 3]:
        raise ValueError("perm must be a permutation of (1, 2, 3)")
    if tuple(perm) not in ((1, 2, 3), (2, 3, 1), (3, 1, 2)):
        raise ValueError("only cyclic axis permutations preserve consistency")
    ds = tuple(t.diagrams[p - 1] for p in perm)
    return Tridiagram(ds, provenance=t.provenance)


def fresh_node_id(nodes: dict[str, Node], prefix: str) -> str:
    i = len(nodes)
    while f"{prefix}{i}" in nodes:
        i += 1
    return f"{prefix}{i}"
