"""Rewrite engine: the thirteen local moves and the crossing change.

Every move is a reversible local rewrite of a square diagram:

* R1  add/remove a curl (one crossing whose loop bounds a monogon),
* R2  add/remove a clasp of two strand segments sharing a face,
* R3  slide a strand across a crossing (triangle flip),
* R4  slide a strand across a marker (one over + one under crossing with
      the front and back branch),
* R5  push/retract a strand finger through the depth face pair
      (two markers appear or cancel),
* R6  push/retract a strand finger through a boundary edge
      (two adjacent puncture pairs appear or cancel),
* R7  carry a crossing through a boundary edge (slot order of its two
      punctures swaps),
* R8  carry a strand across a corner of the square,
* R9  carry a marker through a boundary edge (either riding a finger,
      or hopping across with its puncture),
* R10 slide a strand across a vertex (crossed germ run flips to the
      complementary run),
* R11 twist/untwist two rotation-adjacent germs of a vertex,
* R12 carry a vertex through the depth face pair (a marker on every germ),
* R13 carry a vertex through a boundary edge (a puncture on every germ).

Matchers work purely on arcs, rotations and decorations; the face
conditions of the figures close automatically once the local pattern is
fully specified, and genuine shared-face requirements (for the creating
directions) use the computed face structure.  Rewrites go through a small
builder whose cut/stub mechanism keeps endpoint surgery correct even when
pattern elements coincide in tiny diagrams.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Callable, Iterable, Optional

from .diagram import (
    EDGES,
    End,
    MapView,
    Node,
    SquareDiagram,
    is_over,
    puncture_partner,
)

MOVE_KINDS = tuple(f"R{i}" for i in range(1, 14))

# does the counterclockwise boundary walk ascend slot indices on this edge
_EDGE_ASCENDS = {"R": True, "B": True, "L": False, "T": False}


class MoveError(ValueError):
    """Raised when an application does not match the current diagram."""


@dataclass(frozen=True)
class MoveApplication:
    kind: str
    variant: str
    site: tuple
    direction: str  # 'f' removes structure, 'b' creates it, 't' transfers

    def sort_key(self):
        return (self.kind, self.direction, self.variant, repr(self.site))

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "variant": self.variant,
            "site": _site_to_json(self.site),
            "direction": self.direction,
        }

    @staticmethod
    def from_json(obj: dict) -> "MoveApplication":
        return MoveApplication(
            kind=obj["kind"],
            variant=obj["variant"],
            site=_site_from_json(obj["site"]),
            direction=obj["direction"],
        )


def _site_to_json(x):
    if isinstance(x, tuple):
        return {"t": [_site_to_json(v) for v in x]}
    return x


def _site_from_json(x):
    if isinstance(x, dict) and "t" in x:
        return tuple(_site_from_json(v) for v in x["t"])
    return x


# ---------------------------------------------------------------------------
# Mutable builder with stub-based surgery
# ---------------------------------------------------------------------------


class Builder:
    def __init__(self, d: SquareDiagram):
        self.nodes = dict(d.nodes)
        self.pairs = dict(d.pairs)
        self.n_lr = d.n_lr
        self.n_bt = d.n_bt
        self.free_loops = d.free_loops
        self.axis = d.axis
        self._fresh = 0
        self._stubs: list[str] = []

    # -- arcs ---------------------------------------------------------------

    def peer(self, e: End) -> Optional[End]:
        return self.pairs.get(tuple(e))

    def connect(self, a: End, b: End) -> None:
        a, b = tuple(a), tuple(b)
        if a in self.pairs or b in self.pairs:
            raise MoveError(f"endpoint already attached: {a} or {b}")
        if a == b:
            raise MoveError("arc with identical endpoints")
        self.pairs[a] = b
        self.pairs[b] = a

    def disconnect(self, e: End) -> End:
        e = tuple(e)
        far = self.pairs.pop(e, None)
        if far is None:
            raise MoveError(f"endpoint not attached: {e}")
        del self.pairs[far]
        return far

    def delete_arc(self, a: End, b: End) -> None:
        if self.peer(a) != tuple(b):
            raise MoveError(f"arc {a}--{b} not present")
        self.disconnect(a)

    def splice(self, a: End, b: End) -> None:
        """Remove a two-port passage, joining the strands on its far sides."""
        fa = self.disconnect(a)
        if fa == tuple(b):
            self.free_loops += 1
            return
        fb = self.disconnect(b)
        self.connect(fa, fb)

    def cut(self, e: End) -> End:
        """Detach ``e`` from its arc; return a handle to the far side.

        The far side stays attached to a fresh 2-valent stub; the handle is
        the stub's second port.  Stubs are smoothed away on freeze, which
        makes rewiring formulas immune to coincidences between pattern
        elements.
        """
        far = self.disconnect(e)
        s = self._new_name("~s")
        self.nodes[s] = Node("V", 2, label="stub")
        self._stubs.append(s)
        self.connect(far, ("n", s, 0))
        return ("n", s, 1)

    # -- nodes --------------------------------------------------------------

    def _new_name(self, prefix: str) -> str:
        while True:
            name = f"{prefix}{self._fresh}"
            self._fresh += 1
            if name not in self.nodes:
                return name

    def new_crossing(self, over: int) -> str:
        name = self._new_name("x")
        self.nodes[name] = Node("X", 4, over=over)
        return name

    def new_marker(self) -> str:
        name = self._new_name("m")
        self.nodes[name] = Node("M", 2)
        return name

    def remove_node(self, name: str) -> None:
        nd = self.nodes.pop(name)
        for p in range(nd.arity):
            if ("n", name, p) in self.pairs:
                raise MoveError(f"removing node {name} with attached port {p}")

    def set_over(self, name: str, over: int) -> None:
        nd = self.nodes[name]
        self.nodes[name] = Node("X", 4, over=over)

    def dissolve_crossing(self, name: str) -> None:
        self.splice(("n", name, 0), ("n", name, 2))
        self.splice(("n", name, 1), ("n", name, 3))
        self.remove_node(name)

    def dissolve_marker(self, name: str) -> None:
        self.splice(("n", name, 0), ("n", name, 1))
        self.remove_node(name)

    # -- boundary slots -----------------------------------------------------

    def _rename_slots(self, edges: tuple[str, str], shift_from: int, delta: int):
        def mv(e: End) -> End:
            if e[0] == "p" and e[1] in edges and e[2] >= shift_from:
                return ("p", e[1], e[2] + delta)
            return e

        self.pairs = {mv(a): mv(b) for a, b in self.pairs.items()}

    def insert_slots(self, pk: str, at: int, count: int) -> None:
        """Insert ``count`` fresh (unattached) slot pairs at index ``at``."""
        edges = ("L", "R") if pk == "lr" else ("B", "T")
        self._rename_slots(edges, at, count)
        if pk == "lr":
            self.n_lr += count
        else:
            self.n_bt += count

    def remove_slot(self, pk: str, slot: int) -> None:
        edges = ("L", "R") if pk == "lr" else ("B", "T")
        for e in edges:
            if ("p", e, slot) in self.pairs:
                raise MoveError(f"removing attached slot {e}[{slot}]")
        self._rename_slots(edges, slot + 1, -1)
        if pk == "lr":
            self.n_lr -= 1
        else:
            self.n_bt -= 1

    # -- finish -------------------------------------------------------------

    def freeze(self) -> SquareDiagram:
        for s in self._stubs:
            if s in self.nodes:
                self.splice(("n", s, 0), ("n", s, 1))
                self.remove_node(s)
        arcs = sorted({tuple(sorted((a, b))) for a, b in self.pairs.items()})
        return SquareDiagram(
            self.nodes, arcs, self.n_lr, self.n_bt, self.free_loops, self.axis
        )


# ---------------------------------------------------------------------------
# Shared pattern helpers
# ---------------------------------------------------------------------------


def _node(d: SquareDiagram, name) -> Node:
    nd = d.nodes.get(name)
    if nd is None:
        raise MoveError(f"no node {name}")
    return nd


def _require(cond, msg="pattern does not match"):
    if not cond:
        raise MoveError(msg)


def _peer(d: SquareDiagram, e: End) -> End:
    p = d.pairs.get(tuple(e))
    if p is None:
        raise MoveError(f"dangling endpoint {e}")
    return p


def _is_crossing_port(d, e, name=None) -> bool:
    return (
        e[0] == "n"
        and e[1] in d.nodes
        and d.nodes[e[1]].kind == "X"
        and (name is None or e[1] == name)
    )


def _faces_with_corners(d: SquareDiagram):
    """Faces plus, per face, corner records (node, in_port, out_port, idx)."""
    mv = MapView(d)
    faces = mv.faces()
    data = []
    for fc in faces:
        corners = []
        for idx, dart in enumerate(fc):
            nxt = fc[(idx + 1) % len(fc)]
            if dart[0] == "a" and dart[2][0] == "n" and nxt[0] == "a" and nxt[1][0] == "n":
                if dart[2][1] == nxt[1][1]:
                    corners.append((dart[2][1], dart[2][2], nxt[1][2], idx))
        data.append((fc, corners))
    return data


# ---------------------------------------------------------------------------
# R1: curls
# ---------------------------------------------------------------------------


def _enum_r1(d, ctx, out):
    for name in d.crossings():
        for i in range(4):
            if d.pairs.get(("n", name, i)) == ("n", name, (i + 1) % 4):
                out.append(MoveApplication("R1", "curl", (name, i), "f"))
    for a, b in d.arcs():
        for side in (0, 1):
            for over in (0, 1):
                out.append(MoveApplication("R1", f"s{side}o{over}", (a, b), "b"))
    if d.free_loops:
        for over in (0, 1):
            out.append(MoveApplication("R1", f"loop_o{over}", (), "b"))


def _apply_r1(d, m):
    b = Builder(d)
    if m.direction == "f":
        name, i = m.site
        nd = _node(d, name)
        _require(nd.kind == "X")
        _require(d.pairs.get(("n", name, i)) == ("n", name, (i + 1) % 4))
        b.delete_arc(("n", name, i), ("n", name, (i + 1) % 4))
        b.splice(("n", name, (i + 2) % 4), ("n", name, (i + 3) % 4))
        b.remove_node(name)
        return b.freeze()
    if m.variant.startswith("loop"):
        _require(d.free_loops > 0, "no free loop to curl")
        over = int(m.variant[-1])
        b.free_loops -= 1
        x = b.new_crossing(over)
        b.connect(("n", x, 0), ("n", x, 1))
        b.connect(("n", x, 2), ("n", x, 3))
        return b.freeze()
    a, c = m.site
    _require(d.pairs.get(tuple(a)) == tuple(c), "arc not present")
    side = int(m.variant[1])
    over = int(m.variant[3])
    b.delete_arc(a, c)
    x = b.new_crossing(over)
    if side == 0:
        # loop on the left of travel a->c: ports 0=E(to c) 1=NE 2=NW 3=W(to a)
        b.connect(a, ("n", x, 3))
        b.connect(("n", x, 1), ("n", x, 2))
        b.connect(("n", x, 0), c)
    else:
        # loop on the right: ports 0=E(to c) 1=W(to a) 2=SW 3=SE
        b.connect(a, ("n", x, 1))
        b.connect(("n", x, 3), ("n", x, 2))
        b.connect(("n", x, 0), c)
    return b.freeze()


# ---------------------------------------------------------------------------
# R2: clasps
# ---------------------------------------------------------------------------


def _enum_r2(d, ctx, out):
    seen = set()
    for c1 in d.crossings():
        for q1 in range(4):
            c2e = d.pairs.get(("n", c1, q1))
            if c2e is None or not _is_crossing_port(d, c2e) or c2e[1] == c1:
                continue
            c2, p2 = c2e[1], c2e[2]
            # second arc of the bigon: adjacent ports, opposite orientation
            beta_a = ("n", c1, (q1 + 1) % 4)
            beta_b = ("n", c2, (p2 - 1) % 4)
            if d.pairs.get(beta_a) != beta_b:
                continue
            if is_over(d.nodes[c1], q1) != is_over(d.nodes[c2], p2):
                continue
            key = tuple(sorted([(c1, q1), (c2, p2)]))
            if key in seen:
                continue
            seen.add(key)
            out.append(MoveApplication("R2", "bigon", (c1, q1, c2, p2), "f"))
    for fc, corners in ctx["faces"]:
        adarts = [x for x in fc if x[0] == "a"]
        for d1 in adarts:
            for d2 in adarts:
                if d1 == d2:
                    continue
                if {d1[1], d1[2]} == {d2[1], d2[2]}:
                    continue  # pushing an arc across itself is out of scope
                for over in (0, 1):
                    for flip in (0, 1):
                        out.append(
                            MoveApplication(
                                "R2",
                                f"o{over}f{flip}",
                                (d1[1], d1[2], d2[1], d2[2]),
                                "b",
                            )
                        )
    # arcs in different connected pieces can always be slid across each
    # other (relative placement of disconnected pieces is not tracked)
    darts = _arc_darts(d)
    for d1 in darts:
        for d2 in darts:
            if not _same_component(d, d1[1], d2[1]):
                for over in (0, 1):
                    for flip in (0, 1):
                        out.append(
                            MoveApplication(
                                "R2",
                                f"o{over}f{flip}",
                                (d1[1], d1[2], d2[1], d2[2]),
                                "b",
                            )
                        )


def _apply_r2(d, m):
    b = Builder(d)
    if m.direction == "f":
        c1, q1, c2, p2 = m.site
        _require(_node(d, c1).kind == "X" and _node(d, c2).kind == "X")
        _require(c1 != c2)
        _require(d.pairs.get(("n", c1, q1)) == ("n", c2, p2))
        _require(
            d.pairs.get(("n", c1, (q1 + 1) % 4)) == ("n", c2, (p2 - 1) % 4)
        )
        _require(is_over(d.nodes[c1], q1) == is_over(d.nodes[c2], p2))
        b.dissolve_crossing(c1)
        b.dissolve_crossing(c2)
        return b.freeze()
    u, v, w, z = (tuple(e) for e in m.site)
    over = int(m.variant[1])
    flip = int(m.variant[3]) if len(m.variant) > 3 else 0
    _require(d.pairs.get(u) == v and d.pairs.get(w) == z, "arcs not present")
    _require({u, v} != {w, z})
    _require(
        not _same_component(d, u, w)
        or _darts_share_face(ctx_faces(d), ("a", u, v), ("a", w, z))
    )

    def wire(w2, z2):
        bb = Builder(d)
        bb.delete_arc(u, v)
        bb.delete_arc(w2, z2)
        # finger from the (u,v) dart across the target dart; both darts have
        # the shared face on their left
        x = bb.new_crossing(1 if over else 0)  # finger runs through ports 1,3
        y = bb.new_crossing(1 if over else 0)
        bb.connect(u, ("n", x, 3))
        bb.connect(("n", x, 1), ("n", y, 1))
        bb.connect(("n", y, 3), v)
        bb.connect(w2, ("n", y, 0))
        bb.connect(("n", y, 2), ("n", x, 0))
        bb.connect(("n", x, 2), z2)
        return bb.freeze()

    cands = [lambda: wire(w, z), lambda: wire(z, w)]
    if flip:
        cands.reverse()
    return _first_planar(*cands)


def ctx_faces(d: SquareDiagram):
    hit = d._cache.get("faces")
    if hit is None:
        hit = _faces_with_corners(d)
        d._cache["faces"] = hit
    return hit


def _components(d: SquareDiagram) -> dict:
    """Map-vertex -> component id (boundary always component of its corner)."""
    hit = d._cache.get("components")
    if hit is None:
        hit = {}
        for idx, info in enumerate(MapView(d).components()):
            for member in info["members"]:
                hit[member] = idx
        d._cache["components"] = hit
    return hit


def _vertex_of(e: End):
    return ("n", e[1]) if e[0] == "n" else e


def _same_component(d, x: End, y) -> bool:
    comp = _components(d)
    cy = comp.get(("c", 0)) if y == "boundary" else comp.get(_vertex_of(y))
    return comp.get(_vertex_of(x)) == cy


def _darts_share_face(faces, d1, d2) -> bool:
    for fc, _ in faces:
        if d1 in fc and d2 in fc:
            return True
    return False


def _arc_darts(d: SquareDiagram) -> list:
    out = []
    for a, b in d.arcs():
        out.append(("a", a, b))
        out.append(("a", b, a))
    return out


# ---------------------------------------------------------------------------
# R3: triangle flips
# ---------------------------------------------------------------------------


def _enum_r3(d, ctx, out):
    for fc, corners in ctx["faces"]:
        if len(fc) != 3 or any(x[0] != "a" for x in fc):
            continue
        if len(corners) != 3:
            continue
        names = [c[0] for c in corners]
        if len(set(names)) != 3:
            continue
        if any(d.nodes[n].kind != "X" for n in names):
            continue
        # slideability: some triangle arc is over at both of its corners
        ok = False
        for dart in fc:
            ends = (dart[1], dart[2])
            if is_over(d.nodes[ends[0][1]], ends[0][2]) == is_over(
                d.nodes[ends[1][1]], ends[1][2]
            ):
                ok = True
        if not ok:
            continue
        site = tuple(sorted((dart[1], dart[2]) for dart in fc))
        out.append(MoveApplication("R3", "tri", site, "t"))


def _apply_r3(d, m):
    arcs = [tuple(map(tuple, pair)) for pair in m.site]
    _require(len(arcs) == 3)
    names = set()
    for a, c in arcs:
        _require(d.pairs.get(a) == c, "triangle arc missing")
        names.add(a[1])
        names.add(c[1])
    _require(len(names) == 3)
    for n in names:
        _require(_node(d, n).kind == "X")
    ok = False
    for a, c in arcs:
        if is_over(d.nodes[a[1]], a[2]) == is_over(d.nodes[c[1]], c[2]):
            ok = True
    _require(ok, "no strand passes over or under the whole triangle")
    b = Builder(d)
    plan = []
    for a, c in arcs:
        na, pa = a[1], a[2]
        nc, pc = c[1], c[2]
        plan.append((na, pa, nc, pc))
    handles = []
    for na, pa, nc, pc in plan:
        h1 = b.cut(("n", na, (pa + 2) % 4))
        h2 = b.cut(("n", nc, (pc + 2) % 4))
        handles.append((h1, h2))
    for (na, pa, nc, pc), _ in zip(plan, handles):
        b.delete_arc(("n", na, pa), ("n", nc, pc))
    for (na, pa, nc, pc), (h1, h2) in zip(plan, handles):
        # reverse the order of the two passes along this strand
        b.connect(h1, ("n", nc, pc))
        b.connect(("n", nc, (pc + 2) % 4), ("n", na, (pa + 2) % 4))
        b.connect(("n", na, pa), h2)
    return b.freeze()


# ---------------------------------------------------------------------------
# R4: strand across a marker
# ---------------------------------------------------------------------------


def _enum_r4(d, ctx, out):
    for fc, corners in ctx["faces"]:
        if len(fc) != 3 or any(x[0] != "a" for x in fc):
            continue
        mk = [c for c in corners if d.nodes[c[0]].kind == "M"]
        xs = [c for c in corners if d.nodes[c[0]].kind == "X"]
        if len(mk) != 1 or len(xs) != 2 or len(corners) != 3:
            continue
        if xs[0][0] == xs[1][0]:
            continue
        mname = mk[0][0]
        dot_peer = d.pairs[("n", mname, 0)]
        cir_peer = d.pairs[("n", mname, 1)]
        if not (_is_crossing_port(d, dot_peer) and _is_crossing_port(d, cir_peer)):
            continue
        if {dot_peer[1], cir_peer[1]} != {xs[0][0], xs[1][0]}:
            continue
        if not is_over(d.nodes[dot_peer[1]], dot_peer[2]):
            continue
        if is_over(d.nodes[cir_peer[1]], cir_peer[2]):
            continue
        out.append(
            MoveApplication("R4", "slide", (mname, dot_peer[1], cir_peer[1]), "f")
        )
    # creating direction: slide a strand dart across a marker corner it
    # shares a face with
    for fc, corners in ctx["faces"]:
        for (name, pin, pout, idx) in corners:
            if d.nodes[name].kind != "M":
                continue
            excl = {fc[idx], fc[(idx + 1) % len(fc)]}
            for dart in fc:
                if dart[0] != "a" or dart in excl:
                    continue
                if {dart[1], dart[2]} & {("n", name, 0), ("n", name, 1)}:
                    continue
                for flip in (0, 1):
                    out.append(
                        MoveApplication(
                            "R4", f"in{pin}f{flip}", (name, dart[1], dart[2]), "b"
                        )
                    )
    for name in d.markers():
        for dart in _arc_darts(d):
            if _same_component(d, ("n", name, 0), dart[1]):
                continue
            for pin in (0, 1):
                for flip in (0, 1):
                    out.append(
                        MoveApplication(
                            "R4", f"in{pin}f{flip}", (name, dart[1], dart[2]), "b"
                        )
                    )


def _apply_r4(d, m):
    b = Builder(d)
    if m.direction == "f":
        mname, xd, xc = m.site
        _require(_node(d, mname).kind == "M")
        dot_peer = _peer(d, ("n", mname, 0))
        cir_peer = _peer(d, ("n", mname, 1))
        _require(_is_crossing_port(d, dot_peer, xd), "dot branch not on crossing")
        _require(_is_crossing_port(d, cir_peer, xc), "circle branch not on crossing")
        _require(xd != xc)
        _require(is_over(d.nodes[xd], dot_peer[2]), "dot branch must be over")
        _require(not is_over(d.nodes[xc], cir_peer[2]), "circle branch must be under")
        # the sliding strand must run directly between the two crossings on
        # one side of the marker (either chirality of the triangle)
        lhs = d.pairs.get(("n", xd, (dot_peer[2] - 1) % 4)) == (
            "n",
            xc,
            (cir_peer[2] + 1) % 4,
        )
        rhs = d.pairs.get(("n", xd, (dot_peer[2] + 1) % 4)) == (
            "n",
            xc,
            (cir_peer[2] - 1) % 4,
        )
        _require(lhs or rhs, "no direct strand between the crossings")
        b.dissolve_crossing(xd)
        b.dissolve_crossing(xc)
        return b.freeze()
    mname, u, w = m.site[0], tuple(m.site[1]), tuple(m.site[2])
    parts = m.variant[2:].split("f")
    i = int(parts[0])  # marker port on the in side of the face corner
    flip = int(parts[1]) if len(parts) > 1 else 0
    nd = _node(d, mname)
    _require(nd.kind == "M")
    _require(d.pairs.get(u) == w, "strand arc not present")
    dart = ("a", u, w)
    if _same_component(d, ("n", mname, 0), u):
        ok = False
        for fc, corners in ctx_faces(d):
            for (name, pin, pout, idx) in corners:
                if name == mname and pin == i and dart in fc:
                    if dart not in (fc[idx], fc[(idx + 1) % len(fc)]):
                        ok = True
        _require(ok, "strand does not face the marker corner")
    def wire(u2, w2):
        bb = Builder(d)
        prev_end = bb.cut(("n", mname, i))
        next_end = bb.cut(("n", mname, 1 - i))
        bb.delete_arc(u2, w2)
        # crossing on the in-branch: [0]=far [1]=tip [2]=marker [3]=strand head
        xn = bb.new_crossing(0 if i == 0 else 1)
        # crossing on the out-branch: [0]=far [1]=strand tail [2]=marker [3]=tip
        yn = bb.new_crossing(0 if (1 - i) == 0 else 1)
        bb.connect(prev_end, ("n", xn, 0))
        bb.connect(("n", xn, 2), ("n", mname, i))
        bb.connect(("n", mname, 1 - i), ("n", yn, 2))
        bb.connect(("n", yn, 0), next_end)
        bb.connect(u2, ("n", yn, 1))
        bb.connect(("n", yn, 3), ("n", xn, 1))
        bb.connect(("n", xn, 3), w2)
        return bb.freeze()

    cands = [lambda: wire(u, w), lambda: wire(w, u)]
    if flip:
        cands.reverse()
    return _first_planar(*cands)


# ---------------------------------------------------------------------------
# R5: finger through the depth faces (two markers)
# ---------------------------------------------------------------------------


def _enum_r5(d, ctx, out):
    for m1 in d.markers():
        for port, tag in ((1, "c"), (0, "d")):
            pr = d.pairs.get(("n", m1, port))
            if (
                pr is not None
                and pr[0] == "n"
                and pr[1] != m1
                and pr[1] in d.nodes
                and d.nodes[pr[1]].kind == "M"
                and pr[2] == port
                and m1 < pr[1]
            ):
                out.append(MoveApplication("R5", tag, (m1, pr[1]), "f"))
    for a, c in d.arcs():
        for tag in ("c", "d"):
            out.append(MoveApplication("R5", tag, (a, c), "b"))
    if d.free_loops:
        out.append(MoveApplication("R5", "loop", (), "b"))


def _apply_r5(d, m):
    b = Builder(d)
    if m.direction == "f":
        m1, m2 = m.site
        port = 1 if m.variant == "c" else 0
        _require(_node(d, m1).kind == "M" and _node(d, m2).kind == "M")
        _require(m1 != m2)
        _require(d.pairs.get(("n", m1, port)) == ("n", m2, port))
        b.dissolve_marker(m1)
        b.dissolve_marker(m2)
        return b.freeze()
    if m.variant == "loop":
        _require(d.free_loops > 0)
        b.free_loops -= 1
        m1 = b.new_marker()
        m2 = b.new_marker()
        b.connect(("n", m1, 0), ("n", m2, 0))
        b.connect(("n", m1, 1), ("n", m2, 1))
        return b.freeze()
    a, c = (tuple(e) for e in m.site)
    _require(d.pairs.get(a) == c, "arc not present")
    joined = 1 if m.variant == "c" else 0
    outer = 1 - joined
    b.delete_arc(a, c)
    m1 = b.new_marker()
    m2 = b.new_marker()
    b.connect(a, ("n", m1, outer))
    b.connect(("n", m1, joined), ("n", m2, joined))
    b.connect(("n", m2, outer), c)
    return b.freeze()


# ---------------------------------------------------------------------------
# boundary helpers
# ---------------------------------------------------------------------------


def _slot_count(d, edge):
    return d.n_lr if edge in ("L", "R") else d.n_bt


def _pk(edge):
    return "lr" if edge in ("L", "R") else "bt"


def _boundary_darts(d):
    """Boundary segment descriptors: (edge, insert_slot, tail, head, dart).

    tail/head follow the counterclockwise walk; insert_slot is where new
    punctures created inside this segment land (existing slots >= insert
    shift up).
    """
    out = []
    seq = SquareDiagram.boundary_sequence(d)
    n = len(seq)
    corner_edges = {(0, 1): "B", (1, 2): "R", (2, 3): "T", (3, 0): "L"}
    for i in range(n):
        f1, f2 = seq[i], seq[(i + 1) % n]
        if f1[0] == "p":
            edge = f1[1]
        elif f2[0] == "p":
            edge = f2[1]
        else:
            edge = corner_edges[(f1[1], f2[1])]
        asc = _EDGE_ASCENDS[edge]
        # boundary walk ascends slots on R and B, descends on L and T; new
        # slots land between the two features
        if asc:
            k = f1[2] + 1 if f1[0] == "p" else 0
        else:
            k = f2[2] + 1 if f2[0] == "p" else 0
        out.append((edge, k, f1, f2, ("b", i, 1)))
    return out


# ---------------------------------------------------------------------------
# R6: finger through a boundary edge (two puncture pairs)
# ---------------------------------------------------------------------------


def _enum_r6(d, ctx, out):
    for edge in EDGES:
        n = _slot_count(d, edge)
        for k in range(n - 1):
            if d.pairs.get(("p", edge, k)) == ("p", edge, k + 1):
                out.append(MoveApplication("R6", "tip", (edge, k), "f"))
    for edge, k, f1, f2, bdart in ctx["bdarts"]:
        for fc, _ in ctx["faces"]:
            if bdart not in fc:
                continue
            for dart in fc:
                if dart[0] != "a":
                    continue
                for flip in (0, 1):
                    out.append(
                        MoveApplication(
                            "R6", f"push_f{flip}", (dart[1], dart[2], edge, k), "b"
                        )
                    )
    # floating pieces may be pushed through any boundary segment
    floats = [
        dart for dart in _arc_darts(d) if not _same_component(d, dart[1], "boundary")
    ]
    if floats:
        for edge, k, f1, f2, bdart in ctx["bdarts"]:
            for dart in floats:
                for flip in (0, 1):
                    out.append(
                        MoveApplication(
                            "R6", f"push_f{flip}", (dart[1], dart[2], edge, k), "b"
                        )
                    )


def _apply_r6(d, m):
    b = Builder(d)
    if m.direction == "f":
        edge, k = m.site
        _require(d.pairs.get(("p", edge, k)) == ("p", edge, k + 1), "no finger tip")
        pedge = puncture_partner(("p", edge, k))[1]
        h1 = b.cut(("p", pedge, k))
        h2 = b.cut(("p", pedge, k + 1))
        b.delete_arc(("p", edge, k), ("p", edge, k + 1))
        pk = _pk(edge)
        b.remove_slot(pk, k + 1)
        b.remove_slot(pk, k)
        b.connect(h1, h2)
        return b.freeze()
    u, w, edge, k = m.site
    u, w = tuple(u), tuple(w)
    _require(d.pairs.get(u) == w, "arc not present")
    _require(
        not _same_component(d, u, "boundary")
        or _darts_share_face_with_segment(d, ("a", u, w), edge, k),
        "strand does not face the boundary segment",
    )

    def wire(a, c):
        bb = Builder(d)
        bb.delete_arc(a, c)
        pk = _pk(edge)
        bb.insert_slots(pk, k, 2)
        a2 = _shifted_end(a, pk, k, 2)
        c2 = _shifted_end(c, pk, k, 2)
        pedge = puncture_partner(("p", edge, 0))[1]
        if _EDGE_ASCENDS[edge]:
            bb.connect(a2, ("p", edge, k + 1))
            bb.connect(c2, ("p", edge, k))
        else:
            bb.connect(a2, ("p", edge, k))
            bb.connect(c2, ("p", edge, k + 1))
        bb.connect(("p", pedge, k), ("p", pedge, k + 1))
        return bb.freeze()

    flip = int(m.variant[-1]) if m.variant.startswith("push_f") else 0
    cands = [lambda: wire(u, w), lambda: wire(w, u)]
    if flip:
        cands.reverse()
    return _first_planar(*cands)


def _shifted_end(e: End, pk: str, at: int, delta: int) -> End:
    """Track an endpoint label across an insert_slots/remove_slot call."""
    if e[0] == "p" and _pk(e[1]) == pk and e[2] >= at:
        return ("p", e[1], e[2] + delta)
    return e


def _euler_ok(d: SquareDiagram) -> bool:
    try:
        return all(
            info["vertices"] - info["edges"] + info["faces"] == 2
            for info in MapView(d).components()
        )
    except KeyError:
        return False


def _first_planar(*candidates) -> SquareDiagram:
    """Run rewrite candidates in order, returning the first planar result.

    Creating moves whose local pattern leaves a two-sided orientation choice
    (which branch lands on which slot) use this: exactly the planar wiring
    is the one realised by the isotopy.
    """
    last_err = None
    for make in candidates:
        try:
            d2 = make()
        except MoveError as exc:
            last_err = exc
            continue
        if _euler_ok(d2):
            return d2
    if last_err is not None:
        raise last_err
    raise MoveError("no planar rewiring for this application")


def _darts_share_face_with_segment(d, dart, edge, k) -> bool:
    for (e2, k2, f1, f2, bdart) in _boundary_darts(d):
        if e2 == edge and k2 == k:
            for fc, _ in ctx_faces(d):
                if bdart in fc and dart in fc:
                    return True
    return False


# ---------------------------------------------------------------------------
# R7: crossing through a boundary edge
# ---------------------------------------------------------------------------


def _enum_r7(d, ctx, out):
    for edge in EDGES:
        n = _slot_count(d, edge)
        asc = _EDGE_ASCENDS[edge]
        for k in range(n - 1):
            p1 = ("p", edge, k if asc else k + 1)
            p2 = ("p", edge, k + 1 if asc else k)
            e1 = d.pairs.get(p1)
            e2 = d.pairs.get(p2)
            if e1 is None or e2 is None:
                continue
            if not (_is_crossing_port(d, e1) and _is_crossing_port(d, e2)):
                continue
            if e1[1] != e2[1]:
                continue
            # face closure needs out-port at p1 and in-port = out+1 at p2
            if (e1[2] + 1) % 4 != e2[2]:
                continue
            out.append(MoveApplication("R7", "carry", (e1[1], e1[2], edge, k), "t"))


def _apply_r7(d, m):
    cname, q, edge, k = m.site
    _require(_node(d, cname).kind == "X")
    asc = _EDGE_ASCENDS[edge]
    p1 = ("p", edge, k if asc else k + 1)
    p2 = ("p", edge, k + 1 if asc else k)
    _require(d.pairs.get(("n", cname, q)) == p1, "crossing not at the edge")
    _require(d.pairs.get(("n", cname, (q + 1) % 4)) == p2)
    b = Builder(d)
    h1 = b.cut(("n", cname, (q + 2) % 4))
    h2 = b.cut(("n", cname, (q + 3) % 4))
    g1 = b.cut(puncture_partner(p1))
    g2 = b.cut(puncture_partner(p2))
    b.delete_arc(("n", cname, q), p1)
    b.delete_arc(("n", cname, (q + 1) % 4), p2)
    b.connect(h1, p2)
    b.connect(h2, p1)
    b.connect(puncture_partner(p2), ("n", cname, (q + 2) % 4))
    b.connect(puncture_partner(p1), ("n", cname, (q + 3) % 4))
    b.connect(("n", cname, q), g1)
    b.connect(("n", cname, (q + 1) % 4), g2)
    return b.freeze()


# ---------------------------------------------------------------------------
# R8: strand across a corner
# ---------------------------------------------------------------------------

_CORNER_FLANKS = {
    0: (("L", "lo"), ("B", "lo")),  # BL: before L[0] (walk descends), after B[0]
    1: (("B", "hi"), ("R", "lo")),
    2: (("R", "hi"), ("T", "hi")),
    3: (("T", "lo"), ("L", "hi")),
}


def _flank(d, spec) -> Optional[End]:
    edge, which = spec
    n = _slot_count(d, edge)
    if n == 0:
        return None
    return ("p", edge, 0 if which == "lo" else n - 1)


def _enum_r8(d, ctx, out):
    for ci in range(4):
        fa = _flank(d, _CORNER_FLANKS[ci][0])
        fb = _flank(d, _CORNER_FLANKS[ci][1])
        if fa is None or fb is None:
            continue
        if d.pairs.get(fa) == fb:
            out.append(MoveApplication("R8", "corner", (ci,), "t"))


def _apply_r8(d, m):
    (ci,) = m.site
    fa = _flank(d, _CORNER_FLANKS[ci][0])
    fb = _flank(d, _CORNER_FLANKS[ci][1])
    _require(fa is not None and fb is not None, "no flanking punctures")
    _require(d.pairs.get(fa) == fb, "no corner arc")
    cj = (ci + 2) % 4
    b = Builder(d)
    ha = b.cut(puncture_partner(fa))
    hb = b.cut(puncture_partner(fb))
    b.delete_arc(fa, fb)
    for spec in _CORNER_FLANKS[ci]:
        edge, which = spec
        pk = _pk(edge)
        n = _slot_count(d, edge)
        b.remove_slot(pk, 0 if which == "lo" else n - 1)
    # insert the pairs at the opposite ends
    new_ends = {}
    for spec in _CORNER_FLANKS[cj]:
        edge, which = spec
        pk = _pk(edge)
        n = b.n_lr if pk == "lr" else b.n_bt
        at = 0 if which == "lo" else n
        b.insert_slots(pk, at, 1)
        new_ends[spec] = ("p", edge, at)
    fa2 = new_ends[_CORNER_FLANKS[cj][0]]
    fb2 = new_ends[_CORNER_FLANKS[cj][1]]
    b.connect(hb, puncture_partner(fa2))
    b.connect(ha, puncture_partner(fb2))
    b.connect(fa2, fb2)
    return b.freeze()


# ---------------------------------------------------------------------------
# R9: marker through a boundary edge
# ---------------------------------------------------------------------------


def _enum_r9(d, ctx, out):
    # (a) marker-tipped finger: marker attached to two adjacent same-edge
    # punctures, either orientation
    for mname in d.markers():
        e0 = d.pairs.get(("n", mname, 0))
        e1 = d.pairs.get(("n", mname, 1))
        if (
            e0 is not None
            and e1 is not None
            and e0[0] == "p"
            and e1[0] == "p"
            and e0[1] == e1[1]
            and abs(e0[2] - e1[2]) == 1
        ):
            out.append(MoveApplication("R9", "finger", (mname,), "f"))
        # (b) hop: one branch on a puncture
        for port in (0, 1):
            pr = d.pairs.get(("n", mname, port))
            if pr is not None and pr[0] == "p":
                other = d.pairs.get(("n", mname, 1 - port))
                if other is not None and other != pr:
                    out.append(MoveApplication("R9", "hop", (mname, port), "t"))
    # pushing a marker through a boundary segment it faces
    for fc, corners in ctx["faces"]:
        mk_corners = [
            (name, pin, pout, idx)
            for (name, pin, pout, idx) in corners
            if d.nodes[name].kind == "M"
        ]
        if not mk_corners:
            continue
        for (edge, k, f1, f2, bdart) in ctx["bdarts"]:
            if bdart not in fc:
                continue
            for (name, pin, pout, idx) in mk_corners:
                out.append(
                    MoveApplication("R9", "push", (name, pin, edge, k), "b")
                )
    for name in d.markers():
        if _same_component(d, ("n", name, 0), "boundary"):
            continue
        for (edge, k, f1, f2, bdart) in ctx["bdarts"]:
            for pin in (0, 1):
                out.append(
                    MoveApplication("R9", "push", (name, pin, edge, k), "b")
                )


def _apply_r9(d, m):
    b = Builder(d)
    if m.variant == "finger":
        (mname,) = m.site
        _require(_node(d, mname).kind == "M")
        e0 = _peer(d, ("n", mname, 0))
        e1 = _peer(d, ("n", mname, 1))
        _require(e0[0] == "p" and e1[0] == "p" and e0[1] == e1[1])
        _require(abs(e0[2] - e1[2]) == 1, "punctures not adjacent")
        edge = e0[1]
        lo = min(e0[2], e1[2])
        # strand continuity: out-port attaches the walk-tail puncture
        asc = _EDGE_ASCENDS[edge]
        tail = ("p", edge, lo if asc else lo + 1)
        head = ("p", edge, lo + 1 if asc else lo)
        port_out = 0 if _peer(d, ("n", mname, 0)) == tail else 1
        g1 = b.cut(puncture_partner(tail))
        g2 = b.cut(puncture_partner(head))
        b.delete_arc(("n", mname, port_out), tail)
        b.delete_arc(("n", mname, 1 - port_out), head)
        pk = _pk(edge)
        b.remove_slot(pk, lo + 1)
        b.remove_slot(pk, lo)
        b.connect(g1, ("n", mname, port_out))
        b.connect(("n", mname, 1 - port_out), g2)
        return b.freeze()
    if m.variant == "hop":
        mname, port = m.site
        _require(_node(d, mname).kind == "M")
        p = _peer(d, ("n", mname, port))
        _require(p[0] == "p", "branch not on a puncture")
        hb = b.cut(("n", mname, 1 - port))
        g = b.cut(puncture_partner(p))
        b.delete_arc(("n", mname, port), p)
        b.connect(("n", mname, port), g)
        b.connect(("n", mname, 1 - port), puncture_partner(p))
        b.connect(p, hb)
        return b.freeze()
    # push: the backward direction of the finger retraction
    mname, pin, edge, k = m.site
    _require(_node(d, mname).kind == "M")
    if _same_component(d, ("n", mname, 0), "boundary"):
        ok = False
        for fc, corners in ctx_faces(d):
            for (name, cin, cout, idx) in corners:
                if name != mname or cin != pin:
                    continue
                for (e2, k2, f1, f2, bdart) in _boundary_darts(d):
                    if e2 == edge and k2 == k and bdart in fc:
                        ok = True
        _require(ok, "marker does not face the boundary segment")

    def wire(p_in):
        bb = Builder(d)
        p_out = 1 - p_in
        h_out = bb.cut(("n", mname, p_out))
        h_in = bb.cut(("n", mname, p_in))
        pk = _pk(edge)
        bb.insert_slots(pk, k, 2)
        asc = _EDGE_ASCENDS[edge]
        tail = ("p", edge, k if asc else k + 1)
        head = ("p", edge, k + 1 if asc else k)
        bb.connect(("n", mname, p_out), tail)
        bb.connect(("n", mname, p_in), head)
        bb.connect(h_out, puncture_partner(tail))
        bb.connect(h_in, puncture_partner(head))
        return bb.freeze()

    return _first_planar(lambda: wire(pin), lambda: wire(1 - pin))


# ---------------------------------------------------------------------------
# R10: strand across a vertex
# ---------------------------------------------------------------------------


def _r10_scan(d, vname, i, k):
    """Check the crossed-run pattern; return (xs, a_ports, over) or None.

    The strand crosses the germs at ports i..i+k-1 consecutively.  Rooting
    each crossing's ports at the germ-inward port a, the strand occupies
    ports a+1 and a+3; the segment between germ t and germ t+1 joins port
    a_t+3 to port a_{t+1}+1, the only planar chaining.
    """
    nd = d.nodes[vname]
    xs = []
    aports = []
    for t in range(k):
        e = d.pairs.get(("n", vname, (i + t) % nd.arity))
        if e is None or not _is_crossing_port(d, e) or e[1] == vname:
            return None
        xs.append(e[1])
        aports.append(e[2])
    if len(set(xs)) != k:
        return None
    for t in range(k - 1):
        if d.pairs.get(("n", xs[t], (aports[t] + 3) % 4)) != (
            "n",
            xs[t + 1],
            (aports[t + 1] + 1) % 4,
        ):
            return None
    over = is_over(d.nodes[xs[0]], (aports[0] + 1) % 4)
    for t in range(1, k):
        if is_over(d.nodes[xs[t]], (aports[t] + 1) % 4) != over:
            return None
    return xs, aports, over


def _r10_closed(d, xs, aports):
    return d.pairs.get(("n", xs[-1], (aports[-1] + 3) % 4)) == (
        "n",
        xs[0],
        (aports[0] + 1) % 4,
    )


def _enum_r10(d, ctx, out):
    amax = ctx["max_arity"]
    for vname in d.graph_vertices():
        nd = d.nodes[vname]
        if nd.arity > amax:
            continue
        ddeg = nd.arity
        for i in range(ddeg):
            for k in range(1, ddeg + 1):
                scan = _r10_scan(d, vname, i, k)
                if scan is None:
                    continue
                xs, aports, over = scan
                if k == ddeg and _r10_closed(d, xs, aports):
                    if i == 0:
                        out.append(MoveApplication("R10", "shed", (vname,), "f"))
                    continue
                out.append(MoveApplication("R10", "run", (vname, i, k), "t"))
        # slide a clean strand dart across the vertex (empty run)
        for fc, corners in ctx["faces"]:
            for (name, pin, pout, idx) in corners:
                if name != vname:
                    continue
                for dart in fc:
                    if dart[0] != "a":
                        continue
                    if vname in (dart[1][1], dart[2][1]):
                        continue
                    for over in (0, 1):
                        for flip in (0, 1):
                            out.append(
                                MoveApplication(
                                    "R10",
                                    f"sweep_o{over}f{flip}",
                                    (vname, pin, dart[1], dart[2]),
                                    "b",
                                )
                            )
        for dart in _arc_darts(d):
            if _same_component(d, ("n", vname, 0), dart[1]):
                continue
            for pin in range(dd):
                for over in (0, 1):
                    for flip in (0, 1):
                        out.append(
                            MoveApplication(
                                "R10",
                                f"sweep_o{over}f{flip}",
                                (vname, pin, dart[1], dart[2]),
                                "b",
                            )
                        )
        if d.free_loops:
            for over in (0, 1):
                out.append(
                    MoveApplication("R10", f"lasso_o{over}", (vname,), "b")
                )


def _r10_insert_chain(b, vname, germs, over, s_lo, s_hi):
    """Insert crossings over the germ ports (ascending around the vertex).

    The strand chains through ports +3 -> +1 between consecutive germs; the
    free chain ends are port +1 of the first germ's crossing (facing the
    sector below the run) and +3 of the last (facing the sector above).
    ``s_lo``/``s_hi`` attach there; both None closes the chain into a ring.
    """
    ys = []
    for g in germs:
        h = b.cut(("n", vname, g))
        y = b.new_crossing(1 if over else 0)  # strand on ports 1,3
        b.connect(("n", vname, g), ("n", y, 0))
        b.connect(("n", y, 2), h)
        ys.append(y)
    if not ys:
        if s_lo is not None:
            b.connect(s_lo, s_hi)
        return
    for t in range(len(ys) - 1):
        b.connect(("n", ys[t], 3), ("n", ys[t + 1], 1))
    if s_lo is None:
        b.connect(("n", ys[-1], 3), ("n", ys[0], 1))
    else:
        b.connect(s_lo, ("n", ys[0], 1))
        b.connect(("n", ys[-1], 3), s_hi)


def _apply_r10(d, m):
    b = Builder(d)
    if m.variant in ("run", "shed"):
        if m.variant == "shed":
            vname = m.site[0]
            nd = _node(d, vname)
            i, k = 0, nd.arity
        else:
            vname, i, k = m.site
            nd = _node(d, vname)
        scan = _r10_scan(d, vname, i, k)
        _require(scan is not None, "crossed run does not match")
        xs, aports, over = scan
        closed = k == nd.arity and _r10_closed(d, xs, aports)
        if m.variant == "shed":
            _require(closed, "strand is not a closed lasso")
        else:
            _require(not closed, "closed lasso needs the shed move")
        if closed:
            h_a = h_b = None
        else:
            # +1 of the first crossing faces the entry sector (i-1, i);
            # +3 of the last faces the exit sector (i+k-1, i+k)
            h_a = b.cut(("n", xs[0], (aports[0] + 1) % 4))
            h_b = b.cut(("n", xs[-1], (aports[-1] + 3) % 4))
        chain = k if closed else k - 1
        for t in range(chain):
            b.delete_arc(
                ("n", xs[t], (aports[t] + 3) % 4),
                ("n", xs[(t + 1) % k], (aports[(t + 1) % k] + 1) % 4),
            )
        for t in range(k):
            b.delete_arc(("n", vname, (i + t) % nd.arity), ("n", xs[t], aports[t]))
            h = b.cut(("n", xs[t], (aports[t] + 2) % 4))
            b.connect(("n", vname, (i + t) % nd.arity), h)
            b.remove_node(xs[t])
        if closed:
            b.free_loops += 1
            return b.freeze()
        # complementary run: germs i+k .. i-1 ascending; its +1 end faces
        # sector (i+k-1, i+k) and its +3 end faces (i-1, i)
        germs = [(i + k + t) % nd.arity for t in range(nd.arity - k)]
        _r10_insert_chain(b, vname, germs, over, h_b, h_a)
        return b.freeze()
    if m.variant.startswith("lasso_"):
        over = bool(int(m.variant[-1]))
        (vname,) = m.site
        nd = _node(d, vname)
        _require(d.free_loops > 0, "no free loop")
        b.free_loops -= 1
        _r10_insert_chain(b, vname, list(range(nd.arity)), over, None, None)
        return b.freeze()
    # sweep: empty run to full run across the corner (i-1, i)
    _require(m.variant.startswith("sweep_"), f"unknown R10 variant {m.variant}")
    tail = m.variant[len("sweep_o"):]
    over = bool(int(tail[0]))
    flip = int(tail[2]) if len(tail) > 2 else 0
    vname, i, u, w = m.site[0], m.site[1], tuple(m.site[2]), tuple(m.site[3])
    nd = _node(d, vname)
    _require(d.pairs.get(u) == w, "strand arc not present")
    dart = ("a", u, w)
    if _same_component(d, ("n", vname, 0), u):
        ok = False
        for fc, corners in ctx_faces(d):
            for (name, pin, pout, idx) in corners:
                if name == vname and pin == i and dart in fc:
                    ok = True
        _require(ok, "strand does not face the vertex corner")

    def wire(lo, hi):
        bb = Builder(d)
        bb.delete_arc(u, w)
        # full run over germs i..i-1 ascending; the +1 chain end and the +3
        # chain end both face the corner sector (i-1, i)
        germs = [(i + t) % nd.arity for t in range(nd.arity)]
        _r10_insert_chain(bb, vname, germs, over, lo, hi)
        return bb.freeze()

    cands = [lambda: wire(w, u), lambda: wire(u, w)]
    if flip:
        cands.reverse()
    return _first_planar(*cands)


# ---------------------------------------------------------------------------
# R11: twist of two adjacent germs
# ---------------------------------------------------------------------------


def _enum_r11(d, ctx, out):
    amax = ctx["max_arity"]
    for vname in d.graph_vertices():
        nd = d.nodes[vname]
        if nd.arity > amax:
            continue
        for j in range(nd.arity):
            if nd.arity == 1:
                continue
            e1 = d.pairs.get(("n", vname, j))
            e2 = d.pairs.get(("n", vname, (j + 1) % nd.arity))
            if e1 is None or e2 is None:
                continue
            if not _is_crossing_port(d, e1) or e1[1] == vname:
                continue
            if e2 != ("n", e1[1], (e1[2] - 1) % 4):
                continue
            out.append(MoveApplication("R11", "untwist", (vname, j), "f"))
        for j in range(nd.arity):
            if nd.arity == 1:
                continue
            for over in (0, 1):
                out.append(MoveApplication("R11", f"o{over}", (vname, j), "b"))


def _apply_r11(d, m):
    vname, j = m.site
    nd = _node(d, vname)
    _require(nd.kind == "V" and nd.arity >= 2)
    j2 = (j + 1) % nd.arity
    b = Builder(d)
    if m.direction == "f":
        e1 = _peer(d, ("n", vname, j))
        _require(_is_crossing_port(d, e1) and e1[1] != vname, "no twist crossing")
        x, p = e1[1], e1[2]
        _require(d.pairs.get(("n", vname, j2)) == ("n", x, (p - 1) % 4))
        f1 = b.cut(("n", x, (p + 2) % 4))
        f2 = b.cut(("n", x, (p + 1) % 4))
        b.delete_arc(("n", vname, j), ("n", x, p))
        b.delete_arc(("n", vname, j2), ("n", x, (p - 1) % 4))
        b.remove_node(x)
        b.connect(("n", vname, j), f2)
        b.connect(("n", vname, j2), f1)
        return b.freeze()
    over = int(m.variant[1])
    g1 = b.cut(("n", vname, j))
    g2 = b.cut(("n", vname, j2))
    x = b.new_crossing(over)
    b.connect(("n", vname, j), ("n", x, 0))
    b.connect(("n", vname, j2), ("n", x, 3))
    b.connect(("n", x, 2), g2)
    b.connect(("n", x, 1), g1)
    return b.freeze()


# ---------------------------------------------------------------------------
# R12: vertex through the depth faces
# ---------------------------------------------------------------------------


def _enum_r12(d, ctx, out):
    amax = ctx["max_arity"]
    for vname in d.graph_vertices():
        nd = d.nodes[vname]
        if nd.arity > amax:
            continue
        for c in (0, 1):
            ok = True
            names = set()
            for t in range(nd.arity):
                e = d.pairs.get(("n", vname, t))
                if (
                    e is None
                    or e[0] != "n"
                    or e[1] not in d.nodes
                    or d.nodes[e[1]].kind != "M"
                    or e[2] != c
                ):
                    ok = False
                    break
                names.add(e[1])
            if ok and len(names) == nd.arity:
                out.append(MoveApplication("R12", f"c{c}", (vname,), "f"))
        for c in (0, 1):
            out.append(MoveApplication("R12", f"c{c}", (vname,), "b"))


def _apply_r12(d, m):
    (vname,) = m.site
    nd = _node(d, vname)
    c = int(m.variant[1])
    b = Builder(d)
    if m.direction == "f":
        markers = []
        for t in range(nd.arity):
            e = _peer(d, ("n", vname, t))
            _require(
                e[0] == "n" and d.nodes.get(e[1]) and d.nodes[e[1]].kind == "M",
                "germ not on a marker",
            )
            _require(e[2] == c, "marker orientation mismatch")
            markers.append(e[1])
        _require(len(set(markers)) == nd.arity, "markers not distinct")
        for mm in markers:
            b.dissolve_marker(mm)
        return b.freeze()
    for t in range(nd.arity):
        h = b.cut(("n", vname, t))
        mm = b.new_marker()
        b.connect(("n", vname, t), ("n", mm, c))
        b.connect(("n", mm, 1 - c), h)
    return b.freeze()


# ---------------------------------------------------------------------------
# R13: vertex through a boundary edge
# ---------------------------------------------------------------------------


def _enum_r13(d, ctx, out):
    amax = ctx["max_arity"]
    for vname in d.graph_vertices():
        nd = d.nodes[vname]
        if nd.arity > amax:
            continue
        dd = nd.arity
        for edge in EDGES:
            n = _slot_count(d, edge)
            if n < dd:
                continue
            asc = _EDGE_ASCENDS[edge]
            for i in range(dd):
                e0 = d.pairs.get(("n", vname, i))
                if e0 is None or e0[0] != "p" or e0[1] != edge:
                    continue
                k0 = e0[2]
                ok = True
                for t in range(dd):
                    s = (k0 + t) if asc else (k0 - t)
                    if d.pairs.get(("n", vname, (i + t) % dd)) != ("p", edge, s):
                        ok = False
                        break
                if not ok:
                    continue
                lo = k0 if asc else k0 - dd + 1
                if lo < 0 or lo + dd > n:
                    continue
                out.append(MoveApplication("R13", "carry", (vname, edge, i, lo), "f"))
        # push through a boundary segment facing one of the vertex corners
        for fc, corners in ctx["faces"]:
            for (name, pin, pout, idx) in corners:
                if name != vname:
                    continue
                for (edge, k, f1, f2, bdart) in ctx["bdarts"]:
                    if bdart in fc:
                        for flip in (0, 1):
                            out.append(
                                MoveApplication(
                                    "R13", f"push_f{flip}", (vname, pin, edge, k), "b"
                                )
                            )
        if not _same_component(d, ("n", vname, 0), "boundary"):
            for (edge, k, f1, f2, bdart) in ctx["bdarts"]:
                for pin in range(dd):
                    for flip in (0, 1):
                        out.append(
                            MoveApplication(
                                "R13", f"push_f{flip}", (vname, pin, edge, k), "b"
                            )
                        )


def _apply_r13(d, m):
    b = Builder(d)
    if m.direction == "f":
        vname, edge, i, lo = m.site
        nd = _node(d, vname)
        dd = nd.arity
        asc = _EDGE_ASCENDS[edge]
        k0 = lo if asc else lo + dd - 1
        handles = []
        for t in range(dd):
            s = (k0 + t) if asc else (k0 - t)
            _require(
                d.pairs.get(("n", vname, (i + t) % dd)) == ("p", edge, s),
                "fan does not match",
            )
        for t in range(dd):
            s = (k0 + t) if asc else (k0 - t)
            g = b.cut(puncture_partner(("p", edge, s)))
            b.delete_arc(("n", vname, (i + t) % dd), ("p", edge, s))
            handles.append(g)
        pk = _pk(edge)
        for s in range(lo + dd - 1, lo - 1, -1):
            b.remove_slot(pk, s)
        for t in range(dd):
            b.connect(("n", vname, (i + t) % dd), handles[t])
        return b.freeze()
    vname, j, edge, k = m.site
    nd = _node(d, vname)
    dd = nd.arity
    if _same_component(d, ("n", vname, 0), "boundary"):
        ok = False
        for fc, corners in ctx_faces(d):
            for (name, pin, pout, idx) in corners:
                if name != vname or pin != j:
                    continue
                for (e2, k2, f1, f2, bdart) in _boundary_darts(d):
                    if e2 == edge and k2 == k and bdart in fc:
                        ok = True
        _require(ok, "vertex does not face the boundary segment")
    pedge = puncture_partner(("p", edge, 0))[1]

    def wire(germ_edge):
        near_edge = pedge if germ_edge == pedge else edge
        bb = Builder(d)
        asc_far = _EDGE_ASCENDS[germ_edge]
        bb.insert_slots(_pk(edge), k, dd)
        handles = []
        for t in range(dd):
            handles.append(bb.cut(("n", vname, (j + t) % dd)))
        other = puncture_partner(("p", germ_edge, 0))[1]
        for t in range(dd):
            # germs attach their edge of the pair in its ascending frame
            s = (k + t) if asc_far else (k + dd - 1 - t)
            bb.connect(("n", vname, (j + t) % dd), ("p", germ_edge, s))
            bb.connect(("p", other, s), handles[t])
        return bb.freeze()

    flip = int(m.variant[-1]) if m.variant.startswith("push_f") else 0
    cands = [lambda: wire(pedge), lambda: wire(edge)]
    if flip:
        cands.reverse()
    return _first_planar(*cands)


# ---------------------------------------------------------------------------
# Public API
# ---------------------------------------------------------------------------

_ENUM: dict[str, Callable] = {
    "R1": _enum_r1,
    "R2": _enum_r2,
    "R3": _enum_r3,
    "R4": _enum_r4,
    "R5": _enum_r5,
    "R6": _enum_r6,
    "R7": _enum_r7,
    "R8": _enum_r8,
    "R9": _enum_r9,
    "R10": _enum_r10,
    "R11": _enum_r11,
    "R12": _enum_r12,
    "R13": _enum_r13,
}

_APPLY: dict[str, Callable] = {
    "R1": _apply_r1,
    "R2": _apply_r2,
    "R3": _apply_r3,
    "R4": _apply_r4,
    "R5": _apply_r5,
    "R6": _apply_r6,
    "R7": _apply_r7,
    "R8": _apply_r8,
    "R9": _apply_r9,
    "R10": _apply_r10,
    "R11": _apply_r11,
    "R12": _apply_r12,
    "R13": _apply_r13,
}

DEFAULT_MAX_ARITY = 8


def enumerate_moves(
    d: SquareDiagram,
    kinds: Optional[Iterable[str]] = None,
    max_arity: int = DEFAULT_MAX_ARITY,
) -> list[MoveApplication]:
    """All applications of all move variants matching ``d``, in canonical order."""
    kinds = tuple(kinds) if kinds is not None else MOVE_KINDS
    ctx = {
        "faces": ctx_faces(d),
        "bdarts": _boundary_darts(d),
        "max_arity": max_arity,
    }
    out: list[MoveApplication] = []
    for kind in MOVE_KINDS:
        if kind not in kinds:
            continue
        _ENUM[kind](d, ctx, out)
    uniq = sorted(set(out), key=MoveApplication.sort_key)
    return uniq


def apply_move(d: SquareDiagram, m: MoveApplication) -> SquareDiagram:
    """Apply a move, verifying its pattern still matches; raises MoveError."""
    if m.kind not in _APPLY:
        raise MoveError(f"unknown move kind {m.kind}")
    return _APPLY[m.kind](d, m)


def crossing_change(d: SquareDiagram, name: str) -> SquareDiagram:
    """Invert the over/under type of one crossing (an untangling operation)."""
    nd = d.nodes.get(name)
    if nd is None or nd.kind != "X":
        raise MoveError(f"{name} is not a crossing")
    nodes = dict(d.nodes)
    nodes[name] = Node("X", 4, over=1 - nd.over)
    return SquareDiagram(
        nodes, d.arcs(), d.n_lr, d.n_bt, d.free_loops, d.axis
    )


# Crossing-count deltas per kind and direction, used by tests and the search
# move filters; None means variable (R10 depends on run length and arity).
CROSSING_DELTAS = {
    ("R1", "f"): (-1,),
    ("R1", "b"): (1,),
    ("R2", "f"): (-2,),
    ("R2", "b"): (2,),
    ("R3", "t"): (0,),
    ("R4", "f"): (-2,),
    ("R4", "b"): (2,),
    ("R5", "f"): (0,),
    ("R5", "b"): (0,),
    ("R6", "f"): (0,),
    ("R6", "b"): (0,),
    ("R7", "t"): (0,),
    ("R8", "t"): (0,),
    ("R9", "f"): (0,),
    ("R9", "t"): (0,),
    ("R9", "b"): (0,),
    ("R10", "t"): None,
    ("R10", "f"): None,
    ("R10", "b"): None,
    ("R11", "f"): (-1,),
    ("R11", "b"): (1,),
    ("R12", "f"): (0,),
    ("R12", "b"): (0,),
    ("R13", "f"): (0,),
    ("R13", "b"): (0,),
}


# ---------------------------------------------------------------------------
# Move catalogue (golden before/after pairs shipped as data)
# ---------------------------------------------------------------------------

_CATALOGUE: Optional[list[dict]] = None


def move_catalogue() -> list[dict]:
    """Load the shipped catalogue of golden move examples.

    Each entry holds a move descriptor plus before/after documents in pdg
    syntax; the test suite replays every entry through the engine so the
    catalogue stays a faithful, diffable description of the move set.
    """
    global _CATALOGUE
    if _CATALOGUE is None:
        text = (
            resources.files("periodica")
            .joinpath("data/moves_catalogue.txt")
            .read_text()
        )
        entries = []
        for block in text.split("\n%%\n"):
            block = block.strip()
            if not block or block.startswith("#"):
                continue
            head, before, after = block.split("\n--\n")
            entries.append(
                {
                    "move": MoveApplication.from_json(json.loads(head)),
                    "before": before.strip() + "\n",
                    "after": after.strip() + "\n",
                }
            )
        _CATALOGUE = entries
    return _CATALOGUE
