"""Line-based text format for square diagrams and tridiagrams.

The format is UTF-8 and line oriented::

    pdg 1
    axis 3
    O 1
    X c0 c0.0 c0.1 c0.2 c0.3 over=02
    V v0 v0.0 v0.1 v0.2
    M m0 m0.0 m0.1
    P L 0 c0.2
    P R 0 v0.1
    A c0.0 c0.1
    A m0.0 m0.1

``X``/``V``/``M`` lines declare nodes and name their ports in rotation
order (counterclockwise).  ``P`` lines declare boundary punctures and their
attached arc end; ``A`` lines connect two ports.  An arc running from one
puncture straight to another is written with mutually referencing ``P``
lines whose attachment field is ``<edge>.<slot>``.  ``O`` counts closed
loops that carry no nodes or punctures at all.  ``#`` starts a comment.
Tridiagram documents hold three ``--- diagram <axis>`` sections.

Parsing is purely syntactic; semantic problems (dangling ports, broken slot
pairing) are left to ``validate_diagram``.  Serialisation is deterministic,
so serialise(parse(serialise(d))) is bit-identical to serialise(d).
"""

from __future__ import annotations

from .diagram import EDGES, End, Node, SquareDiagram, Tridiagram


class PdgSyntaxError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


_RESERVED_IDS = set(EDGES)


def _parse_section(lines: list[tuple[int, str]], axis=None) -> SquareDiagram:
    nodes: dict[str, Node] = {}
    port_names: dict[str, End] = {}
    free_loops = 0
    # (endpoint, endpoint) pairs as written; puncture cross-references are
    # resolved after all declarations are known.
    raw_links: list[tuple[int, object, object]] = []
    punctures: dict[tuple[str, int], tuple[int, str]] = {}

    def declare_ports(lineno: int, name: str, tokens: list[str]) -> None:
        for idx, tok in enumerate(tokens):
            if tok in port_names:
                raise PdgSyntaxError(lineno, f"port token {tok!r} declared twice")
            port_names[tok] = ("n", name, idx)

    for lineno, line in lines:
        parts = line.split()
        key = parts[0]
        if key == "axis":
            if len(parts) != 2 or parts[1] not in ("1", "2", "3"):
                raise PdgSyntaxError(lineno, "axis must be 1, 2 or 3")
            axis = int(parts[1])
        elif key == "O":
            if len(parts) != 2 or not parts[1].isdigit():
                raise PdgSyntaxError(lineno, "O expects a loop count")
            free_loops = int(parts[1])
        elif key == "X":
            if len(parts) != 7 or not parts[6].startswith("over="):
                raise PdgSyntaxError(lineno, "X expects: id, 4 ports, over=02|13")
            name = parts[1]
            over_tok = parts[6][5:]
            if over_tok not in ("02", "13"):
                raise PdgSyntaxError(lineno, f"bad over pair {over_tok!r}")
            _check_id(lineno, name, nodes)
            nodes[name] = Node("X", 4, over=0 if over_tok == "02" else 1)
            declare_ports(lineno, name, parts[2:6])
        elif key == "V":
            if len(parts) < 3:
                raise PdgSyntaxError(lineno, "V expects an id and at least one port")
            name = parts[1]
            toks = parts[2:]
            label = None
            if toks and toks[-1].startswith("label="):
                label = toks[-1][6:]
                toks = toks[:-1]
            if not toks:
                raise PdgSyntaxError(lineno, "V expects at least one port")
            _check_id(lineno, name, nodes)
            nodes[name] = Node("V", len(toks), label=label)
            declare_ports(lineno, name, toks)
        elif key == "M":
            if len(parts) != 4:
                raise PdgSyntaxError(lineno, "M expects: id, dot port, circle port")
            name = parts[1]
            _check_id(lineno, name, nodes)
            nodes[name] = Node("M", 2)
            declare_ports(lineno, name, parts[2:4])
        elif key == "P":
            if len(parts) != 4:
                raise PdgSyntaxError(lineno, "P expects: edge, slot, attachment")
            edge = parts[1]
            if edge not in EDGES:
                raise PdgSyntaxError(lineno, f"edge must be one of L R B T, got {edge!r}")
            if not parts[2].isdigit():
                raise PdgSyntaxError(lineno, f"slot must be a non-negative integer")
            slot = int(parts[2])
            if (edge, slot) in punctures:
                raise PdgSyntaxError(lineno, f"puncture {edge}[{slot}] declared twice")
            punctures[(edge, slot)] = (lineno, parts[3])
        elif key == "A":
            if len(parts) != 3:
                raise PdgSyntaxError(lineno, "A expects two port references")
            raw_links.append((lineno, parts[1], parts[2]))
        else:
            raise PdgSyntaxError(lineno, f"unknown directive {key!r}")

    def resolve(lineno: int, tok: str) -> End:
        if tok in port_names:
            return port_names[tok]
        if "." in tok:
            edge, _, s = tok.partition(".")
            if edge in EDGES and s.isdigit() and (edge, int(s)) in punctures:
                return ("p", edge, int(s))
        raise PdgSyntaxError(lineno, f"unknown port reference {tok!r}")

    arcs: set[tuple[End, End]] = set()
    arc_multiset: list[tuple[End, End]] = []
    for (edge, slot), (lineno, att) in sorted(punctures.items()):
        here: End = ("p", edge, slot)
        other = resolve(lineno, att)
        if other == here:
            raise PdgSyntaxError(lineno, f"puncture {edge}[{slot}] attached to itself")
        key = tuple(sorted((here, other)))
        if key not in arcs:
            arcs.add(key)
            arc_multiset.append(key)
        # mutually-referencing P lines describe the same arc once
    for lineno, ta, tb in raw_links:
        a = resolve(lineno, ta)
        b = resolve(lineno, tb)
        if a == b:
            raise PdgSyntaxError(lineno, "arc with identical endpoints")
        arc_multiset.append(tuple(sorted((a, b))))

    n_lr = 1 + max((s for (e, s) in punctures if e in ("L", "R")), default=-1)
    n_bt = 1 + max((s for (e, s) in punctures if e in ("B", "T")), default=-1)
    return SquareDiagram(
        nodes, arc_multiset, n_lr=n_lr, n_bt=n_bt, free_loops=free_loops, axis=axis
    )


def _check_id(lineno: int, name: str, nodes: dict) -> None:
    if name in nodes:
        raise PdgSyntaxError(lineno, f"node id {name!r} declared twice")
    if name in _RESERVED_IDS:
        raise PdgSyntaxError(lineno, f"node id {name!r} is reserved")


def parse(text: str) -> SquareDiagram | Tridiagram:
    """Parse a pdg document into a diagram or tridiagram."""
    lines: list[tuple[int, str]] = []
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append((i, line))
    if not lines:
        raise PdgSyntaxError(1, "empty document")
    lineno, header = lines[0]
    if header != "pdg 1":
        raise PdgSyntaxError(lineno, f"expected header 'pdg 1', got {header!r}")
    body = lines[1:]

    sections: list[tuple[int, int, list[tuple[int, str]]]] = []
    current: list[tuple[int, str]] | None = None
    leading: list[tuple[int, str]] = []
    for lineno, line in body:
        if line.startswith("---"):
            parts = line.split()
            if len(parts) != 3 or parts[1] != "diagram" or parts[2] not in "123":
                raise PdgSyntaxError(lineno, "expected '--- diagram <1|2|3>'")
            current = []
            sections.append((lineno, int(parts[2]), current))
        elif current is not None:
            current.append((lineno, line))
        else:
            leading.append((lineno, line))

    if not sections:
        return _parse_section(body)
    if leading:
        raise PdgSyntaxError(leading[0][0], "content before first diagram section")
    axes = [ax for _, ax, _ in sections]
    if sorted(axes) != [1, 2, 3]:
        raise PdgSyntaxError(
            sections[0][0], f"tridiagram needs sections for axes 1, 2, 3, got {axes}"
        )
    by_axis = {}
    for _, ax, sec in sections:
        by_axis[ax] = _parse_section(sec, axis=ax)
    return Tridiagram((by_axis[1], by_axis[2], by_axis[3]))


def parse_diagram(text: str) -> SquareDiagram:
    d = parse(text)
    if isinstance(d, Tridiagram):
        raise PdgSyntaxError(1, "expected a single diagram, found a tridiagram")
    return d


def _serialize_section(d: SquareDiagram, with_axis: bool = True) -> list[str]:
    out: list[str] = []
    if with_axis and d.axis is not None:
        out.append(f"axis {d.axis}")
    if d.free_loops:
        out.append(f"O {d.free_loops}")

    def port_tok(e: End) -> str:
        # node ports and puncture references share the <name>.<index> shape
        return f"{e[1]}.{e[2]}"

    for kind in ("X", "V", "M"):
        for name in sorted(n for n, nd in d.nodes.items() if nd.kind == kind):
            nd = d.nodes[name]
            ports = " ".join(f"{name}.{k}" for k in range(nd.arity))
            if kind == "X":
                over = "02" if nd.over == 0 else "13"
                out.append(f"X {name} {ports} over={over}")
            elif kind == "V":
                lab = f" label={nd.label}" if nd.label else ""
                out.append(f"V {name} {ports}{lab}")
            else:
                out.append(f"M {name} {ports}")

    emitted: set[tuple[End, End]] = set()
    for edge in EDGES:
        n = d.n_lr if edge in ("L", "R") else d.n_bt
        for slot in range(n):
            e: End = ("p", edge, slot)
            peer = d.pairs.get(e)
            if peer is None:
                continue
            out.append(f"P {edge} {slot} {port_tok(peer)}")
            emitted.add(tuple(sorted((e, peer))))
    for a, b in d._arc_list:
        if a[0] == "p" or b[0] == "p":
            continue  # covered by P lines
        out.append(f"A {port_tok(a)} {port_tok(b)}")
    return out


def serialize(obj: SquareDiagram | Tridiagram) -> str:
    """Serialise to the canonical text form (deterministic byte-for-byte)."""
    lines = ["pdg 1"]
    if isinstance(obj, Tridiagram):
        for ax in (1, 2, 3):
            lines.append(f"--- diagram {ax}")
            lines.extend(_serialize_section(obj.diagrams[ax - 1], with_axis=False))
    else:
        lines.extend(_serialize_section(obj))
    return "\n".join(lines) + "\n"
