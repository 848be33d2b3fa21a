"""CSMP instances, the v1 text format, and terminal labelling."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Mapping

from .graph import Graph, RootedGraph


class ParseError(ValueError):
    def __init__(self, lineno: int | None, msg: str):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {msg}" if lineno else msg)


@dataclass(frozen=True)
class Instance:
    """Graph plus robots.  Robot ids: destination robots ``0..|M|-1`` in order,
    then free robots."""

    graph: Graph
    dest: tuple[tuple[int, int], ...]
    free: tuple[int, ...] = ()
    budget: int = 0
    planar: bool = False

    def __post_init__(self):
        object.__setattr__(self, "dest", tuple((int(s), int(t)) for s, t in self.dest))
        object.__setattr__(self, "free", tuple(int(s) for s in self.free))
        problems = check_instance(self)
        if problems:
            raise ValueError(problems[0])

    @property
    def k(self) -> int:
        return len(self.dest) + len(self.free)

    @property
    def starts(self) -> tuple[int, ...]:
        return tuple(s for s, _ in self.dest) + self.free

    @property
    def targets(self) -> tuple[int, ...]:
        return tuple(t for _, t in self.dest)

    def terminals(self) -> set[int]:
        return set(self.starts) | set(self.targets)

    def is_dest(self, robot: int) -> bool:
        return robot < len(self.dest)

    def with_budget(self, budget: int) -> "Instance":
        return replace(self, budget=budget)

    def remapped(self, graph: Graph, remap: Mapping[int, int]) -> "Instance":
        """Same robots on a new graph, positions translated through ``remap``."""
        return Instance(graph,
                        tuple((remap[s], remap[t]) for s, t in self.dest),
                        tuple(remap[s] for s in self.free),
                        self.budget, self.planar)


def check_instance(inst: Instance) -> list[str]:
    n = inst.graph.n
    out = []
    starts = inst.starts
    for v in list(starts) + list(inst.targets):
        if not 0 <= v < n:
            out.append(f"vertex {v} out of range")
    if len(set(starts)) != len(starts):
        out.append("duplicate start")
    if len(set(inst.targets)) != len(inst.targets):
        out.append("duplicate target")
    if inst.k > n:
        out.append("more robots than vertices")
    if inst.budget < 0:
        out.append("negative budget")
    return out


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def parse_instance(text: str | bytes) -> Instance:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    header_seen = False
    n = None
    edges: list[tuple[int, int]] = []
    edge_set = set()
    dest: list[tuple[int, int]] = []
    free: list[int] = []
    budget = None
    planar = False
    starts_seen: dict[int, int] = {}
    targets_seen: dict[int, int] = {}

    def vertex(tok, lineno):
        try:
            v = int(tok)
        except ValueError:
            raise ParseError(lineno, f"bad vertex id {tok!r}") from None
        if n is None:
            raise ParseError(lineno, "vertex used before 'n' line")
        if not 0 <= v < n:
            raise ParseError(lineno, f"vertex {v} out of range")
        return v

    def start(v, lineno):
        if v in starts_seen:
            raise ParseError(lineno, f"duplicate start vertex {v} (first on line {starts_seen[v]})")
        starts_seen[v] = lineno

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip(raw)
        if not line:
            continue
        tok = line.split()
        if not header_seen:
            if tok != ["CSMP", "1"]:
                raise ParseError(lineno, "missing header 'CSMP 1'")
            header_seen = True
            continue
        kind, args = tok[0], tok[1:]
        want = {"n": 1, "e": 2, "m": 2, "f": 1, "L": 1, "planar": 1}
        if kind not in want:
            raise ParseError(lineno, f"unknown record {kind!r}")
        if len(args) != want[kind]:
            raise ParseError(lineno, f"'{kind}' expects {want[kind]} field(s)")
        if kind == "n":
            if n is not None:
                raise ParseError(lineno, "duplicate 'n' line")
            try:
                n = int(args[0])
            except ValueError:
                raise ParseError(lineno, "bad vertex count") from None
            if n < 0:
                raise ParseError(lineno, "negative vertex count")
        elif kind == "e":
            u, v = vertex(args[0], lineno), vertex(args[1], lineno)
            if u == v:
                raise ParseError(lineno, f"self-loop at {u}")
            key = (min(u, v), max(u, v))
            if key in edge_set:
                raise ParseError(lineno, f"duplicate edge {key[0]} {key[1]}")
            edge_set.add(key)
            edges.append(key)
        elif kind == "m":
            if free:
                raise ParseError(lineno, "destination robots must precede free robots")
            s, t = vertex(args[0], lineno), vertex(args[1], lineno)
            start(s, lineno)
            if t in targets_seen:
                raise ParseError(lineno, f"duplicate target vertex {t}")
            targets_seen[t] = lineno
            dest.append((s, t))
        elif kind == "f":
            s = vertex(args[0], lineno)
            start(s, lineno)
            free.append(s)
        elif kind == "L":
            if budget is not None:
                raise ParseError(lineno, "duplicate 'L' line")
            try:
                budget = int(args[0])
            except ValueError:
                raise ParseError(lineno, "bad budget") from None
            if budget < 0:
                raise ParseError(lineno, "negative budget")
        else:
            if args[0] not in ("0", "1"):
                raise ParseError(lineno, "planar must be 0 or 1")
            planar = args[0] == "1"
    if not header_seen:
        raise ParseError(1, "missing header 'CSMP 1'")
    if n is None:
        raise ParseError(None, "missing 'n' line")
    if budget is None:
        raise ParseError(None, "missing 'L' line")
    if len(dest) + len(free) > n:
        raise ParseError(None, "more robots than vertices")
    return Instance(Graph(n, edges), tuple(dest), tuple(free), budget, planar)


def serialize_instance(inst: Instance) -> str:
    lines = ["CSMP 1", f"n {inst.graph.n}"]
    lines += [f"e {u} {v}" for u, v in inst.graph.sorted_edges()]
    lines += [f"m {s} {t}" for s, t in inst.dest]
    lines += [f"f {s}" for s in inst.free]
    lines.append(f"L {inst.budget}")
    lines.append(f"planar {int(inst.planar)}")
    return "\n".join(lines) + "\n"


def relabel_terminals(inst: Instance) -> RootedGraph:
    """Rooted copy of the graph with every terminal a uniquely labelled root.

    Starts of destination robots get ``1..|M|``, their targets
    ``|M|+1..2|M|``, free starts follow.  A vertex that is a start and also
    some other robot's target keeps the start label; the target label is
    recorded in ``roles``.
    """
    m = len(inst.dest)
    labels: dict[int, int] = {}
    roles: dict[int, tuple[int, ...]] = {}
    for i, (s, _) in enumerate(inst.dest):
        labels[s] = i + 1
    for j, s in enumerate(inst.free):
        labels[s] = 2 * m + j + 1
    for i, (_, t) in enumerate(inst.dest):
        lab = m + i + 1
        if t in labels:
            roles[t] = roles.get(t, ()) + (lab,)
        else:
            labels[t] = lab
    return RootedGraph(inst.graph, labels, roles)


def nonterminal_label(inst: Instance) -> int:
    """The shared label ``p+1`` carried by every non-terminal."""
    return 2 * len(inst.dest) + len(inst.free) + 1


def instance_from_edges(n: int, edges: Iterable, dest=(), free=(), budget=0, planar=False) -> Instance:
    return Instance(Graph(n, edges), tuple(dest), tuple(free), budget, planar)
