"""Serial sliding-move schedules: replay, validation, text format, and the
vertex classes (waiting / intersection / important) derived from a schedule."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .graph import Graph
from .instance import Instance


class ScheduleStructureError(ValueError):
    """The schedule refers to robots or vertices that do not exist."""


@dataclass(frozen=True)
class Move:
    robot: int
    path: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "path", tuple(self.path))

    @property
    def origin(self) -> int:
        return self.path[0]

    @property
    def dest(self) -> int:
        return self.path[-1]


@dataclass(frozen=True)
class Schedule:
    moves: tuple[Move, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "moves", tuple(self.moves))

    @property
    def makespan(self) -> int:
        return len(self.moves)

    def __len__(self):
        return len(self.moves)

    def __iter__(self):
        return iter(self.moves)

    def __getitem__(self, i):
        return self.moves[i]

    def prefix(self, j: int) -> "Schedule":
        return Schedule(self.moves[:j])


@dataclass(frozen=True)
class Violation:
    step: int
    rule: str
    message: str

    def __str__(self):
        return f"step {self.step}: {self.rule}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    violation: Violation | None = None

    @property
    def valid(self) -> bool:
        return self.violation is None

    def __bool__(self):
        return self.valid


def _check_structure(inst: Instance, sched: Schedule) -> None:
    for t, mv in enumerate(sched.moves, 1):
        if not 0 <= mv.robot < inst.k:
            raise ScheduleStructureError(f"step {t}: unknown robot {mv.robot}")
        for v in mv.path:
            if not 0 <= v < inst.graph.n:
                raise ScheduleStructureError(f"step {t}: unknown vertex {v}")


def _step_problem(g: Graph, pos: list[int], occupied: dict[int, int], mv: Move):
    path = mv.path
    if len(path) < 2:
        return "short-path", "path has length 0"
    if path[0] != pos[mv.robot]:
        return "wrong-origin", f"robot {mv.robot} is at {pos[mv.robot]}, path starts at {path[0]}"
    if len(set(path)) != len(path):
        return "not-simple", "path repeats a vertex"
    for a, b in zip(path, path[1:]):
        if not g.has_edge(a, b):
            return "not-a-path", f"no edge {a}-{b}"
    for v in path[1:]:
        if v in occupied:
            return "collision", f"path hits stationary robot at {v}"
    return None


def validate(inst: Instance, sched: Schedule, check_budget: bool = True,
             check_targets: bool = True) -> ValidationReport:
    """Replay ``sched`` and report the first broken rule.

    Raises ``ScheduleStructureError`` for unknown robots or vertices.
    """
    _check_structure(inst, sched)
    pos = list(inst.starts)
    occupied = {v: r for r, v in enumerate(pos)}
    for t, mv in enumerate(sched.moves, 1):
        if check_budget and t > inst.budget:
            return ValidationReport(Violation(t, "over-budget", f"move {t} exceeds budget {inst.budget}"))
        del occupied[pos[mv.robot]]
        bad = _step_problem(inst.graph, pos, occupied, mv)
        if bad:
            return ValidationReport(Violation(t, *bad))
        pos[mv.robot] = mv.dest
        occupied[mv.dest] = mv.robot
    if check_targets:
        for r, (_, tgt) in enumerate(inst.dest):
            if pos[r] != tgt:
                return ValidationReport(Violation(len(sched.moves), "unfinished",
                                                  f"robot {r} ends at {pos[r]}, target {tgt}"))
    return ValidationReport()


def positions(inst: Instance, sched: Schedule) -> list[tuple[int, ...]]:
    """Robot positions after each step (index 0 is the start).  Requires every
    move to be legal; budget and targets are not checked."""
    rep = validate(inst, sched, check_budget=False, check_targets=False)
    if not rep.valid:
        raise ValueError(f"schedule not replayable: {rep.violation}")
    pos = list(inst.starts)
    out = [tuple(pos)]
    for mv in sched.moves:
        pos[mv.robot] = mv.dest
        out.append(tuple(pos))
    return out


# --- text format ---------------------------------------------------------------


def serialize_schedule(sched: Schedule) -> str:
    lines = ["SCHEDULE 1"]
    for t, mv in enumerate(sched.moves, 1):
        lines.append(f"s {t} {mv.robot} " + " ".join(map(str, mv.path)))
    return "\n".join(lines) + "\n"


def parse_schedule(text: str | bytes) -> Schedule:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    moves = []
    header = False
    last = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if not header:
            if tok != ["SCHEDULE", "1"]:
                raise ScheduleStructureError(f"line {lineno}: missing header 'SCHEDULE 1'")
            header = True
            continue
        if tok[0] != "s" or len(tok) < 4:
            raise ScheduleStructureError(f"line {lineno}: expected 's <step> <robot> <v0> ...'")
        try:
            step, robot, *path = map(int, tok[1:])
        except ValueError:
            raise ScheduleStructureError(f"line {lineno}: non-integer field") from None
        if step <= last:
            raise ScheduleStructureError(f"line {lineno}: time steps must increase")
        last = step
        moves.append(Move(robot, tuple(path)))
    if not header:
        raise ScheduleStructureError("missing header 'SCHEDULE 1'")
    return Schedule(tuple(moves))


# --- traversed subgraph and vertex classes -----------------------------------


def _prefix(sched: Schedule, j: int | None) -> tuple[Move, ...]:
    if j is None:
        return sched.moves
    if not 0 <= j <= len(sched):
        raise ValueError(f"prefix {j} outside 0..{len(sched)}")
    return sched.moves[:j]


def traversed_edges(sched: Schedule, j: int | None = None) -> set[tuple[int, int]]:
    out = set()
    for mv in _prefix(sched, j):
        for a, b in zip(mv.path, mv.path[1:]):
            out.add((a, b) if a < b else (b, a))
    return out


def traversed_subgraph(inst: Instance, sched: Schedule, j: int | None = None) -> Graph:
    """G_S (or its prefix version G_{S,j}) on the original vertex ids."""
    positions(inst, sched)
    return inst.graph.edge_subgraph(traversed_edges(sched, j))


def waiting_vertices(inst: Instance, sched: Schedule, j: int) -> set[int]:
    """Vertices where some robot stands at the end of a step in ``1..j``
    (for ``j = 0``: the initial positions)."""
    pos = positions(inst, sched)
    if not 0 <= j < len(pos):
        raise ValueError(f"prefix {j} outside 0..{len(pos) - 1}")
    if j == 0:
        return set(pos[0])
    out: set[int] = set()
    for step in range(1, j + 1):
        out.update(pos[step])
    return out


def _degrees(edges) -> dict[int, int]:
    deg: dict[int, int] = {}
    for a, b in edges:
        deg[a] = deg.get(a, 0) + 1
        deg[b] = deg.get(b, 0) + 1
    return deg


def intersection_vertices(inst: Instance, sched: Schedule, j: int) -> set[int]:
    positions(inst, sched)
    return {v for v, d in _degrees(traversed_edges(sched, j)).items() if d >= 3}


def important_vertices(inst: Instance, sched: Schedule, j: int) -> set[int]:
    return inst.terminals() | waiting_vertices(inst, sched, j) | intersection_vertices(inst, sched, j)


def corridor_paths(inst: Instance, sched: Schedule, j: int) -> list[tuple[int, ...]]:
    """Paths of G_{S,j} joining two distinct important vertices through
    unimportant interior vertices (each reported once, smaller end first)."""
    edges = traversed_edges(sched, j)
    imp = important_vertices(inst, sched, j)
    adj: dict[int, list[int]] = {}
    for a, b in edges:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    out = set()
    for a in adj:
        if a not in imp:
            continue
        for nb in adj[a]:
            path = [a, nb]
            while path[-1] not in imp:
                nxt = [y for y in adj[path[-1]] if y != path[-2]]
                if len(nxt) != 1:
                    break
                path.append(nxt[0])
            if path[-1] in imp and path[-1] != a:
                p = tuple(path) if path[0] < path[-1] else tuple(reversed(path))
                out.add(p)
    return sorted(out)


def crossing_points(p1: Sequence[int], p2: Sequence[int]) -> set[int]:
    """Vertices of degree >= 3 in the union of the two paths' edges."""
    edges = set()
    for p in (p1, p2):
        for a, b in zip(p, p[1:]):
            edges.add((a, b) if a < b else (b, a))
    return {v for v, d in _degrees(edges).items() if d >= 3}


def schedule_from_paths(moves: Iterable[tuple[int, Sequence[int]]]) -> Schedule:
    return Schedule(tuple(Move(r, tuple(p)) for r, p in moves))
