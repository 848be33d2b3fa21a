"""Exact minimum-makespan search.

States keep destination robots labelled and treat free robots as an
unlabelled set (stored as a bitmask).  A move is identified by (origin,
destination); the concrete path is only computed when a schedule is
reconstructed, as the lexicographically smallest shortest free path.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .graph import bfs_distances, components, shortest_path
from .instance import Instance
from .schedule import Move, Schedule

DEFAULT_MAX_STATES = 10**7


@dataclass(frozen=True)
class Configuration:
    dest: tuple[int, ...]
    blockers: frozenset[int]

    @classmethod
    def initial(cls, inst: Instance) -> "Configuration":
        return cls(tuple(s for s, _ in inst.dest), frozenset(inst.free))

    def occupied(self) -> set[int]:
        return set(self.dest) | set(self.blockers)


@dataclass
class SearchStats:
    expanded: int = 0
    generated: int = 0
    depth: int = 0
    seconds: float = 0.0


@dataclass
class SolveResult:
    status: str  # solved | no | infeasible | cap-exceeded
    schedule: Schedule | None = None
    stats: SearchStats = field(default_factory=SearchStats)

    @property
    def makespan(self) -> int | None:
        return None if self.schedule is None else len(self.schedule)

    def yes_within(self, budget: int) -> bool:
        return self.status == "solved" and self.makespan <= budget


class _Space:
    """Move generation over (dest tuple, blocker mask) states."""

    def __init__(self, inst: Instance):
        self.inst = inst
        self.n = inst.graph.n
        self.adj = [inst.graph.adj(v) for v in range(self.n)]
        self.targets = tuple(t for _, t in inst.dest)
        self.start = (tuple(s for s, _ in inst.dest), _mask(inst.free))

    def goal(self, state) -> bool:
        return state[0] == self.targets

    def moves(self, state):
        """Yield ``(origin, dest, new_state)`` in (robot, destination) order."""
        dest, mask = state
        occ = mask
        for v in dest:
            occ |= 1 << v
        comp = [-1] * self.n
        members: list[list[int]] = []
        adj = self.adj
        for v in range(self.n):
            if comp[v] >= 0 or occ >> v & 1:
                continue
            cid = len(members)
            comp[v] = cid
            group = [v]
            stack = [v]
            while stack:
                x = stack.pop()
                for y in adj[x]:
                    if comp[y] < 0 and not occ >> y & 1:
                        comp[y] = cid
                        group.append(y)
                        stack.append(y)
            members.append(group)

        def reach(v):
            cids = {comp[y] for y in adj[v] if comp[y] >= 0}
            out = []
            for c in cids:
                out.extend(members[c])
            out.sort()
            return out

        for i, v in enumerate(dest):
            for w in reach(v):
                yield v, w, (dest[:i] + (w,) + dest[i + 1:], mask)
        m = mask
        while m:
            low = m & -m
            v = low.bit_length() - 1
            m ^= low
            base = mask ^ low
            for w in reach(v):
                yield v, w, (dest, base | (1 << w))


def _mask(vertices) -> int:
    out = 0
    for v in vertices:
        out |= 1 << v
    return out


def _unmask(mask: int) -> frozenset[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return frozenset(out)


def schedule_from_steps(inst: Instance, steps) -> Schedule:
    """Turn (origin, destination) pairs into moves with concrete paths."""
    pos = list(inst.starts)
    where = {v: r for r, v in enumerate(pos)}
    moves = []
    for origin, dest in steps:
        robot = where.pop(origin)
        free = [v for v in range(inst.graph.n) if v not in where]
        path = shortest_path(inst.graph, origin, dest, allowed=free)
        if path is None:
            raise RuntimeError(f"no free path {origin}->{dest}")
        moves.append(Move(robot, tuple(path)))
        where[dest] = robot
        pos[robot] = dest
    return Schedule(tuple(moves))


def successors(inst: Instance, c: Configuration) -> list[tuple[Move, Configuration]]:
    """Every single move from ``c``; blockers are addressed by their vertex."""
    space = _Space(inst)
    state = (c.dest, _mask(c.blockers))
    occupied = c.occupied()
    owner = {v: i for i, v in enumerate(c.dest)}
    out = []
    seen = set()
    for origin, dest, (d2, m2) in space.moves(state):
        nxt = Configuration(d2, _unmask(m2))
        if nxt in seen:
            continue
        seen.add(nxt)
        free = [v for v in range(inst.graph.n) if v not in occupied]
        path = shortest_path(inst.graph, origin, dest, allowed=free)
        robot = owner.get(origin, -1)  # -1 marks "the blocker standing on origin"
        out.append((Move(robot, tuple(path)), nxt))
    return out


def solve_optimal(inst: Instance, cap_depth: int | None = None,
                  max_states: int = DEFAULT_MAX_STATES) -> SolveResult:
    """Breadth-first search for a minimum-makespan schedule with at most
    ``cap_depth`` moves (default: the instance budget)."""
    t0 = time.perf_counter()
    cap = inst.budget if cap_depth is None else cap_depth
    space = _Space(inst)
    stats = SearchStats()
    start = space.start
    if space.goal(start):
        stats.seconds = time.perf_counter() - t0
        return SolveResult("solved", Schedule(()), stats)
    parent = {start: None}
    frontier = [start]
    while frontier and stats.depth < cap:
        stats.depth += 1
        nxt = []
        for st in frontier:
            stats.expanded += 1
            for origin, dest, new in space.moves(st):
                if new in parent:
                    continue
                parent[new] = (st, origin, dest)
                stats.generated += 1
                if space.goal(new):
                    steps = []
                    cur = new
                    while parent[cur] is not None:
                        prev, o, d = parent[cur]
                        steps.append((o, d))
                        cur = prev
                    stats.seconds = time.perf_counter() - t0
                    return SolveResult("solved", schedule_from_steps(inst, steps[::-1]), stats)
                if len(parent) > max_states:
                    stats.seconds = time.perf_counter() - t0
                    return SolveResult("cap-exceeded", None, stats)
                nxt.append(new)
        frontier = nxt
    stats.seconds = time.perf_counter() - t0
    return SolveResult("no" if frontier else "infeasible", None, stats)


def solve_iddfs(inst: Instance, cap_depth: int | None = None,
                max_states: int = DEFAULT_MAX_STATES) -> SolveResult:
    """Iterative-deepening depth-first search over the same state space."""
    t0 = time.perf_counter()
    cap = inst.budget if cap_depth is None else cap_depth
    space = _Space(inst)
    stats = SearchStats()
    visits = 0

    prev_reached = -1
    for limit in range(cap + 1):
        stats.depth = limit
        table: dict = {}
        reached: set = set()

        def dfs(state, left):
            nonlocal visits
            reached.add(state)
            if space.goal(state):
                return []
            if left == 0 or table.get(state, -1) >= left:
                return None
            table[state] = left
            stats.expanded += 1
            for origin, dest, new in space.moves(state):
                stats.generated += 1
                visits += 1
                if visits > max_states:
                    raise _Overflow
                found = dfs(new, left - 1)
                if found is not None:
                    return [(origin, dest)] + found
            return None

        try:
            steps = dfs(space.start, limit)
        except _Overflow:
            stats.seconds = time.perf_counter() - t0
            return SolveResult("cap-exceeded", None, stats)
        if steps is not None:
            stats.seconds = time.perf_counter() - t0
            return SolveResult("solved", schedule_from_steps(inst, steps), stats)
        # nothing new within one more move: the reachable space is exhausted
        if len(reached) == prev_reached:
            stats.seconds = time.perf_counter() - t0
            return SolveResult("infeasible", None, stats)
        prev_reached = len(reached)
    stats.seconds = time.perf_counter() - t0
    return SolveResult("no", None, stats)


class _Overflow(Exception):
    pass


def largest_free_component(inst: Instance) -> int:
    occupied = set(inst.starts)
    free = [v for v in range(inst.graph.n) if v not in occupied]
    return max((len(c) for c in components(inst.graph, free)), default=0)


def solve_bounded_ball(inst: Instance, ell: int | None = None, lam: int | None = None,
                       max_states: int = DEFAULT_MAX_STATES) -> SolveResult:
    """Single-destination search confined to the ball of radius ell*(lam+1)
    around the main robot's start."""
    if len(inst.dest) != 1:
        raise ValueError("solve_bounded_ball needs exactly one destination robot")
    ell = inst.budget if ell is None else ell
    lam = largest_free_component(inst) if lam is None else lam
    s, t = inst.dest[0]
    radius = ell * (lam + 1)
    ball = {v for v, d in bfs_distances(inst.graph, s).items() if d <= radius}
    if t not in ball:
        return SolveResult("no")
    sub_graph, remap = inst.graph.induced_subgraph(ball)
    sub = Instance(sub_graph, ((remap[s], remap[t]),),
                   tuple(remap[v] for v in inst.free if v in remap), ell, inst.planar)
    res = solve_optimal(sub, ell, max_states)
    if res.schedule is None:
        return res
    back = {new: old for old, new in remap.items()}
    # free robots inside the ball keep their relative order, so ids translate
    ids = [0] + [j + 1 for j, v in enumerate(inst.free) if v in remap]
    moves = tuple(Move(ids[m.robot], tuple(back[x] for x in m.path)) for m in res.schedule)
    return SolveResult(res.status, Schedule(moves), res.stats)


def feasibility(inst: Instance, cap_depth: int, max_states: int = DEFAULT_MAX_STATES) -> str:
    """``feasible`` / ``infeasible`` / ``unknown-at-cap``, ignoring the budget."""
    res = solve_optimal(inst, cap_depth, max_states)
    if res.status == "solved":
        return "feasible"
    if res.status == "infeasible":
        return "infeasible"
    return "unknown-at-cap"
