"""Instance reductions and the haven toolkit.

* ``shorten_paths``: long terminal-free degree-2 chains are cut down to
  ``2k+1`` edges.
* ``prune_component`` / ``reduce_bounded_treedepth``: drop a terminal-free
  component when many components share the same attachment set.
* havens: finding a strong haven, transferring robots inside one, and
  routing a robot through a sequence of (merged) havens.
* ``make_special``: rewrite moves so that each crosses every earlier
  corridor at most four times.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from math import ceil, floor

from .graph import Graph, components, degree2_chains, shortest_path
from .instance import Instance
from .minors import CapExceeded, WorkBudget
from .schedule import (Move, Schedule, corridor_paths, crossing_points, positions, validate)


# --- Reduction Rule 1 --------------------------------------------------------


def shorten_paths(inst: Instance) -> tuple[Instance, list[str]]:
    """Cut every terminal-free degree-2 chain longer than ``2k+1`` edges.

    The first ``k`` and last ``k`` interior vertices are kept, the middle is
    dropped and the two kept halves are joined by an edge.
    """
    k = inst.k
    g = inst.graph
    keep_len = 2 * k + 1
    drop: set[int] = set()
    new_edges: set[tuple[int, int]] = set()
    log = []
    for chain in degree2_chains(g, inst.terminals()):
        length = len(chain) - 1
        closed = chain[0] == chain[-1]
        target = keep_len
        if closed:
            target = max(target, 3)
        elif target == 1 and (g.has_edge(chain[0], chain[-1]) or
                              (min(chain[0], chain[-1]), max(chain[0], chain[-1])) in new_edges):
            target = 2
        if length <= target:
            continue
        head = chain[:1 + (target - 1) // 2 + (target - 1) % 2]
        tail = chain[len(chain) - 1 - (target - 1) // 2:]
        drop.update(chain[len(head):len(chain) - len(tail)])
        a, b = head[-1], tail[0]
        new_edges.add((min(a, b), max(a, b)))
        log.append(f"reduced shorten {chain[0]} {chain[-1]} {length} {target}")
    if not drop:
        return inst, log
    edges = [e for e in g.edges if e[0] not in drop and e[1] not in drop] + sorted(new_edges)
    full = Graph(g.n, edges)
    sub, remap = full.remove_vertices(drop)
    return inst.remapped(sub, remap), log


# --- component pruning -------------------------------------------------------


@dataclass
class PruneCertificate:
    removed: frozenset[int]           # vertices of the removed component (input ids)
    attachment: tuple[int, ...]       # its neighbourhood inside X
    group_size: int                   # components sharing that neighbourhood
    terminal_free: int                # how many of them are terminal-free


def prune_component(inst: Instance, X) -> tuple[Instance, PruneCertificate] | None:
    """Remove one terminal-free component of G-X if its neighbourhood class is large.

    Needs a class with at least ``3k+1`` members, ``k+1`` of them terminal-free.
    Returns ``None`` when not applicable.
    """
    X = set(X)
    g = inst.graph
    k = inst.k
    terms = inst.terminals()
    groups: dict[tuple[int, ...], list[set[int]]] = {}
    for comp in components(g, set(range(g.n)) - X):
        nb = tuple(sorted({y for x in comp for y in g.adj(x) if y in X}))
        groups.setdefault(nb, []).append(comp)
    for nb in sorted(groups):
        group = groups[nb]
        clean = [c for c in group if not c & terms]
        if len(group) >= 3 * k + 1 and len(clean) >= k + 1:
            victim = max(clean, key=min)
            sub, remap = g.remove_vertices(victim)
            cert = PruneCertificate(frozenset(victim), nb, len(group), len(clean))
            return inst.remapped(sub, remap), cert
    return None


def reduce_bounded_treedepth(inst: Instance, d: int, work_cap: int = 10**6) -> tuple[Instance, list[str]]:
    """Apply ``prune_component`` over every ``X`` with ``|X| <= d`` until nothing changes."""
    budget = WorkBudget(work_cap)
    log = []
    changed = True
    while changed:
        changed = False
        for size in range(d + 1):
            for X in itertools.combinations(range(inst.graph.n), size):
                budget.tick()
                res = prune_component(inst, X)
                if res is None:
                    continue
                inst, cert = res
                log.append(f"reduced prune X={','.join(map(str, X)) or '-'} removed={len(cert.removed)}")
                changed = True
                break
            if changed:
                break
    return inst, log


def treedepth(g: Graph) -> int:
    """Exact treedepth by the recursive elimination definition (small graphs only)."""
    adj = {v: set(g.adj(v)) for v in range(g.n)}

    @lru_cache(maxsize=None)
    def td(vs: frozenset) -> int:
        if not vs:
            return 0
        comps = components_in(vs)
        if len(comps) > 1:
            return max(td(c) for c in comps)
        return 1 + min(td(vs - {v}) for v in vs)

    def components_in(vs):
        out = []
        left = set(vs)
        while left:
            v = left.pop()
            comp = {v}
            stack = [v]
            while stack:
                x = stack.pop()
                for y in adj[x]:
                    if y in left:
                        left.discard(y)
                        comp.add(y)
                        stack.append(y)
            out.append(frozenset(comp))
        return out

    return td(frozenset(range(g.n)))


# --- havens ------------------------------------------------------------------


@dataclass
class HavenWitness:
    anchor: int
    path: tuple[int, ...]                  # q+1 vertices, the haven path
    third: int                             # the anchor's extra neighbour
    parts: tuple[tuple[int, ...], ...]     # vertex sets of the three pieces
    edges: frozenset = field(default_factory=frozenset)   # edges of the extended haven

    @property
    def q(self) -> int:
        return len(self.path) - 1

    @property
    def vertices(self) -> frozenset[int]:
        return frozenset(self.path) | {self.third}


def _decompose(path, a, u):
    """Split the haven at anchor index ``a`` given the anchor's third neighbour ``u``."""
    w = path[a]
    if u not in path:
        return (tuple(path[:a + 1]), tuple(path[a:]), (w, u))
    i = path.index(u)
    if i > a + 1:
        return (tuple(path[:a + 1]), (w,) + tuple(path[a + 2:]), (w, path[a + 1]))
    return ((w,) + tuple(path[:a - 1]), tuple(path[a:]), (w, path[a - 1]))


def haven_ok(hw: HavenWitness, k: int) -> bool:
    c1, c2, c3 = (set(p) for p in hw.parts)
    w = hw.anchor
    q = hw.q
    a = hw.path.index(w)
    return (c1 & c2 == {w} and c1 & c3 == {w} and c2 & c3 == {w}
            and len(c1) >= k + 1 and len(c2) >= k + 1 and len(c3) >= 2
            and ceil(q / 3) <= a <= floor(2 * q / 3))


def find_strong_haven(inst: Instance, v: int, q: int, work_cap: int = 10**6,
                      k: int | None = None) -> HavenWitness | None:
    """First path of length ``q`` starting at ``v`` with a degree>=3 anchor in the
    middle third whose three-way split has pieces of size ``k+1, k+1, 2``."""
    if q < 3:
        raise ValueError("q must be at least 3")
    g = inst.graph
    k = inst.k if k is None else k
    budget = WorkBudget(work_cap)
    lo, hi = ceil(q / 3), floor(2 * q / 3)
    path = [v]
    on = {v}

    def witness():
        for a in range(lo, hi + 1):
            w = path[a]
            if g.degree(w) < 3:
                continue
            nbrs = [y for y in g.adj(w) if y not in (path[a - 1], path[a + 1])]
            # prefer a neighbour off the path
            for u in sorted(nbrs, key=lambda y: (y in on, y)):
                parts = _decompose(path, a, u)
                edges = {tuple(sorted(e)) for e in zip(path, path[1:])}
                edges.add(tuple(sorted((w, u))))
                hw = HavenWitness(w, tuple(path), u, parts, frozenset(edges))
                if haven_ok(hw, k):
                    return hw
        return None

    def dfs(x):
        budget.tick()
        if len(path) == q + 1:
            return witness()
        for y in g.adj(x):
            if y in on:
                continue
            path.append(y)
            on.add(y)
            found = dfs(y)
            if found:
                return found
            path.pop()
            on.discard(y)
        return None

    return dfs(v)


def _region_search(edges, robots, starts, allowed, blocked, goal, max_states=10**6):
    """Labelled BFS for ``robots`` sliding along ``edges``.

    ``allowed[i]`` is the vertex set robot ``i`` may traverse or stop on;
    ``blocked`` are fixed obstacles.  Returns a list of ``(i, origin, dest)``
    or ``None`` if the goal is unreachable.
    """
    adj: dict[int, list[int]] = {}
    for a, b in edges:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    for lst in adj.values():
        lst.sort()
    start = tuple(starts)
    if goal(start):
        return []
    parent = {start: None}
    frontier = [start]
    while frontier:
        nxt = []
        for st in frontier:
            taken = set(st) | blocked
            for i, v in enumerate(st):
                ok = allowed[i]
                seen = {v}
                stack = [v]
                while stack:
                    x = stack.pop()
                    for y in adj.get(x, ()):
                        if y not in seen and y in ok and y not in taken:
                            seen.add(y)
                            stack.append(y)
                for w in sorted(seen - {v}):
                    new = st[:i] + (w,) + st[i + 1:]
                    if new in parent:
                        continue
                    parent[new] = (st, i, v, w)
                    if goal(new):
                        steps = []
                        cur = new
                        while parent[cur] is not None:
                            prev, j, o, d = parent[cur]
                            steps.append((j, o, d))
                            cur = prev
                        return steps[::-1]
                    nxt.append(new)
            if len(parent) > max_states:
                raise CapExceeded("region search")
        frontier = nxt
    return None


def _concretize(n, edges, robots, starts, allowed, blocked, steps):
    region = Graph(n, edges)
    pos = list(starts)
    moves = []
    for i, o, d in steps:
        free = [x for x in allowed[i] if x not in pos and x not in blocked]
        path = shortest_path(region, o, d, allowed=free)
        moves.append(Move(robots[i], tuple(path)))
        pos[i] = d
    return moves


def haven_transfer(inst: Instance, hw: HavenWitness, frm: dict[int, int], to: dict[int, int],
                   others: set[int] | None = None, max_states: int = 10**6) -> list[Move]:
    """Moves inside the extended haven taking robots from ``frm`` to ``to``.

    ``others`` are vertices held by robots not being moved (default: starts
    of robots absent from ``frm``).
    """
    if set(frm) != set(to):
        raise ValueError("from/to must move the same robots")
    robots = sorted(frm)
    for r in robots:
        if frm[r] not in hw.path or to[r] not in hw.path:
            raise ValueError(f"robot {r} not on the haven path")
    if others is None:
        others = {v for r, v in enumerate(inst.starts) if r not in frm}
    region = set(hw.vertices)
    blocked = others & region
    starts = tuple(frm[r] for r in robots)
    want = tuple(to[r] for r in robots)
    allowed = [region] * len(robots)
    steps = _region_search(hw.edges, robots, starts, allowed, blocked, lambda st: st == want, max_states)
    if steps is None:
        raise CapExceeded("haven transfer found no schedule (bug candidate)")
    return _concretize(inst.graph.n, hw.edges, robots, starts, allowed, blocked, steps)


class RoutingError(RuntimeError):
    pass


def merge_havens(havens: list[HavenWitness]) -> list[tuple[frozenset[int], frozenset]]:
    """Union overlapping extended havens; returns (vertices, edges) per meta-haven."""
    groups = [(set(h.vertices), set(h.edges)) for h in havens]
    merged = True
    while merged:
        merged = False
        for i, j in itertools.combinations(range(len(groups)), 2):
            if groups[i][0] & groups[j][0]:
                groups[i][0].update(groups[j][0])
                groups[i][1].update(groups[j][1])
                del groups[j]
                merged = True
                break
    return [(frozenset(v), frozenset(e)) for v, e in groups]


def meta_haven_route(inst: Instance, havens: list[HavenWitness], robot: int,
                     max_states: int = 10**6) -> list[Move]:
    """Route one destination robot to its target along a shortest path, replacing
    each stretch through a meta-haven by a transfer inside it."""
    if not inst.is_dest(robot):
        raise ValueError("robot has no destination")
    g = inst.graph
    s, t = inst.dest[robot]
    walk = shortest_path(g, s, t)
    if walk is None:
        raise RoutingError("target unreachable")
    metas = merge_havens(havens)
    spans = []
    for verts, edges in metas:
        idx = [i for i, x in enumerate(walk) if x in verts]
        if idx:
            spans.append([idx[0], idx[-1], set(verts), set(edges)])
    spans.sort()
    # interleaving stretches are fused into one region
    fused = []
    for sp in spans:
        if fused and sp[0] <= fused[-1][1]:
            fused[-1][1] = max(fused[-1][1], sp[1])
            fused[-1][2] |= sp[2]
            fused[-1][3] |= sp[3]
        else:
            fused.append(sp)

    pos = list(inst.starts)
    moves: list[Move] = []

    def slide(i, j):
        if i == j:
            return
        seg = walk[i:j + 1]
        taken = set(pos) - {pos[robot]}
        if taken & set(seg[1:]):
            raise RoutingError(f"corridor blocked between {seg[0]} and {seg[-1]}")
        moves.append(Move(robot, tuple(seg)))
        pos[robot] = seg[-1]

    cur = 0
    for first, last, verts, edges in fused:
        entry = first - 1 if first > 0 else None
        if entry is not None:
            slide(cur, entry)
        exit_ = last + 1 if last + 1 < len(walk) else None
        region_edges = set(edges)
        if entry is not None:
            region_edges.add(tuple(sorted((walk[entry], walk[first]))))
        if exit_ is not None:
            region_edges.add(tuple(sorted((walk[last], walk[exit_]))))
            if walk[exit_] in set(pos):
                raise RoutingError(f"exit vertex {walk[exit_]} occupied")
        goal_vertex = walk[exit_] if exit_ is not None else walk[last]
        inside = [r for r, v in enumerate(pos) if v in verts and r != robot]
        movers = [robot] + inside
        starts = tuple(pos[r] for r in movers)
        blocked = {v for r, v in enumerate(pos) if r not in movers}
        own = set(verts) | ({goal_vertex} if exit_ is not None else set())
        allowed = [own] + [set(verts)] * len(inside)
        steps = _region_search(region_edges, movers, starts, allowed, blocked,
                               lambda st: st[0] == goal_vertex, max_states)
        if steps is None:
            raise RoutingError(f"no transfer through meta-haven at {walk[first]}")
        part = _concretize(g.n, region_edges, movers, starts, allowed, blocked, steps)
        for mv in part:
            pos[mv.robot] = mv.dest
        moves.extend(part)
        cur = exit_ if exit_ is not None else last
    slide(cur, len(walk) - 1)
    return moves


def meta_haven_entries(moves: list[Move], robot: int, region) -> int:
    """How many separate times ``robot``'s trace enters ``region``."""
    trace = []
    for mv in moves:
        if mv.robot == robot:
            trace.extend(mv.path if not trace else mv.path[1:])
    runs = 0
    inside = False
    for x in trace:
        now = x in region
        if now and not inside:
            runs += 1
        inside = now
    return runs


# --- special schedules -------------------------------------------------------


def _splice(path, other, a, b):
    """Replace ``path[a..b]`` by ``other[a..b]`` and cut out any loops."""
    i, j = path.index(a), path.index(b)
    if i > j:
        i, j = j, i
        a, b = b, a
    oi, oj = other.index(a), other.index(b)
    mid = other[oi:oj + 1] if oi <= oj else other[oj:oi + 1][::-1]
    walk = list(path[:i]) + list(mid) + list(path[j + 1:])
    out: list[int] = []
    where: dict[int, int] = {}
    for x in walk:
        if x in where:
            cut = where[x]
            for y in out[cut + 1:]:
                del where[y]
            out = out[:cut + 1]
        else:
            where[x] = len(out)
            out.append(x)
    return tuple(out)


def _first_last(path, other):
    """Replace the stretch of ``path`` between its first and last vertex on ``other``."""
    on = [x for x in path if x in set(other)]
    if len(on) < 2:
        return tuple(path)
    return _splice(path, other, on[0], on[-1])


def make_special(inst: Instance, sched: Schedule, max_rounds: int = 10000) -> Schedule:
    """Equivalent schedule in which each move path has at most four crossing
    points with every corridor path of the preceding prefix."""
    positions(inst, sched)
    moves = list(sched.moves)
    for j in range(1, len(moves)):
        rounds = 0
        while True:
            rounds += 1
            if rounds > max_rounds:
                raise RuntimeError("make_special did not converge")
            prefix = Schedule(tuple(moves[:j]))
            bad = None
            for cor in corridor_paths(inst, prefix, j):
                cps = crossing_points(moves[j].path, cor)
                if len(cps) > 4:
                    bad = (cor, cps)
                    break
            if bad is None:
                break
            cor, cps = bad
            path = moves[j].path
            ordered = [x for x in path if x in cps]
            new = _splice(path, cor, ordered[1], ordered[2])
            if len(crossing_points(new, cor)) >= len(cps):
                new = _first_last(path, cor)
            moves[j] = Move(moves[j].robot, new)
    out = Schedule(tuple(moves))
    return out


def special_violations(inst: Instance, sched: Schedule) -> list[tuple[int, tuple, int]]:
    """(step, corridor, crossings) for every move crossing a prior corridor more than 4 times."""
    out = []
    for j in range(1, len(sched)):
        prefix = sched.prefix(j)
        for cor in corridor_paths(inst, prefix, j):
            c = len(crossing_points(sched[j].path, cor))
            if c > 4:
                out.append((j + 1, cor, c))
    return out


def same_positions(inst: Instance, a: Schedule, b: Schedule) -> bool:
    return positions(inst, a) == positions(inst, b)


def check_valid(inst: Instance, sched: Schedule) -> bool:
    return validate(inst, sched).valid
