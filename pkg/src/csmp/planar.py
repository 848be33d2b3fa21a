"""Kernelization for single-destination instances (one main robot, the rest
blockers).

The loop looks for large free components, finds a long clean path inside
one, marks every vertex of that path that some small roadmap can use, and
contracts an unmarked edge.  When no component is large any more, an exact
search confined to a ball around the main robot finishes the job.  Every
schedule produced along the way is validated, and contractions are undone
when a kernel schedule is lifted back to the input graph.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache

from .graph import INF, Graph, bfs_distances, components, contract_edge, shortest_path, weighted_distances, weighted_path
from .instance import Instance
from .minors import CapExceeded, WorkBudget
from .schedule import Move, Schedule, traversed_edges, validate
from .solver import solve_bounded_ball

DESK_THRESHOLD = 12
DESK_ROADMAP_CAP = 5


def paper_threshold(ell: int) -> int:
    return 32 * ell**6 * 2 ** (14 * ell * ell) + 1


def premise_size(threshold: int, ell: int) -> int:
    """Smallest component size the clean-path step accepts."""
    return (threshold + 1) * (ell - 1) + 3 * (ell + 2)


def _single(inst: Instance):
    if len(inst.dest) != 1:
        raise ValueError("needs exactly one destination robot")
    return inst.dest[0]


def blocker_weights(inst: Instance) -> dict[int, int]:
    """Weight 1 on vertices held by robots other than the main one."""
    return {v: 1 for v in inst.starts[1:]}


def blockd(inst: Instance, v: int, w: int, allowed=None) -> float:
    return weighted_distances(inst.graph, blocker_weights(inst), v, allowed)[0][w]


# --- free components ---------------------------------------------------------


@dataclass
class FreeAnalysis:
    free: frozenset[int]
    components: list[frozenset[int]]
    lam: int
    touches_s: list[bool]
    contains_t: list[bool]


def free_analysis(inst: Instance) -> FreeAnalysis:
    s, t = _single(inst)
    occupied = set(inst.starts)
    free = frozenset(v for v in range(inst.graph.n) if v not in occupied)
    comps = [frozenset(c) for c in components(inst.graph, free)]
    s_nb = set(inst.graph.adj(s))
    return FreeAnalysis(free, comps, max((len(c) for c in comps), default=0),
                        [bool(c & s_nb) for c in comps], [t in c for c in comps])


# --- outcomes ----------------------------------------------------------------


@dataclass
class Outcome:
    kind: str   # solved | resilient | inconclusive | no-solution | path | contracted | witness
    schedule: Schedule | None = None
    instance: Instance | None = None
    remap: dict | None = None
    path: tuple[int, ...] | None = None
    detail: dict = field(default_factory=dict)


# --- constructive planner ------------------------------------------------------


def evacuate_and_slide(inst: Instance, main_path, parking, region, max_moves: int) -> Schedule | None:
    """Clear ``main_path`` by parking blockers on ``parking`` vertices, then move
    the main robot along it in one step.

    Parking spots furthest from the main path are filled first; each blocker
    moves once.  Returns ``None`` if the greedy gets stuck or needs more than
    ``max_moves`` moves in total.
    """
    g = inst.graph
    main_path = tuple(main_path)
    if main_path[0] != inst.dest[0][0]:
        raise ValueError("main path must start at the main robot")
    pos = list(inst.starts)
    where = {v: r for r, v in enumerate(pos)}
    on_main = set(main_path[1:])
    region = set(region) | set(main_path) | set(parking)
    spots = [z for z in parking if z not in on_main and z != main_path[0]]
    depth = {v: 0 for v in main_path}
    dq = deque(main_path)
    while dq:
        x = dq.popleft()
        for y in g.adj(x):
            if y in region and y not in depth:
                depth[y] = depth[x] + 1
                dq.append(y)
    order = sorted(spots, key=lambda z: (-depth.get(z, 0), z))
    parked: set[int] = set()
    moves: list[Move] = []

    def attempt(main_only):
        for z in order:
            if z in where:
                continue
            parent = {z: None}
            dq = deque([z])
            hits = []
            while dq:
                x = dq.popleft()
                for y in g.adj(x):
                    if y not in region or y in parent:
                        continue
                    if y in where:
                        if where[y] != 0 and y not in parked:
                            hits.append((y, x))
                        continue
                    parent[y] = x
                    dq.append(y)
            for y, x in hits:
                if main_only and y not in on_main:
                    continue
                path = [y]
                while x is not None:
                    path.append(x)
                    x = parent[x]
                return where[y], tuple(path)
        return None

    while any(v in where for v in on_main):
        if len(moves) >= max_moves - 1:
            return None
        pick = attempt(True) or attempt(False)
        if pick is None:
            return None
        robot, path = pick
        del where[path[0]]
        where[path[-1]] = robot
        parked.add(path[-1])
        moves.append(Move(robot, path))
    if len(moves) + 1 > max_moves:
        return None
    moves.append(Move(0, main_path))
    sched = Schedule(tuple(moves))
    return sched if validate(inst, sched, check_budget=False).valid else None


def _simple(walk):
    """Remove loops from a walk, keeping its ends."""
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
    return out


# --- resilience --------------------------------------------------------------


def resilient_or_solve(inst: Instance, Q, ell: int | None = None) -> Outcome:
    """Look for a cheap detour around a stretch of ``Q``; if there is one, build
    the schedule it promises.

    Outcomes: ``solved`` (validated, at most ``ell`` moves), ``resilient`` (no
    pair qualifies), or ``inconclusive`` (some pair qualifies but the greedy
    construction did not produce a schedule).
    """
    s, t = _single(inst)
    ell = inst.budget if ell is None else ell
    g = inst.graph
    Q = tuple(Q)
    W = blocker_weights(inst)
    ds, ps = weighted_distances(g, W, s)
    dt, pt = weighted_distances(g, W, t)
    Qset = set(Q)
    checked = 0
    hopeful = []
    for i in range(len(Q)):
        for j in range(i + ell, len(Q)):
            x, y = Q[i], Q[j]
            allowed = (set(range(g.n)) - Qset) | {x, y}
            for a, b in ((x, y), (y, x)):
                budget = ell - ds[a] - dt[b] - 1
                if budget < 0:
                    continue
                checked += 1
                d = weighted_distances(g, W, a, allowed)[0][b]
                if d <= budget:
                    hopeful.append((i, j, a, b))
    if not hopeful:
        return Outcome("resilient", detail={"pairs_checked": checked})
    for i, j, a, b in hopeful:
        interior = set(Q[i + 1:j])
        rest = set(range(g.n)) - interior
        p_sa = weighted_path(g, W, s, a, rest)
        p_ab = weighted_path(g, W, a, b, (set(range(g.n)) - Qset) | {a, b})
        p_bt = weighted_path(g, W, b, t, rest)
        if None in (p_sa, p_ab, p_bt):
            continue
        main = _simple(p_sa + p_ab[1:] + p_bt[1:])
        region = set(p_sa) | set(p_ab) | set(p_bt) | interior
        sched = evacuate_and_slide(inst, main, sorted(interior), region, ell)
        if sched is not None and len(sched) <= ell:
            return Outcome("solved", schedule=sched, detail={"pair": (Q[i], Q[j])})
    return Outcome("inconclusive", detail={"pairs": len(hopeful)})


# --- structure lemma ----------------------------------------------------------


def _side_costs(inst, C, W, source):
    """Blocker cost from ``source`` to each vertex of C along a path that stays
    outside C except for its last vertex."""
    g = inst.graph
    outside = set(range(g.n)) - set(C)
    if source in C:
        dist, _ = weighted_distances(g, W, source, outside | {source})
        out = {}
        for p in C:
            if p == source:
                out[p] = W.get(p, 0)
                continue
            out[p] = min((dist[y] for y in g.adj(p) if y in outside or y == source), default=INF)
        return out, dist
    dist, _ = weighted_distances(g, W, source, outside)
    return {p: min((dist[y] for y in g.adj(p) if y in outside), default=INF) for p in C}, dist


def _side_path(inst, C, W, source, p):
    g = inst.graph
    outside = (set(range(g.n)) - set(C)) | {source}
    best = None
    for y in g.adj(p):
        if y not in outside:
            continue
        path = weighted_path(g, W, source, y, outside)
        if path is None:
            continue
        cost = sum(W.get(x, 0) for x in path)
        if best is None or cost < best[0]:
            best = (cost, path + [p])
    return None if best is None else best[1]


def structure_lemma(inst: Instance, C, ell: int | None = None) -> Outcome:
    """Three-way split for a free component ``C`` with ``|C| >= 3 ell``:
    a validated solution through C, a proof that no solution touches C, or a
    long shortest path ``Q'`` through C (outcome ``path``)."""
    s, t = _single(inst)
    ell = inst.budget if ell is None else ell
    C = frozenset(C)
    if len(C) < 3 * ell:
        raise ValueError("premise unmet: component smaller than 3*ell")
    g = inst.graph
    W = blocker_weights(inst)
    cs, _ = _side_costs(inst, C, W, s)
    ct, _ = _side_costs(inst, C, W, t)
    if t in C:
        ct[t] = 0
    inner = Graph(g.n, [e for e in g.edges if e[0] in C and e[1] in C])
    dC = {p: bfs_distances(inner, p) for p in sorted(C)}
    size = len(C)
    stuck = False

    # disjoint paths entering C at p and leaving at q
    for p in sorted(C):
        if cs[p] > ell - 1:
            continue
        for q in sorted(C):
            if cs[p] + ct[q] > ell - 1 or dC[p].get(q, INF) >= size - ell + 1:
                continue
            sp = _side_path(inst, C, W, s, p)
            qt = [t] if q == t else _side_path(inst, C, W, t, q)
            if sp is None or qt is None:
                continue
            mid = shortest_path(inner, p, q)
            walk = sp + mid[1:] + list(reversed(qt))[1:]
            if len(set(walk)) != len(walk):
                continue
            sched = evacuate_and_slide(inst, walk, sorted(C - set(mid)), set(walk) | C, ell)
            if sched is not None and len(sched) <= ell:
                return Outcome("solved", schedule=sched, detail={"case": "disjoint", "p": p, "q": q})
            stuck = True

    # paths from s and t meeting at y, plus a path from y into C
    ds, _ = weighted_distances(g, W, s)
    dt, _ = weighted_distances(g, W, t)
    not_s = set(range(g.n)) - {s}
    for p in sorted(C):
        dp, _ = weighted_distances(g, W, p, not_s)
        for y in range(g.n):
            if y in C or y == s:
                continue
            if ds[y] + dt[y] + dp[y] > ell - 1:
                continue
            main = _simple(weighted_path(g, W, s, y) + weighted_path(g, W, y, t)[1:])
            yp = weighted_path(g, W, y, p, not_s)
            sched = evacuate_and_slide(inst, main, sorted(C - set(main)), set(main) | set(yp) | C, ell)
            if sched is not None and len(sched) <= ell:
                return Outcome("solved", schedule=sched, detail={"case": "joined", "p": p, "y": y})
            stuck = True

    if stuck:
        return Outcome("inconclusive", detail={"reason": "construction failed"})
    far = [(dC[p].get(q, -1), p, q) for p in sorted(C) for q in sorted(C)
           if cs[p] + ct[q] <= ell - 1 and dC[p].get(q, -1) >= size - ell + 1]
    if not far:
        return Outcome("no-solution")
    best = max(far, key=lambda x: (x[0], -x[1], -x[2]))
    _, p, q = best
    return Outcome("path", path=tuple(shortest_path(inner, p, q)), detail={"p": p, "q": q, "dist": best[0]})


# --- clean paths --------------------------------------------------------------


@dataclass
class CleanPathWitness:
    component: frozenset[int]
    Q: tuple[int, ...]
    threshold: int
    p: int
    q: int
    resilience: dict

    @property
    def ends(self):
        return self.Q[0], self.Q[-1]


def contract_in(inst: Instance, e) -> tuple[Instance, dict[int, int]]:
    g2, remap = contract_edge(inst.graph, e)
    return inst.remapped(g2, remap), remap


def clean_path(inst: Instance, C, threshold: int, ell: int | None = None) -> Outcome:
    """Solve, contract an edge of C, or produce a clean-path witness."""
    ell = inst.budget if ell is None else ell
    C = frozenset(C)
    if len(C) < premise_size(threshold, ell):
        raise ValueError("premise unmet")
    out = structure_lemma(inst, C, ell)
    if out.kind in ("solved", "inconclusive"):
        return out
    if out.kind == "no-solution":
        e = min(e for e in inst.graph.edges if e[0] in C and e[1] in C)
        new, remap = contract_in(inst, e)
        return Outcome("contracted", instance=new, remap=remap, detail={"edge": e, "why": "no-solution"})
    g = inst.graph
    Qp = out.path
    deg_c = {v: sum(1 for y in g.adj(v) if y in C) for v in Qp}
    runs, cur = [], []
    for v in Qp:
        if deg_c[v] == 2:
            cur.append(v)
        else:
            if cur:
                runs.append(cur)
            cur = []
    if cur:
        runs.append(cur)
    if not runs:
        return Outcome("inconclusive", detail={"reason": "no degree-2 stretch"})
    Q = tuple(max(runs, key=len))
    if len(Q) <= threshold:
        return Outcome("inconclusive", detail={"reason": "clean stretch too short", "length": len(Q)})
    res = resilient_or_solve(inst, Q, ell)
    if res.kind != "resilient":
        return res
    wit = CleanPathWitness(C, Q, threshold, out.detail["p"], out.detail["q"], res.detail)
    return Outcome("witness", path=Q, detail={"witness": wit})


# --- roadmaps and hosts -----------------------------------------------------------


@dataclass(frozen=True)
class Roadmap:
    """Connected rooted graph: vertex 0 is the root ``u``, vertex 1 the root ``v``."""

    graph: Graph
    occupied: frozenset[int] = frozenset()

    @property
    def size(self) -> int:
        return self.graph.n


@lru_cache(maxsize=None)
def enumerate_roadmaps(max_vertices: int, max_occupied: int) -> tuple[Roadmap, ...]:
    """All connected roadmaps up to isomorphism fixing the roots and flags."""
    out = []
    for m in range(2, max_vertices + 1):
        pairs = list(itertools.combinations(range(m), 2))
        others = list(range(2, m))
        seen = set()
        for occ_count in range(0, min(max_occupied, len(others)) + 1):
            occ = frozenset(others[:occ_count])
            free_o = [x for x in others if x not in occ]
            occ_o = [x for x in others if x in occ]
            perms = [dict(zip(occ_o + free_o, a + b))
                     for a in itertools.permutations(occ_o) for b in itertools.permutations(free_o)]
            for mask in range(1 << len(pairs)):
                edges = [pairs[i] for i in range(len(pairs)) if mask >> i & 1]
                g = Graph(m, edges)
                if len(components(g, range(m))) != 1:
                    continue
                key = min(tuple(sorted(tuple(sorted((pm.get(a, a), pm.get(b, b)))) for a, b in edges))
                          for pm in perms)
                if (occ_count, key) in seen:
                    continue
                seen.add((occ_count, key))
                out.append(Roadmap(Graph(m, key), occ))
    return tuple(out)


def _uv_bridges(U: Roadmap) -> set[tuple[int, int]]:
    g = U.graph
    out = set()
    for e in g.edges:
        h = Graph(g.n, [f for f in g.edges if f != e])
        if 1 not in bfs_distances(h, 0):
            out.add(e)
    return out


@dataclass
class HostWitness:
    phi: dict[int, int]
    psi: dict[tuple[int, int], tuple[int, ...]]
    vertices: frozenset[int]

    def on_path(self, Q) -> set[int]:
        qs = set(Q)
        return {x for x in self.phi.values() if x in qs}


LARGE = -1


_SIGNATURES: dict = {}


def roadmap_signatures(U: Roadmap, ell: int):
    """Every (ordering, gap values, fragments) triple that could describe how
    ``U`` sits along a path.  Path vertices come in order ``lam``; a gap is a
    distance in 1..ell or LARGE, and LARGE gaps must be u-v bridges of ``U``."""
    key = (U, ell)
    if key in _SIGNATURES:
        return _SIGNATURES[key]
    sigs = []
    g = U.graph
    bridges = _uv_bridges(U)
    others = list(range(2, g.n))
    for r in range(len(others) + 1):
        for S in itertools.combinations(others, r):
            star = {0, 1, *S}
            off = [x for x in others if x not in star]
            for perm in itertools.permutations(S):
                lam = (0,) + perm + (1,)
                at = {x: i for i, x in enumerate(lam)}
                if any(a in star and b in star and abs(at[a] - at[b]) != 1 for a, b in g.edges):
                    continue
                gap_opts = []
                for a, b in zip(lam, lam[1:]):
                    e = (min(a, b), max(a, b))
                    opts = list(range(1, ell + 1))
                    if e in bridges or not g.has_edge(a, b):
                        opts.append(LARGE)
                    gap_opts.append(opts)
                for gaps in itertools.product(*gap_opts):
                    frags = _fragments(U, lam, gaps, off)
                    if frags is not None:
                        sigs.append((lam, gaps, frags))
    _SIGNATURES[key] = sigs
    return sigs


def _fragments(U, lam, gaps, off):
    g = U.graph
    large = {(min(a, b), max(a, b)) for (a, b), d in zip(zip(lam, lam[1:]), gaps) if d == LARGE}
    rest = Graph(g.n, [e for e in g.edges if e not in large])
    comps = components(rest, range(g.n))
    blocks = [[lam[0]]]
    offsets = [[0]]
    for x, d in zip(lam[1:], gaps):
        if d == LARGE:
            blocks.append([x])
            offsets.append([0])
        else:
            blocks[-1].append(x)
            offsets[-1].append(offsets[-1][-1] + d)
    frags = []
    for blk, offs in zip(blocks, offsets):
        comp = next(c for c in comps if blk[0] in c)
        if set(comp) & set(lam) != set(blk):
            return None
        frags.append((tuple(blk), tuple(offs), tuple(sorted(x for x in comp if x in off))))
    covered = set().union(*(set(f[0]) | set(f[2]) for f in frags))
    if covered != set(range(g.n)):
        return None
    return tuple(_Fragment(U, *f) for f in frags)


class _Fragment:
    """A piece of a roadmap between LARGE gaps.  ``key`` depends only on the
    local shape, so equal pieces of different roadmaps share embedding work."""

    __slots__ = ("ids", "offs", "span", "n_on", "on_occ", "key")

    def __init__(self, U, blk, offs, off):
        self.ids = blk + off
        self.offs = offs
        self.span = offs[-1]
        self.n_on = len(blk)
        # occupancy wanted at each path position; None for the roots, which carry no flag
        self.on_occ = tuple(None if x in (0, 1) else x in U.occupied for x in blk)
        local = {x: i for i, x in enumerate(self.ids)}
        edges = tuple(sorted((local[a], local[b]) if local[a] < local[b] else (local[b], local[a])
                             for a, b in U.graph.edges
                             if a in local and b in local and (a in off or b in off)))
        occ = tuple(local[x] for x in off if x in U.occupied)
        self.key = (offs, len(off), edges, occ, self.on_occ)


class _HostContext:
    """Caches shared by many host tests against the same instance and path."""

    def __init__(self, inst: Instance, Q, ell: int, budget: WorkBudget):
        self.inst = inst
        self.Q = tuple(Q)
        self.ell = ell
        self.budget = budget
        self.qi = {v: i for i, v in enumerate(self.Q)}
        s, t = _single(inst)
        self.forbidden = set(self.Q) | {s, t}
        self.occupied = set(inst.starts)
        self.place_memo: dict = {}
        W = blocker_weights(inst)
        self.ds = weighted_distances(inst.graph, W, s)[0]
        self.dt = weighted_distances(inst.graph, W, t)[0]

    def place(self, frag: _Fragment, x: int):
        """Images (in ``frag.ids`` order) with the first path vertex at position ``x``, or None."""
        key = (frag.key, x)
        if key in self.place_memo:
            return self.place_memo[key]
        self.budget.tick()
        res = None
        if 0 <= x and x + frag.span < len(self.Q):
            on = [self.Q[x + o] for o in frag.offs]
            if any(want is not None and want != (c in self.occupied) for want, c in zip(frag.on_occ, on)):
                res = None
            elif frag.n_on == len(frag.ids):
                res = tuple(on)
            else:
                res = self._embed_off(frag, on)
        self.place_memo[key] = res
        return res

    def _embed_off(self, frag: _Fragment, on):
        G = self.inst.graph
        _, n_off, edges, occ, _ = frag.key
        n = len(frag.ids)
        nb = [[] for _ in range(n)]
        for a, b in edges:
            nb[a].append(b)
            nb[b].append(a)
        img = list(on) + [None] * n_off
        used = set(on)
        occ = set(occ)
        # map off-path vertices one at a time, each next to an already mapped one
        order, done = [], set(range(len(on)))
        pending = list(range(len(on), n))
        while pending:
            for x in pending:
                if any(y in done for y in nb[x]):
                    order.append(x)
                    done.add(x)
                    pending.remove(x)
                    break
            else:
                return None

        def ok(x, c):
            if c in self.forbidden or c in used:
                return False
            if (x in occ) != (c in self.occupied):
                return False
            return all(G.has_edge(c, img[y]) for y in nb[x] if img[y] is not None)

        def rec(i):
            if i == len(order):
                return tuple(img)
            x = order[i]
            anchor = next(y for y in nb[x] if img[y] is not None)
            for c in G.adj(img[anchor]):
                self.budget.tick()
                if ok(x, c):
                    img[x] = c
                    used.add(c)
                    r = rec(i + 1)
                    if r is not None:
                        return r
                    img[x] = None
                    used.discard(c)
            return None

        return rec(0)


def host_test(inst: Instance, Q, u: int, v: int, U: Roadmap, work_cap: int | None = 10**6,
              occupied_budget: int | None = None, ell: int | None = None,
              context: _HostContext | None = None) -> HostWitness | None:
    """Leftmost realization of roadmap ``U`` hugging ``Q`` between ``u`` and ``v``.

    Each roadmap edge becomes either a single graph edge or the stretch of
    ``Q`` between consecutive path vertices.  Raises ``ValueError`` when
    ``U`` has more occupied vertices than the budget allows and
    ``CapExceeded`` when the work cap runs out.
    """
    ell = inst.budget if ell is None else ell
    ctx = context or _HostContext(inst, Q, ell, WorkBudget(work_cap))
    if occupied_budget is None:
        occupied_budget = ell - ctx.ds[u] - ctx.dt[v] - 1
    if len(U.occupied) > occupied_budget:
        raise ValueError("roadmap has more occupied vertices than the budget allows")
    if u not in ctx.qi or v not in ctx.qi or ctx.qi[u] >= ctx.qi[v]:
        raise ValueError("u must precede v on Q")
    iu, iv = ctx.qi[u], ctx.qi[v]
    for lam, gaps, frags in roadmap_signatures(U, ell):
        found = _sweep(ctx, frags, iu, iv, ell)
        if found is not None:
            phi = {}
            for frag, img in zip(frags, found):
                phi.update(zip(frag.ids, img))
            return _host_from(ctx, U, phi)
    return None


def _sweep(ctx, frags, iu, iv, ell):
    """Place fragments left to right: the first at ``u``, the last ending at ``v``,
    each more than ``ell`` past the previous one, every one as far left as possible."""
    last = len(frags) - 1
    if last == 0:
        if iu + frags[0].span != iv:
            return None
        img = ctx.place(frags[0], iu)
        return None if img is None else [img]
    tail = frags[last]
    end_img = ctx.place(tail, iv - tail.span)
    if end_img is None:
        return None
    first = ctx.place(frags[0], iu)
    if first is None:
        return None

    def rec(i, low, used):
        if i == last:
            if iv - tail.span < low or set(end_img) & used:
                return None
            return [end_img]
        frag = frags[i]
        for x in range(low, iv - tail.span - frag.span - ell):
            img = ctx.place(frag, x)
            if img is None or set(img) & used:
                continue
            rest = rec(i + 1, x + frag.span + ell + 1, used | set(img))
            if rest is not None:
                return [img] + rest
        return None

    rest = rec(1, iu + frags[0].span + ell + 1, set(first))
    return None if rest is None else [first] + rest


def _host_from(ctx, U, phi):
    Q = ctx.Q
    psi = {}
    for a, b in U.graph.edges:
        pa, pb = phi[a], phi[b]
        if pa in ctx.qi and pb in ctx.qi and not ctx.inst.graph.has_edge(pa, pb):
            i, j = ctx.qi[pa], ctx.qi[pb]
            seg = Q[i:j + 1] if i < j else Q[j:i + 1][::-1]
            psi[(a, b)] = tuple(seg)
        else:
            psi[(a, b)] = (pa, pb)
    verts = set(phi.values())
    for p in psi.values():
        verts.update(p)
    return HostWitness(phi, psi, frozenset(verts))


def check_host(inst: Instance, Q, u, v, U: Roadmap, h: HostWitness) -> list[str]:
    """Independent check of the shape and separation conditions of a host."""
    problems = []
    Q = tuple(Q)
    qi = {x: i for i, x in enumerate(Q)}
    G = inst.graph
    if h.phi.get(0) != u or h.phi.get(1) != v:
        problems.append("roots not mapped to u, v")
    if len(set(h.phi.values())) != len(h.phi):
        problems.append("phi not injective")
    occupied = set(inst.starts)
    for x, c in h.phi.items():
        if x in (0, 1):
            continue
        if (x in U.occupied) != (c in occupied):
            problems.append(f"occupancy label of {x} not preserved")
    images = set(h.phi.values())
    inner_seen = set()
    for (a, b), p in h.psi.items():
        if {p[0], p[-1]} != {h.phi[a], h.phi[b]}:
            problems.append(f"path for {(a, b)} has wrong ends")
        single = len(p) == 2 and G.has_edge(*p)
        sub = all(x in qi for x in p) and all(abs(qi[x] - qi[y]) == 1 for x, y in zip(p, p[1:]))
        if not (single or sub):
            problems.append(f"path for {(a, b)} is neither an edge nor a stretch of Q")
        for x in p[1:-1]:
            if x in images or x in inner_seen:
                problems.append(f"vertex {x} reused inside a path")
            inner_seen.add(x)
    lo, hi = qi[u], qi[v]
    for x in h.vertices:
        if x in qi and not lo <= qi[x] <= hi:
            problems.append(f"host reaches {x} outside the u-v stretch")
    return problems


@dataclass
class MarkResult:
    kind: str                     # contracted | no-unmarked-edge
    instance: Instance | None
    remap: dict | None
    marked: set[int]
    edge: tuple[int, int] | None
    pairs: int
    roadmaps: int
    hosts: int
    trace: list[str]


def mark_and_contract(inst: Instance, witness: CleanPathWitness, roadmap_cap: int,
                      work_cap: int | None = 5 * 10**7, ell: int | None = None) -> MarkResult:
    """Mark path vertices usable by small roadmaps, then contract the first
    edge of the path whose ends are both unmarked."""
    ell = inst.budget if ell is None else ell
    Q = witness.Q
    size = min(2 * ell * ell, roadmap_cap)
    maps = enumerate_roadmaps(size, max(ell - 1, 0))
    ctx = _HostContext(inst, Q, ell, WorkBudget(work_cap))
    reach = ell * ell + 1
    pairs = [(i, j) for i in range(min(reach + 1, len(Q)))
             for j in range(max(0, len(Q) - 1 - reach), len(Q)) if i < j]
    marked: set[int] = set()
    hosts = 0
    for i, j in pairs:
        for U in maps:
            h = host_test(inst, Q, Q[i], Q[j], U, occupied_budget=max(ell - 1, 0), ell=ell, context=ctx)
            if h is not None:
                hosts += 1
                marked |= h.on_path(Q)
    trace = [f"mark {x}" for x in sorted(marked)]
    for a, b in zip(Q, Q[1:]):
        if a not in marked and b not in marked:
            new, remap = contract_in(inst, (a, b))
            trace.append(f"contract {a} {b}")
            return MarkResult("contracted", new, remap, marked, (a, b), len(pairs), len(maps), hosts, trace)
    return MarkResult("no-unmarked-edge", None, None, marked, None, len(pairs), len(maps), hosts, trace)


# --- lifting kernel schedules -------------------------------------------------------


def lift_schedule(before: Instance, remap: dict[int, int], sched: Schedule) -> Schedule:
    """Turn a schedule on the contracted graph into one on ``before``."""
    g = before.graph
    pre: dict[int, list[int]] = {}
    for old, new in remap.items():
        pre.setdefault(new, []).append(old)
    pos = list(before.starts)
    moves = []
    for mv in sched:
        cur = pos[mv.robot]
        out = [cur]
        for i, x in enumerate(mv.path[1:], 1):
            layer = sorted(pre[x])
            step = [y for y in layer if g.has_edge(out[-1], y)]
            if not step:
                prev_layer = pre[mv.path[i - 1]]
                other = [y for y in prev_layer if y != out[-1]]
                if not other:
                    raise RuntimeError("cannot lift move")
                out.append(other[0])
                step = [y for y in layer if g.has_edge(out[-1], y)]
            out.append(step[0])
        moves.append(Move(mv.robot, tuple(out)))
        pos[mv.robot] = out[-1]
    return Schedule(tuple(moves))


# --- canonical solutions ------------------------------------------------------------


def cutoff_part(inst: Instance, sched: Schedule, u: int, v: int) -> set[int]:
    """Vertices of G_S separated from both s and t by {u, v}, together with u and v."""
    s, t = _single(inst)
    edges = traversed_edges(sched)
    verts = {x for e in edges for x in e}
    gs = Graph(inst.graph.n, edges)
    keep = verts - {u, v}
    out = {u, v}
    for comp in components(gs, keep):
        if s not in comp and t not in comp:
            out |= comp
    return out


def canonicalize_solution(inst: Instance, sched: Schedule, Q, u: int, v: int) -> Schedule:
    """Rewrite ``sched`` so that at most ``ell`` vertices of its cut-off part lie off ``Q``."""
    ell = inst.budget
    if not validate(inst, sched).valid:
        raise ValueError("premise unmet: schedule invalid")
    Q = tuple(Q)
    if u not in Q or v not in Q:
        raise ValueError("premise unmet: u, v must lie on Q")
    if not set(Q) & {x for e in traversed_edges(sched) for x in e}:
        raise ValueError("premise unmet: schedule does not meet Q")
    part = cutoff_part(inst, sched, u, v)
    extra = part - set(Q)
    if len(extra) <= ell:
        return sched
    s, t = _single(inst)
    i, j = sorted((Q.index(u), Q.index(v)))
    quv = list(Q[i:j + 1])
    g = inst.graph
    # Y: ell off-path vertices of the cut-off part, grown outward from the u-v stretch
    seen = set(quv)
    dq = deque(quv)
    Y = []
    while dq and len(Y) < ell:
        x = dq.popleft()
        for y in g.adj(x):
            if y in extra and y not in seen:
                seen.add(y)
                Y.append(y)
                dq.append(y)
                if len(Y) == ell:
                    break
    gs_verts = {x for e in traversed_edges(sched) for x in e} | {s, t}
    K = (gs_verts - part) | set(quv) | set(Y)
    W = blocker_weights(inst)
    main = weighted_path(g, W, s, t, K - set(Y))
    if main is None:
        raise RuntimeError("no main path in the rewritten traversal")
    new = evacuate_and_slide(inst, main, Y, K, ell)
    if new is None:
        raise RuntimeError("canonical rewrite failed")
    return new


# --- driver -------------------------------------------------------------------------------


@dataclass
class KernelResult:
    status: str                 # kernel | yes | no | cap-exceeded
    schedule: Schedule | None
    kernel: Instance
    trace: list[str]
    contractions: int
    history: list = field(default_factory=list)   # (instance before, remap) per contraction

    def lift(self, sched: Schedule) -> Schedule:
        """Translate a schedule on the kernel back to the input instance."""
        for before, remap in reversed(self.history):
            sched = lift_schedule(before, remap, sched)
        return sched


def kernelize(inst: Instance, threshold: int | None = None, roadmap_cap: int | None = None,
              desk_scale: bool = False, work_cap: int | None = 5 * 10**7) -> KernelResult:
    """Contract edges inside large free components until none qualifies.

    Status ``yes`` means a schedule turned up along the way (already lifted
    and validated); otherwise ``kernel``.
    """
    _single(inst)
    ell = inst.budget
    if desk_scale:
        threshold = DESK_THRESHOLD if threshold is None else threshold
        roadmap_cap = DESK_ROADMAP_CAP if roadmap_cap is None else roadmap_cap
    threshold = paper_threshold(ell) if threshold is None else threshold
    roadmap_cap = 2 * ell * ell if roadmap_cap is None else roadmap_cap
    bound = premise_size(threshold, ell)
    out = KernelResult("kernel", None, inst, [], 0)
    skip: set[frozenset] = set()

    def contracted(new, remap, edge):
        nonlocal skip
        out.history.append((out.kernel, remap))
        out.trace.append(f"contract {edge[0]} {edge[1]}")
        skip = {frozenset(remap[x] for x in c) for c in skip}
        out.kernel = new
        out.contractions += 1

    try:
        while ell >= 1:
            big = [c for c in free_analysis(out.kernel).components if len(c) >= bound and c not in skip]
            if not big:
                break
            C = big[0]
            res = clean_path(out.kernel, C, threshold, ell)
            if res.kind == "solved":
                full = out.lift(res.schedule)
                if not validate(inst, full).valid:
                    raise RuntimeError("lifted schedule failed validation")
                out.status, out.schedule = "yes", full
                out.trace.append(f"solve yes {len(full)}")
                return out
            if res.kind == "contracted":
                contracted(res.instance, res.remap, res.detail["edge"])
                continue
            if res.kind == "witness":
                mc = mark_and_contract(out.kernel, res.detail["witness"], roadmap_cap, work_cap, ell)
                out.trace.extend(line for line in mc.trace if line.startswith("mark"))
                if mc.kind == "contracted":
                    contracted(mc.instance, mc.remap, mc.edge)
                    continue
            skip.add(C)
    except CapExceeded:
        out.status = "cap-exceeded"
        out.trace.append("solve cap-exceeded")
    return out


def kernelize_and_solve(inst: Instance, threshold: int | None = None, roadmap_cap: int | None = None,
                        desk_scale: bool = False, work_cap: int | None = 5 * 10**7,
                        max_states: int = 10**7) -> KernelResult:
    """Kernelize, then search the ball around the main robot in the kernel."""
    res = kernelize(inst, threshold, roadmap_cap, desk_scale, work_cap)
    if res.status != "kernel":
        return res
    ell = inst.budget
    found = solve_bounded_ball(res.kernel, ell, max_states=max_states)
    if found.status == "cap-exceeded":
        res.status = "cap-exceeded"
        res.trace.append("solve cap-exceeded")
    elif found.status == "solved" and found.makespan <= ell:
        full = res.lift(found.schedule)
        if not validate(inst, full).valid:
            raise RuntimeError("lifted schedule failed validation")
        res.status, res.schedule = "yes", full
        res.trace.append(f"solve yes {len(full)}")
    else:
        res.status = "no"
        res.trace.append("solve no")
    return res
