"""Succinct representations of schedules and schedule reconstruction from
rooted topological-minor realizations."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .graph import Graph, RootedGraph
from .instance import Instance, nonterminal_label, relabel_terminals
from .minors import CapExceeded, Realization, check_realization, find_realization
from .schedule import Move, Schedule, important_vertices, traversed_edges, validate
from .solver import solve_optimal


@dataclass
class Representation:
    rooted: RootedGraph                       # H_S on ids 0..h-1
    vertex_of: tuple[int, ...]                # H id -> vertex of G
    corridors: dict[tuple[int, int], list[tuple[int, ...]]] = field(default_factory=dict)
    loops: int = 0                            # corridors returning to their start (never used)

    @property
    def graph(self) -> Graph:
        return self.rooted.graph

    @property
    def has_parallel(self) -> bool:
        return any(len(p) > 1 for p in self.corridors.values())

    def id_of(self) -> dict[int, int]:
        return {v: i for i, v in enumerate(self.vertex_of)}


def extract_representation(inst: Instance, sched: Schedule) -> Representation:
    """H_S: important vertices (plus every terminal) joined along unimportant corridors."""
    rep = validate(inst, sched)
    if not rep.valid:
        raise ValueError(f"invalid schedule: {rep.violation}")
    edges = traversed_edges(sched)
    imp = important_vertices(inst, sched, len(sched))
    adj: dict[int, list[int]] = {}
    for a, b in sorted(edges):
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    verts = sorted((imp & set(adj)) | inst.terminals())
    idx = {v: i for i, v in enumerate(verts)}
    corridors: dict[tuple[int, int], set[tuple[int, ...]]] = {}
    loops = 0
    for a in verts:
        for nb in adj.get(a, ()):
            path = [a, nb]
            while path[-1] not in idx:
                nxt = [y for y in adj[path[-1]] if y != path[-2]]
                path.append(nxt[0])
            b = path[-1]
            if b == a:
                loops += 1
                continue
            key = (idx[a], idx[b])
            if key[0] > key[1]:
                key = (key[1], key[0])
                path.reverse()
            corridors.setdefault(key, set()).add(tuple(path))
    g_labels = relabel_terminals(inst)
    root_labels = {idx[v]: lab for v, lab in g_labels.root_labels.items()}
    roles = {idx[v]: r for v, r in g_labels.roles.items()}
    h = Graph(len(verts), corridors)
    return Representation(RootedGraph(h, root_labels, roles), tuple(verts),
                          {e: sorted(ps) for e, ps in corridors.items()}, loops // 2)


def project_schedule(rep: Representation, sched: Schedule) -> list[tuple[int, tuple[int, ...]]]:
    """Each move as a walk over H_S vertices."""
    idx = rep.id_of()
    return [(mv.robot, tuple(idx[x] for x in mv.path if x in idx)) for mv in sched]


def identity_realization(rep: Representation) -> Realization:
    return Realization({i: v for i, v in enumerate(rep.vertex_of)},
                       {e: ps[0] for e, ps in rep.corridors.items()})


def _lift(r: Realization, hpath) -> tuple[int, ...]:
    out = [r.phi[hpath[0]]]
    for a, b in zip(hpath, hpath[1:]):
        if a < b:
            seg = r.psi[(a, b)]
        else:
            seg = r.psi[(b, a)][::-1]
        out.extend(seg[1:])
    return tuple(out)


def schedule_from_realization(inst: Instance, h: RootedGraph, r: Realization,
                              h_moves: list[tuple[int, tuple[int, ...]]]) -> Schedule:
    """Push a schedule on ``h`` through the realization into the instance graph."""
    problems = check_realization(h, relabel_terminals(inst), r)
    if problems:
        raise ValueError("not a realization: " + "; ".join(problems[:3]))
    return Schedule(tuple(Move(robot, _lift(r, hp)) for robot, hp in h_moves))


def instance_on(inst: Instance, h: RootedGraph, budget: int) -> Instance:
    """The instance's robots placed on the matching roots of ``h``."""
    by_label = h.label_to_root()
    gl = relabel_terminals(inst)
    g_lab = gl.root_labels

    def at(v):
        return by_label[g_lab[v]]

    dest = tuple((at(s), at(t)) for s, t in inst.dest)
    free = tuple(at(s) for s in inst.free)
    return Instance(h.graph, dest, free, budget)


def realize_and_solve(inst: Instance, h: RootedGraph, budget: int, work_cap: int | None = 10**6):
    """Solve on ``h``; if that works, realize ``h`` in the instance and lift.
    Returns ``(schedule or None, reason)``."""
    on_h = instance_on(inst, h, budget)
    res = solve_optimal(on_h, budget)
    if res.status != "solved":
        return None, "infeasible-on-h"
    r = find_realization(h, relabel_terminals(inst), work_cap)
    if r is None:
        return None, "no-realization"
    moves = [(mv.robot, mv.path) for mv in res.schedule]
    return schedule_from_realization(inst, h, r, moves), "ok"


@dataclass
class ReprResult:
    status: str                 # solved | no-within-caps
    schedule: Schedule | None = None
    candidates: int = 0
    representation: RootedGraph | None = None


def _canonical(edges, n_roots, n_total):
    best = None
    extra = list(range(n_roots, n_total))
    for perm in itertools.permutations(extra):
        m = dict(zip(extra, perm))
        key = tuple(sorted(tuple(sorted((m.get(a, a), m.get(b, b)))) for a, b in edges))
        if best is None or key < best:
            best = key
    return best


def solve_by_representation(inst: Instance, repr_size_cap: int, ell: int | None = None,
                            work_cap: int | None = 10**6) -> ReprResult:
    """Guess a representation with at most ``repr_size_cap`` vertices, solve on it
    and realize it in the instance."""
    ell = inst.budget if ell is None else ell
    g_rooted = relabel_terminals(inst)
    roots = sorted(g_rooted.root_labels)
    p = len(roots)
    root_labels = {i: g_rooted.root_labels[v] for i, v in enumerate(roots)}
    roles = {i: g_rooted.roles[v] for i, v in enumerate(roots) if v in g_rooted.roles}
    tried = 0
    for extra in range(0, max(0, repr_size_cap - p) + 1):
        n = p + extra
        pairs = list(itertools.combinations(range(n), 2))
        seen = set()
        dead: list[int] = []
        for size in range(len(pairs) + 1):
            for chosen in itertools.combinations(range(len(pairs)), size):
                mask = sum(1 << i for i in chosen)
                if any(d & mask == d for d in dead):
                    continue
                edges = [pairs[i] for i in chosen]
                deg = [0] * n
                for a, b in edges:
                    deg[a] += 1
                    deg[b] += 1
                if any(deg[x] == 0 for x in range(p, n)):
                    continue
                key = _canonical(edges, p, n)
                if key in seen:
                    continue
                seen.add(key)
                tried += 1
                h = RootedGraph(Graph(n, edges), root_labels, roles)
                sched, why = realize_and_solve(inst, h, ell, work_cap)
                if sched is not None:
                    return ReprResult("solved", sched, tried, h)
                if why == "no-realization":
                    # every supergraph on the same vertices is unrealizable as well
                    for perm in itertools.permutations(range(p, n)):
                        m = dict(zip(range(p, n), perm))
                        img = {tuple(sorted((m.get(a, a), m.get(b, b)))) for a, b in edges}
                        dead.append(sum(1 << pairs.index(e) for e in img))
    return ReprResult("no-within-caps", None, tried)


# --- text format -------------------------------------------------------------


def serialize_representation(h: RootedGraph, nonroot_label: int) -> str:
    lines = ["REPR 1"]
    for v in range(h.graph.n):
        lines.append(f"v {v} {h.root_labels.get(v, nonroot_label)}")
    lines += [f"e {a} {b}" for a, b in h.graph.sorted_edges()]
    return "\n".join(lines) + "\n"


def parse_representation(text: str | bytes, nonroot_label: int | None = None) -> RootedGraph:
    """Vertices carrying ``nonroot_label`` (default: the largest label seen) are unrooted."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    labels: dict[int, int] = {}
    edges = []
    header = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if not header:
            if tok != ["REPR", "1"]:
                raise ValueError(f"line {lineno}: missing header 'REPR 1'")
            header = True
            continue
        try:
            nums = list(map(int, tok[1:]))
        except ValueError:
            raise ValueError(f"line {lineno}: non-integer field") from None
        if tok[0] == "v" and len(nums) == 2:
            if nums[0] in labels:
                raise ValueError(f"line {lineno}: duplicate vertex {nums[0]}")
            labels[nums[0]] = nums[1]
        elif tok[0] == "e" and len(nums) == 2:
            edges.append(tuple(nums))
        else:
            raise ValueError(f"line {lineno}: unknown record")
    if not header:
        raise ValueError("missing header 'REPR 1'")
    n = len(labels)
    if set(labels) != set(range(n)):
        raise ValueError("vertex ids must be 0..n-1")
    if nonroot_label is None:
        nonroot_label = max(labels.values(), default=0)
    roots = {v: lab for v, lab in labels.items() if lab != nonroot_label}
    return RootedGraph(Graph(n, edges), roots)


def representation_for_cli(inst: Instance, rep: Representation) -> str:
    return serialize_representation(rep.rooted, nonterminal_label(inst))


__all__ = [
    "Representation", "extract_representation", "project_schedule", "identity_realization",
    "schedule_from_realization", "find_realization", "solve_by_representation", "ReprResult",
    "serialize_representation", "parse_representation", "realize_and_solve", "CapExceeded",
]
