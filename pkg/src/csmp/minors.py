"""Backtracking search for rooted topological minors.

This stands in for the f(|H|)-time containment algorithm: exhaustive, but
deterministic and bounded by an explicit work budget.  Vertices of ``H`` are
mapped in id order with candidates ascending, and edge paths are tried
shortest first, so the first realization found is the lexicographically
first one under that order.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .graph import Graph, RootedGraph


class CapExceeded(RuntimeError):
    """A search ran out of its work budget."""

    def __init__(self, what="search"):
        super().__init__(f"cap-exceeded: {what}")


class WorkBudget:
    def __init__(self, cap: int | None):
        self.cap = cap
        self.used = 0

    def tick(self, n: int = 1) -> None:
        self.used += n
        if self.cap is not None and self.used > self.cap:
            raise CapExceeded("work budget")


@dataclass
class Realization:
    """Vertex images ``phi`` and, per edge ``(a, b)`` with ``a < b``, a path ``psi``
    running from ``phi[a]`` to ``phi[b]``."""

    phi: dict[int, int]
    psi: dict[tuple[int, int], tuple[int, ...]] = field(default_factory=dict)

    def image_vertices(self) -> set[int]:
        out = set(self.phi.values())
        for p in self.psi.values():
            out.update(p)
        return out


def _reach(g: Graph, a: int, b: int, blocked) -> bool:
    if a == b:
        return True
    seen = {a}
    dq = deque([a])
    while dq:
        x = dq.popleft()
        for y in g.adj(x):
            if y == b:
                return True
            if y not in seen and y not in blocked:
                seen.add(y)
                dq.append(y)
    return False


def _paths(g: Graph, a: int, b: int, blocked, budget: WorkBudget):
    """Simple a-b paths with interior avoiding ``blocked``, shortest first."""
    dist = {b: 0}
    dq = deque([b])
    while dq:
        x = dq.popleft()
        for y in g.adj(x):
            if y not in dist and (y not in blocked or y == a):
                dist[y] = dist[x] + 1
                if y != a:
                    dq.append(y)
    if a not in dist:
        return
    room = sum(1 for v in dist if v not in (a, b))

    for length in range(dist[a], room + 2):
        path = [a]
        on = {a}

        def dfs(x, left):
            budget.tick()
            if left == 1:
                if g.has_edge(x, b):
                    yield tuple(path) + (b,)
                return
            for y in g.adj(x):
                if y == b or y in on or y in blocked or dist.get(y, left + 1) > left - 1:
                    continue
                path.append(y)
                on.add(y)
                yield from dfs(y, left - 1)
                path.pop()
                on.discard(y)

        yield from dfs(a, length)


def route_edges(g: Graph, edges, phi: dict[int, int], budget: WorkBudget):
    """Pairwise internally disjoint paths for ``edges`` under vertex map ``phi``.

    Interiors avoid every image vertex.  Returns ``{edge: path}`` or ``None``.
    """
    edges = [tuple(e) for e in edges]
    images = set(phi.values())

    def feasible(i, used):
        blocked = images | used
        return all(_reach(g, phi[u], phi[v], blocked) for u, v in edges[i:])

    def rec(i, used):
        if i == len(edges):
            return {}
        if not feasible(i, used):
            return None
        u, v = edges[i]
        for p in _paths(g, phi[u], phi[v], images | used, budget):
            rest = rec(i + 1, used | set(p[1:-1]))
            if rest is not None:
                rest[edges[i]] = p
                return rest
        return None

    return rec(0, frozenset())


def find_realization(h: RootedGraph, g: RootedGraph, work_cap: int | None = 10**6,
                     strict: bool = True) -> Realization | None:
    """First realization of ``h`` in ``g`` as a rooted topological minor.

    Roots of ``h`` must land on roots of ``g`` with the same label.  With
    ``strict`` (the default) unrooted vertices of ``h`` must land on unrooted
    vertices of ``g``, which is how the shared ``p+1`` label of non-terminals
    behaves.  Raises ``CapExceeded`` when the budget runs out.
    """
    H, G = h.graph, g.graph
    budget = WorkBudget(work_cap)
    order = list(range(H.n))
    h_edges = sorted(H.edges)
    g_roots_by_label: dict[int, list[int]] = {}
    for v, lab in g.root_labels.items():
        g_roots_by_label.setdefault(lab, []).append(v)

    cands = []
    for x in order:
        if x in h.root_labels:
            pool = sorted(g_roots_by_label.get(h.root_labels[x], []))
        elif strict:
            pool = [c for c in range(G.n) if c not in g.root_labels]
        else:
            pool = list(range(G.n))
        pool = [c for c in pool if G.degree(c) >= H.degree(x)]
        if not pool:
            return None
        cands.append(pool)

    phi: dict[int, int] = {}
    used: set[int] = set()

    def consistent(x, c):
        # every already-mapped neighbour must still be reachable around the other images
        for y in H.adj(x):
            if y in phi:
                blocked = used - {phi[y]}
                if not _reach(G, c, phi[y], blocked):
                    return False
        return True

    def assign(i):
        if i == len(order):
            psi = route_edges(G, h_edges, phi, budget)
            if psi is None:
                return None
            return Realization(dict(phi), psi)
        x = order[i]
        for c in cands[i]:
            if c in used:
                continue
            budget.tick()
            if not consistent(x, c):
                continue
            phi[x] = c
            used.add(c)
            r = assign(i + 1)
            if r is not None:
                return r
            del phi[x]
            used.discard(c)
        return None

    return assign(0)


def check_realization(h: RootedGraph, g: RootedGraph, r: Realization, strict: bool = True) -> list[str]:
    """All ways ``r`` fails to be a realization (empty list when it is one)."""
    H, G = h.graph, g.graph
    problems = []
    if set(r.phi) != set(range(H.n)):
        problems.append("phi is not total")
    if len(set(r.phi.values())) != len(r.phi):
        problems.append("phi is not injective")
    for x, lab in h.root_labels.items():
        if g.root_labels.get(r.phi.get(x)) != lab:
            problems.append(f"root {x} label not preserved")
    if strict:
        for x in range(H.n):
            if x not in h.root_labels and r.phi.get(x) in g.root_labels:
                problems.append(f"unrooted {x} sent to a root")
    if set(r.psi) != set(H.edges):
        problems.append("psi does not cover the edges")
    images = set(r.phi.values())
    interiors: dict[int, tuple] = {}
    for e, p in r.psi.items():
        a, b = e
        if not p or p[0] != r.phi.get(a) or p[-1] != r.phi.get(b):
            problems.append(f"path for {e} has wrong ends")
        if len(set(p)) != len(p) or any(not G.has_edge(x, y) for x, y in zip(p, p[1:])):
            problems.append(f"path for {e} is not a simple path")
        for z in p[1:-1]:
            if z in images:
                problems.append(f"image vertex {z} inside path for {e}")
            if z in interiors:
                problems.append(f"paths for {interiors[z]} and {e} share {z}")
            interiors[z] = e
    return problems
