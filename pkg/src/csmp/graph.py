"""Immutable undirected graphs and the small amount of graph surgery the rest
of the package leans on: contraction, degree-2 chains, components and 0/1
vertex-weighted distances.

Vertices are dense integers ``0..n-1``.  Operations that delete or merge
vertices return an explicit old->new id map so callers can migrate robot
positions.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

INF = float("inf")


def _norm(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


class Graph:
    """Simple undirected graph on vertices ``0..n-1`` with optional labels."""

    __slots__ = ("n", "edges", "labels", "_adj", "_hash")

    def __init__(self, n: int, edges: Iterable[Sequence[int]] = (), labels: Mapping[int, object] | None = None):
        if n < 0:
            raise ValueError("negative vertex count")
        seen = set()
        adj: list[list[int]] = [[] for _ in range(n)]
        for e in edges:
            u, v = e
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge {u}-{v} out of range")
            key = _norm(u, v)
            if key in seen:
                raise ValueError(f"duplicate edge {key[0]}-{key[1]}")
            seen.add(key)
            adj[u].append(v)
            adj[v].append(u)
        labels = dict(labels or {})
        for v in labels:
            if not 0 <= v < n:
                raise ValueError(f"label on unknown vertex {v}")
        self.n = n
        self.edges = frozenset(seen)
        self.labels = labels
        self._adj = tuple(tuple(sorted(a)) for a in adj)

    # queries

    def adj(self, v: int) -> tuple[int, ...]:
        """Neighbours of ``v`` in increasing order."""
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return _norm(u, v) in self.edges

    def vertices(self) -> range:
        return range(self.n)

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def __len__(self):
        return self.n

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.edges == other.edges and self.labels == other.labels

    def __hash__(self):
        try:
            return self._hash
        except AttributeError:
            self._hash = hash((self.n, self.edges))
            return self._hash

    def __repr__(self):
        return f"Graph(n={self.n}, m={len(self.edges)})"

    # derived graphs

    def with_labels(self, labels: Mapping[int, object]) -> "Graph":
        return Graph(self.n, self.edges, labels)

    def edge_subgraph(self, edges: Iterable[Sequence[int]]) -> "Graph":
        """Same vertex set, only the given edges (which must exist here)."""
        keep = {_norm(*e) for e in edges}
        missing = keep - self.edges
        if missing:
            raise ValueError(f"edges not in graph: {sorted(missing)[:3]}")
        return Graph(self.n, keep)

    def induced_subgraph(self, vertices: Iterable[int]) -> tuple["Graph", dict[int, int]]:
        """Induced subgraph on ``vertices`` with ids compacted in increasing order."""
        keep = sorted(set(vertices))
        remap = {v: i for i, v in enumerate(keep)}
        edges = [(remap[u], remap[v]) for u, v in self.edges if u in remap and v in remap]
        labels = {remap[v]: lab for v, lab in self.labels.items() if v in remap}
        return Graph(len(keep), edges, labels), remap

    def remove_vertices(self, vertices: Iterable[int]) -> tuple["Graph", dict[int, int]]:
        gone = set(vertices)
        return self.induced_subgraph(v for v in range(self.n) if v not in gone)

    def active_vertices(self) -> set[int]:
        """Vertices incident to at least one edge."""
        return {v for e in self.edges for v in e}


@dataclass(frozen=True)
class RootedGraph:
    """A graph with distinguished roots carrying positive integer labels."""

    graph: Graph
    root_labels: Mapping[int, int] = field(default_factory=dict)
    # extra roles attached to a root (a vertex that is a start of one robot
    # and the target of another keeps its start label here plus the target label)
    roles: Mapping[int, tuple[int, ...]] = field(default_factory=dict)

    @property
    def roots(self) -> frozenset[int]:
        return frozenset(self.root_labels)

    def label_to_root(self) -> dict[int, int]:
        out = {}
        for v, lab in self.root_labels.items():
            out[lab] = v
            for extra in self.roles.get(v, ()):
                out[extra] = v
        return out


def contract_edge(g: Graph, e: Sequence[int]) -> tuple[Graph, dict[int, int]]:
    """Merge the endpoints of ``e``.  Returns the new graph and the old->new id map.

    The merged vertex takes the smaller of the two ids (before compaction).
    Labels survive; merging two differently labelled vertices is an error.
    """
    u, v = _norm(*e)
    if (u, v) not in g.edges:
        raise ValueError("edge not in graph")
    remap = {}
    for x in range(g.n):
        if x == v:
            continue
        remap[x] = x if x < v else x - 1
    remap[v] = remap[u]
    edges = set()
    for a, b in g.edges:
        a2, b2 = remap[a], remap[b]
        if a2 != b2:
            edges.add(_norm(a2, b2))
    labels = {}
    for x, lab in g.labels.items():
        y = remap[x]
        if y in labels and labels[y] != lab:
            raise ValueError(f"cannot merge vertices labelled {labels[y]!r} and {lab!r}")
        labels[y] = lab
    return Graph(g.n - 1, edges, labels), remap


def degree2_chains(g: Graph, forbidden: Iterable[int] = ()) -> list[tuple[int, ...]]:
    """Maximal paths whose internal vertices have degree 2 and are not forbidden.

    Each chain is returned as a vertex tuple.  A chain closing back on itself
    (a cycle hanging off one hub, or a whole cycle component) has equal first
    and last entries; a cycle made only of qualifying vertices is opened at its
    smallest vertex, which then plays the role of both endpoints.
    """
    forbidden = set(forbidden)

    def inner(x):
        return g.degree(x) == 2 and x not in forbidden

    seen: set[int] = set()
    chains = []
    for start in range(g.n):
        if start in seen or not inner(start):
            continue
        # walk both directions until a non-inner vertex or we loop around
        left, right = g.adj(start)
        body = [start]
        seen.add(start)
        closed = False

        def walk(prev, cur):
            nonlocal closed
            out = []
            while inner(cur):
                if cur == start:
                    closed = True
                    return out
                seen.add(cur)
                out.append(cur)
                a, b = g.adj(cur)
                prev, cur = cur, (b if a == prev else a)
            out.append(cur)
            return out

        fwd = walk(start, right)
        if closed:
            cyc = [start] + fwd
            m = cyc.index(min(cyc))
            cyc = cyc[m:] + cyc[:m]
            if cyc[1] > cyc[-1]:
                cyc = [cyc[0]] + cyc[:0:-1]
            chains.append(tuple(cyc + [cyc[0]]))
            continue
        back = walk(start, left)
        body = list(reversed(back)) + body + fwd
        if body[0] > body[-1] or (body[0] == body[-1] and len(body) > 2 and body[1] > body[-2]):
            body.reverse()
        chains.append(tuple(body))
    chains.sort()
    return chains


def weighted_distances(g: Graph, weight: Mapping[int, int], source: int,
                       allowed: Iterable[int] | None = None) -> tuple[list, list]:
    """0/1 vertex-weighted single-source distances (source weight included).

    Returns ``(dist, parent)``; unreachable vertices have ``INF``.  When
    ``allowed`` is given the search is confined to those vertices.
    """
    allow = None if allowed is None else set(allowed)
    dist: list = [INF] * g.n
    parent: list = [None] * g.n
    if allow is not None and source not in allow:
        return dist, parent
    dist[source] = weight.get(source, 0)
    dq = deque([source])
    done = [False] * g.n
    while dq:
        x = dq.popleft()
        if done[x]:
            continue
        done[x] = True
        for y in g.adj(x):
            if allow is not None and y not in allow:
                continue
            w = weight.get(y, 0)
            nd = dist[x] + w
            if nd < dist[y]:
                dist[y] = nd
                parent[y] = x
                if w:
                    dq.append(y)
                else:
                    dq.appendleft(y)
    return dist, parent


def weighted_distance(g: Graph, weight: Mapping[int, int], v: int, w: int) -> float:
    """Fewest weight-1 vertices on a v-w path, endpoints included."""
    return weighted_distances(g, weight, v)[0][w]


def weighted_path(g: Graph, weight: Mapping[int, int], v: int, w: int,
                  allowed: Iterable[int] | None = None) -> list[int] | None:
    dist, parent = weighted_distances(g, weight, v, allowed)
    if dist[w] == INF:
        return None
    path = [w]
    while path[-1] != v:
        path.append(parent[path[-1]])
    return path[::-1]


def components(g: Graph, keep: Iterable[int]) -> list[set[int]]:
    """Connected components of the subgraph induced by ``keep``, ordered by min vertex."""
    keep = set(keep)
    out = []
    seen: set[int] = set()
    for v in sorted(keep):
        if v in seen:
            continue
        comp = {v}
        seen.add(v)
        stack = [v]
        while stack:
            x = stack.pop()
            for y in g.adj(x):
                if y in keep and y not in seen:
                    seen.add(y)
                    comp.add(y)
                    stack.append(y)
        out.append(comp)
    return out


def bfs_distances(g: Graph, source: int, allowed: Iterable[int] | None = None) -> dict[int, int]:
    allow = None if allowed is None else set(allowed)
    dist = {source: 0}
    dq = deque([source])
    while dq:
        x = dq.popleft()
        for y in g.adj(x):
            if y not in dist and (allow is None or y in allow):
                dist[y] = dist[x] + 1
                dq.append(y)
    return dist


def shortest_path(g: Graph, a: int, b: int, allowed: Iterable[int] | None = None) -> list[int] | None:
    """Lexicographically smallest among the shortest a-b paths.

    With ``allowed`` the interior is restricted to those vertices (the
    endpoints are always permitted).
    """
    allow = None if allowed is None else set(allowed) | {a, b}
    back = bfs_distances(g, b, allow)
    if a not in back:
        return None
    path = [a]
    while path[-1] != b:
        x = path[-1]
        path.append(min(y for y in g.adj(x) if back.get(y) == back[x] - 1))
    return path


def is_path(g: Graph, vertices: Sequence[int]) -> bool:
    if len(set(vertices)) != len(vertices):
        return False
    return all(g.has_edge(a, b) for a, b in zip(vertices, vertices[1:]))


def grid_graph(rows: int, cols: int) -> Graph:
    """``rows x cols`` grid; vertex ``r*cols + c``."""
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return Graph(rows * cols, edges)


def is_connected(g: Graph) -> bool:
    return g.n == 0 or len(components(g, range(g.n))) == 1


# --- planarity sanity filter ---------------------------------------------------


def _smoothed(g: Graph) -> Graph:
    """Drop degree<=1 vertices and suppress degree-2 vertices until stable.

    Both operations preserve K5/K3,3 subdivisions (their branch vertices have
    degree >= 3).  Suppressing a degree-2 vertex whose neighbours are already
    adjacent just deletes it.
    """
    adj = {v: set(g.adj(v)) for v in range(g.n)}
    changed = True
    while changed:
        changed = False
        for v in list(adj):
            d = len(adj[v])
            if d <= 1:
                for y in adj[v]:
                    adj[y].discard(v)
                del adj[v]
                changed = True
            elif d == 2:
                a, b = adj[v]
                adj[a].discard(v)
                adj[b].discard(v)
                del adj[v]
                adj[a].add(b)
                adj[b].add(a)
                changed = True
    order = sorted(adj)
    idx = {v: i for i, v in enumerate(order)}
    edges = {_norm(idx[a], idx[b]) for a in adj for b in adj[a]}
    return Graph(len(order), edges)


def _has_subdivision(g: Graph, sides: list[list[int]], pattern_edges: list[tuple[int, int]], min_deg: int) -> bool:
    """Search for a subdivision of a complete (multi)partite pattern.

    ``sides`` groups pattern vertices into interchangeable classes; images are
    enumerated as increasing tuples within a class to skip symmetric copies.
    """
    from .minors import route_edges, WorkBudget

    cand = [v for v in range(g.n) if g.degree(v) >= min_deg]
    sizes = [len(s) for s in sides]
    budget = WorkBudget(None)

    def assignments(i, used):
        if i == len(sides):
            yield {}
            return
        pool = [v for v in cand if v not in used]
        for combo in itertools.combinations(pool, sizes[i]):
            # two equal-size classes of K3,3 are interchangeable too
            if i == 1 and len(sides) == 2 and sizes[0] == sizes[1] and combo[0] < min(used):
                continue
            for rest in assignments(i + 1, used | set(combo)):
                m = dict(zip(sides[i], combo))
                m.update(rest)
                yield m

    for phi in assignments(0, set()):
        if route_edges(g, pattern_edges, phi, budget) is not None:
            return True
    return False


def planarity_sanity(g: Graph) -> str:
    """Cheap necessary-condition check: ``"plausible"`` or ``"rejected"``.

    Uses the Euler edge bound, and for graphs with at most 10 vertices an
    exhaustive search for a K5 or K3,3 subdivision.
    """
    if g.n >= 3 and len(g.edges) > 3 * g.n - 6:
        return "rejected"
    if g.n <= 10:
        h = _smoothed(g)
        k5 = list(itertools.combinations(range(5), 2))
        k33 = [(a, b) for a in range(3) for b in range(3, 6)]
        if h.n >= 5 and _has_subdivision(h, [list(range(5))], k5, 4):
            return "rejected"
        if h.n >= 6 and _has_subdivision(h, [[0, 1, 2], [3, 4, 5]], k33, 3):
            return "rejected"
    return "plausible"
