"""Instance builders: grids, the Steiner-tree gadget, small random graphs and
the corridor fixtures used to exercise the contraction loop."""

from __future__ import annotations

import itertools
import logging
import random

from .graph import Graph, grid_graph
from .instance import Instance

log = logging.getLogger(__name__)


def grid_instance(rows: int, cols: int, pattern: str = "random", seed: int | None = None, *,
                  density: float = 0.3, k_dest: int = 1, budget: int = 1,
                  dest=None, free=None) -> Instance:
    """Robots on a ``rows x cols`` grid (vertex ``r*cols + c``).

    ``random``: ``k_dest`` destination robots and a ``density`` fraction of
    blockers on distinct random vertices; needs ``seed``.
    ``corridor``: the middle row is free except for one blocker next to its
    right end; the main robot starts on the left end and wants the right end.
    Everything off the middle row is occupied.
    ``explicit``: take ``dest`` and ``free`` as given.
    """
    if rows * cols < 2:
        raise ValueError("grid needs at least two vertices")
    g = grid_graph(rows, cols)
    n = rows * cols
    if pattern == "explicit":
        return Instance(g, tuple(dest or ()), tuple(free or ()), budget, planar=True)
    if pattern == "corridor":
        mid = rows // 2
        row = [mid * cols + c for c in range(cols)]
        if cols < 3:
            raise ValueError("corridor needs at least three columns")
        blockers = sorted((set(range(n)) - set(row)) | {row[-2]})
        return Instance(g, ((row[0], row[-1]),), tuple(blockers), budget, planar=True)
    if pattern != "random":
        raise ValueError(f"unknown pattern {pattern!r}")
    if seed is None:
        raise ValueError("random pattern needs a seed")
    rng = random.Random(seed)
    n_free = int(round(density * n))
    if k_dest + n_free >= n:
        raise ValueError("over-occupied: no free vertex left")
    verts = list(range(n))
    rng.shuffle(verts)
    starts = verts[:k_dest + n_free]
    targets = rng.sample(range(n), k_dest)
    return Instance(g, tuple(zip(starts[:k_dest], targets)), tuple(sorted(starts[k_dest:])), budget, planar=True)


# --- Steiner gadget ----------------------------------------------------------------


def normalize_points(points) -> list[tuple[int, int]]:
    """Distinct points shifted so the smallest x and y are 0, leftmost first."""
    pts = sorted({(int(x), int(y)) for x, y in points})
    if not pts:
        raise ValueError("need at least one point")
    mx = min(x for x, _ in pts)
    my = min(y for _, y in pts)
    if (mx, my) != (0, 0):
        log.info("points shifted by (%d, %d)", -mx, -my)
    return sorted((x - mx, y - my) for x, y in pts)


def rst_gadget(points, ell: int) -> Instance:
    """Main robot on the far end of an approach path; every vertex except the
    main robot's and the points holds a blocker.  Budget ``ell + 1``.

    Vertex ids: box point ``(x, y)`` is ``y*(W+1) + x``; then ``s, q_1, ..., q_{n-1}``.
    """
    pts = normalize_points(points)
    n = len(pts)
    W = max(x for x, _ in pts)
    H = max(y for _, y in pts)
    box = (W + 1) * (H + 1)

    def vid(x, y):
        return y * (W + 1) + x

    edges = []
    for y in range(H + 1):
        for x in range(W + 1):
            if x < W:
                edges.append((vid(x, y), vid(x + 1, y)))
            if y < H:
                edges.append((vid(x, y), vid(x, y + 1)))
    p1 = pts[0]
    approach = list(range(box, box + n))        # s, q_1 .. q_{n-1}
    edges += list(zip(approach, approach[1:]))
    edges.append((approach[-1], vid(*p1)))
    g = Graph(box + n, edges)
    s = approach[0]
    terms = {vid(x, y) for x, y in pts}
    blockers = tuple(v for v in range(box + n) if v != s and v not in terms)
    return Instance(g, ((s, vid(*p1)),), blockers, ell + 1, planar=True)


def steiner_oracle(points) -> int:
    """Fewest unit edges of a connected subgrid of the bounding box touching every point."""
    pts = normalize_points(points)
    if len(pts) > 4:
        raise ValueError("scale exceeded: at most 4 points")
    W = max(x for x, _ in pts)
    H = max(y for _, y in pts)
    if W > 3 or H > 3:
        raise ValueError("scale exceeded: box larger than 4x4")
    cells = [(x, y) for x in range(W + 1) for y in range(H + 1)]
    must = set(pts)
    extra = [c for c in cells if c not in must]

    def connected(vs):
        vs = set(vs)
        start = next(iter(vs))
        seen = {start}
        todo = [start]
        while todo:
            x, y = todo.pop()
            for nb in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
                if nb in vs and nb not in seen:
                    seen.add(nb)
                    todo.append(nb)
        return len(seen) == len(vs)

    for size in range(len(extra) + 1):
        for chosen in itertools.combinations(extra, size):
            if connected(must | set(chosen)):
                # a connected subgrid on m cells has a spanning tree with m-1 edges
                return len(must) + size - 1
    raise AssertionError("bounding box is always connected")


# --- small random instances ------------------------------------------------------------------


def random_instance(seed: int, max_vertices: int = 12, max_dest: int = 3, max_robots: int | None = None,
                    max_budget: int = 6, extra_edge_p: float = 0.25, min_vertices: int = 3) -> Instance:
    """Random connected graph with a few robots.  Deterministic in ``seed``."""
    rng = random.Random(seed)
    n = rng.randint(min_vertices, max_vertices)
    edges = set()
    for v in range(1, n):
        u = rng.randrange(v)
        edges.add((u, v))
    for u, v in itertools.combinations(range(n), 2):
        if rng.random() < extra_edge_p / max(1, n // 4):
            edges.add((u, v))
    max_robots = max_robots or max(1, n // 3)
    k = rng.randint(1, max(1, min(max_robots, n - 1)))
    m = rng.randint(1, min(max_dest, k))
    starts = rng.sample(range(n), k)
    targets = rng.sample(range(n), m)
    budget = rng.randint(1, max_budget)
    return Instance(Graph(n, sorted(edges)), tuple(zip(starts[:m], targets)), tuple(starts[m:]), budget)


def chain_appended(seed: int, chain_len: int, max_dest: int = 2, max_budget: int = 5) -> Instance:
    """Small random instance with a terminal-free path of ``chain_len`` vertices
    hung between two of its vertices."""
    base = random_instance(seed, max_vertices=7, max_dest=max_dest, max_robots=2, max_budget=max_budget)
    rng = random.Random(seed * 7919 + chain_len)
    n = base.graph.n
    a = rng.randrange(n)
    b = rng.randrange(n)
    chain = list(range(n, n + chain_len))
    edges = list(base.graph.edges) + list(zip(chain, chain[1:]))
    edges += [(a, chain[0])]
    if b != a or chain_len > 1:
        edges += [(chain[-1], b)]
    edges = sorted({tuple(sorted(e)) for e in edges if e[0] != e[1]})
    return Instance(Graph(n + chain_len, edges), base.dest, base.free, base.budget)


def star_components(seed: int) -> Instance:
    """Hub with many look-alike pendant pieces around a small routing task.

    The main robot goes ``0 -> hub -> 2`` past a blocker on the hub; a few
    more blockers sit inside some pendants.  There are at least ``3k+1``
    pendants sharing the hub as their only neighbour, so one terminal-free
    pendant can always be pruned with ``X = {hub}``.
    """
    rng = random.Random(seed)
    shape = rng.choice(["leaf", "pair", "triangle", "path3"])
    ell = rng.randint(1, 3)
    extra = rng.randint(0, 2)
    k = 2 + extra
    copies = 3 * k + 1 + rng.randint(0, 2) - 2      # s and t count as pendants too
    edges = [(0, 1), (1, 2)]
    n = 3
    pendants = []
    for _ in range(copies):
        if shape == "leaf":
            piece = [n]
        elif shape == "pair":
            piece = [n, n + 1]
            edges.append((n, n + 1))
        elif shape == "triangle":
            piece = [n, n + 1]
            edges += [(1, n + 1), (n, n + 1)]
        else:
            piece = [n, n + 1, n + 2]
            edges += [(n, n + 1), (n + 1, n + 2)]
        edges.append((1, n))
        pendants.append(piece)
        n += len(piece)
    blockers = [1] + [rng.choice(p) for p in rng.sample(pendants, extra)]
    return Instance(Graph(n, edges), ((0, 2),), tuple(sorted(blockers)), ell)


# --- corridor fixtures -------------------------------------------------------------------------


def corridor_fixture(length: int, family: str = "plain", ell: int = 2, pocket: bool = True,
                     seed: int = 0) -> Instance:
    """A long free corridor between the main robot and a guarded target.

    Layout: ``s - c_1 - ... - c_length - b - t`` with a blocker on ``b``.
    With ``pocket`` there is a free vertex hanging off ``b`` where the blocker
    can step aside; without it the target cannot be reached.  ``ell`` extra
    blockers guard the target when ``ell > 2`` so the budget stays tight.

    Families add planar decoration along the corridor:
    ``plain``: nothing.
    ``bays``: blockers hanging off random corridor vertices, some with a free
    vertex behind them.
    ``detour``: a loop from c_i to c_j through two blockers.
    """
    rng = random.Random(seed)
    edges = []
    s = 0
    cor = list(range(1, length + 1))
    edges.append((s, cor[0]))
    edges += list(zip(cor, cor[1:]))
    n = length + 1
    free_robots = []
    # guard chain: ell-1 blockers in a row before t, the first one may step aside
    guards = list(range(n, n + (ell - 1 if pocket else max(1, ell - 1))))
    n += len(guards)
    chain = [cor[-1]] + guards
    t = n
    n += 1
    edges += list(zip(chain, chain[1:] + [t]))
    free_robots += guards
    if pocket:
        for gd in guards:
            edges.append((gd, n))
            n += 1
    if family == "bays":
        spots = rng.sample(cor[2:-2], min(3, len(cor) - 4))
        for c in sorted(spots):
            edges.append((c, n))
            free_robots.append(n)
            if rng.random() < 0.5:
                edges.append((n, n + 1))
                n += 2
            else:
                n += 1
    elif family == "detour":
        i = rng.randrange(2, length // 3)
        j = rng.randrange(2 * length // 3, length - 2)
        b1, mid, b2 = n, n + 1, n + 2
        n += 3
        edges += [(cor[i], b1), (b1, mid), (mid, b2), (b2, cor[j])]
        free_robots += [b1, b2]
    elif family != "plain":
        raise ValueError(f"unknown family {family!r}")
    return Instance(Graph(n, edges), ((s, t),), tuple(sorted(free_robots)), ell, planar=True)


__all__ = [
    "grid_instance", "rst_gadget", "steiner_oracle", "normalize_points", "random_instance",
    "chain_appended", "star_components", "corridor_fixture",
]
