"""Reference search that shares no code with :mod:`csmp.solver`.

Every robot keeps its identity (no canonicalisation), states are plain
position tuples, and reachability is a fresh flood fill over Python sets.
It is slow on purpose-built large instances and meant only as a check.
"""

from __future__ import annotations

from .instance import Instance


def _flood(nbrs, origin, blocked):
    seen = {origin}
    todo = [origin]
    while todo:
        x = todo.pop()
        for y in nbrs[x]:
            if y not in seen and y not in blocked:
                seen.add(y)
                todo.append(y)
    seen.discard(origin)
    return seen


def oracle_makespan(inst: Instance, budget: int | None = None, max_states: int = 5 * 10**6) -> int | None:
    """Optimal makespan if it is at most ``budget`` (default: the instance's), else ``None``.

    Raises ``RuntimeError`` when ``max_states`` is exceeded.
    """
    budget = inst.budget if budget is None else budget
    nbrs = {v: set() for v in range(inst.graph.n)}
    for a, b in inst.graph.edges:
        nbrs[a].add(b)
        nbrs[b].add(a)
    m = len(inst.dest)
    want = tuple(t for _, t in inst.dest)
    start = tuple(inst.starts)
    if start[:m] == want:
        return 0
    seen = {start}
    layer = [start]
    for depth in range(1, budget + 1):
        new_layer = []
        for state in layer:
            taken = set(state)
            for r, v in enumerate(state):
                for w in _flood(nbrs, v, taken):
                    nxt = state[:r] + (w,) + state[r + 1:]
                    if nxt in seen:
                        continue
                    if nxt[:m] == want:
                        return depth
                    seen.add(nxt)
                    new_layer.append(nxt)
            if len(seen) > max_states:
                raise RuntimeError("oracle state cap exceeded")
        if not new_layer:
            return None
        layer = new_layer
    return None


def oracle_decision(inst: Instance, budget: int | None = None) -> bool:
    return oracle_makespan(inst, budget) is not None
