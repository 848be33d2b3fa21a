"""Test-only references that share no code with the package."""


def simulate(inst, moves, check_budget=True):
    """Replay ``moves`` (pairs robot, path) one edge at a time.

    Returns "valid", "invalid" or "structural" (unknown robot or vertex).
    """
    n = inst.graph.n
    edges = {frozenset(e) for e in inst.graph.edges}
    pos = [s for s, _ in inst.dest] + list(inst.free)
    for robot, path in moves:
        if not 0 <= robot < len(pos) or any(not 0 <= v < n for v in path):
            return "structural"
    if check_budget and len(moves) > inst.budget:
        return "invalid"
    for robot, path in moves:
        if len(path) < 2 or path[0] != pos[robot] or len(set(path)) != len(path):
            return "invalid"
        others = set(pos)
        others.discard(pos[robot])
        for a, b in zip(path, path[1:]):
            if frozenset((a, b)) not in edges or b in others:
                return "invalid"
        pos[robot] = path[-1]
    for i, (_, t) in enumerate(inst.dest):
        if pos[i] != t:
            return "invalid"
    return "valid"


def nx_graph(g):
    import networkx as nx
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges)
    return h
