import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from helpers import nx_graph, simulate

from csmp.generators import random_instance
from csmp.graph import Graph, grid_graph
from csmp.instance import Instance
from csmp.schedule import (Move, Schedule, ScheduleStructureError, corridor_paths, crossing_points,
                           important_vertices, intersection_vertices, parse_schedule, positions,
                           serialize_schedule, traversed_subgraph, validate, waiting_vertices)
from csmp.solver import solve_optimal


def test_c4_detour_is_valid(c4):
    s = Schedule((Move(0, (0, 3, 2)),))
    rep = validate(c4, s)
    assert rep.valid and s.makespan == 1


def test_c4_through_blocker(c4):
    rep = validate(c4, Schedule((Move(0, (0, 1, 2)),)))
    assert not rep.valid
    assert rep.violation.message == "path hits stationary robot at 1"


def test_empty_schedule_at_target():
    inst = Instance(Graph(2, [(0, 1)]), ((1, 1),), (), 0)
    assert validate(inst, Schedule(())).valid


@pytest.mark.parametrize("moves, rule", [
    ([(0, (0, 3, 2)), (0, (2, 3))], "over-budget"),
    ([(0, (0,))], "short-path"),
    ([(0, (2, 3))], "wrong-origin"),
    ([(0, (0, 3, 0, 3))], "not-simple"),
    ([(0, (0, 2))], "not-a-path"),
    ([(1, (1, 2))], "unfinished"),
])
def test_violation_rules(c4, moves, rule):
    rep = validate(c4, Schedule(tuple(Move(r, p) for r, p in moves)))
    assert rep.violation.rule == rule


def test_structural_errors(c4):
    with pytest.raises(ScheduleStructureError):
        validate(c4, Schedule((Move(5, (0, 3)),)))
    with pytest.raises(ScheduleStructureError):
        validate(c4, Schedule((Move(0, (0, 9)),)))


def test_text_format_round_trip():
    s = Schedule((Move(1, (1, 2)), Move(0, (0, 1, 3))))
    assert parse_schedule(serialize_schedule(s)) == s
    with pytest.raises(ScheduleStructureError):
        parse_schedule("SCHEDULE 1\ns 2 0 0 1\ns 2 0 1 0\n")
    with pytest.raises(ScheduleStructureError):
        parse_schedule("s 1 0 0 1\n")


def test_traversed_subgraph_examples():
    inst = Instance(Graph(4, [(0, 1), (1, 2), (2, 3)]), ((0, 3),), (), 1)
    g = traversed_subgraph(inst, Schedule((Move(0, (0, 1, 2, 3)),)))
    assert sorted(g.edges) == [(0, 1), (1, 2), (2, 3)]
    inst2 = Instance(Graph(4, [(0, 1), (1, 2), (2, 3)]), ((0, 2),), (3,), 2)
    s = Schedule((Move(0, (0, 1)), Move(0, (1, 2))))
    assert len(traversed_subgraph(inst2, s).edges) == 2
    s2 = Schedule((Move(0, (0, 1, 2)), Move(0, (2, 1))))
    assert sorted(traversed_subgraph(inst2, s2).edges) == [(0, 1), (1, 2)]


def figure_one_style():
    """Two destination robots and two blockers on a 3x4 grid; the schedule
    first clears both blockers, then moves the two robots."""
    g = grid_graph(3, 4)
    # 0  1  2  3
    # 4  5  6  7
    # 8  9 10 11
    inst = Instance(g, ((4, 7), (8, 11)), (5, 9), 4)
    s = Schedule((Move(2, (5, 1)), Move(3, (9, 10, 6, 2)), Move(0, (4, 5, 6, 7)), Move(1, (8, 9, 10, 11))))
    return inst, s


def test_figure_one_style_traversal_connected():
    inst, s = figure_one_style()
    assert validate(inst, s).valid
    assert solve_optimal(inst).makespan == 2      # the top row is a shortcut
    for sched in (s, solve_optimal(inst).schedule):
        g = traversed_subgraph(inst, sched)
        verts = {x for e in g.edges for x in e}
        assert nx.is_connected(nx_graph(g).subgraph(verts))


def test_waiting_one_move():
    inst = Instance(Graph(4, [(0, 1), (1, 2), (2, 3)]), ((0, 2),), (3,), 1)
    s = Schedule((Move(0, (0, 1, 2)),))
    assert waiting_vertices(inst, s, 1) == {3, 2}


def test_intersection_empty_on_simple_path():
    inst = Instance(Graph(4, [(0, 1), (1, 2), (2, 3)]), ((0, 3),), (), 1)
    s = Schedule((Move(0, (0, 1, 2, 3)),))
    assert intersection_vertices(inst, s, 1) == set()
    assert important_vertices(inst, s, 1) == {0, 3}


def test_crossing_points():
    # two paths sharing the stretch 2-3-4: the ends of the shared stretch branch
    p1 = (0, 2, 3, 4, 5)
    p2 = (1, 2, 3, 4, 6)
    assert crossing_points(p1, p2) == {2, 4}
    assert crossing_points((0, 1), (2, 3)) == set()


def test_corridor_paths_join_important_vertices():
    inst, s = figure_one_style()
    imp = important_vertices(inst, s, len(s))
    for p in corridor_paths(inst, s, len(s)):
        assert p[0] in imp and p[-1] in imp and p[0] != p[-1]
        assert not set(p[1:-1]) & imp


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6), st.data())
def test_validate_matches_simulator(seed, data):
    inst = random_instance(seed, max_vertices=8)
    n = inst.graph.n
    moves = data.draw(st.lists(
        st.tuples(st.integers(0, inst.k - 1), st.lists(st.integers(0, n - 1), min_size=1, max_size=5)),
        max_size=4))
    s = Schedule(tuple(Move(r, tuple(p)) for r, p in moves))
    assert ("valid" if validate(inst, s).valid else "invalid") == simulate(inst, moves)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_waiting_bound_on_solver_output(seed):
    inst = random_instance(seed, max_vertices=10, max_robots=5)
    res = solve_optimal(inst)
    if res.schedule is None:
        return
    s = res.schedule
    for j in range(1, len(s) + 1):
        assert len(waiting_vertices(inst, s, j)) <= inst.k + j
    pos = positions(inst, s)
    assert list(pos[-1][:len(inst.dest)]) == list(inst.targets)
