import itertools

import pytest
from hypothesis import given, settings, strategies as st

from csmp.generators import grid_instance, random_instance
from csmp.graph import Graph, RootedGraph
from csmp.instance import Instance, nonterminal_label, relabel_terminals
from csmp.minors import check_realization, find_realization
from csmp.representation import (extract_representation, identity_realization, parse_representation,
                                 project_schedule, realize_and_solve, schedule_from_realization,
                                 serialize_representation, solve_by_representation)
from csmp.schedule import Move, Schedule, validate
from csmp.solver import solve_optimal


def test_single_move_gives_one_edge():
    inst = Instance(Graph(4, [(0, 1), (1, 2), (2, 3)]), ((0, 3),), (), 1)
    rep = extract_representation(inst, Schedule((Move(0, (0, 1, 2, 3)),)))
    assert rep.vertex_of == (0, 3)
    assert rep.graph.edges == {(0, 1)}
    assert rep.corridors[(0, 1)] == [(0, 1, 2, 3)]


def test_rejects_invalid_schedule(c4):
    with pytest.raises(ValueError):
        extract_representation(c4, Schedule((Move(0, (0, 1, 2)),)))


def test_k4_not_in_a_tree():
    k4 = RootedGraph(Graph(4, list(itertools.combinations(range(4), 2))), {})
    tree = RootedGraph(Graph(7, [(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)]), {})
    assert find_realization(k4, tree) is None


def test_labelled_edge_into_path():
    h = RootedGraph(Graph(2, [(0, 1)]), {0: 1, 1: 2})
    g = RootedGraph(Graph(5, [(i, i + 1) for i in range(4)]), {0: 1, 4: 2})
    r = find_realization(h, g)
    assert r.phi == {0: 0, 1: 4} and r.psi[(0, 1)] == (0, 1, 2, 3, 4)
    assert check_realization(h, g, r) == []
    # swapped labels cannot be matched
    assert find_realization(RootedGraph(h.graph, {0: 1, 1: 3}), g) is None


def test_check_realization_reports_problems():
    h = RootedGraph(Graph(2, [(0, 1)]), {0: 1, 1: 2})
    g = RootedGraph(Graph(3, [(0, 1), (1, 2)]), {0: 1, 2: 2})
    r = find_realization(h, g)
    r.psi[(0, 1)] = (0, 2)
    assert any("simple path" in p for p in check_realization(h, g, r))


def test_identity_realization(c4):
    s = solve_optimal(c4).schedule
    rep = extract_representation(c4, s)
    r = identity_realization(rep)
    assert check_realization(rep.rooted, relabel_terminals(c4), r) == []
    assert schedule_from_realization(c4, rep.rooted, r, project_schedule(rep, s)) == s


def test_two_corridors_between_the_same_pair():
    # 6-cycle: the robot goes out along one side and comes back along the other
    inst = Instance(Graph(6, [(i, (i + 1) % 6) for i in range(6)]), ((0, 0),), (), 2)
    s = Schedule((Move(0, (0, 1, 2, 3)), Move(0, (3, 4, 5, 0))))
    rep = extract_representation(inst, s)
    assert rep.vertex_of == (0, 3)
    assert rep.has_parallel and len(rep.corridors[(0, 1)]) == 2
    new = schedule_from_realization(inst, rep.rooted, identity_realization(rep), project_schedule(rep, s))
    assert validate(inst, new).valid and len(new) == 2


def test_solve_c4_by_representation(c4):
    res = solve_by_representation(c4, 5)
    assert res.status == "solved" and len(res.schedule) == 1
    assert validate(c4, res.schedule).valid


def test_no_instance_by_representation():
    inst = Instance(Graph(4, [(0, 1), (1, 2), (2, 3)]), ((0, 3), (3, 0)), (), 3)
    assert solve_by_representation(inst, 5).status == "no-within-caps"


def test_realize_and_solve_reasons(c4):
    h = RootedGraph(Graph(3, [(0, 2), (1, 2)]), {0: 1, 1: 2, 2: 3})    # blocker root in the middle
    sched, why = realize_and_solve(c4, h, 1)
    assert sched is None and why == "infeasible-on-h"


def test_text_round_trip(c4):
    rep = extract_representation(c4, solve_optimal(c4).schedule)
    text = serialize_representation(rep.rooted, nonterminal_label(c4))
    back = parse_representation(text, nonterminal_label(c4))
    assert back.graph == rep.graph and dict(back.root_labels) == dict(rep.rooted.root_labels)
    assert serialize_representation(back, nonterminal_label(c4)) == text


@pytest.mark.parametrize("text", ["v 0 1\n", "REPR 1\nv 0 1\nv 0 2\n", "REPR 1\nv 1 1\n", "REPR 1\nx 0\n"])
def test_bad_representation_text(text):
    with pytest.raises(ValueError):
        parse_representation(text)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_round_trip_on_solver_schedules(seed):
    inst = grid_instance(3, 4, "random", seed, density=0.4, k_dest=2, budget=6) if seed % 2 else \
        random_instance(seed, max_vertices=10, max_robots=5)
    res = solve_optimal(inst)
    if res.schedule is None:
        return
    rep = extract_representation(inst, res.schedule)
    assert inst.terminals() <= set(rep.vertex_of)
    g = relabel_terminals(inst)
    r = find_realization(rep.rooted, g)
    assert r is not None and check_realization(rep.rooted, g, r) == []
    new = schedule_from_realization(inst, rep.rooted, r, project_schedule(rep, res.schedule))
    assert validate(inst, new).valid and len(new) == len(res.schedule)
