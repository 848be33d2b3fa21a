import pytest
from hypothesis import given, settings, strategies as st

from csmp.generators import (chain_appended, corridor_fixture, grid_instance, normalize_points, random_instance,
                             rst_gadget, star_components, steiner_oracle)
from csmp.graph import components, planarity_sanity
from csmp.instance import serialize_instance
from csmp.oracle import oracle_makespan
from csmp.reductions import prune_component
from csmp.solver import feasibility, solve_optimal


def test_one_by_two_grid():
    inst = grid_instance(1, 2, "explicit", dest=[(0, 1)], budget=1)
    assert inst.graph.n == 2 and inst.graph.edges == {(0, 1)}
    assert solve_optimal(inst).makespan == 1


def test_two_by_three_swap_feasible():
    inst = grid_instance(2, 3, "explicit", dest=[(0, 2), (2, 0)], budget=10)
    assert feasibility(inst, 10) == "feasible"


def test_grid_errors():
    with pytest.raises(ValueError):
        grid_instance(1, 1, "explicit")
    with pytest.raises(ValueError):
        grid_instance(2, 2, "random")
    with pytest.raises(ValueError):
        grid_instance(2, 2, "random", 1, density=0.9, k_dest=1)
    with pytest.raises(ValueError):
        grid_instance(2, 2, "spiral", 1)


def test_grid_corridor_pattern():
    inst = grid_instance(3, 5, "corridor", budget=2)
    assert inst.dest == ((5, 9),)
    assert set(range(15)) - set(inst.starts) == {6, 7, 9}


def test_seed_determinism():
    for seed in range(5):
        assert serialize_instance(grid_instance(3, 4, "random", seed, density=0.3, k_dest=2)) == \
            serialize_instance(grid_instance(3, 4, "random", seed, density=0.3, k_dest=2))
        assert random_instance(seed) == random_instance(seed)
        assert corridor_fixture(20, "bays", 2, seed=seed) == corridor_fixture(20, "bays", 2, seed=seed)


def test_normalize_points():
    assert normalize_points([(3, 2), (1, 5), (3, 2)]) == [(0, 3), (2, 0)]
    with pytest.raises(ValueError):
        normalize_points([])


def test_rst_gadget_layout():
    inst = rst_gadget([(0, 0), (2, 1)], 3)
    # 3x2 box (ids 0..5), then s=6 and q_1=7 hooked to the leftmost point
    assert inst.graph.n == 8 and inst.dest == ((6, 0),)
    assert inst.graph.has_edge(6, 7) and inst.graph.has_edge(7, 0)
    assert set(inst.free) == {1, 2, 3, 4, 7}
    assert inst.budget == 4 and inst.planar


@pytest.mark.parametrize("pts, want", [
    ([(0, 0)], 0),
    ([(0, 0), (2, 0)], 2),
    ([(0, 0), (1, 1)], 2),
    ([(0, 0), (2, 0), (1, 2)], 4),
    ([(0, 0), (3, 3)], 6),
])
def test_steiner_values(pts, want):
    assert steiner_oracle(pts) == want


def test_steiner_scale_limits():
    with pytest.raises(ValueError):
        steiner_oracle([(0, 0), (4, 0)])
    with pytest.raises(ValueError):
        steiner_oracle([(0, 0), (1, 0), (2, 0), (3, 0), (3, 1)])


@pytest.mark.parametrize("pts", [[(0, 0), (2, 0)], [(0, 0), (1, 1)], [(0, 1), (1, 0), (2, 2)]])
def test_gadget_optimum_tracks_steiner(pts):
    st_len = steiner_oracle(pts)
    assert oracle_makespan(rst_gadget(pts, st_len)) == st_len + 1
    assert oracle_makespan(rst_gadget(pts, st_len - 1)) is None


def test_generated_grids_and_gadgets_are_planar():
    for seed in range(10):
        assert planarity_sanity(grid_instance(4, 4, "random", seed).graph) == "plausible"
    assert planarity_sanity(rst_gadget([(0, 0), (3, 3), (1, 2)], 3).graph) == "plausible"
    for fam in ("plain", "bays", "detour"):
        assert planarity_sanity(corridor_fixture(30, fam, 2, seed=1).graph) == "plausible"


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6))
def test_random_instance_connected_and_bounded(seed):
    inst = random_instance(seed, max_vertices=9, max_dest=2, max_budget=4)
    g = inst.graph
    assert 3 <= g.n <= 9 and len(components(g, range(g.n))) == 1
    assert 1 <= len(inst.dest) <= 2 and 1 <= inst.budget <= 4


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 10))
def test_chain_appended_has_the_chain(seed, length):
    inst = chain_appended(seed, length)
    assert inst.k <= 2
    chain = set(range(inst.graph.n - length, inst.graph.n))
    assert not chain & inst.terminals()


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_star_components_always_prunable(seed):
    inst = star_components(seed)
    assert prune_component(inst, {1}) is not None


@pytest.mark.parametrize("family", ["plain", "bays", "detour"])
@pytest.mark.parametrize("pocket", [True, False])
def test_corridor_fixture_shape(family, pocket):
    inst = corridor_fixture(20, family, 2, pocket=pocket, seed=5)
    s, t = inst.dest[0]
    assert s == 0 and inst.budget == 2
    free = set(range(inst.graph.n)) - set(inst.starts)
    assert max(len(c) for c in components(inst.graph, free)) >= 20
    if family == "plain":
        assert (oracle_makespan(inst) is not None) == pocket


def test_corridor_fixture_unknown_family():
    with pytest.raises(ValueError):
        corridor_fixture(20, "maze")
