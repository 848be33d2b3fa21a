import pytest
from hypothesis import given, strategies as st

from csmp.generators import grid_instance, random_instance, rst_gadget
from csmp.graph import Graph
from csmp.instance import (Instance, ParseError, nonterminal_label, parse_instance, relabel_terminals,
                           serialize_instance)

MINIMAL = """CSMP 1
n 2
e 0 1
m 0 1
L 1
"""


def test_minimal():
    inst = parse_instance(MINIMAL)
    assert inst.k == 1 and inst.dest == ((0, 1),) and inst.budget == 1


def test_comments_and_bytes():
    inst = parse_instance(("# hello\n" + MINIMAL.replace("e 0 1", "e 0 1   # edge")).encode())
    assert inst.graph.edges == {(0, 1)}


@pytest.mark.parametrize("text, needle, line", [
    (MINIMAL + "f 0\n", "duplicate start", 6),
    (MINIMAL.replace("CSMP 1", "CSMP 2"), "missing header", 1),
    (MINIMAL.replace("e 0 1", "e 0 1\ne 1 0"), "duplicate edge", 4),
    (MINIMAL.replace("m 0 1", "m 0 5"), "out of range", 4),
])
def test_errors_name_the_line(text, needle, line):
    with pytest.raises(ParseError) as err:
        parse_instance(text)
    assert needle in str(err.value)
    assert err.value.lineno == line


def test_instance_rejects_duplicate_targets():
    with pytest.raises(ValueError):
        Instance(Graph(3, [(0, 1), (1, 2)]), ((0, 2), (1, 2)))


def _corpus():
    out = [parse_instance(MINIMAL)]
    out += [random_instance(s) for s in range(20)]
    out += [grid_instance(3, 4, "random", s, density=0.4, k_dest=2, budget=3) for s in range(5)]
    out.append(rst_gadget([(0, 0), (2, 1)], 3))
    return out


@pytest.mark.parametrize("inst", _corpus())
def test_round_trip_corpus(inst):
    text = serialize_instance(inst)
    again = parse_instance(text)
    assert again == inst
    assert serialize_instance(again) == text


@given(st.integers(0, 10**6))
def test_round_trip_random(seed):
    inst = random_instance(seed)
    assert parse_instance(serialize_instance(inst)) == inst


def test_relabel_single_robot():
    inst = Instance(Graph(2, [(0, 1)]), ((0, 1),), (), 1)
    g = relabel_terminals(inst)
    assert dict(g.root_labels) == {0: 1, 1: 2}


def test_relabel_with_free_robot():
    inst = Instance(Graph(3, [(0, 1), (1, 2)]), ((0, 2),), (1,), 1)
    g = relabel_terminals(inst)
    assert len(g.roots) == 3
    assert nonterminal_label(inst) == 4


def test_relabel_shared_start_and_target():
    # robot 0 starts where robot 1 wants to go
    inst = Instance(Graph(4, [(0, 1), (1, 2), (2, 3)]), ((0, 3), (2, 0)), (), 4)
    g = relabel_terminals(inst)
    assert g.root_labels[0] == 1          # start label kept
    assert g.roles[0] == (4,)             # target label of robot 1 recorded as a role
    assert g.label_to_root()[4] == 0
    labels = list(g.root_labels.values())
    assert len(labels) == len(set(labels))


@given(st.integers(0, 10**6))
def test_labels_unique_and_bounded(seed):
    inst = random_instance(seed)
    g = relabel_terminals(inst)
    labels = list(g.root_labels.values()) + [x for r in g.roles.values() for x in r]
    assert len(labels) == len(set(labels))
    assert len(g.roots) <= 2 * inst.k
    assert g.roots == inst.terminals()
