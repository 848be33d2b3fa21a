import shutil
import subprocess

import pytest

from csmp.cli import main
from csmp.generators import corridor_fixture
from csmp.graph import Graph
from csmp.instance import Instance, parse_instance, serialize_instance
from csmp.schedule import parse_schedule, validate

C4_TEXT = """CSMP 1
n 4
e 0 1
e 1 2
e 2 3
e 3 0
m 0 2
f 1
L 1
"""


@pytest.fixture
def c4_file(tmp_path):
    p = tmp_path / "c4.txt"
    p.write_text(C4_TEXT)
    return p


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_solve_and_validate(tmp_path, capsys, c4_file):
    sched = tmp_path / "s.txt"
    code, _, err = run(capsys, "solve", "-i", c4_file, "-o", sched)
    assert code == 0 and "YES makespan 1" in err
    assert validate(parse_instance(C4_TEXT), parse_schedule(sched.read_text())).valid
    code, _, err = run(capsys, "validate", "-i", c4_file, "-s", sched)
    assert code == 0 and "valid" in err


@pytest.mark.parametrize("algo", ["bfs", "iddfs"])
def test_solve_no(capsys, c4_file, algo):
    code, out, err = run(capsys, "solve", "-i", c4_file, "--budget", "0", "--algo", algo)
    assert code == 1 and out == "" and "NO" in err


def test_solve_cap(capsys, tmp_path):
    p = tmp_path / "g.txt"
    inst = Instance(Graph(6, [(i, i + 1) for i in range(5)] + [(0, 5)]), ((0, 3),), (1, 2, 4), 6)
    p.write_text(serialize_instance(inst))
    code, _, err = run(capsys, "solve", "-i", p, "--max-states", "2")
    assert code == 2 and "cap-exceeded" in err


def test_solve_ball(capsys, c4_file):
    code, out, _ = run(capsys, "solve", "-i", c4_file, "--ball")
    assert code == 0 and out.startswith("SCHEDULE 1")


def test_mutated_schedule_is_invalid(tmp_path, capsys, c4_file):
    bad = tmp_path / "bad.txt"
    bad.write_text("SCHEDULE 1\ns 1 0 0 1 2\n")
    code, _, err = run(capsys, "validate", "-i", c4_file, "-s", bad)
    assert code == 1
    assert err.strip() == "invalid step 1 collision: path hits stationary robot at 1"


def test_structural_schedule_error(tmp_path, capsys, c4_file):
    bad = tmp_path / "bad.txt"
    bad.write_text("SCHEDULE 1\ns 1 7 0 3\n")
    code, _, _ = run(capsys, "validate", "-i", c4_file, "-s", bad)
    assert code == 2


def test_parse_error_exit(tmp_path, capsys):
    p = tmp_path / "x.txt"
    p.write_text("CSMP 1\nn 2\ne 0 5\n")
    code, _, err = run(capsys, "solve", "-i", p)
    assert code == 2 and "line 3" in err


def test_usage_errors(capsys, c4_file):
    with pytest.raises(SystemExit) as e:
        main(["solve", "-i", str(c4_file), "--bogus"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main([])
    assert e.value.code == 2
    code, _, _ = run(capsys, "--threads", "0", "solve", "-i", c4_file)
    assert code == 2
    code, _, _ = run(capsys, "reduce", "-i", c4_file, "--rules", "shorten,magic")
    assert code == 2


def test_missing_file(capsys, tmp_path):
    code, _, _ = run(capsys, "solve", "-i", tmp_path / "nope.txt")
    assert code == 2


def test_reduce_shorten(tmp_path, capsys):
    p = tmp_path / "p.txt"
    p.write_text(serialize_instance(Instance(Graph(11, [(i, i + 1) for i in range(10)]), ((0, 10),), (), 1)))
    code, out, err = run(capsys, "reduce", "-i", p, "--rules", "shorten")
    assert code == 0
    assert parse_instance(out).graph.n == 4
    assert err == "reduced shorten 0 10 10 3\n"


def test_reduce_prune(tmp_path, capsys):
    p = tmp_path / "s.txt"
    p.write_text(serialize_instance(Instance(Graph(9, [(0, i) for i in range(1, 9)]), ((1, 2),), (0,), 2)))
    code, out, err = run(capsys, "reduce", "-i", p, "--rules", "prune")
    assert code == 0 and parse_instance(out).graph.n < 9 and err.startswith("reduced prune")


def test_reduce_planar_desk_scale(tmp_path, capsys):
    p = tmp_path / "cor.txt"
    p.write_text(serialize_instance(corridor_fixture(30, "plain", 2)))
    trace = tmp_path / "trace.txt"
    sched = tmp_path / "sched.txt"
    code, out, _ = run(capsys, "reduce", "-i", p, "--rules", "planar", "--desk-scale", "--trace", trace,
                       "--schedule-out", sched)
    assert code == 0
    lines = trace.read_text().splitlines()
    assert any(line.startswith("contract ") for line in lines)
    assert all(line.split()[0] in ("mark", "contract", "solve") for line in lines)
    assert parse_instance(out).graph.n < 44


def test_generate_grid_and_determinism(capsys):
    argv = ["generate", "grid", "--rows", "3", "--cols", "4", "--seed", "7", "--density", "0.3", "--k-dest", "2"]
    code, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert code == 0 and a == b
    inst = parse_instance(a)
    assert inst.graph.n == 12 and len(inst.dest) == 2 and inst.planar


def test_generate_grid_random_needs_seed(capsys):
    code, _, _ = run(capsys, "generate", "grid", "--rows", "2", "--cols", "2")
    assert code == 2


def test_generate_grid_explicit(capsys):
    code, out, _ = run(capsys, "generate", "grid", "--rows", "1", "--cols", "2", "--pattern", "explicit",
                       "--dest", "0:1")
    assert code == 0 and parse_instance(out).dest == ((0, 1),)


def test_generate_rst_and_corridor(capsys):
    code, out, _ = run(capsys, "generate", "rst", "--points", "0,0;2,1", "--ell", "3")
    assert code == 0 and parse_instance(out).budget == 4
    code, out, _ = run(capsys, "generate", "corridor", "--length", "12", "--family", "bays", "--seed", "2")
    assert code == 0 and parse_instance(out) == corridor_fixture(12, "bays", 2, seed=2)


def test_repr_extract_and_realize(tmp_path, capsys, c4_file):
    sched = tmp_path / "s.txt"
    run(capsys, "solve", "-i", c4_file, "-o", sched)
    rep = tmp_path / "r.txt"
    code, out, _ = run(capsys, "repr", "extract", "-i", c4_file, "-s", sched)
    assert code == 0 and out.startswith("REPR 1")
    rep.write_text(out)
    code, out, _ = run(capsys, "repr", "realize", "-i", c4_file, "-r", rep)
    assert code == 0
    assert validate(parse_instance(C4_TEXT), parse_schedule(out)).valid


def test_repr_realize_no(tmp_path, capsys, c4_file):
    rep = tmp_path / "r.txt"
    rep.write_text("REPR 1\nv 0 1\nv 1 2\nv 2 3\ne 0 2\ne 1 2\n")
    code, _, err = run(capsys, "repr", "realize", "-i", c4_file, "-r", rep)
    assert code == 1 and "NO" in err


def test_oracle(capsys, c4_file):
    assert run(capsys, "oracle", "-i", c4_file)[:2] == (0, "YES 1\n")
    assert run(capsys, "oracle", "-i", c4_file, "--budget", "0")[:2] == (1, "NO\n")


def test_threads_do_not_change_output(capsys, c4_file):
    _, a, _ = run(capsys, "solve", "-i", c4_file)
    _, b, _ = run(capsys, "--threads", "4", "solve", "-i", c4_file)
    assert a == b


@pytest.mark.skipif(shutil.which("csmp") is None, reason="console script not installed")
def test_console_script(c4_file):
    proc = subprocess.run(["csmp", "oracle", "-i", str(c4_file)], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "YES 1\n"
