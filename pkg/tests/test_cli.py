import csv
import io
import json
import subprocess
import sys

import pytest

from forest.cli import main, parse_init
from forest.programs import EXAMPLES_DIR

from conftest import SHIFT_LOOP


def ex(name):
    return str(EXAMPLES_DIR / name)


@pytest.fixture
def fst(tmp_path):
    def write(text, name="p.fst"):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return write


def test_parse_init():
    assert parse_init("x=3,y=-7") == {"x": 3, "y": -7}
    assert parse_init("") == {}
    with pytest.raises(Exception):
        parse_init("x=three")


def test_run_min_pos(capsys):
    assert main(["run", ex("min_pos.fst"), "--init", "x=3,y=7"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert "min=3" in lines and "found=0" in lines


def test_run_out_of_range(capsys, fst):
    path = fst("from(i=0 or 0)to(i=x or 0){skip}")
    assert main(["run", path, "--init", "i=5,x=3"]) == 1
    assert capsys.readouterr().out.strip() == f"BOTTOM: out-of-range at {path}:1:1"


def test_run_skip_prints_nothing(capsys):
    assert main(["run", ex("skip.fst")]) == 0
    assert capsys.readouterr().out == ""


def test_run_json_and_stats(capsys, fst):
    path = fst(SHIFT_LOOP)
    assert main(["run", path, "--init", "i=-4,j=2", "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["schemaVersion"] == 1 and doc["outcome"] == "success"
    assert doc["state"] == {"i": 1, "j": 7}
    assert doc["stats"]["loopUnfoldings"] == 5
    assert main(["run", path, "--init", "i=-4", "--stats"]) == 0
    assert "loopUnfoldings=5" in capsys.readouterr().out


def test_run_trace(capsys, fst):
    assert main(["run", fst("x += 2"), "--trace"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out == ["1\tInc\t1:1\tx=0→2", "x=2"]


def test_run_fuel(capsys, fst):
    assert main(["run", fst(SHIFT_LOOP), "--init", "i=-4", "--fuel", "2"]) == 3
    assert "FUEL EXHAUSTED" in capsys.readouterr().out


def test_run_input_errors(capsys, fst):
    assert main(["run", fst("x += x")]) == 2
    assert "target occurs in source expression" in capsys.readouterr().err
    assert main(["run", fst("x += ")]) == 2
    assert main(["run", "/nonexistent.fst"]) == 2
    assert main(["run", fst("skip"), "--init", "bad"]) == 2
    assert main(["bogus"]) == 2


def test_invert_twice(capsys, fst, tmp_path):
    assert main(["invert", fst(SHIFT_LOOP)]) == 0
    once = capsys.readouterr().out
    assert once.strip() == "from (i = 1 or 0) to (i = -4 or 0) {j += 1}"
    assert main(["invert", fst(once, "inv.fst")]) == 0
    assert capsys.readouterr().out.strip() == "from (i = -4 or 0) to (i = 1 or 0) {j += 1}"
    assert main(["invert", fst("skip")]) == 0
    assert capsys.readouterr().out.strip() == "skip"


def test_translate(capsys, fst):
    assert main(["translate", fst("for r {INC j}", "a.srl")]) == 0
    assert capsys.readouterr().out.strip() == "from (_it0 = 0 or 0) to (_it0 = r or 0) {j += 1}; _it0 -= r"
    assert main(["translate", fst("INC r", "b.srl")]) == 0
    assert capsys.readouterr().out.strip() == "r += 1"
    assert main(["translate", ex("nested_for.srl")]) == 0
    out = capsys.readouterr().out
    assert "_it0" in out and "_it1" in out


def test_translated_output_runs_with_allow_internal(capsys, fst):
    main(["translate", fst("for r {INC j}", "a.srl")])
    path = fst(capsys.readouterr().out, "t.fst")
    assert main(["run", path, "--init", "r=3"]) == 2
    capsys.readouterr()
    assert main(["run", path, "--init", "r=3", "--allow-internal"]) == 0
    assert capsys.readouterr().out.splitlines() == ["_it0=0", "j=3", "r=3"]


def test_check(capsys, fst):
    assert main(["check", ex("min_pos.fst")]) == 0
    assert capsys.readouterr().out.strip() == "ok"
    assert main(["check", fst("from(i=0 or 0)to(i=x or 0){i+=1}")]) == 2
    assert "body writes leading variable" in capsys.readouterr().out
    assert main(["check", fst("for r {DEC r}", "c.srl")]) == 2


def test_prop(capsys, monkeypatch):
    assert main(["prop", "40", "--seed", "3", "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["seed"] == 3 and doc["ok"]
    monkeypatch.setenv("FOREST_SEED", "11")
    assert main(["prop", "5"]) == 0
    assert "seed=11" in capsys.readouterr().out
    monkeypatch.setenv("FOREST_SEED", "x")
    assert main(["prop", "5"]) == 2


def test_bench_csv_and_plot(capsys, tmp_path):
    png = tmp_path / "b.png"
    assert main(["bench", "min_gen", "--range", "-3", "3", "--plot", str(png)]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert len(rows) == 49
    assert all(r["result"] == r["oracle"] for r in rows)
    assert png.read_bytes()[:4] == b"\x89PNG"


def test_bench_errors():
    assert main(["bench", "nope"]) == 2
    assert main(["bench", "sign", "--range", "3", "1"]) == 2


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "forest", "run", ex("sign.fst"), "--init", "x=-9"],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert out.stdout.splitlines() == ["i=-1", "s=-1", "x=-9"]
