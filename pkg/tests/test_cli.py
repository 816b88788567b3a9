import json
import subprocess
import sys

import pytest

from sintsums.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_ideals_csv(capsys):
    code, out, _ = run(capsys, "ideals", "--d", "2", "--m", "7")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "norm,a,b"
    assert [int(l.split(",")[0]) for l in lines[1:]] == [1, 2, 4, 7, 7]


def test_ideals_rational(capsys):
    code, out, _ = run(capsys, "ideals", "--d", "Q", "--s-primes", "2,3", "--m", "6")
    assert code == 0
    assert [l.split(",")[0] for l in out.splitlines()[1:]] == ["1", "5"]


def test_ideals_bad_field(capsys):
    code, _, err = run(capsys, "ideals", "--d", "4", "--m", "3")
    assert code == 2 and "error" in err
    code, _, err = run(capsys, "ideals", "--d", "-5", "--s-primes", "2", "--m", "3")
    assert code == 2


def test_volume_json(capsys):
    code, out, _ = run(capsys, "volume", "--n", "2", "--s", "2", "--mc", "20000", "--seed", "1")
    data = json.loads(out)
    assert code == 0 and data["exact"] == "15/4"
    assert abs(data["mc"] - 3.75) < 4 * data["stderr"]


def test_volume_cap(capsys):
    code, _, err = run(capsys, "volume", "--n", "2", "--s", "4")
    assert code == 2 and "cap" in err
    code, out, _ = run(capsys, "volume", "--n", "2", "--s", "4", "--mc", "10000")
    assert code == 0 and json.loads(out)["exact"] is None


def test_census_structured_and_oracle(capsys):
    args = ["census", "--d", "2", "--n", "2", "--m", "1", "--q", "4"]
    code, out, _ = run(capsys, *args)
    a = json.loads(out)
    code2, out2, _ = run(capsys, *args, "--oracle")
    b = json.loads(out2)
    assert code == code2 == 0
    assert (a["u"], a["V"], a["V_star"]) == (b["u"], b["V"], b["V_star"]) == (2, 7, 6)
    assert a["method"] == "structured" and b["method"] == "oracle"
    assert a["w"] == 7 and b["w"] is None


def test_census_fixture(capsys, tmp_path):
    fx = tmp_path / "fx.json"
    args = ["census", "--d", "2", "--n", "2", "--m", "2", "--q", "10", "--fixture", str(fx)]
    assert run(capsys, *args)[0] == 0 and fx.exists()
    assert run(capsys, *args)[0] == 0
    data = json.loads(fx.read_text())
    data["u"] += 1
    fx.write_text(json.dumps(data))
    code, _, err = run(capsys, *args)
    assert code == 1 and "mismatch" in err


def test_census_unsaturated(capsys):
    code, out, _ = run(capsys, "census", "--d", "2", "--n", "2", "--m", "1", "--q", "1000000",
                       "--box", "1", "--cap", "2")
    assert code == 3 and json.loads(out)["saturated"] is False


def test_census_proper_only(capsys):
    code, out, _ = run(capsys, "census", "--d", "2", "--n", "3", "--m", "2", "--q", "10",
                       "--proper-subsums-only")
    data = json.loads(out)
    assert code == 0 and data["subsum_mode"] == "proper"
    if "all_subsets" in data:
        assert data["all_subsets"]["V"] <= data["V"]


def write_config(path, **kw):
    base = {"d": 2, "n": 2, "m": 1, "q_ladder": [10, 100, 1000, 10000]}
    base.update(kw)
    path.write_text(json.dumps(base))
    return path


def test_verify_success_and_determinism(capsys, tmp_path):
    cfg = write_config(tmp_path / "run.json")
    assert run(capsys, "verify", "--config", str(cfg))[0] == 0
    csv1 = (tmp_path / "run.csv").read_bytes()
    js1 = (tmp_path / "run.summary.json").read_bytes()
    assert csv1.startswith(b"q,u,main_term,ratio,error_budget,saturated\n")
    assert run(capsys, "verify", "--config", str(cfg), "--csv", str(tmp_path / "b.csv"),
               "--json", str(tmp_path / "b.json"))[0] == 0
    assert (tmp_path / "b.csv").read_bytes() == csv1
    assert (tmp_path / "b.json").read_bytes() == js1


@pytest.mark.parametrize(
    "kw",
    [
        {"q_ladder": [2, 10]},
        {"d": -1},
        {"n": 0},
        {"unknown": 1},
        {"d": 9},
    ],
)
def test_verify_invalid_config(capsys, tmp_path, kw):
    cfg = write_config(tmp_path / "bad.json", **kw)
    code, _, err = run(capsys, "verify", "--config", str(cfg))
    assert code == 2 and "invalid config" in err


def test_verify_missing_file(capsys, tmp_path):
    assert run(capsys, "verify", "--config", str(tmp_path / "nope.json"))[0] == 2


def test_verify_unsaturated(capsys, tmp_path):
    cfg = write_config(tmp_path / "u.json", q_ladder=[10**6], box=1, box_cap=2)
    assert run(capsys, "verify", "--config", str(cfg))[0] == 3
    cfg = write_config(tmp_path / "u.json", q_ladder=[10**6], box=1, box_cap=2, allow_unsaturated=True)
    assert run(capsys, "verify", "--config", str(cfg))[0] == 0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "sintsums", "volume", "--n", "2", "--s", "1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["exact"] == "3/1"
