import json

import numpy as np
import pytest

from grandlab.cli import main, parse_ebno


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_ebno():
    assert parse_ebno("3.5:5.5:0.5") == (3.5, 4.0, 4.5, 5.0, 5.5)
    assert parse_ebno("4,5") == (4.0, 5.0)
    assert parse_ebno("5") == (5.0,)


def test_partitions_fixed(capsys):
    code, out, _ = run(capsys, "partitions", "--kind", "fixed", "--w", "18", "--t", "4")
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 15 and lines[0] == "1 2 3 12"


def test_partitions_other_kinds(capsys):
    _, out, _ = run(capsys, "partitions", "--w", "6")
    assert out.splitlines() == ["6", "1 5", "2 4", "1 2 3"]
    _, out, _ = run(capsys, "partitions", "--kind", "parity", "--w", "5", "--parity", "even")
    assert out.splitlines() == ["1 4", "2 3"]
    _, out, _ = run(capsys, "partitions", "--kind", "level1", "--w", "4",
                    "--parities", "even,odd,odd", "--lengths", "8,8,8")
    assert [l.split("w=")[1] for l in out.splitlines()] == ["0,1,3", "0,2,2", "0,3,1"]


def test_segment_ebch(capsys):
    code, out, _ = run(capsys, "segment", "--code", "ebch128_106")
    assert code == 0
    assert "segments p=2 governed=2 n=128" in out
    assert out.count("size=64 row") == 2


def test_codes_list_and_export(capsys, tmp_path):
    code, out, _ = run(capsys, "codes")
    assert code == 0 and "ebch128_106" in out
    p = tmp_path / "h.txt"
    assert run(capsys, "codes", "--export", "ehamming8_4", "--out", str(p))[0] == 0
    code, out, _ = run(capsys, "segment", "--code", str(p))
    assert code == 0 and "n=8" in out


def test_decode_json(capsys, tmp_path):
    r = np.ones(8)
    r[2] = -0.1
    p = tmp_path / "r.txt"
    p.write_text("\n".join(map(str, r)))
    code, out, _ = run(capsys, "decode", "--code", "ehamming8_4", "--input", str(p),
                       "--decoder", "orbgrand")
    assert code == 0
    rec = json.loads(out)
    assert rec == {"codeword_hex": "00", "queries": 1, "abandoned": False,
                   "sed": pytest.approx((-0.1 - 1) ** 2), "w_l": 1}
    code, out, _ = run(capsys, "decode", "--code", "ehamming8_4", "--input", str(p),
                       "--eps", "0.2", "--rho", "0.3", "--ebno", "3")
    assert code == 0 and json.loads(out)["codeword_hex"] == "00"


def test_simulate_deterministic(capsys, tmp_path):
    args = ["simulate", "--code", "ebch32_21", "--ebno", "3:4:0.5", "--trials", "40",
            "--seed", "42", "--max-queries", "1000"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(capsys, *args, "--threads", "1", "--out", str(a))[0] == 0
    assert run(capsys, *args, "--threads", "2", "--out", str(b), "--svg", str(tmp_path / "p.svg"))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert len(a.read_text().splitlines()) == 1 + 2 * 3
    assert (tmp_path / "p.svg").exists()


def test_config_roundtrip(capsys, tmp_path):
    code, out, _ = run(capsys, "simulate", "--ebno", "4:5:0.5", "--eps", "0.2", "--rho", "0.3",
                       "--dump-config")
    assert code == 0
    cfg = tmp_path / "c.cfg"
    cfg.write_text(out)
    code, out2, _ = run(capsys, "simulate", "--config", str(cfg), "--dump-config")
    assert out2 == out
    assert "ebno=4,4.5,5" in out


def test_flags_override_config(capsys, tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("# comment\ntrials=7\nseed=3\n")
    _, out, _ = run(capsys, "simulate", "--config", str(cfg), "--seed", "9", "--dump-config")
    assert "trials=7" in out and "seed=9" in out


@pytest.mark.parametrize("argv", [
    ["simulate", "--bogus", "1"],
    ["simulate", "--code", "nope"],
    ["simulate", "--trials", "0"],
    ["simulate", "--ebno", "5:4:0.5"],
    ["simulate", "--eps", "0.2"],
    ["simulate", "--decoder", "sgrand"],
    ["partitions", "--kind", "fixed", "--w", "5"],
    ["frobnicate"],
])
def test_config_errors_exit_1(capsys, argv):
    assert run(capsys, *argv)[0] == 1


def test_unknown_config_key(capsys, tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("tirals=7\n")
    assert run(capsys, "simulate", "--config", str(cfg))[0] == 1


def test_runtime_failure_exit_2(capsys, tmp_path):
    # output directory does not exist: the run itself fails
    code, _, err = run(capsys, "simulate", "--code", "ehamming8_4", "--trials", "2",
                       "--threads", "1", "--out", str(tmp_path / "missing" / "x.csv"))
    assert code == 2 and "failed" in err


def test_progress_goes_to_stderr(capsys):
    code, out, err = run(capsys, "simulate", "--code", "ehamming8_4", "--trials", "5",
                         "--threads", "1", "--ebno", "3")
    assert code == 0
    assert out.startswith("code,n,k,")
    assert "dB" in err
