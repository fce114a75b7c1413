import os

import pytest

from torus_lab import cli, config, experiments

NORMS = 'experiment = "norms"\nn = 64\nfunctions = ["e:5"]\ns_list = [2, 3]\n'
DECAY = (
    'experiment = "decay"\nn = 16\nfamily = [[0, 0, 1]]\nfunctions = ["e:1", "e:-1"]\n'
    "N_list = [8, 16, 32, 64, 128]\n"
)


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_norms_of_a_character(tmp_path, capsys):
    cfg = write(tmp_path, "norms.toml", NORMS)
    out = str(tmp_path / "norms.csv")
    assert cli.main(["run", cfg, "--output", out]) == 0
    rows = {r["quantity"]: float(r["value"]) for r in experiments.read_rows(out)}
    assert rows["U2"] == pytest.approx(1.0)
    assert rows["U3"] == pytest.approx(1.0)
    assert out in capsys.readouterr().out


def test_decay_preset_slope(tmp_path):
    cfg = write(tmp_path, "decay.toml", DECAY)
    out = str(tmp_path / "decay.csv")
    assert cli.main(["run", cfg, "--output", out]) == 0
    text = open(out).read()
    slope = float(next(ln for ln in text.splitlines() if ln.startswith("# summary slope")).split(":")[1])
    assert slope == pytest.approx(-1.0, abs=0.02)
    assert "# config_sha256: " in text and "# seed: 0" in text and "numpy=" in text
    header = next(ln for ln in text.splitlines() if not ln.startswith("#"))
    assert header == "N,abs_error,est_error,method"


def test_config_echo_round_trip(tmp_path):
    cfg = write(tmp_path, "decay.toml", "# a comment line\n" + DECAY)
    out = str(tmp_path / "decay.csv")
    cli.main(["run", cfg, "--output", out])
    echo = experiments.read_config_echo(out)
    assert echo == open(cfg).read()
    assert config.loads(echo).digest == config.load(cfg).digest


def test_invalid_family_exits_1_without_output(tmp_path):
    out = tmp_path / "bad.csv"
    text = DECAY.replace("[[0, 0, 1]]", "[[1, 0, 1]]") + f'output = "{out}"\n'
    cfg = write(tmp_path, "bad.toml", text)
    assert cli.main(["run", cfg]) == 1
    assert cli.main(["validate", cfg]) == 1
    assert os.listdir(tmp_path) == ["bad.toml"]


def test_unknown_key_exits_1(tmp_path):
    cfg = write(tmp_path, "x.toml", NORMS + "colour = 1\n")
    assert cli.main(["validate", cfg]) == 1


def test_budget_abort_exits_2(tmp_path, monkeypatch):
    monkeypatch.setenv("TORUS_LAB_NODE_CAP", "1000")
    text = (
        'experiment = "counting"\nn = 64\nfamily = [[0, 1], [0, 0, 1]]\n'
        'functions = ["random", "random", "random"]\nN_list = [4096]\nmethod = "grid"\n'
    )
    cfg = write(tmp_path, "big.toml", text)
    out = tmp_path / "big.csv"
    assert cli.main(["run", cfg, "--output", str(out)]) == 2
    assert not out.exists()


def test_figures_are_opt_in(tmp_path):
    cfg = write(tmp_path, "decay.toml", DECAY)
    out = tmp_path / "decay.csv"
    cli.main(["run", cfg, "--output", str(out)])
    assert not (tmp_path / "decay.png").exists()
    cli.main(["run", cfg, "--output", str(out), "--figures"])
    assert (tmp_path / "decay.png").stat().st_size > 0


def test_rerun_is_byte_identical(tmp_path):
    cfg = write(tmp_path, "decay.toml", DECAY)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    cli.main(["run", cfg, "--output", str(a)])
    cli.main(["run", cfg, "--output", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_validate_ok(tmp_path, capsys):
    assert cli.main(["validate", write(tmp_path, "n.toml", NORMS)]) == 0
    assert capsys.readouterr().out.startswith("ok: norms")


def test_acceptance_subcommand_reports_failure(monkeypatch, capsys):
    from torus_lab import acceptance

    # a tampered criterion must fail loudly and make the exit code nonzero
    crit = acceptance.Criterion(99, "tampered", 5, False, lambda: (False, "negative control"))
    monkeypatch.setattr(acceptance, "CRITERIA", acceptance.CRITERIA + [crit])
    assert cli.main(["acceptance", "--only", "10,99"]) == 1
    out = capsys.readouterr().out
    assert "[PASS] 10" in out and "[FAIL] 99 tampered" in out


def test_acceptance_time_budget_counts():
    from torus_lab import acceptance

    slow = acceptance.Criterion(98, "sleepy", 0.0, False, lambda: (True, "ok"))
    res = acceptance.run_criterion(slow)
    assert not res.passed and "time budget" in res.detail
