import ast
import subprocess
import sys

import pytest

from robust_frechet.sim import cli
from robust_frechet.sim.config import ConfigError, load_config, parse_config
from robust_frechet.sim.runner import HEADER, Task, cell_seed, read_results, sweep, trial_seed

BASE = """
seed = 3
trials = 2
estimators = ["empirical", "trimmed", "mom"]
[space]
name = "euclidean"
[distribution]
family = "student_t"
dof = 2.5
[contamination]
strategy = "far_point"
magnitude = 1e6
[sweep]
n = [120, 200]
epsilon = [0.05]
delta = [0.05]
m = [3]
"""


@pytest.fixture
def config(tmp_path):
    path = tmp_path / "exp.toml"
    path.write_text(BASE)
    return path


def run(*argv):
    return cli.main([str(a) for a in argv])


def test_defaults_and_overrides(config):
    cfg = load_config(config)
    assert cfg.estimators == ("empirical", "trimmed", "mom")
    assert cfg.n == (120, 200) and cfg.m == (3,)
    minimal = parse_config({"space": {"name": "euclidean"}, "distribution": {}, "sweep": {"n": 50}})
    assert minimal.epsilon == (0.0,) and minimal.delta == (0.05,) and minimal.m == (1,)
    assert minimal.estimators == ("empirical", "trimmed")
    assert cfg.with_overrides(seed=9).seed == 9


@pytest.mark.parametrize(
    "edit",
    [
        lambda s: s + "bogus = 1\n",
        lambda s: s.replace("dof = 2.5", "dof = 2.5\ncolour = 1"),
        lambda s: s.replace('name = "euclidean"', 'name = "hyperbolic"'),
        lambda s: s.replace('"mom"]', '"mode"]'),
        lambda s: s.replace("dof = 2.5", "dof = 1.5"),
        lambda s: s.replace('family = "student_t"', 'family = "gaussian_bw"'),
        lambda s: s.replace("epsilon = [0.05]", "epsilon = [0.6]"),
        lambda s: s.replace("n = [120, 200]", 'n = ["many"]'),
        lambda s: s.replace("trials = 2", "trials = 0"),
    ],
)
def test_invalid_configs_rejected(tmp_path, edit):
    path = tmp_path / "bad.toml"
    path.write_text(edit(BASE))
    with pytest.raises(ConfigError):
        load_config(path)
    assert run("sweep", "--config", path, "--out", tmp_path / "o.csv") == 2


def test_toml_syntax_error_reports_position(tmp_path):
    path = tmp_path / "broken.toml"
    path.write_text("seed = \n")
    with pytest.raises(ConfigError, match="line 1"):
        load_config(path)


def test_exit_codes(tmp_path, config, capsys):
    assert run("estimate", "--config", config) == 0
    assert run("estimate", "--config", tmp_path / "missing.toml") == 4
    assert run("sweep", "--config", config, "--out", tmp_path / "nodir" / "x.csv") == 4
    assert run("frobnicate") == 2
    assert run("bounds", "--n", 10, "--delta", 2.0, "--epsilon", 0.7) == 2
    # A zero iteration budget cannot certify convergence; strict mode turns that into failure.
    strict = tmp_path / "strict.toml"
    strict.write_text(BASE + "[solver]\nmax_iter = 1\nraise_on_failure = true\n")
    assert run("estimate", "--config", strict, "--estimator", "trimmed") == 3


def test_estimate_output_is_deterministic(config, capsys):
    outs = []
    for _ in range(2):
        assert run("estimate", "--config", config, "--estimator", "trimmed", "--trial", 1) == 0
        outs.append(capsys.readouterr().out)
    assert outs[0] == outs[1]
    fields = dict(line.split(" = ", 1) for line in outs[0].strip().splitlines())
    assert fields["status"] == '"ok"' and float(fields["error"]) < 5
    assert ast.literal_eval(fields["estimate"]).__len__() == 3


def test_seed_derivation_depends_only_on_coordinates():
    a = Task(0, 3, 120, 0.05, 0.05, "trimmed", 1)
    b = Task(17, 3, 120, 0.05, 0.05, "trimmed", 1)
    assert trial_seed(3, a) == trial_seed(3, b)
    assert cell_seed(3, a) == cell_seed(3, Task(0, 3, 120, 0.05, 0.05, "trimmed", 0))
    assert trial_seed(3, a) != trial_seed(4, a)
    assert cell_seed(3, a) != cell_seed(3, Task(0, 3, 120, 0.05, 0.05, "mom", 1))


def test_sweep_is_byte_identical_and_thread_independent(tmp_path, config):
    outs = []
    for name, threads in (("a", 1), ("b", 1), ("c", 2)):
        path = tmp_path / f"{name}.csv"
        assert run("sweep", "--config", config, "--out", path, "--no-timestamp", "--threads", threads) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1] == outs[2]
    lines = outs[0].decode().splitlines()
    assert lines[0].split(",") == HEADER
    assert len(lines) == 1 + 2 * 3 * 2


def test_timestamp_line(tmp_path, config):
    path = tmp_path / "t.csv"
    run("sweep", "--config", config, "--out", path)
    first = path.read_text().splitlines()[0]
    assert first.startswith("# generated ")
    rows = read_results(path)
    assert len(rows) == 12 and all(r["status"] == "ok" for r in rows)
    assert all(r["runtime_ms"] > 0 for r in rows)


def test_single_cell_and_resume(tmp_path):
    cfg = parse_config(
        {
            "trials": 1,
            "estimators": ["trimmed"],
            "space": {"name": "euclidean"},
            "distribution": {"family": "gaussian"},
            "sweep": {"n": 60, "m": 2},
        }
    )
    out = tmp_path / "one.csv"
    rows = sweep(cfg, out, timestamps=False)
    assert len(rows) == 1
    assert len(out.read_text().splitlines()) == 2
    first = out.read_bytes()

    bigger = parse_config(
        {
            "trials": 1,
            "estimators": ["trimmed"],
            "space": {"name": "euclidean"},
            "distribution": {"family": "gaussian"},
            "sweep": {"n": [60, 80], "m": 2},
        }
    )
    # Poison the stored error: a kept cell is copied verbatim, a recomputed one would not be.
    text = out.read_text().splitlines()
    cols = text[1].split(",")
    cols[HEADER.index("error")] = "123"
    out.write_text("\n".join([text[0], ",".join(cols)]) + "\n")
    resumed = sweep(bigger, out, timestamps=False, resume=True)
    assert len(resumed) == 2 and resumed[0][HEADER.index("error")] == "123"
    fresh = sweep(bigger, tmp_path / "fresh.csv", timestamps=False)
    assert resumed[1] == fresh[1]
    assert fresh[0] == [line for line in first.decode().splitlines()][1].split(",")


def test_bounds_command(capsys):
    code = run(
        "bounds", "--n", 100, "--delta", 3 / 2.718281828459045, "--global-variance", 100,
        "--sigma-w", 1, "--k-min", 1, "--delta-grid", 0.1, 0.5,
    )
    assert code == 0
    out = dict(line.split(" = ", 1) for line in capsys.readouterr().out.strip().splitlines())
    assert float(out["radius_geodesic"]) == pytest.approx(7516.8, rel=1e-9)
    assert out["radius_banach"].startswith("n/a")
    assert out["mom_blocks[delta=0.10000000000000001]"] == "k 19, ell 5"


def test_plotscript(tmp_path, config):
    csv_path = tmp_path / "r.csv"
    run("sweep", "--config", config, "--out", csv_path, "--no-timestamp")
    script = tmp_path / "plot.py"
    assert run("plotscript", csv_path, "--out", script) == 0
    compile(script.read_text(), str(script), "exec")
    done = subprocess.run(
        [sys.executable, str(script)], capture_output=True, text=True, cwd=tmp_path,
        env={"MPLBACKEND": "Agg", "PATH": ""},
    )
    assert done.returncode == 0, done.stderr
    assert (tmp_path / "plot.png").exists()
    other = tmp_path / "junk.csv"
    other.write_text("a,b\n1,2\n")
    assert run("plotscript", other) == 2


def test_module_entry_point(config):
    done = subprocess.run(
        [sys.executable, "-m", "robust_frechet", "estimate", "--config", str(config)],
        capture_output=True, text=True,
    )
    assert done.returncode == 0 and "status" in done.stdout
