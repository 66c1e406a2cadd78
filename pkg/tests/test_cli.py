import csv
import io
import math
from pathlib import Path

import pytest

from dirvoi import cli
from dirvoi.config import ConfigError, load_config
from dirvoi.core import evsi

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

WORKED_PRIOR = """
[prior]
alphas = ["10/6", "1/6", "1/6", "1/6", "1/6", "1/6"]

[loss]
k = 5
"""


@pytest.fixture
def write_config(tmp_path):
    def write(text, name="run.toml"):
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    return write


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, list(csv.DictReader(io.StringIO(out))), err


def rel(x, y):
    return abs(float(x) - y) / abs(y)


class TestValue:
    def test_worked_example(self, capsys):
        code, rows, _ = run(["value", "--config", str(CONFIGS / "worked_example.toml")], capsys)
        assert code == 0 and len(rows) == 1
        r = rows[0]
        assert (r["M"], r["n"]) == ("5", "3")
        assert rel(r["evsi"], 160 / 77) < 1e-10
        assert rel(r["evdi"], 80 / 21) < 1e-10
        assert rel(r["efficiency"], 6 / 11) < 1e-10
        assert rel(r["prior_risk"], 40 / 3) < 1e-10
        assert rel(r["preposterior_loss"], 40 / 3 - 160 / 77) < 1e-10
        assert rel(r["alpha"], 2.5) < 1e-12 and rel(r["c1"], 1) < 1e-12

    def test_zero_samples(self, capsys):
        code, rows, _ = run(["value", "--config", str(CONFIGS / "worked_example.toml"), "--n", "0"], capsys)
        assert code == 0
        assert float(rows[0]["evsi"]) == 0.0
        assert rows[0]["preposterior_loss"] == rows[0]["prior_risk"]

    def test_beta_binomial(self, capsys):
        code, rows, _ = run(["value", "--config", str(CONFIGS / "beta_binomial.toml")], capsys)
        assert code == 0 and rel(rows[0]["evsi"], 7 / 300) < 1e-10

    def test_missing_n(self, write_config, capsys):
        code, _, err = run(["value", "--config", write_config(WORKED_PRIOR)], capsys)
        assert code == 2 and "n:" in err

    def test_out_flag(self, tmp_path, capsys):
        out = tmp_path / "value.csv"
        code = cli.main(["value", "--config", str(CONFIGS / "worked_example.toml"), "--out", str(out)])
        assert code == 0 and capsys.readouterr().out == ""
        assert out.read_text().startswith("M,alpha,c1,c2,n,evsi")
        assert out.read_text().endswith("\n") and "\r" not in out.read_text()


class TestConfigErrors:
    @pytest.mark.parametrize(
        "text,field",
        [
            ("bogus = 1\n" + WORKED_PRIOR, "bogus"),
            (WORKED_PRIOR.replace("k = 5", "k = 5\nscale = 2"), "loss.scale"),
            (WORKED_PRIOR.replace("k = 5", "k = -1"), "loss.k"),
            (WORKED_PRIOR.replace("k = 5", "k = true"), "loss.k"),
            (WORKED_PRIOR.replace('"1/6", "1/6"]', '"1/6", "0"]'), "prior.alphas[5]"),
            (WORKED_PRIOR.replace('"10/6"', '"ten"'), "prior.alphas[0]"),
            (WORKED_PRIOR.replace('"10/6"', '"1/0"'), "prior.alphas[0]"),
            ("[loss]\nk = 1\n", "prior"),
            ("[prior]\nalphas = [1, 2]\n", "loss"),
            ("[prior]\nalphas = [1, 2]\nconcentration = 3\n[loss]\nk = 1\n", "prior"),
            (WORKED_PRIOR + "[sim]\nn_grid = [3, 1]\n", "sim.n_grid"),
            (WORKED_PRIOR + "[sim]\nn_grid = []\n", "sim.n_grid"),
            (WORKED_PRIOR + "[sim]\nseed = -4\n", "sim.seed"),
            (WORKED_PRIOR + "[sim]\nreplications = 0\n", "sim.replications"),
            (WORKED_PRIOR + "[cost]\nK = 1\n", "cost.s"),
            (WORKED_PRIOR + "[season]\nJ = 0\nK = 1\n", "season.J"),
            (WORKED_PRIOR + "[season]\nJ = 2.5\n", "season.J"),
            ("not = [valid", "config"),
        ],
    )
    def test_named_field(self, write_config, capsys, text, field):
        path = write_config(text)
        with pytest.raises(ConfigError) as exc:
            load_config(path)
        assert exc.value.field == field
        code = cli.main(["curve", "--config", path])
        err = capsys.readouterr().err
        assert code == 2 and f"error: {field}:" in err

    def test_missing_file(self, capsys):
        assert cli.main(["value", "--config", "/nonexistent/x.toml", "--n", "1"]) == 2

    def test_mean_parameterization(self, write_config):
        cfg = load_config(write_config("[prior]\nconcentration = 10\nmean_weights = [1, 3]\n[loss]\nk = 1\n"))
        assert cfg.prior.alphas == pytest.approx((2.5, 7.5))


class TestCurve:
    def test_zero_grid(self, write_config, capsys):
        code, rows, _ = run(["curve", "--config", write_config(WORKED_PRIOR + "[sim]\nn_grid = [0]\n")], capsys)
        assert code == 0 and len(rows) == 1
        assert rows[0]["n"] == "0" and float(rows[0]["evsi"]) == 0 and float(rows[0]["efficiency"]) == 0
        assert rel(rows[0]["evdi"], 80 / 21) < 1e-10

    def test_worked_row(self, write_config, capsys):
        _, rows, _ = run(["curve", "--config", write_config(WORKED_PRIOR + "[sim]\nn_grid = [3]\n")], capsys)
        assert rows[0]["evsi"].startswith("2.077922")
        assert rows[0]["evdi"].startswith("3.809523")
        assert rows[0]["efficiency"].startswith("0.545454")

    def test_monotone_and_header(self, capsys):
        code = cli.main(["curve", "--config", str(CONFIGS / "figure2.toml")])
        out = capsys.readouterr().out
        assert code == 0 and out.splitlines()[0] == "n,evsi,evdi,efficiency"
        rows = list(csv.DictReader(io.StringIO(out)))
        values = [float(r["evsi"]) for r in rows]
        assert values == sorted(values)
        assert len({r["evdi"] for r in rows}) == 1

    def test_needs_grid(self, write_config, capsys):
        assert cli.main(["curve", "--config", write_config(WORKED_PRIOR)]) == 2


class TestPolicies:
    def test_optimal_n(self, capsys):
        code, rows, _ = run(["optimal-n", "--config", str(CONFIGS / "worked_example.toml")], capsys)
        r = rows[0]
        assert code == 0 and r["n_star"] == "7"
        assert rel(r["continuous_root"], math.sqrt(2000 / 21) - 2.5) < 1e-10
        assert rel(r["total_cost"], 0.7) < 1e-10
        assert rel(r["net_value"], float(r["evsi_at_n_star"]) - 0.7) < 1e-10

    def test_plan(self, capsys):
        code, rows, _ = run(["plan", "--config", str(CONFIGS / "worked_example.toml")], capsys)
        assert code == 0 and rows[0]["j_star"] == "3"
        assert rel(rows[0]["cost_at_j_star"], 1 - 7 * 160 / 77) < 1e-10

    def test_plan_no_changeover_flagged(self, write_config, capsys):
        code, rows, err = run(["plan", "--config", write_config(WORKED_PRIOR + "[season]\nJ = 1\nK = 1\n")], capsys)
        assert code == 0 and rows[0]["j_star"] == "0" and "no changeover" in err

    @pytest.mark.parametrize("command", ["optimal-n", "plan", "verify", "benchmark"])
    def test_missing_section(self, write_config, capsys, command):
        assert cli.main([command, "--config", write_config(WORKED_PRIOR)]) == 2


class TestVerify:
    def test_worked_example_passes(self, capsys):
        code, rows, _ = run(["verify", "--config", str(CONFIGS / "worked_example.toml")], capsys)
        assert code == 0
        assert {r["check"] for r in rows} == {"evsi", "total_variance_residual"}
        assert all(abs(float(r["z"])) <= 4 for r in rows)

    def test_zero_grid(self, write_config, capsys):
        code, rows, _ = run(["verify", "--config", write_config(WORKED_PRIOR + "[sim]\nn_grid = [0]\n")], capsys)
        assert code == 0
        first = rows[0]
        assert (first["check"], float(first["estimate"]), float(first["z"])) == ("evsi", 0.0, 0.0)

    def test_corrupted_closed_form_is_detected(self, write_config):
        cfg = load_config(write_config(WORKED_PRIOR + "[sim]\nreplications = 100000\nseed = 42\nn_grid = [3]\n"))
        corrupted = lambda prior, loss, n: 1.5 * evsi(prior, loss, n)  # noqa: E731
        assert cli.cmd_verify(cfg, io.StringIO()) == 0
        assert cli.cmd_verify(cfg, io.StringIO(), evsi_fn=corrupted) == 1


class TestBenchmark:
    def test_unknown_procedure(self, write_config, capsys):
        text = WORKED_PRIOR + '[sim]\nprocedures = ["BAYES", "CAVE"]\n'
        code, _, err = run(["benchmark", "--config", write_config(text)], capsys)
        assert code == 2 and "sim.procedures" in err

    def test_row_count(self, write_config, capsys):
        text = WORKED_PRIOR + '[sim]\nreplications = 500\nn_grid = [1, 2]\nprocedures = ["BAYES"]\n'
        code, rows, _ = run(["benchmark", "--config", write_config(text)], capsys)
        assert code == 0 and len(rows) == 2
        assert list(rows[0]) == ["n", "procedure", "mean_loss", "std_error", "replications", "seed"]

    def test_figure2_bayes_beats_saa_at_one(self, capsys):
        code, rows, _ = run(["benchmark", "--config", str(CONFIGS / "figure2.toml")], capsys)
        by = {(r["n"], r["procedure"]): float(r["mean_loss"]) for r in rows}
        assert code == 0 and by[("1", "BAYES")] < by[("1", "SAA")]

    def test_byte_identical_and_seed_override(self, write_config, tmp_path, capsys):
        path = write_config(WORKED_PRIOR + "[sim]\nreplications = 5000\nseed = 3\nn_grid = [0, 2, 9]\n")
        outs = []
        for i, extra in enumerate([[], [], ["--seed", "3"], ["--workers", "3"], ["--seed", "4"]]):
            out = tmp_path / f"b{i}.csv"
            assert cli.main(["benchmark", "--config", path, "--out", str(out), *extra]) == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1] == outs[2] == outs[3]
        assert outs[4] != outs[0]
        assert b",4\n" in outs[4]
        assert "SAA at n=0" in capsys.readouterr().err


def test_numbers_round_trip():
    for x in (160 / 77, 1e-300, 123456789.123456789, -13.5454545454545454, 2.0):
        assert rel(cli.fmt(x), x) <= 1e-10 or float(cli.fmt(x)) == x
    assert cli.fmt(7) == "7"
