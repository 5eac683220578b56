import json

import numpy as np
import pytest

from tclevy.cli import main
from tclevy.copula import ClaytonCopula
from tclevy.errors import ConfigError
from tclevy.pipeline import RunConfig, load_config, parse_config, pipeline_run
from tclevy.series import BivModelParams
from tclevy.subordinator import ExpCppParams
from tclevy.synthetic import SessionLayout, write_synthetic_pair

TRUTH = BivModelParams(ExpCppParams(0.06, 0.05), ExpCppParams(0.04, 0.08), ClaytonCopula(2.2),
                       1e-4, 5e-5, 2e-3, 3e-3)


@pytest.fixture(scope="module")
def ticks(tmp_path_factory):
    d = tmp_path_factory.mktemp("ticks")
    write_synthetic_pair(d / "a.csv", d / "b.csv", TRUTH, SessionLayout(1800), seed=7)
    return d / "a.csv", d / "b.csv"


@pytest.fixture(scope="module")
def small_ticks(tmp_path_factory):
    d = tmp_path_factory.mktemp("small")
    write_synthetic_pair(d / "a.csv", d / "b.csv", TRUTH, SessionLayout(150), seed=1)
    return d / "a.csv", d / "b.csv"


def run_fit(tmp_path, ticks, minutes):
    out = tmp_path / f"p{minutes}.json"
    rc = main(["fit", "--input1", str(ticks[0]), "--input2", str(ticks[1]),
               "--bin-minutes", str(minutes), "--threshold", "0.5", "--output", str(out)])
    assert rc == 0
    return json.loads(out.read_text())


def test_fit_round_trip(tmp_path, ticks):
    p = run_fit(tmp_path, ticks, 30)
    truth = {"lambda1": 0.06, "lambda2": 0.04, "theta1": 0.05, "theta2": 0.08, "delta": 2.2}
    for key, value in truth.items():
        assert p[key] == pytest.approx(value, rel=0.15), key
    assert p["converged"] is True
    assert {"mu1", "mu2", "sigma2_1", "sigma2_2", "loglik"} <= set(p)


def test_bin_width_scales_intensity(tmp_path, ticks):
    p30 = run_fit(tmp_path, ticks, 30)
    p10 = run_fit(tmp_path, ticks, 10)
    for key in ("lambda1", "lambda2"):
        assert 2 <= p30[key] / p10[key] <= 4


def pipeline_args(ticks, out, *extra):
    return ["pipeline", "--input1", str(ticks[0]), "--input2", str(ticks[1]),
            "--threshold", "0.5", "--output-dir", str(out), *extra]


def test_pipeline_determinism_and_reuse(tmp_path, small_ticks):
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    assert main(pipeline_args(small_ticks, a, "--seed", "3", "--replications", "2")) == 0
    assert main(pipeline_args(small_ticks, b, "--seed", "3", "--replications", "2",
                              "--workers", "2")) == 0
    names = sorted(f.name for f in a.iterdir())
    assert names == ["cleaning.json", "params.json", "paths_0000.csv", "paths_0001.csv",
                     "stats.csv", "surface.csv"]
    for n in names:
        assert (a / n).read_bytes() == (b / n).read_bytes(), n
    assert main(["pipeline", "--params", str(a / "params.json"), "--seed", "3",
                 "--replications", "2", "--output-dir", str(c)]) == 0
    for n in ("paths_0000.csv", "paths_0001.csv", "surface.csv", "params.json"):
        assert (a / n).read_bytes() == (c / n).read_bytes(), n
    header = (a / "paths_0000.csv").read_text().splitlines()[0]
    assert header == "s,T1,T2,Z1,Z2,X1,X2"
    rows = np.loadtxt(a / "paths_0000.csv", delimiter=",", skiprows=1)
    assert rows[0].tolist() == [0.0] * 7 and rows[-1, 0] == 1.0


def test_seed_ladder(tmp_path, small_ticks):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(pipeline_args(small_ticks, a, "--seed", "10", "--replications", "2")) == 0
    assert main(pipeline_args(small_ticks, b, "--seed", "11")) == 0
    assert (a / "paths_0001.csv").read_bytes() == (b / "paths_0000.csv").read_bytes()


def test_config_file(tmp_path, small_ticks):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"# run\ninput1 = {small_ticks[0]}\ninput2 = {small_ticks[1]}\n"
                   f"threshold = 0.5\noutput_dir = {tmp_path / 'out'}\nsurface_points = 4\n")
    assert main(["pipeline", "--config", str(cfg), "--seed", "1"]) == 0
    assert len((tmp_path / "out" / "surface.csv").read_text().splitlines()) == 17
    config = load_config(cfg, seed=5)
    assert config.seed == 5 and config.surface_points == 4


def test_config_errors(tmp_path):
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config("bin_width = 3\n")
    with pytest.raises(ConfigError):
        parse_config("replications = many\n")
    with pytest.raises(ConfigError):
        RunConfig(replications=0).validate()
    with pytest.raises(ConfigError):
        RunConfig(bin_minutes=-1).validate()
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    assert main(["pipeline", "--config", str(bad), "--seed", "1"]) == 2


def test_seed_required(small_ticks):
    with pytest.raises(SystemExit):
        main(["simulate", "--params", "x.json"])
    with pytest.raises(SystemExit):
        main(pipeline_args(small_ticks, "out"))


def test_exit_codes_and_cleanup(tmp_path, small_ticks):
    bad = tmp_path / "bad.csv"
    bad.write_text("timestamp,price,trade_count\n1,100,1\nxx,1,1\n")
    out = tmp_path / "never"
    assert main(["pipeline", "--input1", str(bad), "--input2", str(small_ticks[1]),
                 "--seed", "1", "--output-dir", str(out)]) == 3
    assert not out.exists()
    # a stage-3 failure leaves no partial output
    params = {"lambda1": 1, "lambda2": 1, "theta1": 1, "theta2": 1, "delta": 1, "mu1": 0,
              "mu2": 0, "sigma2_1": -1.0, "sigma2_2": 1.0, "loglik": 0, "converged": True}
    pfile = tmp_path / "p.json"
    pfile.write_text(json.dumps(params))
    assert main(["pipeline", "--params", str(pfile), "--seed", "1", "--output-dir", str(out)]) == 4
    assert not out.exists()
    assert not [p for p in tmp_path.iterdir() if p.name.startswith(".tclevy-")]


def test_fit_nonconvergence_exit_code(tmp_path, monkeypatch, small_ticks):
    import tclevy.pipeline as pl

    real = pl.mle_fit
    monkeypatch.setattr(pl, "mle_fit", lambda data: real(data, max_iter=3))
    rc = main(["fit", "--input1", str(small_ticks[0]), "--input2", str(small_ticks[1]),
               "--threshold", "0.5", "--output", str(tmp_path / "p.json")])
    assert rc == 4


def test_stats_surface_simulate_commands(tmp_path, small_ticks):
    common = ["--input1", str(small_ticks[0]), "--input2", str(small_ticks[1])]
    assert main(["stats", *common, "--output", str(tmp_path / "s.csv")]) == 0
    assert main(["surface", *common, "--output", str(tmp_path / "f.csv")]) == 0
    assert (tmp_path / "f.csv").read_text().startswith("x1,x2,F_hat\n")
    assert main(["fit", *common, "--threshold", "0.5", "--output", str(tmp_path / "p.json")]) == 0
    assert main(["simulate", "--params", str(tmp_path / "p.json"), "--seed", "4",
                 "--output-dir", str(tmp_path / "sim")]) == 0
    assert (tmp_path / "sim" / "paths_0000.csv").exists()


def test_pipeline_run_api(tmp_path, small_ticks):
    cfg = RunConfig(input1=str(small_ticks[0]), input2=str(small_ticks[1]), threshold=0.5,
                    seed=2, output_dir=str(tmp_path / "o"))
    res = pipeline_run(cfg)
    assert res.params["horizon_bins"] == 150 * 12
    cleaning = json.loads((tmp_path / "o" / "cleaning.json").read_text())
    assert cleaning["input1"]["bins_dropped"] == 150
