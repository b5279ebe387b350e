import json

import numpy as np
import pytest

from curvemean.cli import run
from curvemean.core import grid_points
from curvemean.ingestion import load_signals, store_signals


def write_bumps(path, n=128, shifts=(0.05, -0.05, 0.0)):
    t = grid_points(n)
    rows = []
    for s in shifts:
        d = np.mod(t - s - 0.5 + 0.5, 1.0) - 0.5
        rows.append(np.exp(-(d**2) / (2 * 0.08**2)))
    X = np.stack(rows)
    store_signals(X, path)
    return X


class TestBasics:
    def test_version(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run(["--version"])
        assert exc.value.code == 0
        assert "curvemean" in capsys.readouterr().out

    def test_help(self):
        with pytest.raises(SystemExit) as exc:
            run(["--help"])
        assert exc.value.code == 0

    def test_unknown_flag_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            run(["mean", "--nonsense"])
        assert exc.value.code == 2

    def test_missing_file_exits_2(self, tmp_path):
        code = run(["mean", "--data", str(tmp_path / "nope.csv"),
                    "--method", "euclidean",
                    "--out-mean", str(tmp_path / "m.csv")])
        assert code == 2


class TestMean:
    def test_euclidean_opposite_pair(self, tmp_path):
        data = tmp_path / "data.csv"
        y = np.random.default_rng(0).standard_normal(32)
        store_signals(np.stack([y, -y]), data)
        out = tmp_path / "mean.csv"
        code = run(["mean", "--data", str(data), "--method", "euclidean",
                    "--out-mean", str(out)])
        assert code == 0
        assert np.allclose(load_signals(out)[0], 0.0)

    def test_frechet_recovers_shifts(self, tmp_path):
        data = tmp_path / "data.csv"
        shifts = np.array([0.05, -0.02, -0.03])
        write_bumps(data, shifts=shifts)
        out_mean = tmp_path / "mean.csv"
        out_params = tmp_path / "params.json"
        out_trace = tmp_path / "trace.json"
        code = run([
            "mean", "--data", str(data), "--method", "frechet",
            "--family", "translation", "--smoother", "fourier-gcv",
            "--rho", "1e-8", "--max-iter", "400",
            "--out-mean", str(out_mean), "--out-params", str(out_params),
            "--out-trace", str(out_trace),
        ])
        assert code == 0
        params = np.asarray(json.loads(out_params.read_text())["params"])
        target = shifts - shifts.mean()
        assert np.max(np.abs(params[:, 0] - target)) < 1e-3
        trace = json.loads(out_trace.read_text())
        assert trace["criterion"] == sorted(trace["criterion"], reverse=True)
        assert len(trace["step_sizes"]) == trace["iterations"]

    def test_procrustes_runs(self, tmp_path):
        data = tmp_path / "data.csv"
        write_bumps(data)
        out = tmp_path / "mean.csv"
        code = run(["mean", "--data", str(data), "--method", "procrustes",
                    "--out-mean", str(out)])
        assert code == 0
        assert load_signals(out).shape == (1, 128)

    def test_single_signal_rejected_for_frechet(self, tmp_path):
        data = tmp_path / "data.csv"
        store_signals(np.ones((1, 16)), data)
        code = run(["mean", "--data", str(data), "--method", "frechet",
                    "--out-mean", str(tmp_path / "m.csv")])
        assert code == 2


class TestSmooth:
    def test_fourier_fixed(self, tmp_path):
        data = tmp_path / "data.csv"
        t = grid_points(32)
        store_signals(np.stack([np.cos(2 * np.pi * t)]), data)
        out = tmp_path / "smooth.csv"
        code = run(["smooth", "--data", str(data), "--method",
                    "fourier-fixed", "--cutoff", "1", "--out", str(out)])
        assert code == 0
        assert np.allclose(load_signals(out)[0], np.cos(2 * np.pi * t),
                           atol=1e-10)

    def test_fixed_requires_cutoff(self, tmp_path):
        data = tmp_path / "data.csv"
        store_signals(np.ones((2, 16)), data)
        code = run(["smooth", "--data", str(data), "--method",
                    "fourier-fixed", "--out", str(tmp_path / "s.csv")])
        assert code == 2

    def test_wavelet_requires_power_of_two(self, tmp_path):
        data = tmp_path / "data.csv"
        store_signals(np.ones((2, 20)), data)
        code = run(["smooth", "--data", str(data), "--method", "wavelet",
                    "--out", str(tmp_path / "s.csv")])
        assert code == 2

    def test_wavelet_path(self, tmp_path):
        data = tmp_path / "data.csv"
        rng = np.random.default_rng(1)
        store_signals(rng.standard_normal((2, 64)), data)
        out = tmp_path / "s.csv"
        code = run(["smooth", "--data", str(data), "--method", "wavelet",
                    "--wavelet", "haar", "--m0", "2", "--out", str(out)])
        assert code == 0
        assert load_signals(out).shape == (2, 64)


class TestSegment:
    def test_impulse_record(self, tmp_path):
        rec = tmp_path / "rec.csv"
        samples = np.zeros(2000)
        samples[100::250] = 1.0
        rec.write_text("\n".join(repr(float(v)) for v in samples) + "\n")
        out = tmp_path / "beats.csv"
        code = run(["segment", "--record", str(rec), "--sample-rate", "250",
                    "--window", "128", "--min-distance", "100",
                    "--min-prominence", "0.5", "--out", str(out)])
        assert code == 0
        X = load_signals(out)
        assert X.shape[1] == 128
        assert np.all(np.argmax(X, axis=1) == 63)

    def test_no_segments_is_error(self, tmp_path):
        rec = tmp_path / "rec.csv"
        rec.write_text("\n".join("0.0" for _ in range(100)) + "\n")
        code = run(["segment", "--record", str(rec), "--sample-rate", "100",
                    "--window", "32", "--min-prominence", "0.5",
                    "--out", str(tmp_path / "o.csv")])
        assert code == 2


class TestSimulateAndBenchmark:
    def test_simulate_requires_seed(self, tmp_path):
        code = run(["simulate", "--out", str(tmp_path / "d.csv"),
                    "--out-shifts", str(tmp_path / "s.json")])
        assert code == 2

    def test_simulate_deterministic(self, tmp_path):
        args = ["simulate", "--seed", "5", "--n", "32", "--signals", "4"]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        sa, sb = tmp_path / "a.json", tmp_path / "b.json"
        assert run(args + ["--out", str(a), "--out-shifts", str(sa)]) == 0
        assert run(args + ["--out", str(b), "--out-shifts", str(sb)]) == 0
        assert a.read_bytes() == b.read_bytes()
        assert sa.read_bytes() == sb.read_bytes()
        assert len(json.loads(sa.read_text())["shifts"]) == 4

    def test_benchmark_deterministic_and_structured(self, tmp_path):
        args = ["benchmark", "--seed", "7", "--n", "64", "--signals", "4",
                "--replications", "3"]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        sa, sb = tmp_path / "a.json", tmp_path / "b.json"
        assert run(args + ["--out", str(a), "--out-summary", str(sa)]) == 0
        assert run(args + ["--out", str(b), "--out-summary", str(sb)]) == 0
        assert a.read_bytes() == b.read_bytes()
        assert sa.read_bytes() == sb.read_bytes()
        lines = a.read_text().strip().splitlines()
        assert lines[0] == "replication,frechet_mse,procrustes_mse"
        assert len(lines) == 4
        summary = json.loads(sa.read_text())
        assert "frechet" in summary and "procrustes" in summary

    def test_benchmark_threads_do_not_change_output(self, tmp_path):
        base = ["benchmark", "--seed", "3", "--n", "64", "--signals", "4",
                "--replications", "4"]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run(base + ["--threads", "1", "--out", str(a),
                           "--out-summary", str(tmp_path / "sa.json")]) == 0
        assert run(base + ["--threads", "3", "--out", str(b),
                           "--out-summary", str(tmp_path / "sb.json")]) == 0
        assert a.read_bytes() == b.read_bytes()


class TestConfigFile:
    def test_config_supplies_defaults_flags_override(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"seed": 5, "n": 32, "signals": 4}))
        out1 = tmp_path / "a.csv"
        assert run(["simulate", "--config", str(cfg), "--out", str(out1),
                    "--out-shifts", str(tmp_path / "sa.json")]) == 0
        assert load_signals(out1).shape == (4, 32)
        out2 = tmp_path / "b.csv"
        assert run(["simulate", "--config", str(cfg), "--signals", "6",
                    "--out", str(out2),
                    "--out-shifts", str(tmp_path / "sb.json")]) == 0
        assert load_signals(out2).shape == (6, 32)

    def test_bad_config_exits_2(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text("[1, 2]")
        code = run(["simulate", "--config", str(cfg), "--seed", "1",
                    "--out", str(tmp_path / "o.csv"),
                    "--out-shifts", str(tmp_path / "s.json")])
        assert code == 2
