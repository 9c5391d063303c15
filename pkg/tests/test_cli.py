import json

import pytest

from sinebits.cli import (
    EXIT_CAPABILITY,
    EXIT_CONFIG,
    EXIT_FAILED,
    EXIT_INFEASIBLE,
    EXIT_INTEGRITY,
    EXIT_OK,
    RunConfig,
    ConfigError,
    main,
)


def write_config(path, **cfg):
    path.write_text(json.dumps(cfg))
    return str(path)


def synth(tmp_path, name="run", **cfg):
    out = tmp_path / name
    c = write_config(tmp_path / f"{name}.json", **cfg)
    rc = main(["synthesize", "--config", c, "--out", str(out)])
    return rc, c, out


def manifest(out):
    return json.loads((out / "manifest.json").read_text())


class TestSynthesize:
    def test_example_width(self, tmp_path):
        rc, _, out = synth(tmp_path, target="x", d=1, N=2, M=2, delta=0.05)
        assert rc == EXIT_OK
        m = manifest(out)
        assert (m["depth"], m["width"]) == (6, 4)
        assert m["range_source"] == "supplied" and len(m["digit_checksum"]) == 64

    def test_budget_width(self, tmp_path):
        rc, _, out = synth(tmp_path, target="x", d=1, mode="lp", budget={"mu": 1, "alpha": 1, "epsilon": 0.5})
        assert rc == EXIT_OK and manifest(out)["width"] == 6

    def test_linf_depth(self, tmp_path):
        rc, _, out = synth(tmp_path, target="norm", d=2, mode="linf", N=3, M=2, delta=0.05)
        assert rc == EXIT_OK and manifest(out)["depth"] == 10

    def test_set_override(self, tmp_path):
        c = write_config(tmp_path / "c.json", target="x", d=1, N=2, M=2, delta=0.05)
        rc = main(["synthesize", "--config", c, "--set", "M=5", "--out", str(tmp_path / "o")])
        assert rc == EXIT_OK and manifest(tmp_path / "o")["hyperparams"]["M"] == 5

    @pytest.mark.parametrize(
        "cfg",
        [
            dict(target="nope", d=1, N=2, M=2, delta=0.05),
            dict(target="x", d=1, N=2, M=2),
            dict(target="x", d=1, N=2, M=2, delta=0.05, budget={"mu": 1, "alpha": 1, "epsilon": 0.5}),
            dict(target="x", d=1, N=2, M=2, delta=0.9),
            dict(target="x", d=1, N=2, M=2, delta=0.05, colour="red"),
        ],
    )
    def test_invalid_config(self, tmp_path, cfg):
        rc, _, _ = synth(tmp_path, **cfg)
        assert rc == EXIT_CONFIG

    def test_malformed_json_names_line(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text('{\n "target": "x",\n oops\n}')
        assert main(["synthesize", "--config", str(path)]) == EXIT_CONFIG
        assert "line 3" in capsys.readouterr().err

    def test_infeasible(self, tmp_path):
        rc, _, _ = synth(tmp_path, target="x", d=1, mode="lp", budget={"mu": 1, "alpha": 1, "epsilon": 4})
        assert rc == EXIT_INFEASIBLE

    def test_capability(self, tmp_path):
        rc, _, _ = synth(tmp_path, target="x", d=5, mode="linf", N=2, M=1, delta=0.1)
        assert rc == EXIT_CAPABILITY


class TestVerify:
    def test_budget_round_trip(self, tmp_path):
        cfg = dict(target="x", d=1, mode="lp", budget={"mu": 1, "alpha": 1, "epsilon": 0.5}, samples=5000)
        rc, c, out = synth(tmp_path, **cfg)
        assert main(["verify", "--config", c, "--out", str(out)]) == EXIT_OK
        body = json.loads((out / "report.json").read_text())
        lp = next(r for r in body["reports"] if r["check"] == "lp")
        assert body["passed"] and lp["lp_err_estimate"] <= 0.5
        header = (out / "samples.csv").read_text().splitlines()[0]
        assert header == "x1,f,phi,abs_err,in_omega"

    def test_constant_all_zero(self, tmp_path):
        cfg = dict(target="const", d=2, mode="lp", N=3, M=3, delta=0.02, samples=2000, grid=41)
        rc, c, out = synth(tmp_path, **cfg)
        assert main(["verify", "--config", c, "--out", str(out)]) == EXIT_OK
        body = json.loads((out / "report.json").read_text())
        assert all(r["measured"] == 0.0 for r in body["reports"])

    def test_failing_check_exit_1(self, tmp_path):
        # a Hölder constant far below the target's true one makes the bound fail
        cfg_bad = write_config(tmp_path / "bad.json", target="sq", d=1, mode="off-region",
                               budget={"mu": 0.01, "alpha": 1, "epsilon": 1.0, "delta": 0.05})
        assert main(["synthesize", "--config", cfg_bad, "--out", str(tmp_path / "b")]) == EXIT_OK
        assert main(["verify", "--config", cfg_bad, "--out", str(tmp_path / "b")]) == EXIT_FAILED

    def test_tampered_weight_exit_4(self, tmp_path):
        rc, c, out = synth(tmp_path, target="x", d=1, N=2, M=2, delta=0.05)
        w = out / "weights.json"
        doc = json.loads(w.read_text())
        doc["layers"][0]["bias"][0] = "0.06"
        w.write_text(json.dumps(doc))
        assert main(["verify", "--config", c, "--out", str(out)]) == EXIT_INTEGRITY

    def test_flipped_byte_exit_4(self, tmp_path):
        rc, c, out = synth(tmp_path, target="x", d=1, N=2, M=2, delta=0.05)
        w = out / "weights.json"
        raw = bytearray(w.read_bytes())
        raw[len(raw) // 2] ^= 0x01
        w.write_bytes(bytes(raw))
        assert main(["verify", "--config", c, "--out", str(out)]) == EXIT_INTEGRITY

    def test_wrong_target_exit_4(self, tmp_path):
        rc, c, out = synth(tmp_path, target="x", d=1, N=4, M=3, delta=0.02)
        other = write_config(tmp_path / "o.json", target="sq", d=1, N=4, M=3, delta=0.02)
        assert main(["verify", "--config", other, "--out", str(out)]) == EXIT_INTEGRITY

    def test_report_command(self, tmp_path, capsys):
        rc, c, out = synth(tmp_path, target="x", d=1, N=2, M=2, delta=0.05)
        main(["verify", "--config", c, "--out", str(out)])
        capsys.readouterr()
        assert main(["report", str(out / "report.json")]) == EXIT_OK
        assert "overall: PASS" in capsys.readouterr().out


class TestEval:
    def test_example(self, tmp_path):
        rc, _, out = synth(tmp_path, target="x", d=1, N=2, M=2, delta=0.05)
        pts = tmp_path / "p.csv"
        pts.write_text("0.7\n0.25\n")
        dest = tmp_path / "vals.txt"
        assert main(["eval", str(out / "weights.json"), str(pts), "--out", str(dest)]) == EXIT_OK
        assert dest.read_text().split() == ["0.5", "0.0"]

    def test_overflow_annotation(self, tmp_path):
        rc, _, out = synth(tmp_path, target="norm", d=2, N=32, M=3, delta=0.003)
        pts = tmp_path / "p.csv"
        pts.write_text("0.01,0.01\n")
        dest = tmp_path / "vals.txt"
        main(["eval", str(out / "weights.json"), str(pts), "--path", "float", "--out", str(dest)])
        assert dest.read_text().strip().endswith("(overflow)")
        main(["eval", str(out / "weights.json"), str(pts), "--path", "exact", "--out", str(dest)])
        assert dest.read_text().strip() == "0.0"

    @pytest.mark.parametrize("content,line", [("0.1\nabc\n", 2), ("0.2\n0.3\n1.5\n", 3), ("0.1,0.2\n", 1)])
    def test_malformed_points(self, tmp_path, capsys, content, line):
        rc, _, out = synth(tmp_path, target="x", d=1, N=2, M=2, delta=0.05)
        pts = tmp_path / "p.csv"
        pts.write_text(content)
        assert main(["eval", str(out / "weights.json"), str(pts)]) == EXIT_CONFIG
        assert f"line {line}" in capsys.readouterr().err


class TestDeterminism:
    def test_byte_identical(self, tmp_path):
        cfg = dict(target="cosmix", d=2, mode="lp", N=4, M=3, delta=0.01, samples=3000, grid=51, seed=9)
        c = write_config(tmp_path / "c.json", **cfg)
        outs = []
        for name in ("a", "b"):
            out = tmp_path / name
            assert main(["synthesize", "--config", c, "--out", str(out)]) == EXIT_OK
            assert main(["verify", "--config", c, "--out", str(out)]) == EXIT_OK
            outs.append(out)
        for fname in ("weights.json", "manifest.json", "report.json", "samples.csv"):
            assert (outs[0] / fname).read_bytes() == (outs[1] / fname).read_bytes()


def test_runconfig_validation():
    with pytest.raises(ConfigError):
        RunConfig(target="x", N=2, M=2, delta=0.1, mode="sup")
    with pytest.raises(ConfigError):
        RunConfig(target="x", N=2, M=2, delta=0.1, seed=-1)
