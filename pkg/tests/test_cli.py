import json
import subprocess
import sys

import numpy as np
import pytest

from mtinverse.cli import dumps, main
from mtinverse.systems import builtin_system


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_forward_matches_library(capsys):
    code, rows = run(capsys, "forward", "--system", "ms1", "--phi", "0.7,0.2,0.1", "--freqs", "2e9")
    assert code == 0
    expected = builtin_system("ms1").effective([0.7, 0.2, 0.1], 2e9)
    assert rows == [{"frequency_hz": 2e9, "eps_re": expected.real, "eps_im": expected.imag}]


def test_forward_pure_matrix(capsys):
    code, rows = run(capsys, "forward", "--system", "ms3", "--phi", "1,0,0", "--m", "3")
    s = builtin_system("ms3")
    for row in rows:
        assert complex(row["eps_re"], row["eps_im"]) == s.normalizer_permittivity(row["frequency_hz"])


@pytest.mark.parametrize("phi", ["0.7,0.2,0.2", "0.7,0.3", "1.2,-0.1,-0.1", "a,b,c"])
def test_forward_rejects_bad_phi(caplog, phi):
    assert main(["forward", "--system", "ms1", "--phi", phi, "--m", "1"]) == 2
    assert "--phi" in caplog.text


def test_forward_noise_is_seeded(capsys):
    args = ["forward", "--system", "ms2", "--phi", "0.7,0.2,0.1", "--m", "3", "--noise", "0.1", "--seed", "5"]
    _, a = run(capsys, *args)
    _, b = run(capsys, *args)
    assert a == b


def forward_file(capsys, tmp_path, system, phi, m, extra=()):
    _, rows = run(capsys, "forward", "--system", system, "--phi", phi, "--m", str(m), *extra)
    path = tmp_path / "meas.json"
    path.write_text(json.dumps(rows), encoding="utf-8")
    return path


def test_invert_zero_noise_fixture(capsys, tmp_path):
    path = forward_file(capsys, tmp_path, "ms1", "0.72,0.18,0.1", 2)
    code, rep = run(capsys, "invert", "--system", "ms1", "--measurements", str(path))
    assert code == 0
    assert np.max(np.abs(np.array(rep["phi_star"]) - [0.72, 0.18, 0.1])) <= 1e-5
    assert rep["diagnostics"]["identifiable"] is True


def test_invert_reports_bound_with_noise(capsys, tmp_path):
    path = forward_file(capsys, tmp_path, "ms3", "0.72,0.18,0.1", 1, ["--noise", "0.1", "--seed", "3"])
    code, rep = run(capsys, "invert", "--system", "ms3", "--measurements", str(path), "--noise", "0.1")
    assert code == 0
    err = np.max(np.abs(np.array(rep["phi_star"]) - [0.72, 0.18, 0.1]))
    assert err <= rep["diagnostics"]["bound"]


def test_invert_not_identifiable(capsys, tmp_path):
    cfg = {
        "name": "four",
        "components": [
            {"label": "m", "model": {"type": "constant", "re": 3.0, "im": 0.1}},
            {"label": "a", "model": {"type": "constant", "re": 5.5, "im": 0.05}},
            {"label": "b", "model": {"type": "constant", "re": 1.0006}},
            {"label": "c", "model": {"type": "constant", "re": 9.0, "im": 1.0}},
            {"label": "d", "model": {"type": "constant", "re": 2.0, "im": 0.5}},
        ],
        "band": {"f_low": 1e9, "f_high": 2e9},
    }
    cfg_path = tmp_path / "five.json"
    cfg_path.write_text(json.dumps(cfg), encoding="utf-8")
    _, rows = run(capsys, "forward", "--config", str(cfg_path), "--phi", "0.6,0.1,0.1,0.1,0.1", "--m", "1")
    meas = tmp_path / "m.json"
    meas.write_text(json.dumps(rows), encoding="utf-8")
    code, rep = run(capsys, "invert", "--config", str(cfg_path), "--measurements", str(meas))
    assert code == 3
    assert rep["diagnostics"]["identifiable"] is False


def test_invert_dominance(capsys, tmp_path):
    path = forward_file(capsys, tmp_path, "ms1", "0.35,0.5,0.15", 1)
    code, rep = run(capsys, "invert", "--system", "ms1", "--measurements", str(path), "--dominance")
    phi = np.array(rep["phi_star"])
    assert np.all(phi[0] >= phi[1:] - 1e-8)


def test_invert_bad_measurements(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps([{"frequency_hz": 1e9, "eps_re": 3.0}]), encoding="utf-8")
    assert main(["invert", "--system", "ms1", "--measurements", str(path)]) == 2
    assert main(["invert", "--system", "ms1", "--measurements", str(tmp_path / "none.json")]) == 2


def test_minimizers(capsys):
    s = builtin_system("ms1")
    eps_hat = (s.effective([0.7, 0.2, 0.1], 2e9) / s.normalizer_permittivity(2e9)).real
    code, out = run(capsys, "minimizers", "--system", "ms1", "--eps-hat", repr(eps_hat), "--freq", "2e9")
    assert code == 0 and out["domain"] == "simplex"
    u = np.array(out["u"])
    for g in out["generators"]:
        assert abs(u @ g) <= 1e-9 * np.max(np.abs(u))
    code, out = run(capsys, "minimizers", "--system", "ms1", "--eps-hat", repr(eps_hat), "--domain", "ordered")
    assert code == 0 and out["domain"] == "ordered_simplex"


def test_minimizers_empty_set(capsys):
    # far above every component: u is all positive
    assert main(["minimizers", "--system", "ms1", "--eps-hat", "0.01"]) == 3


def test_diagnose_ms3_single_frequency(capsys):
    code, out = run(capsys, "diagnose", "--system", "ms3", "--m", "1")
    assert code == 0 and out["identifiable"] is True and out["rank"] == 2


def test_diagnose_bound_and_phi(capsys):
    code, out = run(capsys, "diagnose", "--system", "ms2", "--m", "5", "--phi", "0.7,0.2,0.1", "--noise", "0.1")
    assert code == 0
    assert out["phi"] == [0.7, 0.2, 0.1]
    assert out["bound"] > 0
    assert len(out["frequencies_hz"]) == 5


def test_validate_deterministic_across_workers(capsys, tmp_path):
    paths = []
    for workers in ("1", "3"):
        csv = tmp_path / f"w{workers}.csv"
        agg = tmp_path / f"w{workers}.json"
        code, out = run(capsys, "validate", "--system", "ms2", "--m", "1,5", "--samples", "15",
                        "--noise", "0.1", "--seed", "42", "--workers", workers,
                        "--csv", str(csv), "--aggregate", str(agg))
        assert code == 0
        assert [a["m"] for a in out] == [1, 5]
        assert json.loads(agg.read_text(encoding="utf-8")) == out
        paths.append(csv)
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_validate_uses_config_campaign(capsys, tmp_path):
    cfg = builtin_system("ms3").to_config()
    cfg["campaign"] = {"m_values": [2], "samples": 4, "noise": {"delta_R": 0.05, "delta_I": 0.05}, "seed": 1}
    cfg["output"] = {"csv": str(tmp_path / "out.csv")}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg), encoding="utf-8")
    code, out = run(capsys, "validate", "--config", str(path))
    assert code == 0 and out[0]["m"] == 2 and out[0]["samples"] == 4
    assert (tmp_path / "out.csv").exists()


def test_config_and_system_exclusive(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["forward", "--system", "ms1", "--config", "x.json", "--phi", "1,0,0", "--m", "1"])
    assert exc.value.code == 2


def test_dumps_round_trips_doubles():
    values = [0.1, 1 / 3, 2e9, 5e-324, -0.0]
    assert json.loads(dumps(values)) == values
    assert json.loads(dumps({"x": float("nan")})) == {"x": None}


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "mtinverse", "diagnose", "--system", "ms3", "--m", "1"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert json.loads(res.stdout)["identifiable"] is True
