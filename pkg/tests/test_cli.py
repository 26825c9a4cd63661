import csv
import json
import subprocess
import sys

import pytest

from magcap.cli import main


def run(tmp_path, *argv):
    out = tmp_path / "out.csv"
    code = main(list(argv) + ["--out", str(out)])
    return code, out


def read_csv(path):
    text = path.read_text().splitlines()
    assert text[0].startswith("# schema: magcap.")
    rows = list(csv.reader(text[1:]))
    return text[0], rows[0], rows[1:]


def check_sidecar(out):
    sidecar = out.parent / (out.name + ".config.json")
    assert sidecar.exists()
    cfg = json.loads(sidecar.read_text())
    assert "command" in cfg
    assert "seed" in cfg
    return cfg


def test_force_profile(tmp_path):
    code, out = run(tmp_path, "force-profile", "--samples", "64")
    assert code == 0
    schema, header, rows = read_csv(out)
    assert schema == "# schema: magcap.force-profile/1"
    assert header[0] == "theta_ax_deg"
    assert len(rows) == 64
    # normalized totals peak at exactly 1
    norms = [float(r[header.index("f_total_norm")]) for r in rows]
    assert max(norms) == pytest.approx(1.0)
    assert check_sidecar(out)["command"] == "force-profile"
    assert check_sidecar(out)["samples"] == 64


def test_risk_sweep(tmp_path):
    code, out = run(tmp_path, "risk-sweep", "--modes", "rrma")
    assert code == 0
    _, header, rows = read_csv(out)
    assert set(r[0] for r in rows) == {"rrma"}
    net_col = header.index("net_twist_per_cycle_n")
    mass_col = header.index("abs_friction_impulse_n")
    for r in rows:
        assert abs(float(r[net_col])) < 1e-10 * float(r[mass_col])


def test_normal_force_sweep(tmp_path):
    code, out = run(tmp_path, "normal-force-sweep")
    assert code == 0
    _, header, rows = read_csv(out)
    means = [float(r[1]) for r in rows]
    maxes = [float(r[2]) for r in rows]
    assert means == sorted(means)
    assert maxes == sorted(maxes)
    assert all(mx >= mn for mn, mx in zip(means, maxes))


def test_localize_bench(tmp_path):
    code, out = run(tmp_path, "localize-bench", "--trials", "20")
    assert code == 0
    _, header, rows = read_csv(out)
    assert len(rows) == 21
    assert rows[-1][0] == "rms"
    rms_m = float(rows[-1][1])
    assert 0.0005 < rms_m < 0.012


def test_propel_writes_summary_and_trajectories(tmp_path):
    code, out = run(tmp_path, "propel", "--modes", "rrma", "--n-seeds", "1",
                    "--time-budget-s", "10")
    assert code == 0
    _, header, rows = read_csv(out)
    assert len(rows) == 1
    assert rows[0][0] == "rrma"
    traj = tmp_path / "out_rrma_seed0.csv"
    schema, theader, trows = read_csv(traj)
    assert schema == "# schema: magcap.trajectory/1"
    assert theader == ["t", "arc_length_m", "twist_rad", "theta_ax_deg",
                       "f_p", "f_l_signed", "f_r"]
    assert len(trows) > 100


def test_approx_check(tmp_path):
    code, out = run(tmp_path, "approx-check")
    assert code == 0
    _, _, rows = read_csv(out)
    errs = [float(r[1]) for r in rows]
    assert errs == sorted(errs)
    assert errs[0] < 0.01  # 1 deg sweep: approximation nearly exact


def test_deterministic_output(tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    a.mkdir()
    b.mkdir()
    code1, out1 = run(a, "localize-bench", "--trials", "5")
    code2, out2 = run(b, "localize-bench", "--trials", "5")
    assert code1 == code2 == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"seed": 7, "alpha_deg": 15.0}))
    out = tmp_path / "out.csv"
    code = main(["force-profile", "--samples", "8", "--config", str(cfg),
                 "--alpha-deg", "20.0", "--out", str(out)])
    assert code == 0
    side = json.loads((tmp_path / "out.csv.config.json").read_text())
    assert side["seed"] == 7  # from file
    assert side["alpha_deg"] == 20.0  # flag wins


def test_errors_exit_nonzero(tmp_path, capsys):
    out = tmp_path / "out.csv"
    assert main(["propel", "--modes", "", "--out", str(out)]) == 1
    assert "error:" in capsys.readouterr().err
    assert main(["force-profile", "--d-m", "-0.1",
                 "--out", str(out)]) == 1
    cfg = tmp_path / "bad.json"
    cfg.write_text('{"no_such_key": 1}')
    assert main(["force-profile", "--config", str(cfg),
                 "--out", str(out)]) == 1


def test_entry_point_runs():
    proc = subprocess.run([sys.executable, "-m", "magcap.cli", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.strip()
