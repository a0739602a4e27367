import pytest

from funnelkit.cli import main, read_config
from funnelkit.errors import ConfigError
from funnelkit.io import read_csv


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_point_baseline(tmp_path, capsys):
    code, out, _ = run(capsys, "point", "--out", str(tmp_path))
    assert code == 0
    assert "I = 0.908" in out and "F = 16.31 dB" in out and "analytic:" in out and "discrepancy" in out
    meta, header, rows = read_csv(tmp_path / "point.csv")
    assert rows[0]["g1"] == 1e4 and meta["source"] == "baseline"


def test_point_decoupled_exit_3(tmp_path, capsys):
    code, _, err = run(capsys, "point", "--g0", "0", "--g1", "0", "--g2", "0", "--out", str(tmp_path))
    assert code == 3 and "no photon flux" in err


def test_malformed_config_exit_1(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("g1 = 1e4\nthis is not a pair\n")
    code, _, err = run(capsys, "point", "--config", str(cfg))
    assert code == 1 and "run.cfg:2" in err
    cfg.write_text("# comment\ng2 = fast\n")
    code, _, err = run(capsys, "point", "--config", str(cfg))
    assert code == 1 and "run.cfg:2" in err and "g2" in err


def test_config_file_rates_and_overrides(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("dephasing = 1e4\ng0 = 0\ng1 = 1e4\ng2 = 1e2\nkappa1 = 1e5\nkappa2 = 1e2\n")
    code, out, _ = run(capsys, "point", "--config", str(cfg), "--g0", "1000", "--out", str(tmp_path))
    assert code == 0 and "g0=1000" in out and "beta = 1.99" in out
    with pytest.raises(ConfigError, match="unknown key"):
        (tmp_path / "bad.cfg").write_text("speed = 3\n")
        read_config(tmp_path / "bad.cfg")


def test_partial_config_and_conflicts(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("g1 = 1e4\n")
    assert run(capsys, "point", "--config", str(cfg))[0] == 1
    assert run(capsys, "point", "--config", str(cfg), "--preset", "bowtie_optimal")[0] == 1
    assert run(capsys, "point", "--preset", "bowtie_unknown")[0] == 1
    assert run(capsys, "point", "--g1", "-1")[0] == 1
    assert run(capsys, "point", "--config", str(tmp_path / "missing.cfg"))[0] == 1


def test_sweep_inline_matches_point(tmp_path, capsys):
    run(capsys, "point", "--out", str(tmp_path))
    code, _, _ = run(capsys, "sweep", "--axis", "kappa2:log:600:600:1", "--out", str(tmp_path), "--name", "one")
    assert code == 0
    _, _, point_rows = read_csv(tmp_path / "point.csv")
    _, header, sweep_rows = read_csv(tmp_path / "one.csv")
    for name in header[1:]:
        assert sweep_rows[0][name] == point_rows[0][name]


def test_sweep_preset_outputs(tmp_path, capsys):
    code, out, _ = run(capsys, "sweep", "--preset", "fig3b", "--format", "csv,svg", "--out", str(tmp_path))
    assert code == 0
    meta, header, rows = read_csv(tmp_path / "fig3b.csv")
    assert meta["preset"] == "fig3b" and header[0] == "kappa2" and len(rows) == 31
    assert (tmp_path / "fig3b_I.svg").exists()


def test_figure_alias(tmp_path, capsys):
    code, _, _ = run(capsys, "figure", "fig4", "--out", str(tmp_path), "--g2", "200")
    assert code == 0
    meta, _, rows = read_csv(tmp_path / "fig4.csv")
    assert "g2=200" in meta["base"] and len(rows) == 93


def test_sweep_errors(tmp_path, capsys):
    assert run(capsys, "sweep", "--out", str(tmp_path))[0] == 1
    assert run(capsys, "sweep", "--axis", "gamma1:log:1:2:2", "--out", str(tmp_path))[0] == 1
    assert run(capsys, "figure", "fig9", "--out", str(tmp_path))[0] == 1
    assert run(capsys, "sweep", "--axis", "g2:log:1:2:2", "--format", "png", "--out", str(tmp_path))[0] == 1


def test_convert(tmp_path, capsys):
    code, out, _ = run(capsys, "convert", "--wavelength-nm", "625", "--lifetime-ns", "2.5", "--kappa2", "600")
    assert code == 0 and "Q(kappa2 = 600 Gamma_1) = 12557.7" in out and "4.000000e+08" in out
    code, out, _ = run(capsys, "convert", "--wavelength-nm", "625", "--lifetime-ns", "2", "--kappa2", "600")
    assert "= 10046.1" in out
    code, out, _ = run(capsys, "convert", "--wavelength-nm", "625", "--lifetime-ns", "2.5", "--q", "12557.7",
                       "--to-normalized", "2839.68e12", "--out", str(tmp_path))
    assert code == 0 and "7.0992e+06" in out and (tmp_path / "conversion.csv").exists()
    assert run(capsys, "convert", "--lifetime-ns", "2.5")[0] == 1
    assert run(capsys, "convert")[0] == 1


def test_validate_subset(tmp_path, capsys):
    code, out, _ = run(capsys, "validate", "--criteria", "5,10", "--out", str(tmp_path))
    assert code == 0 and "[PASS] C5" in out and "4/4 checks passed" in out
    assert (tmp_path / "validation_report.txt").exists()
    code, out, _ = run(capsys, "validate", "--criteria", "1")
    assert code == 4 and "baseline I: measured 0.908426" in out
    assert run(capsys, "validate", "--criteria", "x")[0] == 1
    assert run(capsys, "validate", "--criteria", "11")[0] == 1
