import math
from pathlib import Path

from spinsqueeze import cli


def run_cli(*argv):
    return cli.main([str(a) for a in argv])


def test_variance_run_is_byte_deterministic(tmp_path):
    args = ["run", "--study", "variance", "--Ctilde", "100", "--delta-tilde", "10",
            "--delta-c", "0", "--I2", "25.2"]
    a, b = tmp_path / "a", tmp_path / "b"
    assert run_cli(*args, "--out", a) == 0
    assert run_cli(*args, "--out", b) == 0
    assert (a / "results.csv").read_bytes() == (b / "results.csv").read_bytes()
    assert (a / "manifest.json").read_bytes() == (b / "manifest.json").read_bytes()
    text = (a / "results.csv").read_text()
    assert "manifest" in text
    assert "0.721071888" in text


def test_missing_study_is_config_error(tmp_path):
    assert run_cli("run", "--out", tmp_path) == 2


def test_missing_parameters_is_config_error(tmp_path):
    assert run_cli("run", "--study", "variance", "--out", tmp_path) == 2


def test_unstable_point_is_numerical_error(tmp_path):
    # I2 = 100 sits between the folds (26.3 and 447) on the unstable branch
    code = run_cli(
        "run", "--study", "variance", "--Ctilde", "100", "--delta-tilde", "10",
        "--delta-c", "0", "--I2", "100", "--out", tmp_path,
    )
    assert code == 3


def test_config_file_with_consistent_blocks(tmp_path):
    delta = 10.0 * 1e-3 - 10.0 / 100.0
    config = tmp_path / "run.ini"
    config.write_text(
        "[physical]\n"
        "gamma = 1.0\ngamma0 = 1e-3\nN = 1e6\ng = 0.02\n"
        f"Omega1 = {math.sqrt(10.0)!r}\n"
        f"Delta1 = {100.0 + 0.5 * delta!r}\nDelta2 = {100.0 - 0.5 * delta!r}\n"
        "Delta_c = 0.0\nkappa = 2.0\ntau = 1.0\n"
        "\n[dimensionless]\n"
        "Ctilde = 100\ndelta_tilde = 10\ndelta_c = 0\nrho = 0.0005\n"
        "\n[study]\nname = variance\n"
    )
    out = tmp_path / "out"
    assert run_cli("run", "--config", config, "--I2", "25.2", "--out", out) == 0
    assert (out / "results.csv").exists()


def test_config_file_with_inconsistent_blocks(tmp_path):
    config = tmp_path / "bad.ini"
    config.write_text(
        "[physical]\n"
        "gamma = 1.0\ngamma0 = 1e-3\nN = 1e6\ng = 0.02\n"
        f"Omega1 = {math.sqrt(10.0)!r}\nDelta1 = 100.0\nDelta2 = 100.0\n"
        "Delta_c = 0.0\nkappa = 2.0\ntau = 1.0\n"
        "\n[dimensionless]\n"
        "Ctilde = 55\ndelta_tilde = 10\ndelta_c = 0\nrho = 0.0005\n"
        "\n[study]\nname = variance\n"
    )
    assert run_cli("run", "--config", config, "--I2", "25.2", "--out", tmp_path / "o") == 2


def test_spectrum_study_writes_figure_and_data(tmp_path):
    code = run_cli(
        "run", "--study", "spectrum", "--Ctilde", "100", "--delta-tilde", "10",
        "--delta-c", "0", "--I2", "25.2", "--omega-max", "300", "--n-omega", "201",
        "--out", tmp_path,
    )
    assert code == 0
    for name in ("results.csv", "manifest.json", "spectrum.dat", "spectrum.png"):
        assert (tmp_path / name).exists(), name


def test_reproduce_table2(tmp_path):
    assert run_cli("reproduce", "table2", "--out", tmp_path) == 0
    text = (tmp_path / "results.csv").read_text()
    assert "dS_min" in text and "field_fraction" in text


def test_reproduce_fig6(tmp_path):
    assert run_cli("reproduce", "fig6", "--points", "9", "--out", tmp_path) == 0
    assert (tmp_path / "figure.png").exists()
    lines = (tmp_path / "results.csv").read_text().splitlines()
    assert len(lines) > 10  # two curves of 9 points plus headers


def test_three_level_steady_via_config(tmp_path):
    delta = 10.0 * 1e-3 - 10.0 / 100.0
    config = tmp_path / "phys.ini"
    config.write_text(
        "[physical]\n"
        "gamma = 1.0\ngamma0 = 1e-3\nN = 1e6\ng = 0.02\n"
        f"Omega1 = {math.sqrt(10.0)!r}\n"
        f"Delta1 = {100.0 + 0.5 * delta!r}\nDelta2 = {100.0 - 0.5 * delta!r}\n"
        "Delta_c = 0.0\nkappa = 2.0\ntau = 1.0\n"
    )
    out = tmp_path / "out"
    code = run_cli(
        "run", "--model", "three-level", "--study", "steady", "--config", config,
        "--I2", "25.2", "--out", out,
    )
    assert code == 0
    assert "Pi2" in (out / "results.csv").read_text()
