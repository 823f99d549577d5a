import csv
import io
import json
import math

import numpy as np
import pytest

from qpsr import cli
from qpsr.errors import SingularFisherError
from qpsr.experiments import (
    CSV_HEADER,
    ConfigError,
    config_from_mapping,
    default_config,
    load_config,
    mse,
    parse_angle,
    run,
    write_outputs,
)


@pytest.mark.parametrize(
    "text,value",
    [("pi/7", math.pi / 7), ("2*pi/3", 2 * math.pi / 3), ("-pi", -math.pi), ("pi", math.pi), ("0.25", 0.25), (1, 1.0)],
)
def test_parse_angle(text, value):
    assert parse_angle(text) == pytest.approx(value)


def test_mse():
    assert mse([1, 2, 3], [1, 2, 5]) == pytest.approx(4 / 3)
    with pytest.raises(ValueError):
        mse([], [])
    with pytest.raises(ValueError):
        mse([1], [1, 2])


def test_config_errors_name_fields():
    with pytest.raises(ConfigError) as info:
        config_from_mapping({"experiment": "fig2", "N": 0, "t_grid": [1.0, 0.5], "bogus": 1})
    text = str(info.value)
    for name in ("N:", "t_grid:", "bogus:"):
        assert name in text
    with pytest.raises(ConfigError):
        config_from_mapping({"experiment": "fig3b", "methods": ["stand"]})
    with pytest.raises(ConfigError):
        config_from_mapping({"experiment": "nope"})


def test_load_toml(tmp_path):
    path = tmp_path / "c.toml"
    path.write_text('experiment = "fig2"\nphi_values = ["pi/7", 0.0]\nt_grid = [0.5, 1.0]\nN = 200\nbatches = 0\n')
    cfg = load_config(path)
    assert cfg.phi_values == [pytest.approx(math.pi / 7), 0.0]
    assert cfg.N == 200
    (tmp_path / "bad.toml").write_text("N = = 1")
    with pytest.raises(ConfigError):
        load_config(tmp_path / "bad.toml")


def _small_fig2(**kw):
    return config_from_mapping(
        {"experiment": "fig2", "t_grid": [0.5, 1.0, 1.5], "phi_values": [0.0, 0.3], "N": 200, "batches": 3, **kw}
    )


def test_fig2_rows_and_csv(tmp_path):
    cfg = _small_fig2()
    rec = run(cfg)
    assert len(rec.rows) == 3 * 2 * 3
    paths = write_outputs(rec, cfg, tmp_path / "out.csv")
    rows = list(csv.reader(io.StringIO(paths[0].read_text())))
    assert tuple(rows[0]) == CSV_HEADER
    stoc = [r for r in rows[1:] if r[5] == "stoc"]
    assert stoc and all(r[8] == "200" and float(r[7]) > 0 for r in stoc)
    side = json.loads(paths[1].read_text())
    assert side["config_hash"] == cfg.hash() and side["mse"]


def test_fig2_exact_rows_match_closed_form():
    rec = run(_small_fig2(methods=["exact", "fd"]))
    _, ex = rec.series("exact", phi=0.3)
    _, fd = rec.series("fd", phi=0.3)
    assert np.allclose(ex, fd, atol=1e-8)


def test_json_format(tmp_path):
    cfg = _small_fig2(format="json", methods=["exact"])
    (path,) = write_outputs(run(cfg), cfg, tmp_path / "o.json")
    doc = json.loads(path.read_text())
    assert doc["experiment"] == "fig2" and len(doc["rows"]) == 6


def test_fig3b_skips_undefined_shift_points():
    cfg = config_from_mapping(
        {"experiment": "fig3b", "t_grid": [1.9, 2.0], "gamma": [0.1], "N": 100, "batches": 0, "n_qubits": 2}
    )
    rec = run(cfg)
    assert [s["t"] for s in rec.skipped] == [2.0]
    assert {r["method"] for r in rec.rows if r["t"] == 2.0} == {"exact"}


def test_fig3a_closed_form_matches_exact():
    cfg = config_from_mapping(
        {"experiment": "fig3a", "t_grid": [0.7, 1.4], "phi_values": [0.2], "methods": ["exact", "closed_form"]}
    )
    rec = run(cfg)
    _, ex = rec.series("exact")
    _, cf = rec.series("closed_form")
    assert np.allclose(ex, cf, rtol=1e-8)


def test_custom_experiment():
    cfg = config_from_mapping(
        {
            "experiment": "custom",
            "n_qubits": 1,
            "generators": ["pauli:x:0", "pauli:z:0"],
            "phi_values": [0.4, 0.2],
            "probe": "1,1j",
            "t_grid": [0.5, 1.0],
            "methods": ["exact", "fd"],
        }
    )
    rec = run(cfg)
    _, ex = rec.series("exact")
    _, fd = rec.series("fd")
    assert np.all(np.isfinite(ex)) and np.allclose(ex, fd, rtol=1e-6)


def test_fig4_rows():
    cfg = config_from_mapping({"experiment": "fig4", "p_values": [2, 3, 4], "repetitions": 2, "N": 100})
    rec = run(cfg)
    assert [r["method"] for r in rec.rows] == ["stoc"] * 3 + ["fd"] * 3 + ["sql"] * 3 + ["hl"] * 3
    assert rec.rows[6]["value"] == rec.rows[0]["value"]


def test_cli_exit_codes(tmp_path, monkeypatch, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text('experiment = "fig2"\nN = -1\n')
    assert cli.main(["validate", "--config", str(bad)]) == 2
    assert "N:" in capsys.readouterr().err
    good = tmp_path / "good.toml"
    good.write_text('experiment = "fig2"\nt_grid = [0.5]\nphi_values = [0.1]\nN = 50\nbatches = 0\n')
    assert cli.main(["validate", "--config", str(good)]) == 0

    def boom(*a, **k):
        raise SingularFisherError("singular", null_direction=np.zeros(1), condition=math.inf)

    monkeypatch.setattr(cli, "run", boom)
    assert cli.main(["run", "--config", str(good), "--out", str(tmp_path / "x.csv")]) == 3


def test_cli_run_writes_files(tmp_path):
    good = tmp_path / "good.toml"
    good.write_text('experiment = "fig2"\nt_grid = [0.5]\nphi_values = [0.1]\nN = 50\nbatches = 0\n')
    out = tmp_path / "r.csv"
    assert cli.main(["run", "--config", str(good), "--out", str(out), "--seed", "3"]) == 0
    assert out.exists() and (tmp_path / "r.csv.json").exists()
    assert ",3\n" in out.read_text()


def test_default_configs_validate():
    for name in ("fig2", "fig3a", "fig3b", "fig4"):
        default_config(name)
