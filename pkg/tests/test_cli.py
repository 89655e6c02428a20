"""Tests for channel specs and the cqbl command line."""

import csv
import io
import json
from pathlib import Path

import numpy as np
import pytest

from cqbl.broadcast.catalog import get_channel, list_channels
from cqbl.cli.channel_spec import ChannelSpec, channel_difference, load_spec, save_spec
from cqbl.cli.commands import CSV_HEADER
from cqbl.cli.parser import build_parser
from cqbl.config import Settings
from cqbl.core.app import create_app
from cqbl.core.errors import SpecParseError
from cqbl.core.serialization import encode_matrix

FAST_SETTINGS = {
    "optimizer": {"restarts": 4, "refine_top": 2},
    "region": {"grid_resolution": 16, "ternary_grid_resolution": 4, "ascent_steps": 40},
    "converse": {"mu_points": 9},
    "runtime": {"threads": 1},
}


@pytest.fixture
def config_dir(tmp_path):
    directory = tmp_path / "config"
    directory.mkdir()
    (directory / "settings.json").write_text(json.dumps(FAST_SETTINGS))
    return str(directory)


@pytest.fixture
def run(config_dir, capsys):
    """Run cqbl with the fast settings; returns (exit code, stdout)."""
    def _run(*argv):
        code = create_app(["--config-dir", config_dir, *argv]).run()
        return code, capsys.readouterr().out
    return _run


def test_parser_requires_command():
    with pytest.raises(SystemExit) as exc:
        build_parser().parse_args([])
    assert exc.value.code == 2


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        build_parser().parse_args(["--version"])
    assert exc.value.code == 0
    assert "cqbl" in capsys.readouterr().out


def test_parser_lists():
    args = build_parser().parse_args(["region", "x.json", "--t-grid", "0,0.1,0.2"])
    assert args.t_grid == [0.0, 0.1, 0.2]
    with pytest.raises(SystemExit):
        build_parser().parse_args(["audit", "strong-converse", "x.json", "--rate-rb", "1", "--rate-rc", "0",
                                   "--n-list", "1,two"])


@pytest.mark.parametrize("name", list_channels())
def test_spec_files_match_catalog(spec_path, name):
    spec = load_spec(spec_path(name))
    entry = get_channel(name)
    same_shape, diff = channel_difference(spec.channel, entry.channel)
    assert same_shape
    assert diff < 1e-9
    assert (spec.degrading_map is None) == (entry.degrading_map is None)


def test_spec_roundtrip(tmp_path):
    spec = ChannelSpec.from_catalog(get_channel("qubit-pure"))
    path = save_spec(spec, tmp_path / "qubit.json")
    loaded = load_spec(path)
    assert loaded.name == "qubit-pure"
    assert channel_difference(loaded.channel, spec.channel) == (True, 0.0)


def _noiseless_dict():
    return ChannelSpec.from_catalog(get_channel("noiseless-bit")).to_dict()


@pytest.mark.parametrize("mutate", [
    lambda d: d.pop("states"),
    lambda d: d.update(alphabet=[]),
    lambda d: d.update(d_B=0),
    lambda d: d.update(d_C=True),
    lambda d: d.update(states=[[[1, 0]]]),
    lambda d: d.update(alphabet=["0", "1", "2"]),
    lambda d: d.update(degrading_map=[encode_matrix(np.array([[0, 1], [1, 0]]))]),
])
def test_spec_rejections(mutate):
    data = _noiseless_dict()
    mutate(data)
    with pytest.raises(SpecParseError):
        ChannelSpec.from_dict(data)


def test_spec_must_be_object():
    with pytest.raises(SpecParseError):
        ChannelSpec.from_dict([1, 2])


def test_check_degraded_cli(run, spec_path):
    code, out = run("check-degraded", spec_path("noiseless-bit"))
    assert code == 0
    data = json.loads(out)
    assert data["degraded"] is True
    assert set(data) == {"degraded", "residual", "kraus_rank", "iterations", "tol"}


def test_check_degraded_fails_on_swapped(run, spec_path):
    code, out = run("check-degraded", spec_path("swapped-qubit"))
    assert code == 1
    assert json.loads(out)["degraded"] is False


def test_malformed_spec_exits_2(run, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{\"alphabet\": [")
    assert run("check-degraded", str(bad))[0] == 2
    assert run("region", str(tmp_path / "missing.json"))[0] == 2


@pytest.mark.parametrize("eps", ["0", "1.5"])
def test_bound_rejects_eps(run, tmp_path, eps):
    code, out = run("bound", str(tmp_path / "never-read.json"), "--n", "10", "--eps", eps)
    assert code == 2
    assert out == ""


def test_region_cli(run, spec_path):
    code, out = run("region", spec_path("noiseless-bit"), "--t-grid", "0,0.3")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    rows = list(csv.DictReader(io.StringIO("\n".join(l for l in lines if not l.startswith("#")))))
    assert [float(r["t"]) for r in rows] == [0.0, 0.3]
    assert float(rows[0]["F_t"]) == pytest.approx(np.log(2), abs=3e-3)
    assert float(rows[1]["F_t"]) == pytest.approx(np.log(2) - 0.3, abs=3e-3)
    assert any(l.startswith("# concavity:") for l in lines)


def test_region_cli_bits(run, spec_path):
    code, out = run("--bits", "region", spec_path("noiseless-bit"), "--t-grid", "0,0.5")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO("\n".join(l for l in out.splitlines() if not l.startswith("#")))))
    assert float(rows[0]["F_t"]) == pytest.approx(1.0, abs=5e-3)
    assert float(rows[1]["F_t"]) == pytest.approx(0.5, abs=5e-3)


def test_region_requires_degraded(run, spec_path):
    assert run("region", spec_path("swapped-qubit"), "--t-grid", "0")[0] == 1


def test_bound_cli(run, spec_path, tmp_path):
    region_out = tmp_path / "outer.csv"
    code, out = run("bound", spec_path("noiseless-bit"), "--n", "50", "--eps", "0.1",
                    "--rate-rb", "0.2", "--rate-rc", "0.2", "--region-out", str(region_out))
    assert code == 0
    data = json.loads(out)
    assert data["units"] == "nats"
    assert data["exponent"] == "inside region"
    assert data["rb_bound"] > data["single_letter"][0]
    assert region_out.read_text().splitlines()[0] == "rc,rb"


def test_bound_cli_outside(run, spec_path):
    code, out = run("bound", spec_path("noiseless-bit"), "--n", "50", "--eps", "0.1",
                    "--rate-rb", "0.6", "--rate-rc", "0.6")
    assert code == 0
    exponent = json.loads(out)["exponent"]
    assert exponent["f"] > 0


def test_verify_cli(run):
    code, out = run("verify", "--suite", "alt", "--trials", "3", "--seed", "4")
    assert code == 0
    data = json.loads(out)
    assert data["seed"] == 4
    assert list(data["suites"]) == ["alt"]


def test_audit_fano_cli(run, spec_path):
    code, out = run("audit", "fano", spec_path("noiseless-bit"), "--n", "1", "--m-size", "2", "--k-size", "2")
    assert code == 0
    data = json.loads(out)
    assert data["violations"] == []
    assert data["receiver"] == "B"


def test_output_file(run, spec_path, tmp_path):
    target = tmp_path / "summary.json"
    code, out = run("verify", "--suite", "alt", "--trials", "2", "--out", str(target))
    assert code == 0
    assert out == ""
    assert json.loads(target.read_text())["success"] is True


def test_config_path_and_show(run, config_dir):
    code, out = run("config", "path")
    assert code == 0
    assert out.strip() == config_dir
    code, out = run("config", "show")
    assert code == 0
    assert json.loads(out)["converse"]["mu_points"] == FAST_SETTINGS["converse"]["mu_points"]


def test_config_set_persists(run, config_dir):
    assert run("config", "set", "converse.mu_points=11")[0] == 0
    saved = json.loads((Path(config_dir) / "settings.json").read_text())
    assert saved["converse"]["mu_points"] == 11
    assert saved["region"]["grid_resolution"] == FAST_SETTINGS["region"]["grid_resolution"]


@pytest.mark.parametrize("assignment", ["converse.nope=1", "converse.mu_points=many", "converse.mu_points"])
def test_config_set_rejects(run, config_dir, assignment):
    before = (Path(config_dir) / "settings.json").read_text()
    assert run("config", "set", assignment)[0] == 2
    assert (Path(config_dir) / "settings.json").read_text() == before


def test_config_backup_and_reset(run, config_dir):
    code, out = run("config", "backup")
    assert code == 0
    assert Path(out.strip()).exists()
    assert run("config", "reset")[0] == 0
    assert json.loads((Path(config_dir) / "settings.json").read_text()) == Settings().to_dict()


def test_bits_flag_is_not_persisted(run, config_dir):
    assert run("--bits", "config", "set", "runtime.seed=9")[0] == 0
    saved = json.loads((Path(config_dir) / "settings.json").read_text())
    assert saved["runtime"]["seed"] == 9
    assert saved["runtime"]["bits"] is False
