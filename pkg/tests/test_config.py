import dataclasses
import json

import pytest

from src.config import DEFAULT_SEED, SEED_ENV, RunConfig
from src.errors import ConfigError


def test_defaults():
    config = RunConfig(command="construct")
    assert config.oversampling == 8
    assert config.trials == 100
    assert config.draws == 200
    assert config.jobs == 0
    assert config.outdir == "out"
    assert config.base_seed == DEFAULT_SEED == 20240101
    config.validate()


def test_from_dict_maps_flag_style_keys():
    config = RunConfig.from_dict({"lambda": 1.2, "seed": 7, "dry-run": True, "N_2d": 64})
    assert config.lam == 1.2
    assert config.base_seed == 7
    assert config.dry_run is True
    assert config.N_2d == 64


def test_from_dict_rejects_unknown_keys():
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"telegram_bot_token": "x"})


def test_from_file(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"command": "sigma-scan", "sigmas": [4, 8], "M": 1024}))
    config = RunConfig.from_file(path)
    assert config.sigmas == [4, 8]
    assert config.M == 1024


def test_from_file_errors(tmp_path):
    with pytest.raises(ConfigError):
        RunConfig.from_file(tmp_path / "missing.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    with pytest.raises(ConfigError):
        RunConfig.from_file(broken)
    listed = tmp_path / "list.json"
    listed.write_text("[1, 2]")
    with pytest.raises(ConfigError):
        RunConfig.from_file(listed)


def test_merged_ignores_unset_flags():
    base = RunConfig(command="zygmund", trials=10, outdir="a")
    merged = base.merged({"trials": None, "outdir": "b"})
    assert merged.trials == 10
    assert merged.outdir == "b"
    assert base.outdir == "a"


def test_seed_from_environment():
    config = RunConfig(command="mikhlin").with_env({SEED_ENV: "42"})
    assert config.base_seed == 42
    assert RunConfig(command="mikhlin").with_env({}).base_seed == DEFAULT_SEED
    with pytest.raises(ConfigError):
        RunConfig(command="mikhlin").with_env({SEED_ENV: "abc"})


@pytest.mark.parametrize("changes", [
    {"command": ""},
    {"lambdas": []},
    {"jobs": -1},
    {"trials": 0},
    {"oversampling": 0},
    {"base_seed": -5},
])
def test_validate_rejects(changes):
    config = dataclasses.replace(RunConfig(command="construct"), **changes)
    with pytest.raises(ConfigError):
        config.validate()


def test_to_dict_uses_flag_names():
    out = RunConfig(command="construct", lam=1.1).to_dict()
    assert out["lambda"] == 1.1
    assert out["seed"] == DEFAULT_SEED
    assert "lam" not in out and "extra" not in out
