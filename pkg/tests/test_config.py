from pathlib import Path

import pytest

from glrank.core.config import CACHE_ENV, Caps, RunConfig, resolve_cache_dir
from glrank.errors import InvalidInputError


def test_caps_defaults_and_overrides():
    """Test cap defaults and overrides."""
    caps = Caps()
    assert caps.group_order == 200000
    assert caps.field_order == 64
    tighter = caps.with_overrides({"group_order": 1000, "irreps": None})
    assert tighter.group_order == 1000
    assert tighter.irreps == caps.irreps
    with pytest.raises(InvalidInputError, match="Unknown caps: bogus"):
        caps.with_overrides({"bogus": 1})
    with pytest.raises(InvalidInputError, match="positive integer"):
        Caps(class_count=0)


def test_resolve_cache_dir(monkeypatch, tmp_path):
    """Test flag, environment and default cache locations."""
    monkeypatch.setenv(CACHE_ENV, str(tmp_path / "env"))
    assert resolve_cache_dir(str(tmp_path / "flag")) == tmp_path / "flag"
    assert resolve_cache_dir() == tmp_path / "env"
    monkeypatch.delenv(CACHE_ENV)
    assert resolve_cache_dir() == Path.home() / ".cache" / "glrank"


def test_run_config_validation(tmp_path):
    """Test rejected run settings."""
    with pytest.raises(InvalidInputError, match="prime power"):
        RunConfig("dims", q=6).validate()
    with pytest.raises(InvalidInputError, match="Unknown format"):
        RunConfig("dims", format="xml").validate()
    with pytest.raises(InvalidInputError, match="trials must be positive"):
        RunConfig("walk", trials=0).validate()
    with pytest.raises(InvalidInputError, match="not writable"):
        RunConfig("dims", output=tmp_path / "missing" / "out.json").validate()


def test_run_config_fills_cache_dir(monkeypatch, tmp_path):
    """Test that validation resolves the cache directory."""
    monkeypatch.setenv(CACHE_ENV, str(tmp_path))
    config = RunConfig("sps", q=9).validate()
    assert config.cache_dir == tmp_path
    assert (config.p, config.m) == (3, 2)
    assert RunConfig("sps", use_cache=False).validate().cache_dir is None
