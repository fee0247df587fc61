from pathlib import Path

import pytest

from mds53 import config


def test_defaults(monkeypatch):
    monkeypatch.delenv("MDS53_DIR", raising=False)
    monkeypatch.delenv("MDS53_SYMBOL_SIZE", raising=False)
    monkeypatch.delenv("MDS53_REPORT_DIR", raising=False)
    assert config.default_cluster_dir() is None
    assert config.default_symbol_size() == 4096
    assert config.report_dir() == Path("reports")


def test_environment_overrides(monkeypatch, tmp_path):
    monkeypatch.setenv("MDS53_DIR", str(tmp_path))
    monkeypatch.setenv("MDS53_SYMBOL_SIZE", "512")
    assert config.default_cluster_dir() == tmp_path
    assert config.default_symbol_size() == 512


@pytest.mark.parametrize("raw", ["abc", "0", "-3"])
def test_bad_symbol_size(monkeypatch, raw):
    monkeypatch.setenv("MDS53_SYMBOL_SIZE", raw)
    with pytest.raises(ValueError):
        config.default_symbol_size()


def test_node_file_names():
    assert config.node_file_name(3) == "node3.seg"
