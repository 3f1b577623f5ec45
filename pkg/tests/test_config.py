"""Flat key=value run configuration: parsing, coercion, validation, mapping."""

import os

import pytest

from baitscreen.config import (
    ConfigError,
    PipelineConfig,
    load_config,
    parse_config_text,
    replace,
)


def test_parse_basic_lines():
    text = "\n".join([
        "# run settings",
        "",
        "select.k = 120",
        "paths.out=  artifacts  ",
        "groups = bert, sent",
    ])
    assert parse_config_text(text) == {
        "select.k": "120",
        "paths.out": "artifacts",
        "groups": "bert, sent",
    }


def test_parse_value_may_contain_equals():
    assert parse_config_text("paths.out = a=b") == {"paths.out": "a=b"}


@pytest.mark.parametrize("text, match", [
    ("select.k 120", r"<config>:1: expected 'key = value'"),
    ("ok = 1\n = 5", r":2: empty key"),
    ("seed = 1\nseed = 2", r":2: duplicate key 'seed'"),
])
def test_parse_errors(text, match):
    with pytest.raises(ConfigError, match=match):
        parse_config_text(text)


def test_defaults_validate():
    config = load_config(None)
    assert config.select_k == 825
    assert config.eval_folds == 10
    assert config.face_threshold == 0.6


def test_unknown_key_rejected():
    with pytest.raises(ConfigError, match="unknown config key 'selekt.k'"):
        load_config(None, {"selekt.k": "10"})


def test_integer_coercion_accepts_base_prefixes():
    config = load_config(None, {"select.k": "0x10", "seed": "0o17"})
    assert config.select_k == 16
    assert config.seed == 15


@pytest.mark.parametrize("key, raw, typename", [
    ("select.k", "3.5", "int"),
    ("select.k", "many", "int"),
    ("face.threshold", "high", "float"),
])
def test_bad_value_type(key, raw, typename):
    with pytest.raises(ConfigError, match=f"expects {typename}, got {raw!r}"):
        load_config(None, {key: raw})


def test_file_then_overrides_precedence(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text("select.k = 100\nseed = 4\n", encoding="utf-8")
    config = load_config(path, {"select.k": "5"})
    assert config.select_k == 5  # override wins
    assert config.seed == 4  # file value survives
    with pytest.raises(ConfigError, match="not found"):
        load_config(tmp_path / "missing.conf")


@pytest.mark.parametrize("key, raw, match", [
    ("face.threshold", "-1", "non-negative"),
    ("sentiment.alpha", "0", "positive"),
    ("eval.meta", "vote", "eval.meta must be one of"),
    ("seed", "-1", "64-bit unsigned"),
    ("eval.folds", "1", "at least 2"),
    ("eval.holdout", "1.0", r"\[0, 1\)"),
    ("eval.holdout", "-0.1", r"\[0, 1\)"),
    ("jobs", "-1", "non-negative"),
    ("model.meta.depth", "-1", "non-negative"),
    ("gcn.crossfit_parts", "-1", "non-negative"),
    ("select.k", "0", "at least 1"),
    ("model.gbt.rounds", "0", "model.gbt.rounds must be at least 1"),
    ("model.mlp.hidden", "0", "model.mlp.hidden must be at least 1"),
    ("eval.internal_folds", "0", "eval.internal_folds must be at least 1"),
])
def test_validation_bounds(key, raw, match):
    with pytest.raises(ConfigError, match=match):
        load_config(None, {key: raw})


def test_group_subset_parsing():
    assert PipelineConfig().group_subset() == ()
    assert PipelineConfig(groups=" bert, sent ").group_subset() == ("BERT", "SENT")
    assert PipelineConfig(groups="ctd,,").group_subset() == ("CTD",)


def test_resolved_jobs():
    assert PipelineConfig(jobs=3).resolved_jobs() == 3
    assert PipelineConfig(jobs=0).resolved_jobs() == (os.cpu_count() or 1)


def test_ensemble_config_mapping():
    config = load_config(None, {
        "eval.meta": "in_sample",
        "eval.internal_folds": "4",
        "select.k": "12",
        "model.gbt.depth": "5",
        "model.gbt.lambda": "2.5",
        "model.meta.depth": "0",
        "model.mlp.hidden": "7",
    })
    ens = config.ensemble_config()
    assert ens.meta_protocol == "in_sample"
    assert ens.internal_folds == 4
    assert ens.select_k == 12
    assert ens.gbt_max_depth == 5
    assert ens.gbt_reg_lambda == 2.5
    assert ens.meta_depth is None  # 0 means unlimited depth
    assert ens.mlp_hidden == 7


def test_eval_config_mapping():
    config = load_config(None, {
        "eval.folds": "4",
        "eval.holdout": "0.3",
        "jobs": "2",
        "gcn.hidden": "9",
        "gcn.epochs": "33",
        "gcn.crossfit_parts": "0",
    })
    ev = config.eval_config()
    assert ev.k == 4
    assert ev.holdout == 0.3
    assert ev.jobs == 2
    assert ev.gcn_hidden == 9
    assert ev.gcn_epochs == 33
    assert ev.gcn_crossfit_parts == 0
    assert ev.ensemble == config.ensemble_config()


def test_to_flat_round_trips():
    config = load_config(None, {
        "model.gbt.shrinkage": "0.25",
        "groups": "sent",
        "model.gnb.variance_floor": "1e-7",
        "seed": "42",
    })
    flat = config.to_flat()
    assert flat["model.gbt.shrinkage"] == 0.25
    assert flat["seed"] == 42
    rebuilt = load_config(None, {k: str(v) for k, v in flat.items()})
    assert rebuilt == config


def test_replace_returns_new_config():
    config = PipelineConfig()
    other = replace(config, seed=9)
    assert other.seed == 9
    assert config.seed == 0
    assert other != config
