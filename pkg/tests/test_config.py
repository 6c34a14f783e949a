"""Config defaults, the key = value file format, and dict round trips."""

import dataclasses

import pytest

from tcgat.config import (
    KEY_TABLE,
    ConfigError,
    TrainConfig,
    config_from_dict,
    load_config,
    parse_config_text,
)


class TestDefaults:
    def test_training_defaults(self):
        cfg = TrainConfig()
        assert cfg.max_len == 50
        assert cfg.batch_size == 24
        assert cfg.lr == pytest.approx(1e-3)
        assert cfg.embed_dim == 300
        assert cfg.hidden == 150
        assert cfg.epochs == 30
        assert cfg.patience == 5
        assert cfg.clip_norm == 0.0
        assert cfg.mask_mode == "renormalize"
        assert cfg.variant == "full"
        assert cfg.external_dim == 0

    def test_attention_defaults(self):
        cfg = TrainConfig()
        assert cfg.tgat_dim == cfg.cgat_dim == 100
        assert cfg.tgat_heads == cfg.cgat_heads == 3
        assert cfg.tgat_dropout == cfg.cgat_dropout == pytest.approx(0.15)
        assert cfg.tgat_slope == cfg.cgat_slope == pytest.approx(0.008)
        assert cfg.ctx_dropout == pytest.approx(0.1)
        assert cfg.fuse_dim == 300

    def test_defaults_validate(self):
        TrainConfig().validate()

    def test_model_config_mirrors_fields(self):
        cfg = TrainConfig(tgat_dim=7, cgat_heads=2, variant="no-context",
                          mask_mode="literal", external_dim=768)
        mc = cfg.model_config()
        assert mc.tgat_dim == 7
        assert mc.cgat_heads == 2
        assert mc.variant == "no-context"
        assert mc.mask_mode == "literal"
        assert mc.external_dim == 768


class TestParseConfigText:
    def test_assignments_and_comments(self):
        cfg = parse_config_text(
            "# training setup\n"
            "lr = 0.01\n"
            "\n"
            "epochs=5\n"
            "  variant =  tgat-only  \n")
        assert cfg.lr == pytest.approx(0.01)
        assert cfg.epochs == 5
        assert cfg.variant == "tgat-only"

    def test_dotted_keys(self):
        cfg = parse_config_text(
            "tgat.dim = 64\n"
            "tgat.heads = 2\n"
            "tgat.dropout = 0.2\n"
            "tgat.leaky_slope = 0.01\n"
            "cgat.dim = 32\n"
            "cgat.leaky_slope = 0.02\n"
            "fuse.dim = 128\n")
        assert cfg.tgat_dim == 64
        assert cfg.tgat_heads == 2
        assert cfg.tgat_dropout == pytest.approx(0.2)
        assert cfg.tgat_slope == pytest.approx(0.01)
        assert cfg.cgat_dim == 32
        assert cfg.cgat_slope == pytest.approx(0.02)
        assert cfg.fuse_dim == 128

    def test_mask_mode_alias(self):
        cfg = parse_config_text("tgat.mask_mode = literal\n")
        assert cfg.mask_mode == "literal"

    def test_unknown_key_with_line(self):
        with pytest.raises(ConfigError, match=r"<config>:3: unknown key 'lrr'"):
            parse_config_text("lr = 0.1\n\nlrr = 0.2\n")

    def test_missing_equals(self):
        with pytest.raises(ConfigError, match=r":1: expected key = value"):
            parse_config_text("just some words\n")

    def test_bad_value_with_line(self):
        with pytest.raises(ConfigError, match=r":2: bad value for epochs"):
            parse_config_text("lr = 0.1\nepochs = soon\n")

    def test_unknown_variant(self):
        with pytest.raises(ConfigError, match="variant"):
            parse_config_text("variant = everything\n")

    def test_negative_lr(self):
        with pytest.raises(ConfigError, match="lr"):
            parse_config_text("lr = -0.1\n")

    def test_negative_clip(self):
        with pytest.raises(ConfigError, match="clip_norm"):
            parse_config_text("clip_norm = -1\n")

    def test_nonpositive_dimension(self):
        with pytest.raises(ConfigError, match="fuse.dim"):
            parse_config_text("fuse.dim = 0\n")

    def test_bad_mask_mode(self):
        with pytest.raises(ValueError, match="mask mode"):
            parse_config_text("mask_mode = ignore\n")

    def test_bad_dropout(self):
        with pytest.raises(ValueError, match="dropout"):
            parse_config_text("ctx_dropout = 1.0\n")

    def test_empty_text_gives_defaults(self):
        assert parse_config_text("") == TrainConfig()


class TestKeyTable:
    def test_every_field_reachable(self):
        covered = {attr for attr, _ in KEY_TABLE.values()}
        all_fields = {f.name for f in dataclasses.fields(TrainConfig)}
        assert covered == all_fields

    def test_converters_are_callable(self):
        for attr, convert in KEY_TABLE.values():
            assert callable(convert), attr


class TestLoadConfig:
    def test_reads_file(self, tmp_path):
        path = tmp_path / "train.cfg"
        path.write_text("seed = 7\nbatch_size = 8\n", encoding="utf-8")
        cfg = load_config(path)
        assert cfg.seed == 7
        assert cfg.batch_size == 8

    def test_error_names_file(self, tmp_path):
        path = tmp_path / "broken.cfg"
        path.write_text("nope = 1\n", encoding="utf-8")
        with pytest.raises(ConfigError, match="broken.cfg:1"):
            load_config(path)


class TestDictRoundTrip:
    def test_to_dict_and_back(self):
        cfg = TrainConfig(seed=3, variant="cgat-only", tgat_dim=8,
                          lr=0.02, external_dim=0)
        assert config_from_dict(cfg.to_dict()) == cfg

    def test_unknown_field_rejected(self):
        payload = TrainConfig().to_dict()
        payload["mystery"] = 1
        with pytest.raises(ConfigError, match="mystery"):
            config_from_dict(payload)

    def test_partial_dict_fills_defaults(self):
        cfg = config_from_dict({"seed": 9})
        assert cfg.seed == 9
        assert cfg.batch_size == 24
