"""Training configuration and the flat ``key = value`` config file format.

Files hold one assignment per line; blank lines and ``#`` comment lines are
skipped.  Every key is checked against the table below, so typos fail fast
with a line number instead of silently training the wrong model.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

from .model import ModelConfig, VARIANTS


class ConfigError(ValueError):
    """Unknown key, bad value, or unparseable config line."""


@dataclass
class TrainConfig:
    max_len: int = 50
    batch_size: int = 24
    lr: float = 1e-3
    embed_dim: int = 300
    hidden: int = 150
    epochs: int = 30
    seed: int = 0
    mask_mode: str = "renormalize"
    variant: str = "full"
    patience: int = 5
    clip_norm: float = 0.0
    ctx_dropout: float = 0.1
    tgat_dim: int = 100
    tgat_heads: int = 3
    tgat_dropout: float = 0.15
    tgat_slope: float = 0.008
    cgat_dim: int = 100
    cgat_heads: int = 3
    cgat_dropout: float = 0.15
    cgat_slope: float = 0.008
    fuse_dim: int = 300
    external_dim: int = 0

    def validate(self):
        if self.variant not in VARIANTS:
            raise ConfigError(f"unknown variant {self.variant!r}; "
                              f"choose from {', '.join(VARIANTS)}")
        counts = {"max_len": self.max_len, "batch_size": self.batch_size,
                  "embed_dim": self.embed_dim, "hidden": self.hidden,
                  "epochs": self.epochs, "patience": self.patience,
                  "tgat.dim": self.tgat_dim, "tgat.heads": self.tgat_heads,
                  "cgat.dim": self.cgat_dim, "cgat.heads": self.cgat_heads,
                  "fuse.dim": self.fuse_dim}
        for key, value in counts.items():
            if value < 1:
                raise ConfigError(f"{key} must be positive, got {value}")
        if self.lr < 0:
            raise ConfigError("lr must be non-negative")
        if self.clip_norm < 0:
            raise ConfigError("clip_norm must be 0 (off) or positive")
        self.model_config().validate()

    def model_config(self):
        return ModelConfig(embed_dim=self.embed_dim, hidden=self.hidden,
                           tgat_dim=self.tgat_dim, tgat_heads=self.tgat_heads,
                           tgat_dropout=self.tgat_dropout,
                           tgat_slope=self.tgat_slope,
                           cgat_dim=self.cgat_dim, cgat_heads=self.cgat_heads,
                           cgat_dropout=self.cgat_dropout,
                           cgat_slope=self.cgat_slope,
                           fuse_dim=self.fuse_dim,
                           ctx_dropout=self.ctx_dropout,
                           mask_mode=self.mask_mode, variant=self.variant,
                           external_dim=self.external_dim)

    def to_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


# config-file key -> (TrainConfig attribute, converter)
KEY_TABLE = {
    "max_len": ("max_len", int),
    "batch_size": ("batch_size", int),
    "lr": ("lr", float),
    "embed_dim": ("embed_dim", int),
    "hidden": ("hidden", int),
    "epochs": ("epochs", int),
    "seed": ("seed", int),
    "mask_mode": ("mask_mode", str),
    "variant": ("variant", str),
    "patience": ("patience", int),
    "clip_norm": ("clip_norm", float),
    "ctx_dropout": ("ctx_dropout", float),
    "external_dim": ("external_dim", int),
    "tgat.dim": ("tgat_dim", int),
    "tgat.heads": ("tgat_heads", int),
    "tgat.dropout": ("tgat_dropout", float),
    "tgat.leaky_slope": ("tgat_slope", float),
    "tgat.mask_mode": ("mask_mode", str),
    "cgat.dim": ("cgat_dim", int),
    "cgat.heads": ("cgat_heads", int),
    "cgat.dropout": ("cgat_dropout", float),
    "cgat.leaky_slope": ("cgat_slope", float),
    "fuse.dim": ("fuse_dim", int),
}


def parse_config_text(text, source="<config>"):
    """Parse config text into a validated TrainConfig."""
    cfg = TrainConfig()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{line_no}: expected key = value")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in KEY_TABLE:
            raise ConfigError(f"{source}:{line_no}: unknown key {key!r}")
        attr, convert = KEY_TABLE[key]
        try:
            setattr(cfg, attr, convert(value))
        except ValueError as exc:
            raise ConfigError(
                f"{source}:{line_no}: bad value for {key}: {value!r}") from exc
    cfg.validate()
    return cfg


def load_config(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read(), source=str(path))


def config_from_dict(payload):
    """Rebuild a TrainConfig from a checkpoint metadata dictionary."""
    cfg = TrainConfig()
    known = {f.name for f in fields(TrainConfig)}
    for key, value in payload.items():
        if key not in known:
            raise ConfigError(f"unknown config field {key!r} in metadata")
        setattr(cfg, key, value)
    cfg.validate()
    return cfg
