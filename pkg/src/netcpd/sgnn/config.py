"""Architecture and training hyperparameters of the siamese graph model,
plus the stock hyperparameter grids."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

from ..errors import ConfigurationError
from ..graph import EncodingKind

POOLING_VARIANTS = ("sortk", "max", "average")

# Grid searched for the synthetic scenarios.
SYNTHETIC_GRID: dict[str, list] = {
    "learning_rate": [1e-3, 1e-2],
    "dropout": [0.01, 0.05, 0.1],
    "sortk": [20, 40, 100],
    "hidden_units": [16, 32, 64],
}

# Grid searched for ingested correlation networks.
CORRELATION_GRID: dict[str, list] = {
    "learning_rate": [1e-5, 1e-4, 1e-3, 1e-2],
    "weight_decay": [1e-6, 1e-5],
    "dropout": [0.05, 0.2, 0.4],
    "sortk": [50, 100, 200],
    "hidden_units": [32, 64, 128],
}

GRID_PRESETS = {
    "default-synthetic": SYNTHETIC_GRID,
    "default-correlation": CORRELATION_GRID,
}


@dataclass(frozen=True)
class SgnnConfig:
    encoding: EncodingKind = field(default_factory=EncodingKind.degree)
    gcn_layers: int = 2
    hidden_units: int = 32
    sortk: int = 20
    fc_units: tuple[int, int] | None = None  # None -> (hidden_units, hidden_units)
    dropout: float = 0.05
    pooling_variant: str = "sortk"
    learning_rate: float = 1e-3
    weight_decay: float = 0.0
    epochs: int = 100
    batch_size: int = 32

    def __post_init__(self):
        if self.gcn_layers < 1 or self.hidden_units < 1 or self.sortk < 1:
            raise ConfigurationError("layer counts and widths must be >= 1")
        if not 0.0 <= self.dropout < 1.0:
            raise ConfigurationError("dropout must lie in [0, 1)")
        if self.pooling_variant not in POOLING_VARIANTS:
            raise ConfigurationError(f"unknown pooling variant {self.pooling_variant!r}")
        if self.learning_rate <= 0 or self.weight_decay < 0:
            raise ConfigurationError("learning_rate must be > 0, weight_decay >= 0")
        if self.epochs < 0 or self.batch_size < 1:
            raise ConfigurationError("epochs must be >= 0, batch_size >= 1")
        if self.fc_units is not None and (len(self.fc_units) != 2 or min(self.fc_units) < 1):
            raise ConfigurationError("fc_units must be two positive counts")

    @property
    def fc_dims(self) -> tuple[int, int]:
        return self.fc_units if self.fc_units is not None else (self.hidden_units, self.hidden_units)

    @property
    def pool_dim(self) -> int:
        """Width of the pooled vector feeding the first FC layer."""
        return self.sortk if self.pooling_variant == "sortk" else 1

    def to_dict(self) -> dict:
        return {
            "encoding": {"kind": self.encoding.kind, "k": self.encoding.k},
            "gcn_layers": self.gcn_layers,
            "hidden_units": self.hidden_units,
            "sortk": self.sortk,
            "fc_units": list(self.fc_units) if self.fc_units is not None else None,
            "dropout": self.dropout,
            "pooling_variant": self.pooling_variant,
            "learning_rate": self.learning_rate,
            "weight_decay": self.weight_decay,
            "epochs": self.epochs,
            "batch_size": self.batch_size,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "SgnnConfig":
        enc = d.get("encoding", {"kind": "degree", "k": 1})
        fc = d.get("fc_units")
        return cls(
            encoding=EncodingKind(enc["kind"], enc.get("k", 1)),
            gcn_layers=d.get("gcn_layers", 2),
            hidden_units=d.get("hidden_units", 32),
            sortk=d.get("sortk", 20),
            fc_units=tuple(fc) if fc is not None else None,
            dropout=d.get("dropout", 0.05),
            pooling_variant=d.get("pooling_variant", "sortk"),
            learning_rate=d.get("learning_rate", 1e-3),
            weight_decay=d.get("weight_decay", 0.0),
            epochs=d.get("epochs", 100),
            batch_size=d.get("batch_size", 32),
        )


def grid_configs(grids: Mapping[str, Sequence], base: SgnnConfig) -> list[SgnnConfig]:
    """Exhaustive product over the grid, enumerated deterministically: keys
    in sorted order, values in their given order (lexicographically first
    config comes first)."""
    if not grids:
        raise ConfigurationError("empty hyperparameter grid")
    keys = sorted(grids)
    configs = [base]
    for key in keys:
        configs = [replace(c, **{key: value}) for c in configs for value in grids[key]]
    return configs
