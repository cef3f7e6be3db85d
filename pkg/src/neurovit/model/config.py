"""Architecture hyperparameters for the volumetric vision transformer."""

from __future__ import annotations

from dataclasses import dataclass, asdict

from ..errors import ConfigError


@dataclass(frozen=True)
class ModelConfig:
    """Shape of one 3D-patch ViT.

    ``input_dim`` is the cubic volume side in voxels and must be divisible
    by ``patch_size``; ``hidden_dim`` must be divisible by ``n_heads``.
    """

    input_dim: int
    patch_size: int
    hidden_dim: int
    n_layers: int
    n_heads: int
    mlp_ratio: float = 4.0
    dropout_rate: float = 0.0
    n_classes: int = 2

    def __post_init__(self):
        if self.input_dim < 1 or self.patch_size < 1:
            raise ConfigError("input_dim and patch_size must be positive")
        if self.input_dim % self.patch_size != 0:
            raise ConfigError(
                f"input_dim {self.input_dim} not divisible by "
                f"patch_size {self.patch_size}"
            )
        if self.hidden_dim < 1 or self.n_heads < 1:
            raise ConfigError("hidden_dim and n_heads must be positive")
        if self.hidden_dim % self.n_heads != 0:
            raise ConfigError(
                f"hidden_dim {self.hidden_dim} not divisible by "
                f"n_heads {self.n_heads}"
            )
        if self.n_layers < 1:
            raise ConfigError("n_layers must be >= 1")
        if self.mlp_ratio <= 0:
            raise ConfigError("mlp_ratio must be > 0")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ConfigError("dropout_rate must be in [0, 1)")
        if self.n_classes < 1:
            raise ConfigError("n_classes must be >= 1")

    @property
    def grid(self) -> int:
        """Patches per axis."""
        return self.input_dim // self.patch_size

    @property
    def n_patches(self) -> int:
        return self.grid ** 3

    @property
    def seq_len(self) -> int:
        """Patch tokens plus the class token."""
        return self.n_patches + 1

    @property
    def head_dim(self) -> int:
        return self.hidden_dim // self.n_heads

    @property
    def mlp_hidden(self) -> int:
        return int(round(self.mlp_ratio * self.hidden_dim))

    def to_dict(self) -> dict:
        return asdict(self)

    @staticmethod
    def from_dict(d: dict) -> "ModelConfig":
        return ModelConfig(**d)


def vit_b16_3d(n_classes: int = 2) -> ModelConfig:
    """ViT-B/16 adapted to cubic 3D patches on 80-voxel volumes."""
    return ModelConfig(
        input_dim=80,
        patch_size=16,
        hidden_dim=768,
        n_layers=12,
        n_heads=12,
        mlp_ratio=4.0,
        dropout_rate=0.1,
        n_classes=n_classes,
    )


def nit(n_classes: int = 2, n_layers: int = 6, n_heads: int = 8) -> ModelConfig:
    """The scaled-down neuroimaging transformer.

    Defaults to 6 encoder layers.  Head count must divide the hidden
    dimension (256), so the valid choices in the 2..12 range are 2, 4,
    and 8; the default is 8, the largest valid count.
    """
    return ModelConfig(
        input_dim=80,
        patch_size=8,
        hidden_dim=256,
        n_layers=n_layers,
        n_heads=n_heads,
        mlp_ratio=4.0,
        dropout_rate=0.3,
        n_classes=n_classes,
    )


PRESETS = {
    "vit-b16-3d": vit_b16_3d,
    "nit": nit,
}
