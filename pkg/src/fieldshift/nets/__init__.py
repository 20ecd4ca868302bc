"""Network architectures and the (id, config) registry used by checkpoints/CLI."""

from __future__ import annotations

from dataclasses import asdict

from .common import count_parameters, init_weights, seeded
from .espcn import ESPCN, ESPCNConfig, depth_to_space, space_to_depth
from .srgan import SRGANConfig, SRGANDiscriminator, SRGANGenerator
from .uconvert import UConvertNet, UConvertNetConfig

ARCHITECTURES = ("uconvert", "srgan", "espcn")

_CONFIG_TYPES = {
    "uconvert": UConvertNetConfig,
    "srgan": SRGANConfig,
    "espcn": ESPCNConfig,
}


def config_type(architecture: str):
    try:
        return _CONFIG_TYPES[architecture]
    except KeyError:
        raise ValueError(
            f"unknown architecture {architecture!r}; expected one of {ARCHITECTURES}"
        ) from None


def config_from_dict(architecture: str, values: dict | None):
    cls = config_type(architecture)
    values = dict(values or {})
    if architecture == "espcn" and "feature_channels" in values:
        values["feature_channels"] = tuple(values["feature_channels"])
    cfg = cls(**values)
    cfg.validate()
    return cfg


def config_to_dict(config) -> dict:
    return asdict(config)


def build_uconvertnet(config: UConvertNetConfig = UConvertNetConfig(), seed: int = 0) -> UConvertNet:
    """Seeded encoder/decoder regression network."""
    return seeded(UConvertNet(config), seed)


def build_espcn(config: ESPCNConfig = ESPCNConfig(), seed: int = 0) -> ESPCN:
    """Seeded equal-size sub-pixel network."""
    return seeded(ESPCN(config), seed)


def build_srgan(config: SRGANConfig = SRGANConfig(), seed: int = 0):
    """Seeded (generator, discriminator) pair."""
    return seeded(SRGANGenerator(config), seed), seeded(SRGANDiscriminator(config), seed + 1)


def build_model(architecture: str, config=None, seed: int = 0):
    """Build by architecture id; returns a module, or a pair for ``srgan``."""
    if architecture == "uconvert":
        return build_uconvertnet(config or UConvertNetConfig(), seed)
    if architecture == "espcn":
        return build_espcn(config or ESPCNConfig(), seed)
    if architecture == "srgan":
        return build_srgan(config or SRGANConfig(), seed)
    raise ValueError(
        f"unknown architecture {architecture!r}; expected one of {ARCHITECTURES}"
    )


__all__ = [
    "ARCHITECTURES",
    "ESPCN",
    "ESPCNConfig",
    "SRGANConfig",
    "SRGANDiscriminator",
    "SRGANGenerator",
    "UConvertNet",
    "UConvertNetConfig",
    "build_espcn",
    "build_model",
    "build_srgan",
    "build_uconvertnet",
    "config_from_dict",
    "config_to_dict",
    "config_type",
    "count_parameters",
    "depth_to_space",
    "init_weights",
    "seeded",
    "space_to_depth",
]
