"""Shared network utilities: seeded initialization and parameter counting."""

from __future__ import annotations

import torch
import torch.nn as nn


def count_parameters(model: nn.Module) -> int:
    """Total learnable scalar count, including biases and batch-norm affines."""
    return sum(p.numel() for p in model.parameters())


def init_weights(module: nn.Module) -> None:
    """Kaiming fan-in init for conv/linear weights, zeros for biases.

    Batch-norm scales/shifts reset to ones/zeros. Apply with ``model.apply``
    after seeding torch's RNG so all draws are reproducible.
    """
    if isinstance(module, (nn.Conv2d, nn.ConvTranspose2d, nn.Linear)):
        nn.init.kaiming_normal_(module.weight, mode="fan_in", nonlinearity="relu")
        if module.bias is not None:
            nn.init.zeros_(module.bias)
    elif isinstance(module, nn.BatchNorm2d):
        nn.init.ones_(module.weight)
        nn.init.zeros_(module.bias)


def seeded(net: nn.Module, seed: int) -> nn.Module:
    """Re-initialize a freshly built network under a fixed seed."""
    torch.manual_seed(seed)
    net.apply(init_weights)
    return net


def check_batch(x: torch.Tensor) -> None:
    if x.dim() != 4 or x.shape[1] != 1:
        raise ValueError(
            f"expected a batch shaped [N, 1, H, W], got {tuple(x.shape)}"
        )


def check_divisible(x: torch.Tensor, divisor: int) -> None:
    """Raise naming the offending spatial dimension if not divisible."""
    h, w = int(x.shape[-2]), int(x.shape[-1])
    if h % divisor != 0:
        raise ValueError(f"height {h} not divisible by {divisor}")
    if w % divisor != 0:
        raise ValueError(f"width {w} not divisible by {divisor}")
