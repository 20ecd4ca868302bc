"""Equal-size sub-pixel convolution network.

The classic sub-pixel design enlarges its input r-fold; here the input is
first rearranged space-to-depth by the same factor so the final sub-pixel
(depth-to-space) layer lands back on the original size. With r=1 both
rearrangements are identities and the network reduces to a plain conv stack.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
import torch.nn.functional as F
from torch import nn

from .common import check_batch, check_divisible


def space_to_depth(x: torch.Tensor, r: int) -> torch.Tensor:
    """Rearrange [N, C, H, W] -> [N, C*r*r, H/r, W/r]; exact inverse of
    :func:`depth_to_space`."""
    if r == 1:
        return x
    return F.pixel_unshuffle(x, r)


def depth_to_space(x: torch.Tensor, r: int) -> torch.Tensor:
    """Rearrange [N, C*r*r, H, W] -> [N, C, H*r, W*r]."""
    if r == 1:
        return x
    return F.pixel_shuffle(x, r)


@dataclass(frozen=True)
class ESPCNConfig:
    shuffle_factor: int = 2
    feature_channels: tuple = (64, 32)

    def validate(self):
        if self.shuffle_factor < 1:
            raise ValueError(f"shuffle_factor must be >= 1, got {self.shuffle_factor}")
        if len(self.feature_channels) != 2 or any(c < 1 for c in self.feature_channels):
            raise ValueError(
                f"feature_channels must be two positive ints, got {self.feature_channels}"
            )


class ESPCN(nn.Module):
    def __init__(self, config: ESPCNConfig = ESPCNConfig()):
        super().__init__()
        config.validate()
        self.config = config
        r = config.shuffle_factor
        f0, f1 = config.feature_channels
        self.conv1 = nn.Conv2d(r * r, f0, 5, padding=2)
        self.conv2 = nn.Conv2d(f0, f1, 3, padding=1)
        self.conv3 = nn.Conv2d(f1, r * r, 3, padding=1)

    def forward(self, x):
        check_batch(x)
        r = self.config.shuffle_factor
        check_divisible(x, r)
        h = space_to_depth(x, r)
        h = F.relu(self.conv1(h))
        h = F.relu(self.conv2(h))
        h = self.conv3(h)
        return depth_to_space(h, r)
