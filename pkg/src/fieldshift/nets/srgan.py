"""Size-preserving adversarial pair: residual generator and CNN discriminator.

The generator is a deep residual network (batch-normed 3x3 residual blocks
between 9x9 head/tail convolutions, with a global skip) with every upscaling
stage removed so output size equals input size. The discriminator is a
classification CNN (3x3 convolutions with strides alternating 1 and 2,
LeakyReLU 0.2, batch norm everywhere but the first layer) ending in a
1024-wide dense layer and a sigmoid real-probability head; spatial features
are globally average-pooled so any valid slice size is accepted.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
import torch.nn as nn
import torch.nn.functional as F

from .common import check_batch


@dataclass(frozen=True)
class SRGANConfig:
    residual_blocks: int = 8
    gen_channels: int = 64
    disc_base_channels: int = 64
    adversarial_weight: float = 1e-3

    def validate(self):
        if self.residual_blocks < 1:
            raise ValueError(f"residual_blocks must be >= 1, got {self.residual_blocks}")
        if self.gen_channels < 1:
            raise ValueError(f"gen_channels must be >= 1, got {self.gen_channels}")
        if self.disc_base_channels < 1:
            raise ValueError(
                f"disc_base_channels must be >= 1, got {self.disc_base_channels}"
            )
        if self.adversarial_weight < 0:
            raise ValueError(
                f"adversarial_weight must be >= 0, got {self.adversarial_weight}"
            )


class ResidualBlock(nn.Module):
    def __init__(self, channels):
        super().__init__()
        self.conv1 = nn.Conv2d(channels, channels, 3, padding=1)
        self.bn1 = nn.BatchNorm2d(channels)
        self.prelu = nn.PReLU()
        self.conv2 = nn.Conv2d(channels, channels, 3, padding=1)
        self.bn2 = nn.BatchNorm2d(channels)

    def forward(self, x):
        return x + self.bn2(self.conv2(self.prelu(self.bn1(self.conv1(x)))))


class SRGANGenerator(nn.Module):
    def __init__(self, config: SRGANConfig = SRGANConfig()):
        super().__init__()
        config.validate()
        self.config = config
        ch = config.gen_channels
        self.head = nn.Conv2d(1, ch, 9, padding=4)
        self.prelu = nn.PReLU()
        self.blocks = nn.Sequential(*(ResidualBlock(ch) for _ in range(config.residual_blocks)))
        self.post = nn.Conv2d(ch, ch, 3, padding=1)
        self.post_bn = nn.BatchNorm2d(ch)
        self.tail = nn.Conv2d(ch, 1, 9, padding=4)

    def forward(self, x):
        check_batch(x)
        h = self.prelu(self.head(x))
        return self.tail(h + self.post_bn(self.post(self.blocks(h))))


class SRGANDiscriminator(nn.Module):
    def __init__(self, config: SRGANConfig = SRGANConfig()):
        super().__init__()
        config.validate()
        self.config = config
        b = config.disc_base_channels
        channels = [1, b, b, 2 * b, 2 * b, 4 * b, 4 * b, 8 * b, 8 * b]
        layers = []
        for i in range(8):
            layers.append(
                nn.Conv2d(channels[i], channels[i + 1], 3,
                          stride=1 if i % 2 == 0 else 2, padding=1)
            )
            if i > 0:
                layers.append(nn.BatchNorm2d(channels[i + 1]))
            layers.append(nn.LeakyReLU(0.2))
        self.features = nn.Sequential(*layers)
        self.fc1 = nn.Linear(8 * b, 1024)
        self.fc2 = nn.Linear(1024, 1)

    def forward(self, x):
        """Per-slice real-probability in (0, 1), shape [N]."""
        check_batch(x)
        h = self.features(x)
        h = F.adaptive_avg_pool2d(h, 1).flatten(1)
        h = F.leaky_relu(self.fc1(h), 0.2)
        return torch.sigmoid(self.fc2(h)).squeeze(1)
