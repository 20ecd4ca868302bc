"""Equal-size encoder/decoder regression network with skip concatenations.

One padded 3x3 convolution per resolution level (encoder and decoder), 2x2
max-pooling, 2x2 stride-2 transposed convolutions, dropout on the deepest
decoder upsampling outputs, and a single-filter linear head. Input and output
spatial shapes are identical; spatial dims must divide by 2**levels.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
import torch.nn as nn
import torch.nn.functional as F

from .common import check_batch, check_divisible

KERNEL_SIZE = 3


@dataclass(frozen=True)
class UConvertNetConfig:
    levels: int = 4
    base_channels: int = 32
    dropout_rate: float = 0.5
    dropout_decoder_levels: int = 2

    def validate(self):
        if self.levels < 1:
            raise ValueError(f"levels must be >= 1, got {self.levels}")
        if self.base_channels < 1:
            raise ValueError(f"base_channels must be >= 1, got {self.base_channels}")
        if not (0.0 <= self.dropout_rate < 1.0):
            raise ValueError(f"dropout_rate must be in [0, 1), got {self.dropout_rate}")
        if self.dropout_decoder_levels < 0:
            raise ValueError(
                f"dropout_decoder_levels must be >= 0, got {self.dropout_decoder_levels}"
            )


class UConvertNet(nn.Module):
    def __init__(self, config: UConvertNetConfig = UConvertNetConfig()):
        super().__init__()
        config.validate()
        self.config = config
        base, levels = config.base_channels, config.levels
        enc_channels = [1] + [base * 2 ** i for i in range(levels)]
        self.encoders = nn.ModuleList(
            nn.Conv2d(enc_channels[i], enc_channels[i + 1], KERNEL_SIZE, padding=1)
            for i in range(levels)
        )
        self.bottleneck = nn.Conv2d(
            enc_channels[-1], base * 2 ** levels, KERNEL_SIZE, padding=1
        )
        # decoder runs deepest level first
        self.upsamplers = nn.ModuleList(
            nn.ConvTranspose2d(base * 2 ** (i + 1), base * 2 ** i, 2, stride=2)
            for i in reversed(range(levels))
        )
        self.decoders = nn.ModuleList(
            nn.Conv2d(base * 2 ** (i + 1), base * 2 ** i, KERNEL_SIZE, padding=1)
            for i in reversed(range(levels))
        )
        self.dropout = nn.Dropout(config.dropout_rate)
        self.n_dropout = min(config.dropout_decoder_levels, levels)
        self.head = nn.Conv2d(base, 1, KERNEL_SIZE, padding=1)

    def forward(self, x):
        check_batch(x)
        check_divisible(x, 2 ** self.config.levels)
        skips = []
        for enc in self.encoders:
            x = F.relu(enc(x))
            skips.append(x)
            x = F.max_pool2d(x, 2)
        x = F.relu(self.bottleneck(x))
        for i, (up, dec) in enumerate(zip(self.upsamplers, self.decoders)):
            x = up(x)
            if i < self.n_dropout:
                x = self.dropout(x)
            x = F.relu(dec(torch.cat([x, skips[-1 - i]], dim=1)))
        return self.head(x)
