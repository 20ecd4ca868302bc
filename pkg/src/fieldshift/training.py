"""Training loops (MSE regression and adversarial) and slice-wise conversion.

Both loops draw every slice of every training volume along the configured
view once per epoch, in an order shuffled by a dedicated numpy generator
seeded from the run seed; torch's global RNG is seeded too so dropout draws
are reproducible. Optimization uses Adam at the configured learning rate with
default moment-decay constants for all models.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np
import torch
import torch.nn.functional as F

from .volumes import Axis, Slice2D, Volume, extract_slices, stack_slices

PROB_EPS = 1e-7  # discriminator probability clamp keeping log terms finite
_SHUFFLE_STREAM = 1


@dataclass(frozen=True)
class TrainConfig:
    architecture: str = "uconvert"
    view: Axis = Axis.SAGITTAL
    learning_rate: float = 1e-3
    batch_size: int = 4
    epochs: int = 40
    seed: int = 0
    adversarial_weight: float = 1e-3  # used by the adversarial loop only

    def validate(self):
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.adversarial_weight < 0:
            raise ValueError(
                f"adversarial_weight must be >= 0, got {self.adversarial_weight}"
            )

    def metadata(self) -> dict:
        d = asdict(self)
        d["view"] = Axis.coerce(self.view).name.lower()
        return d


@dataclass
class EpochRecord:
    epoch: int
    loss: float
    seconds: float
    disc_loss: float | None = None
    adv_loss: float | None = None

    def to_dict(self) -> dict:
        d = {"epoch": self.epoch, "loss": self.loss, "seconds": self.seconds}
        if self.disc_loss is not None:
            d["disc_loss"] = self.disc_loss
        if self.adv_loss is not None:
            d["adv_loss"] = self.adv_loss
        return d


@dataclass
class TrainHistory:
    """Run metadata plus one record per completed epoch."""

    metadata: dict = field(default_factory=dict)
    records: list = field(default_factory=list)

    @property
    def epochs_completed(self) -> int:
        return len(self.records)

    def to_dict(self) -> dict:
        return {"metadata": self.metadata, "records": [r.to_dict() for r in self.records]}

    @classmethod
    def from_dict(cls, d: dict) -> "TrainHistory":
        records = [EpochRecord(**r) for r in d.get("records", [])]
        return cls(metadata=dict(d.get("metadata", {})), records=records)

    def write_jsonl(self, path) -> None:
        """JSON lines: a leading metadata line, then one line per epoch."""
        with open(path, "w", encoding="utf-8") as f:
            f.write(json.dumps({"type": "metadata", **self.metadata}) + "\n")
            for r in self.records:
                f.write(json.dumps({"type": "epoch", **r.to_dict()}) + "\n")


def slices_to_tensor(pairs, view) -> tuple:
    """Stack every (source, target) slice along ``view`` into [N,1,H,W] tensors."""
    view = Axis.coerce(view)
    if not pairs:
        raise ValueError("empty dataset: no training pairs")
    shape = pairs[0].source.shape
    for p in pairs:
        if p.source.shape != shape:
            raise ValueError(
                f"training pairs must share shape, got {shape} and {p.source.shape}"
            )
    src = np.stack(
        [s.data for p in pairs for s in extract_slices(p.source, view)]
    )[:, None, :, :]
    tgt = np.stack(
        [s.data for p in pairs for s in extract_slices(p.target, view)]
    )[:, None, :, :]
    return torch.from_numpy(src), torch.from_numpy(tgt)


def _check_finite(value: float, what: str, epoch: int, batch: int):
    if not math.isfinite(value):
        raise RuntimeError(f"non-finite {what} at epoch {epoch}, batch {batch}")


def _epoch_batches(rng, n, batch_size):
    perm = rng.permutation(n)
    for start in range(0, n, batch_size):
        yield perm[start : start + batch_size]


def train_mse(model, pairs, config: TrainConfig) -> tuple:
    """Optimize pixel mean-squared error over per-view slices.

    Returns ``(model, history)``; the model is trained in place. Deterministic
    given (initial model state, data, config) under single-stream execution.
    """
    config.validate()
    src, tgt = slices_to_tensor(pairs, config.view)
    n = src.shape[0]
    torch.manual_seed(config.seed)
    shuffle_rng = np.random.default_rng(
        np.random.SeedSequence([config.seed, _SHUFFLE_STREAM])
    )
    optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate)
    history = TrainHistory(metadata={**config.metadata(), "loss": "mse"})
    model.train()
    for epoch in range(config.epochs):
        t0 = time.perf_counter()
        total = 0.0
        for b, idx in enumerate(_epoch_batches(shuffle_rng, n, config.batch_size)):
            batch_idx = torch.from_numpy(idx)
            optimizer.zero_grad()
            loss = F.mse_loss(model(src[batch_idx]), tgt[batch_idx])
            value = loss.item()
            _check_finite(value, "loss", epoch, b)
            loss.backward()
            optimizer.step()
            total += value * len(idx)
        history.records.append(
            EpochRecord(epoch=epoch, loss=total / n, seconds=time.perf_counter() - t0)
        )
    return model, history


def train_gan(generator, discriminator, pairs, config: TrainConfig) -> tuple:
    """Alternating adversarial training with a pixel-MSE content loss.

    Per batch: one discriminator step (binary cross-entropy separating real
    target slices, label 1, from generated slices, label 0) then one generator
    step minimizing ``content_mse + adversarial_weight * (-log D(G(x)))``.
    Discriminator probabilities are clamped to [1e-7, 1 - 1e-7] so every
    recorded loss is finite. With adversarial_weight=0 the generator updates
    are exactly those of :func:`train_mse` under the same seed.
    """
    config.validate()
    src, tgt = slices_to_tensor(pairs, config.view)
    n = src.shape[0]
    torch.manual_seed(config.seed)
    shuffle_rng = np.random.default_rng(
        np.random.SeedSequence([config.seed, _SHUFFLE_STREAM])
    )
    w = config.adversarial_weight
    opt_g = torch.optim.Adam(generator.parameters(), lr=config.learning_rate)
    opt_d = torch.optim.Adam(discriminator.parameters(), lr=config.learning_rate)
    history = TrainHistory(
        metadata={**config.metadata(), "loss": "adversarial+mse"}
    )
    generator.train()
    discriminator.train()
    for epoch in range(config.epochs):
        t0 = time.perf_counter()
        g_total = d_total = adv_total = 0.0
        for b, idx in enumerate(_epoch_batches(shuffle_rng, n, config.batch_size)):
            batch_idx = torch.from_numpy(idx)
            xb, yb = src[batch_idx], tgt[batch_idx]

            opt_d.zero_grad()
            fake = generator(xb).detach()
            d_real = discriminator(yb).clamp(PROB_EPS, 1.0 - PROB_EPS)
            d_fake = discriminator(fake).clamp(PROB_EPS, 1.0 - PROB_EPS)
            d_loss = -(torch.log(d_real).mean() + torch.log(1.0 - d_fake).mean())
            _check_finite(d_loss.item(), "discriminator loss", epoch, b)
            d_loss.backward()
            opt_d.step()

            opt_g.zero_grad()
            out = generator(xb)
            content = F.mse_loss(out, yb)
            adv = -torch.log(
                discriminator(out).clamp(PROB_EPS, 1.0 - PROB_EPS)
            ).mean()
            g_loss = content + w * adv
            _check_finite(g_loss.item(), "generator loss", epoch, b)
            g_loss.backward()
            opt_g.step()

            g_total += g_loss.item() * len(idx)
            d_total += d_loss.item() * len(idx)
            adv_total += adv.item() * len(idx)
        history.records.append(
            EpochRecord(
                epoch=epoch,
                loss=g_total / n,
                seconds=time.perf_counter() - t0,
                disc_loss=d_total / n,
                adv_loss=adv_total / n,
            )
        )
    return generator, discriminator, history


def convert_volume(model, source: Volume, view, batch_size: int = 16) -> Volume:
    """Slice the source along ``view``, map each slice, clamp to [0, 1], restack.

    Runs the model in eval mode under no_grad; spacing is preserved.
    """
    view = Axis.coerce(view)
    slices = extract_slices(source, view)
    x = torch.from_numpy(np.stack([s.data for s in slices])[:, None, :, :])
    model.eval()
    outs = []
    with torch.no_grad():
        for start in range(0, x.shape[0], batch_size):
            try:
                y = model(x[start : start + batch_size])
            except ValueError as e:
                raise ValueError(f"view {view.name.lower()}: {e}") from e
            outs.append(y.clamp(0.0, 1.0)[:, 0].numpy())
    converted = np.concatenate(outs)
    out_slices = [Slice2D(converted[k], view, k) for k in range(converted.shape[0])]
    return stack_slices(out_slices, view, source.spacing)
