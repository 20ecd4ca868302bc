"""Checkpoint archive: JSON metadata plus named parameter tensors in one zip.

Layout: ``meta.json`` holds {architecture, net_config, train_config, epoch,
seed, history}; every tensor (parameters and buffers, so eval-mode outputs
restore bit-exactly) is stored as ``tensors/<role>.<state_dict key>.npy``
where role is ``model`` for single networks and ``generator`` /
``discriminator`` for adversarial pairs. Zip entry timestamps are pinned so
identical states produce identical archives.
"""

from __future__ import annotations

import io
import json
import zipfile
from pathlib import Path

import numpy as np
import torch

from . import nets
from .training import TrainHistory

FORMAT = "fieldshift-checkpoint-1"
_FIXED_DATE = (1980, 1, 1, 0, 0, 0)

_SINGLE_ROLE = ("model",)
_PAIR_ROLES = ("generator", "discriminator")


def _roles(models) -> tuple:
    if isinstance(models, (tuple, list)):
        if len(models) != 2:
            raise ValueError(f"expected (generator, discriminator), got {len(models)} models")
        return _PAIR_ROLES, tuple(models)
    return _SINGLE_ROLE, (models,)


def _net_config_of(models):
    first = models[0] if isinstance(models, (tuple, list)) else models
    return first.config


def _architecture_of(models):
    if isinstance(models, (tuple, list)):
        return "srgan"
    from .nets import ESPCN, UConvertNet

    if isinstance(models, UConvertNet):
        return "uconvert"
    if isinstance(models, ESPCN):
        return "espcn"
    raise ValueError(f"cannot infer architecture of {type(models).__name__}")


def save_checkpoint(path, models, history: TrainHistory | None = None,
                    train_config: dict | None = None) -> None:
    """Write model(s) + history to a checkpoint archive at ``path``."""
    roles, nets_tuple = _roles(models)
    architecture = _architecture_of(models)
    net_config = _net_config_of(models)
    history = history or TrainHistory()
    meta = {
        "format": FORMAT,
        "architecture": architecture,
        "net_config": nets.config_to_dict(net_config),
        "train_config": dict(train_config or history.metadata),
        "epoch": history.epochs_completed,
        "seed": history.metadata.get("seed"),
        "history": history.to_dict(),
    }
    with zipfile.ZipFile(path, "w", compression=zipfile.ZIP_DEFLATED) as zf:
        info = zipfile.ZipInfo("meta.json", date_time=_FIXED_DATE)
        zf.writestr(info, json.dumps(meta, indent=2))
        for role, net in zip(roles, nets_tuple):
            for key, tensor in net.state_dict().items():
                buf = io.BytesIO()
                np.save(buf, tensor.detach().cpu().numpy())
                entry = zipfile.ZipInfo(f"tensors/{role}.{key}.npy", date_time=_FIXED_DATE)
                zf.writestr(entry, buf.getvalue())


def read_checkpoint_meta(path) -> dict:
    with zipfile.ZipFile(path) as zf:
        return json.loads(zf.read("meta.json").decode("utf-8"))


def load_checkpoint(path, into=None) -> tuple:
    """Restore ``(models, history, meta)`` from an archive.

    With ``into`` given (a module, or a (generator, discriminator) pair), the
    stored architecture and config must match it exactly, otherwise a
    "checkpoint/config mismatch" error is raised. Without ``into`` fresh
    networks are built from the stored config.
    """
    path = Path(path)
    meta = read_checkpoint_meta(path)
    if meta.get("format") != FORMAT:
        raise ValueError(f"not a checkpoint archive: {path}")
    architecture = meta["architecture"]
    net_config = nets.config_from_dict(architecture, meta["net_config"])

    if into is None:
        models = nets.build_model(architecture, net_config, seed=0)
    else:
        target_arch = _architecture_of(into)
        if target_arch != architecture or _net_config_of(into) != net_config:
            raise ValueError(
                "checkpoint/config mismatch: archive holds "
                f"{architecture} {nets.config_to_dict(net_config)}, target is "
                f"{target_arch} {nets.config_to_dict(_net_config_of(into))}"
            )
        models = into

    roles, nets_tuple = _roles(models)
    with zipfile.ZipFile(path) as zf:
        names = set(zf.namelist())
        for role, net in zip(roles, nets_tuple):
            state = {}
            prefix = f"tensors/{role}."
            for name in names:
                if name.startswith(prefix) and name.endswith(".npy"):
                    key = name[len(prefix) : -len(".npy")]
                    arr = np.load(io.BytesIO(zf.read(name)))
                    state[key] = torch.from_numpy(arr)
            missing = set(net.state_dict()) - set(state)
            if missing:
                raise ValueError(
                    f"checkpoint/config mismatch: archive lacks tensors {sorted(missing)}"
                )
            net.load_state_dict(state, strict=True)
            net.eval()
    history = TrainHistory.from_dict(meta.get("history", {}))
    return models, history, meta
