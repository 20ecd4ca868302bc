"""Command-line interface: data generation, training, conversion, evaluation,
and benchmarking.

Every subcommand accepts ``--config FILE`` (a flat JSON object whose keys
mirror the flag names with underscores); explicit flags override the file,
which overrides built-in defaults. Commands that produce files write the
fully resolved configuration next to their outputs (``run_config.json``
inside directory outputs, ``<out>.config.json`` beside file outputs), so a
run can be reproduced from its own emitted config.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

from . import nets
from .checkpoint import load_checkpoint, save_checkpoint
from .metrics import evaluate_volume
from .multiview import ViewEnsemble, multi_view_convert
from .phantoms import (
    DegradeParams,
    PhantomParams,
    generate_dataset,
    generate_subject,
    load_manifest,
    load_subject_pairs,
    split_by_subject,
)
from .training import TrainConfig, convert_volume, train_gan, train_mse
from .volumes import Axis, read_mvol, write_mvol

MODELS = ("uconvert", "srgan", "espcn")
VIEWS = ("sagittal", "coronal", "axial")

GEN_DATA_DEFAULTS = {
    "subjects": 20,
    "size": 64,
    "seed": 0,
    "out": None,
    "wm_intensity": 0.70,
    "gm_intensity": 0.45,
    "csf_intensity": 0.20,
    "bias_amplitude": 0.10,
    "deform_amplitude": 2.0,
    "blur_sigma": 1.0,
    "contrast_alpha": 0.6,
    "noise_sigma": 0.03,
}

TRAIN_DEFAULTS = {
    "model": "uconvert",
    "view": "sagittal",
    "data": None,
    "epochs": 40,
    "lr": 0.001,
    "batch": 4,
    "seed": 0,
    "out": None,
    "train_fraction": 0.9,
    "split_seed": 0,
    "adversarial_weight": 1e-3,
}

CONVERT_DEFAULTS = {
    "ckpt": None,
    "ckpt_coronal": None,
    "ckpt_axial": None,
    "in": None,
    "out": None,
    "multiview": False,
    "keep_views": False,
}

EVALUATE_DEFAULTS = {
    "pred": None,
    "target": None,
    "axis": "sagittal",
    "json": None,
}

BENCHMARK_DEFAULTS = {
    "model": "uconvert",
    "size": 64,
    "epochs": 1,
    "seed": 0,
    "json": None,
}


def _resolve(defaults: dict, args: argparse.Namespace) -> dict:
    """Layer defaults < config file < explicit flags into one flat dict."""
    values = dict(defaults)
    raw = vars(args)
    config_path = raw.get("config")
    if config_path:
        with open(config_path, encoding="utf-8") as f:
            file_values = json.load(f)
        unknown = set(file_values) - set(defaults)
        if unknown:
            raise ValueError(f"unknown config key(s): {sorted(unknown)}")
        values.update(file_values)
    for key in defaults:
        if raw.get(key) is not None:
            values[key] = raw[key]
    return values


def _write_resolved(values: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(values, f, indent=2)
        f.write("\n")


def _require(values: dict, *keys):
    for key in keys:
        if values.get(key) is None:
            raise ValueError(f"missing required option --{key.replace('_', '-')}")


def _check_model(name: str) -> str:
    if name == "prsr":
        raise ValueError("model not supported (out of scope)")
    if name not in MODELS:
        raise ValueError(f"unknown model {name!r}; expected one of {MODELS}")
    return name


def cmd_gen_data(args) -> int:
    values = _resolve(GEN_DATA_DEFAULTS, args)
    _require(values, "out")
    phantom = PhantomParams(
        size=values["size"],
        wm_intensity=values["wm_intensity"],
        gm_intensity=values["gm_intensity"],
        csf_intensity=values["csf_intensity"],
        bias_amplitude=values["bias_amplitude"],
        deform_amplitude=values["deform_amplitude"],
    )
    degrade = DegradeParams(
        blur_sigma=values["blur_sigma"],
        contrast_alpha=values["contrast_alpha"],
        noise_sigma=values["noise_sigma"],
    )
    manifest = generate_dataset(
        values["subjects"], values["seed"], phantom, degrade, values["out"]
    )
    _write_resolved(values, Path(values["out"]) / "run_config.json")
    print(
        f"wrote {len(manifest['subjects'])} subject pairs "
        f"({values['size']}^3) to {values['out']}"
    )
    return 0


def cmd_train(args) -> int:
    values = _resolve(TRAIN_DEFAULTS, args)
    _require(values, "data", "out")
    model_id = _check_model(values["model"])
    view = Axis.coerce(values["view"])
    manifest = load_manifest(values["data"])
    train_ids, test_ids = split_by_subject(
        manifest, values["train_fraction"], values["split_seed"]
    )
    pairs = load_subject_pairs(manifest, train_ids)
    config = TrainConfig(
        architecture=model_id,
        view=view,
        learning_rate=values["lr"],
        batch_size=values["batch"],
        epochs=values["epochs"],
        seed=values["seed"],
        adversarial_weight=values["adversarial_weight"],
    )
    config.validate()
    built = nets.build_model(model_id, seed=values["seed"])
    if model_id == "srgan":
        generator, discriminator, history = train_gan(
            built[0], built[1], pairs, config
        )
        models = (generator, discriminator)
    else:
        model, history = train_mse(built, pairs, config)
        models = model
    history.metadata["train_subjects"] = train_ids
    history.metadata["test_subjects"] = test_ids
    out = Path(values["out"])
    if out.parent and not out.parent.exists():
        out.parent.mkdir(parents=True, exist_ok=True)
    save_checkpoint(out, models, history, train_config=config.metadata())
    history.write_jsonl(str(out) + ".history.jsonl")
    _write_resolved(values, str(out) + ".config.json")
    final = history.records[-1]
    print(
        f"trained {model_id} ({view.name.lower()}) on {len(train_ids)} subjects, "
        f"{config.epochs} epochs; final loss {final.loss:.6f}; checkpoint {out}"
    )
    return 0


def _load_for_view(path, expected_view: Axis):
    models, _, meta = load_checkpoint(path)
    model = models[0] if isinstance(models, tuple) else models
    stored = meta.get("train_config", {}).get("view")
    if stored is None:
        raise ValueError(f"checkpoint {path} does not record a view")
    stored_view = Axis.coerce(stored)
    if expected_view is not None and stored_view != expected_view:
        raise ValueError(
            f"checkpoint {path} was trained on view {stored_view.name.lower()}, "
            f"expected {expected_view.name.lower()}"
        )
    return model, stored_view, meta["architecture"]


def cmd_convert(args) -> int:
    values = _resolve(CONVERT_DEFAULTS, args)
    _require(values, "ckpt", "in", "out")
    source = read_mvol(values["in"])
    out = Path(values["out"])
    if values["multiview"]:
        if not (values["ckpt_coronal"] and values["ckpt_axial"]):
            raise ValueError("three view checkpoints required")
        paths = {
            Axis.SAGITTAL: values["ckpt"],
            Axis.CORONAL: values["ckpt_coronal"],
            Axis.AXIAL: values["ckpt_axial"],
        }
        models, arch_ids = {}, set()
        for axis, path in paths.items():
            model, _, arch = _load_for_view(path, axis)
            models[axis] = model
            arch_ids.add(arch)
        if len(arch_ids) != 1:
            raise ValueError(
                f"ensemble checkpoints disagree on architecture: {sorted(arch_ids)}"
            )
        ensemble = ViewEnsemble(models=models, architecture=arch_ids.pop())
        fused, per_view = multi_view_convert(ensemble, source)
        write_mvol(fused, out)
        if values["keep_views"]:
            stem = out.with_suffix("")
            for axis, vol in per_view.items():
                write_mvol(vol, Path(f"{stem}_{axis.name.lower()}.mvol"))
        print(f"wrote fused volume {out}")
    else:
        model, view, _ = _load_for_view(values["ckpt"], None)
        converted = convert_volume(model, source, view)
        write_mvol(converted, out)
        print(f"wrote converted volume {out} (view {view.name.lower()})")
    _write_resolved(values, str(out) + ".config.json")
    return 0


def _fmt(value: float) -> str:
    return "inf" if math.isinf(value) else f"{value:.4f}"


def cmd_evaluate(args) -> int:
    values = _resolve(EVALUATE_DEFAULTS, args)
    _require(values, "pred", "target")
    pred = read_mvol(values["pred"])
    target = read_mvol(values["target"])
    report = evaluate_volume(pred, target, axis=Axis.coerce(values["axis"]))
    print(f"PSNR {_fmt(report.psnr_mean)}")
    print(f"SSIM {report.ssim_mean:.4f}")
    if values["json"]:
        with open(values["json"], "w", encoding="utf-8") as f:
            f.write(report.to_json() + "\n")
        _write_resolved(values, str(values["json"]) + ".config.json")
    return 0


def cmd_benchmark(args) -> int:
    values = _resolve(BENCHMARK_DEFAULTS, args)
    model_id = _check_model(values["model"])
    size = values["size"]
    phantom = PhantomParams(size=size)
    pairs = [
        generate_subject(values["seed"], sid, phantom_params=phantom)
        for sid in range(2)
    ]
    config = TrainConfig(
        architecture=model_id,
        epochs=values["epochs"],
        seed=values["seed"],
    )
    built = nets.build_model(model_id, seed=values["seed"])
    if model_id == "srgan":
        generator, discriminator, history = train_gan(
            built[0], built[1], pairs, config
        )
        model = generator
        params = nets.count_parameters(generator) + nets.count_parameters(discriminator)
    else:
        model, history = train_mse(built, pairs, config)
        params = nets.count_parameters(model)
    sec_per_epoch = sum(r.seconds for r in history.records) / len(history.records)
    t0 = time.perf_counter()
    convert_volume(model, pairs[0].source, Axis.SAGITTAL)
    sec_per_slice = (time.perf_counter() - t0) / size
    row = {
        "model": model_id,
        "params": params,
        "sec_per_epoch": sec_per_epoch,
        "sec_per_slice": sec_per_slice,
    }
    print(json.dumps(row))
    if values["json"]:
        with open(values["json"], "w", encoding="utf-8") as f:
            f.write(json.dumps(row) + "\n")
        _write_resolved(values, str(values["json"]) + ".config.json")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fieldshift",
        description="Low-field to high-field MR volume conversion toolkit.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="generate a paired synthetic dataset")
    p.add_argument("--config", help="JSON config file (flags override it)")
    p.add_argument("--subjects", type=int)
    p.add_argument("--size", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output directory")
    p.add_argument("--wm-intensity", type=float, dest="wm_intensity")
    p.add_argument("--gm-intensity", type=float, dest="gm_intensity")
    p.add_argument("--csf-intensity", type=float, dest="csf_intensity")
    p.add_argument("--bias-amplitude", type=float, dest="bias_amplitude")
    p.add_argument("--deform-amplitude", type=float, dest="deform_amplitude")
    p.add_argument("--blur-sigma", type=float, dest="blur_sigma")
    p.add_argument("--contrast-alpha", type=float, dest="contrast_alpha")
    p.add_argument("--noise-sigma", type=float, dest="noise_sigma")
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("train", help="train a conversion model on a dataset")
    p.add_argument("--config")
    p.add_argument("--model", help="uconvert | srgan | espcn")
    p.add_argument("--view", choices=VIEWS)
    p.add_argument("--data", help="dataset directory (with manifest.json)")
    p.add_argument("--epochs", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--batch", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="checkpoint path")
    p.add_argument("--train-fraction", type=float, dest="train_fraction")
    p.add_argument("--split-seed", type=int, dest="split_seed")
    p.add_argument("--adversarial-weight", type=float, dest="adversarial_weight")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("convert", help="convert a volume with trained checkpoints")
    p.add_argument("--config")
    p.add_argument("--ckpt", help="checkpoint (sagittal slot in multiview mode)")
    p.add_argument("--ckpt-coronal", dest="ckpt_coronal")
    p.add_argument("--ckpt-axial", dest="ckpt_axial")
    p.add_argument("--in", help="input MVOL volume")
    p.add_argument("--out", help="output MVOL volume")
    p.add_argument("--multiview", action="store_true", default=None)
    p.add_argument("--keep-views", action="store_true", default=None, dest="keep_views")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("evaluate", help="PSNR/SSIM of a prediction against ground truth")
    p.add_argument("--config")
    p.add_argument("--pred")
    p.add_argument("--target")
    p.add_argument("--axis", choices=VIEWS)
    p.add_argument("--json", help="write the full metrics report here")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("benchmark", help="parameter count and timing for one model")
    p.add_argument("--config")
    p.add_argument("--model")
    p.add_argument("--size", type=int)
    p.add_argument("--epochs", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--json", help="write the benchmark row here")
    p.set_defaults(func=cmd_benchmark)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
