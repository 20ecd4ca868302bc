"""Deterministic synthetic paired-volume generator.

Builds a high-field-like ground-truth brain phantom (concentric tissue shells
inside a deformed ellipsoid, modulated by a smooth bias field) and degrades it
into the low-field-like source (Gaussian blur, mean-anchored contrast
compression, additive Gaussian noise). Every output is a pure function of
(seed, parameters); per-subject randomness is derived from the dataset seed
and the subject id, so subjects can be generated in parallel without changing
a single byte.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
from scipy.ndimage import gaussian_filter

from .volumes import Volume, read_mvol, write_mvol

MANIFEST_VERSION = 1
MANIFEST_NAME = "manifest.json"

# sub-stream tags for per-subject seed derivation
_STREAM_PHANTOM = 0
_STREAM_NOISE = 1


@dataclass(frozen=True)
class PhantomParams:
    """Geometry and tissue intensities of the ground-truth phantom."""

    size: int = 64
    wm_intensity: float = 0.70
    gm_intensity: float = 0.45
    csf_intensity: float = 0.20
    bias_amplitude: float = 0.10
    deform_amplitude: float = 2.0

    def validate(self):
        if self.size < 16 or self.size % 16 != 0:
            raise ValueError(f"size must be >= 16 and divisible by 16, got {self.size}")
        if not (0.0 < self.csf_intensity < self.gm_intensity < self.wm_intensity <= 1.0):
            raise ValueError(
                "tissue intensities must satisfy 0 < csf < gm < wm <= 1, got "
                f"csf={self.csf_intensity}, gm={self.gm_intensity}, wm={self.wm_intensity}"
            )
        if not (0.0 <= self.bias_amplitude <= 0.2):
            raise ValueError(f"bias_amplitude must be in [0, 0.2], got {self.bias_amplitude}")
        if self.deform_amplitude < 0:
            raise ValueError(f"deform_amplitude must be >= 0, got {self.deform_amplitude}")


@dataclass(frozen=True)
class DegradeParams:
    """Low-field degradation: blur, contrast compression toward the mean, noise."""

    blur_sigma: float = 1.0
    contrast_alpha: float = 0.6
    noise_sigma: float = 0.03

    def validate(self):
        if self.blur_sigma < 0:
            raise ValueError(f"blur_sigma must be >= 0, got {self.blur_sigma}")
        if not (0.0 < self.contrast_alpha <= 1.0):
            raise ValueError(f"contrast_alpha must be in (0, 1], got {self.contrast_alpha}")
        if self.noise_sigma < 0:
            raise ValueError(f"noise_sigma must be >= 0, got {self.noise_sigma}")


@dataclass
class SubjectPair:
    """Matched source (degraded) and target (ground truth) volumes."""

    subject_id: int
    source: Volume
    target: Volume

    def __post_init__(self):
        if self.source.shape != self.target.shape or self.source.spacing != self.target.spacing:
            raise ValueError(
                f"subject {self.subject_id}: source and target must share geometry, got "
                f"{self.source.shape}/{self.source.spacing} vs "
                f"{self.target.shape}/{self.target.spacing}"
            )


def _low_frequency_field(rng, grids, n_components=3):
    """Smooth seeded field on the grid, normalized so max |value| == 1."""
    gx, gy, gz = grids
    total = np.zeros_like(gx)
    for _ in range(n_components):
        freq = rng.integers(1, 3, size=3)  # 1 or 2 half-cycles per extent
        phase = rng.uniform(0.0, 2.0 * np.pi)
        amp = rng.uniform(0.5, 1.0)
        total += amp * np.sin(np.pi * (freq[0] * gx + freq[1] * gy + freq[2] * gz) + phase)
    peak = np.abs(total).max()
    if peak > 0:
        total /= peak
    return total


def generate_phantom(seed, params: PhantomParams = PhantomParams()) -> Volume:
    """Build the ground-truth brain phantom for one subject.

    The phantom is an ellipsoid with an outer gray-matter ribbon, a white
    matter interior, and two central ventricle blobs at CSF intensity. Tissue
    boundaries are evaluated analytically on coordinates warped by a seeded
    low-frequency deformation (magnitude <= deform_amplitude voxels), and the
    tissue map is multiplied by a seeded smooth bias field in
    [1 - bias_amplitude, 1 + bias_amplitude]. Background voxels are exactly 0.

    ``seed`` may be an int or a ``numpy.random.SeedSequence``.
    """
    params.validate()
    rng = np.random.default_rng(seed)
    n = params.size
    half = n / 2.0
    coords = (np.arange(n, dtype=np.float64) - (n - 1) / 2.0) / half
    gx, gy, gz = np.meshgrid(coords, coords, coords, indexing="ij")

    # per-subject anatomy jitter (normalized units: 1.0 == half the extent)
    brain_radii = np.array([0.78, 0.66, 0.71]) + rng.uniform(-0.04, 0.04, size=3)
    ribbon = 0.18 + rng.uniform(-0.02, 0.02)
    vent_offset = 0.16 + rng.uniform(-0.02, 0.02)
    vent_radii = np.array([0.10, 0.22, 0.12]) + rng.uniform(-0.015, 0.015, size=3)
    vent_shift = rng.uniform(-0.03, 0.03, size=2)  # shared coronal/axial shift

    # seeded low-frequency deformation, normalized to deform_amplitude voxels
    disp = np.stack([_low_frequency_field(rng, (gx, gy, gz)) for _ in range(3)])
    mag = np.sqrt((disp * disp).sum(axis=0))
    peak = mag.max()
    if peak > 0:
        disp *= (params.deform_amplitude / half) / peak
    wx = gx + disp[0]
    wy = gy + disp[1]
    wz = gz + disp[2]

    def ellipsoid(center, radii):
        return (
            ((wx - center[0]) / radii[0]) ** 2
            + ((wy - center[1]) / radii[1]) ** 2
            + ((wz - center[2]) / radii[2]) ** 2
        ) <= 1.0

    brain = ellipsoid((0.0, 0.0, 0.0), brain_radii)
    white = ellipsoid((0.0, 0.0, 0.0), brain_radii * (1.0 - ribbon))
    vents = np.zeros_like(brain)
    for side in (-1.0, 1.0):
        center = (side * vent_offset, vent_shift[0], vent_shift[1])
        vents |= ellipsoid(center, vent_radii)
    vents &= white

    tissue = np.zeros_like(gx)
    tissue[brain] = params.gm_intensity
    tissue[white] = params.wm_intensity
    tissue[vents] = params.csf_intensity

    bias = 1.0 + params.bias_amplitude * _low_frequency_field(rng, (gx, gy, gz))
    data = np.clip(tissue * bias, 0.0, 1.0)
    return Volume(data.astype(np.float32), spacing=(1.0, 1.0, 1.0), intensity_range=(0.0, 1.0))


def degrade(target: Volume, params: DegradeParams = DegradeParams(), seed=0) -> Volume:
    """Map a ground-truth volume to its low-field-like counterpart.

    Pipeline: separable Gaussian blur (kernel truncated at 4 sigma, reflected
    boundaries), contrast compression toward the blurred volume's scalar mean
    (``m + alpha * (blur - m)``), additive Gaussian noise, clamp to [0, 1].
    Identity parameters (alpha=1, blur=0, noise=0) return the input bit-exactly.
    """
    params.validate()
    lo = float(target.data.min())
    hi = float(target.data.max())
    if lo < 0.0 or hi > 1.0:
        raise ValueError(f"target intensities must lie in [0, 1], got [{lo}, {hi}]")
    out = target.data.astype(np.float64)
    if params.blur_sigma > 0:
        out = gaussian_filter(out, sigma=params.blur_sigma, mode="reflect", truncate=4.0)
    if params.contrast_alpha < 1.0:
        m = out.mean()
        out = m + params.contrast_alpha * (out - m)
    if params.noise_sigma > 0:
        rng = np.random.default_rng(seed)
        out = out + rng.normal(0.0, params.noise_sigma, size=out.shape)
    out = np.clip(out, 0.0, 1.0)
    return Volume(out.astype(np.float32), spacing=target.spacing, intensity_range=(0.0, 1.0))


def generate_subject(dataset_seed: int, subject_id: int,
                     phantom_params: PhantomParams = PhantomParams(),
                     degrade_params: DegradeParams = DegradeParams()) -> SubjectPair:
    """Generate one subject's pair; depends only on (dataset_seed, subject_id)."""
    target = generate_phantom(
        np.random.SeedSequence([dataset_seed, subject_id, _STREAM_PHANTOM]), phantom_params
    )
    source = degrade(
        target, degrade_params,
        np.random.SeedSequence([dataset_seed, subject_id, _STREAM_NOISE]),
    )
    return SubjectPair(subject_id, source=source, target=target)


def generate_dataset(n_subjects: int, seed: int, phantom_params: PhantomParams,
                     degrade_params: DegradeParams, out_dir) -> dict:
    """Write paired MVOL volumes plus a JSON manifest; returns the manifest.

    Files are named ``subject_<id>_src.mvol`` / ``subject_<id>_tgt.mvol``;
    manifest paths are relative to the manifest's directory. Fully
    deterministic: the same inputs produce byte-identical trees.
    """
    if n_subjects < 2:
        raise ValueError("need at least 2 subjects")
    phantom_params.validate()
    degrade_params.validate()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    subjects = []
    for sid in range(n_subjects):
        pair = generate_subject(seed, sid, phantom_params, degrade_params)
        src_name = f"subject_{sid}_src.mvol"
        tgt_name = f"subject_{sid}_tgt.mvol"
        write_mvol(pair.source, out_dir / src_name)
        write_mvol(pair.target, out_dir / tgt_name)
        subjects.append({"id": sid, "src_path": src_name, "tgt_path": tgt_name})
    manifest = {
        "version": MANIFEST_VERSION,
        "seed": seed,
        "phantom_params": asdict(phantom_params),
        "degrade_params": asdict(degrade_params),
        "subjects": subjects,
    }
    with open(out_dir / MANIFEST_NAME, "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2)
        f.write("\n")
    return manifest


def load_manifest(path) -> dict:
    """Read a dataset manifest; ``path`` may be the file or its directory."""
    path = Path(path)
    if path.is_dir():
        path = path / MANIFEST_NAME
    with open(path, encoding="utf-8") as f:
        manifest = json.load(f)
    manifest["_dir"] = str(path.parent)
    return manifest


def load_subject_pairs(manifest: dict, ids=None) -> list:
    """Materialize SubjectPairs from a loaded manifest, optionally filtered by id."""
    base = Path(manifest.get("_dir", "."))
    wanted = None if ids is None else set(ids)
    pairs = []
    for entry in manifest["subjects"]:
        if wanted is not None and entry["id"] not in wanted:
            continue
        pairs.append(
            SubjectPair(
                entry["id"],
                source=read_mvol(base / entry["src_path"]),
                target=read_mvol(base / entry["tgt_path"]),
            )
        )
    return pairs


def split_by_subject(manifest: dict, train_fraction: float, seed: int) -> tuple:
    """Partition subject ids into train/test sets, deterministically.

    The train side gets ``round(train_fraction * n)`` subjects, with both
    sides clamped to at least one subject.
    """
    if not (0.0 < train_fraction < 1.0):
        raise ValueError(f"train fraction must be in (0, 1), got {train_fraction}")
    ids = sorted(entry["id"] for entry in manifest["subjects"])
    n = len(ids)
    if n < 2:
        raise ValueError("need at least 2 subjects to split")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    n_train = min(max(round(train_fraction * n), 1), n - 1)
    train = sorted(ids[i] for i in perm[:n_train])
    test = sorted(ids[i] for i in perm[n_train:])
    return train, test
