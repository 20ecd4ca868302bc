"""Volume data type, MVOL binary file format, axis-wise slicing, normalization.

A :class:`Volume` is a 3D float32 array with axis semantics fixed as
sagittal=0, coronal=1, axial=2 (array shape ``(D, H, W)``), plus voxel spacing
in mm and a nominal intensity range. The MVOL format stores a volume
bit-exactly: an 8-byte ASCII magic, a little-endian uint32 header length, a
UTF-8 JSON header, then the raw little-endian float32 voxels in C order.
"""

from __future__ import annotations

import enum
import json
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

MVOL_MAGIC = b"MVOL0001"


class Axis(enum.IntEnum):
    """Orthogonal viewing axis; the enum value is the array axis it slices."""

    SAGITTAL = 0
    CORONAL = 1
    AXIAL = 2

    @classmethod
    def coerce(cls, value) -> "Axis":
        """Accept an Axis, its integer value, or its lowercase/uppercase name."""
        if isinstance(value, cls):
            return value
        if isinstance(value, str):
            try:
                return cls[value.upper()]
            except KeyError:
                raise ValueError(
                    f"unknown axis {value!r}; expected one of "
                    f"{[a.name.lower() for a in cls]}"
                ) from None
        return cls(value)


@dataclass
class Volume:
    """3D scalar image with axis semantics and voxel spacing.

    Attributes:
        data: float32 array of shape (D, H, W); D indexes sagittal slices,
            H coronal, W axial.
        spacing: mm per voxel along each array axis; strictly positive.
        intensity_range: nominal (min, max) of the stored intensities.
    """

    data: np.ndarray
    spacing: tuple = (1.0, 1.0, 1.0)
    intensity_range: tuple = (0.0, 1.0)

    def __post_init__(self):
        self.data = np.ascontiguousarray(self.data, dtype=np.float32)
        if self.data.ndim != 3:
            raise ValueError(f"volume data must be 3D, got {self.data.ndim}D")
        if min(self.data.shape) < 1:
            raise ValueError(f"all volume dimensions must be >= 1, got {self.data.shape}")
        spacing = tuple(float(s) for s in self.spacing)
        if len(spacing) != 3:
            raise ValueError(f"spacing must have 3 components, got {len(spacing)}")
        if not all(np.isfinite(s) and s > 0 for s in spacing):
            raise ValueError(f"spacing components must be positive and finite, got {spacing}")
        self.spacing = spacing
        rng = tuple(float(v) for v in self.intensity_range)
        if len(rng) != 2:
            raise ValueError(f"intensity_range must have 2 components, got {len(rng)}")
        self.intensity_range = rng

    @property
    def shape(self) -> tuple:
        return self.data.shape

    def extent(self, axis) -> int:
        """Number of slices along the given axis."""
        return self.data.shape[Axis.coerce(axis)]


@dataclass
class Slice2D:
    """A single 2D hyperplane of a volume, tagged with its origin."""

    data: np.ndarray
    source_axis: Axis
    index: int

    def __post_init__(self):
        self.data = np.ascontiguousarray(self.data, dtype=np.float32)
        if self.data.ndim != 2:
            raise ValueError(f"slice data must be 2D, got {self.data.ndim}D")
        self.source_axis = Axis.coerce(self.source_axis)
        if self.index < 0:
            raise ValueError(f"slice index must be non-negative, got {self.index}")


def extract_slices(vol: Volume, axis) -> list:
    """Split a volume into its 2D slices along one axis.

    Returns extent(axis) slices in increasing index order. Slice k is the k-th
    hyperplane of the volume; its shape is the volume's remaining two extents
    in (lower-axis, higher-axis) order.
    """
    axis = Axis.coerce(axis)
    moved = np.moveaxis(vol.data, axis, 0)
    return [Slice2D(np.ascontiguousarray(moved[k]), axis, k) for k in range(moved.shape[0])]


def stack_slices(slices: Sequence[Slice2D], axis, spacing) -> Volume:
    """Reassemble slices produced by :func:`extract_slices` into a Volume.

    The inverse of extraction: ``stack_slices(extract_slices(v, a), a,
    v.spacing)`` equals ``v`` bit-exactly. Slices may arrive in any order but
    their indices must be exactly 0..n-1.
    """
    axis = Axis.coerce(axis)
    slices = list(slices)
    if not slices:
        raise ValueError("no slices")
    shape = slices[0].data.shape
    for s in slices:
        if s.data.shape != shape:
            raise ValueError(
                f"inconsistent slice shapes: {shape} vs {s.data.shape}"
            )
        if s.source_axis != axis:
            raise ValueError(
                f"slice from axis {s.source_axis.name.lower()} cannot stack along "
                f"{axis.name.lower()}"
            )
    indices = sorted(s.index for s in slices)
    if indices != list(range(len(slices))):
        raise ValueError("missing or duplicate slice indices")
    ordered = sorted(slices, key=lambda s: s.index)
    data = np.stack([s.data for s in ordered], axis=axis)
    return Volume(data, spacing=tuple(spacing))


def normalize(vol: Volume) -> Volume:
    """Affinely map the volume's intensities onto [0, 1].

    Raises:
        ValueError: if the volume is constant (degenerate intensity range).
    """
    lo = float(vol.data.min())
    hi = float(vol.data.max())
    if hi == lo:
        raise ValueError("degenerate intensity range: volume is constant")
    data = (vol.data - np.float32(lo)) / np.float32(hi - lo)
    return Volume(data, spacing=vol.spacing, intensity_range=(0.0, 1.0))


def write_mvol(vol: Volume, path) -> None:
    """Write a volume to an MVOL file, bit-exactly.

    Raises:
        ValueError: if the volume contains non-finite voxels.
        OSError: on I/O failure (message carries the path).
    """
    if not np.isfinite(vol.data).all():
        raise ValueError("non-finite data: volume contains NaN or infinity")
    header = {
        "shape": [int(n) for n in vol.data.shape],
        "spacing": list(vol.spacing),
        "dtype": "f32",
        "intensity_range": list(vol.intensity_range),
    }
    header_bytes = json.dumps(header, separators=(",", ":")).encode("utf-8")
    payload = np.ascontiguousarray(vol.data, dtype="<f4").tobytes(order="C")
    with open(path, "wb") as f:
        f.write(MVOL_MAGIC)
        f.write(struct.pack("<I", len(header_bytes)))
        f.write(header_bytes)
        f.write(payload)


def read_mvol(path) -> Volume:
    """Read an MVOL file written by :func:`write_mvol`."""
    raw = Path(path).read_bytes()
    if len(raw) < 12 or raw[:8] != MVOL_MAGIC:
        raise ValueError(f"not an MVOL file: {path}")
    (header_len,) = struct.unpack_from("<I", raw, 8)
    if 12 + header_len > len(raw):
        raise ValueError(
            f"malformed header at byte offset 12: declared length {header_len} "
            f"exceeds file size"
        )
    try:
        header = json.loads(raw[12 : 12 + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise ValueError(f"malformed header at byte offset 12: {e}") from e
    for key in ("shape", "spacing", "dtype", "intensity_range"):
        if key not in header:
            raise ValueError(f"malformed header at byte offset 12: missing key {key!r}")
    if header["dtype"] != "f32":
        raise ValueError(f"unsupported dtype {header['dtype']!r}; only 'f32' is defined")
    shape = header["shape"]
    if len(shape) != 3 or not all(isinstance(n, int) and n >= 1 for n in shape):
        raise ValueError(f"malformed header at byte offset 12: bad shape {shape}")
    expected = shape[0] * shape[1] * shape[2] * 4
    payload = raw[12 + header_len :]
    if len(payload) != expected:
        raise ValueError(
            f"payload length mismatch: expected {expected} bytes, got {len(payload)}"
        )
    data = np.frombuffer(payload, dtype="<f4").reshape(shape).copy()
    return Volume(
        data,
        spacing=tuple(header["spacing"]),
        intensity_range=tuple(header["intensity_range"]),
    )
