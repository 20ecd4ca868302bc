"""fieldshift: low-field to high-field MR volume conversion.

Slice-wise convolutional conversion models, a deterministic synthetic paired
dataset generator, multi-view ensemble fusion, and PSNR/SSIM evaluation.
"""

from .checkpoint import load_checkpoint, read_checkpoint_meta, save_checkpoint
from .estimators import MultiViewConverter, SliceConverter
from .metrics import MetricsReport, SSIMParams, evaluate_volume, mse, psnr, ssim_2d
from .multiview import ViewEnsemble, fuse, multi_view_convert
from .nets import (
    ESPCNConfig,
    SRGANConfig,
    UConvertNetConfig,
    build_espcn,
    build_model,
    build_srgan,
    build_uconvertnet,
    count_parameters,
)
from .phantoms import (
    DegradeParams,
    PhantomParams,
    SubjectPair,
    degrade,
    generate_dataset,
    generate_phantom,
    generate_subject,
    load_manifest,
    load_subject_pairs,
    split_by_subject,
)
from .training import (
    TrainConfig,
    TrainHistory,
    convert_volume,
    train_gan,
    train_mse,
)
from .volumes import (
    Axis,
    Slice2D,
    Volume,
    extract_slices,
    normalize,
    read_mvol,
    stack_slices,
    write_mvol,
)

__version__ = "0.1.0"

__all__ = [
    "Axis",
    "DegradeParams",
    "ESPCNConfig",
    "MetricsReport",
    "MultiViewConverter",
    "PhantomParams",
    "SRGANConfig",
    "SSIMParams",
    "Slice2D",
    "SliceConverter",
    "SubjectPair",
    "TrainConfig",
    "TrainHistory",
    "UConvertNetConfig",
    "ViewEnsemble",
    "Volume",
    "build_espcn",
    "build_model",
    "build_srgan",
    "build_uconvertnet",
    "convert_volume",
    "count_parameters",
    "degrade",
    "evaluate_volume",
    "extract_slices",
    "fuse",
    "generate_dataset",
    "generate_phantom",
    "generate_subject",
    "load_checkpoint",
    "load_manifest",
    "load_subject_pairs",
    "mse",
    "multi_view_convert",
    "normalize",
    "psnr",
    "read_checkpoint_meta",
    "read_mvol",
    "save_checkpoint",
    "split_by_subject",
    "ssim_2d",
    "stack_slices",
    "train_gan",
    "train_mse",
    "write_mvol",
]
