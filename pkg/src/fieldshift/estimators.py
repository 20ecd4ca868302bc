"""Scikit-learn style estimators wrapping the training and conversion core.

``SliceConverter`` fits one model on paired volumes and transforms source
volumes along a single view; ``MultiViewConverter`` fits three per-view
models and transforms by fused averaging. Both follow the sklearn contract:
constructor arguments are stored verbatim (so ``get_params`` / ``set_params``
/ ``clone`` compose with pipelines and searches), and all validation happens
in ``fit``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from . import nets
from .metrics import evaluate_volume
from .multiview import ViewEnsemble, fuse, multi_view_convert
from .training import TrainConfig, convert_volume, train_gan, train_mse
from .volumes import Axis, Volume


def _as_pairs(pairs):
    pairs = list(pairs)
    if not pairs:
        raise ValueError("empty dataset: no training pairs")
    return pairs


class SliceConverter(BaseEstimator):
    """Single-view volume-to-volume converter.

    Parameters
    ----------
    architecture : {"uconvert", "srgan", "espcn"}
        Network family. "srgan" trains adversarially; the others by MSE.
    view : axis name or Axis
        Slicing view used for training and conversion.
    epochs, learning_rate, batch_size, seed : training hyperparameters.
    adversarial_weight : weight of the -log D(G(x)) term ("srgan" only).
    net_config : optional architecture config dataclass or dict.
    """

    def __init__(self, architecture="uconvert", view="sagittal", epochs=40,
                 learning_rate=1e-3, batch_size=4, seed=0,
                 adversarial_weight=1e-3, net_config=None):
        self.architecture = architecture
        self.view = view
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.batch_size = batch_size
        self.seed = seed
        self.adversarial_weight = adversarial_weight
        self.net_config = net_config

    def _train_config(self):
        return TrainConfig(
            architecture=self.architecture,
            view=Axis.coerce(self.view),
            learning_rate=self.learning_rate,
            batch_size=self.batch_size,
            epochs=self.epochs,
            seed=self.seed,
            adversarial_weight=self.adversarial_weight,
        )

    def _net_config(self):
        if self.net_config is None or isinstance(self.net_config, dict):
            return nets.config_from_dict(self.architecture, self.net_config)
        return self.net_config

    def fit(self, pairs, y=None):
        """Train on a sequence of SubjectPairs; returns self."""
        pairs = _as_pairs(pairs)
        config = self._train_config()
        config.validate()
        built = nets.build_model(self.architecture, self._net_config(), seed=self.seed)
        if self.architecture == "srgan":
            generator, discriminator = built
            _, _, history = train_gan(generator, discriminator, pairs, config)
            self.model_ = generator
            self.discriminator_ = discriminator
        else:
            model, history = train_mse(built, pairs, config)
            self.model_ = model
        self.history_ = history
        self.view_ = config.view
        return self

    def transform(self, volume: Volume) -> Volume:
        check_is_fitted(self, "model_")
        return convert_volume(self.model_, volume, self.view_)

    def score(self, pairs, y=None) -> float:
        """Mean per-volume PSNR of transformed sources against targets."""
        check_is_fitted(self, "model_")
        scores = [
            evaluate_volume(self.transform(p.source), p.target).psnr_mean
            for p in _as_pairs(pairs)
        ]
        return float(np.mean(scores))


class MultiViewConverter(BaseEstimator):
    """Three independently trained per-view converters fused by averaging.

    Per-view runs use seeds ``seed + axis`` so the three trainings are
    independent yet reproducible.
    """

    def __init__(self, architecture="uconvert", epochs=40, learning_rate=1e-3,
                 batch_size=4, seed=0, adversarial_weight=1e-3, net_config=None):
        self.architecture = architecture
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.batch_size = batch_size
        self.seed = seed
        self.adversarial_weight = adversarial_weight
        self.net_config = net_config

    def fit(self, pairs, y=None):
        pairs = _as_pairs(pairs)
        self.converters_ = {}
        for axis in Axis:
            conv = SliceConverter(
                architecture=self.architecture,
                view=axis,
                epochs=self.epochs,
                learning_rate=self.learning_rate,
                batch_size=self.batch_size,
                seed=self.seed + int(axis),
                adversarial_weight=self.adversarial_weight,
                net_config=self.net_config,
            )
            self.converters_[axis] = conv.fit(pairs)
        self.ensemble_ = ViewEnsemble(
            models={a: c.model_ for a, c in self.converters_.items()},
            architecture=self.architecture,
        )
        return self

    def transform(self, volume: Volume) -> Volume:
        check_is_fitted(self, "ensemble_")
        fused, _ = multi_view_convert(self.ensemble_, volume)
        return fused

    def transform_views(self, volume: Volume) -> tuple:
        """Returns (fused, per-view dict) for inspection of the ensemble."""
        check_is_fitted(self, "ensemble_")
        return multi_view_convert(self.ensemble_, volume)

    def score(self, pairs, y=None) -> float:
        check_is_fitted(self, "ensemble_")
        scores = [
            evaluate_volume(self.transform(p.source), p.target).psnr_mean
            for p in _as_pairs(pairs)
        ]
        return float(np.mean(scores))


__all__ = ["MultiViewConverter", "SliceConverter", "fuse"]
