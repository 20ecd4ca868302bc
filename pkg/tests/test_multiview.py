import numpy as np
import pytest
import torch

from fieldshift import (
    Axis,
    TrainConfig,
    ViewEnsemble,
    Volume,
    convert_volume,
    fuse,
    mse,
    multi_view_convert,
    train_mse,
)
from fieldshift.nets import UConvertNetConfig, build_uconvertnet

TINY = UConvertNetConfig(levels=1, base_channels=8, dropout_rate=0.0)


def _vol(rng, value=None, shape=(8, 8, 8)):
    if value is None:
        return Volume(rng.random(shape, dtype=np.float32))
    return Volume(np.full(shape, value, dtype=np.float32))


class TestFuse:
    def test_mean_of_identical_volumes(self, rng):
        v = _vol(rng)
        out = fuse([v, v, v])
        assert np.abs(out.data - v.data).max() <= 1e-7

    def test_constant_arithmetic(self, rng):
        out = fuse([_vol(rng, 0.0), _vol(rng, 0.3), _vol(rng, 0.6)])
        assert np.abs(out.data - 0.3).max() <= 1e-7

    def test_empty_rejected(self):
        with pytest.raises(ValueError, match="no volumes"):
            fuse([])

    def test_geometry_mismatch_rejected(self, rng):
        a = _vol(rng)
        b = Volume(rng.random((8, 8, 9), dtype=np.float32))
        with pytest.raises(ValueError, match="geometry mismatch"):
            fuse([a, b])
        c = Volume(a.data, spacing=(2, 1, 1))
        with pytest.raises(ValueError, match="geometry mismatch"):
            fuse([a, c])

    def test_permutation_invariance(self, rng):
        vols = [_vol(rng) for _ in range(3)]
        a = fuse(vols)
        b = fuse(list(reversed(vols)))
        assert np.abs(a.data - b.data).max() <= 1e-7

    def test_geometry_preserved(self, rng):
        v = Volume(rng.random((4, 6, 8), dtype=np.float32), spacing=(1, 2, 3))
        out = fuse([v, v])
        assert out.shape == v.shape
        assert out.spacing == v.spacing

    def test_weighted_fusion(self, rng):
        a, b = _vol(rng, 0.0), _vol(rng, 1.0)
        out = fuse([a, b], weights=[0.25, 0.75])
        assert np.abs(out.data - 0.75).max() <= 1e-7

    def test_weights_must_sum_to_one(self, rng):
        with pytest.raises(ValueError, match="sum to 1"):
            fuse([_vol(rng), _vol(rng)], weights=[0.5, 0.6])

    def test_weight_count_must_match(self, rng):
        with pytest.raises(ValueError, match="one weight per volume"):
            fuse([_vol(rng), _vol(rng)], weights=[1.0])


class TestJensenProperty:
    def test_fused_mse_never_exceeds_mean_mse_on_seeded_triples(self):
        """MSE(mean(P_i), T) <= mean_i MSE(P_i, T), by convexity of squared error."""
        for seed in range(100):
            r = np.random.default_rng(seed)
            preds = [Volume(r.random((6, 6, 6), dtype=np.float32)) for _ in range(3)]
            target = Volume(r.random((6, 6, 6), dtype=np.float32))
            fused = fuse(preds)
            lhs = mse(fused.data, target.data)
            rhs = np.mean([mse(p.data, target.data) for p in preds])
            assert lhs <= rhs + 1e-9


class TestViewEnsemble:
    def test_requires_all_three_views(self):
        net = build_uconvertnet(TINY, seed=0)
        with pytest.raises(ValueError, match="missing.*axial"):
            ViewEnsemble(models={Axis.SAGITTAL: net, Axis.CORONAL: net})

    def test_accepts_axis_names_as_keys(self):
        net = build_uconvertnet(TINY, seed=0)
        ens = ViewEnsemble(models={"sagittal": net, "coronal": net, "axial": net})
        assert set(ens.models) == set(Axis)


class TestMultiViewConvert:
    def test_zero_weight_ensemble_gives_zero_volume(self, tiny_pairs):
        net = build_uconvertnet(TINY, seed=0)
        with torch.no_grad():
            for p in net.parameters():
                p.zero_()
        ens = ViewEnsemble(models={a: net for a in Axis})
        fused, per_view = multi_view_convert(ens, tiny_pairs[0].source)
        assert np.array_equal(fused.data, np.zeros_like(fused.data))
        assert set(per_view) == set(Axis)

    def test_per_view_outputs_match_standalone_conversion(self, tiny_pairs):
        models = {
            a: build_uconvertnet(TINY, seed=10 + int(a)) for a in Axis
        }
        ens = ViewEnsemble(models=models)
        src = tiny_pairs[0].source
        fused, per_view = multi_view_convert(ens, src)
        for a in Axis:
            standalone = convert_volume(models[a], src, a)
            assert np.array_equal(per_view[a].data, standalone.data)
        refused = fuse([per_view[a] for a in Axis])
        assert np.array_equal(fused.data, refused.data)

    def test_trained_ensemble_jensen_on_real_outputs(self, tiny_pairs):
        """Fused MSE <= mean per-view MSE on actually trained models."""
        train, held_out = tiny_pairs[:2], tiny_pairs[2]
        models = {}
        for a in Axis:
            net = build_uconvertnet(TINY, seed=20 + int(a))
            net, _ = train_mse(net, train, TrainConfig(epochs=3, seed=20 + int(a), view=a))
            models[a] = net
        fused, per_view = multi_view_convert(ViewEnsemble(models=models), held_out.source)
        lhs = mse(fused.data, held_out.target.data)
        rhs = np.mean([mse(per_view[a].data, held_out.target.data) for a in Axis])
        assert lhs <= rhs + 1e-9
