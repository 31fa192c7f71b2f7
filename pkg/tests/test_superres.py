"""Placement, initial interpolation and the enhancement loop."""
import numpy as np
import pytest

from modalrepair import (
    RankRule,
    SuperresConfig,
    WaveMode,
    WaveSpec,
    downsample,
    generate_cylinder_like,
    interpolate_initial,
    place_on_target,
    rrmse,
    superresolve,
)


def wake_rank2(grid=(64, 32), k=100):
    spec = WaveSpec(
        modes=(WaveMode(1.0, (2.0, 0.0), 2.2),),
        grid=grid,
        n_snapshots=k,
        dt=0.06,
        extents=(4.0, 1.0),
        envelope_width=0.35,
        mean_flow=0.0,
    )
    return generate_cylinder_like(spec)


class TestPlacement:
    def test_identity_target_has_no_gaps(self):
        ds = np.random.default_rng(0).normal(size=(1, 6, 4, 3))
        cfg = SuperresConfig(target_dims=(6, 4), rank_rule=RankRule.fixed_rank(1))
        base, mask = place_on_target(ds, cfg)
        assert not mask.any()
        assert np.array_equal(base, ds)

    def test_stride_two_positions(self):
        ds = np.arange(4.0).reshape(1, 4, 1)
        cfg = SuperresConfig(target_dims=(8,), strides=(2,), rank_rule=RankRule.fixed_rank(1))
        base, mask = place_on_target(ds, cfg)
        assert np.array_equal(base[0, ::2, 0], [0.0, 1.0, 2.0, 3.0])
        assert np.isnan(base[0, 1::2, 0]).all()
        assert mask.sum() == 4

    def test_counts_for_quarter_resolution(self):
        ds = np.ones((1, 25, 10, 1))
        cfg = SuperresConfig(target_dims=(100, 40), rank_rule=RankRule.fixed_rank(1))
        base, mask = place_on_target(ds, cfg)
        assert (~mask).sum() == 250
        assert mask.sum() == 3750

    def test_default_stride_is_floor_division(self):
        ds = np.ones((1, 5, 1))
        cfg = SuperresConfig(target_dims=(11,), rank_rule=RankRule.fixed_rank(1))
        base, _ = place_on_target(ds, cfg)
        assert np.isfinite(base[0, [0, 2, 4, 6, 8], 0]).all()
        assert np.isnan(base[0, [1, 3, 5, 7, 9, 10], 0]).all()

    def test_out_of_range_placement_rejected(self):
        ds = np.ones((1, 5, 1))
        cfg = SuperresConfig(target_dims=(8,), strides=(2,), rank_rule=RankRule.fixed_rank(1))
        with pytest.raises(ValueError):
            place_on_target(ds, cfg)

    def test_target_smaller_than_source_rejected(self):
        ds = np.ones((1, 8, 1))
        cfg = SuperresConfig(target_dims=(4,), rank_rule=RankRule.fixed_rank(1))
        with pytest.raises(ValueError):
            place_on_target(ds, cfg)


class TestInterpolateInitial:
    def test_constant_field_fills_constant(self):
        ds = np.full((1, 4, 4, 2), 7.5)
        cfg = SuperresConfig(target_dims=(8, 8), strides=(2, 2), rank_rule=RankRule.fixed_rank(1))
        base, mask = place_on_target(ds, cfg)
        filled = interpolate_initial(base, mask)
        assert np.allclose(filled, 7.5, atol=1e-12)

    def test_affine_field_exact_inside_hull(self):
        n = 17
        xx, yy = np.meshgrid(np.arange(n, dtype=float), np.arange(n, dtype=float), indexing="ij")
        truth = (1.25 * xx - 0.75 * yy + 2.0)[np.newaxis, :, :, np.newaxis]
        ds = downsample(truth, (4, 4))
        cfg = SuperresConfig(target_dims=(n, n), strides=(4, 4), rank_rule=RankRule.fixed_rank(1))
        base, mask = place_on_target(ds, cfg)
        filled = interpolate_initial(base, mask)
        assert np.allclose(filled, truth, atol=1e-10)

    def test_sine_product_fill_error_within_analytic_bound(self):
        n = 33
        x = np.linspace(0.0, 1.0, n)
        truth = np.outer(np.sin(np.pi * x), np.sin(np.pi * x))[np.newaxis, :, :, np.newaxis]
        ds = downsample(truth, (4, 4))
        cfg = SuperresConfig(target_dims=(n, n), strides=(4, 4), rank_rule=RankRule.fixed_rank(1))
        base, mask = place_on_target(ds, cfg)
        filled = interpolate_initial(base, mask)
        h = x[4] - x[0]
        bound = h * h * np.pi**2 / 8
        # second-order bound plus an equal margin covers the diagonal-split
        # triangles (observed max error 0.0381 for this grid)
        assert np.abs(filled - truth)[mask].max() < bound + bound

    def test_mask_shape_checked(self):
        with pytest.raises(ValueError):
            interpolate_initial(np.zeros((1, 4, 2)), np.zeros((1, 4, 3), bool))


class TestSuperresolve:
    def test_identity_target_returns_input(self):
        ds = np.random.default_rng(1).normal(size=(1, 6, 4, 3))
        cfg = SuperresConfig(target_dims=(6, 4), rank_rule=RankRule.fixed_rank(2))
        res = superresolve(ds, cfg)
        assert res.iterations == 0
        assert res.converged
        assert np.array_equal(res.repaired, ds)

    def test_rank2_wake_beats_interpolation(self):
        truth = wake_rank2(grid=(48, 24), k=60)
        ds = downsample(truth, (4, 4))
        cfg = SuperresConfig(target_dims=(48, 24), strides=(4, 4), rank_rule=RankRule.fixed_rank(2))
        base, mask = place_on_target(ds, cfg)
        interp = interpolate_initial(base, mask)
        res = superresolve(ds, cfg)
        assert res.converged
        assert rrmse(truth, res.repaired) < rrmse(truth, interp)

    def test_placed_values_bit_identical(self):
        truth = wake_rank2(grid=(32, 16), k=30)
        ds = downsample(truth, (2, 2))
        cfg = SuperresConfig(target_dims=(32, 16), strides=(2, 2), rank_rule=RankRule.fixed_rank(2))
        res = superresolve(ds, cfg)
        _, mask = place_on_target(ds, cfg)
        assert np.array_equal(res.repaired[~mask], truth[::1][~mask])

    def test_output_dims_match_target(self):
        ds = wake_rank2(grid=(16, 8), k=10)
        cfg = SuperresConfig(target_dims=(33, 17), strides=(2, 2), rank_rule=RankRule.fixed_rank(2))
        res = superresolve(ds, cfg)
        assert res.repaired.shape == (1, 33, 17, 10)

    def test_constant_in_time_matches_interpolation(self):
        profile = np.add.outer(np.sin(np.linspace(0, 3, 24)), np.cos(np.linspace(0, 2, 16)))
        truth = np.repeat(profile[np.newaxis, :, :, np.newaxis], 12, axis=-1)
        ds = downsample(truth, (2, 2))
        rules = (
            RankRule.fixed_rank(1),
            RankRule.fixed_rank(24),
            RankRule.fixed_rank(16),
            RankRule.fixed_rank(1),
        )
        cfg = SuperresConfig(target_dims=(24, 16), strides=(2, 2), rank_rule=rules)
        base, mask = place_on_target(ds, cfg)
        interp = interpolate_initial(base, mask)
        res = superresolve(ds, cfg)
        assert res.converged
        assert np.abs(res.repaired - interp).max() < 1e-8

    def test_zeros_init_never_beats_interp_on_clean_wake(self):
        truth = wake_rank2(grid=(32, 16), k=40)
        ds = downsample(truth, (4, 4))
        base_cfg = dict(target_dims=(32, 16), strides=(4, 4), rank_rule=RankRule.fixed_rank(2))
        res_interp = superresolve(ds, SuperresConfig(**base_cfg))
        res_zeros = superresolve(ds, SuperresConfig(init_strategy="zeros", **base_cfg))
        assert rrmse(truth, res_interp.repaired) <= rrmse(truth, res_zeros.repaired)

    def test_enhance_time_doubles_snapshots(self):
        truth = wake_rank2(grid=(16, 8), k=9)
        ds = downsample(truth, (2, 2))
        cfg = SuperresConfig(
            target_dims=(16, 8),
            strides=(2, 2),
            rank_rule=RankRule.fixed_rank(2),
            enhance_time=True,
        )
        res = superresolve(ds, cfg)
        assert res.repaired.shape == (1, 16, 8, 17)
        assert np.isfinite(res.repaired).all()

    def test_rejects_nan_input(self):
        ds = np.ones((1, 4, 4, 2))
        ds[0, 1, 1, 0] = np.nan
        cfg = SuperresConfig(target_dims=(8, 8), rank_rule=RankRule.fixed_rank(1))
        with pytest.raises(ValueError):
            superresolve(ds, cfg)
