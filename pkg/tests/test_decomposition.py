"""Truncated SVD, HOSVD and rank selection."""
import numpy as np
import pytest

from modalrepair import (
    RankRule,
    hosvd,
    hosvd_reconstruct,
    mode_product,
    numerical_rank,
    rrmse,
    select_rank,
    svd_reconstruct,
    svd_truncated,
)
from modalrepair.decomposition import TuckerDecomposition


def ortho_defect(w):
    return np.abs(w.T @ w - np.eye(w.shape[1])).max()


def random_rank_r_matrix(j, k, r, seed):
    rng = np.random.default_rng(seed)
    w, _ = np.linalg.qr(rng.normal(size=(j, r)))
    t, _ = np.linalg.qr(rng.normal(size=(k, r)))
    sigma = np.sort(rng.uniform(1.0, 10.0, size=r))[::-1]
    return (w * sigma) @ t.T


class TestRankRule:
    def test_requires_exactly_one_field(self):
        with pytest.raises(ValueError):
            RankRule()
        with pytest.raises(ValueError):
            RankRule(fixed=2, threshold=0.1)
        with pytest.raises(ValueError):
            RankRule(fixed=0)
        with pytest.raises(ValueError):
            RankRule(threshold=1.5)

    def test_threshold_selects_smallest_count(self):
        sigma = np.array([10.0, 1.0, 0.05, 0.001])
        assert select_rank(sigma, RankRule.relative(1e-2)) == 2

    def test_threshold_never_met_keeps_full_rank(self):
        sigma = np.array([10.0, 9.0, 8.0])
        assert select_rank(sigma, RankRule.relative(1e-3)) == 3

    def test_fixed_rank_clamps_with_warning(self):
        sigma = np.array([3.0, 2.0])
        with pytest.warns(UserWarning):
            assert select_rank(sigma, RankRule.fixed_rank(5)) == 2

    def test_zero_spectrum_keeps_one_mode(self):
        assert select_rank(np.zeros(4), RankRule.relative(0.5)) == 1


class TestSVD:
    def test_identity_reconstructs_exactly(self):
        eye = np.eye(5)
        f = svd_truncated(eye, RankRule.fixed_rank(5))
        assert np.allclose(f.sigma, 1.0)
        assert np.allclose(svd_reconstruct(f), eye, atol=1e-12)

    def test_full_rank_reconstruction_error(self):
        rng = np.random.default_rng(5)
        m = rng.normal(size=(10, 8))
        f = svd_truncated(m, RankRule.fixed_rank(8))
        rel = np.linalg.norm(m - svd_reconstruct(f)) / np.linalg.norm(m)
        assert rel < 1e-10

    def test_factor_orthonormality(self):
        m = np.random.default_rng(6).normal(size=(12, 9))
        f = svd_truncated(m, RankRule.fixed_rank(4))
        assert ortho_defect(f.W) < 1e-10
        assert ortho_defect(f.T) < 1e-10

    def test_sigma_non_increasing(self):
        m = np.random.default_rng(7).normal(size=(15, 10))
        f = svd_truncated(m, RankRule.fixed_rank(10))
        assert (np.diff(f.sigma) <= 1e-12).all()

    def test_rejects_nan(self):
        m = np.ones((3, 3))
        m[1, 1] = np.nan
        with pytest.raises(ValueError):
            svd_truncated(m, RankRule.fixed_rank(1))

    def test_sign_convention_is_deterministic(self):
        m = np.random.default_rng(8).normal(size=(9, 9))
        f1 = svd_truncated(m, RankRule.fixed_rank(4))
        f2 = svd_truncated(m.copy(), RankRule.fixed_rank(4))
        assert np.array_equal(f1.W, f2.W)
        lead = np.abs(f1.W).argmax(axis=0)
        assert (f1.W[lead, np.arange(4)] >= 0).all()

    def test_rank_one_outer_product_round_trips(self):
        u = np.array([3.0, 4.0]) / 5.0
        v = np.array([1.0, 0.0, 0.0])
        m = 2.5 * np.outer(u, v)
        f = svd_truncated(m, RankRule.fixed_rank(1))
        assert np.allclose(svd_reconstruct(f), m, atol=1e-14)

    def test_zero_sigma_gives_zero_matrix(self):
        from modalrepair.decomposition import TruncatedSVD

        f = TruncatedSVD(W=np.eye(3, 1), sigma=np.zeros(1), T=np.eye(4, 1))
        assert np.array_equal(svd_reconstruct(f), np.zeros((3, 4)))

    def test_known_rank_matrix_truncates_exactly(self):
        m = random_rank_r_matrix(20, 12, 3, seed=9)
        f = svd_truncated(m, RankRule.fixed_rank(3))
        assert rrmse(m, svd_reconstruct(f)) < 1e-10

    def test_eckart_young_beats_random_subspaces(self):
        rng = np.random.default_rng(10)
        m = rng.normal(size=(20, 15))
        n = 4
        best = np.linalg.norm(m - svd_reconstruct(svd_truncated(m, RankRule.fixed_rank(n))))
        for trial in range(100):
            w, _ = np.linalg.qr(rng.normal(size=(20, n)))
            t, _ = np.linalg.qr(rng.normal(size=(15, n)))
            err = np.linalg.norm(m - w @ (w.T @ m @ t) @ t.T)
            assert best <= err + 1e-12


class TestHOSVD:
    def test_rank_one_tensor_core_is_product_of_norms(self):
        a = np.array([1.0, 2.0, 2.0])
        b = np.array([0.0, 3.0, 4.0, 0.0])
        c = np.array([6.0, 8.0])
        t = np.einsum("i,j,k->ijk", a, b, c)
        dec = hosvd(t, RankRule.fixed_rank(1))
        assert dec.core.shape == (1, 1, 1)
        expected = np.linalg.norm(a) * np.linalg.norm(b) * np.linalg.norm(c)
        assert abs(abs(dec.core[0, 0, 0]) - expected) < 1e-10

    def test_full_rank_round_trip(self):
        t = np.random.default_rng(11).normal(size=(3, 4, 5, 6))
        dec = hosvd(t, RankRule.relative(1e-15))
        rel = np.linalg.norm(hosvd_reconstruct(dec) - t) / np.linalg.norm(t)
        assert rel < 1e-10

    def test_factor_orthonormality(self):
        t = np.random.default_rng(12).normal(size=(3, 4, 5, 6))
        dec = hosvd(t, RankRule.relative(1e-15))
        for w in dec.factors:
            assert ortho_defect(w) < 1e-10

    def test_known_multilinear_rank_truncates_exactly(self):
        rng = np.random.default_rng(13)
        ranks = (2, 2, 2, 2, 3)
        dims = (3, 5, 6, 4, 8)
        core = rng.normal(size=ranks)
        factors = [np.linalg.qr(rng.normal(size=(d, r)))[0] for d, r in zip(dims, ranks)]
        t = core
        for mode, w in enumerate(factors, start=1):
            t = mode_product(t, w, mode)
        dec = hosvd(t, [RankRule.fixed_rank(r) for r in ranks])
        assert rrmse(t, hosvd_reconstruct(dec)) < 1e-8

    def test_identity_factor_decomposition_returns_core(self):
        core = np.random.default_rng(14).normal(size=(2, 3, 4))
        dec = TuckerDecomposition(
            core=core,
            factors=tuple(np.eye(d) for d in core.shape),
            sigmas=(np.ones(2), np.ones(3), np.ones(4)),
        )
        assert np.allclose(hosvd_reconstruct(dec), core, atol=1e-14)

    def test_rejects_nan(self):
        t = np.ones((2, 2, 2))
        t[0, 0, 0] = np.nan
        with pytest.raises(ValueError):
            hosvd(t, RankRule.fixed_rank(1))

    def test_mode_sigmas_invariant_under_other_mode_permutation(self):
        rng = np.random.default_rng(15)
        t = rng.normal(size=(4, 5, 6))
        dec = hosvd(t, RankRule.relative(1e-15))
        perm = rng.permutation(6)
        shuffled = t[:, :, perm]
        dec2 = hosvd(shuffled, RankRule.relative(1e-15))
        for mode in (0, 1):
            s1, s2 = dec.sigmas[mode], dec2.sigmas[mode]
            assert np.abs(s1 - s2).max() < 1e-8 * max(s1[0], 1.0)

    def test_per_mode_rule_count_checked(self):
        t = np.zeros((2, 2, 2))
        with pytest.raises(ValueError):
            hosvd(t, [RankRule.fixed_rank(1)] * 2)


class TestFactorizationSerialization:
    def test_svd_round_trip(self, tmp_path):
        from modalrepair import load_factorization, save_factorization

        m = np.random.default_rng(20).normal(size=(12, 7))
        f = svd_truncated(m, RankRule.fixed_rank(4))
        manifest = save_factorization(tmp_path / "fac", f)
        back = load_factorization(manifest)
        assert np.array_equal(back.W, f.W)
        assert np.array_equal(back.T, f.T)
        assert np.allclose(back.sigma, f.sigma, atol=1e-15)
        assert np.allclose(svd_reconstruct(back), svd_reconstruct(f), atol=1e-14)

    def test_tucker_round_trip(self, tmp_path):
        from modalrepair import load_factorization, save_factorization

        t = np.random.default_rng(21).normal(size=(3, 4, 5))
        dec = hosvd(t, RankRule.fixed_rank(2))
        manifest = save_factorization(tmp_path / "fac", dec)
        back = load_factorization(manifest)
        assert back.ranks == dec.ranks
        assert np.array_equal(back.core, dec.core)
        for a, b in zip(back.factors, dec.factors):
            assert np.array_equal(a, b)
        assert np.allclose(hosvd_reconstruct(back), hosvd_reconstruct(dec), atol=1e-14)


def test_mode_product_validates_shapes():
    t = np.zeros((2, 3, 4))
    with pytest.raises(ValueError):
        mode_product(t, np.zeros((5, 5)), 2)
    with pytest.raises(ValueError):
        mode_product(t, np.zeros((2, 2)), 4)


def test_numerical_rank_ignores_noise_floor():
    sigma = np.array([1.0, 0.5, 1e-14, 1e-16])
    assert numerical_rank(sigma) == 2
