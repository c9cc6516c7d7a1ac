"""Tests for Poisson field sampling, hard-core thinning, and neighbor stats."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from crinterf.errors import ConfigurationError, DomainError, InsufficientDataError
from crinterf.pointproc import (
    AnnulusRegion,
    PointSet,
    interior_mask,
    matern_hardcore_thin,
    nearest_neighbor_distances,
    retaining_probability,
    sample_poisson_annulus,
)


def _brute_force_thin(xy, marks, d_min):
    """Quadratic-time reference for the mark-comparison thinning rule."""
    n = xy.shape[0]
    keep = np.ones(n, dtype=bool)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            if np.hypot(*(xy[i] - xy[j])) <= d_min:
                if marks[j] < marks[i] or (marks[j] == marks[i] and j < i):
                    keep[i] = False
                    break
    return keep


class TestAnnulusRegion:
    def test_area(self):
        reg = AnnulusRegion(100.0, 1000.0)
        assert reg.area == pytest.approx(np.pi * (1000.0**2 - 100.0**2))

    def test_degenerate_rejected(self):
        with pytest.raises(ConfigurationError):
            AnnulusRegion(100.0, 100.0)
        with pytest.raises(ConfigurationError):
            AnnulusRegion(-1.0, 100.0)
        with pytest.raises(ConfigurationError):
            AnnulusRegion(1.0, np.inf)


class TestPoissonSampling:
    def test_zero_density_empty(self):
        ps = sample_poisson_annulus(0.0, AnnulusRegion(10.0, 100.0), seed=1)
        assert ps.count == 0

    def test_negative_density_rejected(self):
        with pytest.raises(DomainError):
            sample_poisson_annulus(-1e-4, AnnulusRegion(10.0, 100.0), seed=1)

    def test_mean_count(self):
        lam, reg = 3e-4, AnnulusRegion(100.0, 1000.0)
        rng = np.random.default_rng(42)
        counts = [sample_poisson_annulus(lam, reg, rng).count for _ in range(500)]
        want = lam * reg.area  # ~933
        se = np.sqrt(want / 500.0)
        assert abs(np.mean(counts) - want) < 3.0 * se

    def test_points_inside_region(self):
        reg = AnnulusRegion(50.0, 300.0)
        ps = sample_poisson_annulus(1e-3, reg, seed=7)
        r = ps.radii
        assert np.all(r >= reg.inner_radius) and np.all(r <= reg.outer_radius)

    def test_count_distribution_poisson(self):
        lam, reg = 3e-4, AnnulusRegion(100.0, 300.0)
        mean = lam * reg.area  # ~75
        rng = np.random.default_rng(5)
        counts = np.array(
            [sample_poisson_annulus(lam, reg, rng).count for _ in range(10**4)]
        )
        lo, hi = int(stats.poisson.ppf(1e-4, mean)), int(stats.poisson.ppf(1 - 1e-4, mean))
        edges = np.arange(lo, hi + 2)
        observed = np.histogram(counts, bins=edges)[0].astype(float)
        expected = stats.poisson.pmf(edges[:-1], mean) * counts.size
        # fold the open tails into the end bins, then merge thin bins
        expected[0] += stats.poisson.cdf(lo - 1, mean) * counts.size
        expected[-1] += stats.poisson.sf(hi, mean) * counts.size
        observed[0] += np.sum(counts < lo)
        observed[-1] += np.sum(counts > hi)
        keep = expected >= 5.0
        obs = np.concatenate([observed[keep], [observed[~keep].sum()]])
        exp = np.concatenate([expected[keep], [expected[~keep].sum()]])
        chi2 = np.sum((obs - exp) ** 2 / exp)
        p = stats.chi2.sf(chi2, obs.size - 1)
        assert p > 0.01

    def test_radial_density(self):
        reg = AnnulusRegion(100.0, 1000.0)
        ps = sample_poisson_annulus(3e-4, reg, seed=11)
        R2, L2 = reg.inner_radius**2, reg.outer_radius**2
        cdf = lambda x: (x**2 - R2) / (L2 - R2)
        assert stats.kstest(ps.radii, cdf).pvalue > 0.01


class TestMaternThinning:
    def test_zero_dmin_retains_all(self):
        ps = sample_poisson_annulus(1e-3, AnnulusRegion(10.0, 200.0), seed=3, with_marks=True)
        out = matern_hardcore_thin(ps, 0.0)
        assert out.count == ps.count

    def test_single_point_retained(self):
        ps = PointSet(np.array([[5.0, 5.0]]), np.array([0.5]))
        assert matern_hardcore_thin(ps, 10.0).count == 1

    def test_empty_input(self):
        out = matern_hardcore_thin(PointSet(np.empty((0, 2))), 10.0, seed=0)
        assert out.count == 0

    def test_pairwise_separation(self):
        ps = sample_poisson_annulus(3e-4, AnnulusRegion(100.0, 800.0), seed=9, with_marks=True)
        out = matern_hardcore_thin(ps, 20.0)
        assert out.count >= 2
        assert nearest_neighbor_distances(out).min() >= 20.0

    def test_matches_brute_force(self):
        rng = np.random.default_rng(17)
        for _ in range(20):
            n = rng.integers(2, 80)
            xy = rng.uniform(0.0, 100.0, (n, 2))
            marks = rng.uniform(0.0, 1.0, n)
            got = matern_hardcore_thin(PointSet(xy, marks), 15.0)
            keep = _brute_force_thin(xy, marks, 15.0)
            np.testing.assert_array_equal(got.xy, xy[keep])

    def test_mark_tie_keeps_lower_index(self):
        xy = np.array([[0.0, 0.0], [1.0, 0.0]])
        marks = np.array([0.5, 0.5])
        out = matern_hardcore_thin(PointSet(xy, marks), 5.0)
        np.testing.assert_array_equal(out.xy, xy[:1])

    def test_retained_fraction(self):
        # interior retention over many realizations vs the closed form
        lam, d = 3e-4, 20.0
        reg = AnnulusRegion(100.0, 1000.0)
        rng = np.random.default_rng(23)
        kept = tot = 0
        for _ in range(500):
            ps = sample_poisson_annulus(lam, reg, rng, with_marks=True)
            out = matern_hardcore_thin(ps, d)
            inner = interior_mask(ps, reg, d)
            tot += inner.sum()
            kept_r = interior_mask(out, reg, d)
            kept += kept_r.sum()
        q = retaining_probability(lam, d)
        se = np.sqrt(q * (1.0 - q) / tot)
        assert abs(kept / tot - q) < 4.0 * se
        assert kept / tot == pytest.approx(0.833, abs=0.01)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10**6), st.floats(0.0, 40.0))
    def test_thinning_invariants(self, seed, d_min):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(0, 60))
        xy = rng.uniform(-50.0, 50.0, (n, 2))
        marks = rng.uniform(0.0, 1.0, n)
        out = matern_hardcore_thin(PointSet(xy, marks), d_min)
        # survivors are a subset of parents
        assert out.count <= n
        if out.count:
            parent_rows = {tuple(row) for row in xy}
            assert all(tuple(row) in parent_rows for row in out.xy)
        # hard-core property
        if out.count >= 2:
            d = nearest_neighbor_distances(out)
            assert d.min() >= d_min


class TestNearestNeighbor:
    def test_two_points(self):
        ps = PointSet(np.array([[0.0, 0.0], [3.0, 4.0]]))
        np.testing.assert_allclose(nearest_neighbor_distances(ps), [5.0, 5.0])

    def test_single_point_errors(self):
        with pytest.raises(InsufficientDataError):
            nearest_neighbor_distances(PointSet(np.array([[1.0, 2.0]])))

    def test_poisson_nn_law(self):
        # interior NN distances follow 1 - exp(-lam*pi*x^2)
        lam = 3e-4
        reg = AnnulusRegion(100.0, 6000.0)
        ps = sample_poisson_annulus(lam, reg, seed=29)
        d = nearest_neighbor_distances(ps)
        inner = interior_mask(ps, reg, 90.0)
        assert inner.sum() > 10**4
        cdf = lambda x: 1.0 - np.exp(-lam * np.pi * x**2)
        assert stats.kstest(d[inner], cdf).pvalue > 0.01


class TestRetainingProbability:
    def test_limit_one(self):
        assert retaining_probability(3e-4, 0.0) == 1.0
        assert retaining_probability(0.0, 20.0) == 1.0

    def test_small_x_continuity(self):
        assert retaining_probability(1e-12, 1e-3) == pytest.approx(1.0, abs=1e-9)

    def test_large_x_asymptote(self):
        lam, d = 0.1, 50.0
        x = lam * np.pi * d**2
        assert retaining_probability(lam, d) == pytest.approx(1.0 / x, rel=1e-12)

    def test_reference_value(self):
        q = retaining_probability(3e-4, 20.0)
        x = 3e-4 * np.pi * 400.0
        assert q == pytest.approx((1.0 - np.exp(-x)) / x, rel=1e-12)
        assert q == pytest.approx(0.833, abs=5e-4)

    def test_in_unit_interval(self):
        for lam, d in [(1e-5, 5.0), (3e-4, 20.0), (0.05, 100.0)]:
            assert 0.0 < retaining_probability(lam, d) < 1.0

    def test_negative_rejected(self):
        with pytest.raises(DomainError):
            retaining_probability(-1.0, 1.0)
