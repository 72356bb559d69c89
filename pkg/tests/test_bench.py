"""Stationary-field sampler statistics and the domain-comparison experiments."""

import numpy as np
import pytest

from falq.bench import (
    StationaryFieldSpec,
    compare_domains,
    domain_experiment,
    gen_stationary_field,
    quantizer_ablation,
    tail_ratio_check,
)
from falq.errors import ParamError
from falq.polarquant import polar_quantize, qim_quantize, wrap_phase
from falq.spectral import forward_dft2


def _fields(d1, d2, rho, n_seeds, seed0=0):
    return np.stack(
        [
            gen_stationary_field(StationaryFieldSpec(d1, d2, rho, seed0 + s))
            for s in range(n_seeds)
        ]
    )


class TestFieldSampler:
    def test_deterministic(self):
        spec = StationaryFieldSpec(16, 16, 0.7, seed=42)
        a = gen_stationary_field(spec)
        b = gen_stationary_field(spec)
        assert np.array_equal(a, b)

    def test_rho_validation(self):
        with pytest.raises(ParamError):
            StationaryFieldSpec(8, 8, 0.0)
        with pytest.raises(ParamError):
            StationaryFieldSpec(8, 8, 1.0)

    def test_variance_is_unit(self):
        fields = _fields(16, 16, 0.5, 400)
        var = fields.var()
        assert abs(var - 1.0) < 0.05

    def test_lag_one_correlation_strong_rho(self):
        rho = 0.9
        fields = _fields(32, 32, rho, 500)
        x = fields[:, :, :-1].ravel()
        y = fields[:, :, 1:].ravel()
        corr = np.corrcoef(x, y)[0, 1]
        se = 3.0 / np.sqrt(500)
        assert abs(corr - rho) < 3 * se

    def test_near_independence_small_rho(self):
        fields = _fields(32, 32, 1e-4, 500)
        x = fields[:, :, :-1].ravel()
        y = fields[:, :, 1:].ravel()
        corr = np.corrcoef(x, y)[0, 1]
        assert abs(corr) < 0.01

    def test_covariance_matches_model_at_random_pairs(self):
        rho = 0.6
        d = 24
        fields = _fields(d, d, rho, 500)
        rng = np.random.default_rng(123)
        for _ in range(20):
            m, n, mp, np_ = rng.integers(0, d, size=4)
            emp = np.mean(fields[:, m, n] * fields[:, mp, np_])
            model = rho ** (abs(int(m) - int(mp)) + abs(int(n) - int(np_)))
            se = np.std(fields[:, m, n] * fields[:, mp, np_]) / np.sqrt(500)
            assert abs(emp - model) <= 3 * se + 1e-12


class TestCompareDomains:
    def test_spatial_rank_one(self):
        rng = np.random.default_rng(0)
        W = np.outer(rng.standard_normal(16), rng.standard_normal(16))
        report = compare_domains(W, rank=2, target_rel=0.01)
        assert report.spatial_min_rank == 1
        # outer products transform to outer products: rank one there too
        assert report.freq_min_rank == 1

    def test_constructed_frequency_rank_one(self):
        rng = np.random.default_rng(1)
        W = np.outer(rng.standard_normal(12), rng.standard_normal(14))
        half = forward_dft2(W).data
        s = np.linalg.svd(half, compute_uv=False)
        assert s[1] <= 1e-10 * s[0]
        assert compare_domains(W, 1, 0.01).freq_min_rank == 1

    def test_errors_decrease_with_rank(self):
        W = gen_stationary_field(StationaryFieldSpec(32, 32, 0.8, seed=7))
        errs = [compare_domains(W, r, 0.01).freq_err for r in (2, 4, 8)]
        assert errs[0] >= errs[1] >= errs[2]

    def test_strong_correlation_favors_frequency_domain(self):
        wins = 0
        for seed in range(20):
            W = gen_stationary_field(StationaryFieldSpec(64, 64, 0.95, seed))
            report = compare_domains(W, rank=8, target_rel=0.01)
            wins += report.freq_err < report.spatial_err
        assert wins >= 18

    def test_fair_params_flag(self):
        W = gen_stationary_field(StationaryFieldSpec(32, 32, 0.9, seed=3))
        plain = compare_domains(W, rank=8, target_rel=0.01)
        fair = compare_domains(W, rank=8, target_rel=0.01, fair_params=True)
        assert fair.freq_min_rank == 2 * plain.freq_min_rank
        assert fair.freq_err >= plain.freq_err


class TestDomainExperiment:
    def test_seed_order_independent_of_jobs(self):
        spec = StationaryFieldSpec(24, 24, 0.8, seed=5)
        serial, sum1 = domain_experiment(spec, rank=4, target_rel=0.01, n_seeds=8)
        threaded, sum2 = domain_experiment(
            spec, rank=4, target_rel=0.01, n_seeds=8, jobs=4
        )
        assert [r.seed for r in serial] == [r.seed for r in threaded]
        assert [r.freq_err for r in serial] == [r.freq_err for r in threaded]
        assert sum1 == sum2


class TestTailRatio:
    def test_bound_value(self):
        got = tail_ratio_check(StationaryFieldSpec(16, 16, 0.5, 0), rank=2, n_seeds=3)
        assert got["bound"] == pytest.approx(0.25 / 0.5625)

    def test_moderate_rho_passes(self):
        got = tail_ratio_check(StationaryFieldSpec(64, 64, 0.7, 0), rank=8, n_seeds=25)
        assert got["passed"]
        assert got["mean_ratio"] <= got["bound"] + 2 * got["std_err"]

    def test_reports_fields(self):
        got = tail_ratio_check(StationaryFieldSpec(32, 32, 0.5, 0), rank=4, n_seeds=10)
        assert set(got) == {
            "rho", "rank", "n_seeds", "mean_ratio", "std_err", "bound", "passed"
        }
        assert got["mean_ratio"] > 0
        assert got["std_err"] > 0


class TestQuantizerAblation:
    def test_zero_residual(self):
        # a rank-1 field has a zero residual after rank-1 truncation
        rng = np.random.default_rng(2)
        W = np.outer(rng.standard_normal(8), rng.standard_normal(8))
        rows = quantizer_ablation(W, rank=1, amp_bits=4, phase_bits=4)
        for row in rows:
            assert row["reconstruction_rel_err"] == pytest.approx(0.0, abs=1e-6)

    def test_pure_phase_residual_bounds(self):
        rng = np.random.default_rng(3)
        theta = rng.uniform(-np.pi, np.pi, size=(16, 9))
        residual = np.exp(1j * theta)
        code = polar_quantize(residual, 4, 4)
        polar_err = wrap_phase(
            theta - (code.phase_idx * code.phase_step - np.pi)
        )
        assert np.abs(polar_err).max() <= code.phase_step / 2 + 1e-12

    def test_qim_phase_error_unbounded_near_origin(self):
        # entries much smaller than the per-part grid step lose their phase
        # under the per-part baseline; the polar codec still bounds it
        rng = np.random.default_rng(4)
        theta = rng.uniform(-np.pi, np.pi, size=(8, 8))
        amp = np.full((8, 8), 1e-4)
        amp[0, 0] = 1.0  # sets the grid scale
        residual = amp * np.exp(1j * theta)
        qim = qim_quantize(residual, 4, 4)
        qim_err = wrap_phase(theta - np.arctan2(qim.imag, qim.real))
        code = polar_quantize(residual, 4, 4)
        polar_err = wrap_phase(
            theta - (code.phase_idx * code.phase_step - np.pi)
        )
        assert np.abs(polar_err).max() <= code.phase_step / 2 + 1e-12
        assert np.abs(qim_err).max() > 1.0

    def test_rows_populated(self):
        W = gen_stationary_field(StationaryFieldSpec(32, 32, 0.8, seed=9))
        rows = quantizer_ablation(W, rank=4, amp_bits=4, phase_bits=4)
        assert [row["scheme"] for row in rows] == ["polar", "qim"]
        for row in rows:
            assert row["reconstruction_rel_err"] > 0
            assert row["mean_abs_phase_err"] > 0
