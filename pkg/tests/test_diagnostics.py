"""Diagnostics tests: norms, fits, plane quadrature, far-field checks."""

import io
import math

import numpy as np
import pytest

from sqgkit.diagnostics import (
    AnnulusSpec,
    DiagnosticsRecord,
    InitSpec,
    QuadratureFailure,
    bounded_series_check,
    farfield_ratio_check,
    energy_balance_defects,
    fit_decay_exponent,
    image_budget,
    l2_log_check,
    linear_farfield_check,
    linear_part_r2,
    records_from_csv,
    records_to_csv,
    sobolev_seminorm,
    cancellation_check,
    nonlinear_remainder_check,
    weighted_image_budget,
    weighted_lq_norm,
    weighted_sup_norm,
    wgrad_check,
    RECORD_COLUMNS,
)
from sqgkit.kernel import kernel_eval_radial, tail_limit_check
from sqgkit.solver import Snapshot, SolverConfig, linear_evolve, make_initial, run
from sqgkit.spectral import Field, Grid


@pytest.fixture(scope="module")
def small_run():
    cfg = SolverConfig(
        alpha=1.0, N=64, L=10.0, t_end=2.0, amplitude=1e-2, width=1.0,
        checkpoints=(0.25, 0.5, 1.0, 1.5, 2.0),
    )
    from sqgkit.kernel import build_profile

    profile = build_profile(1.0, r_max=60.0)
    snaps, records = run(cfg, profile=profile)
    return cfg, profile, snaps, records


class TestAnnulus:
    def test_validation(self):
        with pytest.raises(ValueError):
            AnnulusSpec(5.0, 5.0)
        with pytest.raises(ValueError):
            AnnulusSpec(0.0, 5.0)

    def test_empty_annulus_rejected(self):
        grid = Grid(16, 1.0)
        f = Field(grid, np.ones((16, 16)))
        with pytest.raises(ValueError):
            weighted_sup_norm(f, 1.0, AnnulusSpec(0.001, 0.002))

    def test_annulus_beyond_box_rejected(self):
        grid = Grid(16, 1.0)
        f = Field(grid, np.ones((16, 16)))
        with pytest.raises(ValueError):
            weighted_sup_norm(f, 1.0, AnnulusSpec(0.5, 3.0))


class TestWeightedNorms:
    def test_sup_zero_field(self):
        grid = Grid(32, 10.0)
        assert weighted_sup_norm(Field(grid, np.zeros((32, 32))), 3.0, AnnulusSpec(2.0, 5.0)) == 0.0

    def test_sup_weight_zero_is_plain_sup(self):
        grid = Grid(32, 10.0)
        rng = np.random.default_rng(0)
        f = Field(grid, rng.standard_normal((32, 32)))
        ann = AnnulusSpec(2.0, 5.0)
        sel = ann.mask(grid)
        assert weighted_sup_norm(f, 0.0, ann) == np.max(np.abs(f.data[sel]))

    def test_sup_of_kernel_approaches_tail_constant(self, profile_a1):
        grid = Grid(256, 40.0)
        r = grid.radius()
        f = Field(grid, kernel_eval_radial(profile_a1, 1.0, r))
        got = weighted_sup_norm(f, 3.0, AnnulusSpec(5.0, 20.0))
        # |x|^(2+a) G -> C_a from below, so the sup sits at the outer rim
        assert got == pytest.approx(profile_a1.c_alpha, rel=5e-3)

    def test_lq_constant_field(self):
        grid = Grid(64, 3.0)
        f = Field(grid, np.full((64, 64), 2.0))
        assert weighted_lq_norm(f, 0.0, 4.0) == pytest.approx(2.0 * 6.0 ** (2.0 / 4.0), rel=1e-12)

    def test_lq_q2_matches_l2(self):
        from sqgkit.spectral import l2_norm

        grid = Grid(64, 3.0)
        rng = np.random.default_rng(4)
        f = Field(grid, rng.standard_normal((64, 64)))
        assert weighted_lq_norm(f, 0.0, 2.0) == pytest.approx(l2_norm(f), rel=1e-12)

    def test_lq_gaussian_moment_closed_form(self):
        # || |x|^2 exp(-r^2/w^2) ||_4^4 = 2 pi * integral r^9 exp(-4 r^2/w^2) dr
        grid = Grid(512, 16.0)
        w = 1.3
        r = grid.radius()
        f = Field(grid, np.exp(-(r / w) ** 2))
        a = 4.0 / w**2
        integral = 2.0 * math.pi * (math.factorial(4) / (2.0 * a**5))
        assert weighted_lq_norm(f, 2.0, 4.0) == pytest.approx(integral**0.25, rel=1e-6)

    def test_annulus_region(self):
        grid = Grid(64, 10.0)
        f = Field(grid, np.ones((64, 64)))
        ann = AnnulusSpec(2.0, 5.0)
        full = weighted_lq_norm(f, 0.0, 2.0)
        part = weighted_lq_norm(f, 0.0, 2.0, region=ann)
        assert part < full


class TestSobolev:
    def test_single_mode(self):
        grid = Grid(64, np.pi)
        x, _ = grid.meshgrid()
        f = Field(grid, np.cos(2.0 * x))
        assert sobolev_seminorm(f, 3.0) == pytest.approx(8.0 * sobolev_seminorm(f, 0.0), rel=1e-12)

    def test_sigma_zero_is_l2(self):
        from sqgkit.spectral import l2_norm

        grid = Grid(64, 2.0)
        rng = np.random.default_rng(8)
        f = Field(grid, rng.standard_normal((64, 64)))
        assert sobolev_seminorm(f, 0.0) == pytest.approx(l2_norm(f), rel=1e-12)

    def test_gaussian_ratio(self):
        # ||grad g||_2 / ||g||_2 = sqrt(2)/w for g = exp(-r^2/w^2)
        grid = Grid(256, 12.0)
        w = 1.5
        r = grid.radius()
        f = Field(grid, np.exp(-(r / w) ** 2))
        ratio = sobolev_seminorm(f, 1.0) / sobolev_seminorm(f, 0.0)
        assert ratio == pytest.approx(math.sqrt(2.0) / w, rel=1e-8)


class TestRateFit:
    def test_exact_power_law(self):
        t = np.geomspace(0.5, 50.0, 20)
        fit = fit_decay_exponent(t, (1.0 + t) ** -2, (0.5, 50.0))
        assert fit.exponent == pytest.approx(-2.0, abs=1e-12)
        assert fit.residual_rms <= 1e-13

    def test_scaled_growth(self):
        t = np.geomspace(1.0, 100.0, 15)
        fit = fit_decay_exponent(t, 3.0 * (1.0 + t) ** 0.5, (1.0, 100.0))
        assert fit.exponent == pytest.approx(0.5, abs=1e-12)
        assert fit.intercept == pytest.approx(math.log(3.0), abs=1e-10)

    def test_nonpositive_values_listed(self):
        t = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
        v = np.array([1.0, -1.0, 1.0, 0.0, 1.0])
        with pytest.raises(ValueError) as err:
            fit_decay_exponent(t, v, (1.0, 5.0))
        assert "2" in str(err.value) and "4" in str(err.value)

    def test_window_needs_five_points(self):
        t = np.array([1.0, 2.0, 3.0, 4.0])
        with pytest.raises(ValueError, match="5"):
            fit_decay_exponent(t, np.ones(4), (1.0, 4.0))


class TestPlaneQuadrature:
    def test_short_time_approximate_identity(self, profile_a1):
        spec = InitSpec.gaussian(1e-2, 1.0, (0.0, 0.0))
        pts = np.array([[0.0, 0.0], [0.7, 0.3], [1.5, 0.0]])
        vals = np.atleast_1d(linear_part_r2(spec, profile_a1, 1e-3, pts))
        exact = spec.evaluate(pts[:, 0], pts[:, 1])
        assert np.max(np.abs(vals - exact)) <= 1e-4

    def test_cross_check_against_torus(self, profile_a1):
        cfg = SolverConfig(alpha=1.0, N=256, L=40.0, t_end=2.0, amplitude=1e-2, width=1.0)
        theta0 = make_initial(cfg)
        spec = InitSpec.gaussian(1e-2, 1.0, (0.0, 0.0))
        lin = linear_evolve(theta0, 2.0, 1.0)
        dx = cfg.grid().dx
        radii = np.array([0.0, 2.0, 8.0, 16.0])
        idx = np.round((radii + 40.0) / dx).astype(int)
        pts = np.column_stack([-40.0 + idx * dx, np.zeros_like(radii)])
        plane = np.atleast_1d(linear_part_r2(spec, profile_a1, 2.0, pts))
        torus = lin.data[idx, 128]
        assert np.max(np.abs(plane - torus)) <= 1e-6

    def test_zero_mass_data_decays_faster_than_kernel(self, profile_a1):
        spec = InitSpec.two_bump(1e-2, 1.0, (-1.5, 0.0), (1.5, 0.0))
        radii = np.array([10.0, 20.0, 40.0])
        pts = np.column_stack([radii, np.zeros_like(radii)])
        vals = np.abs(np.atleast_1d(linear_part_r2(spec, profile_a1, 2.0, pts)))
        weighted = vals * radii ** (2.0 + 1.0)
        assert np.all(np.diff(weighted) < 0.0)

    def test_unattainable_tolerance_raises_per_point(self, profile_a1):
        spec = InitSpec.gaussian(1e-2, 1.0, (0.0, 0.0))
        with pytest.raises(QuadratureFailure) as err:
            linear_part_r2(spec, profile_a1, 1e-4, [[0.3, 0.0]], tol=1e-14)
        assert err.value.point == (0.3, 0.0)

    def test_init_spec_mass(self):
        spec = InitSpec.gaussian(1e-2, 1.0, (3.0, 0.0))
        assert spec.mass() == pytest.approx(1e-2 * math.pi, rel=1e-10)
        spec2 = InitSpec.two_bump(1e-2, 1.0, (0.0, 0.0), (2.0, 0.0))
        assert abs(spec2.mass()) <= 1e-12


class TestLemma1:
    def test_growth_exponent_of_offcenter_data(self, profile_a1):
        spec = InitSpec.gaussian(1e-2, 1.0, (1.0, 0.0))
        annulus = AnnulusSpec(5.0, 60.0)
        fit, ts, vals = linear_farfield_check(spec, profile_a1, [1.0, 2.0, 4.0, 8.0, 16.0], annulus)
        assert np.all(vals > 0.0)
        assert 0.6 <= fit.exponent <= 1.4
        # bounded against (1 + t): the claimed envelope
        assert np.all(vals / (1.0 + ts) <= 2.0 * vals[0] / 2.0 + 1.0)


class TestRunDiagnostics:
    def test_cancellation_check_series_and_flags(self, small_run):
        cfg, profile, snaps, records = small_run
        ann = AnnulusSpec(2.5, 5.0)
        result = cancellation_check(snaps, profile, records[0].mass, ann, t_lo=0.25)
        assert result.times.size == len(records)
        assert np.all(result.values >= 0.0)
        assert result.c_empirical > 0.0

    def test_nonlinear_remainder_check_zero_for_linear_run(self, profile_a1):
        cfg = SolverConfig(
            alpha=1.0, N=64, L=10.0, t_end=1.0, amplitude=1e-2, width=1.0,
            linear_only=True, checkpoints=(0.5, 1.0),
        )
        theta0 = make_initial(cfg)
        snaps, _ = run(cfg, profile=profile_a1)
        ts, vals = nonlinear_remainder_check(snaps, theta0, 1.0, AnnulusSpec(2.5, 5.0))
        assert np.max(vals) <= 1e-14

    def test_v_quadratic_amplitude_scaling(self, profile_a1):
        # halving the amplitude divides the nonlinear remainder by ~4
        def v_at(eps):
            cfg = SolverConfig(
                alpha=1.0, N=64, L=10.0, t_end=0.5, amplitude=eps, width=1.0,
                checkpoints=(0.5,),
            )
            theta0 = make_initial(cfg)
            snaps, _ = run(cfg, profile=profile_a1)
            _, vals = nonlinear_remainder_check(snaps, theta0, 1.0, AnnulusSpec(2.5, 5.0))
            return vals[0]

        ratio = v_at(2e-2) / v_at(1e-2)
        assert ratio == pytest.approx(4.0, rel=0.15)

    def test_ratio_reduces_to_tail_ratios_for_kernel_data(self, profile_a1):
        grid = Grid(256, 40.0)
        m0 = 0.05
        t = 2.0
        theta = Field(grid, m0 * kernel_eval_radial(profile_a1, t, grid.radius()))
        snap = Snapshot(t=t, theta=theta, alpha=1.0)
        radii = [10.0, 15.0, 20.0]
        rows = farfield_ratio_check(snap, profile_a1, m0, radii)
        expected = tail_limit_check(profile_a1, t, radii)
        for (r, lo, mean, hi), ref in zip(rows, expected):
            assert mean == pytest.approx(ref, rel=2e-3)
            assert hi - lo <= 5e-3 * ref

    def test_ratio_zero_mass_refused(self, small_run):
        _, profile, snaps, _ = small_run
        with pytest.raises(ValueError, match="zero-mass"):
            farfield_ratio_check(snaps[-1], profile, 0.0, [3.0])

    def test_wgrad_series_and_boundedness_helper(self, small_run):
        _, _, snaps, _ = small_run
        ts, vals = wgrad_check(snaps, p=4.0)
        assert np.all(vals > 0.0)
        assert bounded_series_check(ts, vals, t_lo=0.25)

    def test_l2_log_normalization_branches(self, small_run, profile_a05):
        cfg, profile, snaps, records = small_run
        ann = AnnulusSpec(2.5, 5.0)
        ts, raw, norm1 = l2_log_check(snaps, profile, records[0].mass, ann)
        # alpha = 1: normalizer log(2+t)^(3/2)
        expect = raw / (np.log(2.0 + ts) * np.sqrt(np.log(2.0 + ts)))
        assert np.allclose(norm1, expect)
        # alpha = 0.5 branch: normalizer sqrt(log(2+t)) only
        ts2, raw2, norm2 = l2_log_check(snaps, profile_a05, records[0].mass, ann)
        assert np.allclose(norm2, raw2 / np.sqrt(np.log(2.0 + ts2)))

    def test_image_budgets(self, profile_a1):
        b = image_budget(profile_a1, 2.0, 40.0, 20.0)
        assert b == pytest.approx(profile_a1.c_alpha * 2.0 * 60.0**-3, rel=1e-12)
        wb = weighted_image_budget(profile_a1, 2.0, 40.0, 20.0, 0.03)
        assert wb > 0.0


class TestReductionConsistency:
    def test_torus_cancellation_matches_plane_quadrature(self, profile_a1):
        # on a linear-only run the annulus cancellation norm computed from
        # grid snapshots must agree with the image-free plane quadrature,
        # within quadrature/sampling slack plus the periodic-image budget
        t_list = [1.0, 2.0, 3.0, 5.0, 10.0]
        cfg = SolverConfig(
            alpha=1.0, N=256, L=40.0, t_end=10.0, amplitude=1e-2, width=1.0,
            centers=((1.0, 0.0),), linear_only=True, checkpoints=tuple(t_list),
        )
        snaps, records = run(cfg, profile=profile_a1)
        ann = AnnulusSpec(5.0, 20.0)
        torus = cancellation_check(snaps, profile_a1, records[0].mass, ann, t_lo=1.0)
        spec = InitSpec.gaussian(1e-2, 1.0, (1.0, 0.0))
        _, ts, plane = linear_farfield_check(spec, profile_a1, t_list, ann)
        for t, a_torus, a_plane in zip(ts, torus.values, plane):
            budget = weighted_image_budget(profile_a1, t, cfg.L, ann.r_max, records[0].mass)
            assert abs(a_torus - a_plane) <= 0.05 * a_plane + budget


class TestRecords:
    def test_checkpoint_record_nonnegative(self, small_run):
        _, _, _, records = small_run
        for rec in records:
            for attr in ("linf", "l2", "h_sigma", "wq", "annulus_cancel", "v_weighted", "wgrad", "l2_weighted"):
                assert getattr(rec, attr) >= 0.0

    def test_csv_round_trip_and_column_order(self, small_run):
        _, _, _, records = small_run
        buf = io.StringIO()
        records_to_csv(records, buf)
        text = buf.getvalue()
        assert text.splitlines()[0] == ",".join(RECORD_COLUMNS)
        buf.seek(0)
        again = records_from_csv(buf)
        assert len(again) == len(records)
        for a, b in zip(records, again):
            assert a.t == b.t and a.linf == b.linf and a.l2_weighted == b.l2_weighted

    def test_non_increasing_times_rejected(self):
        recs = [
            DiagnosticsRecord(t, 0, 0, 0, 0, 0, 0, 0, 0, 0) for t in (1.0, 1.0)
        ]
        with pytest.raises(ValueError, match="increasing"):
            records_to_csv(recs, io.StringIO())

    def test_energy_defects_on_synthetic_series(self):
        # E(t) = exp(-2t) with D = E satisfies dE/dt = -2D exactly
        ts = np.linspace(0.0, 1.0, 6)
        recs = []
        for t in ts:
            diss = 0.5 * (1.0 - math.exp(-2.0 * t))  # integral of E
            recs.append(
                DiagnosticsRecord(t, 0, 0, math.exp(-t), 0, 0, 0, 0, 0, 0, diss_integral=diss)
            )
        assert np.max(energy_balance_defects(recs)) <= 1e-12
