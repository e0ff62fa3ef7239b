"""Named verification contracts: one registry for the CLI and the test suite.

Each contract measures one quantitative claim (kernel oracles, spectral
identities, conservation laws, decay-rate windows, far-field cancellation)
and reports its measured value against its bound.  The ``quick`` level runs
the kernel and spectral checks in about a minute; ``full`` adds the solver
runs and rate fits.  Expensive artifacts (kernel profiles, acceptance runs)
are cached on the context so repeated contracts share them.
"""

import time
import traceback
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from . import diagnostics as diag
from . import kernel as kern
from . import solver as solv
from . import spectral as spec

__all__ = [
    "ContractResult",
    "VerifyContext",
    "run_contracts",
    "contract_ids",
    "CONSERVATION_CONFIG",
    "farfield_config",
]

CONSERVATION_CONFIG = dict(
    alpha=1.0, N=256, L=40.0, t_end=50.0, amplitude=1e-2, width=1.0
)


def farfield_config(alpha):
    cps = tuple(sorted(set(list(solv.default_checkpoints(50.0)) + [1.0, 10.0])))
    return dict(
        alpha=alpha,
        N=512,
        L=80.0,
        t_end=50.0,
        amplitude=1e-2,
        width=1.0,
        centers=((1.0, 0.0),),
        checkpoints=cps,
    )


@dataclass
class ContractResult:
    contract_id: str
    passed: bool
    measured: str
    bound: str
    seconds: float
    detail: str = ""

    def row(self):
        status = "PASS" if self.passed else "FAIL"
        return f"{status:4s}  {self.contract_id:28s} {self.measured:>14s}  vs {self.bound}"


@dataclass
class VerifyContext:
    """Caches for profiles and runs; overrides support fault injection."""

    profile_overrides: dict = dataclass_field(default_factory=dict)
    _profiles: dict = dataclass_field(default_factory=dict)
    _runs: dict = dataclass_field(default_factory=dict)

    def profile(self, alpha):
        if alpha in self.profile_overrides:
            return self.profile_overrides[alpha]
        if alpha not in self._profiles:
            self._profiles[alpha] = kern.build_profile(alpha)
        return self._profiles[alpha]

    def conservation_run(self):
        if "conservation" not in self._runs:
            cfg = solv.SolverConfig(**CONSERVATION_CONFIG)
            snaps, recs = solv.run(cfg, profile=self.profile(1.0))
            self._runs["conservation"] = (cfg, snaps, recs)
        return self._runs["conservation"]

    def farfield_run(self, alpha):
        key = f"farfield_{alpha}"
        if key not in self._runs:
            cfg = solv.SolverConfig(**farfield_config(alpha))
            snaps, recs = solv.run(cfg, profile=self.profile(alpha))
            self._runs[key] = (cfg, snaps, recs)
        return self._runs[key]


_REGISTRY = {}


def _contract(contract_id, level):
    def wrap(fn):
        _REGISTRY[contract_id] = (level, fn)
        return fn

    return wrap


def contract_ids(level="full"):
    if level == "quick":
        return [cid for cid, (lvl, _) in _REGISTRY.items() if lvl == "quick"]
    return list(_REGISTRY.keys())


def run_contracts(level="quick", ctx=None, ids=None):
    ctx = ctx or VerifyContext()
    selected = ids if ids is not None else contract_ids(level)
    results = []
    for cid in selected:
        _, fn = _REGISTRY[cid]
        start = time.perf_counter()
        try:
            passed, measured, bound, detail = fn(ctx)
        except Exception:
            passed, measured, bound = False, "error", "clean execution"
            detail = traceback.format_exc(limit=3)
        results.append(
            ContractResult(
                contract_id=cid,
                passed=bool(passed),
                measured=str(measured),
                bound=str(bound),
                seconds=time.perf_counter() - start,
                detail=detail,
            )
        )
    return results


# -- kernel ------------------------------------------------------------------


@_contract("kernel.poisson_oracle", "quick")
def _poisson_oracle(ctx):
    profile = ctx.profile(1.0)
    r = np.linspace(0.0, 50.0, 601)
    worst = 0.0
    for t in (0.5, 1.0, 2.0):
        cf = kern.poisson_kernel(t, r)
        worst = max(
            worst, float(np.max(np.abs(kern.kernel_eval_radial(profile, t, r) - cf) / cf))
        )
    return worst <= 1e-6, f"{worst:.3e}", "rel err <= 1e-6", ""


@_contract("kernel.gaussian_oracle", "quick")
def _gaussian_oracle(ctx):
    profile = ctx.profile(2.0)
    r = np.linspace(0.0, 50.0, 601)
    worst = 0.0
    ok = True
    for t in (0.5, 1.0, 2.0):
        cf = kern.gauss_kernel(t, r)
        impl = kern.kernel_eval_radial(profile, t, r)
        representable = cf > 1e-280
        worst = max(
            worst,
            float(
                np.max(
                    np.abs(impl[representable] - cf[representable]) / cf[representable]
                )
            ),
        )
        ok &= bool(np.all(np.abs(impl[~representable]) <= 1e-280))
    return (worst <= 1e-8) and ok, f"{worst:.3e}", "rel err <= 1e-8", ""


def _tail_constant(ctx, alpha):
    profile = ctx.profile(alpha)
    radii = np.linspace(50.0, 200.0, 31)
    ratios = kern.tail_limit_check(profile, 1.0, radii)
    at_100 = float(kern.tail_limit_check(profile, 1.0, [100.0])[0])
    gap = abs(at_100 - 1.0)
    decreasing = bool(np.all(np.diff(np.abs(ratios - 1.0)) < 0.0))
    detail = f"|ratio-1| at r=100 is {gap:.4f}; decreasing over [50,200]: {decreasing}"
    return (gap <= 0.02) and decreasing, f"{gap:.4f}", "<= 0.02 and decreasing", detail


@_contract("kernel.tail_constant_a10", "quick")
def _tail_a10(ctx):
    return _tail_constant(ctx, 1.0)


@_contract("kernel.tail_constant_a05", "quick")
def _tail_a05(ctx):
    return _tail_constant(ctx, 0.5)


# -- spectral ------------------------------------------------------------------


def _band_limited(grid, rng, kcut=8.0):
    kk = grid.wavenumbers()[2]
    c = rng.standard_normal((grid.N, grid.N)) + 1j * rng.standard_normal(
        (grid.N, grid.N)
    )
    c *= np.exp(-((kk / kcut) ** 2))
    f = np.real(np.fft.ifft2(c))
    return spec.Field(grid, f / np.max(np.abs(f)))


@_contract("spectral.roundtrip_parseval", "quick")
def _roundtrip(ctx):
    grid = spec.Grid(128, np.pi)
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(10):
        f = spec.Field(grid, rng.standard_normal((128, 128)))
        sf = spec.to_spectral(f)
        back = spec.to_physical(sf)
        worst = max(
            worst,
            float(np.linalg.norm(back.data - f.data) / np.linalg.norm(f.data)),
            float(
                abs(np.linalg.norm(sf.coefficients) - np.linalg.norm(f.data))
                / np.linalg.norm(f.data)
            ),
        )
    return worst <= 1e-12, f"{worst:.3e}", "<= 1e-12", ""


@_contract("spectral.riesz_divergence", "quick")
def _riesz_div(ctx):
    grid = spec.Grid(128, 5.0)
    rng = np.random.default_rng(7)
    kx, ky, _ = grid.wavenumbers()
    worst = 0.0
    for _ in range(5):
        f = spec.Field(grid, rng.standard_normal((128, 128)))
        u1, u2 = spec.riesz_velocity(f)
        div = kx * np.fft.fft2(u1.data) + ky * np.fft.fft2(u2.data)
        worst = max(worst, float(np.max(np.abs(div)) / np.max(np.abs(np.fft.fft2(f.data)))))
    return worst <= 1e-12, f"{worst:.3e}", "exact zero (rounding)", ""


@_contract("spectral.coercivity", "quick")
def _coercivity(ctx):
    grid = spec.Grid(128, np.pi)
    rng = np.random.default_rng(11)
    worst_margin = np.inf
    worst_eq = 0.0
    for _ in range(100):
        f = _band_limited(grid, rng)
        for q in (2.0, 3.0, 4.0):
            for alpha in (0.5, 1.0):
                lhs, rhs = spec.dissipation_coercivity_check(f, q, alpha)
                tol = 1e-8 * (1.0 + abs(lhs))
                worst_margin = min(worst_margin, lhs - rhs + tol)
                if q == 2.0:
                    worst_eq = max(worst_eq, abs(lhs - rhs) / (1.0 + abs(lhs)))
    ok = worst_margin >= 0.0 and worst_eq <= 1e-10
    detail = f"worst slack {worst_margin:.3e}, worst q=2 equality gap {worst_eq:.3e}"
    return ok, f"{worst_eq:.2e}", "holds, q=2 equality <= 1e-10", detail


def _commutator(ctx, alpha):
    rel = spec.commutator_check(spec.Grid(512, 20.0), alpha, 2.0)
    return rel <= 1e-4, f"{rel:.3e}", "rel L2 err <= 1e-4", ""


@_contract("spectral.commutator_a10", "quick")
def _comm_a10(ctx):
    return _commutator(ctx, 1.0)


@_contract("spectral.commutator_a05", "quick")
def _comm_a05(ctx):
    return _commutator(ctx, 0.5)


# -- solver ------------------------------------------------------------------


@_contract("solver.linear_oracle", "full")
def _linear_oracle(ctx):
    profile = ctx.profile(1.0)
    cfg = solv.SolverConfig(
        alpha=1.0,
        N=256,
        L=40.0,
        t_end=10.0,
        amplitude=1e-2,
        width=1.0,
        linear_only=True,
        checkpoints=(0.5, 2.0, 10.0),
    )
    snaps, _ = solv.run(cfg, profile=profile)
    init = diag.InitSpec.gaussian(cfg.amplitude, cfg.width, cfg.centers[0])
    dx = cfg.grid().dx
    radii = np.array([0.0, 1.0, 3.0, 7.0, 12.0, 16.0, 20.0])
    idx = np.round((radii + cfg.L) / dx).astype(int)
    pts = np.column_stack([-cfg.L + idx * dx, np.zeros_like(radii)])
    worst = 0.0
    for snap in snaps[1:]:
        torus = snap.theta.data[idx, cfg.N // 2]
        plane = np.atleast_1d(diag.linear_part_r2(init, profile, snap.t, pts))
        worst = max(worst, float(np.max(np.abs(torus - plane))))
    detail = "compared on the far-field region r <= L/2 (images stay within budget there)"
    return worst <= 1e-6, f"{worst:.3e}", "sup gap <= 1e-6", detail


@_contract("solver.conservation", "full")
def _conservation(ctx):
    _, _, recs = ctx.conservation_run()
    m0 = recs[0].mass
    drift = max(abs(r.mass - m0) / abs(m0) for r in recs)
    return drift <= 1e-10, f"{drift:.3e}", "rel mass drift <= 1e-10", ""


@_contract("solver.l2_dissipation", "full")
def _l2_monotone(ctx):
    _, _, recs = ctx.conservation_run()
    l2 = np.array([r.l2 for r in recs])
    worst = float(np.max(l2[1:] / l2[:-1]))
    return worst <= 1.0 + 1e-8, f"{worst - 1.0:.3e}", "growth <= 1e-8", ""


@_contract("solver.linf_maximum_principle", "full")
def _linf_bound(ctx):
    _, _, recs = ctx.conservation_run()
    linf = np.array([r.linf for r in recs])
    worst = float(np.max(linf[1:] / linf[:-1]))
    return worst <= 1.0 + 1e-4, f"{worst - 1.0:.3e}", "growth <= 1e-4", ""


@_contract("solver.energy_balance", "full")
def _energy(ctx):
    _, _, recs = ctx.conservation_run()
    worst = float(np.max(diag.energy_balance_defects(recs)))
    return worst <= 0.01, f"{worst:.4f}", "interval defect <= 1%", ""


# -- decay-rate fits -----------------------------------------------------------


def _rate(ctx, attr, target, tol, window=(5.0, 50.0)):
    _, _, recs = ctx.conservation_run()
    ts = np.array([r.t for r in recs])
    vals = np.array([getattr(r, attr) for r in recs])
    fit = diag.fit_decay_exponent(ts, vals, window)
    ok = abs(fit.exponent - target) <= tol
    return ok, f"{fit.exponent:.4f}", f"{target} +/- {tol}", f"window {window}"


@_contract("rates.linf_decay", "full")
def _rate_linf(ctx):
    return _rate(ctx, "linf", -2.0, 0.3)


@_contract("rates.h3_decay", "full")
def _rate_h3(ctx):
    return _rate(ctx, "h_sigma", -4.0, 0.5)


@_contract("rates.wq_growth", "full")
def _rate_wq(ctx):
    return _rate(ctx, "wq", 0.5, 0.2)


# -- far-field checks ----------------------------------------------------------


@_contract("linear_farfield.growth", "full")
def _linear_farfield(ctx):
    profile = ctx.profile(1.0)
    init = diag.InitSpec.gaussian(1e-2, 1.0, (1.0, 0.0))
    annulus = diag.AnnulusSpec(5.0, 200.0)
    fit, _, _ = diag.linear_farfield_check(init, profile, [1.0, 2.0, 5.0, 10.0, 20.0, 50.0], annulus)
    ok = 0.8 <= fit.exponent <= 1.2
    return ok, f"{fit.exponent:.4f}", "in [0.8, 1.2]", ""


@_contract("linear_farfield.semigroup", "full")
def _semigroup(ctx):
    profile = ctx.profile(1.0)
    annulus = diag.AnnulusSpec(5.0, 20.0)
    gap = diag.semigroup_oracle_gap(profile, [1.0, 10.0], annulus)
    return gap <= 1e-5, f"{gap:.3e}", "rel agreement <= 1e-5", ""


def _cancellation(ctx, alpha):
    cfg, snaps, recs = ctx.farfield_run(alpha)
    annulus = diag.AnnulusSpec(5.0, cfg.L / 2.0)
    result = diag.cancellation_check(snaps, ctx.profile(alpha), recs[0].mass, annulus)
    ok = result.fit.exponent <= 1.2
    detail = f"empirical constant sup A/(1+t) = {result.c_empirical:.4f}"
    return ok, f"{result.fit.exponent:.4f}", "<= 1.2", detail


@_contract("cancellation.growth_a10", "full")
def _cancellation_a10(ctx):
    return _cancellation(ctx, 1.0)


@_contract("cancellation.growth_a05", "full")
def _cancellation_a05(ctx):
    return _cancellation(ctx, 0.5)


@_contract("cancellation.image_budget", "full")
def _image_budget(ctx):
    worst = 0.0
    for alpha in (1.0, 0.5):
        cfg, snaps, recs = ctx.farfield_run(alpha)
        annulus = diag.AnnulusSpec(5.0, cfg.L / 2.0)
        result = diag.cancellation_check(snaps, ctx.profile(alpha), recs[0].mass, annulus)
        for t, a_val in zip(result.times, result.values):
            budget = diag.image_budget(ctx.profile(alpha), t, cfg.L, annulus.r_max)
            worst = max(worst, budget / (0.01 * a_val))
    return worst <= 1.0, f"{worst:.3e}", "budget / (1% of measured) <= 1", ""


def _farfield_ratio(ctx, alpha):
    cfg, snaps, recs = ctx.farfield_run(alpha)
    snap10 = min(snaps, key=lambda s: abs(s.t - 10.0))
    rows = diag.farfield_ratio_check(
        snap10, ctx.profile(alpha), recs[0].mass, [cfg.L / 2.0]
    )
    _, lo, _, hi = rows[0]
    ok = 0.85 <= lo <= 1.15 and 0.85 <= hi <= 1.15
    return ok, f"[{lo:.3f}, {hi:.3f}]", "within [0.85, 1.15]", f"t = {snap10.t:g}"


@_contract("farfield_ratio.a10", "full")
def _farfield_ratio_a10(ctx):
    return _farfield_ratio(ctx, 1.0)


@_contract("farfield_ratio.a05", "full")
def _farfield_ratio_a05(ctx):
    return _farfield_ratio(ctx, 0.5)


def _v_growth(ctx, alpha):
    # the remainder starts from zero, so fits are taken on the standard
    # [5, 50] window past the quadratic build-up transient
    cfg, snaps, recs = ctx.farfield_run(alpha)
    theta0 = solv.make_initial(cfg)
    annulus = diag.AnnulusSpec(5.0, cfg.L / 2.0)
    ts, vals = diag.nonlinear_remainder_check(snaps, theta0, alpha, annulus)
    fit = diag.fit_decay_exponent(ts, vals, (5.0, 50.0))
    detail = f"series peaks at t = {ts[np.argmax(vals)]:.3g} then decays"
    return fit.exponent <= 1.2, f"{fit.exponent:.4f}", "<= 1.2", detail


@_contract("v.growth_a10", "full")
def _v_a10(ctx):
    return _v_growth(ctx, 1.0)


@_contract("v.growth_a05", "full")
def _v_a05(ctx):
    return _v_growth(ctx, 0.5)


@_contract("wgrad.bounded", "full")
def _wgrad(ctx):
    cfg, snaps, _ = ctx.farfield_run(1.0)
    ts, vals = diag.wgrad_check(snaps, p=4.0)
    ok = diag.bounded_series_check(ts, vals)
    ratio = float(vals[ts >= 1.0].max() / vals[ts <= ts.max() / 4.0].max())
    return ok, f"{ratio:.3f}", "late max <= 2x early max", ""


@_contract("l2log.bounded", "full")
def _l2log(ctx):
    worst = 0.0
    for alpha in (1.0, 0.5):
        cfg, snaps, recs = ctx.farfield_run(alpha)
        annulus = diag.AnnulusSpec(5.0, cfg.L / 2.0)
        ts, _, normalized = diag.l2_log_check(snaps, ctx.profile(alpha), recs[0].mass, annulus)
        ok = diag.bounded_series_check(ts, normalized)
        if not ok:
            return False, "unbounded", "late max <= 2x early max", f"alpha={alpha}"
        worst = max(
            worst,
            float(normalized[ts >= 1.0].max() / normalized[ts <= ts.max() / 4.0].max()),
        )
    return True, f"{worst:.3f}", "late max <= 2x early max", ""
