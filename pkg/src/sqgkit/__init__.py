"""sqgkit: desk-scale numerics for the dissipative quasi-geostrophic equation.

Three layers:

* ``kernel``      -- the radial fundamental solution of the fractional heat
                     equation on the plane, tabulated by oscillatory Hankel
                     quadrature, with its power-law far-field tail.
* ``spectral`` /
  ``solver``      -- periodic-box Fourier calculus and an integrating-factor
                     RK4 time stepper for the active scalar.
* ``diagnostics`` -- weighted norms, decay-rate fits and far-field
                     cancellation checks comparing the nonlinear solution
                     against the kernel profile.

The ``sqgkit`` command line (see ``sqgkit.cli``) exposes kernel tabulation,
solver runs, diagnostics extraction, parameter sweeps and the built-in
verification suite.
"""

from .kernel import (
    KernelProfile,
    KernelQuadratureError,
    asymptotic_constant,
    build_profile,
    kernel_eval,
    kernel_grad_eval,
    tail_limit_check,
)
from .spectral import (
    Field,
    Grid,
    SpectralField,
    commutator_check,
    dealias,
    frac_power,
    riesz_velocity,
    dissipation_coercivity_check,
)
from .solver import (
    Snapshot,
    SolverConfig,
    SolverState,
    cfl_dt,
    linear_evolve,
    make_initial,
    pde_residual,
    run,
    step,
)
from .diagnostics import (
    AnnulusSpec,
    DiagnosticsRecord,
    RateFit,
    farfield_ratio_check,
    fit_decay_exponent,
    l2_log_check,
    linear_farfield_check,
    linear_part_r2,
    sobolev_seminorm,
    cancellation_check,
    nonlinear_remainder_check,
    weighted_lq_norm,
    weighted_sup_norm,
    wgrad_check,
)

__version__ = "0.1.0"
