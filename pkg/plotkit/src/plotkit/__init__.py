"""Static figures from decay-diagnostics CSVs.

Consumes only the diagnostics CSV, the far-field ratio CSV and the
exponent-targets table; no coupling to the solver package.  Two plots:

* ``decay``: log-log series against (1 + t) with the closed-form
  least-squares slope in the legend and the predicted exponent as a dashed
  guide;
* ``ratio``: far-field ratio against radius with the angular min-max band
  and the limit line at 1.

Figures are deterministic for fixed inputs (fixed geometry, no timestamps).
"""

from .plots import PlotSpec, decay_plot, fit_log_slope, ratio_plot

__version__ = "0.1.0"

__all__ = ["PlotSpec", "decay_plot", "ratio_plot", "fit_log_slope", "__version__"]
