"""Flat key=value run configuration: strict parse, canonical hash.

Format: one ``key = value`` per line, ``#`` comments, blank lines ignored.
Unknown keys are hard errors (typos must not silently fall back to
defaults), as are missing required keys and type errors; every error names
its line.  The canonical hash is taken over the fully resolved
configuration (defaults included, keys sorted), so reordering the file
never changes it.
"""

import hashlib
from dataclasses import dataclass

from .solver import SolverConfig, default_checkpoints

__all__ = [
    "ConfigError",
    "DiagnosticsOptions",
    "parse_config",
    "parse_config_text",
    "config_hash",
    "CONFIG_DOC",
]


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class DiagnosticsOptions:
    annulus_r_min: float = None  # None: 5 * width (clamped to r_max / 2)
    annulus_r_max: float = None  # None: L / 2
    wq_q: float = 4.0
    wgrad_p: float = 4.0
    sigma: float = 3.0


def _parse_bool(text):
    lo = text.strip().lower()
    if lo in ("true", "1", "on", "yes"):
        return True
    if lo in ("false", "0", "off", "no"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_floats(text):
    return tuple(float(tok) for tok in text.split(",") if tok.strip())


def _parse_centers(text):
    out = []
    for pair in text.split(";"):
        a, b = pair.split(":")
        out.append((float(a), float(b)))
    return tuple(out)


# key -> (parser, required, default, documentation)
_SCHEMA = {
    "alpha": (float, True, None, "dissipation order in (0, 2]"),
    "N": (int, True, None, "grid points per axis (even, >= 16)"),
    "L": (float, True, None, "box half-width; the domain is [-L, L)^2"),
    "t_end": (float, True, None, "final integration time"),
    "cfl": (float, False, 0.5, "Courant factor for the advective step bound"),
    "checkpoints": (
        _parse_floats,
        False,
        None,
        "comma-separated times (default: 24 log-spaced up to t_end)",
    ),
    "init_kind": (str, False, "gaussian", "gaussian | two_bump | custom"),
    "amplitude": (float, False, 1e-2, "initial data amplitude"),
    "width": (float, False, 1.0, "initial data width (<= L/8)"),
    "centers": (
        _parse_centers,
        False,
        ((0.0, 0.0),),
        "x:y pairs separated by ';' (two for two_bump)",
    ),
    "custom_expr": (str, False, None, "expression in x, y for init_kind=custom"),
    "dealias": (_parse_bool, False, True, "2/3-rule dealiasing of the advection"),
    "linear_only": (_parse_bool, False, False, "drop the nonlinear term"),
    "annulus_r_min": (float, False, None, "far-field annulus inner radius"),
    "annulus_r_max": (float, False, None, "far-field annulus outer radius"),
    "wq_q": (float, False, 4.0, "q of the weighted L^q diagnostic"),
    "wgrad_p": (float, False, 4.0, "p of the weighted gradient diagnostic"),
    "sigma": (float, False, 3.0, "order of the fractional seminorm diagnostic"),
}

CONFIG_DOC = "\n".join(
    f"{key:15s} {'(required)' if req else f'(default {dflt!r})':24s} {doc}"
    for key, (_, req, dflt, doc) in _SCHEMA.items()
)


def parse_config_text(text, source="<config>"):
    """Parse config text into (SolverConfig, DiagnosticsOptions, warnings)."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{source}:{lineno}: expected key=value, got {line!r}")
        key, value = (part.strip() for part in stripped.split("=", 1))
        if key not in _SCHEMA:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        parser = _SCHEMA[key][0]
        try:
            raw[key] = parser(value)
        except ConfigError:
            raise
        except Exception as exc:
            raise ConfigError(
                f"{source}:{lineno}: bad value for {key!r}: {exc}"
            ) from exc
    missing = [k for k, (_, req, _, _) in _SCHEMA.items() if req and k not in raw]
    if missing:
        raise ConfigError(f"{source}: missing required keys: {', '.join(missing)}")

    resolved = {k: raw.get(k, spec[2]) for k, spec in _SCHEMA.items()}
    warnings = []
    if resolved["alpha"] > 1.0:
        warnings.append(
            f"alpha = {resolved['alpha']} is outside the far-field theory range "
            "(0, 1]; decay and cancellation diagnostics are uncalibrated there"
        )
    solver_kwargs = dict(
        alpha=resolved["alpha"],
        N=resolved["N"],
        L=resolved["L"],
        t_end=resolved["t_end"],
        cfl=resolved["cfl"],
        checkpoints=resolved["checkpoints"],
        init_kind=resolved["init_kind"],
        amplitude=resolved["amplitude"],
        width=resolved["width"],
        centers=resolved["centers"],
        custom_expr=resolved["custom_expr"],
        dealias=resolved["dealias"],
        linear_only=resolved["linear_only"],
    )
    try:
        config = SolverConfig(**solver_kwargs)
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    options = DiagnosticsOptions(
        annulus_r_min=resolved["annulus_r_min"],
        annulus_r_max=resolved["annulus_r_max"],
        wq_q=resolved["wq_q"],
        wgrad_p=resolved["wgrad_p"],
        sigma=resolved["sigma"],
    )
    return config, options, warnings


def parse_config(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read(), source=str(path))


def _canonical(value):
    if isinstance(value, (tuple, list)):
        return ";".join(_canonical(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return repr(value)


def config_hash(config: SolverConfig, options: DiagnosticsOptions = None) -> str:
    """sha256 of the resolved configuration, independent of file key order."""
    options = options or DiagnosticsOptions()
    items = {
        "alpha": float(config.alpha),
        "N": int(config.N),
        "L": float(config.L),
        "t_end": float(config.t_end),
        "cfl": float(config.cfl),
        "checkpoints": tuple(config.checkpoints)
        if config.checkpoints
        else default_checkpoints(config.t_end),
        "init_kind": config.init_kind,
        "amplitude": float(config.amplitude),
        "width": float(config.width),
        "centers": tuple(config.centers),
        "custom_expr": config.custom_expr,
        "dealias": bool(config.dealias),
        "linear_only": bool(config.linear_only),
        "annulus_r_min": options.annulus_r_min,
        "annulus_r_max": options.annulus_r_max,
        "wq_q": float(options.wq_q),
        "wgrad_p": float(options.wgrad_p),
        "sigma": float(options.sigma),
    }
    text = "\n".join(f"{k}={_canonical(v)}" for k, v in sorted(items.items()))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()
