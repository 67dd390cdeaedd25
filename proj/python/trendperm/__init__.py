"""Mann-Kendall permutation trend tests for weakly dependent time series."""

try:
    from . import _trendperm as _core
except ImportError:  # in-tree build: the extension sits next to the package
    import _trendperm as _core

DomainError = _core.DomainError
TieError = _core.TieError
LimitError = _core.LimitError
ParseError = _core.ParseError

global_mk = _core.global_mk
local_mk = _core.local_mk
local_increments = _core.local_increments
ranks = _core.ranks
global_variance = _core.global_variance
local_variance = _core.local_variance
bandwidth_default = _core.bandwidth_default
run_test = _core.run_test
simulate = _core.simulate
exact_null = _core.exact_null
nu_n = _core.nu_n
gaussian_ar1_sigma_sq = _core.gaussian_ar1_sigma_sq
local_exact_variance = _core.local_exact_variance
limiting_power_whitenoise = _core.limiting_power_whitenoise
limiting_power_whitenoise_density_weighted = _core.limiting_power_whitenoise_density_weighted


def run_experiment(config):
    """Run a config given as text. Returns (rows, failures); rows are dicts."""
    rows, failures = _core.run_experiment(config)
    return rows, failures


__all__ = [name for name in dir() if not name.startswith("_")]
