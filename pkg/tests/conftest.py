"""Shared test configuration.

Property tests exercise numba kernels whose first call triggers JIT
compilation, so per-example deadlines are disabled.
"""

from hypothesis import HealthCheck, settings

settings.register_profile(
    "hga",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("hga")
