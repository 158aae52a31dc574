from hypothesis import HealthCheck, settings

# quadrature-backed properties have wildly varying per-example runtimes;
# wall-clock deadlines only produce flaky failures here
settings.register_profile(
    "disknorms",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("disknorms")
