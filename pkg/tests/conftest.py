import hypothesis

hypothesis.settings.register_profile(
    "default", max_examples=40, deadline=None,
    suppress_health_check=[hypothesis.HealthCheck.too_slow],
)
hypothesis.settings.load_profile("default")
