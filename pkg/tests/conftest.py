from hypothesis import settings

# kernels and field builds dominate some examples; wall-clock deadlines only add flakiness
settings.register_profile("default", deadline=None)
settings.load_profile("default")
