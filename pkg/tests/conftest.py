import numpy as np
from hypothesis import HealthCheck, settings

from shuffledp import Channel, validate_channel

settings.register_profile(
    "local",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("local")


def full_channel(rng: np.random.Generator, d: int) -> Channel:
    """Random FULL channel with every mass at least 0.2/d."""
    W0 = 0.8 * rng.dirichlet([2.0] * d) + 0.2 / d
    W1 = 0.8 * rng.dirichlet([2.0] * d) + 0.2 / d
    return validate_channel(W0, W1)
