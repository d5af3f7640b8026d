import pytest

from toomsim.experiments import calibrate_front_speed


@pytest.fixture(scope="session")
def front_speeds():
    """Front-speed calibrations shared across acceptance tests, keyed by
    (lambda_plus, density)."""
    cache = {}

    def get(lambda_plus: float, p: float) -> float:
        key = (round(lambda_plus, 6), round(p, 6))
        if key not in cache:
            cache[key] = calibrate_front_speed(lambda_plus, p, seed=914)
        return cache[key]

    return get
