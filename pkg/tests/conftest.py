import pytest
from hypothesis import HealthCheck, settings

from cgident.graph import generate

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

NEGATIVE_KINDS = ("directed_ring", "directed_line", "star_bidir", "near_complete_minus_one_arc")


@pytest.fixture(params=[2, 3])
def small_n(request):
    return request.param


def fixture_graphs(n):
    return [generate("complete", n)] + [generate(k, n, seed=1) for k in NEGATIVE_KINDS]
