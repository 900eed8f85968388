import math

import numpy as np
import pytest

from qugauge.dynamics import MixingConfig, SpectrumConfig

PI6 = math.pi / 6


@pytest.fixture
def spec12():
    return SpectrumConfig(1.0, 2.0)


@pytest.fixture
def mix_pi6():
    return MixingConfig(PI6)


@pytest.fixture
def rng():
    return np.random.default_rng(20260101)


def draw_gauge_case(rng):
    """Random (gauge function, spectrum, mixing, t) with bounded rotation rate.

    Central differences of U carry an error of about h^2 r^3 / 6 for rotation
    rate r = |g dlambda/dt|, so r is kept below ~6.5 to leave the operator
    law check dominated by correctness rather than truncation. Near
    theta = pi/4, where g blows up, the gauge function is given in product form.
    """
    from qugauge.gauge import GaugeFunction

    theta = rng.uniform(0, math.pi)
    coupled = abs(math.cos(2 * theta)) < 0.3
    kind = int(rng.integers(5))
    if kind == 0:
        gf = GaugeFunction.zero(coupled)
    elif kind == 1:
        gf = GaugeFunction.constant(rng.uniform(-2, 2), coupled)
    elif kind == 2:
        gf = GaugeFunction.linear(rng.uniform(-1, 1), coupled)
    elif kind == 3:
        gf = GaugeFunction.polynomial(rng.uniform(-0.5, 0.5, 3), coupled)
    else:
        gf = GaugeFunction.sinusoidal(rng.uniform(-1, 1), rng.uniform(0.2, 2), coupled)
    return gf, SpectrumConfig(*rng.uniform(-3, 3, 2)), MixingConfig(theta), rng.uniform(-1, 1)


@pytest.fixture
def gauge_case():
    return draw_gauge_case
