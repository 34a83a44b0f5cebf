import numpy as np
import pytest

import ychannel as yc

# the running example: 5 streams, one 2-cycle and one 3-cycle, fits N=3
TOY = yc.DofTuple(2, 0, 1, 1, 1, 0)


@pytest.fixture
def toy_plan():
    plan = yc.build_plan(yc.allocate(TOY, 3, "joint"), 3)
    assert isinstance(plan, yc.SubChannelPlan)
    return plan


@pytest.fixture
def identity_channels():
    eye = np.eye(3, dtype=complex)
    return yc.ChannelSet(m=3, n=3, uplink=(eye, eye, eye), downlink=(eye, eye, eye))


def crandn(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
