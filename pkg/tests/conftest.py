import numpy as np
import pytest

from mimo3d import channel, stbc
from mimo3d.constellation import make_qam
from mimo3d.structured_qr import gram_schmidt_qr


@pytest.fixture(scope="session")
def qam4():
    return make_qam(4)


@pytest.fixture(scope="session")
def qam16():
    return make_qam(16)


@pytest.fixture(scope="session")
def generator():
    return stbc.generator_matrix()


def random_instance(rng, qam, generator, snr_db=10.0):
    """One (y_tilde, heq, s) draw for decoder tests."""
    h = channel.draw_channel(rng)
    heq = channel.equivalent_channel(h, generator)
    s = rng.choice(qam.points, size=8)
    x = stbc.encode(s)
    y = channel.transmit(x, h, channel.NoiseConfig(snr_db), rng)
    return channel.realize_received(y), heq, s


def random_factors(rng, generator):
    h = channel.draw_channel(rng)
    heq = channel.equivalent_channel(h, generator)
    return gram_schmidt_qr(heq)
