"""Quasi-static Rayleigh channel, AWGN, equivalent real channel matrix
and SNR bookkeeping.

SNR convention: ``snr_db = 10 log10(Es_rx / n0)`` where ``Es_rx`` is the
average received signal energy per receive antenna per channel use.
With unit-energy symbols and the codeword normalization used here,
``Es_rx = N_t * E|X_entry|^2 = 4``.  Noise is drawn in the complex
domain (variance ``n0`` per complex entry, ``n0/2`` per real component)
and realized afterwards, so the complex and real-valued models agree
bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import stbc

N_RX = 2

# E[|HX|^2_F] / (N_rx * T) for i.i.d. unit-variance H and unit-energy symbols
RX_SYMBOL_ENERGY = 4.0


@dataclass(frozen=True)
class NoiseConfig:
    """SNR point; ``snr_db=inf`` selects the noiseless path."""

    snr_db: float

    @property
    def n0(self) -> float:
        if math.isinf(self.snr_db):
            return 0.0
        return RX_SYMBOL_ENERGY * 10.0 ** (-self.snr_db / 10.0)


def trial_rng(master_seed: int, snr_key: int, trial_index: int, sub: int = 0):
    """Deterministic per-trial substream, independent of scheduling."""
    return np.random.default_rng(
        np.random.SeedSequence((master_seed, snr_key, trial_index, sub))
    )


def snr_key_of(snr_db: float) -> int:
    """Integer key for seeding; inf maps to a sentinel."""
    if math.isinf(snr_db):
        return 2 ** 31 - 1
    return int(round(snr_db * 1000.0)) % (2 ** 32)


def draw_channel(rng) -> np.ndarray:
    """2x4 i.i.d. circularly-symmetric complex Gaussian, unit variance."""
    re = rng.standard_normal((N_RX, stbc.N_TX))
    im = rng.standard_normal((N_RX, stbc.N_TX))
    return (re + 1j * im) / math.sqrt(2.0)


def transmit(x: np.ndarray, h: np.ndarray, noise: NoiseConfig, rng) -> np.ndarray:
    """Y = H X + N with i.i.d. complex AWGN of variance n0 per entry."""
    y = h @ x
    n0 = noise.n0
    if n0 > 0.0:
        n = rng.standard_normal(y.shape) + 1j * rng.standard_normal(y.shape)
        y = y + math.sqrt(n0 / 2.0) * n
    return y


def equivalent_channel(h: np.ndarray, g: np.ndarray | None = None) -> np.ndarray:
    """16x16 real equivalent channel: (I_T kron realify(H)) @ G.

    Satisfies realize(vec(H @ encode(s))) == H_eq @ realize(s).
    """
    if g is None:
        g = stbc.generator_matrix()
    h_real = stbc.realify_matrix(h)
    return np.kron(np.eye(stbc.N_USES), h_real) @ g


def realize_received(y: np.ndarray) -> np.ndarray:
    """realize(vec(Y)) for a 2x4 received block (16 reals)."""
    return stbc.realize(y.flatten(order="F"))
