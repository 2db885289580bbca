"""Square QAM / PAM constellations, Gray bit mapping, slicing and
Schnorr-Euchner enumeration order.

The decoders work on the real-valued lattice, so every M-QAM
constellation here is the Cartesian product of one sqrt(M)-PAM set with
itself.  Slicing and S-E ordering are defined on the PAM levels and are
the only quantization primitives the decoders use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

SUPPORTED_ORDERS = (4, 16, 64, 256)


@dataclass(frozen=True)
class PamConstellation:
    """Real sqrt(M)-PAM levels, sorted ascending, symmetric about 0."""

    levels: np.ndarray

    def __post_init__(self):
        lv = np.asarray(self.levels, dtype=np.float64)
        object.__setattr__(self, "levels", lv)
        if lv.size == 0:
            raise ValueError("PAM constellation must be nonempty")
        if not np.all(np.diff(lv) > 0):
            raise ValueError("PAM levels must be strictly increasing")

    @property
    def size(self) -> int:
        return self.levels.size


@dataclass(frozen=True)
class QamConstellation:
    """Normalized Gray-mapped square QAM constellation.

    ``points[k]`` carries the bit label ``bit_map[k]``; the first half of
    the label Gray-codes the real axis, the second half the imaginary
    axis.  Average symbol energy is 1.
    """

    order: int
    points: np.ndarray
    bit_map: np.ndarray
    pam: PamConstellation
    bits_per_symbol: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "bits_per_symbol", int(round(math.log2(self.order))))


def _gray(k: int) -> int:
    return k ^ (k >> 1)


def _gray_inverse(g: int) -> int:
    k = 0
    while g:
        k ^= g
        g >>= 1
    return k


def make_qam(m: int) -> QamConstellation:
    """Build the normalized Gray-mapped square M-QAM constellation."""
    if m not in SUPPORTED_ORDERS:
        raise ValueError(f"unsupported QAM order {m}; must be one of {SUPPORTED_ORDERS}")
    root = int(round(math.sqrt(m)))
    assert root * root == m

    # Odd-integer PAM grid scaled for unit average QAM symbol energy:
    # E|s|^2 = 2 * mean(level^2) = 1  =>  delta = sqrt(3 / (2 (M - 1))).
    delta = math.sqrt(3.0 / (2.0 * (m - 1)))
    levels = delta * (2.0 * np.arange(root) - root + 1)
    pam = PamConstellation(levels=levels)

    axis_bits = root.bit_length() - 1
    points = np.empty(m, dtype=np.complex128)
    bit_map = np.empty((m, 2 * axis_bits), dtype=np.uint8)
    k = 0
    for ii in range(root):
        for qq in range(root):
            points[k] = levels[ii] + 1j * levels[qq]
            gi, gq = _gray(ii), _gray(qq)
            for b in range(axis_bits):
                bit_map[k, b] = (gi >> (axis_bits - 1 - b)) & 1
                bit_map[k, axis_bits + b] = (gq >> (axis_bits - 1 - b)) & 1
            k += 1
    return QamConstellation(order=m, points=points, bit_map=bit_map, pam=pam)


def slice_pam(x: float, pam: PamConstellation) -> float:
    """Nearest PAM level to ``x``; exact ties go to the smaller level."""
    if np.isnan(x):
        raise ValueError("cannot slice NaN")
    lv = pam.levels
    # argmin takes the first (smaller) level on a distance tie, using the
    # same rounded distances as se_order so the two never disagree
    return float(lv[np.argmin(np.abs(lv - x))])


def se_order(x: float, pam: PamConstellation) -> np.ndarray:
    """All PAM levels sorted by ascending distance to ``x``.

    Ties break toward the smaller level, so ``se_order(x)[0]`` always
    equals ``slice_pam(x)``.
    """
    if np.isnan(x):
        raise ValueError("cannot enumerate around NaN")
    lv = pam.levels
    order = np.argsort(np.abs(lv - x), kind="stable")
    return lv[order]


def _axis_bits_to_index(bits: np.ndarray) -> int:
    g = 0
    for b in bits:
        g = (g << 1) | int(b)
    return _gray_inverse(g)


def bits_to_symbols(bits, c: QamConstellation, n_symbols: int = 8) -> np.ndarray:
    """Map a bit sequence to ``n_symbols`` QAM symbols (Gray per axis)."""
    bits = np.asarray(bits, dtype=np.uint8).ravel()
    bps = c.bits_per_symbol
    if bits.size != n_symbols * bps:
        raise ValueError(f"expected {n_symbols * bps} bits, got {bits.size}")
    half = bps // 2
    lv = c.pam.levels
    out = np.empty(n_symbols, dtype=np.complex128)
    for j in range(n_symbols):
        chunk = bits[j * bps:(j + 1) * bps]
        ii = _axis_bits_to_index(chunk[:half])
        qq = _axis_bits_to_index(chunk[half:])
        out[j] = lv[ii] + 1j * lv[qq]
    return out


def symbols_to_bits(symbols, c: QamConstellation) -> np.ndarray:
    """Demap symbols to bits by per-axis slicing (inverse of bits_to_symbols)."""
    symbols = np.asarray(symbols, dtype=np.complex128).ravel()
    bps = c.bits_per_symbol
    half = bps // 2
    lv = c.pam.levels
    pam = c.pam
    out = np.empty(symbols.size * bps, dtype=np.uint8)
    for j, s in enumerate(symbols):
        ii = int(np.flatnonzero(lv == slice_pam(s.real, pam))[0])
        qq = int(np.flatnonzero(lv == slice_pam(s.imag, pam))[0])
        gi, gq = _gray(ii), _gray(qq)
        for b in range(half):
            out[j * bps + b] = (gi >> (half - 1 - b)) & 1
            out[j * bps + half + b] = (gq >> (half - 1 - b)) & 1
    return out
