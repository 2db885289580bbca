"""Rate-2 4x2 space-time block code built from two Golden codewords
arranged in an Alamouti pattern, plus the real-valued linear-code view
(weight matrices and generator matrix) and the complex<->real
conversion conventions shared by the whole package.

Conventions:
  * ``realize(x)`` interleaves a complex vector as
    [x1_re, x1_im, x2_re, x2_im, ...].
  * ``realify(A)`` replaces each complex entry h by the 2x2 block
    [[h_re, -h_im], [h_im, h_re]], so that
    realify(A) @ realize(x) == realize(A @ x).
  * ``vec`` stacks matrix columns.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

N_TX = 4
N_USES = 4
N_SYMBOLS = 8
N_REAL_DIMS = 2 * N_SYMBOLS


@dataclass(frozen=True)
class GoldenConstants:
    """Golden-ratio constants of the underlying 2x2 Golden code."""

    theta: float = (1.0 + math.sqrt(5.0)) / 2.0
    theta_bar: float = 1.0 - (1.0 + math.sqrt(5.0)) / 2.0

    @property
    def alpha(self) -> complex:
        return 1.0 + 1j * (1.0 - self.theta)

    @property
    def alpha_bar(self) -> complex:
        return 1.0 + 1j * (1.0 - self.theta_bar)

    @property
    def scale(self) -> float:
        return 1.0 / math.sqrt(5.0)


GOLDEN = GoldenConstants()


def realize(x) -> np.ndarray:
    """Interleave real and imaginary parts of a complex vector."""
    x = np.asarray(x, dtype=np.complex128).ravel()
    out = np.empty(2 * x.size, dtype=np.float64)
    out[0::2] = x.real
    out[1::2] = x.imag
    return out


def unrealize(x) -> np.ndarray:
    """Inverse of :func:`realize`."""
    x = np.asarray(x, dtype=np.float64).ravel()
    return x[0::2] + 1j * x[1::2]


def realify_matrix(a) -> np.ndarray:
    """Entrywise complex->2x2-real-block expansion (ring homomorphism)."""
    a = np.atleast_2d(np.asarray(a, dtype=np.complex128))
    m, n = a.shape
    out = np.empty((2 * m, 2 * n), dtype=np.float64)
    out[0::2, 0::2] = a.real
    out[0::2, 1::2] = -a.imag
    out[1::2, 0::2] = a.imag
    out[1::2, 1::2] = a.real
    return out


def encode(s) -> np.ndarray:
    """Map 8 complex symbols to the 4x4 codeword matrix.

    Rows are transmit antennas, columns channel uses.  The top/bottom
    2x2 halves are two Golden codewords X1 (s1..s4) and X2 (s5..s8)
    arranged as [[X1, -conj(X2)], [X2, conj(X1)]].
    """
    s = np.asarray(s, dtype=np.complex128).ravel()
    if s.size != N_SYMBOLS:
        raise ValueError(f"expected {N_SYMBOLS} symbols, got {s.size}")
    th, tb = GOLDEN.theta, GOLDEN.theta_bar
    al, ab = GOLDEN.alpha, GOLDEN.alpha_bar
    s1, s2, s3, s4, s5, s6, s7, s8 = s
    c = np.conj
    x = np.array([
        [al * (s1 + th * s2), al * (s3 + th * s4),
         -c(al) * (c(s5) + th * c(s6)), -c(al) * (c(s7) + th * c(s8))],
        [1j * ab * (s3 + tb * s4), ab * (s1 + tb * s2),
         1j * c(ab) * (c(s7) + tb * c(s8)), -c(ab) * (c(s5) + tb * c(s6))],
        [al * (s5 + th * s6), al * (s7 + th * s8),
         c(al) * (c(s1) + th * c(s2)), c(al) * (c(s3) + th * c(s4))],
        [1j * ab * (s7 + tb * s8), ab * (s5 + tb * s6),
         -1j * c(ab) * (c(s3) + tb * c(s4)), c(ab) * (c(s1) + tb * c(s2))],
    ], dtype=np.complex128)
    return GOLDEN.scale * x


def weight_matrices() -> list:
    """The 16 complex 4x4 weight matrices [A1, B1, ..., A8, B8].

    A_j carries the real part of symbol j, B_j the imaginary part:
    encode(s) == sum_j (Re(s_j) A_j + Im(s_j) B_j).
    """
    mats = []
    for j in range(N_SYMBOLS):
        e = np.zeros(N_SYMBOLS, dtype=np.complex128)
        e[j] = 1.0
        mats.append(encode(e))
        e[j] = 1j
        mats.append(encode(e))
    return mats


def generator_matrix() -> np.ndarray:
    """32x16 real generator: realize(vec(encode(s))) == G @ realize(s).

    Column 2j carries Re(s_{j+1}) (weight matrix A), column 2j+1 carries
    Im(s_{j+1}) (weight matrix B).  Columns have squared norm 2 and are
    mutually orthogonal: G.T @ G == 2 I.
    """
    cols = [realize(w.flatten(order="F")) for w in weight_matrices()]
    return np.column_stack(cols)
