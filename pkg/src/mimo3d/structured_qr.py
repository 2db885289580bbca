"""QR factorization of the equivalent channel and machine verification
of its zero structure.

Under a quasi-static channel the 16x16 upper-triangular factor R of
H_eq has a fixed sparsity pattern:

  * every diagonal 4x4 block R_jj has zero (1,2), (1,4), (2,3), (3,4)
    entries, so real and imaginary parts decouple within a symbol pair;
  * the R_13 block is identically zero, decoupling the first symbol
    pair group from the third;
  * a secondary QR of the R_23 block, R_23 = E F, yields an F with the
    same four zero entries as R_11.

``verify_structure`` measures all of these (plus the inner-product and
norm identities they rest on) on a concrete factorization and reports
per-entry violations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

RANK_EPS = 1e-12

# (row, col) entries, 0-based, that vanish in each diagonal block and in F
ZERO_PATTERN = ((0, 1), (0, 3), (1, 2), (2, 3))


class SingularChannelError(ValueError):
    """Equivalent channel is numerically rank deficient; redraw it."""


@dataclass(frozen=True)
class QrFactors:
    """Q (orthonormal columns), R (upper triangular, positive diagonal)."""

    heq: np.ndarray
    q: np.ndarray
    r: np.ndarray

    def block(self, j: int, k: int) -> np.ndarray:
        """4x4 sub-block R_jk, 1-based block indices."""
        return self.r[4 * (j - 1):4 * j, 4 * (k - 1):4 * k]


@dataclass(frozen=True)
class R23Factors:
    """Secondary factorization R_23 = E F (E 4x4 orthogonal, F upper tri)."""

    e: np.ndarray
    f: np.ndarray
    degenerate: bool


def _signed_qr(a: np.ndarray):
    """QR with the diagonal of R forced nonnegative (unique for full rank)."""
    q, r = np.linalg.qr(a)
    signs = np.where(np.diag(r) < 0.0, -1.0, 1.0)
    return q * signs, signs[:, None] * r


def classical_gram_schmidt(a: np.ndarray):
    """Textbook column-by-column Gram-Schmidt (reference implementation).

    Kept as an independent cross-check of :func:`gram_schmidt_qr`; less
    numerically robust than the Householder path used there.
    """
    a = np.asarray(a, dtype=np.float64)
    n = a.shape[1]
    q = np.zeros_like(a)
    r = np.zeros((n, n))
    for j in range(n):
        v = a[:, j].copy()
        for k in range(j):
            r[k, j] = q[:, k] @ a[:, j]
            v -= r[k, j] * q[:, k]
        r[j, j] = np.linalg.norm(v)
        if r[j, j] > 0.0:
            q[:, j] = v / r[j, j]
    return q, r


def gram_schmidt_qr(heq: np.ndarray) -> QrFactors:
    """Orthogonalize the columns of H_eq; deterministic, no pivoting.

    The diagonal of R holds the residual column norms (positive for a
    full-rank channel); sign flips are absorbed into Q so the result
    coincides with classical Gram-Schmidt up to round-off.
    """
    heq = np.asarray(heq, dtype=np.float64)
    q, r = _signed_qr(heq)
    scale = np.linalg.norm(heq)
    if np.min(np.diag(r)) <= RANK_EPS * scale:
        raise SingularChannelError("equivalent channel is rank deficient")
    return QrFactors(heq=heq, q=q, r=r)


def qr_r23(r23: np.ndarray) -> R23Factors:
    """Factor the 4x4 block R_23 = E F with positive F diagonal.

    A rank-deficient R_23 still returns factors; ``degenerate`` flags a
    (near-)zero F diagonal so the decoder can fall back to exhaustive
    search for the affected group.
    """
    r23 = np.asarray(r23, dtype=np.float64)
    e, f = _signed_qr(r23)
    degenerate = bool(np.min(np.abs(np.diag(f))) <= RANK_EPS * max(np.linalg.norm(r23), 1.0))
    return R23Factors(e=e, f=f, degenerate=degenerate)


@dataclass(frozen=True)
class StructureReport:
    """Per-entry magnitudes of everything the zero-structure claims imply."""

    r_norm: float
    f_norm: float
    diag_block_entries: dict = field(default_factory=dict)   # ("Rjj", row, col) -> |value|
    r13_entries: np.ndarray = None                           # 4x4 magnitudes
    f_entries: dict = field(default_factory=dict)            # (row, col) -> |value|
    pair_identities: dict = field(default_factory=dict)      # name -> |residual|
    p1_p2: float = 0.0
    p1_p4: float = 0.0
    norm_identity_rel: float = 0.0

    def violations(self, tol: float = 1e-9):
        """Named entries exceeding ``tol`` relative to the block norms."""
        out = []
        thr = tol * self.r_norm
        for (name, i, j), v in self.diag_block_entries.items():
            if v > thr:
                out.append((f"{name}[{i + 1},{j + 1}]", v))
        for i in range(4):
            for j in range(4):
                if self.r13_entries[i, j] > thr:
                    out.append((f"R13[{i + 1},{j + 1}]", self.r13_entries[i, j]))
        thr_f = tol * max(self.f_norm, 1e-300)
        for (i, j), v in self.f_entries.items():
            if v > thr_f:
                out.append((f"F[{i + 1},{j + 1}]", v))
        for name, v in self.pair_identities.items():
            if v > thr:
                out.append((name, v))
        if self.p1_p2 > thr:
            out.append(("<p1,p2>", self.p1_p2))
        if self.p1_p4 > thr:
            out.append(("<p1,p4>", self.p1_p4))
        if self.norm_identity_rel > tol:
            out.append(("norm identity r7/r5", self.norm_identity_rel))
        return out

    def ok(self, tol: float = 1e-9) -> bool:
        return not self.violations(tol)

    def max_violation(self) -> float:
        vals = [v for v in self.diag_block_entries.values()]
        vals.append(float(np.max(self.r13_entries)))
        vals.extend(self.f_entries.values())
        vals.extend(self.pair_identities.values())
        vals.extend([self.p1_p2, self.p1_p4])
        return max(vals)


def verify_structure(factors: QrFactors, r23f: R23Factors | None = None) -> StructureReport:
    """Measure the zero pattern and proof identities on one factorization."""
    r = factors.r
    heq = factors.heq
    if r23f is None:
        r23f = qr_r23(factors.block(2, 3))
    f = r23f.f

    diag_entries = {}
    for jb in range(4):
        blk = r[4 * jb:4 * jb + 4, 4 * jb:4 * jb + 4]
        for (i, j) in ZERO_PATTERN:
            diag_entries[(f"R{jb + 1}{jb + 1}", i, j)] = abs(blk[i, j])

    r13 = np.abs(factors.block(1, 3))
    f_entries = {(i, j): abs(f[i, j]) for (i, j) in ZERO_PATTERN}

    # Inner-product identities among rows 5..8 / columns 9..12 of R
    # (equal and skew-equal pairs inside the R_23 block).
    r23 = factors.block(2, 3)
    pair = {}
    for jj in (0, 2):
        for kk in (0, 2):
            pair[f"R23[{jj + 1},{kk + 1}]=R23[{jj + 2},{kk + 2}]"] = abs(
                r23[jj, kk] - r23[jj + 1, kk + 1])
            pair[f"R23[{jj + 2},{kk + 1}]=-R23[{jj + 1},{kk + 2}]"] = abs(
                r23[jj + 1, kk] + r23[jj, kk + 1])

    p1_p2 = abs(r23[:, 0] @ r23[:, 1])
    p1_p4 = abs(r23[:, 0] @ r23[:, 3])

    # Residual-norm recurrence linking rows 5 and 7 to columns 5 and 7 of H_eq
    h5, h7 = heq[:, 4], heq[:, 6]
    h5n2 = h5 @ h5
    ip = h5 @ h7
    r5n2, r7n2 = r[4, 4] ** 2, r[6, 6] ** 2
    predicted = r5n2 * (1.0 + ip / h5n2 - ip ** 2 / h5n2 ** 2)
    norm_rel = abs(r7n2 - predicted) / abs(r7n2)

    return StructureReport(
        r_norm=float(np.linalg.norm(r)),
        f_norm=float(np.linalg.norm(f)),
        diag_block_entries=diag_entries,
        r13_entries=r13,
        f_entries=f_entries,
        pair_identities=pair,
        p1_p2=float(p1_p2),
        p1_p4=float(p1_p4),
        norm_identity_rel=float(norm_rel),
    )
