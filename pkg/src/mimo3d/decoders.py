"""Three exact-ML decoders sharing one contract.

* :func:`ml_bruteforce` -- exhaustive scan of all M^8 candidates
  (vectorized numpy; the reference oracle).
* :func:`sphere_decode_se` -- classical depth-16 real sphere decoder
  with Schnorr-Euchner enumeration and adaptive radius.
* :func:`simplified_ml_decode` -- group-wise decoder exploiting the
  zero structure of R: a sorted outer search over one symbol pair, a
  plain inner loop over another, and four parallel closed-form-assisted
  PAM searches for the remaining dimensions.

All three resolve exact metric ties (within 1e-12) toward the
lexicographically smallest real symbol vector, so their argmins are
comparable trial by trial.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from ._kernels import TIE_TOL
from .constellation import QamConstellation
from .stbc import unrealize
from .structured_qr import QrFactors, R23Factors, gram_schmidt_qr, qr_r23

BRUTEFORCE_MAX_ORDER = 4


@dataclass(frozen=True)
class NodeStats:
    """Visited-node counters.

    ``total_nodes`` counts every candidate whose metric increment was
    evaluated (for the simplified decoder this includes the M^2 sorting
    cost and the per-conditioning bookkeeping, i.e. the full serial
    work).  ``delay_nodes`` is the processing-time delay: the four
    branch searches of the simplified decoder run in parallel, so its
    delay is the maximum cumulative node count over the branches; for
    the serial decoders it equals ``total_nodes``.
    ``serial_delay_nodes`` is an alternative convention (sort cost plus,
    per conditioning pair, one node plus the per-pair branch maximum)
    kept so other accountings can be applied.
    """

    total_nodes: int
    delay_nodes: int
    branch_nodes: tuple | None = None
    serial_delay_nodes: int | None = None


@dataclass(frozen=True)
class DecodeResult:
    s_tilde: np.ndarray
    metric: float
    nodes: NodeStats
    used_fallback: bool = False

    @property
    def symbols(self) -> np.ndarray:
        """The eight estimated complex symbols."""
        return unrealize(self.s_tilde)


@lru_cache(maxsize=8)
def _all_candidates(levels_key, ndim):
    """All |levels|^ndim real vectors in ascending lexicographic order."""
    levels = np.array(levels_key)
    grids = np.meshgrid(*([levels] * ndim), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def _pair_candidates(qam: QamConstellation) -> np.ndarray:
    """Realized candidates for one complex symbol pair: all of Psi^4."""
    return _all_candidates(tuple(qam.pam.levels), 4)


def ml_bruteforce(y_tilde, heq, qam: QamConstellation,
                  allow_large: bool = False) -> DecodeResult:
    """Exhaustive minimization of ||y - H_eq s||^2 over all M^8 vectors.

    Guarded to M=4 (65536 candidates) unless ``allow_large`` is set.
    """
    if qam.order > BRUTEFORCE_MAX_ORDER and not allow_large:
        raise ValueError(
            f"brute force over {qam.order}^8 candidates refused; "
            "pass allow_large=True to override")
    y_tilde = np.asarray(y_tilde, dtype=np.float64)
    cands = _all_candidates(tuple(qam.pam.levels), 16)
    resid = cands @ heq.T - y_tilde
    metrics = np.einsum("ij,ij->i", resid, resid)
    mn = metrics.min()
    # rows are in lex order, so the first tied index is the lex-smallest
    idx = int(np.flatnonzero(metrics <= mn + TIE_TOL)[0])
    n = cands.shape[0]
    return DecodeResult(
        s_tilde=cands[idx].copy(),
        metric=float(metrics[idx]),
        nodes=NodeStats(total_nodes=n, delay_nodes=n),
    )


def sphere_decode_se(y_tilde, heq, qam: QamConstellation,
                     factors: QrFactors | None = None,
                     prune: bool = True) -> DecodeResult:
    """Exact ML via sphere decoding on the triangularized metric.

    ``prune=False`` (debug) disables radius pruning; the argmin is
    unchanged, only node counts grow.
    """
    if factors is None:
        factors = gram_schmidt_qr(heq)
    z = factors.q.T @ np.asarray(y_tilde, dtype=np.float64)
    s, metric, nodes = _kernels.sphere_kernel(
        z, factors.r, qam.pam.levels, prune)
    return DecodeResult(
        s_tilde=s, metric=float(metric),
        nodes=NodeStats(total_nodes=int(nodes), delay_nodes=int(nodes)),
    )


def simplified_ml_decode(y_tilde, heq, qam: QamConstellation,
                         factors: QrFactors | None = None,
                         r23_factors: R23Factors | None = None,
                         use_breaks: bool = True) -> DecodeResult:
    """Exact ML via the group-wise structured search."""
    if factors is None:
        factors = gram_schmidt_qr(heq)
    if r23_factors is None:
        r23_factors = qr_r23(factors.block(2, 3))
    z = factors.q.T @ np.asarray(y_tilde, dtype=np.float64)
    cand = _pair_candidates(qam)
    s, metric, branch, n_bd, delay = _kernels.simplified_kernel(
        z, factors.r, r23_factors.e, r23_factors.f, qam.pam.levels,
        cand, use_breaks, r23_factors.degenerate)
    m2 = cand.shape[0]
    total = m2 + int(n_bd) + int(branch.sum())
    return DecodeResult(
        s_tilde=s, metric=float(metric),
        nodes=NodeStats(
            total_nodes=total,
            delay_nodes=int(branch.max()),
            branch_nodes=tuple(int(b) for b in branch),
            serial_delay_nodes=m2 + int(delay),
        ),
        used_fallback=r23_factors.degenerate,
    )


def conditional_pam_search(v1, v2, r11, r13, r33, pam,
                           eps_base=0.0, d_min=np.inf, use_breaks=True):
    """Exact minimizer over Psi^2 of one decoupled branch metric.

    Returns ((s1, s2), branch_metric, nodes).
    """
    vals = (v1, v2, r11, r13, r33, eps_base)
    if not all(np.isfinite(v) for v in vals):
        raise ValueError("nonfinite input to conditional search")
    s1, s2, tau, nodes = _kernels.branch_pair_search(
        v1, v2, r11, r13, r33, eps_base, d_min, pam.levels, use_breaks)
    return (s1, s2), tau, nodes


def conditional_pam_search_joint(v1, v2, u1, u2, r11, r13, r33,
                                 f11, f13, f33, pam,
                                 eps_base=0.0, d_min=np.inf, use_breaks=True):
    """Joint-observation variant for the doubly-constrained group."""
    vals = (v1, v2, u1, u2, r11, r13, r33, f11, f13, f33, eps_base)
    if not all(np.isfinite(v) for v in vals):
        raise ValueError("nonfinite input to conditional search")
    s1, s2, tau, nodes = _kernels.branch_pair_search_joint(
        v1, v2, u1, u2, r11, r13, r33, f11, f13, f33,
        eps_base, d_min, pam.levels, use_breaks)
    return (s1, s2), tau, nodes
