"""Hot decoding kernels: depth-16 sphere decoder and the group-wise
simplified decoder.

Everything here is written as plain loops over float64 arrays so numba
can compile it; with ``MIMO3D_DISABLE_NUMBA=1`` the same source runs
interpreted (see ``_accel.py``).  All tie handling uses ``TIE_TOL`` and
resolves toward the lexicographically smallest real symbol vector, the
convention shared by all decoders.
"""

import numpy as np

from ._accel import maybe_jit

TIE_TOL = 1e-12


@maybe_jit
def _slice_level(x, levels):
    """Nearest level; distance ties resolve to the smaller level.

    Uses the same rounded |level - x| distances as :func:`_se_fill`, so
    the slice always equals the first element of the S-E order.
    """
    n = levels.shape[0]
    best = levels[0]
    bd = abs(levels[0] - x)
    for k in range(1, n):
        d = abs(levels[k] - x)
        if d < bd:
            bd = d
            best = levels[k]
    return best


@maybe_jit
def _se_fill(center, levels, out):
    """Fill ``out`` with levels by ascending distance to ``center``.

    Stable in the ascending-level input order, so distance ties resolve
    to the smaller level.
    """
    n = levels.shape[0]
    dist = np.empty(n)
    for k in range(n):
        out[k] = levels[k]
        dist[k] = abs(levels[k] - center)
    for k in range(1, n):
        dv = dist[k]
        lv = out[k]
        j = k - 1
        while j >= 0 and dist[j] > dv:
            dist[j + 1] = dist[j]
            out[j + 1] = out[j]
            j -= 1
        dist[j + 1] = dv
        out[j + 1] = lv


@maybe_jit
def _lex_smaller(a, b):
    for k in range(a.shape[0]):
        if a[k] < b[k]:
            return True
        if a[k] > b[k]:
            return False
    return False


@maybe_jit
def _stable_argsort(values):
    n = values.shape[0]
    idx = np.empty(n, dtype=np.int64)
    for k in range(n):
        idx[k] = k
    for k in range(1, n):
        iv = idx[k]
        vv = values[iv]
        j = k - 1
        while j >= 0 and values[idx[j]] > vv:
            idx[j + 1] = idx[j]
            j -= 1
        idx[j + 1] = iv
    return idx


@maybe_jit
def branch_pair_search(v1, v2, r11, r13, r33, eps_base, d_min, levels, use_breaks):
    """Best (sliced, conditioning) PAM pair for one decoupled 2x2 system.

    Minimizes (v1 - r11*s1 - r13*s2)^2 + (v2 - r33*s2)^2 by S-E
    enumeration of the conditioning symbol s2 with a closed-form slice
    of s1.  Returns (s1, s2, branch_metric, nodes); the metric is +inf
    when the break cut the search before any pair was evaluated.
    """
    n = levels.shape[0]
    order = np.empty(n)
    _se_fill(v2 / r33, levels, order)
    tau = np.inf
    b1 = 0.0
    b2 = 0.0
    nodes = 0
    for k in range(n):
        s2 = order[k]
        e2 = (v2 - r33 * s2) ** 2
        if use_breaks and eps_base + e2 > d_min + TIE_TOL:
            break
        s1 = _slice_level((v1 - r13 * s2) / r11, levels)
        e12 = (v1 - r11 * s1 - r13 * s2) ** 2 + e2
        nodes += 1
        if e12 < tau - TIE_TOL:
            tau = e12
            b1 = s1
            b2 = s2
        elif e12 <= tau + TIE_TOL and (s1 < b1 or (s1 == b1 and s2 < b2)):
            b1 = s1
            b2 = s2
            if e12 < tau:
                tau = e12
    return b1, b2, tau, nodes


@maybe_jit
def branch_pair_search_joint(v1, v2, u1, u2, r11, r13, r33, f11, f13, f33,
                             eps_base, d_min, levels, use_breaks):
    """Like :func:`branch_pair_search` for the doubly-observed group:
    minimize (v1-r11*s1-r13*s2)^2 + (v2-r33*s2)^2
           + (u1-f11*s1-f13*s2)^2 + (u2-f33*s2)^2 over PAM pairs.
    """
    n = levels.shape[0]
    den2 = r33 * r33 + f33 * f33
    den1 = r11 * r11 + f11 * f11
    order = np.empty(n)
    _se_fill((r33 * v2 + f33 * u2) / den2, levels, order)
    tau = np.inf
    b1 = 0.0
    b2 = 0.0
    nodes = 0
    for k in range(n):
        s2 = order[k]
        e2 = (v2 - r33 * s2) ** 2 + (u2 - f33 * s2) ** 2
        if use_breaks and eps_base + e2 > d_min + TIE_TOL:
            break
        w1 = v1 - r13 * s2
        wu = u1 - f13 * s2
        s1 = _slice_level((w1 * r11 + wu * f11) / den1, levels)
        e12 = (w1 - r11 * s1) ** 2 + (wu - f11 * s1) ** 2 + e2
        nodes += 1
        if e12 < tau - TIE_TOL:
            tau = e12
            b1 = s1
            b2 = s2
        elif e12 <= tau + TIE_TOL and (s1 < b1 or (s1 == b1 and s2 < b2)):
            b1 = s1
            b2 = s2
            if e12 < tau:
                tau = e12
    return b1, b2, tau, nodes


@maybe_jit
def branch_pair_exhaustive_joint(v1, v2, u1, u2, r11, r13, r33, f11, f13, f33,
                                 levels):
    """Plain double loop over PAM pairs; fallback for degenerate F."""
    n = levels.shape[0]
    tau = np.inf
    b1 = 0.0
    b2 = 0.0
    nodes = 0
    for i in range(n):
        s1 = levels[i]
        for j in range(n):
            s2 = levels[j]
            e = ((v1 - r11 * s1 - r13 * s2) ** 2 + (v2 - r33 * s2) ** 2
                 + (u1 - f11 * s1 - f13 * s2) ** 2 + (u2 - f33 * s2) ** 2)
            nodes += 1
            if e < tau - TIE_TOL:
                tau = e
                b1 = s1
                b2 = s2
    return b1, b2, tau, nodes


@maybe_jit
def sphere_kernel(z, r, levels, prune):
    """Depth-16 real sphere decoder with S-E child ordering.

    Natural column order, infinite initial radius, radius updated on
    every improving leaf.  ``prune=False`` disables radius pruning
    (debug mode: full enumeration, identical argmin).  Returns
    (s_tilde, metric, nodes) with one node per evaluated partial
    distance.
    """
    n = z.shape[0]
    nl = levels.shape[0]
    ordered = np.empty((n, nl))
    kidx = np.zeros(n, dtype=np.int64)
    pdist = np.zeros(n)
    inner = np.zeros(n)
    s = np.zeros(n)
    best = np.zeros(n)
    best_metric = np.inf
    nodes = 0

    i = n - 1
    inner[i] = z[i]
    _se_fill(inner[i] / r[i, i], levels, ordered[i])
    kidx[i] = 0
    pdist[i] = 0.0

    while True:
        if kidx[i] >= nl:
            i += 1
            if i >= n:
                break
            kidx[i] += 1
            continue
        lev = ordered[i, kidx[i]]
        d = pdist[i] + (inner[i] - r[i, i] * lev) ** 2
        nodes += 1
        s[i] = lev
        if prune and d > best_metric + TIE_TOL:
            # S-E order: every remaining child of this depth is farther
            i += 1
            if i >= n:
                break
            kidx[i] += 1
            continue
        if i == 0:
            if d < best_metric - TIE_TOL:
                best_metric = d
                for k in range(n):
                    best[k] = s[k]
            elif d <= best_metric + TIE_TOL and _lex_smaller(s, best):
                for k in range(n):
                    best[k] = s[k]
                if d < best_metric:
                    best_metric = d
            kidx[i] += 1
            continue
        pdist[i - 1] = d
        i -= 1
        acc = z[i]
        for j in range(i + 1, n):
            acc -= r[i, j] * s[j]
        inner[i] = acc
        _se_fill(inner[i] / r[i, i], levels, ordered[i])
        kidx[i] = 0

    return best, best_metric, nodes


@maybe_jit
def simplified_kernel(z, r, e_mat, f, levels, cand, use_breaks, degenerate):
    """Group-wise exact-ML decoder over the structured R factor.

    ``cand`` holds all M^2 realized candidates for a complex symbol
    pair, in ascending lexicographic row order; it parameterizes both
    the sorted outer loop (pair s7,s8) and the plain inner loop (pair
    s3,s4).  For each such conditioning, four independent length-
    sqrt(M) searches recover the remaining real dimensions.

    Returns (s_tilde, metric, branch_nodes[4], n_pair_evals,
    delay_nodes) where delay_nodes accumulates, per conditioning pair,
    one node plus the max of the four parallel branch counts (the sort
    cost is added by the caller).
    """
    m2 = cand.shape[0]
    z12 = z[0:4]
    z34 = z[4:8]
    z56 = z[8:12]
    z78 = z[12:16]

    eps78 = np.empty(m2)
    for m in range(m2):
        acc = 0.0
        for i in range(4):
            t = z78[i]
            for j in range(4):
                t -= r[12 + i, 12 + j] * cand[m, j]
            acc += t * t
        eps78[m] = acc
    order = _stable_argsort(eps78)

    d_min = np.inf
    found = False
    s_best = np.zeros(16)
    s_tmp = np.zeros(16)
    branch_nodes = np.zeros(4, dtype=np.int64)
    n_bd = 0
    delay = 0

    v12 = np.empty(4)
    v34 = np.empty(4)
    v56 = np.empty(4)
    u34 = np.empty(4)

    for ii in range(m2):
        mi = order[ii]
        e78 = eps78[mi]
        if use_breaks and e78 > d_min + TIE_TOL:
            break
        for i in range(4):
            t = z56[i]
            for j in range(4):
                t -= r[8 + i, 12 + j] * cand[mi, j]
            v56[i] = t
        for l in range(m2):
            for i in range(4):
                t = z12[i]
                tt = z34[i]
                for j in range(4):
                    t -= r[i, 4 + j] * cand[l, j] + r[i, 12 + j] * cand[mi, j]
                    tt -= r[4 + i, 4 + j] * cand[l, j] + r[4 + i, 12 + j] * cand[mi, j]
                v12[i] = t
                v34[i] = tt
            for i in range(4):
                t = 0.0
                for j in range(4):
                    t += e_mat[j, i] * v34[j]
                u34[i] = t
            n_bd += 1

            a1r, a2r, tar, nar = branch_pair_search(
                v12[0], v12[2], r[0, 0], r[0, 2], r[2, 2],
                e78, d_min, levels, use_breaks)
            a1i, a2i, tai, nai = branch_pair_search(
                v12[1], v12[3], r[1, 1], r[1, 3], r[3, 3],
                e78, d_min, levels, use_breaks)
            if degenerate:
                c1r, c2r, tcr, ncr = branch_pair_exhaustive_joint(
                    v56[0], v56[2], u34[0], u34[2],
                    r[8, 8], r[8, 10], r[10, 10], f[0, 0], f[0, 2], f[2, 2],
                    levels)
                c1i, c2i, tci, nci = branch_pair_exhaustive_joint(
                    v56[1], v56[3], u34[1], u34[3],
                    r[9, 9], r[9, 11], r[11, 11], f[1, 1], f[1, 3], f[3, 3],
                    levels)
            else:
                c1r, c2r, tcr, ncr = branch_pair_search_joint(
                    v56[0], v56[2], u34[0], u34[2],
                    r[8, 8], r[8, 10], r[10, 10], f[0, 0], f[0, 2], f[2, 2],
                    e78, d_min, levels, use_breaks)
                c1i, c2i, tci, nci = branch_pair_search_joint(
                    v56[1], v56[3], u34[1], u34[3],
                    r[9, 9], r[9, 11], r[11, 11], f[1, 1], f[1, 3], f[3, 3],
                    e78, d_min, levels, use_breaks)

            branch_nodes[0] += nar
            branch_nodes[1] += nai
            branch_nodes[2] += ncr
            branch_nodes[3] += nci
            bmax = nar
            if nai > bmax:
                bmax = nai
            if ncr > bmax:
                bmax = ncr
            if nci > bmax:
                bmax = nci
            delay += 1 + bmax

            if not (np.isfinite(tar) and np.isfinite(tai)
                    and np.isfinite(tcr) and np.isfinite(tci)):
                continue
            tau = e78 + tar + tai + tcr + tci
            if (not found) or tau < d_min - TIE_TOL:
                s_best[0] = a1r
                s_best[1] = a1i
                s_best[2] = a2r
                s_best[3] = a2i
                for j in range(4):
                    s_best[4 + j] = cand[l, j]
                    s_best[12 + j] = cand[mi, j]
                s_best[8] = c1r
                s_best[9] = c1i
                s_best[10] = c2r
                s_best[11] = c2i
                d_min = tau
                found = True
            elif tau <= d_min + TIE_TOL:
                s_tmp[0] = a1r
                s_tmp[1] = a1i
                s_tmp[2] = a2r
                s_tmp[3] = a2i
                for j in range(4):
                    s_tmp[4 + j] = cand[l, j]
                    s_tmp[12 + j] = cand[mi, j]
                s_tmp[8] = c1r
                s_tmp[9] = c1i
                s_tmp[10] = c2r
                s_tmp[11] = c2i
                if _lex_smaller(s_tmp, s_best):
                    for k in range(16):
                        s_best[k] = s_tmp[k]
                    if tau < d_min:
                        d_min = tau

    return s_best, d_min, branch_nodes, n_bd, delay
