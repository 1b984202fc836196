"""Numba kernels for tree construction, tree prediction, and SMO.

Trees are flat parallel arrays: feature[i] < 0 marks a leaf and value[i]
holds its prediction. All randomness comes from an explicit splitmix64
state so results are identical across platforms and runs.
"""

from __future__ import annotations

import numpy as np
from numba import njit, uint64

_MIX_GAMMA = uint64(0x9E3779B97F4A7C15)
_MIX_M1 = uint64(0xBF58476D1CE4E5B9)
_MIX_M2 = uint64(0x94D049BB133111EB)


@njit(cache=True, inline="always")
def _mix64(state):
    state = state + _MIX_GAMMA
    z = state
    z = (z ^ (z >> uint64(30))) * _MIX_M1
    z = (z ^ (z >> uint64(27))) * _MIX_M2
    z = z ^ (z >> uint64(31))
    return state, z


@njit(cache=True, inline="always")
def _rand_below(state, n):
    state, z = _mix64(state)
    return state, np.int64(z % uint64(n))


@njit(cache=True)
def build_class_tree(X, y, order, max_depth, min_split, min_leaf, n_sub_features,
                     rng_state):
    """CART with Gini impurity over the rows listed in ``order``.

    An impure node splits whenever a valid split exists (Gini never worsens
    under splitting, so zero-gain splits are taken). Candidate features are a
    random subset per node; thresholds sit on the left value of each distinct
    adjacent pair with the rule x <= threshold goes left.
    """
    n = order.shape[0]
    p = X.shape[1]
    max_nodes = 2 * n + 1
    feature = np.full(max_nodes, -1, dtype=np.int64)
    threshold = np.zeros(max_nodes, dtype=np.float64)
    left = np.full(max_nodes, -1, dtype=np.int64)
    right = np.full(max_nodes, -1, dtype=np.int64)
    value = np.zeros(max_nodes, dtype=np.float64)

    # stack of (node, start, end, depth) over segments of ``order``
    stack = np.empty((max_nodes, 4), dtype=np.int64)
    perm = np.empty(p, dtype=np.int64)
    vals = np.empty(n, dtype=np.float64)
    labs = np.empty(n, dtype=np.int64)
    buf = np.empty(n, dtype=np.int64)

    n_nodes = 1
    top = 0
    stack[0, 0] = 0
    stack[0, 1] = 0
    stack[0, 2] = n
    stack[0, 3] = 0
    top = 1
    state = rng_state

    while top > 0:
        top -= 1
        node = stack[top, 0]
        start = stack[top, 1]
        end = stack[top, 2]
        depth = stack[top, 3]
        m = end - start

        pos = 0
        for t in range(start, end):
            pos += y[order[t]]
        value[node] = pos / m

        if pos == 0 or pos == m or depth >= max_depth or m < min_split or m < 2 * min_leaf:
            continue

        # random feature subset without replacement
        for f in range(p):
            perm[f] = f
        kf = n_sub_features if n_sub_features < p else p
        for t in range(kf):
            state, r = _rand_below(state, p - t)
            j = t + r
            tmp = perm[t]
            perm[t] = perm[j]
            perm[j] = tmp

        best_score = -1.0
        best_f = -1
        best_thr = 0.0
        parent_gini = 1.0 - (pos / m) ** 2 - ((m - pos) / m) ** 2

        for fi in range(kf):
            f = perm[fi]
            for t in range(m):
                vals[t] = X[order[start + t], f]
            srt = np.argsort(vals[:m])
            for t in range(m):
                labs[t] = y[order[start + srt[t]]]
            lp = 0
            for cut in range(m - 1):
                lp += labs[cut]
                if vals[srt[cut]] == vals[srt[cut + 1]]:
                    continue
                l = cut + 1
                r_sz = m - l
                if l < min_leaf or r_sz < min_leaf:
                    continue
                rp = pos - lp
                gl = 1.0 - (lp / l) ** 2 - ((l - lp) / l) ** 2
                gr = 1.0 - (rp / r_sz) ** 2 - ((r_sz - rp) / r_sz) ** 2
                gain = parent_gini - (l * gl + r_sz * gr) / m
                if gain > best_score:
                    best_score = gain
                    best_f = f
                    best_thr = vals[srt[cut]]
        if best_f < 0:
            continue

        # partition the segment, preserving relative order for determinism
        nl = 0
        for t in range(start, end):
            if X[order[t], best_f] <= best_thr:
                buf[nl] = order[t]
                nl += 1
        nr = nl
        for t in range(start, end):
            if X[order[t], best_f] > best_thr:
                buf[nr] = order[t]
                nr += 1
        for t in range(m):
            order[start + t] = buf[t]

        feature[node] = best_f
        threshold[node] = best_thr
        left[node] = n_nodes
        right[node] = n_nodes + 1
        stack[top, 0] = n_nodes
        stack[top, 1] = start
        stack[top, 2] = start + nl
        stack[top, 3] = depth + 1
        top += 1
        stack[top, 0] = n_nodes + 1
        stack[top, 1] = start + nl
        stack[top, 2] = end
        stack[top, 3] = depth + 1
        top += 1
        n_nodes += 2

    return (feature[:n_nodes], threshold[:n_nodes], left[:n_nodes],
            right[:n_nodes], value[:n_nodes], state)


@njit(cache=True)
def build_reg_tree(X, grad, hess, max_depth, min_leaf, leaf_clamp):
    """Squared-error regression tree on ``grad``; leaves take a clamped Newton
    step sum(grad) / sum(hess) over their members. All features are candidates.
    """
    n = X.shape[0]
    p = X.shape[1]
    max_nodes = 2 * n + 1
    feature = np.full(max_nodes, -1, dtype=np.int64)
    threshold = np.zeros(max_nodes, dtype=np.float64)
    left = np.full(max_nodes, -1, dtype=np.int64)
    right = np.full(max_nodes, -1, dtype=np.int64)
    value = np.zeros(max_nodes, dtype=np.float64)

    order = np.arange(n)
    stack = np.empty((max_nodes, 4), dtype=np.int64)
    vals = np.empty(n, dtype=np.float64)
    gs = np.empty(n, dtype=np.float64)
    buf = np.empty(n, dtype=np.int64)

    n_nodes = 1
    stack[0, 0] = 0
    stack[0, 1] = 0
    stack[0, 2] = n
    stack[0, 3] = 0
    top = 1

    while top > 0:
        top -= 1
        node = stack[top, 0]
        start = stack[top, 1]
        end = stack[top, 2]
        depth = stack[top, 3]
        m = end - start

        gsum = 0.0
        hsum = 0.0
        for t in range(start, end):
            gsum += grad[order[t]]
            hsum += hess[order[t]]
        step = gsum / hsum if hsum > 1e-12 else 0.0
        if step > leaf_clamp:
            step = leaf_clamp
        elif step < -leaf_clamp:
            step = -leaf_clamp
        value[node] = step

        if depth >= max_depth or m < 2 * min_leaf or m < 2:
            continue

        best_score = -1e-12  # require a strictly positive variance reduction
        best_f = -1
        best_thr = 0.0

        for f in range(p):
            for t in range(m):
                vals[t] = X[order[start + t], f]
            srt = np.argsort(vals[:m])
            for t in range(m):
                gs[t] = grad[order[start + srt[t]]]
            gl = 0.0
            for cut in range(m - 1):
                gl += gs[cut]
                if vals[srt[cut]] == vals[srt[cut + 1]]:
                    continue
                l = cut + 1
                r_sz = m - l
                if l < min_leaf or r_sz < min_leaf:
                    continue
                gr = gsum - gl
                score = gl * gl / l + gr * gr / r_sz - gsum * gsum / m
                if score > best_score:
                    best_score = score
                    best_f = f
                    best_thr = vals[srt[cut]]
        if best_f < 0:
            continue

        nl = 0
        for t in range(start, end):
            if X[order[t], best_f] <= best_thr:
                buf[nl] = order[t]
                nl += 1
        nr = nl
        for t in range(start, end):
            if X[order[t], best_f] > best_thr:
                buf[nr] = order[t]
                nr += 1
        for t in range(m):
            order[start + t] = buf[t]

        feature[node] = best_f
        threshold[node] = best_thr
        left[node] = n_nodes
        right[node] = n_nodes + 1
        stack[top, 0] = n_nodes
        stack[top, 1] = start
        stack[top, 2] = start + nl
        stack[top, 3] = depth + 1
        top += 1
        stack[top, 0] = n_nodes + 1
        stack[top, 1] = start + nl
        stack[top, 2] = end
        stack[top, 3] = depth + 1
        top += 1
        n_nodes += 2

    return (feature[:n_nodes], threshold[:n_nodes], left[:n_nodes],
            right[:n_nodes], value[:n_nodes])


@njit(cache=True)
def tree_accumulate(feature, threshold, left, right, value, X, out):
    for r in range(X.shape[0]):
        node = 0
        while feature[node] >= 0:
            if X[r, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[r] += value[node]


@njit(cache=True, inline="always")
def _smo_try_pair(K, y, C, alphas, errors, b, i, j):
    """Attempt one two-variable update; returns (changed, new_b)."""
    eps = 1e-12
    a_i_old = alphas[i]
    a_j_old = alphas[j]
    e_i = errors[i]
    e_j = errors[j]
    if y[i] != y[j]:
        lo = max(0.0, a_j_old - a_i_old)
        hi = min(C, C + a_j_old - a_i_old)
    else:
        lo = max(0.0, a_i_old + a_j_old - C)
        hi = min(C, a_i_old + a_j_old)
    if hi - lo < eps:
        return False, b
    eta = 2.0 * K[i, j] - K[i, i] - K[j, j]
    if eta < -eps:
        a_j = a_j_old - y[j] * (e_i - e_j) / eta
        if a_j > hi:
            a_j = hi
        elif a_j < lo:
            a_j = lo
    else:
        # flat or positive curvature: evaluate the dual objective change
        # dW = g*d + eta/2*d^2 at both clip endpoints and take the better one
        g = y[j] * (e_i - e_j)
        d_lo = lo - a_j_old
        d_hi = hi - a_j_old
        w_lo = g * d_lo + 0.5 * eta * d_lo * d_lo
        w_hi = g * d_hi + 0.5 * eta * d_hi * d_hi
        if w_lo > w_hi and w_lo > 1e-14:
            a_j = lo
        elif w_hi >= w_lo and w_hi > 1e-14:
            a_j = hi
        else:
            return False, b
    if abs(a_j - a_j_old) < eps:
        return False, b
    a_i = a_i_old + y[i] * y[j] * (a_j_old - a_j)

    d_i = y[i] * (a_i - a_i_old)
    d_j = y[j] * (a_j - a_j_old)
    b1 = b - e_i - d_i * K[i, i] - d_j * K[i, j]
    b2 = b - e_j - d_i * K[i, j] - d_j * K[j, j]
    if eps < a_i < C - eps:
        b_new = b1
    elif eps < a_j < C - eps:
        b_new = b2
    else:
        b_new = 0.5 * (b1 + b2)

    alphas[i] = a_i
    alphas[j] = a_j
    delta_b = b_new - b
    n = K.shape[0]
    for k in range(n):
        errors[k] += d_i * K[i, k] + d_j * K[j, k] + delta_b
    return True, b_new


@njit(cache=True)
def smo_solve(K, y, C, tol, max_passes, rng_state):
    """Sequential minimal optimization on the soft-margin dual.

    Returns (alphas, b, kkt_residual, passes_used). ``y`` must be +/-1. Each
    sweep examines every point; violators first try the max |E_i - E_j|
    partner, then every other point from a random offset. Terminates when a
    sweep changes nothing.
    """
    n = K.shape[0]
    alphas = np.zeros(n)
    b = 0.0
    errors = np.empty(n)
    for i in range(n):
        errors[i] = -y[i]  # f = 0 initially
    eps = 1e-12
    state = rng_state

    passes = 0
    while passes < max_passes:
        num_changed = 0
        for i in range(n):
            e_i = errors[i]
            r_i = e_i * y[i]
            if not ((r_i < -tol and alphas[i] < C - eps) or (r_i > tol and alphas[i] > eps)):
                continue

            best_j = -1
            best_gap = -1.0
            for j in range(n):
                if j == i:
                    continue
                gap = abs(e_i - errors[j])
                if gap > best_gap:
                    best_gap = gap
                    best_j = j
            changed, b = _smo_try_pair(K, y, C, alphas, errors, b, i, best_j)
            if not changed:
                state, offset = _rand_below(state, n)
                for t in range(n):
                    j = (offset + t) % n
                    if j == i or j == best_j:
                        continue
                    changed, b = _smo_try_pair(K, y, C, alphas, errors, b, i, j)
                    if changed:
                        break
            if changed:
                num_changed += 1
        passes += 1
        if num_changed == 0:
            break

    # report the residual from freshly computed margins, not the drifting cache
    residual = 0.0
    for i in range(n):
        f_i = b
        for k in range(n):
            if alphas[k] > eps:
                f_i += alphas[k] * y[k] * K[k, i]
        yf = y[i] * f_i
        if alphas[i] <= eps:
            v = 1.0 - yf
        elif alphas[i] >= C - eps:
            v = yf - 1.0
        else:
            v = abs(yf - 1.0)
        if v > residual:
            residual = v
    return alphas, b, residual, passes
