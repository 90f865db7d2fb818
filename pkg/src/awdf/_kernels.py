"""Compiled kernels for tree induction, sampling, and prediction.

Everything here is deliberately low-level: trees live in flat integer and
float slabs so that a forest is a handful of contiguous arrays rather
than a pointer jungle, and the whole training loop stays inside numba.

Randomness is a splitmix64 stream held in a one-element uint64 array;
the stream seed for each tree is derived outside (see ``_rng``), so the
kernels themselves are pure functions of their arguments.

Conventions:
  * kind: 0 = random_subspace, 1 = completely_random
  * strategy: 0 = none (plain bootstrap), 1 = resample (weighted
    bootstrap), 2 = weighted_split (plain bootstrap, weights enter the
    entropy criterion)
  * a leaf node has left == right == -1 and feature == -1
  * rows with weight below WEIGHT_FLOOR are dropped before induction,
    which makes zero-weight rows exactly equivalent to absent rows
  * split gains below GAIN_EPS are treated as zero (float noise), so
    "positive gain" is robust against cancellation in the entropy sums
"""

import numpy as np
from numba import int64, njit, uint64

WEIGHT_FLOOR = 1e-12
GAIN_EPS = 1e-12

_U64 = np.uint64
_GAMMA = _U64(0x9E3779B97F4A7C15)
_INV_2_53 = 1.0 / 9007199254740992.0


@njit(cache=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> _U64(30))) * _U64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> _U64(27))) * _U64(0x94D049BB133111EB)
    return z ^ (z >> _U64(31))


@njit(cache=True, inline="always")
def _next_u64(state):
    state[0] = state[0] + _GAMMA
    return _mix64(state[0])


@njit(cache=True, inline="always")
def _next_f64(state):
    """Uniform float in [0, 1)."""
    return (_next_u64(state) >> _U64(11)) * _INV_2_53


@njit(cache=True, inline="always")
def _next_below(state, bound):
    """Uniform integer in [0, bound); bound must fit in 32 bits."""
    x = _next_u64(state) >> _U64(32)
    return int64((x * _U64(bound)) >> _U64(32))


@njit(cache=True, inline="always")
def _entropy(sums, total, n_classes):
    """Shannon entropy (base 2) of class weight sums; 0*log0 := 0."""
    h = 0.0
    for c in range(n_classes):
        if sums[c] > 0.0:
            q = sums[c] / total
            h -= q * np.log2(q)
    return h


@njit(cache=True)
def _scan_feature(X, y, w, idx, start, end, f, csums, total_w, h_parent,
                  n_classes, vals):
    """Best midpoint threshold on feature ``f`` over rows idx[start:end].

    Returns (gain, threshold); gain <= 0 means no usable split. The scan
    sorts the node's values once and sweeps cumulative class weight sums,
    emitting a candidate at every boundary between distinct values.
    """
    cnt = end - start
    for i in range(cnt):
        vals[i] = X[idx[start + i], f]
    order = np.argsort(vals[:cnt])
    lsums = np.zeros(n_classes, np.float64)
    best_gain = 0.0
    best_thr = 0.0
    w_left = 0.0
    for i in range(cnt - 1):
        r = idx[start + order[i]]
        lsums[y[r]] += w[r]
        w_left += w[r]
        v0 = vals[order[i]]
        v1 = vals[order[i + 1]]
        if v0 != v1:
            w_right = total_w - w_left
            h_left = _entropy(lsums, w_left, n_classes)
            h_right = 0.0
            for c in range(n_classes):
                rc = csums[c] - lsums[c]
                if rc > 0.0:
                    q = rc / w_right
                    h_right -= q * np.log2(q)
            gain = h_parent - (w_left * h_left + w_right * h_right) / total_w
            if gain > best_gain:
                thr = v0 + 0.5 * (v1 - v0)
                if thr >= v1:  # degenerate rounding: fall back to left value
                    thr = v0
                best_gain = gain
                best_thr = thr
    return best_gain, best_thr


@njit(cache=True)
def best_split_kernel(X, y, w, idx, feats, n_classes):
    """Exhaustive best weighted-entropy split over given candidate features.

    ``idx`` must contain only positive-weight rows; ``feats`` must be
    sorted ascending (tie-break: lowest feature, then lowest threshold).
    Returns (feature, threshold); feature == -1 means no positive gain.
    """
    n = idx.shape[0]
    csums = np.zeros(n_classes, np.float64)
    total_w = 0.0
    for i in range(n):
        r = idx[i]
        csums[y[r]] += w[r]
        total_w += w[r]
    nonzero = 0
    for c in range(n_classes):
        if csums[c] > 0.0:
            nonzero += 1
    if nonzero <= 1 or n < 2:
        return int64(-1), 0.0
    h_parent = _entropy(csums, total_w, n_classes)
    vals = np.empty(n, np.float64)
    best_gain = GAIN_EPS
    best_f = int64(-1)
    best_thr = 0.0
    for k in range(feats.shape[0]):
        f = feats[k]
        gain, thr = _scan_feature(X, y, w, idx, 0, n, f, csums, total_w,
                                  h_parent, n_classes, vals)
        if gain > best_gain:
            best_gain = gain
            best_f = f
            best_thr = thr
    return best_f, best_thr


@njit(cache=True)
def grow_tree(X, y, idx0, w, n_classes, kind, n_candidates, min_samples_split,
              max_depth, state, feat, thr, left, right, dist, support):
    """Depth-first induction of one tree over rows ``idx0`` of X.

    ``w`` is aligned with X rows; rows whose weight is below WEIGHT_FLOOR
    are dropped up front. Writes into the per-tree slabs and returns the
    number of nodes (>= 1; degenerate input yields a single leaf).
    """
    m = X.shape[1]
    n0 = idx0.shape[0]
    cnt = 0
    for i in range(n0):
        if w[idx0[i]] >= WEIGHT_FLOOR:
            cnt += 1
    idx = np.empty(max(cnt, 1), np.int64)
    j = 0
    for i in range(n0):
        if w[idx0[i]] >= WEIGHT_FLOOR:
            idx[j] = idx0[i]
            j += 1
    if cnt == 0:  # callers guarantee positive total weight; belt and braces
        feat[0] = -1
        thr[0] = 0.0
        left[0] = -1
        right[0] = -1
        for c in range(n_classes):
            dist[0, c] = 1.0 / n_classes
            support[0, c] = 0.0
        return 1

    scratch = np.empty(cnt, np.int64)
    vals = np.empty(cnt, np.float64)
    featbuf = np.arange(m)
    csums = np.empty(n_classes, np.float64)

    # stack rows: node id, start, end, depth
    stack = np.empty((2 * cnt + 4, 4), np.int64)
    stack[0, 0] = 0
    stack[0, 1] = 0
    stack[0, 2] = cnt
    stack[0, 3] = 0
    top = 1
    n_nodes = 1
    while top > 0:
        top -= 1
        node = stack[top, 0]
        start = stack[top, 1]
        end = stack[top, 2]
        depth = stack[top, 3]
        nrows = end - start

        for c in range(n_classes):
            csums[c] = 0.0
        total_w = 0.0
        for i in range(start, end):
            r = idx[i]
            csums[y[r]] += w[r]
            total_w += w[r]
        for c in range(n_classes):
            support[node, c] = csums[c]
        nonzero = 0
        for c in range(n_classes):
            if csums[c] > 0.0:
                nonzero += 1

        make_leaf = (nonzero <= 1 or nrows < min_samples_split
                     or (max_depth > 0 and depth >= max_depth))
        best_f = int64(-1)
        best_thr = 0.0
        if not make_leaf:
            if kind == 0:
                h_parent = _entropy(csums, total_w, n_classes)
                # draw n_candidates distinct features, scan in ascending
                # order so gain ties resolve to the lowest feature index
                for i in range(n_candidates):
                    j2 = i + _next_below(state, m - i)
                    tmp = featbuf[i]
                    featbuf[i] = featbuf[j2]
                    featbuf[j2] = tmp
                for i in range(1, n_candidates):
                    v = featbuf[i]
                    j2 = i - 1
                    while j2 >= 0 and featbuf[j2] > v:
                        featbuf[j2 + 1] = featbuf[j2]
                        j2 -= 1
                    featbuf[j2 + 1] = v
                best_gain = GAIN_EPS
                for k in range(n_candidates):
                    f = featbuf[k]
                    gain, t = _scan_feature(X, y, w, idx, start, end, f,
                                            csums, total_w, h_parent,
                                            n_classes, vals)
                    if gain > best_gain:
                        best_gain = gain
                        best_f = f
                        best_thr = t
            else:
                # completely random: uniform feature, uniform threshold in
                # [min, max); up to m attempts to find a non-constant feature
                for _ in range(m):
                    f = _next_below(state, m)
                    lo = X[idx[start], f]
                    hi = lo
                    for i in range(start + 1, end):
                        v = X[idx[i], f]
                        if v < lo:
                            lo = v
                        if v > hi:
                            hi = v
                    if hi > lo:
                        t = lo + _next_f64(state) * (hi - lo)
                        if t >= hi:  # degenerate rounding
                            t = lo
                        best_f = f
                        best_thr = t
                        break
            if best_f < 0:
                make_leaf = True

        if make_leaf:
            feat[node] = -1
            thr[node] = 0.0
            left[node] = -1
            right[node] = -1
            for c in range(n_classes):
                dist[node, c] = csums[c] / total_w
            continue

        # stable partition of idx[start:end) on value <= threshold
        n_left = 0
        for i in range(start, end):
            if X[idx[i], best_f] <= best_thr:
                n_left += 1
        p_left = 0
        p_right = n_left
        for i in range(start, end):
            if X[idx[i], best_f] <= best_thr:
                scratch[p_left] = idx[i]
                p_left += 1
            else:
                scratch[p_right] = idx[i]
                p_right += 1
        for i in range(nrows):
            idx[start + i] = scratch[i]

        lid = n_nodes
        rid = n_nodes + 1
        n_nodes += 2
        feat[node] = best_f
        thr[node] = best_thr
        left[node] = lid
        right[node] = rid
        for c in range(n_classes):
            dist[node, c] = csums[c] / total_w
        stack[top, 0] = rid
        stack[top, 1] = start + n_left
        stack[top, 2] = end
        stack[top, 3] = depth + 1
        top += 1
        stack[top, 0] = lid
        stack[top, 1] = start
        stack[top, 2] = start + n_left
        stack[top, 3] = depth + 1
        top += 1
    return n_nodes


@njit(cache=True, inline="always")
def _draw_index(state, cum, total):
    """Inverse-CDF draw from a cumulative weight array (first cum > u)."""
    n = cum.shape[0]
    u = _next_f64(state) * total
    lo = 0
    hi = n - 1
    while lo < hi:
        mid = (lo + hi) >> 1
        if cum[mid] > u:
            hi = mid
        else:
            lo = mid + 1
    return lo


@njit(cache=True)
def fit_forest_kernel(X, y, w, n_classes, n_trees, kind, strategy, seeds,
                      min_samples_split, max_depth,
                      feat, thr, left, right, dist, support, n_nodes):
    """Train ``n_trees`` trees into preallocated slabs.

    Per tree: seed its stream, draw a size-n bootstrap (weight-proportional
    for strategy 1, uniform otherwise — both via the same inverse-CDF path,
    so uniform weights reproduce the plain bootstrap draw for draw), then
    grow. Strategy 2 passes the original per-row weights into induction;
    strategies 0 and 1 grow with unit weights.
    """
    n = X.shape[0]
    m = X.shape[1]
    n_candidates = int(np.ceil(np.sqrt(m)))
    if strategy == 1:
        sampw = w
    else:
        sampw = np.ones(n, np.float64)
    cum = np.empty(n, np.float64)
    total = 0.0
    for i in range(n):
        total += sampw[i]
        cum[i] = total
    if strategy == 2:
        groww = w
    else:
        groww = np.ones(n, np.float64)
    state = np.empty(1, np.uint64)
    idx = np.empty(n, np.int64)
    unit = np.ones(n, np.float64)
    for t in range(n_trees):
        state[0] = seeds[t]
        for i in range(n):
            sel = _draw_index(state, cum, total)
            while sampw[sel] < WEIGHT_FLOOR:  # u == total edge case
                sel -= 1
            idx[i] = sel
        if strategy == 2:
            n_nodes[t] = grow_tree(X, y, idx, groww, n_classes, kind,
                                   n_candidates, min_samples_split, max_depth,
                                   state, feat[t], thr[t], left[t], right[t],
                                   dist[t], support[t])
        else:
            n_nodes[t] = grow_tree(X, y, idx, unit, n_classes, kind,
                                   n_candidates, min_samples_split, max_depth,
                                   state, feat[t], thr[t], left[t], right[t],
                                   dist[t], support[t])


@njit(cache=True)
def predict_forest_kernel(Xq, feat, thr, left, right, dist, out):
    """Mean leaf distribution over all trees for every query row."""
    n_trees = feat.shape[0]
    nq = Xq.shape[0]
    n_classes = dist.shape[2]
    for t in range(n_trees):
        for i in range(nq):
            node = 0
            while left[t, node] >= 0:
                if Xq[i, feat[t, node]] <= thr[t, node]:
                    node = left[t, node]
                else:
                    node = right[t, node]
            for c in range(n_classes):
                out[i, c] += dist[t, node, c]
    inv = 1.0 / n_trees
    for i in range(nq):
        for c in range(n_classes):
            out[i, c] *= inv
