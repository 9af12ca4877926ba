"""Compiled search kernels for the path problems.

Entries of the distance matrix D are the candidate atoms 0..n-1, then the
start point (index n) and, in two-point mode, the end point (index n+1).
"""
import numpy as np
from numba import njit, types
from numba.typed import Dict

_KEY = types.UniTuple(types.int64, 3)
WORD = 63


@njit(cache=True, inline="always")
def _has(lo, hi, a):
    if a < WORD:
        return (lo >> a) & 1
    return (hi >> (a - WORD)) & 1


@njit(cache=True, inline="always")
def _bit(a):
    if a < WORD:
        return np.int64(1) << a, np.int64(0)
    return np.int64(0), np.int64(1) << (a - WORD)


@njit(cache=True)
def _knapsack_bound(cur, k_used, mlo, mhi, D, mass, w, order, end, two_point, ell, cap, tol):
    # fractional knapsack over the unvisited atoms still reachable from cur
    bound = 0.0
    for t in range(order.shape[0]):
        a = order[t]
        if _has(mlo, mhi, a):
            continue
        reach = k_used + D[cur, a]
        if two_point:
            reach += D[a, end]
        if reach > ell + tol:
            continue
        if w[a] <= cap:
            cap -= w[a]
            bound += mass[a]
        else:
            if w[a] > 0.0:
                bound += mass[a] * cap / w[a]
            break
    return bound


@njit(cache=True)
def path_search(D, mass, w, order, nbr, two_point, ell, corr, budget, memo_cap, tol, eps):
    """Depth-first branch and bound over ordered atom sequences.

    Returns (best mass, best sequence length, sequence buffer, nodes, aborted).
    best mass is -1 when no path is feasible (two-point, |x - y| > ell).
    """
    n = mass.shape[0]
    start = n
    end = n + 1
    seq = np.empty(n + 1, np.int64)
    used = np.zeros(n + 2)
    msum = np.zeros(n + 2)
    mlo = np.zeros(n + 2, np.int64)
    mhi = np.zeros(n + 2, np.int64)
    ptr = np.zeros(n + 2, np.int64)
    entered = np.zeros(n + 2, np.bool_)
    best_seq = np.empty(n + 1, np.int64)
    best_k = 0
    best = -1.0
    if two_point and D[start, end] > ell + tol:
        return best, best_k, best_seq, 0, False
    memo = Dict.empty(key_type=_KEY, value_type=types.float64)
    nodes = 0
    aborted = False
    depth = 0
    while depth >= 0:
        k = depth
        cur = start if k == 0 else seq[k - 1]
        if not entered[k]:
            entered[k] = True
            ptr[k] = 0
            nodes += 1
            if nodes > budget:
                aborted = True
                break
            if msum[k] > best:
                best = msum[k]
                best_k = k
                for i in range(k):
                    best_seq[i] = seq[i]
            if k > 0:
                key = (mlo[k], mhi[k], cur)
                if key in memo and memo[key] <= used[k]:
                    entered[k] = False
                    depth -= 1
                    continue
                if len(memo) < memo_cap:
                    memo[key] = used[k]
            cap = ell - used[k]
            if not two_point:
                cap += corr
            ub = msum[k] + _knapsack_bound(cur, used[k], mlo[k], mhi[k], D, mass, w, order, end,
                                           two_point, ell, cap, tol)
            if ub <= best + eps:
                entered[k] = False
                depth -= 1
                continue
        pushed = False
        while ptr[k] < n:
            a = nbr[cur, ptr[k]]
            ptr[k] += 1
            if _has(mlo[k], mhi[k], a):
                continue
            nl = used[k] + D[cur, a]
            if two_point:
                if nl + D[a, end] > ell + tol:
                    continue
            elif nl > ell + tol:
                continue
            seq[k] = a
            used[k + 1] = nl
            msum[k + 1] = msum[k] + mass[a]
            blo, bhi = _bit(a)
            mlo[k + 1] = mlo[k] | blo
            mhi[k + 1] = mhi[k] | bhi
            entered[k + 1] = False
            depth += 1
            pushed = True
            break
        if not pushed:
            entered[k] = False
            depth -= 1
    return best, best_k, best_seq, nodes, aborted


@njit(cache=True)
def ratio_search(D, mass, nn, ell_max, floor_len, budget, tol):
    """max over paths from the start (index n) of mass / max(floor_len, length)
    with length <= ell_max.

    Bound at a node with mass M and length L: adding j more atoms costs at
    least the sum of the j smallest remaining nn weights W_j, so the ratio is
    at most max_j (M + top_j mass) / max(floor_len, L + W_j), taken with
    the j cheapest weights and the j heaviest masses separately.
    """
    n = mass.shape[0]
    start = n
    seq = np.empty(n + 1, np.int64)
    used = np.zeros(n + 2)
    msum = np.zeros(n + 2)
    mlo = np.zeros(n + 2, np.int64)
    mhi = np.zeros(n + 2, np.int64)
    ptr = np.zeros(n + 2, np.int64)
    entered = np.zeros(n + 2, np.bool_)
    worder = np.argsort(nn)
    morder = np.argsort(-mass)
    best = 0.0
    best_len = 0.0
    best_mass = 0.0
    nodes = 0
    aborted = False
    depth = 0
    while depth >= 0:
        k = depth
        cur = start if k == 0 else seq[k - 1]
        if not entered[k]:
            entered[k] = True
            ptr[k] = 0
            nodes += 1
            if nodes > budget:
                aborted = True
                break
            r = msum[k] / max(floor_len, used[k])
            if r > best:
                best = r
                best_len = used[k]
                best_mass = msum[k]
            # bound
            ub = r
            wsum = used[k]
            madd = msum[k]
            ia = 0
            ib = 0
            while True:
                while ia < n and _has(mlo[k], mhi[k], worder[ia]):
                    ia += 1
                while ib < n and _has(mlo[k], mhi[k], morder[ib]):
                    ib += 1
                if ia >= n or ib >= n:
                    break
                wsum += nn[worder[ia]]
                madd += mass[morder[ib]]
                ia += 1
                ib += 1
                if wsum > ell_max + tol:
                    break
                rr = madd / max(floor_len, wsum)
                if rr > ub:
                    ub = rr
            if ub <= best:
                entered[k] = False
                depth -= 1
                continue
        pushed = False
        while ptr[k] < n:
            a = ptr[k]
            ptr[k] += 1
            if _has(mlo[k], mhi[k], a):
                continue
            nl = used[k] + D[cur, a]
            if nl > ell_max + tol:
                continue
            seq[k] = a
            used[k + 1] = nl
            msum[k + 1] = msum[k] + mass[a]
            blo, bhi = _bit(a)
            mlo[k + 1] = mlo[k] | blo
            mhi[k + 1] = mhi[k] | bhi
            entered[k + 1] = False
            depth += 1
            pushed = True
            break
        if not pushed:
            entered[k] = False
            depth -= 1
    return best, best_mass, best_len, nodes, aborted


@njit(cache=True)
def _prim(D, idx, k):
    # MST length over the first k entries of idx
    if k <= 1:
        return 0.0
    best = np.empty(k)
    used = np.zeros(k, np.bool_)
    for t in range(k):
        best[t] = D[idx[0], idx[t]]
    used[0] = True
    total = 0.0
    for _ in range(k - 1):
        j = -1
        bj = np.inf
        for t in range(k):
            if not used[t] and best[t] < bj:
                bj = best[t]
                j = t
        total += bj
        used[j] = True
        for t in range(k):
            if not used[t]:
                dd = D[idx[j], idx[t]]
                if dd < best[t]:
                    best[t] = dd
    return total


@njit(cache=True)
def animal_search(D, mass, nn, order_ratio, suffix_nnmax, n, na, ell, sigma, budget, tol, eps,
                  nsum0, nmax0):
    """Include/exclude branch and bound over atoms 0..n-1 (heaviest first).

    D covers the atoms then the na anchors (indices n..n+na-1). A set S is
    feasible when mst(S) + sum over anchors of d(anchor, S) <= ell. Returns
    (best mass, chosen mask, nodes, aborted)."""
    S = np.empty(n + na, np.int64)
    work = np.empty(n + na, np.int64)
    stage = np.zeros(n + 1, np.int64)
    m_at = np.zeros(n + 1)
    ns_at = np.zeros(n + 1)
    nm_at = np.zeros(n + 1)
    k_at = np.zeros(n + 1, np.int64)
    best = 0.0
    best_mask = np.zeros(n, np.bool_)
    nodes = 0
    aborted = False
    ns_at[0] = nsum0
    nm_at[0] = nmax0
    i = 0
    while i >= 0:
        if stage[i] == 0:
            nodes += 1
            if nodes > budget:
                aborted = True
                break
            if i == n:
                i -= 1
                continue
            # fractional knapsack on the atoms still undecided
            cap = ell - ns_at[i] + max(nm_at[i], suffix_nnmax[i]) + tol
            ub = m_at[i]
            for t in range(order_ratio.shape[0]):
                j = order_ratio[t]
                if j < i:
                    continue
                if nn[j] <= cap:
                    cap -= nn[j]
                    ub += mass[j]
                else:
                    if nn[j] > 0:
                        ub += mass[j] * cap / nn[j]
                    break
            if ub <= best + eps:
                i -= 1
                continue
            stage[i] = 1
            k = k_at[i]
            S[k] = i
            ns = ns_at[i] + nn[i]
            nm = max(nm_at[i], nn[i])
            lb = ns - nm
            for t in range(k + 1):
                work[t] = S[t]
            for a in range(na):
                work[k + 1 + a] = n + a
            sb = sigma * _prim(D, work, k + 1 + na)
            if sb > lb:
                lb = sb
            if lb <= ell + tol:
                m2 = m_at[i] + mass[i]
                if m2 > best + eps:
                    c = _prim(D, S, k + 1)
                    for a in range(na):
                        dm = np.inf
                        for t in range(k + 1):
                            if D[n + a, S[t]] < dm:
                                dm = D[n + a, S[t]]
                        c += dm
                    if c <= ell + tol:
                        best = m2
                        best_mask[:] = False
                        for t in range(k + 1):
                            best_mask[S[t]] = True
                stage[i + 1] = 0
                m_at[i + 1] = m2
                ns_at[i + 1] = ns
                nm_at[i + 1] = nm
                k_at[i + 1] = k + 1
                i += 1
                continue
        if stage[i] == 1:
            stage[i] = 2
            stage[i + 1] = 0
            m_at[i + 1] = m_at[i]
            ns_at[i + 1] = ns_at[i]
            nm_at[i + 1] = nm_at[i]
            k_at[i + 1] = k_at[i]
            i += 1
            continue
        stage[i] = 0
        i -= 1
    return best, best_mask, nodes, aborted
