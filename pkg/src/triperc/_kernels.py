"""Compiled inner loops shared by the public modules."""

from __future__ import annotations

import numpy as np
from numba import njit

RED = 0
BLUE = 1


@njit(cache=True)
def orbits(perm):
    """Orbit label of every element of a permutation, plus the orbit sizes."""
    n = perm.shape[0]
    label = np.full(n, -1, dtype=np.int64)
    sizes = np.zeros(n, dtype=np.int64)
    k = 0
    for h in range(n):
        if label[h] >= 0:
            continue
        g = h
        size = 0
        while label[g] < 0:
            label[g] = k
            g = perm[g]
            size += 1
        if g != h:
            return label, sizes[:0], -1
        sizes[k] = size
        k += 1
    return label, sizes[:k], k


@njit(cache=True)
def bfs_csr(indptr, indices, source):
    n = indptr.shape[0] - 1
    dist = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    dist[source] = 0
    queue[0] = source
    head = 0
    tail = 1
    while head < tail:
        u = queue[head]
        head += 1
        du = dist[u] + 1
        for k in range(indptr[u], indptr[u + 1]):
            w = indices[k]
            if dist[w] < 0:
                dist[w] = du
                queue[tail] = w
                tail += 1
    return dist


@njit(cache=True)
def matching_kernel(codes, L, R, match_of, match_a, match_b):
    """Parenthesis matching of a-steps (b-steps) against c-steps on L (R)."""
    n = codes.shape[0]
    stack_a = np.empty(n, dtype=np.int64)
    stack_b = np.empty(n, dtype=np.int64)
    ta = 0
    tb = 0
    for k in range(n):
        s = k + 1
        c = codes[k]
        if c == 0:
            stack_a[ta] = s
            ta += 1
        elif c == 1:
            stack_b[tb] = s
            tb += 1
        else:
            if ta > 0:
                ta -= 1
                i = stack_a[ta]
                match_a[s] = i
                match_of[i] = s
            if tb > 0:
                tb -= 1
                i = stack_b[tb]
                match_b[s] = i
                match_of[i] = s


# ---------------------------------------------------------------------------
# map -> walk


@njit(cache=True)
def phi_kernel(twin, nxt, origin, face_of, outer_face, on_boundary, colors, root, n_faces):
    """Space-filling peeling exploration.

    Returns ``(codes, order, status)``; ``order[i]`` is the oriented root
    half-edge at time ``i``.  ``status`` is 0 on success.
    """
    H = twin.shape[0]
    N = H // 2
    codes = np.empty(N, dtype=np.int8)
    order = np.empty(N, dtype=np.int64)
    dead = np.zeros(n_faces, dtype=np.bool_)
    dead[outer_face] = True
    exposed = on_boundary.copy()
    col = colors.copy()
    # stack entries: kind 0 = pending root, kind 1 = color to restore
    st_kind = np.empty(2 * N + 2, dtype=np.int8)
    st_val = np.empty(2 * N + 2, dtype=np.int64)
    st_col = np.empty(2 * N + 2, dtype=np.int8)
    top = 0
    r = root
    i = 0
    while True:
        if i >= N:
            return codes, order, 1
        order[i] = r
        f = face_of[twin[r]]
        if dead[f]:
            codes[i] = 2
            i += 1
            found = False
            while top > 0:
                top -= 1
                if st_kind[top] == 1:
                    col[st_val[top]] = st_col[top]
                else:
                    r = st_val[top]
                    found = True
                    break
            if not found:
                break
            continue
        dead[f] = True
        h2 = nxt[r]
        h3 = nxt[twin[h2]]
        v = origin[h3]
        if not exposed[v]:
            exposed[v] = True
            if col[v] == RED:
                codes[i] = 0
                r = h3
            else:
                codes[i] = 1
                r = h2
        else:
            if col[v] == RED:
                codes[i] = 1
                inner_root, outer_root = h2, h3
            else:
                codes[i] = 0
                inner_root, outer_root = h3, h2
            st_kind[top] = 0
            st_val[top] = outer_root
            top += 1
            st_kind[top] = 1
            st_val[top] = v
            st_col[top] = col[v]
            top += 1
            col[v] = 1 - col[v]
            r = inner_root
        i += 1
    if i != N:
        return codes, order, 2
    return codes, order, 0


# ---------------------------------------------------------------------------
# walk -> map


@njit(cache=True)
def _find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nx = parent[x]
        parent[x] = root
        x = nx
    return root


@njit(cache=True)
def phi_inverse_kernel(codes, match_of, key):
    """Glue the map encoded by a member walk, processing steps right to left.

    Edge ``i`` of the output is the ``i``-th explored edge: half-edge ``2i``
    carries the exploration orientation and ``2i + 1`` is its twin.
    Returns ``(twin, next, origin, colors, status)`` with dense vertex ids.
    """
    N = codes.shape[0]
    H = 2 * N
    twin = np.empty(H, dtype=np.int64)
    nxt = np.empty(H, dtype=np.int64)
    prv = np.empty(H, dtype=np.int64)
    org = np.empty(H, dtype=np.int64)
    parent = np.empty(H + 2, dtype=np.int64)
    vcol = np.empty(H + 2, dtype=np.int8)
    nv = 0
    comp = np.empty(N + 1, dtype=np.int64)
    top = 0
    for i in range(N - 1, -1, -1):
        s = i + 1
        c = codes[i]
        r = 2 * i
        q = 2 * i + 1
        twin[r] = q
        twin[q] = r
        if c == 2:
            x = nv
            y = nv + 1
            nv += 2
            parent[x] = x
            parent[y] = y
            vcol[x] = RED
            vcol[y] = BLUE
            org[r] = x
            org[q] = y
            nxt[r] = r
            prv[r] = r
            nxt[q] = q
            prv[q] = q
            comp[top] = r
            top += 1
            continue
        m = match_of[s]
        if m == 0:
            return twin, nxt, org, vcol[:0], 1
        split = key[m] == s
        if not split:
            if top < 1:
                return twin, nxt, org, vcol[:0], 2
            top -= 1
            rp = comp[top]
            if c == 0:
                b_he = rp
                a_he = twin[prv[rp]]
            else:
                a_he = rp
                b_he = nxt[twin[rp]]
        else:
            if top < 2:
                return twin, nxt, org, vcol[:0], 3
            t_root = comp[top - 1]
            s_root = comp[top - 2]
            top -= 2
            if c == 1:
                a_he = t_root
                b_he = s_root
                v_keep = _find(parent, org[b_he])
                v_drop = _find(parent, org[twin[a_he]])
            else:
                a_he = s_root
                b_he = t_root
                v_keep = _find(parent, org[twin[a_he]])
                v_drop = _find(parent, org[b_he])
            parent[v_drop] = v_keep
        x = org[a_he]
        y = org[twin[b_he]]
        p = twin[prv[a_he]]
        u = nxt[twin[b_he]]
        if split:
            s_a = nxt[twin[a_he]]
            p_b = twin[prv[b_he]]
        org[r] = x
        org[q] = y
        tp = twin[p]
        nxt[tp] = r
        prv[r] = tp
        nxt[r] = a_he
        prv[a_he] = r
        tb = twin[b_he]
        nxt[tb] = q
        prv[q] = tb
        nxt[q] = u
        prv[u] = q
        if split:
            tpb = twin[p_b]
            nxt[tpb] = s_a
            prv[s_a] = tpb
            ta = twin[a_he]
            nxt[ta] = b_he
            prv[b_he] = ta
        comp[top] = r
        top += 1
    if top != 1 or comp[0] != 0:
        return twin, nxt, org, vcol[:0], 4
    # dense vertex ids in order of first appearance
    dense = np.full(nv, -1, dtype=np.int64)
    k = 0
    colors = np.empty(nv, dtype=np.int8)
    for h in range(H):
        rep = _find(parent, org[h])
        if dense[rep] < 0:
            dense[rep] = k
            colors[k] = vcol[rep]
            k += 1
        org[h] = dense[rep]
    return twin, nxt, org, colors[:k], 0


# ---------------------------------------------------------------------------
# samplers


@njit(cache=True)
def seed_kernel(seed):
    np.random.seed(seed)


@njit(cache=True)
def rejection_walk(start_L, start_R, max_steps, max_attempts, buf):
    """i.i.d. uniform steps until a coordinate goes negative; retry until (-1, -1).

    Returns ``(length, attempts, truncated_attempts)``; ``length`` is -1 if
    no attempt was accepted within ``max_attempts``.
    """
    attempts = 0
    truncated = 0
    while attempts < max_attempts:
        attempts += 1
        L = start_L
        R = start_R
        n = 0
        ok = True
        while True:
            if n >= max_steps:
                ok = False
                truncated += 1
                break
            u = np.random.randint(0, 3)
            buf[n] = u
            n += 1
            if u == 0:
                L += 1
            elif u == 1:
                R += 1
            else:
                L -= 1
                R -= 1
            if L < 0 or R < 0:
                break
        if ok and L == -1 and R == -1:
            return n, attempts, truncated
    return -1, attempts, truncated


@njit(cache=True)
def rejection_rate(start_L, start_R, attempts, max_steps):
    """Count accepted attempts among ``attempts`` independent tries."""
    acc = 0
    trunc = 0
    for _ in range(attempts):
        L = start_L
        R = start_R
        n = 0
        while L >= 0 and R >= 0:
            if n >= max_steps:
                trunc += 1
                break
            u = np.random.randint(0, 3)
            n += 1
            if u == 0:
                L += 1
            elif u == 1:
                R += 1
            else:
                L -= 1
                R -= 1
        if L == -1 and R == -1:
            acc += 1
    return acc, trunc


@njit(cache=True)
def peeling_walk(start_L, start_R, log_w, max_steps, buf):
    """Exact Boltzmann sample of a member walk via the peeling Markov chain.

    ``log_w[k]`` is the log of the total weight of boundary sum ``k``; it must
    cover ``k`` up to ``start_L + start_R + max_steps``.  Returns the walk
    length, or -1 when ``max_steps`` is exceeded.
    """
    kmax = log_w.shape[0] - 2
    pend_L = np.empty(max_steps + 1, dtype=np.int64)
    pend_R = np.empty(max_steps + 1, dtype=np.int64)
    top = 0
    cl = start_L
    cr = start_R
    n = 0
    third = np.log(1.0 / 3.0)
    while True:
        if n >= max_steps:
            return -1
        k = cl + cr
        if k > kmax:
            return -1
        lw = log_w[k]
        u = np.random.random()
        if k == 0:
            p = np.exp(third - lw)
            if u < p:
                buf[n] = 2
                n += 1
                if top == 0:
                    return n
                top -= 1
                cl = pend_L[top]
                cr = pend_R[top]
                continue
            u -= p
        grow = np.exp(third + log_w[k + 1] - lw)
        if u < grow:
            buf[n] = 0
            n += 1
            cl += 1
            continue
        u -= grow
        if u < grow:
            buf[n] = 1
            n += 1
            cr += 1
            continue
        u -= grow
        # split: red apex on the left arc (b-step) or blue apex on the right arc (a-step);
        # candidate splits are scanned from both ends where the mass concentrates
        done = False
        nl = cl
        nr = cr
        lo_l = 0
        hi_l = nl - 1
        lo_r = 0
        hi_r = nr - 1
        last_side = -1
        last_j = -1
        while lo_l <= hi_l or lo_r <= hi_r:
            for side in range(2):
                if side == 0:
                    if lo_l > hi_l:
                        continue
                    for pick in range(2):
                        if lo_l > hi_l:
                            break
                        if pick == 0:
                            j = lo_l
                            lo_l += 1
                        else:
                            j = hi_l
                            hi_l -= 1
                        p = np.exp(third + log_w[j] + log_w[k - 1 - j] - lw)
                        last_side = 0
                        last_j = j
                        if u < p:
                            done = True
                            break
                        u -= p
                else:
                    if lo_r > hi_r:
                        continue
                    for pick in range(2):
                        if lo_r > hi_r:
                            break
                        if pick == 0:
                            j = lo_r
                            lo_r += 1
                        else:
                            j = hi_r
                            hi_r -= 1
                        p = np.exp(third + log_w[j] + log_w[k - 1 - j] - lw)
                        last_side = 1
                        last_j = j
                        if u < p:
                            done = True
                            break
                        u -= p
                if done:
                    break
            if done:
                break
        if last_side < 0:
            return -2
        j = last_j
        if last_side == 0:
            buf[n] = 1
            pend_L[top] = cl - 1 - j
            pend_R[top] = cr
            top += 1
            cl = j
            cr = 0
        else:
            buf[n] = 0
            pend_L[top] = cl
            pend_R[top] = cr - 1 - j
            top += 1
            cl = 0
            cr = j
        n += 1
