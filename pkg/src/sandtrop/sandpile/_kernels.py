"""Numba kernels over a flat cell graph.

A graph is a neighbour table ``nbr`` of shape (n, 4); entry -1 is a sink
that swallows grains. Self-loops and repeated neighbours are allowed,
which the cylinder quotients need.
"""

import numpy as np
from numba import njit

FIFO, LIFO, RANDOM, GENERATIONS = 0, 1, 2, 3
SCHEDULES = {"fifo": FIFO, "lifo": LIFO, "random": RANDOM, "generations": GENERATIONS}

OK, OVER_BUDGET = 0, 1


@njit(cache=True)
def _topple(h, nbr, odo, v, k):
    """Topple v k times; returns grains sent to sinks."""
    h[v] -= 4 * k
    odo[v] += k
    lost = 0
    for d in range(4):
        w = nbr[v, d]
        if w < 0:
            lost += k
        else:
            h[w] += k
    return lost


@njit(cache=True)
def relax_fifo(h, nbr, odo, frozen, budget):
    """Batched FIFO relaxation. Cells with frozen[v] never topple.

    Returns (lost, topplings, status).
    """
    n = h.shape[0]
    queue = np.empty(n + 1, dtype=np.int64)
    inq = np.zeros(n, dtype=np.bool_)
    head = 0
    tail = 0
    for v in range(n):
        if h[v] >= 4 and not frozen[v]:
            queue[tail] = v
            tail += 1
            inq[v] = True
    cap = n + 1
    lost = 0
    done = 0
    while head != tail:
        v = queue[head]
        head += 1
        if head == cap:
            head = 0
        inq[v] = False
        k = h[v] // 4
        if k == 0:
            continue
        if done + k > budget:
            k = budget - done
            if k <= 0:
                return lost, done, OVER_BUDGET
        lost += _topple(h, nbr, odo, v, k)
        done += k
        if h[v] >= 4 and not inq[v]:
            queue[tail] = v
            tail += 1
            if tail == cap:
                tail = 0
            inq[v] = True
        for d in range(4):
            w = nbr[v, d]
            if w >= 0 and h[w] >= 4 and not inq[w] and not frozen[w]:
                queue[tail] = w
                tail += 1
                if tail == cap:
                    tail = 0
                inq[w] = True
    return lost, done, OK


@njit(cache=True)
def relax_lifo(h, nbr, odo, frozen, budget):
    """Single topplings, most recently destabilised cell first."""
    n = h.shape[0]
    stack = np.empty(n, dtype=np.int64)
    ins = np.zeros(n, dtype=np.bool_)
    top = 0
    for v in range(n):
        if h[v] >= 4 and not frozen[v]:
            stack[top] = v
            top += 1
            ins[v] = True
    lost = 0
    done = 0
    while top > 0:
        top -= 1
        v = stack[top]
        ins[v] = False
        if h[v] < 4:
            continue
        if done >= budget:
            return lost, done, OVER_BUDGET
        lost += _topple(h, nbr, odo, v, 1)
        done += 1
        if h[v] >= 4 and not ins[v]:
            stack[top] = v
            top += 1
            ins[v] = True
        for d in range(4):
            w = nbr[v, d]
            if w >= 0 and h[w] >= 4 and not ins[w] and not frozen[w]:
                stack[top] = w
                top += 1
                ins[w] = True
    return lost, done, OK


@njit(cache=True)
def relax_random(h, nbr, odo, frozen, budget, seed):
    """Single topplings at a uniformly chosen unstable cell."""
    np.random.seed(seed)
    n = h.shape[0]
    pool = np.empty(n, dtype=np.int64)
    pos = -np.ones(n, dtype=np.int64)
    size = 0
    for v in range(n):
        if h[v] >= 4 and not frozen[v]:
            pool[size] = v
            pos[v] = size
            size += 1
    lost = 0
    done = 0
    while size > 0:
        r = np.random.randint(0, size)
        v = pool[r]
        if done >= budget:
            return lost, done, OVER_BUDGET
        lost += _topple(h, nbr, odo, v, 1)
        done += 1
        if h[v] < 4:
            last = pool[size - 1]
            pool[r] = last
            pos[last] = r
            pos[v] = -1
            size -= 1
        for d in range(4):
            w = nbr[v, d]
            if w >= 0 and h[w] >= 4 and pos[w] < 0 and not frozen[w]:
                pool[size] = w
                pos[w] = size
                size += 1
    return lost, done, OK


@njit(cache=True)
def relax_generations(h, nbr, odo, frozen, budget):
    """Synchronous sweeps: every cell unstable at the start of a sweep topples once."""
    n = h.shape[0]
    cur = np.empty(n, dtype=np.int64)
    lost = 0
    done = 0
    while True:
        m = 0
        for v in range(n):
            if h[v] >= 4 and not frozen[v]:
                cur[m] = v
                m += 1
        if m == 0:
            return lost, done, OK
        for i in range(m):
            if done >= budget:
                return lost, done, OVER_BUDGET
            lost += _topple(h, nbr, odo, cur[i], 1)
            done += 1


def run_relax(h, nbr, odo, frozen, budget, schedule=FIFO, seed=0):
    if schedule == FIFO:
        return relax_fifo(h, nbr, odo, frozen, budget)
    if schedule == LIFO:
        return relax_lifo(h, nbr, odo, frozen, budget)
    if schedule == RANDOM:
        return relax_random(h, nbr, odo, frozen, budget, seed)
    if schedule == GENERATIONS:
        return relax_generations(h, nbr, odo, frozen, budget)
    raise ValueError(f"unknown schedule {schedule}")


@njit(cache=True)
def laplacian(f, nbr, bsum):
    """sum over neighbours of f minus 4 f; sinks contribute nothing, bsum adds fixed neighbours."""
    n = f.shape[0]
    out = np.empty(n, dtype=np.int64)
    for v in range(n):
        s = bsum[v] - 4 * f[v]
        for d in range(4):
            w = nbr[v, d]
            if w >= 0:
                s += f[w]
        out[v] = s
    return out


@njit(cache=True)
def smoothing_set(f, nbr, bsum):
    """Largest S with every v in S having at least 4 + lap f(v) neighbours in S.

    Lowering f by one on S keeps f superharmonic; the condition is monotone
    in S, so pruning from the full vertex set reaches the maximum.
    """
    n = f.shape[0]
    lap = laplacian(f, nbr, bsum)
    ins = np.ones(n, dtype=np.bool_)
    cnt = np.zeros(n, dtype=np.int64)
    for v in range(n):
        c = 0
        for d in range(4):
            if nbr[v, d] >= 0:
                c += 1
        cnt[v] = c
    stack = np.empty(n, dtype=np.int64)
    top = 0
    queued = np.zeros(n, dtype=np.bool_)
    for v in range(n):
        if cnt[v] < 4 + lap[v]:
            stack[top] = v
            top += 1
            queued[v] = True
    while top > 0:
        top -= 1
        v = stack[top]
        ins[v] = False
        for d in range(4):
            w = nbr[v, d]
            if w >= 0 and ins[w]:
                cnt[w] -= 1
                if not queued[w] and cnt[w] < 4 + lap[w]:
                    stack[top] = w
                    top += 1
                    queued[w] = True
    return ins
