# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled strategy-set kernel.  Same algorithm as ``_kernel_py``."""

from libc.stdlib cimport malloc, free

cdef enum:
    WIN = 0
    UWIN = 1
    EWIN = 2


cdef bint _enabled(int v, int a, int sem, int n,
                   const int[:] nact, const int[:] nx_base, const int[:] nx_ptr, const int[:] nx,
                   const int[:] cls_of, const int[:] cls_ptr, const int[:] cls,
                   const int[:] ch_ptr, const int[:] ch, char* inset) nogil:
    cdef int slot = a * n + v
    cdef int k = nact[slot]
    cdef int d, j, ci, u, s, base, c
    cdef bint ok
    if sem == WIN:
        base = nx_base[slot]
        for d in range(k):
            ok = True
            for j in range(nx_ptr[base + d], nx_ptr[base + d + 1]):
                if not inset[nx[j]]:
                    ok = False
                    break
            if ok:
                return True
        return False
    c = cls_of[slot]
    for d in range(k):
        ok = True
        for ci in range(cls_ptr[c], cls_ptr[c + 1]):
            u = cls[ci]
            s = nx_base[a * n + u] + d
            for j in range(nx_ptr[s], nx_ptr[s + 1]):
                if not inset[nx[j]]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return True
    if sem == EWIN:
        for j in range(ch_ptr[v], ch_ptr[v + 1]):
            if not inset[ch[j]]:
                return False
        return True
    return False


cdef object _solve(int n, int a, int outcome, int sem,
                   const int[:] parent, const int[:] label, const int[:] ch_ptr, const int[:] ch,
                   const int[:] nact, const int[:] nx_base, const int[:] nx_ptr, const int[:] nx,
                   const int[:] cls_of, const int[:] cls_ptr, const int[:] cls,
                   char* inset, char* queued, int* queue):
    # queue is a ring buffer of size n; each node is queued at most once at a time
    cdef int head = 0, count = 0, v, p, c, ci, w
    for v in range(n):
        inset[v] = label[v] == outcome
        queued[v] = label[v] < 0
    for v in range(n - 1, -1, -1):
        if label[v] < 0:
            queue[(head + count) % n] = v
            count += 1
    while count:
        v = queue[head]
        head = (head + 1) % n
        count -= 1
        queued[v] = False
        if inset[v]:
            continue
        if not _enabled(v, a, sem, n, nact, nx_base, nx_ptr, nx, cls_of, cls_ptr, cls, ch_ptr, ch, inset):
            continue
        inset[v] = True
        p = parent[v]
        if p < 0:
            continue
        if sem == WIN:
            if not inset[p] and not queued[p]:
                queued[p] = True
                queue[(head + count) % n] = p
                count += 1
        else:
            c = cls_of[a * n + p]
            for ci in range(cls_ptr[c], cls_ptr[c + 1]):
                w = cls[ci]
                if not inset[w] and not queued[w]:
                    queued[w] = True
                    queue[(head + count) % n] = w
                    count += 1
    cdef unsigned long long small = 0
    if n <= 64:
        for v in range(n):
            if inset[v]:
                small |= (<unsigned long long>1) << v
        return small
    # wider than a machine word: shift Python ints, not C ints
    cdef object mask = 0
    cdef object one = 1
    for v in range(n):
        if inset[v]:
            mask |= one << v
    return mask


def solve_one(int n, int a, int outcome, int sem, parent, label, ch_ptr, ch, nact, nx_base, nx_ptr, nx,
              cls_of, cls_ptr, cls):
    """Least fixed point for one (agent, outcome, semantics); returns a bitmask."""
    cdef char* inset = <char*>malloc(n)
    cdef char* queued = <char*>malloc(n)
    cdef int* queue = <int*>malloc(n * sizeof(int))
    try:
        return _solve(n, a, outcome, sem, parent, label, ch_ptr, ch, nact, nx_base, nx_ptr, nx,
                      cls_of, cls_ptr, cls, inset, queued, queue)
    finally:
        free(inset)
        free(queued)
        free(queue)


def solve_all(int n, int n_agents, parent, label, ch_ptr, ch, nact, nx_base, nx_ptr, nx,
              cls_of, cls_ptr, cls):
    """Masks for every (agent, outcome, semantics), flattened as ``(a*2+o)*3+s``."""
    cdef const int[:] parent_v = parent
    cdef const int[:] label_v = label
    cdef const int[:] ch_ptr_v = ch_ptr
    cdef const int[:] ch_v = ch
    cdef const int[:] nact_v = nact
    cdef const int[:] nx_base_v = nx_base
    cdef const int[:] nx_ptr_v = nx_ptr
    cdef const int[:] nx_v = nx
    cdef const int[:] cls_of_v = cls_of
    cdef const int[:] cls_ptr_v = cls_ptr
    cdef const int[:] cls_v = cls
    cdef char* inset = <char*>malloc(n)
    cdef char* queued = <char*>malloc(n)
    cdef int* queue = <int*>malloc(n * sizeof(int))
    cdef int a, o, s
    out = []
    try:
        for a in range(n_agents):
            for o in range(2):
                for s in range(3):
                    out.append(_solve(n, a, o, s, parent_v, label_v, ch_ptr_v, ch_v, nact_v, nx_base_v,
                                      nx_ptr_v, nx_v, cls_of_v, cls_ptr_v, cls_v, inset, queued, queue))
    finally:
        free(inset)
        free(queued)
        free(queue)
    return out
