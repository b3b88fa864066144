"""Pure-Python strategy-set kernel.  Mirrors ``_kernel.pyx`` line for line."""

from collections import deque

WIN, UWIN, EWIN = 0, 1, 2


def _enabled(v, a, sem, n, nact, nx_base, nx_ptr, nx, cls_of, cls_ptr, cls, ch_ptr, ch, inset):
    slot = a * n + v
    k = nact[slot]
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


def solve_one(n, a, outcome, sem, parent, label, ch_ptr, ch, nact, nx_base, nx_ptr, nx, cls_of, cls_ptr, cls):
    """Least fixed point for one (agent, outcome, semantics); returns a bitmask."""
    inset = [label[v] == outcome for v in range(n)]
    queue = deque(v for v in range(n - 1, -1, -1) if label[v] < 0)
    queued = [label[v] < 0 for v in range(n)]
    while queue:
        v = queue.popleft()
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
                queue.append(p)
        else:
            c = cls_of[a * n + p]
            for ci in range(cls_ptr[c], cls_ptr[c + 1]):
                w = cls[ci]
                if not inset[w] and not queued[w]:
                    queued[w] = True
                    queue.append(w)
    mask = 0
    for v in range(n):
        if inset[v]:
            mask |= 1 << v
    return mask


def solve_all(n, n_agents, parent, label, ch_ptr, ch, nact, nx_base, nx_ptr, nx, cls_of, cls_ptr, cls):
    """Masks for every (agent, outcome, semantics), flattened as ``(a*2+o)*3+s``."""
    out = []
    for a in range(n_agents):
        for o in (0, 1):
            for sem in (WIN, UWIN, EWIN):
                out.append(
                    solve_one(n, a, o, sem, parent, label, ch_ptr, ch, nact, nx_base, nx_ptr, nx, cls_of, cls_ptr, cls)
                )
    return out
