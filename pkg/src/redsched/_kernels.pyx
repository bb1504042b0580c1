# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of ``_pykernels``; same functions, same results."""

from libc.stdlib cimport malloc, free
from libc.string cimport memcpy

BACKEND = "cython"

ctypedef long long i64


# -- uni-greedy ---------------------------------------------------------------
# Keys pack (time, flag) as 2*time + flag, flag 0 for the root.  Receivers'
# new keys and senders' final keys both come out in nondecreasing time, so a
# segment is a merge of two sorted queues.

cdef void _greedy_segment(i64* keys, i64* recv, i64* sent, int p, i64 c, i64 d) nogil:
    cdef int ia = 0
    cdef int ib = 0
    cdef int nb = 0
    cdef int step, pos
    cdef i64 k1, k2, t, flag, root
    for step in range(p - 1):
        if ib >= nb or (ia < p and keys[ia] <= recv[ib]):
            k1 = keys[ia]
            ia += 1
        else:
            k1 = recv[ib]
            ib += 1
        if ib >= nb or (ia < p and keys[ia] <= recv[ib]):
            k2 = keys[ia]
            ia += 1
        else:
            k2 = recv[ib]
            ib += 1
        t = k2 >> 1
        flag = 0 if (k1 & 1) == 0 else (k2 & 1)
        sent[step] = 2 * (t + c) + 1
        recv[nb] = 2 * (t + c + d) + flag
        nb += 1
    root = keys[ia] if ia < p else recv[ib]
    pos = p - 1
    while pos > 0 and sent[pos - 1] > root:
        keys[pos] = sent[pos - 1]
        pos -= 1
    keys[pos] = root
    memcpy(keys, sent, pos * sizeof(i64))


cdef i64 _root_time(i64* h, int p) nogil:
    cdef int i
    for i in range(p):
        if (h[i] & 1) == 0:
            return h[i] >> 1
    return -1


def uni_greedy_time(int p, comm, comp):
    cdef int q = len(comm)
    cdef i64* h = <i64*> malloc(p * sizeof(i64))
    cdef i64* sent = <i64*> malloc(p * sizeof(i64))
    cdef i64* recv = <i64*> malloc(p * sizeof(i64))
    cdef int i, j
    cdef i64 c, d, out
    if h == NULL or sent == NULL or recv == NULL:
        raise MemoryError()
    try:
        h[0] = 0
        for i in range(1, p):
            h[i] = 1
        for j in range(q):
            c = comm[j]
            d = comp[j]
            _greedy_segment(h, recv, sent, p, c, d)
        out = _root_time(h, p)
    finally:
        free(h)
        free(sent)
        free(recv)
    return out


cdef void _greedy_walk(i64* stack, i64* recv, i64* sent, int p, int rest, int depth,
                       i64 a, i64 b, i64 g, list out):
    cdef i64* cur = stack + depth * p
    cdef i64* nxt = cur + p
    cdef int s
    for s in range(1, rest + 1):
        memcpy(nxt, cur, p * sizeof(i64))
        _greedy_segment(nxt, recv, sent, p, a + b * s, g * s)
        if s == rest:
            out.append(_root_time(nxt, p))
        else:
            _greedy_walk(stack, recv, sent, p, rest - s, depth + 1, a, b, g, out)


def uni_greedy_composition_times(int p, int m, i64 alpha, i64 beta, i64 gamma):
    cdef i64* stack = <i64*> malloc((m + 1) * p * sizeof(i64))
    cdef i64* sent = <i64*> malloc(p * sizeof(i64))
    cdef i64* recv = <i64*> malloc(p * sizeof(i64))
    cdef int i
    cdef list out = []
    if stack == NULL or sent == NULL or recv == NULL:
        raise MemoryError()
    try:
        stack[0] = 0
        for i in range(1, p):
            stack[i] = 1
        _greedy_walk(stack, recv, sent, p, m, 0, alpha, beta, gamma, out)
    finally:
        free(stack)
        free(sent)
        free(recv)
    return out


# -- pipeline -----------------------------------------------------------------

cdef void _pipeline_segment(i64* free_at, int p, i64 c, i64 d) nogil:
    cdef int k
    cdef i64 start
    for k in range(p - 1, 0, -1):
        start = free_at[k] if free_at[k] > free_at[k - 1] else free_at[k - 1]
        free_at[k] = start + c
        free_at[k - 1] = start + c + d


def pipeline_time(int p, comm, comp):
    cdef i64* free_at = <i64*> malloc(p * sizeof(i64))
    cdef int i
    cdef i64 out
    if free_at == NULL:
        raise MemoryError()
    try:
        for i in range(p):
            free_at[i] = 0
        for i in range(len(comm)):
            _pipeline_segment(free_at, p, comm[i], comp[i])
        out = free_at[0]
    finally:
        free(free_at)
    return out


cdef void _pipeline_walk(i64* stack, int p, int rest, int depth,
                         i64 a, i64 b, i64 g, list out):
    cdef i64* cur = stack + depth * p
    cdef i64* nxt = cur + p
    cdef int s
    for s in range(1, rest + 1):
        memcpy(nxt, cur, p * sizeof(i64))
        _pipeline_segment(nxt, p, a + b * s, g * s)
        if s == rest:
            out.append(nxt[0])
        else:
            _pipeline_walk(stack, p, rest - s, depth + 1, a, b, g, out)


def pipeline_composition_times(int p, int m, i64 alpha, i64 beta, i64 gamma):
    cdef i64* stack = <i64*> malloc((m + 1) * p * sizeof(i64))
    cdef int i
    cdef list out = []
    if stack == NULL:
        raise MemoryError()
    try:
        for i in range(p):
            stack[i] = 0
        _pipeline_walk(stack, p, m, 0, alpha, beta, gamma, out)
    finally:
        free(stack)
    return out


# -- bi-greedy ----------------------------------------------------------------

def bi_greedy_events(int p, comm, comp, i64 max_time):
    cdef int q = len(comm)
    cdef i64* send_free = <i64*> malloc(p * sizeof(i64))
    cdef i64* recv_free = <i64*> malloc(p * sizeof(i64))
    cdef i64* comp_lo = <i64*> malloc(p * sizeof(i64))
    cdef i64* comp_hi = <i64*> malloc(p * sizeof(i64))
    cdef int* recv_seg = <int*> malloc(p * sizeof(int))
    cdef i64* done = <i64*> malloc(p * q * sizeof(i64))
    cdef int* left = <int*> malloc(q * sizeof(int))
    cdef int* snd = <int*> malloc(p * sizeof(int))
    cdef int* rcv = <int*> malloc(p * sizeof(int))
    cdef int* fre = <int*> malloc(p * sizeof(int))
    cdef i64* cc = <i64*> malloc(q * sizeof(i64))
    cdef i64* dd = <i64*> malloc(q * sizeof(i64))
    cdef int i, j, s, r, f, y, mm, x, n, k, seg_start, open_ports
    cdef i64 t, c, d, best
    cdef bint can_send, can_recv
    cdef list events = []
    if (send_free == NULL or recv_free == NULL or comp_lo == NULL or comp_hi == NULL
            or recv_seg == NULL or done == NULL or left == NULL or snd == NULL
            or rcv == NULL or fre == NULL or cc == NULL or dd == NULL):
        raise MemoryError()
    try:
        for i in range(p):
            send_free[i] = 0
            recv_free[i] = 0
            comp_lo[i] = 0
            comp_hi[i] = 0
            recv_seg[i] = -1
        for i in range(p * q):
            done[i] = 0
        for j in range(q):
            left[j] = p
            cc[j] = comm[j]
            dd[j] = comp[j]
        t = 0
        seg_start = 0
        while seg_start < q:
            j = seg_start - 1
            while True:
                j += 1
                c = cc[j]
                d = dd[j]
                s = 0
                r = 0
                f = 0
                for i in range(p):
                    if done[i * q + j] != 0:
                        continue
                    if comp_lo[i] < comp_hi[i] and t < comp_hi[i] and t + c > comp_lo[i]:
                        continue
                    can_send = (i != 0 and send_free[i] <= t
                                and not (recv_seg[i] == j and recv_free[i] > t))
                    can_recv = recv_free[i] <= t and (d == 0 or send_free[i] <= t + c)
                    if can_send and can_recv:
                        fre[f] = i
                        f += 1
                    elif can_send:
                        snd[s] = i
                        s += 1
                    elif can_recv:
                        rcv[r] = i
                        r += 1
                # split the processors with both ports idle between the roles
                if s == r:
                    y = f // 2
                    for k in range(f - y, f):
                        snd[s] = fre[k]
                        s += 1
                    for k in range(y):
                        rcv[r] = fre[k]
                        r += 1
                elif s < r:
                    mm = min(f, r - s)
                    x = (f - mm) // 2
                    if mm > 0:
                        for k in range(f - (mm + x), f):
                            snd[s] = fre[k]
                            s += 1
                    if x > 0:
                        for k in range(x):
                            rcv[r] = fre[k]
                            r += 1
                else:
                    mm = min(f, s - r)
                    x = (f - mm) // 2
                    if mm > 0:
                        for k in range(mm + x):
                            rcv[r] = fre[k]
                            r += 1
                    if x > 0:
                        for k in range(f - x, f):
                            snd[s] = fre[k]
                            s += 1
                n = min(s, r)
                if n > 0:
                    _isort(snd, s)
                    _isort(rcv, r)
                    for k in range(n):
                        events.append((j + 1, snd[k], rcv[k], t))
                        done[snd[k] * q + j] = t + c
                        send_free[snd[k]] = t + c
                        recv_free[rcv[k]] = t + c + d
                        comp_lo[rcv[k]] = t + c
                        comp_hi[rcv[k]] = t + c + d
                        recv_seg[rcv[k]] = j
                    left[j] -= n
                    if left[j] == 1:
                        best = 0
                        for i in range(p):
                            if done[i * q + j] > best:
                                best = done[i * q + j]
                        done[j] = best + d
                open_ports = 0
                for i in range(p):
                    if send_free[i] <= t:
                        open_ports += 1
                    if recv_free[i] <= t:
                        open_ports += 1
                if open_ports < 2 or j >= q - 1:
                    break
            while seg_start < q and done[seg_start] != 0:
                seg_start += 1
            t += 1
            if t > max_time:
                raise RuntimeError(f"bi-greedy did not terminate by t={max_time}")
        best = 0
        for j in range(q):
            if done[j] > best:
                best = done[j]
    finally:
        free(send_free)
        free(recv_free)
        free(comp_lo)
        free(comp_hi)
        free(recv_seg)
        free(done)
        free(left)
        free(snd)
        free(rcv)
        free(fre)
        free(cc)
        free(dd)
    return events, best


cdef void _isort(int* a, int n) nogil:
    cdef int i, k, v
    for i in range(1, n):
        v = a[i]
        k = i - 1
        while k >= 0 and a[k] > v:
            a[k + 1] = a[k]
            k -= 1
        a[k + 1] = v
