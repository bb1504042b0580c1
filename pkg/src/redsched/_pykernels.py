"""Pure-Python hot loops; ``_kernels.pyx`` implements the same functions.

All times are integers here: callers scale rational costs by a common
denominator first (see ``redsched.kernels``).
"""

BACKEND = "python"


# -- uni-greedy ---------------------------------------------------------------
# A state is a key 2*time + flag with flag 0 for the root, so the root sorts
# first among equal times.  Within one segment the receivers' new states are
# produced in nondecreasing time, and so are the senders' final states, so two
# sorted queues replace a heap.

def _greedy_segment(keys, c, d):
    """One segment on sorted ``keys``; returns the sorted keys for the next one."""
    p = len(keys)
    recv = []
    ia = ib = 0
    sent = []
    for _ in range(p - 1):
        if ib >= len(recv) or (ia < p and keys[ia] <= recv[ib]):
            k1 = keys[ia]
            ia += 1
        else:
            k1 = recv[ib]
            ib += 1
        if ib >= len(recv) or (ia < p and keys[ia] <= recv[ib]):
            k2 = keys[ia]
            ia += 1
        else:
            k2 = recv[ib]
            ib += 1
        t = k2 >> 1
        flag = 0 if (k1 & 1) == 0 else (k2 & 1)
        sent.append(2 * (t + c) + 1)
        recv.append(2 * (t + c + d) + flag)
    root = keys[ia] if ia < p else recv[ib]
    pos = len(sent)
    while pos > 0 and sent[pos - 1] > root:
        pos -= 1
    sent.insert(pos, root)
    return sent


def _root_time(keys):
    for k in keys:
        if k & 1 == 0:
            return k >> 1
    raise AssertionError("root state lost")


def uni_greedy_time(p, comm, comp):
    keys = [0] + [1] * (p - 1)
    for c, d in zip(comm, comp):
        keys = _greedy_segment(keys, c, d)
    return _root_time(keys)


def uni_greedy_composition_times(p, m, alpha, beta, gamma):
    """Greedy completion for every composition of ``m``, in DFS order.

    DFS order: first part ascending, then recursively (``compositions_dfs``).
    Prefixes are shared, so each distinct prefix is simulated once.
    """
    out = []

    def walk(keys, rest):
        for s in range(1, rest + 1):
            nxt = _greedy_segment(keys, alpha + beta * s, gamma * s)
            if s == rest:
                out.append(_root_time(nxt))
            else:
                walk(nxt, rest - s)

    walk([0] + [1] * (p - 1), m)
    return out


# -- pipeline -----------------------------------------------------------------

def _pipeline_segment(free, c, d, p):
    for k in range(p - 1, 0, -1):
        start = free[k] if free[k] > free[k - 1] else free[k - 1]
        free[k] = start + c
        free[k - 1] = start + c + d


def pipeline_time(p, comm, comp):
    free = [0] * p
    for c, d in zip(comm, comp):
        _pipeline_segment(free, c, d, p)
    return free[0]


def pipeline_composition_times(p, m, alpha, beta, gamma):
    out = []

    def walk(free, rest):
        for s in range(1, rest + 1):
            nxt = list(free)
            _pipeline_segment(nxt, alpha + beta * s, gamma * s, p)
            if s == rest:
                out.append(nxt[0])
            else:
                walk(nxt, rest - s)

    walk([0] * p, m)
    return out


# -- bi-greedy ----------------------------------------------------------------

def bi_greedy_events(p, comm, comp, max_time):
    """Discrete-time port filling; returns ``(events, completion)``.

    ``events`` holds ``(segment, sender, receiver, start)`` with 1-based
    segments.  Raises RuntimeError if time passes ``max_time``.
    """
    q = len(comm)
    send_free = [0] * p
    recv_free = [0] * p
    comp_lo = [0] * p
    comp_hi = [0] * p
    recv_seg = [-1] * p
    done = [[0] * q for _ in range(p)]
    left = [p] * q
    events = []
    t = 0
    seg_start = 0
    while seg_start < q:
        j = seg_start - 1
        while True:
            j += 1
            c, d = comm[j], comp[j]
            senders, receivers, free = [], [], []
            for i in range(p):
                if done[i][j]:
                    continue
                if comp_lo[i] < comp_hi[i] and t < comp_hi[i] and t + c > comp_lo[i]:
                    continue
                can_send = (i != 0 and send_free[i] <= t
                            and not (recv_seg[i] == j and recv_free[i] > t))
                can_recv = recv_free[i] <= t and (d == 0 or send_free[i] <= t + c)
                if can_send and can_recv:
                    free.append(i)
                elif can_send:
                    senders.append(i)
                elif can_recv:
                    receivers.append(i)
            s, r, f = len(senders), len(receivers), len(free)
            if s == r:
                y = f // 2
                senders += free[f - y:]
                receivers += free[:y]
            elif s < r:
                mm = min(f, r - s)
                x = (f - mm) // 2
                if mm > 0:
                    senders += free[f - (mm + x):]
                if x > 0:
                    receivers += free[:x]
            else:
                mm = min(f, s - r)
                x = (f - mm) // 2
                if mm > 0:
                    receivers += free[:mm + x]
                if x > 0:
                    senders += free[f - x:]
            n = min(len(senders), len(receivers))
            if n:
                senders.sort()
                receivers.sort()
                for a, b in zip(senders[:n], receivers[:n]):
                    events.append((j + 1, a, b, t))
                    done[a][j] = t + c
                    send_free[a] = t + c
                    recv_free[b] = t + c + d
                    comp_lo[b] = t + c
                    comp_hi[b] = t + c + d
                    recv_seg[b] = j
                left[j] -= n
                if left[j] == 1:
                    done[0][j] = max(done[i][j] for i in range(p)) + d
            open_ports = sum(1 for i in range(p) if send_free[i] <= t)
            open_ports += sum(1 for i in range(p) if recv_free[i] <= t)
            if open_ports < 2 or j >= q - 1:
                break
        while seg_start < q and done[0][seg_start]:
            seg_start += 1
        t += 1
        if t > max_time:
            raise RuntimeError(f"bi-greedy did not terminate by t={max_time}")
    return events, max(done[0])
