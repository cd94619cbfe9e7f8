# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled slot engine; same semantics as ``_engine.py``."""
import numpy as np
cimport numpy as cnp

cnp.import_array()

ctypedef cnp.int64_t i64


cdef inline void heap_push(i64[::1] heap, i64* size, i64 key) noexcept nogil:
    cdef i64 i = size[0]
    cdef i64 parent
    size[0] += 1
    while i > 0:
        parent = (i - 1) >> 1
        if heap[parent] <= key:
            break
        heap[i] = heap[parent]
        i = parent
    heap[i] = key


cdef inline i64 heap_pop(i64[::1] heap, i64* size) noexcept nogil:
    cdef i64 top = heap[0]
    cdef i64 n, last, i, child
    size[0] -= 1
    n = size[0]
    if n == 0:
        return top
    last = heap[n]
    i = 0
    while True:
        child = 2 * i + 1
        if child >= n:
            break
        if child + 1 < n and heap[child + 1] < heap[child]:
            child += 1
        if heap[child] >= last:
            break
        heap[i] = heap[child]
        i = child
    heap[i] = last
    return top


cdef inline bint clear(i64[:, ::1] marks, int r, i64 lo, i64 hi) noexcept nogil:
    cdef i64 s
    if lo < 0:
        lo = 0
    for s in range(lo, hi + 1):
        if marks[r, s] >= 0:
            return False
    return True


cdef inline bint open_through(i64[:, ::1] cum, int r, i64 start, i64 stop, i64 horizon) noexcept nogil:
    if start < 0 or stop > horizon:
        return False
    return cum[r, stop] - cum[r, start] == stop - start


def run_kernel(i64 horizon, int n_runways, i64 lockout, arrivals, nominals, open_mask, i64 cap):
    cdef i64[::1] arr = np.ascontiguousarray(arrivals, dtype=np.int64)
    cdef i64[::1] nom_in = np.ascontiguousarray(nominals, dtype=np.int64)
    cdef i64 n_planes = 0
    cdef i64 t, a, i
    for t in range(horizon):
        n_planes += arr[t]
    if nom_in.shape[0] < n_planes:
        raise ValueError("not enough nominal draws for the arrivals")

    mask = np.asarray(open_mask, dtype=bool)
    cum_np = np.zeros((n_runways, horizon + 1), dtype=np.int64)
    cum_np[:, 1:] = np.cumsum(mask, axis=1)
    cdef i64[:, ::1] cum = cum_np

    cdef i64 max_nom = 1
    for i in range(n_planes):
        if nom_in[i] > max_nom:
            max_nom = nom_in[i]
    cdef i64 width = horizon + max_nom + 2 * lockout + 2
    marks_np = np.full((n_runways, width), -1, dtype=np.int64)
    cdef i64[:, ::1] marks = marks_np
    pending_np = np.zeros(width, dtype=np.int64)
    cdef i64[::1] pending = pending_np

    out_arrival = np.full(n_planes, -1, dtype=np.int64)
    out_entry = np.full(n_planes, -1, dtype=np.int64)
    out_nominal = np.full(n_planes, -1, dtype=np.int64)
    out_landing = np.full(n_planes, -1, dtype=np.int64)
    out_runway = np.full(n_planes, -1, dtype=np.int64)
    cdef i64[::1] o_arr = out_arrival, o_ent = out_entry, o_nom = out_nominal
    cdef i64[::1] o_land = out_landing, o_rw = out_runway
    s_in = np.zeros(horizon, dtype=np.int64)
    s_rer = np.zeros(horizon, dtype=np.int64)
    s_wait = np.zeros(horizon, dtype=np.int64)
    cdef i64[::1] v_in = s_in, v_rer = s_rer, v_wait = s_wait

    heap_np = np.zeros(max(n_planes, 1), dtype=np.int64)
    cdef i64[::1] heap = heap_np
    cdef i64 heap_size = 0
    cdef i64 keybase = n_planes + 1

    cdef i64 n_arrived = 0, next_admit = 0
    cdef i64 inside = 0, eligible = 0
    cdef i64 pid, L, s, bumped, key
    cdef int r, chosen, first_free
    cdef bint reserved, bounded = cap >= 0

    with nogil:
        for t in range(horizon):
            eligible += pending[t]

            for r in range(n_runways):
                pid = marks[r, t]
                if pid >= 0:
                    o_land[pid] = t
                    o_rw[pid] = r
                    inside -= 1

            for a in range(arr[t]):
                o_arr[n_arrived] = t
                n_arrived += 1

            # admission, before and after the queue landings
            for i in range(2):
                if i == 1:
                    while heap_size > 0 and heap[0] // keybase <= t:
                        chosen = -1
                        first_free = -1
                        for r in range(n_runways):
                            if open_through(cum, r, t, t + 1, horizon) and clear(marks, r, t - lockout + 1, t):
                                if first_free < 0:
                                    first_free = r
                                if clear(marks, r, t + 1, t + lockout - 1):
                                    chosen = r
                                    break
                        if first_free < 0:
                            break
                        if chosen < 0:
                            chosen = first_free
                        key = heap_pop(heap, &heap_size)
                        pid = key % keybase
                        eligible -= 1
                        for s in range(t + 1, t + lockout):
                            bumped = marks[chosen, s]
                            if bumped >= 0:
                                marks[chosen, s] = -1
                                o_rw[bumped] = -1
                                heap_push(heap, &heap_size, s * keybase + bumped)
                                pending[s] += 1
                        marks[chosen, t] = pid
                        o_land[pid] = t
                        o_rw[pid] = chosen
                        inside -= 1

                while next_admit < n_arrived and (not bounded or inside < cap):
                    pid = next_admit
                    next_admit += 1
                    o_ent[pid] = t
                    o_nom[pid] = nom_in[pid]
                    L = t + nom_in[pid]
                    inside += 1
                    reserved = False
                    for r in range(n_runways):
                        if open_through(cum, r, L, L + lockout, horizon) and clear(marks, r, L - lockout + 1, L + lockout - 1):
                            marks[r, L] = pid
                            o_rw[pid] = r
                            reserved = True
                            break
                    if not reserved:
                        heap_push(heap, &heap_size, L * keybase + pid)
                        pending[L] += 1

            v_in[t] = inside
            v_rer[t] = eligible
            v_wait[t] = n_arrived - next_admit

    for i in range(n_planes):
        if o_land[i] < 0:
            o_rw[i] = -1

    return {
        "arrival": out_arrival,
        "entry": out_entry,
        "nominal": out_nominal,
        "landing": out_landing,
        "runway": out_runway,
        "in_tracon": s_in,
        "rerouted": s_rer,
        "waiting": s_wait,
    }
