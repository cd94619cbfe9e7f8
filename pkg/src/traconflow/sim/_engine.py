"""Pure-Python slot engine (fallback for the compiled kernel).

Per slot ``t`` the engine does, in order:

1. planes whose reserved landing slot is ``t`` land;
2. arrivals of slot ``t`` join the outer FIFO;
3. planes are admitted from the outer FIFO while the TRACON is below cap.
   An admitted plane draws its nominal duration ``n`` and tries to reserve
   ``[t+n, t+n+lockout)`` on the lowest-indexed runway that is open over
   the whole interval and has no landing or reservation closer than
   ``lockout`` slots; failing that it will queue at ``t+n``;
4. each runway that is open at ``t`` and has no landing in the last
   ``lockout`` slots takes the head of the queue (planes past their nominal
   landing slot, ordered by nominal landing slot, entry slot, id). Runways
   whose future stays clear are tried first; reservations falling inside
   the new lockout are voided and those planes queue at their nominal slot;
5. admission runs again to refill slots freed by the landings of step 4;
6. the slot is tallied.

Without a cap the outer FIFO is empty after step 3 and step 5 is a no-op.
"""
from __future__ import annotations

import heapq
from collections import deque
from typing import Callable, Optional

import numpy as np

NO_SLOT = -1


class SimulationError(RuntimeError):
    pass


class EngineState:
    def __init__(self, horizon: int, n_runways: int, lockout: int, open_mask: np.ndarray,
                 cap: Optional[int], draw: Callable[[], int]):
        self.horizon = int(horizon)
        self.n_runways = int(n_runways)
        self.lockout = int(lockout)
        self.cap = cap
        self.draw = draw
        mask = np.asarray(open_mask, dtype=bool)
        if mask.shape != (self.n_runways, self.horizon):
            raise ValueError("open_mask must have shape (n_runways, horizon)")
        # prefix counts of open slots per runway
        self._open_cum = [
            [0] + np.cumsum(mask[r], dtype=np.int64).tolist() for r in range(self.n_runways)
        ]
        self.clock = 0

        self.arrival: list[int] = []
        self.entry: list[int] = []
        self.nominal: list[int] = []
        self.landing: list[int] = []
        self.runway: list[int] = []

        self._marks: list[dict[int, int]] = [dict() for _ in range(self.n_runways)]
        self._outer: deque[int] = deque()
        self._queue: list[tuple[int, int, int]] = []
        self._pending_at: dict[int, int] = {}
        self._eligible = 0
        self._inside = 0

        self.slot_in_tracon: list[int] = []
        self.slot_rerouted: list[int] = []
        self.slot_waiting: list[int] = []

    # runway bookkeeping -------------------------------------------------

    def _open_through(self, r: int, start: int, stop: int) -> bool:
        if start < 0 or stop > self.horizon:
            return False
        cum = self._open_cum[r]
        return cum[stop] - cum[start] == stop - start

    def _clear(self, r: int, lo: int, hi: int) -> bool:
        marks = self._marks[r]
        return not any(s in marks for s in range(lo, hi + 1))

    def _try_reserve(self, pid: int, L: int) -> bool:
        k = self.lockout
        for r in range(self.n_runways):
            if self._open_through(r, L, L + k) and self._clear(r, L - k + 1, L + k - 1):
                self._marks[r][L] = pid
                self.runway[pid] = r
                return True
        return False

    def _enqueue(self, pid: int):
        L = self.entry[pid] + self.nominal[pid]
        heapq.heappush(self._queue, (L, self.entry[pid], pid))
        self._pending_at[L] = self._pending_at.get(L, 0) + 1

    def _admit(self, t: int):
        while self._outer and (self.cap is None or self._inside < self.cap):
            pid = self._outer.popleft()
            n = int(self.draw())
            self.entry[pid] = t
            self.nominal[pid] = n
            self._inside += 1
            if not self._try_reserve(pid, t + n):
                self._enqueue(pid)

    def _land(self, pid: int, r: int, t: int):
        self.landing[pid] = t
        self.runway[pid] = r
        self._inside -= 1

    # one slot -------------------------------------------------------------

    def step(self, slot: int, arrivals: int) -> "EngineState":
        t = int(slot)
        if t != self.clock:
            raise SimulationError(f"expected slot {self.clock}, got {t}")
        if t >= self.horizon:
            raise SimulationError(f"slot {t} beyond horizon {self.horizon}")
        k = self.lockout
        self._eligible += self._pending_at.pop(t, 0)

        for r in range(self.n_runways):
            pid = self._marks[r].get(t)
            if pid is not None:
                self._land(pid, r, t)

        for _ in range(int(arrivals)):
            pid = len(self.arrival)
            self.arrival.append(t)
            self.entry.append(NO_SLOT)
            self.nominal.append(NO_SLOT)
            self.landing.append(NO_SLOT)
            self.runway.append(NO_SLOT)
            self._outer.append(pid)
        self._admit(t)

        while self._queue and self._queue[0][0] <= t:
            free = [r for r in range(self.n_runways)
                    if self._open_through(r, t, t + 1) and self._clear(r, t - k + 1, t)]
            if not free:
                break
            quiet = [r for r in free if self._clear(r, t + 1, t + k - 1)]
            r = (quiet or free)[0]
            _, _, pid = heapq.heappop(self._queue)
            self._eligible -= 1
            marks = self._marks[r]
            for s in range(t + 1, t + k):
                bumped = marks.pop(s, None)
                if bumped is not None:
                    self.runway[bumped] = NO_SLOT
                    self._enqueue(bumped)
            marks[t] = pid
            self._land(pid, r, t)

        self._admit(t)

        self.slot_in_tracon.append(self._inside)
        self.slot_rerouted.append(self._eligible)
        self.slot_waiting.append(len(self._outer))
        self.clock = t + 1
        return self

    def result(self) -> dict:
        # unlanded planes keep their runway only as a pending reservation
        runway = [r if land != NO_SLOT else NO_SLOT for r, land in zip(self.runway, self.landing)]
        return {
            "arrival": np.array(self.arrival, dtype=np.int64),
            "entry": np.array(self.entry, dtype=np.int64),
            "nominal": np.array(self.nominal, dtype=np.int64),
            "landing": np.array(self.landing, dtype=np.int64),
            "runway": np.array(runway, dtype=np.int64),
            "in_tracon": np.array(self.slot_in_tracon, dtype=np.int64),
            "rerouted": np.array(self.slot_rerouted, dtype=np.int64),
            "waiting": np.array(self.slot_waiting, dtype=np.int64),
        }


def run_engine(horizon, n_runways, lockout, arrivals, nominals, open_mask, cap) -> dict:
    """Whole-horizon run. ``nominals[i]`` is consumed by the i-th admission."""
    draws = iter(np.asarray(nominals, dtype=np.int64).tolist())
    state = EngineState(horizon, n_runways, lockout, open_mask,
                        None if cap < 0 else int(cap), lambda: next(draws))
    for t, a in enumerate(np.asarray(arrivals, dtype=np.int64).tolist()):
        state.step(t, a)
    return state.result()
