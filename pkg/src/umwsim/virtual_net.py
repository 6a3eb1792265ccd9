"""Virtual queues of the precedence-relaxed network.

One integer counter per edge. A packet admitted on a route deposits one
virtual arrival at *every* edge of the route in the admission slot; the
counters then follow the Lindley recursion q <- (q + A - mu)^+ with the
allocated (not necessarily used) service vector mu. Cumulative arrival and
service counters back the windowed-load identities used as diagnostics.
"""
from __future__ import annotations

from collections import deque

import numpy as np

from .routing import RouteTree


def virtual_arrival_vector(routes: dict[int, RouteTree], arrivals: dict[int, int], m: int) -> np.ndarray:
    """Per-edge virtual arrivals: every class-c arrival hits each edge of the
    single route chosen for class c this slot."""
    A = np.zeros(m, dtype=np.int64)
    for cid, count in arrivals.items():
        if count <= 0:
            continue
        tree = routes[cid]
        for te in tree.edges:
            A[te.edge_id] += count
    return A


class VirtualQueues:
    """State of the m virtual queues plus cumulative counters.

    history_window > 0 retains that many recent (A, mu) slot records;
    history_window=None retains everything (test/diagnostics mode).
    """

    def __init__(self, m: int, history_window: int | None = 0):
        self.m = m
        self.q = np.zeros(m, dtype=np.int64)
        self.cum_arrivals = np.zeros(m, dtype=np.int64)
        self.cum_service = np.zeros(m, dtype=np.int64)
        self.slot = 0
        if history_window is None:
            self._history: deque | None = deque()
        elif history_window > 0:
            self._history = deque(maxlen=history_window)
        else:
            self._history = None

    def lindley_update(self, A: np.ndarray, mu: np.ndarray) -> None:
        """One slot: q <- (q + A - mu)^+, with allocated-service accounting."""
        np.add(self.q, A, out=self.q)
        np.subtract(self.q, mu, out=self.q)
        np.maximum(self.q, 0, out=self.q)
        self.cum_arrivals += A
        self.cum_service += mu
        if self._history is not None:
            self._history.append((A.copy(), np.asarray(mu, dtype=np.int64).copy()))
        self.slot += 1

    def history_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Retained history as (arrivals, service) arrays of shape (slots, m)."""
        if self._history is None or not self._history:
            return np.zeros((0, self.m), np.int64), np.zeros((0, self.m), np.int64)
        A = np.stack([a for a, _ in self._history])
        S = np.stack([s for _, s in self._history])
        return A, S

    def total(self) -> int:
        return int(self.q.sum())


class AssociatedQueues:
    """Companion recursion qhat <- (qhat - mu)^+ + A.

    Differs from the Lindley queue only in when arrivals are counted;
    per slot it stays within [q, q + A_max] of the Lindley state, which
    is the sandwich property the diagnostics verify.
    """

    def __init__(self, m: int):
        self.qhat = np.zeros(m, dtype=np.int64)

    def update(self, A: np.ndarray, mu: np.ndarray) -> None:
        np.subtract(self.qhat, mu, out=self.qhat)
        np.maximum(self.qhat, 0, out=self.qhat)
        np.add(self.qhat, A, out=self.qhat)


def skorokhod_value(arrivals: np.ndarray, service: np.ndarray, e: int, t: int) -> int:
    """Queue value at slot t recomputed from raw history, one window at a time.

    Evaluates (sup over window lengths tau=1..t of arrivals-minus-service on
    the window [t - tau, t))^+ directly; the independent oracle for the
    Lindley state.
    """
    if t > len(arrivals):
        raise ValueError(f"history has {len(arrivals)} slots, asked for t={t}")
    best = 0
    acc = 0
    for tau in range(1, t + 1):
        acc += int(arrivals[t - tau, e]) - int(service[t - tau, e])
        if acc > best:
            best = acc
    return best


def skorokhod_profile(arrivals: np.ndarray, service: np.ndarray) -> np.ndarray:
    """Queue trajectory for all edges and slots from raw history.

    Uses the running-minimum form of the same supremum: with G(t) the
    cumulative arrivals-minus-service, the queue at t is
    (G(t) - min_{k<t} G(k))^+. Returns shape (slots, m); row t-1 is the
    state after slot t-1, i.e. the value at time t.
    """
    G = np.cumsum(arrivals - service, axis=0, dtype=np.int64)
    prev = np.vstack([np.zeros((1, arrivals.shape[1]), np.int64), G[:-1]])
    running_min = np.minimum.accumulate(np.minimum(prev, 0), axis=0)
    return np.maximum(G - running_min, 0)


def loading_slack(arrivals: np.ndarray, service: np.ndarray, e: int, t0: int, t: int) -> int:
    """Window arrivals minus window allocated service on [t0, t)."""
    if not (0 <= t0 < t <= len(arrivals)):
        raise ValueError(f"bad window [{t0}, {t}) for history of {len(arrivals)} slots")
    return int(arrivals[t0:t, e].sum() - service[t0:t, e].sum())
