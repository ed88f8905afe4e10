"""Windowed, delay-corrected pairwise statistics.

Per ordered play of (u, v) at step s, queried at step t with censoring
window M and delay CDF tau:

  weight(s)  = tau(min(M, t - s))          (0 for t <= s since tau(0) = 0)
  N[i, j]    = plays of (i, j) + (j, i), either order
  Ntilde     = sum of weight(s) over those plays  (delay-discounted count)
  S[i, j]    = sum over (i, j)-plays of Ytilde
             + sum over (j, i)-plays of (weight - Ytilde)

where Ytilde = 1 iff the play's win converted within min(M, age) steps.
A play older than M is frozen: its weight is tau(M) forever and late
conversions are ignored, so it is folded into permanent aggregates and
dropped from the window.  Storage is O(K^2 + M) regardless of t.

The window is held twice, by design: flat arrays back the vectorized
whole-matrix queries the optimistic policies issue every step, and a
per-pair time index makes single-pair queries cheap for sweep-based
policies and verification.  Both views read the same entries.

Call discipline per step t: ingest the conversions that land at t, then
query (statistics describe plays up to t-1), then record the play at t.
"""

from __future__ import annotations

import math
from collections import deque

import numpy as np

from .errors import NoData, OutOfOrder, UnknownPlay


class DelayCorrectedEstimator:
    """Maintains N, Ntilde and S for all arm pairs under a censoring window."""

    def __init__(self, k: int, m_window: int, tau_table: np.ndarray):
        if k < 1:
            raise ValueError("need at least one arm")
        if m_window < 1:
            raise ValueError("censoring window must be >= 1")
        tau_table = np.asarray(tau_table, dtype=np.float64)
        if tau_table.shape != (m_window + 1,):
            raise ValueError(
                f"tau table must have length m_window+1={m_window + 1}, "
                f"got {tau_table.shape}"
            )
        if tau_table[0] != 0.0:
            raise ValueError("tau table must start at tau(0) = 0")
        if np.any(np.diff(tau_table) < 0) or tau_table[-1] > 1.0:
            raise ValueError("tau table must be non-decreasing within [0, 1]")
        self.k = k
        self.m_window = m_window
        self.tau = tau_table
        self._tau_list = tau_table.tolist()
        self.tau_m = float(tau_table[m_window])

        self.n = np.zeros((k, k), dtype=np.int64)
        # plays/wins folded out of the window, per ordered pair
        self._folded_plays = np.zeros((k, k), dtype=np.float64)
        self._folded_wins = np.zeros((k, k), dtype=np.float64)
        # converted flags currently inside the window, per ordered pair
        self._window_wins = np.zeros((k, k), dtype=np.float64)

        cap = 2 * m_window + 2
        self._s = np.zeros(cap, dtype=np.int64)
        self._pair = np.zeros(cap, dtype=np.int64)  # u * k + v
        self._lo = 0
        self._hi = 0
        self._slot: dict[int, int] = {}  # play time -> buffer index
        self._by_pair: dict[int, deque[int]] = {}  # pair key -> play times
        self._converted: set[int] = set()  # play times with landed wins
        self.last_t = 0

    # -- bookkeeping ------------------------------------------------------

    @property
    def window_size(self) -> int:
        return self._hi - self._lo

    def record_play(self, u: int, v: int, t: int) -> None:
        """Register the play at step t.  Times must strictly increase."""
        if t <= self.last_t:
            raise OutOfOrder(f"play at t={t} after t={self.last_t}")
        if not (0 <= u < self.k and 0 <= v < self.k):
            raise ValueError(f"arm pair ({u}, {v}) out of range for k={self.k}")
        # a play can still convert at age M, and those conversions are
        # ingested before the step-t play is recorded, so s <= t - M is final
        self._fold_older_than(t - self.m_window + 1)
        if self._hi == self._s.shape[0]:
            self._compact()
        i = self._hi
        key = u * self.k + v
        self._s[i] = t
        self._pair[i] = key
        self._slot[t] = i
        bucket = self._by_pair.get(key)
        if bucket is None:
            bucket = self._by_pair[key] = deque()
        bucket.append(t)
        self._hi += 1
        self.n[u, v] += 1
        self.n[v, u] += 1
        self.last_t = t

    def ingest_conversion(self, s: int, u: int, v: int) -> bool:
        """Mark the play at step s as converted.

        Returns False when the conversion is older than the window (it is
        discarded, matching the censored-observation rule).  Idempotent for
        duplicate events.  Raises UnknownPlay when s should still be in the
        window but no matching play was recorded.
        """
        idx = self._slot.get(s)
        if idx is None:
            if s <= self.last_t - self.m_window:
                return False
            raise UnknownPlay(f"no play recorded at t={s}")
        if self._pair[idx] != u * self.k + v:
            raise UnknownPlay(f"play at t={s} was not of pair ({u}, {v})")
        if s not in self._converted:
            self._converted.add(s)
            self._window_wins[u, v] += 1.0
        return True

    def _fold_older_than(self, cutoff: int) -> None:
        k = self.k
        while self._lo < self._hi and self._s[self._lo] < cutoff:
            i = self._lo
            s = int(self._s[i])
            key = int(self._pair[i])
            u, v = divmod(key, k)
            self._folded_plays[u, v] += 1.0
            if s in self._converted:
                self._converted.discard(s)
                self._folded_wins[u, v] += 1.0
                self._window_wins[u, v] -= 1.0
            del self._slot[s]
            popped = self._by_pair[key].popleft()
            assert popped == s
            self._lo += 1

    def _compact(self) -> None:
        size = self.window_size
        self._s[:size] = self._s[self._lo : self._hi]
        self._pair[:size] = self._pair[self._lo : self._hi]
        self._lo = 0
        self._hi = size
        self._slot = {int(self._s[i]): i for i in range(size)}

    # -- per-pair queries --------------------------------------------------

    def _side_sums(self, key: int, t: int) -> tuple[float, float]:
        """(discounted weight, landed wins) over the window plays of one
        ordered pair."""
        bucket = self._by_pair.get(key)
        if not bucket:
            return 0.0, 0.0
        m = self.m_window
        tau = self._tau_list
        converted = self._converted
        w = 0.0
        y = 0.0
        for s in bucket:
            age = t - s
            if age > m:
                age = m
            elif age < 0:
                age = 0
            w += tau[age]
            if s in converted:
                y += 1.0
        return w, y

    def pair_stats(self, i: int, j: int, t: int) -> tuple[int, float, float, float]:
        """(N_ij, Ntilde_ij, S_ij, S_ji) for pair {i, j} at step t."""
        k = self.k
        tm = self.tau_m
        if i == j:
            w, _ = self._side_sums(i * k + i, t)
            tot = tm * self._folded_plays[i, i] + w
            # win term and loss-correction term cancel to the weight
            return int(self.n[i, i]), 2.0 * tot, tot, tot
        w_ij, y_win_ij = self._side_sums(i * k + j, t)
        w_ji, y_win_ji = self._side_sums(j * k + i, t)
        y_ij = y_win_ij + self._folded_wins[i, j]
        y_ji = y_win_ji + self._folded_wins[j, i]
        a_ij = tm * self._folded_plays[i, j] + w_ij
        a_ji = tm * self._folded_plays[j, i] + w_ji
        n_tilde = a_ij + a_ji
        s_ij = y_ij + (a_ji - y_ji)
        s_ji = y_ji + (a_ij - y_ij)
        return int(self.n[i, j]), n_tilde, s_ij, s_ji

    def n_tilde(self, i: int, j: int, t: int) -> float:
        return self.pair_stats(i, j, t)[1]

    def s_stat(self, i: int, j: int, t: int) -> float:
        return self.pair_stats(i, j, t)[2]

    def mu_hat(self, i: int, j: int, t: int) -> float:
        """Unbiased preference estimate S/Ntilde; deliberately unclipped."""
        _, n_tilde, s_ij, _ = self.pair_stats(i, j, t)
        if n_tilde == 0.0:
            raise NoData(f"no discounted plays of pair ({i}, {j}) by t={t}")
        return s_ij / n_tilde

    def ucb(self, i: int, j: int, t: int, alpha: float) -> float:
        """Optimistic bound mu_hat + sqrt(alpha * N * log t / Ntilde^2).

        1/2 on the diagonal; 1 when the pair has no discounted plays yet.
        """
        if i == j:
            return 0.5
        n, n_tilde, s_ij, _ = self.pair_stats(i, j, t)
        if n_tilde == 0.0:
            return 1.0
        return s_ij / n_tilde + math.sqrt(alpha * n * math.log(t) / (n_tilde * n_tilde))

    def lcb(self, i: int, j: int, t: int, alpha: float) -> float:
        return 1.0 - self.ucb(j, i, t, alpha)

    # -- whole-matrix fast path ---------------------------------------------

    def matrices(self, t: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(N, Ntilde, S) as K x K arrays; agrees with pair_stats entrywise."""
        k = self.k
        sl = slice(self._lo, self._hi)
        ages = t - self._s[sl]
        w = self.tau[np.clip(ages, 0, self.m_window)]
        a = self.tau_m * self._folded_plays + np.bincount(
            self._pair[sl], weights=w, minlength=k * k
        ).reshape(k, k)
        y = self._folded_wins + self._window_wins
        n_tilde = a + a.T
        s = y + (a.T - y.T)
        return self.n.copy(), n_tilde, s

    def ucb_matrix(self, t: int, alpha: float) -> np.ndarray:
        """All bounds at once: diagonal 1/2, no-data pairs 1."""
        n, n_tilde, s = self.matrices(t)
        with np.errstate(divide="ignore", invalid="ignore"):
            u = s / n_tilde + np.sqrt(alpha * n * math.log(t) / (n_tilde * n_tilde))
        u[n_tilde == 0.0] = 1.0
        np.fill_diagonal(u, 0.5)
        return u

    def debug_rows(self, t: int, alpha: float):
        """Rows (t, i, j, N, N_tilde, S, mu_hat, U) for every ordered pair."""
        n, n_tilde, s = self.matrices(t)
        u = self.ucb_matrix(t, alpha)
        for i in range(self.k):
            for j in range(self.k):
                if i == j:
                    continue
                mh = s[i, j] / n_tilde[i, j] if n_tilde[i, j] > 0 else float("nan")
                yield (t, i, j, int(n[i, j]), n_tilde[i, j], s[i, j], mh, u[i, j])

    def dump_debug_csv(self, path, t: int, alpha: float) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("t,i,j,N,N_tilde,S,mu_hat,U\n")
            for row in self.debug_rows(t, alpha):
                fh.write(",".join(str(x) for x in row) + "\n")
