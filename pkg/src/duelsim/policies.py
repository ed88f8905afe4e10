"""Action-selection policies behind a single select/observe interface.

Every policy exposes:
  select(t) -> PolicyAction     choose and commit the pair for step t
  observe(t, conversions)       deliver conversion events landing at t
  observe_count(t, count)       anonymous-count variant (multi-round only)

and read-only inspection (active_arms, declared_winner) for the harness.
One instance drives one run; none of them share state.

Random-draw order inside champion-style selection (kept fixed so seeded
runs are reproducible and external references can align draw-for-draw):
  1. champion set C empty            -> one integers(k) draw
     exactly one champion            -> no draw
     several, remembered best in C   -> one random() coin; if it is >= 0.5,
                                        one integers(len(C)-1) draw over the
                                        remaining champions in index order
     several, no remembered best     -> one integers(len(C)) draw
  2. challenger: single maximizer of the champion's column -> no draw
     (self-comparison allowed); otherwise one integers() draw over the
     non-champion maximizers in index order, skipped when only one remains.
"""

from __future__ import annotations

import math
from typing import Callable, NamedTuple

import numpy as np

from .bounds import n_schedule, n_schedule_aggregated
from .errors import EmptyActiveSet, RoundComplete
from .estimator import DelayCorrectedEstimator


class PolicyAction(NamedTuple):
    """Ordered pair for one step; pending feedback biases toward v."""

    u: int
    v: int


def _champion_pair(
    ucb: np.ndarray, best: int | None, rng: np.random.Generator
) -> tuple[int, int, int | None]:
    """Champion/challenger selection from a full bound matrix.

    Returns (u, v, new_best).  See the module docstring for the draw order.
    """
    k = ucb.shape[0]
    champions = np.flatnonzero(np.all(ucb >= 0.5, axis=1))
    if best is not None and best not in champions:
        best = None
    if champions.size == 0:
        u = int(rng.integers(k))
    elif champions.size == 1:
        u = int(champions[0])
        best = u
    elif best is not None:
        if rng.random() < 0.5:
            u = best
        else:
            rest = champions[champions != best]
            u = int(rest[rng.integers(rest.size)])
    else:
        u = int(champions[rng.integers(champions.size)])

    column = ucb[:, u]
    maxers = np.flatnonzero(column == column.max())
    if maxers.size == 1:
        v = int(maxers[0])
    else:
        others = maxers[maxers != u]
        v = int(others[0]) if others.size == 1 else int(others[rng.integers(others.size)])
    return u, v, best


class RucbDelay:
    """Optimistic champion/challenger selection on delay-corrected statistics."""

    name = "rucb-delay"

    def __init__(
        self,
        k: int,
        *,
        alpha: float,
        window: int,
        tau_table: np.ndarray,
        rng: np.random.Generator,
    ):
        if alpha < 1.0:
            raise ValueError(f"alpha must be >= 1, got {alpha}")
        self.k = k
        self.alpha = alpha
        self.est = DelayCorrectedEstimator(k, window, tau_table)
        self.rng = rng
        self.best: int | None = None

    def select(self, t: int) -> PolicyAction:
        ucb = self.est.ucb_matrix(t, self.alpha)
        u, v, self.best = _champion_pair(ucb, self.best, self.rng)
        self.est.record_play(u, v, t)
        return PolicyAction(u, v)

    def observe(self, t: int, conversions) -> None:
        for o in conversions:
            self.est.ingest_conversion(o.s, o.u, o.v)

    @property
    def active_arms(self):
        return None

    def declared_winner(self) -> int | None:
        return self.best


class RucbBaseline:
    """Delay-unaware reference: classical win counts fed the raw stream.

    Each play's first observation (one step after it) enters the additive
    win-count update as seen: a win for the first arm if it has already
    converted, otherwise a zero, which reads as a win for the second arm.
    Later conversions arrive as further win events; the count update has
    no retraction, so the earlier zero stays on the books.  With unit
    delay nothing is ever pending and this is exactly the classical
    policy; under real delay the phantom losses accumulate and keep the
    race open.
    """

    name = "rucb-baseline"

    def __init__(self, k: int, *, alpha: float, rng: np.random.Generator):
        self.k = k
        self.alpha = alpha
        self.rng = rng
        self.wins = np.zeros((k, k), dtype=np.float64)
        self.best: int | None = None
        self._unobserved: tuple[int, int, int] | None = None  # (s, u, v)

    def _ucb_matrix(self, t: int) -> np.ndarray:
        n = self.wins + self.wins.T
        with np.errstate(divide="ignore", invalid="ignore"):
            u = self.wins / n + np.sqrt(self.alpha * math.log(t) / n)
        u[n == 0.0] = 1.0
        np.fill_diagonal(u, 0.5)
        return u

    def select(self, t: int) -> PolicyAction:
        u, v, self.best = _champion_pair(self._ucb_matrix(t), self.best, self.rng)
        self._unobserved = (t, u, v)
        return PolicyAction(u, v)

    def observe(self, t: int, conversions) -> None:
        converted_now = set()
        for o in conversions:
            self.wins[o.u, o.v] += 1.0
            converted_now.add(o.s)
        if self._unobserved is not None:
            s, u, v = self._unobserved
            if s not in converted_now:
                self.wins[v, u] += 1.0  # the zero reads as a second-arm win
            self._unobserved = None

    @property
    def active_arms(self):
        return None

    def declared_winner(self) -> int | None:
        return self.best


class RrDbDelay:
    """Round-robin sweeps over active pairs with per-sweep elimination.

    A sweep visits every unordered active pair in index order, playing
    both orderings back to back.  After a sweep, any arm whose corrected
    bound against some active opponent falls below 1/2 is dropped; the
    survivor, once unique, is played against itself.
    """

    name = "rrdb-delay"

    def __init__(
        self, k: int, *, window: int, tau_table: np.ndarray, delta: float
    ):
        if not 0.0 < delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {delta}")
        self.k = k
        self.delta = delta
        self.est = DelayCorrectedEstimator(k, window, tau_table)
        self.active: list[int] = list(range(k))
        self._sweep = self._build_sweep()
        self._pos = 0

    def _build_sweep(self) -> list[PolicyAction]:
        pairs = []
        for a in range(len(self.active)):
            for b in range(a + 1, len(self.active)):
                i, j = self.active[a], self.active[b]
                pairs.append(PolicyAction(i, j))
                pairs.append(PolicyAction(j, i))
        return pairs

    def bound(self, i: int, j: int, t: int) -> float:
        """Corrected round-robin bound; optimistic 1 when the pair has no data."""
        n, n_tilde, s_ij, _ = self.est.pair_stats(i, j, t)
        if n_tilde == 0.0:
            return 1.0
        radius = math.sqrt(
            n * math.log(self.k * t / self.delta) / (n_tilde * n_tilde)
        )
        return s_ij / n_tilde + radius

    def _eliminate(self, t: int) -> None:
        bounds = {
            (i, j): self.bound(i, j, t)
            for i in self.active
            for j in self.active
            if i != j
        }
        survivors = [
            i
            for i in self.active
            if not any(bounds[(i, j)] < 0.5 for j in self.active if j != i)
        ]
        if not survivors:
            keep = max(
                self.active,
                key=lambda i: min(bounds[(i, j)] for j in self.active if j != i),
            )
            survivors = [keep]
        self.active = survivors

    def select(self, t: int) -> PolicyAction:
        if len(self.active) > 1 and self._pos == len(self._sweep):
            self._eliminate(t)
            self._sweep = self._build_sweep()
            self._pos = 0
        if len(self.active) == 1:
            w = self.active[0]
            action = PolicyAction(w, w)
        else:
            action = self._sweep[self._pos]
            self._pos += 1
        self.est.record_play(action.u, action.v, t)
        return action

    def observe(self, t: int, conversions) -> None:
        for o in conversions:
            self.est.ingest_conversion(o.s, o.u, o.v)

    @property
    def active_arms(self) -> tuple[int, ...]:
        return tuple(self.active)

    def declared_winner(self) -> int | None:
        return self.active[0] if len(self.active) == 1 else None


class MrrDbDelay:
    """Multi-round elimination driven only by the expected delay.

    Each round m plays every ordered pair of active arms up to the
    cumulative target n_m (counts carry over between rounds), compares
    raw conversion frequencies against 1/2 - gamma_m, and halves gamma.
    In aggregated mode anonymous per-step counts are credited to the pair
    played on the previous step.
    """

    name = "mrr-delay"

    def __init__(
        self,
        k: int,
        *,
        horizon: int,
        mean_delay: float,
        aggregated: bool = False,
        schedule: Callable[[int], int] | None = None,
    ):
        self.k = k
        self.horizon = horizon
        self.aggregated = aggregated
        if schedule is None:
            base = n_schedule_aggregated if aggregated else n_schedule
            schedule = lambda m: base(m, horizon, mean_delay)  # noqa: E731
        self._schedule = schedule
        self.m = 1
        self.gamma = 0.5
        self.n_target = schedule(1)
        self.active: list[int] = list(range(k))
        self.plays: dict[tuple[int, int], int] = {}
        self.convs: dict[tuple[int, int], float] = {}
        self._pairs = self._build_pairs()
        self._pos = 0
        self._prev_pair: tuple[int, int] | None = None
        self.rescued_rounds: list[int] = []

    def _build_pairs(self) -> list[tuple[int, int]]:
        return [(i, j) for i in self.active for j in self.active if i != j]

    def mean_estimate(self, i: int, j: int) -> float:
        """Conversions per play of (i, j); may exceed 1 in aggregated mode."""
        plays = self.plays.get((i, j), 0)
        if plays == 0:
            return math.nan
        return self.convs.get((i, j), 0.0) / plays

    def next_pair(self, t: int) -> PolicyAction:
        """Next scheduled pair, or RoundComplete when all targets are met."""
        if len(self.active) == 1:
            w = self.active[0]
            self._prev_pair = (w, w)
            return PolicyAction(w, w)
        while self._pos < len(self._pairs):
            pair = self._pairs[self._pos]
            if self.plays.get(pair, 0) < self.n_target:
                self.plays[pair] = self.plays.get(pair, 0) + 1
                self._prev_pair = pair
                return PolicyAction(*pair)
            self._pos += 1
        raise RoundComplete(f"round {self.m}: every active pair has {self.n_target} plays")

    def end_round(self, rescue: bool = True) -> set[int]:
        """Eliminate beaten arms, halve the tolerance and open the next round."""
        means = {
            (i, j): self.mean_estimate(i, j)
            for i in self.active
            for j in self.active
            if i != j
        }
        eliminated = {
            i
            for i in self.active
            if any(means[(i, j)] + self.gamma < 0.5 for j in self.active if j != i)
        }
        if eliminated == set(self.active):
            if not rescue:
                raise EmptyActiveSet(f"round {self.m} would eliminate every arm")
            keep = max(
                self.active,
                key=lambda i: min(means[(i, j)] for j in self.active if j != i),
            )
            eliminated.discard(keep)
            self.rescued_rounds.append(self.m)
        self.active = [i for i in self.active if i not in eliminated]
        self.gamma /= 2.0
        self.m += 1
        self.n_target = max(self._schedule(self.m), self.n_target + 1)
        self._pairs = self._build_pairs()
        self._pos = 0
        return eliminated

    def select(self, t: int) -> PolicyAction:
        try:
            return self.next_pair(t)
        except RoundComplete:
            self.end_round()
            return self.next_pair(t)

    def observe(self, t: int, conversions) -> None:
        for o in conversions:
            key = (o.u, o.v)
            self.convs[key] = self.convs.get(key, 0.0) + 1.0

    def observe_count(self, t: int, count: int) -> None:
        if count and self._prev_pair is not None:
            key = self._prev_pair
            self.convs[key] = self.convs.get(key, 0.0) + count

    @property
    def active_arms(self) -> tuple[int, ...]:
        return tuple(self.active)

    def declared_winner(self) -> int | None:
        """Sole survivor, else the arm with the best worst-case estimate."""
        if len(self.active) == 1:
            return self.active[0]
        best, best_score = None, -math.inf
        for i in self.active:
            scores = [
                self.mean_estimate(i, j)
                for j in self.active
                if j != i and self.plays.get((i, j), 0) > 0
            ]
            score = min(scores) if scores else -math.inf
            if score > best_score:
                best, best_score = i, score
        return best if best is not None else self.active[0]


POLICY_NAMES = ("rucb-delay", "rrdb-delay", "mrr-delay", "rucb-baseline")

_FACTORIES: dict[str, Callable] = {}


def register_policy(name: str, factory: Callable) -> None:
    """Register a policy factory; used for the built-ins and test doubles."""
    _FACTORIES[name] = factory


def make_policy(
    name: str,
    *,
    k: int,
    horizon: int,
    delay,
    alpha: float = 1.0,
    window: int = 1000,
    delta: float | None = None,
    aggregated: bool = False,
    rng: np.random.Generator | None = None,
):
    """Instantiate a policy by its registry name."""
    if name not in _FACTORIES:
        known = ", ".join(sorted(_FACTORIES))
        raise ValueError(f"unknown policy {name!r}; known: {known}")
    if aggregated and name != "mrr-delay":
        raise ValueError(f"policy {name!r} cannot consume aggregated anonymous feedback")
    return _FACTORIES[name](
        k=k,
        horizon=horizon,
        delay=delay,
        alpha=alpha,
        window=window,
        delta=delta,
        aggregated=aggregated,
        rng=rng,
    )


register_policy(
    "rucb-delay",
    lambda *, k, horizon, delay, alpha, window, delta, aggregated, rng: RucbDelay(
        k, alpha=alpha, window=window, tau_table=delay.tau_table(window), rng=rng
    ),
)
register_policy(
    "rucb-baseline",
    lambda *, k, horizon, delay, alpha, window, delta, aggregated, rng: RucbBaseline(
        k, alpha=alpha, rng=rng
    ),
)
register_policy(
    "rrdb-delay",
    lambda *, k, horizon, delay, alpha, window, delta, aggregated, rng: RrDbDelay(
        k,
        window=window,
        tau_table=delay.tau_table(window),
        delta=delta if delta is not None else 1.0 / horizon,
    ),
)
register_policy(
    "mrr-delay",
    lambda *, k, horizon, delay, alpha, window, delta, aggregated, rng: MrrDbDelay(
        k, horizon=horizon, mean_delay=delay.mean, aggregated=aggregated
    ),
)
