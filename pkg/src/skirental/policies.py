"""Policy and prior value types shared by solvers and brute-force oracles."""

from __future__ import annotations

import json
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class BehavioralPolicy:
    """Per-state stop probabilities on good days.

    ``good_stop[t, k]`` is the probability of stopping on day t (1-based)
    when that day is good and k counts good days so far including it.
    Bad days never stop.
    """

    horizon: int
    stop_cost: float
    good_stop: np.ndarray

    def __post_init__(self):
        T = self.horizon
        if self.good_stop.shape != (T + 1, T + 1):
            raise ValueError(f"good_stop must have shape {(T + 1, T + 1)}")
        if np.any(self.good_stop < 0) or np.any(self.good_stop > 1):
            raise ValueError("stop probabilities must lie in [0, 1]")
        self.good_stop.setflags(write=False)

    @classmethod
    def from_function(cls, horizon: int, stop_cost: float,
                      fn: Callable[[int, int], float]) -> BehavioralPolicy:
        table = np.zeros((horizon + 1, horizon + 1))
        for t in range(1, horizon + 1):
            for k in range(1, t + 1):
                table[t, k] = fn(t, k)
        return cls(horizon, stop_cost, table)

    def stop_prob(self, t: int, k: int, good: bool) -> float:
        if not 1 <= t <= self.horizon:
            raise ValueError(f"day {t} outside 1..{self.horizon}")
        if good and not 1 <= k <= t:
            raise ValueError(f"good-day count {k} impossible on good day {t}")
        if not good and not 0 <= k <= t - 1:
            raise ValueError(f"good-day count {k} impossible on bad day {t}")
        if not good:
            return 0.0
        return float(self.good_stop[t, k])

    def to_json(self) -> str:
        """Good-weather states as {"t,k": probability}."""
        states = {f"{t},{k}": float(self.good_stop[t, k])
                  for t in range(1, self.horizon + 1) for k in range(1, t + 1)}
        return json.dumps(states, sort_keys=False)

    @classmethod
    def from_json(cls, text: str, stop_cost: float) -> BehavioralPolicy:
        states = json.loads(text)
        keys = [tuple(int(v) for v in key.split(",")) for key in states]
        T = max(t for t, _ in keys)
        table = np.zeros((T + 1, T + 1))
        for (t, k), key in zip(keys, states):
            table[t, k] = states[key]
        return cls(T, stop_cost, table)


@dataclass(frozen=True)
class InfoSymmetricPolicy:
    """Deterministic stop/continue table.

    ``stop[t, k]`` is True when the policy stops on a good day t having seen
    k good days among days 1..t-1. Entries with k >= t are unused.
    """

    stop: np.ndarray

    def __post_init__(self):
        stop = np.asarray(self.stop, dtype=bool)
        if stop.ndim != 2 or stop.shape[0] != stop.shape[1] or stop.shape[0] < 2:
            raise ValueError("stop table must be square with shape (T+1, T+1)")
        T = stop.shape[0] - 1
        if stop[T].any():
            raise ValueError("policies must continue on the last day")
        stop = stop & np.tri(T + 1, T + 1, -1, dtype=bool)
        stop[0] = False
        stop.setflags(write=False)
        object.__setattr__(self, "stop", stop)

    @property
    def horizon(self) -> int:
        return self.stop.shape[0] - 1

    def decision(self, t: int, k: int, good: bool) -> str:
        if not 1 <= t <= self.horizon or not 0 <= k <= t - 1:
            raise ValueError(f"state (t={t}, k={k}) outside the policy table")
        return "S" if good and self.stop[t, k] else "C"

    @classmethod
    def from_states(cls, horizon: int, stop_states) -> InfoSymmetricPolicy:
        table = np.zeros((horizon + 1, horizon + 1), dtype=bool)
        for t, k in stop_states:
            table[t, k] = True
        return cls(table)

    def stop_states(self) -> list[tuple[int, int]]:
        return [(int(t), int(k)) for t, k in zip(*np.nonzero(self.stop))]

    def key(self) -> bytes:
        return np.packbits(self.stop).tobytes()

    def __eq__(self, other):
        if not isinstance(other, InfoSymmetricPolicy):
            return NotImplemented
        return self.horizon == other.horizon and bool(np.array_equal(self.stop, other.stop))

    def __hash__(self):
        return hash((self.horizon, self.key()))

    def to_dict(self) -> dict:
        T = self.horizon
        rows = [[t, k, "S" if self.stop[t, k] else "C"]
                for t in range(1, T + 1) for k in range(t)]
        return {"T": T, "rows": rows}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> InfoSymmetricPolicy:
        T = int(data["T"])
        table = np.zeros((T + 1, T + 1), dtype=bool)
        for t, k, d in data["rows"]:
            if d not in ("S", "C"):
                raise ValueError(f"unknown decision {d!r}")
            if not 1 <= t <= T or not 0 <= k < t:
                raise ValueError(f"row ({t}, {k}) outside the policy table")
            table[t, k] = d == "S"
        return cls(table)

    @classmethod
    def from_json(cls, text: str) -> InfoSymmetricPolicy:
        return cls.from_dict(json.loads(text))


def always_continue_policy(horizon: int) -> InfoSymmetricPolicy:
    return InfoSymmetricPolicy(np.zeros((horizon + 1, horizon + 1), dtype=bool))


def threshold_count_policy(level: int, horizon: int) -> InfoSymmetricPolicy:
    """Threshold A^l as a table: stop on the (l+1)-st good day, never on day T."""
    table = np.zeros((horizon + 1, horizon + 1), dtype=bool)
    if level < horizon:
        table[1:horizon, level] = True
    return InfoSymmetricPolicy(table)


@dataclass(frozen=True)
class DiscretePrior:
    """Finite distribution over good-day probabilities."""

    support: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        support = np.asarray(self.support, dtype=float).ravel()
        weights = np.asarray(self.weights, dtype=float).ravel()
        if support.size == 0:
            raise ValueError("empty prior support")
        if support.shape != weights.shape:
            raise ValueError("support and weights differ in length")
        if np.any(weights < 0):
            raise ValueError("negative prior weight")
        if abs(weights.sum() - 1.0) > 1e-12:
            raise ValueError(f"prior weights sum to {weights.sum()}, not 1")
        if np.any(support < 0) or np.any(support > 1):
            raise ValueError("support points must lie in [0, 1]")
        order = np.argsort(support, kind="stable")
        support, weights = support[order], weights[order]
        if np.any(np.diff(support) <= 0):
            raise ValueError("support points must be distinct")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def point(cls, p: float) -> DiscretePrior:
        return cls(np.array([p]), np.array([1.0]))

    @classmethod
    def from_mixture(cls, points, weights) -> DiscretePrior:
        """Drop zero weights and renormalize away float drift."""
        points = np.asarray(points, dtype=float)
        weights = np.asarray(weights, dtype=float)
        keep = weights > 0
        w = weights[keep]
        return cls(points[keep], w / w.sum())
