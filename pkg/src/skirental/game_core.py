"""Finite two-player zero-sum game primitives.

Rows belong to the minimizing algorithm player, columns to the maximizing
adversary; table entries are the adversary's utility.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

NORM_TOL = 1e-12
GAP_CLAMP = 1e-12


@dataclass(frozen=True)
class MixedStrategy:
    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float).ravel()
        if w.size == 0:
            raise ValueError("mixed strategy needs at least one action")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ValueError("weights must be finite and nonnegative")
        if abs(w.sum() - 1.0) > NORM_TOL:
            raise ValueError(f"weights sum to {w.sum()!r}, not 1")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def normalized(cls, raw) -> MixedStrategy:
        """Clip float noise below zero and rescale to sum one."""
        w = np.clip(np.asarray(raw, dtype=float), 0.0, None)
        total = w.sum()
        if total <= 0:
            raise ValueError("cannot normalize an all-zero weight vector")
        return cls(w / total)

    @classmethod
    def uniform(cls, n: int) -> MixedStrategy:
        return cls(np.full(n, 1.0 / n))

    @classmethod
    def point(cls, n: int, i: int) -> MixedStrategy:
        w = np.zeros(n)
        w[i] = 1.0
        return cls(w)

    def __len__(self):
        return self.weights.size


@dataclass(frozen=True)
class PayoffTable:
    u: np.ndarray
    u_max: float

    def __post_init__(self):
        u = np.array(self.u, dtype=float)
        if u.ndim != 2 or 0 in u.shape:
            raise ValueError("payoff table must be a nonempty matrix")
        if not np.all(np.isfinite(u)):
            raise ValueError("payoff entries must be finite")
        if u.min() < 0 or u.max() > self.u_max:
            raise ValueError(f"payoff entries must lie in [0, {self.u_max}]")
        u.setflags(write=False)
        object.__setattr__(self, "u", u)

    @classmethod
    def from_matrix(cls, u) -> PayoffTable:
        u = np.asarray(u, dtype=float)
        return cls(u, float(u.max()))

    @property
    def shape(self) -> tuple[int, int]:
        return self.u.shape


def _check_dims(alg: MixedStrategy, adv: MixedStrategy, table: PayoffTable):
    rows, cols = table.shape
    if len(alg) != rows or len(adv) != cols:
        raise ValueError(
            f"strategy sizes ({len(alg)}, {len(adv)}) do not match table {table.shape}")


def expected_payoff(alg: MixedStrategy, adv: MixedStrategy, table: PayoffTable) -> float:
    _check_dims(alg, adv, table)
    return float(alg.weights @ table.u @ adv.weights)


def eps_nash_gap(alg: MixedStrategy, adv: MixedStrategy,
                 table: PayoffTable) -> tuple[float, float]:
    """(alg_gap, adv_gap): best unilateral improvement for each side."""
    _check_dims(alg, adv, table)
    value = expected_payoff(alg, adv, table)
    adv_gap = float(np.max(alg.weights @ table.u)) - value
    alg_gap = value - float(np.min(table.u @ adv.weights))

    tol = GAP_CLAMP * max(1.0, abs(value))

    def clamp(g):
        return 0.0 if -tol <= g < 0 else g

    alg_gap, adv_gap = clamp(alg_gap), clamp(adv_gap)
    # noise larger than the clamp only arises from invalid tables or strategies
    if alg_gap < 0 or adv_gap < 0:
        raise ArithmeticError(f"negative duality gap ({alg_gap}, {adv_gap})")
    return alg_gap, adv_gap


def certify_minmax(gap: float) -> float:
    """Minmax suboptimality guaranteed for the row mixture of a gap-Nash pair."""
    if gap < 0:
        raise ValueError("gap must be nonnegative")
    return 2.0 * gap
