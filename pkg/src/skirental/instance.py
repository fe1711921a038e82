from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class SkiInstance:
    """Finite-horizon ski-rental parameters.

    ``horizon`` is the number of days T, ``stop_cost`` the one-time cost B
    (continuing on a good day costs 1), and ``prior_floor`` the smallest
    good-day probability the adversary may pick in the prior-independent game.
    """

    horizon: int
    stop_cost: float
    prior_floor: float = 1e-3

    def __post_init__(self):
        if isinstance(self.horizon, bool) or int(self.horizon) != self.horizon:
            raise ValueError(f"horizon must be an integer, got {self.horizon!r}")
        object.__setattr__(self, "horizon", int(self.horizon))
        object.__setattr__(self, "stop_cost", float(self.stop_cost))
        object.__setattr__(self, "prior_floor", float(self.prior_floor))
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        if not math.isfinite(self.stop_cost) or self.stop_cost <= 1.0:
            raise ValueError(f"stop_cost must be > 1, got {self.stop_cost}")
        if not 0.0 < self.prior_floor <= 1.0:
            raise ValueError(f"prior_floor must lie in (0, 1], got {self.prior_floor}")

    @property
    def T(self) -> int:
        return self.horizon

    @property
    def B(self) -> float:
        return self.stop_cost

    @property
    def floor_B(self) -> int:
        return math.floor(self.stop_cost)

    @property
    def ceil_B(self) -> int:
        return math.ceil(self.stop_cost)

    @property
    def trivial(self) -> bool:
        """Always continuing is optimal in every framework when B >= T."""
        return self.stop_cost >= self.horizon

    @property
    def short_horizon(self) -> bool:
        """The case ceil(B) + floor(B) >= T + 1 (integer comparison)."""
        return self.ceil_B + self.floor_B >= self.horizon + 1

    def with_horizon(self, horizon: int) -> SkiInstance:
        return SkiInstance(horizon, self.stop_cost, self.prior_floor)


def hindsight_cost(good_days: int, stop_cost: float) -> float:
    """Offline optimum min{#good days, B}."""
    return float(min(good_days, stop_cost))
