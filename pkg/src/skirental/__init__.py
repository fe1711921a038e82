"""Robust design of finite-horizon ski-rental algorithms.

Worst-case optimal threshold mixtures, subgame-optimal behavioral policies,
Bayesian-optimal thresholds and an approximation scheme for the
prior-independent optimum, together with brute-force oracles used to check
all of them.
"""

from skirental.instance import SkiInstance

__all__ = ["SkiInstance"]
__version__ = "0.1.0"
