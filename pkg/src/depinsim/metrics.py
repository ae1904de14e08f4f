"""Macro indicators: efficiency, inclusion, and stability.

Computed over simulated trajectories or external price series.  Undefined
metrics (no nodes, too-short series) are reported as None, never as zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Optional, Sequence, Tuple, Union

import numpy as np

if TYPE_CHECKING:
    from .engine import Trajectory


@dataclass(frozen=True)
class MetricReport:
    efficiency: float
    inclusion: Optional[float]
    stability: Optional[float]
    n_init: Optional[int]
    n_total: Optional[int]
    n_ext: Optional[int]
    window: Tuple[int, int]  # month range, inclusive

    def to_dict(self) -> dict:
        return {
            "efficiency": self.efficiency,
            "inclusion": self.inclusion,
            "stability": self.stability,
            "n_init": self.n_init,
            "n_total": self.n_total,
            "n_ext": self.n_ext,
            "window": list(self.window),
        }


def efficiency(circulating: float, price: float) -> float:
    """Market capitalization: circulating tokens times token price."""
    if circulating < 0 or price < 0:
        raise ValueError("efficiency inputs must be non-negative")
    return circulating * price


def inclusion(n_total: int, n_init: int) -> Optional[float]:
    """Fraction of all participating nodes run by external providers.

    None when there are no nodes at all (undefined, not zero).
    """
    if n_total == 0:
        return None
    if n_init < 0 or n_total < n_init:
        raise ValueError(f"need n_total >= n_init >= 0, got n_total={n_total}, n_init={n_init}")
    return (n_total - n_init) / n_total


def stability(prices: Sequence[float]) -> Optional[float]:
    """Sample standard deviation (N-1 denominator) of log price returns.

    Returns None for series too short to yield two returns.  Streaming
    (Welford) accumulation keeps constant-return series at exactly zero.
    """
    series = np.asarray(prices, dtype=float)
    if series.ndim != 1:
        raise ValueError("price series must be one-dimensional")
    if series.size < 3:
        return None
    bad = np.nonzero(~(series > 0))[0]
    if bad.size:
        raise ValueError(f"non-positive price at index {bad[0]}: {series[bad[0]]}")
    returns = np.log(series[1:] / series[:-1])
    mean = 0.0
    m2 = 0.0
    for i, r in enumerate(returns, start=1):
        delta = r - mean
        mean += delta / i
        m2 += delta * (r - mean)
    return math.sqrt(m2 / (returns.size - 1))


def report(trajectory: "Trajectory", stability_window: Optional[Tuple[int, int]] = None) -> MetricReport:
    """Score a finished trajectory.

    Efficiency comes from the final month's state; inclusion counts every
    node that ever entered (cumulative, so healthy churn is not penalized);
    stability spans the full price series unless a window is given.
    """
    states = trajectory.states
    if not states:
        raise ValueError("trajectory has no recorded months")
    n_init = int(trajectory.config.get("initial_nodes", 0))
    n_ext = sum(e.entries for e in trajectory.events)
    n_total = n_init + n_ext

    window = stability_window or trajectory.config.get("stability_window") or (states[0].month, states[-1].month)
    first, last = int(window[0]), int(window[1])
    offset = states[0].month
    windowed = [s.token_price for s in states if first <= s.month <= last]
    if not windowed:
        raise ValueError(f"stability window {window} selects no months (run covers {offset}..{states[-1].month})")

    final = states[-1]
    return MetricReport(
        efficiency=efficiency(final.circulating_supply, final.token_price),
        inclusion=inclusion(n_total, n_init),
        stability=stability(windowed),
        n_init=n_init,
        n_total=n_total,
        n_ext=n_ext,
        window=(first, last),
    )


def score_series(prices: Sequence[float], circulating: float, price: float) -> MetricReport:
    """Score an external price series; node metrics are unavailable."""
    return MetricReport(
        efficiency=efficiency(circulating, price),
        inclusion=None,
        stability=stability(prices),
        n_init=None,
        n_total=None,
        n_ext=None,
        window=(1, len(prices)),
    )


def read_price_series(path: Union[str, Path]) -> list:
    """Read one price per line; an optional single header line is skipped.

    Raises ValueError naming the offending row for unparseable or
    non-positive entries.
    """
    prices = []
    with open(path, encoding="utf-8") as fh:
        for row, raw in enumerate(fh, start=1):
            text = raw.strip()
            if not text:
                continue
            try:
                value = float(text)
            except ValueError:
                if row == 1 and not prices:  # header line
                    continue
                raise ValueError(f"row {row}: not a number: {text!r}") from None
            if not value > 0:
                raise ValueError(f"row {row}: non-positive price: {text}")
            prices.append(value)
    if not prices:
        raise ValueError(f"no prices found in {path}")
    return prices
