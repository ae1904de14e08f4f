"""Token release schedules: cliff-linear vesting and halving emissions.

Token quantities are real-valued (double precision). Months are 1-based;
month 0 is the pre-launch state with zero circulating supply.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class ScheduleKind(Enum):
    CLIFF_LINEAR = "cliff_linear"
    HALVING_EMISSION = "halving_emission"


@dataclass(frozen=True)
class TokenAllocation:
    """Fixed total supply split between the three stakeholder classes."""

    total_supply: float = 1_000_000_000.0
    team_fraction: float = 0.20
    vc_fraction: float = 0.20
    node_fraction: float = 0.60

    def __post_init__(self):
        if self.total_supply <= 0:
            raise ValueError(f"total_supply must be positive, got {self.total_supply}")
        for name in ("team_fraction", "vc_fraction", "node_fraction"):
            value = getattr(self, name)
            if value < 0:
                raise ValueError(f"{name} must be non-negative, got {value}")
        total = self.team_fraction + self.vc_fraction + self.node_fraction
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"allocation fractions sum to {total}, expected 1.0")

    @property
    def team_tokens(self) -> float:
        return self.team_fraction * self.total_supply

    @property
    def vc_tokens(self) -> float:
        return self.vc_fraction * self.total_supply

    @property
    def node_tokens(self) -> float:
        return self.node_fraction * self.total_supply


@dataclass(frozen=True)
class VestingSchedule:
    """Release rule for one stakeholder class.

    CLIFF_LINEAR: nothing for `cliff_months`, a lump `unlock_at_cliff`
    fraction the month after, then the rest in equal monthly tranches over
    `linear_months`.  HALVING_EMISSION: equal monthly payouts whose rate
    halves every `halving_period_months` (per-period fractions 1/2, 1/4, ...
    sum to 1 in the limit).
    """

    kind: ScheduleKind
    cliff_months: int = 0
    unlock_at_cliff: float = 0.0
    linear_months: int = 1
    halving_period_months: int = 48

    def __post_init__(self):
        if self.kind is ScheduleKind.CLIFF_LINEAR:
            if self.cliff_months < 0:
                raise ValueError(f"cliff_months must be >= 0, got {self.cliff_months}")
            if not 0.0 <= self.unlock_at_cliff <= 1.0:
                raise ValueError(f"unlock_at_cliff must be in [0, 1], got {self.unlock_at_cliff}")
            if self.linear_months <= 0:
                raise ValueError(f"linear_months must be positive, got {self.linear_months}")
        elif self.kind is ScheduleKind.HALVING_EMISSION:
            if self.halving_period_months <= 0:
                raise ValueError(
                    f"halving_period_months must be positive, got {self.halving_period_months}"
                )
        else:
            raise ValueError(f"unknown schedule kind: {self.kind!r}")

    @classmethod
    def cliff_linear(cls, cliff_months: int, unlock_at_cliff: float, linear_months: int) -> "VestingSchedule":
        return cls(
            kind=ScheduleKind.CLIFF_LINEAR,
            cliff_months=cliff_months,
            unlock_at_cliff=unlock_at_cliff,
            linear_months=linear_months,
        )

    @classmethod
    def halving(cls, period_months: int) -> "VestingSchedule":
        return cls(kind=ScheduleKind.HALVING_EMISSION, halving_period_months=period_months)


# Default schedules: team 4y vesting with 1y cliff (25% lump), VC 2y vesting
# with 1y cliff (50% lump), node emission halving every 48 months.
TEAM_SCHEDULE = VestingSchedule.cliff_linear(cliff_months=11, unlock_at_cliff=0.25, linear_months=36)
VC_SCHEDULE = VestingSchedule.cliff_linear(cliff_months=11, unlock_at_cliff=0.50, linear_months=12)
NODE_SCHEDULE = VestingSchedule.halving(period_months=48)


def _check_month(month: int, minimum: int = 1) -> int:
    m = int(month)
    if m != month or m < minimum:
        raise ValueError(f"month must be an integer >= {minimum}, got {month!r}")
    return m


def release(month: int, total: float, schedule: VestingSchedule) -> float:
    """Tokens released in `month` out of `total` under `schedule`."""
    month = _check_month(month)
    if schedule.kind is ScheduleKind.CLIFF_LINEAR:
        if month <= schedule.cliff_months:
            return 0.0
        if month == schedule.cliff_months + 1:
            return schedule.unlock_at_cliff * total
        if month <= schedule.cliff_months + 1 + schedule.linear_months:
            return (1.0 - schedule.unlock_at_cliff) * total / schedule.linear_months
        return 0.0
    # Halving emission: period p covers months [p*L+1, (p+1)*L] and pays
    # total * 2^-(p+1) spread equally over its L months.
    period = (month - 1) // schedule.halving_period_months
    return total * 0.5 ** (period + 1) / schedule.halving_period_months


def cumulative_release(month: int, total: float, schedule: VestingSchedule) -> float:
    """Closed-form sum of release() over months 1..month (month 0 -> 0)."""
    month = _check_month(month, minimum=0)
    if month == 0:
        return 0.0
    if schedule.kind is ScheduleKind.CLIFF_LINEAR:
        if month <= schedule.cliff_months:
            return 0.0
        tranche = (1.0 - schedule.unlock_at_cliff) * total / schedule.linear_months
        vested = min(month - schedule.cliff_months - 1, schedule.linear_months)
        return schedule.unlock_at_cliff * total + vested * tranche
    length = schedule.halving_period_months
    full_periods = month // length
    remainder = month - full_periods * length
    completed = total * (1.0 - 0.5**full_periods)
    return completed + remainder * (total * 0.5 ** (full_periods + 1) / length)


def team_release(month: int, alloc: TokenAllocation, schedule: VestingSchedule = TEAM_SCHEDULE) -> float:
    """Core-team tokens released in `month`."""
    return release(month, alloc.team_tokens, schedule)


def vc_release(month: int, alloc: TokenAllocation, schedule: VestingSchedule = VC_SCHEDULE) -> float:
    """Venture-capital tokens released in `month`."""
    return release(month, alloc.vc_tokens, schedule)


def node_emission(month: int, alloc: TokenAllocation, schedule: VestingSchedule = NODE_SCHEDULE) -> float:
    """Node-provider tokens emitted in `month`."""
    return release(month, alloc.node_tokens, schedule)


def circulating_supply(
    month: int,
    alloc: TokenAllocation,
    team_schedule: VestingSchedule = TEAM_SCHEDULE,
    vc_schedule: VestingSchedule = VC_SCHEDULE,
    node_schedule: VestingSchedule = NODE_SCHEDULE,
) -> float:
    """Cumulative tokens released by all three schedules through `month`."""
    month = _check_month(month, minimum=0)
    return (
        cumulative_release(month, alloc.team_tokens, team_schedule)
        + cumulative_release(month, alloc.vc_tokens, vc_schedule)
        + cumulative_release(month, alloc.node_tokens, node_schedule)
    )
