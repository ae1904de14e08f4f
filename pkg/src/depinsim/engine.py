"""Discrete-time simulation engine.

Each month runs a fixed sub-step order against the frozen previous-month
snapshot: vest tokens, compute revenue, run node entry then exit decisions,
process growth-capital arrivals and expiries, form the price, and commit
one MarketState record.  Partial months are never committed.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import metrics as metrics_mod
from .agents import (
    DecisionContext,
    GcParams,
    GrowthCapitalist,
    HeuristicPolicy,
    LlmPolicy,
    NodeProvider,
    apply_patience,
    spawn_growth_capitalists,
    total_endowment,
)
from .llm_gateway import AuditLog, LlmSettings, build_backend
from .market import (
    MarketState,
    RevenueParams,
    diluted_market_cap,
    global_revenue,
    market_cap,
    token_price,
    user_count,
)
from .tokenomics import (
    NODE_SCHEDULE,
    TEAM_SCHEDULE,
    VC_SCHEDULE,
    ScheduleKind,
    TokenAllocation,
    VestingSchedule,
    circulating_supply,
    node_emission,
    team_release,
    vc_release,
)

# RNG stream channels, one per randomized sub-step.  Streams are derived
# from (seed, month, channel) so adding draws to one sub-step never
# perturbs another's.
_STREAM_INIT_NODES = 0
_STREAM_CANDIDATES = 1
_STREAM_GROWTH_CAPITAL = 2


def _stream(seed: int, month: int, channel: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence((seed, month, channel)))


class SimulationError(Exception):
    """A sub-step failed; carries the month and sub-step for diagnosis."""

    def __init__(self, month: int, substep: str, message: str):
        super().__init__(f"month {month}, sub-step '{substep}': {message}")
        self.month = month
        self.substep = substep


def _schedule_to_dict(schedule: VestingSchedule) -> dict:
    if schedule.kind is ScheduleKind.CLIFF_LINEAR:
        return {
            "kind": schedule.kind.value,
            "cliff_months": schedule.cliff_months,
            "unlock_at_cliff": schedule.unlock_at_cliff,
            "linear_months": schedule.linear_months,
        }
    return {"kind": schedule.kind.value, "halving_period_months": schedule.halving_period_months}


def _schedule_from_dict(data: dict, default: VestingSchedule) -> VestingSchedule:
    allowed = {"kind", "cliff_months", "unlock_at_cliff", "linear_months", "halving_period_months"}
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ValueError(f"unknown schedule keys: {', '.join(unknown)}")
    kind = ScheduleKind(data.get("kind", default.kind.value))
    if kind is ScheduleKind.CLIFF_LINEAR:
        return VestingSchedule.cliff_linear(
            cliff_months=int(data.get("cliff_months", default.cliff_months)),
            unlock_at_cliff=float(data.get("unlock_at_cliff", default.unlock_at_cliff)),
            linear_months=int(data.get("linear_months", default.linear_months)),
        )
    return VestingSchedule.halving(
        period_months=int(data.get("halving_period_months", default.halving_period_months))
    )


@dataclass
class SimulationConfig:
    """Everything a run needs; a fixed seed makes the run fully reproducible."""

    horizon_months: int = 96
    initial_nodes: int = 50
    initial_price: float = 1.0  # currency per token
    user_revenue_factor: float = 10.0  # k, currency per user per month
    node_cost: float = 1000.0  # baseline operating cost per node per month
    cost_spread: Tuple[float, float] = (0.8, 1.2)  # per-node cost multiplier range
    tolerance_range: Tuple[float, float] = (0.3, 0.9)  # per-node risk tolerance range
    patience: int = 1  # consecutive exit signals required to leave
    entry_pool_size: int = 10  # candidate nodes evaluated per month
    gc_arrival_rate: float = 1.0
    gc_endowment_mu: float = 13.0
    gc_endowment_sigma: float = 1.0
    gc_lifespan_mu: float = 2.5
    gc_lifespan_sigma: float = 0.5
    tokens_on_sale_fraction: float = 0.05  # of month-1 circulating supply
    policy: str = "heuristic"  # "heuristic" | "llm"
    seed: int = 42
    parallel_decisions: bool = False
    stability_window: Optional[Tuple[int, int]] = None
    total_supply: float = 1_000_000_000.0
    team_fraction: float = 0.20
    vc_fraction: float = 0.20
    node_fraction: float = 0.60
    team_schedule: VestingSchedule = field(default_factory=lambda: TEAM_SCHEDULE)
    vc_schedule: VestingSchedule = field(default_factory=lambda: VC_SCHEDULE)
    node_schedule: VestingSchedule = field(default_factory=lambda: NODE_SCHEDULE)
    llm: Optional[LlmSettings] = None

    def validate(self) -> None:
        if self.horizon_months < 1:
            raise ValueError(f"horizon_months must be >= 1, got {self.horizon_months}")
        if self.initial_nodes < 0:
            raise ValueError(f"initial_nodes must be >= 0, got {self.initial_nodes}")
        if self.initial_price <= 0:
            raise ValueError(f"initial_price must be positive, got {self.initial_price}")
        if self.node_cost <= 0:
            raise ValueError(f"node_cost must be positive, got {self.node_cost}")
        if self.user_revenue_factor < 0:
            raise ValueError("user_revenue_factor must be >= 0")
        lo, hi = self.cost_spread
        if not 0 < lo <= hi:
            raise ValueError(f"cost_spread must satisfy 0 < lo <= hi, got {self.cost_spread}")
        tlo, thi = self.tolerance_range
        if not 0 < tlo <= thi <= 1:
            raise ValueError(f"tolerance_range must lie in (0, 1], got {self.tolerance_range}")
        if self.patience < 1:
            raise ValueError(f"patience must be >= 1, got {self.patience}")
        if self.entry_pool_size < 0:
            raise ValueError("entry_pool_size must be >= 0")
        if self.gc_arrival_rate < 0:
            raise ValueError("gc_arrival_rate must be >= 0")
        if self.tokens_on_sale_fraction < 0:
            raise ValueError("tokens_on_sale_fraction must be >= 0")
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")
        if self.policy not in ("heuristic", "llm"):
            raise ValueError(f"policy must be 'heuristic' or 'llm', got {self.policy!r}")
        if self.stability_window is not None:
            first, last = self.stability_window
            if not 1 <= first <= last:
                raise ValueError(f"stability_window must satisfy 1 <= first <= last, got {self.stability_window}")
        self.allocation()  # raises on bad fractions

    def allocation(self) -> TokenAllocation:
        return TokenAllocation(
            total_supply=self.total_supply,
            team_fraction=self.team_fraction,
            vc_fraction=self.vc_fraction,
            node_fraction=self.node_fraction,
        )

    def revenue_params(self) -> RevenueParams:
        return RevenueParams(
            user_revenue_factor=self.user_revenue_factor,
            node_operating_cost=self.node_cost,
        )

    def gc_params(self) -> GcParams:
        return GcParams(
            arrival_rate=self.gc_arrival_rate,
            endowment_mu=self.gc_endowment_mu,
            endowment_sigma=self.gc_endowment_sigma,
            lifespan_mu=self.gc_lifespan_mu,
            lifespan_sigma=self.gc_lifespan_sigma,
        )

    def to_dict(self) -> dict:
        data = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name in ("team_schedule", "vc_schedule", "node_schedule"):
                data[f.name] = _schedule_to_dict(value)
            elif f.name == "llm":
                data[f.name] = value.to_dict() if value is not None else None
            elif isinstance(value, tuple):
                data[f.name] = list(value)
            else:
                data[f.name] = value
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "SimulationConfig":
        names = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - names)
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(unknown)}")
        kwargs = dict(data)
        for key in ("cost_spread", "tolerance_range", "stability_window"):
            if kwargs.get(key) is not None:
                kwargs[key] = tuple(kwargs[key])
        defaults = {"team_schedule": TEAM_SCHEDULE, "vc_schedule": VC_SCHEDULE, "node_schedule": NODE_SCHEDULE}
        for key, default in defaults.items():
            if key in kwargs and isinstance(kwargs[key], dict):
                kwargs[key] = _schedule_from_dict(kwargs[key], default)
        if isinstance(kwargs.get("llm"), dict):
            kwargs["llm"] = LlmSettings.from_dict(kwargs["llm"])
        config = cls(**kwargs)
        config.validate()
        return config


@dataclass
class MonthEvents:
    """What happened during one committed month."""

    month: int
    entries: int = 0
    exits: int = 0
    gc_arrivals: int = 0
    gc_expiries: int = 0
    fallbacks: int = 0  # LLM replies that fell back to the heuristic


CSV_COLUMNS = (
    "month", "nodes", "users", "price", "circ_supply", "market_cap",
    "diluted_cap", "E_total", "tokens_on_sale", "entries", "exits", "fallbacks",
)


@dataclass
class Trajectory:
    """Ordered month records plus the event log and config echo."""

    states: List[MarketState]
    events: List[MonthEvents]
    config: dict
    seed: int
    metrics: Optional[metrics_mod.MetricReport] = None

    def price_series(self) -> List[float]:
        return [s.token_price for s in self.states]

    def to_csv_string(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for state, event in zip(self.states, self.events):
            writer.writerow([
                state.month,
                state.active_nodes,
                repr(state.users),
                repr(state.token_price),
                repr(state.circulating_supply),
                repr(state.market_cap),
                repr(state.diluted_market_cap),
                repr(state.total_gc_endowment),
                repr(state.tokens_on_sale),
                event.entries,
                event.exits,
                event.fallbacks,
            ])
        return buf.getvalue()

    def write_csv(self, path: Union[str, Path]) -> None:
        Path(path).write_text(self.to_csv_string(), encoding="utf-8")

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "config": self.config,
            "states": [asdict(s) for s in self.states],
            "events": [asdict(e) for e in self.events],
            "metrics": self.metrics.to_dict() if self.metrics else None,
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def build_policy(config: SimulationConfig, audit_log: Optional[AuditLog] = None):
    """Construct the configured decision policy."""
    if config.policy == "heuristic":
        return HeuristicPolicy()
    if config.policy == "llm":
        if config.llm is None:
            raise ValueError("policy 'llm' requires an llm config section")
        backend = build_backend(config.llm)
        return LlmPolicy(
            backend,
            model_name=config.llm.model_name,
            max_tokens=config.llm.max_tokens,
            temperature=config.llm.temperature,
            audit_log=audit_log,
        )
    raise ValueError(f"unknown policy {config.policy!r}")


class Simulation:
    """Mutable run state: node roster, growth capitalists, last snapshot.

    Within a month every decision reads the same frozen start-of-month
    context, so agent evaluation order (or parallelism) cannot change the
    outcome.
    """

    def __init__(self, config: SimulationConfig, policy=None, audit_log: Optional[AuditLog] = None):
        config.validate()
        self.config = config
        self.policy = policy if policy is not None else build_policy(config, audit_log)
        self.alloc = config.allocation()
        self.revenue_params = config.revenue_params()
        self.gc_params = config.gc_params()

        rng = _stream(config.seed, 0, _STREAM_INIT_NODES)
        costs, tolerances = self._draw_node_params(rng, config.initial_nodes)
        self.nodes: List[NodeProvider] = [
            NodeProvider(
                id=i,
                cost=costs[i],
                tolerance=tolerances[i],
                patience=config.patience,
                joined_month=0,
            )
            for i in range(config.initial_nodes)
        ]
        self.gcs: List[GrowthCapitalist] = []
        self._next_node_id = config.initial_nodes
        self._next_gc_id = 0
        self._fallbacks_seen = 0

        # Seed the sale-side of the price ratio so month 1 has a market
        # even before any growth capitalist exits.
        month1_supply = circulating_supply(
            1, self.alloc, config.team_schedule, config.vc_schedule, config.node_schedule
        )
        self.state = MarketState(
            month=0,
            active_nodes=config.initial_nodes,
            users=user_count(config.initial_nodes),
            token_price=config.initial_price,
            tokens_on_sale=config.tokens_on_sale_fraction * month1_supply,
            circulating_supply=0.0,
            total_gc_endowment=0.0,
            global_revenue=0.0,
            market_cap=0.0,
            diluted_market_cap=0.0,
        )
        self.states: List[MarketState] = []
        self.events: List[MonthEvents] = []

    def _draw_node_params(self, rng: np.random.Generator, count: int):
        lo, hi = self.config.cost_spread
        tlo, thi = self.config.tolerance_range
        costs = self.config.node_cost * rng.uniform(lo, hi, count)
        tolerances = rng.uniform(tlo, thi, count)
        return costs, tolerances

    def _decide(self, decide: Callable[[DecisionContext], bool], contexts: Sequence[DecisionContext]) -> List[bool]:
        if self.config.parallel_decisions and len(contexts) > 1:
            with ThreadPoolExecutor(max_workers=8) as pool:
                return list(pool.map(decide, contexts))
        return [decide(ctx) for ctx in contexts]

    def step(self, month: int) -> MarketState:
        """Advance one month and commit its record."""
        if month != self.state.month + 1:
            raise SimulationError(month, "ordering", f"expected month {self.state.month + 1}")
        prev = self.state
        cfg = self.config
        substep = "vesting"
        try:
            # 1. Token releases and circulating supply.
            released = (
                team_release(month, self.alloc, cfg.team_schedule)
                + vc_release(month, self.alloc, cfg.vc_schedule)
                + node_emission(month, self.alloc, cfg.node_schedule)
            )
            circ = prev.circulating_supply + released

            # 2. Users and global revenue from the frozen snapshot.
            substep = "revenue"
            users = user_count(prev.active_nodes)
            emission = node_emission(month, self.alloc, cfg.node_schedule)
            revenue = global_revenue(
                prev.token_price, emission, prev.active_nodes, users, self.revenue_params
            )

            # 3. Node entries over the candidate pool, then exits with patience.
            substep = "node-decisions"
            rng = _stream(cfg.seed, month, _STREAM_CANDIDATES)
            costs, tolerances = self._draw_node_params(rng, cfg.entry_pool_size)
            entry_ctxs = [
                DecisionContext(revenue, costs[i], tolerances[i], month)
                for i in range(cfg.entry_pool_size)
            ]
            entry_verdicts = self._decide(self.policy.decide_entry, entry_ctxs)
            entrants = []
            for i, enters in enumerate(entry_verdicts):
                if enters:
                    entrants.append(
                        NodeProvider(
                            id=self._next_node_id,
                            cost=costs[i],
                            tolerance=tolerances[i],
                            patience=cfg.patience,
                            joined_month=month,
                        )
                    )
                    self._next_node_id += 1
            # This month's entrants face exit conditions from next month on.
            incumbents = [n for n in self.nodes if n.joined_month < month]
            exit_ctxs = [DecisionContext(revenue, n.cost, n.tolerance, month) for n in incumbents]
            exit_signals = self._decide(self.policy.decide_exit, exit_ctxs)
            exits = 0
            for node, signal in zip(incumbents, exit_signals):
                if apply_patience(node, signal):
                    node.active = False
                    exits += 1
            self.nodes = [n for n in self.nodes if n.active] + entrants
            n_now = len(self.nodes)

            # 4. Growth-capital arrivals, then expiries feed tokens on sale.
            substep = "growth-capital"
            rng_gc = _stream(cfg.seed, month, _STREAM_GROWTH_CAPITAL)
            arrivals = spawn_growth_capitalists(month, self.gc_params, rng_gc, self._next_gc_id)
            self._next_gc_id += len(arrivals)
            self.gcs.extend(arrivals)
            expired = [gc for gc in self.gcs if not gc.is_active(month)]
            sale = prev.tokens_on_sale + sum(gc.tokens_held for gc in expired)
            self.gcs = [gc for gc in self.gcs if gc.is_active(month)]
            endowment = total_endowment(self.gcs, month)

            # 5. Price; a month with no buyers or no sellers has no trade,
            # so the last price stands.
            substep = "pricing"
            if sale > 0 and endowment > 0:
                price = token_price(endowment, sale)
            else:
                price = prev.token_price
            for gc in arrivals:
                gc.tokens_held = gc.endowment / price if price > 0 else 0.0

            # 6. Market caps; commit the month.
            substep = "record"
            state = MarketState(
                month=month,
                active_nodes=n_now,
                users=users,
                token_price=price,
                tokens_on_sale=sale,
                circulating_supply=circ,
                total_gc_endowment=endowment,
                global_revenue=revenue,
                market_cap=market_cap(price, circ),
                diluted_market_cap=diluted_market_cap(price, self.alloc.total_supply),
            )
            fallbacks_total = getattr(self.policy, "fallback_count", 0)
            events = MonthEvents(
                month=month,
                entries=len(entrants),
                exits=exits,
                gc_arrivals=len(arrivals),
                gc_expiries=len(expired),
                fallbacks=fallbacks_total - self._fallbacks_seen,
            )
            self._fallbacks_seen = fallbacks_total
        except SimulationError:
            raise
        except Exception as err:
            raise SimulationError(month, substep, str(err)) from err

        self.state = state
        self.states.append(state)
        self.events.append(events)
        return state


def run(
    config: SimulationConfig,
    policy=None,
    audit_log: Optional[AuditLog] = None,
) -> Trajectory:
    """Run the full horizon and attach the metric summary."""
    sim = Simulation(config, policy=policy, audit_log=audit_log)
    for month in range(1, config.horizon_months + 1):
        sim.step(month)
    trajectory = Trajectory(
        states=sim.states,
        events=sim.events,
        config=config.to_dict(),
        seed=config.seed,
    )
    trajectory.metrics = metrics_mod.report(trajectory)
    return trajectory
