"""Engine tests: determinism, event conservation, GC lifecycle, policies."""

import math

import pytest

from depinsim.agents import GrowthCapitalist, LlmPolicy, heuristic_prompt_reply
from depinsim.engine import Simulation, SimulationConfig, SimulationError, run
from depinsim.llm_gateway import LlmSettings, ScriptedBackend
from depinsim.tokenomics import TokenAllocation, circulating_supply


class TestConfig:
    def test_defaults_validate(self):
        SimulationConfig().validate()

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"horizon_months": 0},
            {"initial_nodes": -1},
            {"initial_price": 0.0},
            {"node_cost": 0.0},
            {"patience": 0},
            {"cost_spread": (0.0, 1.0)},
            {"tolerance_range": (0.5, 1.5)},
            {"seed": -1},
            {"policy": "oracle"},
            {"stability_window": (0, 5)},
            {"team_fraction": 0.5},
        ],
    )
    def test_invalid_configs_rejected(self, kwargs):
        with pytest.raises(ValueError):
            SimulationConfig(**kwargs).validate()

    def test_dict_round_trip(self):
        config = SimulationConfig(horizon_months=12, patience=3, seed=7)
        clone = SimulationConfig.from_dict(config.to_dict())
        assert clone == config

    def test_unknown_key_named_in_error(self):
        with pytest.raises(ValueError, match="horizon_monthss"):
            SimulationConfig.from_dict({"horizon_monthss": 96})

    def test_custom_schedules_from_config_drive_the_run(self):
        config = SimulationConfig.from_dict(
            {
                "horizon_months": 6,
                "entry_pool_size": 0,
                "gc_arrival_rate": 0.0,
                "team_schedule": {"kind": "cliff_linear", "cliff_months": 2,
                                  "unlock_at_cliff": 0.1, "linear_months": 12},
                "node_schedule": {"kind": "halving_emission", "halving_period_months": 24},
            }
        )
        assert config.team_schedule.cliff_months == 2
        assert config.node_schedule.halving_period_months == 24
        trajectory = run(config)
        expected = circulating_supply(
            6, TokenAllocation(), config.team_schedule, config.vc_schedule, config.node_schedule
        )
        assert trajectory.states[-1].circulating_supply == pytest.approx(expected, rel=1e-9)

    def test_unknown_schedule_key_rejected(self):
        with pytest.raises(ValueError, match="cliff_month"):
            SimulationConfig.from_dict({"team_schedule": {"cliff_month": 3}})

    def test_llm_policy_requires_llm_section(self):
        with pytest.raises(ValueError, match="llm"):
            run(SimulationConfig(horizon_months=1, policy="llm"))


class TestDeterminism:
    def test_same_seed_same_bytes(self, small_config):
        first = run(small_config)
        second = run(small_config)
        assert first.to_csv_string() == second.to_csv_string()
        assert first.to_json() == second.to_json()

    def test_different_seed_different_trajectory(self):
        a = run(SimulationConfig(horizon_months=24, seed=1))
        b = run(SimulationConfig(horizon_months=24, seed=2))
        assert a.to_csv_string() != b.to_csv_string()

    def test_parallel_equals_sequential(self):
        sequential = run(SimulationConfig(horizon_months=18, parallel_decisions=False))
        parallel = run(SimulationConfig(horizon_months=18, parallel_decisions=True))
        assert sequential.to_csv_string() == parallel.to_csv_string()


class TestNullDynamics:
    def test_price_carries_and_nodes_hold(self, null_dynamics_config):
        trajectory = run(null_dynamics_config)
        for state in trajectory.states:
            assert state.token_price == null_dynamics_config.initial_price
            assert state.active_nodes == 50
            assert state.users == 3500.0
        assert trajectory.metrics.inclusion == 0.0
        assert trajectory.metrics.stability == 0.0

    def test_supply_follows_schedules(self, null_dynamics_config):
        trajectory = run(null_dynamics_config)
        alloc = TokenAllocation()
        for state in trajectory.states:
            assert state.circulating_supply == pytest.approx(
                circulating_supply(state.month, alloc), rel=1e-9
            )


class TestTrajectoryShape:
    def test_months_strictly_increasing(self, small_config):
        trajectory = run(small_config)
        months = [s.month for s in trajectory.states]
        assert months == list(range(1, small_config.horizon_months + 1))
        assert [e.month for e in trajectory.events] == months

    def test_event_conservation(self):
        trajectory = run(SimulationConfig(horizon_months=48, seed=3))
        nodes = 50
        for state, event in zip(trajectory.states, trajectory.events):
            nodes = nodes + event.entries - event.exits
            assert state.active_nodes == nodes

    def test_all_fields_finite_and_sane(self):
        for seed in (0, 1, 2):
            trajectory = run(SimulationConfig(horizon_months=96, seed=seed))
            previous_supply = 0.0
            for state in trajectory.states:
                for name in (
                    "users", "token_price", "tokens_on_sale", "circulating_supply",
                    "total_gc_endowment", "global_revenue", "market_cap", "diluted_market_cap",
                ):
                    value = getattr(state, name)
                    assert math.isfinite(value), (seed, state.month, name)
                    assert value >= 0.0, (seed, state.month, name)
                assert state.active_nodes >= 0
                assert state.circulating_supply >= previous_supply
                previous_supply = state.circulating_supply

    def test_csv_has_expected_columns(self, small_config):
        text = run(small_config).to_csv_string()
        header = text.splitlines()[0]
        assert header == (
            "month,nodes,users,price,circ_supply,market_cap,diluted_cap,"
            "E_total,tokens_on_sale,entries,exits,fallbacks"
        )
        assert len(text.splitlines()) == small_config.horizon_months + 1


class TestGrowthCapitalLifecycle:
    def test_expiry_moves_holdings_to_sale_once(self):
        config = SimulationConfig(horizon_months=10, entry_pool_size=0, gc_arrival_rate=0.0)
        sim = Simulation(config)
        gc = GrowthCapitalist(id=0, endowment=5e6, entry_month=0, lifespan=4, tokens_held=0.0)
        sim.gcs.append(gc)
        for month in range(1, 11):
            sim.step(month)
        states = sim.states
        # Active through month 3: endowment counted, price = E / sale.
        assert states[0].total_gc_endowment == 5e6
        assert states[2].total_gc_endowment == 5e6
        assert states[3].total_gc_endowment == 0.0  # expires at month 4
        sale_before = states[2].tokens_on_sale
        sale_after = states[3].tokens_on_sale
        assert sale_after == sale_before  # injected GC held no tokens
        # Price carries forward once the market empties.
        assert states[3].token_price == states[2].token_price

    def test_engine_priced_holdings_feed_sale(self):
        config = SimulationConfig(
            horizon_months=12, entry_pool_size=0, gc_arrival_rate=0.0, seed=5
        )
        sim = Simulation(config)
        sim.step(1)
        price_1 = sim.state.token_price
        arrival = GrowthCapitalist(id=99, endowment=1e6, entry_month=2, lifespan=3)
        # Mimic an arrival at month 2 by injecting before the step.
        sim.gcs.append(arrival)
        sim.step(2)
        price_2 = sim.state.token_price
        arrival.tokens_held = arrival.endowment / price_2
        for month in (3, 4):
            sim.step(month)
        sale_4 = sim.states[3].tokens_on_sale
        sale_3 = sim.states[2].tokens_on_sale
        # Expiry at month 5 = entry 2 + lifespan 3.
        sim.step(5)
        assert sim.states[4].tokens_on_sale == pytest.approx(sale_4 + arrival.tokens_held)
        assert sale_4 == sale_3
        assert price_1 > 0

    def test_arrivals_expiries_counted(self):
        trajectory = run(SimulationConfig(horizon_months=96, seed=11))
        arrivals = sum(e.gc_arrivals for e in trajectory.events)
        expiries = sum(e.gc_expiries for e in trajectory.events)
        assert arrivals > 0
        assert 0 < expiries <= arrivals
        sales = [s.tokens_on_sale for s in trajectory.states]
        assert all(b >= a for a, b in zip(sales, sales[1:]))  # sale pool only grows


class TestOneMonthOracle:
    def test_step_matches_hand_computation(self):
        config = SimulationConfig(entry_pool_size=0, gc_arrival_rate=0.0)
        sim = Simulation(config)
        sim.gcs.append(GrowthCapitalist(id=0, endowment=5e6, entry_month=0, lifespan=100))
        state = sim.step(1)
        # Spreadsheet arithmetic, worked by hand from the model formulas:
        assert state.circulating_supply == pytest.approx(6_250_000.0, rel=1e-9)
        assert state.users == pytest.approx(3500.0, rel=1e-9)
        assert state.global_revenue == pytest.approx(160_000.0, rel=1e-9)
        assert state.tokens_on_sale == pytest.approx(312_500.0, rel=1e-9)
        assert state.token_price == pytest.approx(16.0, rel=1e-9)
        assert state.market_cap == pytest.approx(1.0e8, rel=1e-9)
        assert state.diluted_market_cap == pytest.approx(1.6e10, rel=1e-9)
        assert state.active_nodes == 50


class TestPolicyBridge:
    def test_scripted_llm_equals_heuristic(self):
        config_h = SimulationConfig(horizon_months=48, seed=21)
        config_l = SimulationConfig(horizon_months=48, seed=21, policy="llm",
                                    llm=LlmSettings(backend="scripted", script={}))
        heuristic = run(config_h)
        bridged = run(config_l, policy=LlmPolicy(ScriptedBackend(heuristic_prompt_reply)))
        assert heuristic.to_csv_string() == bridged.to_csv_string()
        assert sum(e.fallbacks for e in bridged.events) == 0

    def test_unparseable_backend_falls_back_and_counts(self):
        backend = ScriptedBackend({}, default="shrug")
        trajectory = run(
            SimulationConfig(horizon_months=12, policy="llm",
                             llm=LlmSettings(backend="scripted", script={})),
            policy=LlmPolicy(backend),
        )
        fallbacks = sum(e.fallbacks for e in trajectory.events)
        assert fallbacks > 0
        # Fallback means the heuristic stood in, so the states match; only
        # the fallback counter column differs.
        heuristic = run(SimulationConfig(horizon_months=12))
        assert trajectory.states == heuristic.states


class TestStepErrors:
    def test_out_of_order_step_rejected(self, null_dynamics_config):
        sim = Simulation(null_dynamics_config)
        sim.step(1)
        with pytest.raises(SimulationError):
            sim.step(5)

    def test_substep_failures_are_located(self, null_dynamics_config):
        sim = Simulation(null_dynamics_config)

        class Exploding:
            def decide_entry(self, ctx):
                raise RuntimeError("boom")

            def decide_exit(self, ctx):
                raise RuntimeError("boom")

        sim.policy = Exploding()
        with pytest.raises(SimulationError) as err:
            sim.step(1)
        assert err.value.month == 1
        assert err.value.substep == "node-decisions"
        assert sim.states == []  # partial month never committed
