#!/usr/bin/env python3
"""Patience sweep: how slower exits shape participation.

Patience is the number of consecutive exit signals a node must see before
it actually leaves.  The sweep runs in a stressed regime (no user-side
revenue, expensive nodes, sparse growth capital) so nodes actually face
exit signals; in the default regime revenue never drops low enough.

Price in this model forms from growth-capital flows alone, so patience
moves participation (exits, node-months, inclusion) rather than the price
path itself.  The LLM cells run behind a scripted backend that answers
prompts with the heuristic rules; swap in an HTTP backend to test a live
model.
"""

import numpy as np

from depinsim import LlmPolicy, ScriptedBackend, SimulationConfig, heuristic_prompt_reply, run

SEEDS = range(5)
PATIENCE_LEVELS = (1, 3, 5)


def stressed_config(seed, patience):
    return SimulationConfig(
        seed=seed,
        patience=patience,
        user_revenue_factor=0.0,  # token-side revenue only
        node_cost=5000.0,
        gc_arrival_rate=0.5,
    )


def cell(policy_name, patience):
    exits, node_months, inclusions = [], [], []
    for seed in SEEDS:
        config = stressed_config(seed, patience)
        if policy_name == "llm":
            trajectory = run(config, policy=LlmPolicy(ScriptedBackend(heuristic_prompt_reply)))
        else:
            trajectory = run(config)
        exits.append(sum(e.exits for e in trajectory.events))
        node_months.append(sum(s.active_nodes for s in trajectory.states))
        inclusions.append(trajectory.metrics.inclusion)
    return exits, node_months, inclusions


print(f"{'cell':<12} {'exits':>14} {'node-months':>18} {'inclusion':>18}")
rows = [("heuristic", 1)] + [("llm", p) for p in PATIENCE_LEVELS]
for policy_name, patience in rows:
    label = policy_name if policy_name == "heuristic" else f"llm p={patience}"
    exits, node_months, inclusions = cell(policy_name, patience)
    print(
        f"{label:<12} {np.mean(exits):>8.0f} ±{np.std(exits, ddof=1):>4.0f}"
        f" {np.mean(node_months):>12,.0f} ±{np.std(node_months, ddof=1):>5,.0f}"
        f" {np.mean(inclusions):>12.4f} ±{np.std(inclusions, ddof=1):.4f}"
    )

print(
    "\nHigher patience means fewer exits and more cumulative node-months: nodes"
    "\nride out bad months instead of leaving at the first signal.  The llm p=1"
    "\ncell reproduces the heuristic benchmark exactly (same rules, prompted)."
    "\nCLI equivalent: depin-sim compare --config cfg.json --patience 1,3,5"
)
