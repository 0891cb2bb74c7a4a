"""The prosocial facilitator and its belief machinery.

For each agent the facilitator keeps a set of particles, each pairing a
hypothesised agent belief state with a probability vector over that
agent's goal set.  Goal vectors are updated by Bayesian inverse planning
against the shared agent policy model; particles that contradict the
agent's actual observations are resampled.  Candidate feedback messages
are scored by the expected reduction in joint completion steps over the
inferred joint-goal distribution, and gated by a divergence measure so
the facilitator stays quiet when agents already behave as suggested.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field, replace
from itertools import product
from typing import Optional

from . import mdkg, overcooked as oc
from .agents import (
    make_policy,
    update_belief_mdkg,
    update_belief_oc,
    merge_feedback_info,
)
from .core import AGENT_NAMES, AgentSpec, Cell, DIRECTIONS, ScenarioConfig
from .feedback import (
    EXECUTING,
    FeedbackMessage,
    PendingFeedback,
    handover_message,
    make_directive,
    pass_message,
    pickup_message,
    shared_counters,
    unlock_message,
    _pretty_item,
)

log = logging.getLogger(__name__)

DEFAULTS = {
    "mdkg": {"n_particles": 1, "phi": 0.0, "eps_div": 0.1},
    "overcooked": {"n_particles": 5, "phi": 2.0, "eps_div": 0.3},
}

PRUNE_FLOOR = 1e-3
HISTORY_WINDOW = 3
PERTURB_PROB = 0.1

MOVABLE_KINDS = tuple(
    [oc.fresh(i) for i in oc.INGREDIENTS]
    + [oc.chopped(i) for i in oc.INGREDIENTS]
    + [oc.plated(i) for i in oc.INGREDIENTS]
    + ["plate"]
)


@dataclass
class Particle:
    belief: object  # hypothesised agent belief state
    goal_probs: dict


def normalised(probs: dict) -> dict:
    z = sum(probs.values())
    if z <= 0.0:
        raise ZeroDivisionError("all-zero goal posterior")
    return {g: p / z for g, p in probs.items()}


def rollout_cost(env_kind: str, state, goals: tuple, policies, t_max: int,
                 directive=None) -> int:
    """Steps until both agents complete `goals` under noise-free policies,
    with the directive's actor executing it first; capped at the remaining
    horizon."""
    env = mdkg if env_kind == "mdkg" else oc
    cap = max(t_max - state.timestep, 0)
    s = replace(state, goals=goals, done=_recompute_done(env_kind, state, goals))
    pending = directive
    mdkg.simulating.on = True
    try:
        for step_i in range(cap):
            if all(s.done):
                return step_i
            actions = []
            for i in range(2):
                a = None
                if pending is not None and pending.message.actor == i:
                    if pending.completed(s) or not pending.feasible(s):
                        pending = None
                    else:
                        a = pending.next_action(s)
                if a is None:
                    a = policies[i].argmax_action(s, i, goals[i])
                actions.append(a)
            s = env.transition(s, actions)
    finally:
        mdkg.simulating.on = False
    return cap


def _recompute_done(env_kind: str, state, goals: tuple) -> tuple:
    if env_kind == "mdkg":
        return tuple(
            (state.item(goals[i]) is not None and state.item(goals[i]).holder == i)
            for i in range(2)
        )
    return tuple(goals[i] in state.delivered_by[i] for i in range(2))


class ProsocialFacilitator:
    """Goal-inferring facilitator with expected-utility feedback selection."""

    kind = "prosocial"

    def __init__(self, env_kind: str, rng: random.Random,
                 n_particles: Optional[int] = None, phi: Optional[float] = None,
                 eps_div: Optional[float] = None, infer_only: bool = False,
                 posterior_override: Optional[list] = None):
        d = DEFAULTS[env_kind]
        self.env_kind = env_kind
        self.env = mdkg if env_kind == "mdkg" else oc
        self.rng = rng
        self.n_particles = d["n_particles"] if n_particles is None else n_particles
        self.phi = d["phi"] if phi is None else phi
        self.eps_div = d["eps_div"] if eps_div is None else eps_div
        self.infer_only = infer_only
        self.posterior_override = posterior_override
        self.decisions: list[dict] = []
        self._msg_counter = 0

    def reset(self, scenario: ScenarioConfig, state0) -> None:
        self.t_max = scenario.t_max
        self.goal_sets = [tuple(a.goal_set) for a in scenario.agents]
        self.policies = [make_policy(self.env_kind, a) for a in scenario.agents]
        self.particles: list[list[Particle]] = []
        self.canonical: list = []  # deterministic persistence belief per agent
        for i in range(2):
            if not self.goal_sets[i]:
                raise ValueError(f"agent {i} has an empty goal set")
            prior = {g: 1.0 / len(self.goal_sets[i]) for g in self.goal_sets[i]}
            self.particles.append(
                [Particle(state0, dict(prior)) for _ in range(self.n_particles)]
            )
            self.canonical.append(state0)
        self.history: list[list] = [[], []]  # (state_before, action) per agent
        self.decisions = []
        self._msg_counter = 0

    # -- belief maintenance --------------------------------------------------

    def aggregated_posterior(self, agent: int) -> dict:
        if self.posterior_override is not None:
            return dict(self.posterior_override[agent])
        n = len(self.particles[agent])
        out = {g: 0.0 for g in self.goal_sets[agent]}
        for p in self.particles[agent]:
            for g, v in p.goal_probs.items():
                out[g] += v / n
        return out

    def _advance(self, belief, agent: int, state, delivered):
        obs = self.env.observe(state, agent)
        if self.env_kind == "mdkg":
            belief = update_belief_mdkg(belief, obs)
        else:
            belief = update_belief_oc(belief, obs)
        if delivered is not None:
            belief = merge_feedback_info(belief, delivered)
        return belief

    def particle_consistent(self, belief, agent: int, state) -> bool:
        """A particle is consistent when its predictions about the agent's
        visible region match the actual observation."""
        if self.env_kind == "mdkg":
            return True  # belief is refreshed to the full state each tick
        obs = self.env.observe(state, agent)
        observed = {it.item_id: (it.cell, it.holder) for it in obs.items}
        for it in belief.items:
            if it.cell is not None and it.cell in obs.cells:
                if it.item_id not in observed or observed[it.item_id][0] != it.cell:
                    return False
        for iid, (cell, holder) in observed.items():
            if cell is None:
                continue
            bit = belief.item(iid)
            if bit is None or bit.cell != cell:
                return False
        return True

    def _perturb(self, belief, agent: int, state):
        """Hypothesise drift of items the agent cannot currently see."""
        if self.env_kind == "mdkg" or self.n_particles <= 1:
            return belief
        obs = self.env.observe(state, agent)
        lay = belief.layout
        hidden_surfaces = [
            c for c in sorted(lay.counters | lay.chop_stations)
            if c not in obs.cells and belief.item_at(c) is None
        ]
        items = list(belief.items)
        for idx, it in enumerate(items):
            if it.cell is None or it.cell in obs.cells or not hidden_surfaces:
                continue
            if self.rng.random() < PERTURB_PROB:
                target = self.rng.choice(hidden_surfaces)
                hidden_surfaces.remove(target)
                hidden_surfaces.append(it.cell)
                hidden_surfaces.sort()
                items[idx] = replace(it, cell=target, holder=None)
        return replace(belief, items=tuple(items))

    def update(self, prev_state, joint: list[str], new_state,
               delivered: Optional[list] = None) -> None:
        """Consume one observed transition: score goal likelihoods against
        the belief each agent held when acting, then advance particles."""
        delivered = delivered or [None, None]
        for i in range(2):
            self.history[i].append((prev_state, joint[i]))
            if len(self.history[i]) > 16:
                self.history[i].pop(0)
            self.canonical[i] = self._advance(self.canonical[i], i, prev_state, delivered[i])
            aggregate = self.aggregated_posterior(i)
            for p in self.particles[i]:
                if not self.particle_consistent(p.belief, i, prev_state):
                    p.belief = self._perturb(self.canonical[i], i, prev_state)
                    p.goal_probs = dict(aggregate)
                p.belief = self._advance(p.belief, i, prev_state, delivered[i])
                lik = {
                    g: p.goal_probs[g] * self.policies[i].likelihood(p.belief, i, g, joint[i])
                    for g in self.goal_sets[i]
                }
                try:
                    p.goal_probs = normalised(lik)
                except ZeroDivisionError:
                    log.warning(
                        "agent %d action %s impossible under every goal; resetting posterior",
                        i, joint[i],
                    )
                    p.goal_probs = {g: 1.0 / len(self.goal_sets[i]) for g in self.goal_sets[i]}
                p.belief = self._perturb(p.belief, i, new_state)

    # -- candidate construction ----------------------------------------------

    def _next_id(self) -> str:
        self._msg_counter += 1
        return f"m{self._msg_counter}"

    def construct_candidates(self, state) -> list[FeedbackMessage]:
        if self.env_kind == "mdkg":
            return self._candidates_mdkg(state)
        return self._candidates_oc(state)

    def _candidates_mdkg(self, state) -> list[FeedbackMessage]:
        out = []
        for actor in range(2):
            beneficiary = 1 - actor
            for d in state.doors:
                if not d.locked:
                    continue
                msg = unlock_message(self._next_id(), actor, d.door_id, beneficiary)
                if make_directive(msg).feasible(state):
                    out.append(msg)
            for it in state.items:
                if it.kind != "key" or it.holder == beneficiary:
                    continue
                msg = handover_message(self._next_id(), actor, it.item_id, beneficiary)
                if make_directive(msg).feasible(state):
                    out.append(msg)
        return out

    def _candidates_oc(self, state) -> list[FeedbackMessage]:
        out = []
        shared = [c for c in shared_counters(state) if state.item_at(c) is None]
        for actor in range(2):
            beneficiary = 1 - actor
            apos = state.agent_pos[actor]
            if shared:
                bpos = state.agent_pos[beneficiary]
                for it in state.items:
                    if it.kind not in MOVABLE_KINDS or it.holder == beneficiary:
                        continue
                    ok, _ = oc.item_access(state, actor, it.item_id)
                    if not ok:
                        continue
                    cell = it.cell if it.cell is not None else apos
                    start = cell if state.layout.walkable(cell) else min(
                        (n for d in DIRECTIONS.values()
                         for n in [(cell[0] + d[0], cell[1] + d[1])]
                         if state.layout.walkable(n)),
                        key=lambda n: oc.move_distance(state.layout, apos, n),
                        default=apos)
                    # drop point balancing the carrier's and the receiver's legs
                    counter = min(shared, key=lambda c: (
                        oc.access_cost(state, start, c) + oc.access_cost(state, bpos, c),
                        c[1], c[0]))
                    out.append(pass_message(self._next_id(), actor, it.item_id,
                                            it.kind, cell, beneficiary, counter))
            # pickup alternatives when both agents converge on the same item
            for kind in MOVABLE_KINDS:
                instances = [it for it in state.items if it.kind == kind and it.cell is not None]
                if len(instances) < 2:
                    continue

                def nearest_for(agent: int):
                    costs = [(oc.access_cost(state, state.agent_pos[agent], it.cell), it.item_id)
                             for it in instances]
                    costs.sort()
                    return costs[0] if costs[0][0] < oc.INF_OC else None

                na, nb = nearest_for(actor), nearest_for(beneficiary)
                if na is None or nb is None or na[1] != nb[1]:
                    continue
                for it in instances:
                    if it.item_id == na[1]:
                        continue
                    ok, _ = oc.item_access(state, actor, it.item_id)
                    if ok:
                        out.append(pickup_message(self._next_id(), actor, it.item_id,
                                                  it.kind, it.cell))
        return out

    # -- utility -------------------------------------------------------------

    def compute_utilities(self, state, candidates: list[FeedbackMessage],
                          posteriors: Optional[list] = None) -> dict[str, float]:
        """Expected step reduction per candidate over the joint-goal
        distribution (product of per-agent posteriors, floor-pruned)."""
        if posteriors is None:
            posteriors = [self.aggregated_posterior(i) for i in range(2)]
        utilities = {m.message_id: 0.0 for m in candidates}
        for g in product(*self.goal_sets):
            w = posteriors[0][g[0]] * posteriors[1][g[1]]
            if w < PRUNE_FLOOR:
                continue
            base = rollout_cost(self.env_kind, state, g, self.policies, self.t_max)
            for m in candidates:
                c = rollout_cost(self.env_kind, state, g, self.policies, self.t_max,
                                 directive=make_directive(m))
                utilities[m.message_id] += (base - c) * w
        return utilities

    # -- divergence ----------------------------------------------------------

    def divergence(self, state, message: FeedbackMessage,
                   posteriors: Optional[list] = None) -> float:
        if self.env_kind == "mdkg":
            return self._divergence_mdkg(state, message)
        return self._divergence_oc(state, message, posteriors)

    def _divergence_mdkg(self, state, message: FeedbackMessage) -> float:
        """One minus the fraction of the actor's recent moves that already
        made progress on the suggested prosocial act."""
        actor = message.actor
        directive = make_directive(message)
        hist = self.history[actor][-HISTORY_WINDOW:]
        if not hist:
            return 1.0
        if message.kind == "unlock":
            goal = ("unlock", message.args["door"])
        else:
            goal = ("handover", message.args["item"], state.agent_pos[message.beneficiary])
        consistent = 0
        for s_before, action in hist:
            c0 = mdkg.plan_distance(s_before, actor, goal)
            s_after = mdkg.transition(s_before, [action if i == actor else "stay" for i in range(2)])
            c1 = mdkg.plan_distance(s_after, actor, goal)
            if c1 < c0:
                consistent += 1
        return 1.0 - consistent / len(hist)

    def _divergence_oc(self, state, message: FeedbackMessage,
                       posteriors: Optional[list] = None) -> float:
        """Expected Jensen-Shannon divergence (base 2) between the actor's
        noise-free action choice with and without the directive, over the
        actor's particles and goal hypotheses."""
        actor = message.actor
        directive = make_directive(message)
        total = 0.0
        if self.posterior_override is not None:
            pool = [(self.canonical[actor], {g: p for g, p in self.aggregated_posterior(actor).items()})]
        else:
            pool = [(p.belief, p.goal_probs) for p in self.particles[actor]]
        n = len(pool)
        for belief, goal_probs in pool:
            fa = directive.next_action(belief)
            for g, w in goal_probs.items():
                ga = self.policies[actor].greedy_action(belief, actor, g) \
                    if self.env_kind == "overcooked" else None
                jsd = 0.0 if fa is not None and fa == ga else 1.0
                total += (w / n) * jsd
        return total

    # -- selection & explanation ----------------------------------------------

    def select(self, candidates: list[FeedbackMessage], utilities: dict,
               divergences: dict) -> Optional[FeedbackMessage]:
        if not candidates:
            return None
        best = max(utilities[m.message_id] for m in candidates)
        eligible = [
            m for m in candidates
            if utilities[m.message_id] == best and best > self.phi
            and divergences[m.message_id] > self.eps_div
        ]
        if not eligible:
            return None
        if len(eligible) == 1:
            return eligible[0]
        return self.rng.choice(eligible)

    def explain(self, state, message: FeedbackMessage) -> str:
        j = message.beneficiary if message.beneficiary is not None else 1 - message.actor
        posterior = self.aggregated_posterior(j)
        goal = max(sorted(posterior), key=lambda g: posterior[g])
        name = AGENT_NAMES[j]
        if self.env_kind == "mdkg":
            dist = mdkg.plan_distance(state, j, ("pickup", goal))
            prefix = f"I believe {name} is trying to get the {_pretty_item(goal)}, and"
            if dist >= mdkg.INF:
                return f"{prefix} without your help, {name} wouldn't be able to reach it."
            return f"{prefix} {name} would need much more time to reach it without your help."
        prefix = f"I believe {name} is trying to prepare {goal}, and"
        item_kind = message.args.get("item_kind", "item")
        if message.kind == "pickup":
            return f"{prefix} the other {_pretty_item(item_kind)} is easier to get for them."
        ok, _ = oc.item_access(state, j, message.args["item"])
        if not ok:
            return f"{prefix} without your help, {name} wouldn't be able to get the {_pretty_item(item_kind)}."
        return f"{prefix} {name} would need much more time to get the {_pretty_item(item_kind)} without your help."

    # -- per-tick decision ----------------------------------------------------

    def decide(self, state, pending_any: bool) -> Optional[FeedbackMessage]:
        record = {
            "t": state.timestep,
            "posteriors": [
                {g: round(p, 12) for g, p in sorted(self.aggregated_posterior(i).items())}
                for i in range(2)
            ],
            "candidates": [],
            "utilities": {},
            "divergences": {},
            "selected": None,
        }
        if pending_any or self.infer_only:
            self.decisions.append(record)
            return None
        candidates = self.construct_candidates(state)
        record["candidates"] = [m.to_json() for m in candidates]
        if not candidates:
            self.decisions.append(record)
            return None
        utilities = self.compute_utilities(state, candidates)
        divergences = {m.message_id: self.divergence(state, m) for m in candidates}
        record["utilities"] = {k: round(v, 9) for k, v in sorted(utilities.items())}
        record["divergences"] = {k: round(v, 9) for k, v in sorted(divergences.items())}
        chosen = self.select(candidates, utilities, divergences)
        if chosen is not None:
            chosen = replace(chosen, explanation=self.explain(state, chosen))
            record["selected"] = chosen.message_id
        self.decisions.append(record)
        return chosen
