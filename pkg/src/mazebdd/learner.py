"""Tabular learners and exploration helpers.

Two families share one action-selection front end:

* Q-learning over a (page, action) value table, updated online.
* Softmax policy gradient over per-(page, action) preferences, with an
  optional learned per-page baseline (the actor-critic variant).

Both pick actions epsilon-greedily; the greedy branch is the value argmax for
the table and a softmax draw for the policy. Backtracking turns a failed
episode into a deterministic recovery plan: replay the recorded prefix of the
failed run, then force the shallowest untried branch at the deepest page that
still has one.
"""

import math
import random
from collections import deque
from dataclasses import dataclass, field
from enum import Enum

from .site_model import SiteGraph
from .trajectory import Trajectory


class NoActionsAvailable(Exception):
    """select_action was called for a page with no outgoing actions."""


class EmptyTrajectory(ValueError):
    pass


class Algo(str, Enum):
    Q_LEARNING = "q_learning"
    REINFORCE = "reinforce"
    ACTOR_CRITIC = "actor_critic"


@dataclass(frozen=True)
class Transition:
    state: str
    action: int
    reward: float
    next_state: str
    done: bool


@dataclass(frozen=True)
class EpsilonSchedule:
    """Exponentially decaying exploration rate with a floor."""

    eps0: float = 1.0
    decay: float = 0.995
    eps_min: float = 0.01

    def __post_init__(self):
        if not 0.0 <= self.eps0 <= 1.0:
            raise ValueError(f"eps0 must be in [0, 1], got {self.eps0}")
        if not 0.0 < self.decay <= 1.0:
            raise ValueError(f"decay must be in (0, 1], got {self.decay}")
        if not 0.0 <= self.eps_min <= self.eps0:
            raise ValueError(f"eps_min must be in [0, eps0], got {self.eps_min}")

    def at(self, episode: int) -> float:
        return max(self.eps_min, self.eps0 * self.decay**episode)


@dataclass(frozen=True)
class LearnerConfig:
    alpha: float = 0.1
    gamma: float = 0.95
    policy_lr: float = 0.01
    algo: Algo = Algo.Q_LEARNING
    replay_capacity: int = 10_000
    replay_batch: int = 0  # 0 keeps updates purely online

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must be in [0, 1], got {self.gamma}")
        if self.policy_lr <= 0.0:
            raise ValueError(f"policy_lr must be positive, got {self.policy_lr}")
        if self.replay_capacity < 1:
            raise ValueError(f"replay_capacity must be at least 1, got {self.replay_capacity}")
        if self.replay_batch < 0:
            raise ValueError(f"replay_batch must be non-negative, got {self.replay_batch}")


class ReplayMemory:
    """FIFO transition store with an episode marker for slicing."""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError(f"capacity must be at least 1, got {capacity}")
        self.capacity = capacity
        self._buffer: deque[tuple[int, Transition]] = deque()
        self._next_seq = 0
        self._episode_seq = 0

    def __len__(self) -> int:
        return len(self._buffer)

    def push(self, transition: Transition) -> None:
        if len(self._buffer) == self.capacity:
            self._buffer.popleft()
        self._buffer.append((self._next_seq, transition))
        self._next_seq += 1

    def start_episode(self) -> None:
        self._episode_seq = self._next_seq

    def episode_slice(self) -> list[Transition]:
        """Transitions pushed since the last episode marker, oldest first."""
        return [t for seq, t in self._buffer if seq >= self._episode_seq]

    def transitions(self) -> list[Transition]:
        return [t for _, t in self._buffer]

    def sample(self, k: int, rng: random.Random) -> list[Transition]:
        pool = self.transitions()
        return rng.sample(pool, min(k, len(pool)))


class QTable:
    """(page, action) -> value; absent entries read as exactly 0.0."""

    def __init__(self):
        self.values: dict[tuple[str, int], float] = {}

    def get(self, state: str, action: int) -> float:
        return self.values.get((state, action), 0.0)

    def set(self, state: str, action: int, value: float) -> None:
        self.values[(state, action)] = value

    def best_action(self, state: str, n_actions: int) -> int:
        """Argmax over the first ``n_actions`` indices; ties go to the lowest."""
        best, best_value = 0, self.get(state, 0)
        for action in range(1, n_actions):
            value = self.get(state, action)
            if value > best_value:
                best, best_value = action, value
        return best

    def best_value(self, state: str, n_actions: int) -> float:
        return self.get(state, self.best_action(state, n_actions))


@dataclass
class PolicyParams:
    """Softmax preferences per (page, action) plus a per-page return baseline."""

    preferences: dict[tuple[str, int], float] = field(default_factory=dict)
    baseline: dict[str, float] = field(default_factory=dict)

    def action_probabilities(self, state: str, n_actions: int) -> list[float]:
        prefs = [self.preferences.get((state, a), 0.0) for a in range(n_actions)]
        peak = max(prefs)
        exps = [math.exp(p - peak) for p in prefs]
        total = sum(exps)
        return [e / total for e in exps]


def select_action(
    policy: QTable | PolicyParams,
    page_id: str,
    n_actions: int,
    eps: float,
    rng: random.Random,
) -> int:
    """Epsilon-greedy action choice over ``range(n_actions)``."""
    if n_actions < 1:
        raise NoActionsAvailable(page_id)
    if rng.random() < eps:
        return rng.randrange(n_actions)
    if isinstance(policy, QTable):
        return policy.best_action(page_id, n_actions)
    roll = rng.random()
    acc = 0.0
    probabilities = policy.action_probabilities(page_id, n_actions)
    for action, p in enumerate(probabilities):
        acc += p
        if roll < acc:
            return action
    return n_actions - 1


def q_update(
    q: QTable,
    transition: Transition,
    next_action_count: int,
    alpha: float,
    gamma: float,
) -> float:
    """One temporal-difference backup; mutates the table, returns the new value."""
    if transition.done or next_action_count == 0:
        target = transition.reward
    else:
        target = transition.reward + gamma * q.best_value(transition.next_state, next_action_count)
    old = q.get(transition.state, transition.action)
    new = old + alpha * (target - old)
    q.set(transition.state, transition.action, new)
    return new


def reinforce_update(
    params: PolicyParams,
    trajectory: list[Transition],
    gamma: float,
    lr: float,
    use_baseline: bool,
    action_counts: dict[str, int],
) -> PolicyParams:
    """Monte-Carlo policy-gradient pass over one episode's transitions.

    ``action_counts`` maps each page to its action count; the softmax support
    is not recoverable from the transitions alone. Updates run in step order,
    each against the parameters as updated so far.
    """
    if not trajectory:
        raise EmptyTrajectory("cannot update the policy from an empty trajectory")
    returns: list[float] = [0.0] * len(trajectory)
    g = 0.0
    for i in range(len(trajectory) - 1, -1, -1):
        g = trajectory[i].reward + gamma * g
        returns[i] = g
    for transition, g in zip(trajectory, returns):
        state = transition.state
        n = action_counts[state]
        advantage = g - params.baseline.get(state, 0.0) if use_baseline else g
        probabilities = params.action_probabilities(state, n)
        for action, p in enumerate(probabilities):
            key = (state, action)
            grad = (1.0 - p) if action == transition.action else -p
            params.preferences[key] = params.preferences.get(key, 0.0) + lr * advantage * grad
        if use_baseline:
            old = params.baseline.get(state, 0.0)
            params.baseline[state] = old + lr * (g - old)
    return params


@dataclass(frozen=True)
class BacktrackPlan:
    """Deterministic recovery from a failed episode."""

    replay_prefix: tuple[int, ...]
    branch_page: str
    forced_action: int


def plan_backtrack(
    failed: Trajectory,
    graph: SiteGraph,
    tried: dict[str, set[int]],
) -> BacktrackPlan | None:
    """Find the deepest page on a failed path that still has an untried action.

    Scans the trajectory from its last state backward. Returns None once every
    page along the path has had all of its actions tried, which bounds the
    number of plans a run can ever produce by the graph's total action count.
    """
    pages = failed.pages()
    indices = failed.action_indices(graph)
    for position in range(len(pages) - 1, -1, -1):
        page_id = pages[position]
        tried_here = tried.get(page_id, set())
        for action in range(len(graph.pages[page_id].actions)):
            if action not in tried_here:
                return BacktrackPlan(
                    replay_prefix=tuple(indices[:position]),
                    branch_page=page_id,
                    forced_action=action,
                )
    return None
