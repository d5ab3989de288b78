"""Deterministic episode environment over a site graph.

An episode starts at the scenario's start page and ends when the agent reaches
a page satisfying an endpoint predicate, arrives somewhere with no way out
short of the goal, or runs out of steps. Rewards decompose exactly into a
per-step penalty, first-visit cue bonuses for tags the scenario prices, a
terminal bonus on endpoint arrival, and a failure penalty on dead ends.

Cues on the start page are marked seen at reset and never pay out; arriving
back at any already-seen cue pays nothing, so cue bonuses cannot be farmed.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum

from .scenario import ScenarioSpec, endpoint_satisfied
from .site_model import SiteGraph, describe_edge
from .trajectory import Trajectory


class StartPageUnknown(Exception):
    """The scenario's start page does not exist in the graph."""


class ActionOutOfRange(IndexError):
    pass


class SessionFinished(Exception):
    """step() was called after the episode already terminated."""


class Termination(Enum):
    NONE = "none"
    ENDPOINT = "endpoint"
    DEAD_END = "dead_end"
    TIMEOUT = "timeout"


@dataclass(frozen=True)
class Observation:
    page_id: str
    action_count: int
    new_cues: frozenset[str]


@dataclass(frozen=True)
class StepOutcome:
    observation: Observation
    reward: float
    done: bool
    termination: Termination


@dataclass
class EnvSession:
    """Mutable state of one episode."""

    graph: SiteGraph
    spec: ScenarioSpec
    current: str
    steps_taken: int = 0
    seen_cues: set[str] = field(default_factory=set)
    visit_counts: dict[str, int] = field(default_factory=dict)
    termination: Termination = Termination.NONE

    @property
    def finished(self) -> bool:
        return self.termination is not Termination.NONE


def reset(graph: SiteGraph, spec: ScenarioSpec) -> tuple[EnvSession, Observation]:
    """Start a fresh episode on the scenario's start page."""
    if spec.start_page not in graph.pages:
        raise StartPageUnknown(spec.start_page)
    start = graph.pages[spec.start_page]
    session = EnvSession(
        graph=graph,
        spec=spec,
        current=start.id,
        seen_cues=set(start.cues),
        visit_counts={start.id: 1},
    )
    observation = Observation(start.id, len(start.actions), frozenset(start.cues))
    return session, observation


def step(session: EnvSession, action_index: int) -> StepOutcome:
    """Take the action at ``action_index`` on the current page."""
    if session.finished:
        raise SessionFinished(f"episode already ended with {session.termination.value}")
    actions = session.graph.pages[session.current].actions
    if not 0 <= action_index < len(actions):
        raise ActionOutOfRange(
            f"action {action_index} out of range for {session.current!r} "
            f"({len(actions)} actions)"
        )
    spec = session.spec
    target = session.graph.pages[actions[action_index].target]

    fresh = target.cues - session.seen_cues
    reward = -spec.step_penalty
    # Sorted iteration keeps float summation order independent of hash seeds.
    for tag in sorted(fresh):
        if tag in spec.cue_rewards:
            reward += spec.cue_rewards[tag]

    reached_endpoint = endpoint_satisfied(spec, target)
    if reached_endpoint:
        reward += spec.terminal_reward
    elif not target.actions:
        # Goal unmet and nothing further possible, whatever the page's flags say.
        reward -= spec.failure_penalty

    session.steps_taken += 1
    session.seen_cues |= target.cues
    session.current = target.id
    session.visit_counts[target.id] = session.visit_counts.get(target.id, 0) + 1

    if reached_endpoint:
        session.termination = Termination.ENDPOINT
    elif not target.actions:
        session.termination = Termination.DEAD_END
    elif session.steps_taken >= spec.max_steps:
        session.termination = Termination.TIMEOUT

    observation = Observation(target.id, len(target.actions), frozenset(fresh))
    return StepOutcome(observation, reward, session.finished, session.termination)


def replay_total_reward(graph: SiteGraph, spec: ScenarioSpec, trajectory: Trajectory) -> float:
    """Recompute a logged trajectory's total reward from first principles.

    Walks the recorded edges with a fresh seen-cue set and applies the reward
    decomposition directly, without reusing the stepping code above. Used to
    audit that recorded totals match the decomposition exactly.
    """
    seen = set(graph.pages[trajectory.steps[0][0] if trajectory.steps else trajectory.final_page].cues)
    total = 0.0
    for _, edge in trajectory.steps:
        target = graph.pages[edge.target]
        total -= spec.step_penalty
        for tag in sorted(target.cues - seen):
            if tag in spec.cue_rewards:
                total += spec.cue_rewards[tag]
        if endpoint_satisfied(spec, target):
            total += spec.terminal_reward
        elif not target.actions:
            total -= spec.failure_penalty
        seen |= target.cues
    return total


class Environment(ABC):
    """Minimal contract a navigation environment must satisfy."""

    @abstractmethod
    def reset(self) -> Observation: ...

    @abstractmethod
    def step(self, action_index: int) -> StepOutcome: ...

    @abstractmethod
    def actions(self, page_id: str) -> list[str]:
        """Descriptive labels for the page's actions, in index order."""


class SimulatedEnvironment(Environment):
    """The graph-backed environment; the only implementation shipped here."""

    def __init__(self, graph: SiteGraph, spec: ScenarioSpec):
        if spec.start_page not in graph.pages:
            raise StartPageUnknown(spec.start_page)
        self.graph = graph
        self.spec = spec
        self.session: EnvSession | None = None

    def reset(self) -> Observation:
        self.session, observation = reset(self.graph, self.spec)
        return observation

    def step(self, action_index: int) -> StepOutcome:
        if self.session is None:
            raise SessionFinished("reset() must be called before step()")
        return step(self.session, action_index)

    def actions(self, page_id: str) -> list[str]:
        return [describe_edge(e) for e in self.graph.pages[page_id].actions]
