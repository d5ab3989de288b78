"""Training orchestration: episodes, backtracking, ranking, and export.

A run is fully deterministic under its seed. One root generator is split, in
fixed order, into an action-sampling stream and a replay-sampling stream; no
other randomness exists in the engine.
"""

import json
import random
import re
from dataclasses import asdict, dataclass
from pathlib import Path

from .env import StartPageUnknown, Termination, reset, step
from .errors import ConfigInvalid
from .gherkin import GherkinScenario, assign_variant_names, dedup, emit_feature, trajectory_to_scenario
from .learner import (
    Algo,
    BacktrackPlan,
    EpsilonSchedule,
    LearnerConfig,
    PolicyParams,
    QTable,
    ReplayMemory,
    Transition,
    plan_backtrack,
    q_update,
    reinforce_update,
    select_action,
)
from .metrics import CoverageMap, EpisodeRecord, write_coverage_csv, write_metrics_csv
from .scenario import (
    EndpointPredicate,
    PredicateKind,
    ScenarioSpec,
    endpoint_satisfied,
    parse_scenario,
)
from .site_model import SiteGraph, load_site_model, reachable_set
from .trajectory import Trajectory


@dataclass(frozen=True)
class RunConfig:
    site_path: str
    scenario_path: str
    episodes: int
    seed: int = 0
    algo: Algo = Algo.Q_LEARNING
    alpha: float = 0.1
    gamma: float = 0.95
    policy_lr: float = 0.01
    replay_capacity: int = 10_000
    replay_batch: int = 0
    eps0: float = 1.0
    eps_decay: float = 0.995
    eps_min: float = 0.01
    emit_top_k: int = 5
    update_on_failure: bool | None = None
    out_dir: str = "out"

    def __post_init__(self):
        # Accept the string form so a config file or kwarg can say "reinforce";
        # dispatch later relies on enum identity, so coerce here or never.
        if not isinstance(self.algo, Algo):
            try:
                object.__setattr__(self, "algo", Algo(self.algo))
            except ValueError:
                raise ConfigInvalid(f"unknown algo {self.algo!r}") from None

    def resolved_update_on_failure(self) -> bool:
        # Online value updates are standard for Q-learning; the policy-gradient
        # modes follow the success-only reading by default.
        if self.update_on_failure is None:
            return self.algo is Algo.Q_LEARNING
        return self.update_on_failure

    def validate(self) -> None:
        if self.episodes < 1:
            raise ConfigInvalid(f"episodes must be at least 1, got {self.episodes}")
        if not 0 <= self.seed < 2**64:
            raise ConfigInvalid(f"seed must fit in 64 unsigned bits, got {self.seed}")
        if self.emit_top_k < 1:
            raise ConfigInvalid(f"emit_top_k must be at least 1, got {self.emit_top_k}")
        try:
            self.learner_config()
            self.epsilon_schedule()
        except ValueError as exc:
            raise ConfigInvalid(str(exc)) from None

    def learner_config(self) -> LearnerConfig:
        return LearnerConfig(
            alpha=self.alpha,
            gamma=self.gamma,
            policy_lr=self.policy_lr,
            algo=self.algo,
            replay_capacity=self.replay_capacity,
            replay_batch=self.replay_batch,
        )

    def epsilon_schedule(self) -> EpsilonSchedule:
        return EpsilonSchedule(self.eps0, self.eps_decay, self.eps_min)

    def to_dict(self) -> dict:
        data = asdict(self)
        data["algo"] = self.algo.value
        data["update_on_failure"] = self.resolved_update_on_failure()
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        fields = dict(data)
        fields["algo"] = Algo(fields["algo"])
        return cls(**fields)


@dataclass
class RunArtifacts:
    records: list[EpisodeRecord]
    coverage: CoverageMap
    scenarios: list[GherkinScenario]
    summary: dict
    config: RunConfig
    qtable: QTable
    policy: PolicyParams
    trajectories: list[Trajectory]
    page_ids: tuple[str, ...]


def _slug(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9]+", "_", name).strip("_") or "feature"


def run_training(config: RunConfig) -> RunArtifacts:
    """Run exactly ``config.episodes`` episodes and collect every artifact."""
    config.validate()
    graph = load_site_model(Path(config.site_path).read_text(encoding="utf-8"))
    spec = parse_scenario(Path(config.scenario_path).read_text(encoding="utf-8"))
    return train(graph, spec, config)


def train(graph: SiteGraph, spec: ScenarioSpec, config: RunConfig) -> RunArtifacts:
    config.validate()
    root = random.Random(config.seed)
    action_rng = random.Random(root.getrandbits(64))
    replay_rng = random.Random(root.getrandbits(64))

    learner = config.learner_config()
    schedule = config.epsilon_schedule()
    q = QTable()
    policy = PolicyParams()
    table = q if config.algo is Algo.Q_LEARNING else policy
    online_q = config.algo is Algo.Q_LEARNING and config.resolved_update_on_failure()
    action_counts = {pid: len(page.actions) for pid, page in graph.pages.items()}
    memory = ReplayMemory(config.replay_capacity)

    tried: dict[str, set[int]] = {}
    plan: BacktrackPlan | None = None
    records: list[EpisodeRecord] = []
    coverage = CoverageMap()
    trajectories: list[Trajectory] = []
    successes: list[tuple[Trajectory, int]] = []
    unique_pages: set[str] = set()
    total_backtracks = 0
    first_success: int | None = None

    if spec.start_page not in graph.pages:
        raise StartPageUnknown(spec.start_page)
    start_is_endpoint = endpoint_satisfied(spec, graph.pages[spec.start_page])

    for episode in range(config.episodes):
        eps = schedule.at(episode)
        memory.start_episode()
        session, _ = reset(graph, spec)
        start_page = graph.pages[spec.start_page]

        steps: list[tuple[str, object]] = []
        transitions: list[Transition] = []
        defects_this_episode: set[str] = set()
        if start_page.is_defect:
            defects_this_episode.add(start_page.id)
        used_backtrack = 0

        if start_is_endpoint:
            # Checked before the first step: the goal already holds at reset.
            trajectory = Trajectory((), spec.start_page, 0.0, True)
        else:
            def take(action: int) -> None:
                before = session.current
                outcome = step(session, action)
                edge = graph.pages[before].actions[action]
                transition = Transition(
                    before, action, outcome.reward, outcome.observation.page_id, outcome.done
                )
                memory.push(transition)
                transitions.append(transition)
                steps.append((before, edge))
                tried.setdefault(before, set()).add(action)
                landed = graph.pages[outcome.observation.page_id]
                if landed.is_defect:
                    defects_this_episode.add(landed.id)
                if online_q:
                    q_update(q, transition, action_counts[transition.next_state], learner.alpha, learner.gamma)
                    if learner.replay_batch:
                        for extra in memory.sample(learner.replay_batch, replay_rng):
                            q_update(q, extra, action_counts[extra.next_state], learner.alpha, learner.gamma)

            if plan is not None:
                used_backtrack = 1
                # Marked tried at adoption so an unreachable branch cannot recur.
                tried.setdefault(plan.branch_page, set()).add(plan.forced_action)
                for action in (*plan.replay_prefix, plan.forced_action):
                    if session.finished:
                        break
                    take(action)
                plan = None

            while not session.finished:
                n = action_counts[session.current]
                if n == 0:
                    break  # a start page with no way out; the episode just fails
                take(select_action(table, session.current, n, eps, action_rng))

            total_reward = 0.0
            for transition in transitions:
                total_reward += transition.reward
            trajectory = Trajectory(
                tuple(steps),
                session.current,
                total_reward,
                session.termination is Termination.ENDPOINT,
            )

        trajectories.append(trajectory)
        if trajectory.success:
            if first_success is None:
                first_success = episode + 1
            successes.append((trajectory, episode))
            if transitions:
                if config.algo is Algo.Q_LEARNING and not online_q:
                    for transition in transitions:
                        q_update(q, transition, action_counts[transition.next_state], learner.alpha, learner.gamma)
                elif config.algo is not Algo.Q_LEARNING:
                    reinforce_update(
                        policy, transitions, learner.gamma, learner.policy_lr,
                        config.algo is Algo.ACTOR_CRITIC, action_counts,
                    )
            plan = None
        else:
            if (
                config.algo is not Algo.Q_LEARNING
                and config.resolved_update_on_failure()
                and transitions
            ):
                reinforce_update(
                    policy, transitions, learner.gamma, learner.policy_lr,
                    config.algo is Algo.ACTOR_CRITIC, action_counts,
                )
            plan = plan_backtrack(trajectory, graph, tried)

        for page_id, count in session.visit_counts.items():
            coverage.record(page_id, count)
        unique_pages.update(session.visit_counts)
        total_backtracks += used_backtrack
        records.append(
            EpisodeRecord(
                episode=episode,
                total_reward=trajectory.total_reward,
                steps=session.steps_taken,
                success=trajectory.success,
                backtracks_used=used_backtrack,
                defects_hit=len(defects_this_episode),
                cumulative_unique_pages=len(unique_pages),
                epsilon=eps,
            )
        )

    ordered = sorted(successes, key=lambda pair: (-pair[0].total_reward, len(pair[0].steps), pair[1]))
    scenarios = dedup([trajectory_to_scenario(t, graph, spec) for t, _ in ordered])
    scenarios = assign_variant_names(scenarios[: config.emit_top_k])

    summary = {
        "success_rate": len(successes) / config.episodes,
        "best_reward": max(r.total_reward for r in records),
        "episodes_to_first_success": first_success,
        "total_backtracks": total_backtracks,
    }
    return RunArtifacts(
        records=records,
        coverage=coverage,
        scenarios=scenarios,
        summary=summary,
        config=config,
        qtable=q,
        policy=policy,
        trajectories=trajectories,
        page_ids=tuple(graph.pages),
    )


def export(artifacts: RunArtifacts, out_dir: str | Path) -> list[Path]:
    """Write metrics.csv, coverage.csv, run.json, and the feature file if any."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    metrics_path = out / "metrics.csv"
    write_metrics_csv(artifacts.records, metrics_path)
    written.append(metrics_path)

    coverage_path = out / "coverage.csv"
    write_coverage_csv(artifacts.coverage, coverage_path, artifacts.page_ids)
    written.append(coverage_path)

    if artifacts.scenarios:
        features_dir = out / "features"
        features_dir.mkdir(exist_ok=True)
        feature_name = artifacts.scenarios[0].feature_name
        feature_path = features_dir / f"{_slug(feature_name)}.feature"
        feature_path.write_bytes(emit_feature(feature_name, artifacts.scenarios).encode("utf-8"))
        written.append(feature_path)

    run_path = out / "run.json"
    payload = {
        "config": artifacts.config.to_dict(),
        "seed": artifacts.config.seed,
        "summary": artifacts.summary,
    }
    run_path.write_bytes((json.dumps(payload, indent=2, sort_keys=True) + "\n").encode("utf-8"))
    written.append(run_path)
    return written


def read_run_config(run_json_path: str | Path) -> RunConfig:
    """Rebuild the RunConfig embedded in an exported run.json."""
    payload = json.loads(Path(run_json_path).read_text(encoding="utf-8"))
    return RunConfig.from_dict(payload["config"])


def greedy_rollout(q: QTable, graph: SiteGraph, spec: ScenarioSpec) -> Trajectory:
    """Follow the value argmax from the start page with no exploration."""
    session, _ = reset(graph, spec)
    if endpoint_satisfied(spec, graph.pages[spec.start_page]):
        return Trajectory((), spec.start_page, 0.0, True)
    steps = []
    total = 0.0
    while not session.finished:
        page = graph.pages[session.current]
        if not page.actions:
            break
        action = q.best_action(session.current, len(page.actions))
        before = session.current
        outcome = step(session, action)
        steps.append((before, page.actions[action]))
        total += outcome.reward
    return Trajectory(tuple(steps), session.current, total, session.termination is Termination.ENDPOINT)


@dataclass
class SweepResult:
    visited: set[str]
    paths: list[list[str]]
    trajectories: list[Trajectory]


def exploration_sweep(
    graph: SiteGraph,
    *,
    max_steps: int = 500,
    chooser: str = "systematic",
    seed: int = 0,
) -> SweepResult:
    """Explore until every action of every page reached has been tried.

    Runs episodes under a throwaway goal (any terminal page ends an episode)
    and applies the backtracking planner to each finished episode, success or
    not, so every branch left untried gets forced eventually. The
    ``systematic`` chooser extends with the lowest untried action (falling
    back to action 0), which on tree-shaped graphs reproduces a depth-first
    path enumeration exactly; ``uniform`` explores at full epsilon instead.
    """
    if chooser not in ("systematic", "uniform"):
        raise ValueError(f"chooser must be 'systematic' or 'uniform', got {chooser!r}")
    spec = ScenarioSpec(
        name="sweep",
        start_page=graph.start_id,
        endpoints=(EndpointPredicate(PredicateKind.TERMINAL_STATE),),
        max_steps=max_steps,
    )
    rng = random.Random(seed)
    start = graph.pages[graph.start_id]
    if endpoint_satisfied(spec, start):
        return SweepResult({start.id}, [[start.id]], [Trajectory((), start.id, 0.0, True)])

    tried: dict[str, set[int]] = {}
    plan: BacktrackPlan | None = None
    visited = {start.id}
    paths: list[list[str]] = []
    trajectories: list[Trajectory] = []

    while True:
        session, _ = reset(graph, spec)
        steps = []
        total = 0.0
        pending: list[int] = []
        if plan is not None:
            tried.setdefault(plan.branch_page, set()).add(plan.forced_action)
            pending = [*plan.replay_prefix, plan.forced_action]
            plan = None
        while not session.finished:
            current = session.current
            n = len(graph.pages[current].actions)
            if pending:
                action = pending.pop(0)
            elif n == 0:
                break
            else:
                untried = [a for a in range(n) if a not in tried.get(current, ())]
                if chooser == "systematic":
                    action = untried[0] if untried else 0
                else:
                    action = rng.randrange(n)
            outcome = step(session, action)
            tried.setdefault(current, set()).add(action)
            steps.append((current, graph.pages[current].actions[action]))
            total += outcome.reward
            visited.add(outcome.observation.page_id)
        trajectory = Trajectory(
            tuple(steps), session.current, total, session.termination is Termination.ENDPOINT
        )
        trajectories.append(trajectory)
        paths.append(trajectory.pages())
        plan = plan_backtrack(trajectory, graph, tried)
        if plan is None:
            return SweepResult(visited, paths, trajectories)


def validation_report(graph: SiteGraph, spec: ScenarioSpec | None = None) -> str:
    """Human-readable summary used by the CLI's validate command."""
    pages = graph.pages.values()
    dead_ends = [p.id for p in pages if not p.is_terminal and not p.actions]
    terminals = [p.id for p in pages if p.is_terminal]
    defects = [p.id for p in pages if p.is_defect]
    reachable = reachable_set(graph, graph.start_id)
    unreachable = [pid for pid in graph.pages if pid not in reachable]
    edge_count = sum(len(p.actions) for p in pages)

    lines = [
        f"site: {graph.name or '(unnamed)'}",
        f"start: {graph.start_id}",
        f"pages: {len(graph.pages)} (terminal: {len(terminals)}, defect: {len(defects)}, dead-end: {len(dead_ends)})",
        f"edges: {edge_count}",
        f"reachable from start: {len(reachable)} of {len(graph.pages)}",
    ]
    if unreachable:
        lines.append("unreachable: " + ", ".join(unreachable))
    if spec is not None:
        lines.append(f"scenario: {spec.name}")
        if spec.start_page in graph.pages:
            lines.append(f"  start page {spec.start_page}: ok")
        else:
            lines.append(f"  start page {spec.start_page}: NOT IN MODEL")
        all_cues = set()
        for page in pages:
            all_cues |= page.cues
        for predicate in spec.endpoints:
            if predicate.kind is PredicateKind.TERMINAL_STATE:
                note = "ok" if terminals else "no terminal pages in model"
                lines.append(f"  endpoint terminal: {note}")
            else:
                note = "ok" if predicate.tag in all_cues else "tag not on any page"
                lines.append(f"  endpoint {predicate.kind.value} {predicate.tag}: {note}")
        for tag in sorted(spec.cue_rewards):
            note = "ok" if tag in all_cues else "tag not on any page"
            lines.append(f"  cue_reward {tag}: {note}")
    return "\n".join(lines)
