"""Learn goal paths through a modeled web UI and emit them as Gherkin features.

A site is a directed graph of pages and UI actions; a scenario names a start
page, endpoint predicates, and reward shaping. Tabular Q-learning or a softmax
policy gradient learns to reach the endpoints, failed episodes feed a
deterministic backtracking planner, and the best successful paths are emitted
as BDD feature files next to per-episode metrics and page-coverage tables.
"""

from .env import (
    Environment,
    EnvSession,
    Observation,
    SimulatedEnvironment,
    StepOutcome,
    Termination,
    replay_total_reward,
    reset,
    step,
)
from .gherkin import (
    GherkinScenario,
    assign_variant_names,
    dedup,
    emit_feature,
    parse_feature,
    trajectory_to_scenario,
)
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
from .metrics import (
    CoverageMap,
    EpisodeRecord,
    TTestResult,
    confidence_interval,
    moving_average,
    welch_t_test,
)
from .runner import (
    RunArtifacts,
    RunConfig,
    SweepResult,
    exploration_sweep,
    export,
    greedy_rollout,
    read_run_config,
    run_training,
    train,
)
from .scenario import EndpointPredicate, PredicateKind, ScenarioSpec, endpoint_satisfied, parse_scenario, serialize_scenario
from .site_model import (
    ActionEdge,
    ActionKind,
    PageNode,
    SiteGraph,
    describe_edge,
    load_site_model,
    neighbors,
    reachable_set,
    serialize_site,
)
from .trajectory import Trajectory

__version__ = "0.1.0"
