"""Turn successful trajectories into Gherkin feature text.

Step wording comes from fixed English templates keyed by action kind, so the
same path always renders to byte-identical text. The emitter writes one
feature with any number of scenarios; `parse_feature` reads that text back,
which the tests use to prove the round trip is lossless.
"""

from dataclasses import dataclass, replace

from .scenario import PredicateKind, ScenarioSpec, endpoint_satisfied
from .site_model import ActionKind, SiteGraph
from .trajectory import Trajectory


class NotSuccessful(ValueError):
    """Only successful trajectories can become scenarios."""


class InconsistentPath(ValueError):
    """A step's edge target does not match the next step's page."""


class EmptyScenarioList(ValueError):
    pass


@dataclass(frozen=True)
class GherkinScenario:
    feature_name: str
    scenario_name: str
    given: str
    whens: tuple[str, ...]
    then: str

    def step_texts(self) -> tuple[str, ...]:
        return (self.given, *self.whens, self.then)


def _check_consistency(trajectory: Trajectory, graph: SiteGraph) -> None:
    for i, (page_id, edge) in enumerate(trajectory.steps):
        if page_id not in graph.pages:
            raise InconsistentPath(f"step {i} starts on unknown page {page_id!r}")
        expected = (
            trajectory.steps[i + 1][0] if i + 1 < len(trajectory.steps) else trajectory.final_page
        )
        if edge.target != expected:
            raise InconsistentPath(
                f"step {i} lands on {edge.target!r} but the path continues from {expected!r}"
            )


def _when_text(edge) -> str:
    if edge.kind is ActionKind.CLICK:
        return f'the user clicks "{edge.element}"'
    if edge.kind is ActionKind.TYPE_TEXT:
        return f'the user types "{edge.payload}" into "{edge.element}"'
    return f"the user scrolls {edge.payload}"


def trajectory_to_scenario(
    trajectory: Trajectory, graph: SiteGraph, spec: ScenarioSpec
) -> GherkinScenario:
    """Render one successful trajectory with the fixed step templates."""
    if not trajectory.success:
        raise NotSuccessful("trajectory did not reach an endpoint")
    _check_consistency(trajectory, graph)

    start_id = trajectory.steps[0][0] if trajectory.steps else trajectory.final_page
    given = f'the user is on the "{graph.pages[start_id].title}" page'
    whens = tuple(_when_text(edge) for _, edge in trajectory.steps)

    final = graph.pages[trajectory.final_page]
    then = None
    for predicate in spec.endpoints:
        if predicate.kind is PredicateKind.TERMINAL_STATE and final.is_terminal:
            then = f'the "{final.title}" page is reached'
            break
        if predicate.kind is PredicateKind.TEXT_PRESENT and predicate.tag in final.cues:
            then = f'the "{predicate.tag}" message is displayed'
            break
        if predicate.kind is PredicateKind.ELEMENT_VISIBLE and predicate.tag in final.cues:
            then = f'the "{predicate.tag}" element is visible'
            break
    if then is None:
        raise NotSuccessful("final page satisfies no endpoint predicate")

    name = f"{spec.name} via {len(whens)} steps"
    return GherkinScenario(spec.name, name, given, whens, then)


def dedup(scenarios: list[GherkinScenario]) -> list[GherkinScenario]:
    """Drop scenarios whose full step-text sequence repeats an earlier one."""
    seen: set[tuple[str, ...]] = set()
    unique: list[GherkinScenario] = []
    for scenario in scenarios:
        key = scenario.step_texts()
        if key not in seen:
            seen.add(key)
            unique.append(scenario)
    return unique


def assign_variant_names(scenarios: list[GherkinScenario]) -> list[GherkinScenario]:
    """Number scenarios in first-occurrence order: '<name> via <k> steps (variant <n>)'."""
    return [
        replace(s, scenario_name=f"{s.feature_name} via {len(s.whens)} steps (variant {n})")
        for n, s in enumerate(scenarios, start=1)
    ]


def emit_feature(feature_name: str, scenarios: list[GherkinScenario]) -> str:
    """Render the feature file text: LF line endings, single trailing newline."""
    if not scenarios:
        raise EmptyScenarioList("nothing to emit")
    lines = [f"Feature: {feature_name}"]
    for scenario in scenarios:
        lines.append("")
        lines.append(f"  Scenario: {scenario.scenario_name}")
        lines.append(f"    Given {scenario.given}")
        for i, when in enumerate(scenario.whens):
            keyword = "When" if i == 0 else "And"
            lines.append(f"    {keyword} {when}")
        lines.append(f"    Then {scenario.then}")
    return "\n".join(lines) + "\n"


def parse_feature(text: str) -> tuple[str, list[GherkinScenario]]:
    """Read emitted feature text back into scenarios (keyword lines only)."""
    feature_name: str | None = None
    collected: list[dict] = []
    current: dict | None = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        keyword, _, rest = line.partition(" ")
        rest = rest.strip()
        if keyword == "Feature:":
            feature_name = rest
        elif keyword == "Scenario:":
            current = {"name": rest, "given": None, "whens": [], "then": None}
            collected.append(current)
        elif keyword in ("Given", "When", "And", "Then"):
            if current is None:
                raise ValueError(f"step before any Scenario: {line!r}")
            if keyword == "Given":
                current["given"] = rest
            elif keyword == "Then":
                current["then"] = rest
            else:
                if current["then"] is not None:
                    raise ValueError(f"action step after Then: {line!r}")
                current["whens"].append(rest)
        else:
            raise ValueError(f"unrecognized line {line!r}")
    if feature_name is None:
        raise ValueError("missing Feature line")
    scenarios = []
    for c in collected:
        if c["given"] is None or c["then"] is None:
            raise ValueError(f"scenario {c['name']!r} is missing Given or Then")
        scenarios.append(
            GherkinScenario(feature_name, c["name"], c["given"], tuple(c["whens"]), c["then"])
        )
    return feature_name, scenarios
