"""Scenario specifications: the goal a training run drives toward.

Format (line-oriented, ``#`` comments, strict):

    scenario <name>
    start <page-id>
    endpoint text_present <tag>
    endpoint element_visible <tag>
    endpoint terminal
    cue_reward <tag> [<float>]
    terminal_reward <float>
    step_penalty <float>
    failure_penalty <float>
    max_steps <int>

At least one endpoint is required; several act as an ANY-of set. A cue_reward
without an explicit amount defaults to 1.0.
"""

from dataclasses import dataclass, field
from enum import Enum

from .errors import DocumentError, MalformedDocument
from .site_model import PageNode

DEFAULT_TERMINAL_REWARD = 10.0
DEFAULT_CUE_REWARD = 1.0
DEFAULT_STEP_PENALTY = 0.05
DEFAULT_FAILURE_PENALTY = 1.0
DEFAULT_MAX_STEPS = 50


class MissingStart(DocumentError):
    pass


class NoEndpointPredicate(DocumentError):
    pass


class NegativeReward(DocumentError):
    pass


class PredicateKind(str, Enum):
    TEXT_PRESENT = "text_present"
    ELEMENT_VISIBLE = "element_visible"
    TERMINAL_STATE = "terminal_state"


@dataclass(frozen=True)
class EndpointPredicate:
    kind: PredicateKind
    tag: str | None = None


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    start_page: str
    endpoints: tuple[EndpointPredicate, ...]
    cue_rewards: dict[str, float] = field(default_factory=dict)
    terminal_reward: float = DEFAULT_TERMINAL_REWARD
    step_penalty: float = DEFAULT_STEP_PENALTY
    failure_penalty: float = DEFAULT_FAILURE_PENALTY
    max_steps: int = DEFAULT_MAX_STEPS


def _parse_float(token: str, line_no: int) -> float:
    try:
        return float(token)
    except ValueError:
        raise MalformedDocument(line_no, f"expected a number, got {token!r}") from None


def parse_scenario(source: str) -> ScenarioSpec:
    """Parse a scenario document, filling unset knobs with the defaults above."""
    name: str | None = None
    start: str | None = None
    endpoints: list[EndpointPredicate] = []
    cue_rewards: dict[str, float] = {}
    knobs: dict[str, float | int] = {}

    for line_no, raw in enumerate(source.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        directive, _, rest = line.partition(" ")
        rest = rest.strip()
        if directive == "scenario":
            if not rest:
                raise MalformedDocument(line_no, "scenario directive needs a name")
            if name is not None:
                raise MalformedDocument(line_no, "duplicate scenario directive")
            name = rest
        elif directive == "start":
            if not rest or len(rest.split()) != 1:
                raise MalformedDocument(line_no, "start directive needs exactly one page id")
            if start is not None:
                raise MalformedDocument(line_no, "duplicate start directive")
            start = rest
        elif directive == "endpoint":
            parts = rest.split()
            if parts == ["terminal"]:
                endpoints.append(EndpointPredicate(PredicateKind.TERMINAL_STATE))
            elif len(parts) == 2 and parts[0] in ("text_present", "element_visible"):
                endpoints.append(EndpointPredicate(PredicateKind(parts[0]), parts[1]))
            else:
                raise MalformedDocument(line_no, f"bad endpoint form {rest!r}")
        elif directive == "cue_reward":
            parts = rest.split()
            if len(parts) == 1:
                tag, value = parts[0], DEFAULT_CUE_REWARD
            elif len(parts) == 2:
                tag, value = parts[0], _parse_float(parts[1], line_no)
            else:
                raise MalformedDocument(line_no, "expected: cue_reward <tag> [<value>]")
            if value < 0:
                raise NegativeReward(f"line {line_no}: cue reward for {tag!r} is negative")
            if tag in cue_rewards:
                raise MalformedDocument(line_no, f"duplicate cue_reward for {tag!r}")
            cue_rewards[tag] = value
        elif directive in ("terminal_reward", "step_penalty", "failure_penalty"):
            if directive in knobs:
                raise MalformedDocument(line_no, f"duplicate {directive} directive")
            value = _parse_float(rest, line_no)
            if value < 0:
                raise NegativeReward(f"line {line_no}: {directive} is negative")
            knobs[directive] = value
        elif directive == "max_steps":
            if directive in knobs:
                raise MalformedDocument(line_no, "duplicate max_steps directive")
            try:
                steps = int(rest)
            except ValueError:
                raise MalformedDocument(line_no, f"max_steps must be an integer, got {rest!r}") from None
            if steps < 1:
                raise MalformedDocument(line_no, "max_steps must be at least 1")
            knobs[directive] = steps
        else:
            raise MalformedDocument(line_no, f"unknown directive {directive!r}")

    if name is None:
        raise MalformedDocument(0, "missing scenario directive")
    if start is None:
        raise MissingStart("no start directive")
    if not endpoints:
        raise NoEndpointPredicate("at least one endpoint is required")

    return ScenarioSpec(
        name=name,
        start_page=start,
        endpoints=tuple(endpoints),
        cue_rewards=cue_rewards,
        terminal_reward=float(knobs.get("terminal_reward", DEFAULT_TERMINAL_REWARD)),
        step_penalty=float(knobs.get("step_penalty", DEFAULT_STEP_PENALTY)),
        failure_penalty=float(knobs.get("failure_penalty", DEFAULT_FAILURE_PENALTY)),
        max_steps=int(knobs.get("max_steps", DEFAULT_MAX_STEPS)),
    )


def endpoint_satisfied(spec: ScenarioSpec, page: PageNode) -> bool:
    """True when the page satisfies any of the spec's endpoint predicates."""
    for predicate in spec.endpoints:
        if predicate.kind is PredicateKind.TERMINAL_STATE:
            if page.is_terminal:
                return True
        elif predicate.tag in page.cues:
            return True
    return False


def serialize_scenario(spec: ScenarioSpec) -> str:
    """Canonical text form; parsing it back yields an equal spec."""
    lines = [f"scenario {spec.name}", f"start {spec.start_page}"]
    for predicate in spec.endpoints:
        if predicate.kind is PredicateKind.TERMINAL_STATE:
            lines.append("endpoint terminal")
        else:
            lines.append(f"endpoint {predicate.kind.value} {predicate.tag}")
    for tag in sorted(spec.cue_rewards):
        lines.append(f"cue_reward {tag} {spec.cue_rewards[tag]!r}")
    lines.append(f"terminal_reward {spec.terminal_reward!r}")
    lines.append(f"step_penalty {spec.step_penalty!r}")
    lines.append(f"failure_penalty {spec.failure_penalty!r}")
    lines.append(f"max_steps {spec.max_steps}")
    return "\n".join(lines) + "\n"
