import random

import pytest

from mazebdd.env import (
    ActionOutOfRange,
    SessionFinished,
    SimulatedEnvironment,
    StartPageUnknown,
    Termination,
    replay_total_reward,
    reset,
    step,
)
from mazebdd.scenario import parse_scenario
from mazebdd.site_model import load_site_model
from mazebdd.trajectory import Trajectory

CYCLE = """\
start a
page a "A"
page b "B" cues: x
edge a click(fwd) -> b
edge b click(back) -> a
"""

CYCLE_SPEC = "scenario s\nstart a\nendpoint text_present never\ncue_reward x 1\nmax_steps 6\n"


def test_reset_state(shop_graph, shop_spec):
    session, obs = reset(shop_graph, shop_spec)
    assert session.current == "homepage"
    assert session.steps_taken == 0
    assert session.visit_counts == {"homepage": 1}
    assert not session.finished
    assert obs.page_id == "homepage"
    assert obs.action_count == 2
    assert obs.new_cues == frozenset()


def test_reset_unknown_start(shop_graph):
    spec = parse_scenario("scenario s\nstart nowhere\nendpoint terminal\n")
    with pytest.raises(StartPageUnknown):
        reset(shop_graph, spec)


def test_optimal_walk_rewards(shop_graph, shop_spec):
    """Frozen per-step rewards along the direct checkout path."""
    session, _ = reset(shop_graph, shop_spec)
    expected = [
        ("search", -0.05),  # step penalty only
        ("product", 0.95),  # -0.05 + product_details
        ("cart", 0.95),  # -0.05 + cart_updated
        ("checkout", -0.05),
        ("order-confirmation", 9.95),  # -0.05 + terminal bonus
    ]
    actions = [1, 1, 0, 0, 0]
    total = 0.0
    for action, (page, reward) in zip(actions, expected):
        out = step(session, action)
        assert out.observation.page_id == page
        assert out.reward == pytest.approx(reward, abs=1e-12)
        total += out.reward
    assert total == pytest.approx(11.75, abs=1e-12)
    assert out.done
    assert out.termination is Termination.ENDPOINT
    assert session.finished


def test_cue_pays_on_first_visit_only():
    graph = load_site_model(CYCLE)
    spec = parse_scenario(CYCLE_SPEC)
    session, _ = reset(graph, spec)
    first = step(session, 0)
    assert first.reward == pytest.approx(0.95, abs=1e-12)
    assert first.observation.new_cues == frozenset({"x"})
    back = step(session, 0)
    assert back.reward == pytest.approx(-0.05, abs=1e-12)
    again = step(session, 0)
    assert again.reward == pytest.approx(-0.05, abs=1e-12)
    assert again.observation.new_cues == frozenset()


def test_start_page_cues_never_pay():
    graph = load_site_model(
        'start a\npage a "A" cues: x\npage b "B"\nedge a click(f) -> b\nedge b click(g) -> a\n'
    )
    spec = parse_scenario("scenario s\nstart a\nendpoint text_present never\ncue_reward x 5\nmax_steps 4\n")
    session, obs = reset(graph, spec)
    assert obs.new_cues == frozenset({"x"})
    away = step(session, 0)
    back = step(session, 0)
    assert away.reward == pytest.approx(-0.05, abs=1e-12)
    assert back.reward == pytest.approx(-0.05, abs=1e-12)


def test_dead_end_penalty_and_termination():
    graph = load_site_model('start a\npage a "A"\npage b "B"\nedge a click(f) -> b\n')
    spec = parse_scenario("scenario s\nstart a\nendpoint text_present never\n")
    session, _ = reset(graph, spec)
    out = step(session, 0)
    assert out.reward == pytest.approx(-1.05, abs=1e-12)
    assert out.termination is Termination.DEAD_END
    assert out.done


def test_terminal_flag_without_endpoint_is_still_a_dead_end():
    graph = load_site_model('start a\npage a "A"\npage t "T" terminal\nedge a click(f) -> t\n')
    spec = parse_scenario("scenario s\nstart a\nendpoint text_present missing\n")
    session, _ = reset(graph, spec)
    out = step(session, 0)
    assert out.termination is Termination.DEAD_END
    assert out.reward == pytest.approx(-1.05, abs=1e-12)


def test_timeout_after_max_steps():
    graph = load_site_model('start a\npage a "A"\nedge a scroll(down) -> a\n')
    spec = parse_scenario("scenario s\nstart a\nendpoint text_present never\nmax_steps 3\n")
    session, _ = reset(graph, spec)
    for expected_done in (False, False, True):
        out = step(session, 0)
        assert out.done is expected_done
    assert out.termination is Termination.TIMEOUT
    assert session.steps_taken == 3


def test_endpoint_wins_over_timeout():
    graph = load_site_model('start a\npage a "A"\npage z "Z" terminal\nedge a click(f) -> z\n')
    spec = parse_scenario("scenario s\nstart a\nendpoint terminal\nmax_steps 1\n")
    session, _ = reset(graph, spec)
    out = step(session, 0)
    assert out.termination is Termination.ENDPOINT


def test_step_guards(shop_graph, shop_spec):
    session, _ = reset(shop_graph, shop_spec)
    with pytest.raises(ActionOutOfRange):
        step(session, 2)
    with pytest.raises(ActionOutOfRange):
        step(session, -1)
    for action in (1, 1, 0, 0, 0):
        step(session, action)
    with pytest.raises(SessionFinished):
        step(session, 0)


def test_visit_counts_accumulate():
    graph = load_site_model(CYCLE)
    spec = parse_scenario(CYCLE_SPEC)
    session, _ = reset(graph, spec)
    for _ in range(4):
        step(session, 0)
    assert session.visit_counts == {"a": 3, "b": 2}


def test_simulated_environment_wrapper(shop_graph, shop_spec):
    env = SimulatedEnvironment(shop_graph, shop_spec)
    with pytest.raises(SessionFinished):
        env.step(0)
    obs = env.reset()
    assert obs.page_id == "homepage"
    out = env.step(0)
    assert out.observation.page_id == "sign-in"
    assert env.actions("homepage") == [
        "click(sign-in-link)",
        'type("wireless mouse", search-box)',
    ]
    bad = parse_scenario("scenario s\nstart nowhere\nendpoint terminal\n")
    with pytest.raises(StartPageUnknown):
        SimulatedEnvironment(shop_graph, bad)


@pytest.mark.parametrize("seed", range(12))
def test_replay_matches_live_rewards(market_graph, market_spec, seed):
    """The independent replay audit agrees with the live sum to 1e-12."""
    rng = random.Random(seed)
    session, _ = reset(market_graph, market_spec)
    steps = []
    total = 0.0
    while not session.finished:
        page = session.current
        n = len(market_graph.pages[page].actions)
        idx = rng.randrange(n)
        out = step(session, idx)
        steps.append((page, market_graph.pages[page].actions[idx]))
        total += out.reward
    trajectory = Trajectory(
        steps=tuple(steps),
        final_page=session.current,
        total_reward=total,
        success=session.termination is Termination.ENDPOINT,
    )
    assert abs(replay_total_reward(market_graph, market_spec, trajectory) - total) <= 1e-12
