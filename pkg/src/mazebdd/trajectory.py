"""Recorded episode paths, shared by the learner and the Gherkin generator."""

from dataclasses import dataclass

from .site_model import ActionEdge, SiteGraph


@dataclass(frozen=True)
class Trajectory:
    """One finished episode: (page, edge taken) pairs plus where it ended."""

    steps: tuple[tuple[str, ActionEdge], ...]
    final_page: str
    total_reward: float
    success: bool

    def pages(self) -> list[str]:
        """The visited page sequence, start through final page."""
        return [page for page, _ in self.steps] + [self.final_page]

    def action_indices(self, graph: SiteGraph) -> list[int]:
        """Each step's positional action index on its source page."""
        return [graph.pages[page].actions.index(edge) for page, edge in self.steps]
