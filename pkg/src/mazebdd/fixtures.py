"""Access to the bundled desk-scale models, goals, and golden outputs.

Shipped fixtures:

* ``shop.site`` / ``place-order.scenario``: the seven-page storefront used in
  most tests and docs. The sign-in page is flagged as a known defect and sits
  off the optimal order path, which goes through guest search.
* ``market.site`` / ``market-order.scenario``: a twelve-page storefront with
  cycles and two dead ends, for backtracking and convergence tests.
* ``branching.site``: a six-page tree for exhaustive path enumeration.
* ``golden/``: frozen feature and CSV outputs pinned by the test suite.
"""

from importlib import resources
from pathlib import Path

_ROOT = resources.files(__package__) / "fixtures"


def fixture_path(name: str) -> Path:
    """Filesystem path of a bundled fixture, e.g. ``fixture_path("shop.site")``."""
    path = Path(str(_ROOT / name))
    if not path.exists():
        raise FileNotFoundError(f"no bundled fixture named {name!r}")
    return path


def fixture_text(name: str) -> str:
    return fixture_path(name).read_text(encoding="utf-8")


def list_fixtures() -> list[str]:
    root = Path(str(_ROOT))
    return sorted(p.name for p in root.iterdir() if p.is_file())
