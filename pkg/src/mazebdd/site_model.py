"""Site models: a web application captured as a directed graph of pages and UI actions.

The text format is line-oriented UTF-8. Lines starting with ``#`` are comments,
blank lines are ignored, and anything else must be one of:

    site <name>
    start <page-id>
    page <id> "<title>" [terminal] [defect] [cues: tag1,tag2,...]
    edge <from-id> click(<element>) -> <to-id>
    edge <from-id> type("<text>", <element>) -> <to-id>
    edge <from-id> scroll(<up|down>) -> <to-id>

Parsing is strict: unknown directives, malformed arguments, or edges that
reference undeclared pages are errors. Edge declaration order is preserved
exactly; the position of an edge within its page is the action index used
everywhere else in the package.
"""

import re
from dataclasses import dataclass, field
from enum import Enum

from .errors import DocumentError, MalformedDocument


class DuplicatePageId(DocumentError):
    pass


class DanglingTarget(DocumentError):
    pass


class MissingStartPage(DocumentError):
    pass


class UnknownPage(LookupError):
    """A page id that does not exist in the graph was passed to an operation."""


class ActionKind(str, Enum):
    CLICK = "click"
    TYPE_TEXT = "type_text"
    SCROLL = "scroll"


@dataclass(frozen=True)
class ActionEdge:
    """One interactable UI element on a page and the page it leads to.

    ``payload`` carries the typed text for ``type_text`` and the direction for
    ``scroll``; it is None for ``click``. ``element`` is empty for ``scroll``,
    which acts on the viewport rather than a named element.
    """

    kind: ActionKind
    element: str
    target: str
    payload: str | None = None


@dataclass(frozen=True)
class PageNode:
    id: str
    title: str
    cues: frozenset[str] = frozenset()
    is_terminal: bool = False
    is_defect: bool = False
    actions: tuple[ActionEdge, ...] = ()


@dataclass(frozen=True)
class SiteGraph:
    pages: dict[str, PageNode] = field(default_factory=dict)
    start_id: str = ""
    name: str = ""


_EDGE_RE = re.compile(r"^edge\s+(\S+)\s+(click|type|scroll)\((.*)\)\s*->\s*(\S+)\s*$")
_PAGE_RE = re.compile(r'^page\s+(\S+)\s+"([^"]*)"\s*(.*)$')
_TYPE_ARGS_RE = re.compile(r'^\s*"([^"]*)"\s*,\s*([^\s",()]+)\s*$')
_ELEMENT_RE = re.compile(r'^\s*([^\s",()]+)\s*$')
_TAG_RE = re.compile(r"^[A-Za-z0-9_\-]+$")


def _parse_page_suffix(suffix: str, line_no: int) -> tuple[bool, bool, frozenset[str]]:
    terminal = defect = False
    cues: list[str] = []
    head, sep, tail = suffix.partition("cues:")
    if sep and not tail.strip():
        raise MalformedDocument(line_no, "empty cue list")
    if sep:
        for tag in tail.split(","):
            tag = tag.strip()
            if not _TAG_RE.match(tag):
                raise MalformedDocument(line_no, f"bad cue tag {tag!r}")
            cues.append(tag)
    for flag in head.split():
        if flag == "terminal" and not terminal:
            terminal = True
        elif flag == "defect" and not defect:
            defect = True
        else:
            raise MalformedDocument(line_no, f"unknown or repeated page flag {flag!r}")
    return terminal, defect, frozenset(cues)


def _parse_edge_args(kind: str, args: str, line_no: int) -> tuple[ActionKind, str, str | None]:
    if kind == "click":
        m = _ELEMENT_RE.match(args)
        if not m:
            raise MalformedDocument(line_no, f"bad click arguments {args!r}")
        return ActionKind.CLICK, m.group(1), None
    if kind == "type":
        m = _TYPE_ARGS_RE.match(args)
        if not m:
            raise MalformedDocument(line_no, f"bad type arguments {args!r}")
        return ActionKind.TYPE_TEXT, m.group(2), m.group(1)
    direction = args.strip()
    if direction not in ("up", "down"):
        raise MalformedDocument(line_no, f"scroll direction must be up or down, got {direction!r}")
    return ActionKind.SCROLL, "", direction


def load_site_model(source: str) -> SiteGraph:
    """Parse a site-model document into an immutable SiteGraph."""
    name = ""
    start_id: str | None = None
    staged: dict[str, tuple[str, bool, bool, frozenset[str]]] = {}
    page_order: list[str] = []
    edges: list[tuple[int, str, ActionEdge]] = []

    for line_no, raw in enumerate(source.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        directive = line.split(None, 1)[0]
        if directive == "site":
            rest = line[4:].strip()
            if not rest:
                raise MalformedDocument(line_no, "site directive needs a name")
            name = rest
        elif directive == "start":
            rest = line[5:].strip()
            if not rest or len(rest.split()) != 1:
                raise MalformedDocument(line_no, "start directive needs exactly one page id")
            if start_id is not None:
                raise MalformedDocument(line_no, "duplicate start directive")
            start_id = rest
        elif directive == "page":
            m = _PAGE_RE.match(line)
            if not m:
                raise MalformedDocument(line_no, "expected: page <id> \"<title>\" [flags]")
            pid, title, suffix = m.groups()
            if pid in staged:
                raise DuplicatePageId(f"line {line_no}: page {pid!r} declared twice")
            staged[pid] = (title, *_parse_page_suffix(suffix.strip(), line_no))
            page_order.append(pid)
        elif directive == "edge":
            m = _EDGE_RE.match(line)
            if not m:
                raise MalformedDocument(line_no, "expected: edge <from> <kind>(...) -> <to>")
            from_id, kind, args, target = m.groups()
            k, element, payload = _parse_edge_args(kind, args, line_no)
            edges.append((line_no, from_id, ActionEdge(k, element, target, payload)))
        else:
            raise MalformedDocument(line_no, f"unknown directive {directive!r}")

    actions: dict[str, list[ActionEdge]] = {pid: [] for pid in page_order}
    for line_no, from_id, edge in edges:
        if from_id not in staged:
            raise MalformedDocument(line_no, f"edge from unknown page {from_id!r}")
        if edge.target not in staged:
            raise DanglingTarget(
                f"line {line_no}: edge {from_id} {describe_edge(edge)} -> {edge.target} "
                "targets an unknown page"
            )
        actions[from_id].append(edge)

    if start_id is None:
        raise MissingStartPage("no start directive")
    if start_id not in staged:
        raise MissingStartPage(f"start page {start_id!r} is not declared")

    pages = {
        pid: PageNode(pid, title, cues, terminal, defect, tuple(actions[pid]))
        for pid, (title, terminal, defect, cues) in ((p, staged[p]) for p in page_order)
    }
    return SiteGraph(pages=pages, start_id=start_id, name=name)


def neighbors(graph: SiteGraph, page_id: str) -> list[ActionEdge]:
    """The page's outgoing actions in declaration order (index = action index)."""
    if page_id not in graph.pages:
        raise UnknownPage(page_id)
    return list(graph.pages[page_id].actions)


def reachable_set(graph: SiteGraph, from_id: str) -> set[str]:
    """Every page reachable from ``from_id`` by following edges, including itself."""
    if from_id not in graph.pages:
        raise UnknownPage(from_id)
    seen = {from_id}
    frontier = [from_id]
    while frontier:
        pid = frontier.pop()
        for edge in graph.pages[pid].actions:
            if edge.target not in seen:
                seen.add(edge.target)
                frontier.append(edge.target)
    return seen


def describe_edge(edge: ActionEdge) -> str:
    """Render an edge in the same syntax the file format uses."""
    if edge.kind is ActionKind.CLICK:
        return f"click({edge.element})"
    if edge.kind is ActionKind.TYPE_TEXT:
        return f'type("{edge.payload}", {edge.element})'
    return f"scroll({edge.payload})"


def serialize_site(graph: SiteGraph) -> str:
    """Canonical text form; parsing it back yields an equal graph."""
    lines = []
    if graph.name:
        lines.append(f"site {graph.name}")
    lines.append(f"start {graph.start_id}")
    lines.append("")
    for page in graph.pages.values():
        parts = [f'page {page.id} "{page.title}"']
        if page.is_terminal:
            parts.append("terminal")
        if page.is_defect:
            parts.append("defect")
        if page.cues:
            parts.append("cues: " + ",".join(sorted(page.cues)))
        lines.append(" ".join(parts))
    lines.append("")
    for page in graph.pages.values():
        for edge in page.actions:
            lines.append(f"edge {page.id} {describe_edge(edge)} -> {edge.target}")
    return "\n".join(lines) + "\n"
