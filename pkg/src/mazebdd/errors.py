"""Shared exception roots, so the CLI can map failure families to exit codes."""


class DocumentError(Exception):
    """A site-model or scenario document failed to parse or validate."""


class MalformedDocument(DocumentError):
    """A line that matches no known directive form, with its 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class ConfigInvalid(Exception):
    """A run configuration value is out of its legal range."""
