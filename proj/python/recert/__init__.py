"""Observer-certainty analysis and coalition strategy synthesis for
imperfect-information games, backed by the C++ core."""

from ._core import (
    Game,
    NodeLimitError,
    NotRecurringError,
    ParseError,
    run_cli,
)

__all__ = ["Game", "NodeLimitError", "NotRecurringError", "ParseError", "run_cli"]
