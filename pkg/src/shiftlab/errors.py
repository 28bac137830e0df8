"""Exceptions shared across the laboratory."""


class ShiftLabError(Exception):
    """Base class for domain errors."""


class WindowExceededError(ShiftLabError):
    """A sampled point was evaluated outside its materialized window."""


class CapExceededError(ShiftLabError):
    """An exact operation refused to run past its combinatorial cap."""


class EntryTimeNotFoundError(ShiftLabError):
    """No orbit entry time into the target set within the search horizon."""


class ConfigError(ShiftLabError):
    """Invalid experiment configuration; carries the offending field path."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")
