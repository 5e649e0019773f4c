"""Shared exception base for the whole platform.

Every domain error raised by fablink subsystems derives from FablinkError so
callers (CLI, HTTP layer) can map failures to exit codes / status codes
without enumerating modules.
"""


class FablinkError(Exception):
    """Base class for all fablink domain errors."""


class ValidationError(FablinkError):
    """Input violated a documented contract (bad geometry, bad record, ...)."""
