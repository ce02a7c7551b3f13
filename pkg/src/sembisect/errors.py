"""Shared exception hierarchy.

Every module raises subclasses of SembisectError so the CLI can map
failures to stable exit codes by class name.
"""


class SembisectError(Exception):
    pass


class StorageFailure(SembisectError):
    """A session or sample store could not be read or written."""
