"""Core functionality for cqbl: errors, workers, serialization and the application.

The application lives in :mod:`cqbl.core.app` and is not imported here,
because every library module imports :mod:`cqbl.core.errors`.
"""
