"""Command-line surface: JSON documents, reproduction suites and the entry point."""

from .main import main

__all__ = ["main"]
