"""Seeded simulator of collective intelligence tests: voting groups and
response-threshold task allocation."""

__version__ = "0.1.0"
