"""Benchmarking toolkit for the flexible job shop scheduling problem with worker flexibility."""

__version__ = "0.1.0"
