"""Fault-tolerance regime classification for hierarchical system models."""

__version__ = "0.1.0"
