"""Teachable: an interactive news classifier taught through conversation."""

__version__ = "0.1.0"
