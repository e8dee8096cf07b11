"""Quaternionic flag manifolds: group actions, curvature forms and generators."""

__version__ = "0.1.0"
