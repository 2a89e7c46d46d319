"""GOHR testbed: hidden-rule board game, learners, metrics, and analysis."""

__version__ = "0.1.0"
