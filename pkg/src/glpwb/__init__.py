"""Symbolic workbench for GLP over ordinals below epsilon_0."""

__version__ = "0.1.0"
