"""Simulation lab for the one-dimensional contact process with modified border."""
from __future__ import annotations

from .dynamics import BorderRule, Configuration, evolve, evolve_anchored, seen_from_edge
from .graphical import EventLog, Mark, is_open, make_log, merge_view

__all__ = ["BorderRule", "Configuration", "EventLog", "Mark", "evolve", "evolve_anchored",
           "is_open", "make_log", "merge_view", "seen_from_edge"]
__version__ = "0.1.0"
