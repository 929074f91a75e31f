"""Subexponential solver for two-layer crossing minimisation."""

from .base import base_case, base_min
from .extended import ELABORATE, NORMAL, Entry, ExtendedInstance, count_entries, entry_cross, from_graph
from .guesses import (PendantBlueprint, PendantGuess, SeparatorGuess, enumerate_guesses, pendant_knapsack,
                      split_entries)
from .solver import (Config, build_subinstances, combine_drawings, component_min, lift_to_extended, solve2,
                     solve2_min, solve_extended, solve_min)

__all__ = [
    "ELABORATE", "NORMAL", "Config", "Entry", "ExtendedInstance", "PendantBlueprint", "PendantGuess",
    "SeparatorGuess", "base_case", "base_min", "build_subinstances", "combine_drawings", "component_min",
    "count_entries", "entry_cross", "enumerate_guesses", "from_graph", "lift_to_extended", "pendant_knapsack",
    "solve2", "solve2_min", "solve_extended", "solve_min", "split_entries",
]
