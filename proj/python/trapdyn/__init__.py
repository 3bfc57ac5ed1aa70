"""Trapping regions of lossless quadratic systems."""

import json

from ._trapdyn import (
    ExistenceResult,
    ShiftedForm,
    System,
    TrapdynError,
    brute_force_radius,
    conservative_radius,
    integrate,
    lossless_defect,
    solve_existence,
    systems,
    tight_radius,
    tight_radius_sdp,
)

__all__ = [
    "ExistenceResult",
    "ShiftedForm",
    "System",
    "TrapdynError",
    "analyze",
    "brute_force_radius",
    "conservative_radius",
    "integrate",
    "lossless_defect",
    "solve_existence",
    "systems",
    "tight_radius",
    "tight_radius_sdp",
]


def analyze(system, center=None):
    """Full analysis as a dict; center is None/'auto', 'zero' or a vector."""
    from ._trapdyn import _analyze_json

    return json.loads(_analyze_json(system, center))
