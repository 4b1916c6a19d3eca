"""Reasons a double point is safe, i.e. its sink corner is not a sink disk."""
from __future__ import annotations

from enum import Enum


class SafetyReason(str, Enum):
    ANNULUS_CORNER = "annulus_corner"            # sink corner holds a puncture or boundary circle
    OUTWARD_PROVENANCE = "outward_provenance"    # corner touches a collapsed circle pointing away
    VERTICAL_PAIR = "vertical_pair"              # >= 2 same-direction vertical arcs on the corner
    RAINBOW_PAIR = "rainbow_pair"                # >= 2 same-direction rainbow arcs on the corner
    SINGLE_DIRECTION = "single_direction"        # strand meets the locus in one direction only
