"""Tabulated reference branch offsets used for regression checks.

Rows are fractions of pi per rotor, in the rotor order of the associated
reference chassis. Polygon rows use the library polygons directly. The cube
rows are stated in the library cube's vertex order. The octahedron row is
stated for an octahedron resting on a face (see :func:`face_up_octahedron`),
so comparisons go through :mod:`rotorscape.topology.symmetry`.
"""

from __future__ import annotations

from fractions import Fraction as F

import numpy as np

from ..chassis import Chassis, make_platonic, make_regular_polygon


def _row(*nums, den=1):
    return tuple(F(x, den) if isinstance(x, int) else F(x) for x in nums)


POLYGON_ROWS = {
    6: [_row(0, 3, 0, 3, 0, 3, den=6)],
    7: [_row(0, 3, 6, 2, 5, 1, 4, den=7), _row(0, 4, 1, 5, 2, 6, 3, den=7)],
    8: [_row(0, 3, 6, 1, 4, 7, 2, 5, den=8), _row(0, 4, 0, 4, 0, 4, 0, 4, den=8),
        _row(0, 5, 2, 7, 4, 1, 6, 3, den=8)],
    9: [_row(0, 3, 6, 0, 3, 6, 0, 3, 6, den=9), _row(0, 4, 8, 3, 7, 2, 6, 1, 5, den=9),
        _row(0, 5, 1, 6, 2, 7, 3, 8, 4, den=9), _row(0, 6, 3, 0, 6, 3, 0, 6, 3, den=9)],
    10: [_row(0, 3, 6, 9, 2, 5, 8, 1, 4, 7, den=10), _row(0, 4, 8, 2, 6, 0, 4, 8, 2, 6, den=10),
         _row(0, 5, 0, 5, 0, 5, 0, 5, 0, 5, den=10), _row(0, 6, 2, 8, 4, 0, 6, 2, 8, 4, den=10),
         _row(0, 7, 4, 1, 8, 5, 2, 9, 6, 3, den=10)],
}

OCTAHEDRON_ROWS = [_row("0", "0", "0", "1/2", "1/2", "1/2")]

CUBE_ROWS = [
    _row("0", "0", "1/2", "1/2", "0", "0", "1/2", "1/2"),
    _row("0", "2/3", "2/3", "0", "1/6", "1/2", "1/2", "1/6"),
    _row("0", "5/6", "1/3", "1/2", "1/3", "1/2", "0", "5/6"),
]


def face_up_octahedron() -> Chassis:
    """Octahedron with a face on top: upper triangle at azimuths 60, 180, 300 deg, lower at 0, 120, 240 deg."""
    z, r = 1 / np.sqrt(3), np.sqrt(2 / 3)
    up = [(r * np.cos(np.radians(a)), r * np.sin(np.radians(a)), z) for a in (60, 180, 300)]
    lo = [(r * np.cos(np.radians(a)), r * np.sin(np.radians(a)), -z) for a in (0, 120, 240)]
    return Chassis("COct6-face", "platonic", np.array(up + lo), 1.0)


def as_radians(row) -> np.ndarray:
    return np.array([float(f) for f in row]) * np.pi


def reference_for(chassis_id: str):
    """``(reference chassis, rows in radians)`` for ids with tabulated branches, else ``None``."""
    if chassis_id.startswith("CRPol") and chassis_id[5:].isdigit() and int(chassis_id[5:]) in POLYGON_ROWS:
        n = int(chassis_id[5:])
        return make_regular_polygon(n), [as_radians(r) for r in POLYGON_ROWS[n]]
    if chassis_id == "COct6":
        return face_up_octahedron(), [as_radians(r) for r in OCTAHEDRON_ROWS]
    if chassis_id == "CCub8":
        return make_platonic("cube"), [as_radians(r) for r in CUBE_ROWS]
    return None
