"""Chassis geometries: rotor positions on a rigid frame.

Every generator returns vertices scaled so that the farthest rotor sits at
distance 1 from the origin. Vertex order is part of the contract because phase
offsets are reported per rotor:

* regular polygons run counter-clockwise from (1, 0, 0);
* the octahedron is top, equatorial ring by azimuth (+x, +y, -x, -y), bottom;
* the cube is lexicographic on the sign pattern of (y, z, x), x varying
  fastest and negative signs first;
* every other solid is sorted by height (descending), then by azimuth in
  [0, 2*pi).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

FAMILIES = (
    "regular_polygon",
    "platonic",
    "prism",
    "antiprism",
    "bipyramid",
    "cupola",
    "archimedean",
    "quasi_regular",
)

PLATONIC = ("octahedron", "cube", "icosahedron", "dodecahedron")
AUXILIARY = (
    "tri_prism6",
    "pent_bipyramid7",
    "sq_antiprism8",
    "tri_cupola9",
    "cuboctahedron12",
    "hex_prism12",
)

_GOLDEN = (1.0 + np.sqrt(5.0)) / 2.0


@dataclass(frozen=True)
class Chassis:
    """Named rigid set of rotor positions.

    Attributes
    ----------
    id : str
        Library identifier, e.g. ``"CRPol6"``.
    family : str
        One of :data:`FAMILIES`.
    vertices : np.ndarray
        ``(N, 3)`` rotor positions. Stored read-only.
    circumradius : float
        Largest vertex norm (1 for every generated chassis).
    """

    id: str
    family: str
    vertices: np.ndarray = field(repr=False)
    circumradius: float = 1.0

    def __post_init__(self):
        verts = np.array(self.vertices, dtype=float)
        if verts.ndim != 2 or verts.shape[1] != 3:
            raise ValueError(f"vertices must have shape (N, 3), got {verts.shape}")
        if len(verts) < 3:
            raise ValueError(f"a chassis needs at least 3 vertices, got {len(verts)}")
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        norms = np.linalg.norm(verts, axis=1)
        if np.any(norms <= 0.0):
            raise ValueError("every vertex must have nonzero norm")
        radius = float(norms.max())
        if not np.isclose(radius, self.circumradius, rtol=1e-9, atol=0.0):
            raise ValueError(
                f"circumradius {self.circumradius} does not match max vertex norm {radius}"
            )
        gaps = np.linalg.norm(verts[:, None, :] - verts[None, :, :], axis=2)
        gaps[np.diag_indices(len(verts))] = np.inf
        if gaps.min() <= 1e-9 * radius:
            raise ValueError("two vertices coincide")
        verts.setflags(write=False)
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "circumradius", radius)

    @property
    def n(self) -> int:
        return len(self.vertices)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "family": self.family,
            "vertices": self.vertices.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Chassis":
        for key in ("id", "family", "vertices"):
            if key not in data:
                raise ValueError(f"chassis document is missing {key!r}")
        verts = np.asarray(data["vertices"], dtype=float)
        if verts.ndim != 2 or len(verts) == 0:
            raise ValueError("vertices must be a non-empty list of 3-vectors")
        radius = float(np.linalg.norm(verts, axis=1).max())
        return cls(str(data["id"]), str(data["family"]), verts, radius)

    def content_hash(self) -> str:
        """Stable sha256 over id, family and vertex coordinates."""
        import hashlib

        payload = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()


def _normalized(cid: str, family: str, verts) -> Chassis:
    verts = np.asarray(verts, dtype=float)
    verts = verts / np.linalg.norm(verts, axis=1).max()
    return Chassis(cid, family, verts, 1.0)


def _height_azimuth_order(verts: np.ndarray) -> np.ndarray:
    z = np.round(verts[:, 2], 9)
    az = np.round(np.arctan2(verts[:, 1], verts[:, 0]) % (2 * np.pi), 9)
    az[np.isclose(az, 2 * np.pi)] = 0.0
    return verts[np.lexsort((az, -z))]


def _ring(count: int, radius: float, z: float, phase: float = 0.0) -> np.ndarray:
    ang = phase + 2 * np.pi * np.arange(count) / count
    return np.column_stack([radius * np.cos(ang), radius * np.sin(ang), np.full(count, z)])


def make_regular_polygon(n: int) -> Chassis:
    """Planar regular ``n``-gon on the unit circle, rotor 1 at (1, 0, 0)."""
    if int(n) != n or n < 3:
        raise ValueError(f"regular polygon needs n >= 3, got {n}")
    n = int(n)
    return Chassis(f"CRPol{n}", "regular_polygon", _ring(n, 1.0, 0.0), 1.0)


def make_platonic(name: str) -> Chassis:
    """Platonic solid with unit circumradius.

    Only the four solids with at least six vertices are offered.
    """
    if name == "octahedron":
        verts = [[0, 0, 1], [1, 0, 0], [0, 1, 0], [-1, 0, 0], [0, -1, 0], [0, 0, -1]]
        return _normalized("COct6", "platonic", verts)
    if name == "cube":
        verts = [(x, y, z) for y, z, x in itertools.product((-1, 1), repeat=3)]
        return _normalized("CCub8", "platonic", verts)
    if name == "icosahedron":
        verts = []
        for a, b in itertools.product((-1, 1), repeat=2):
            verts += [(0, a, b * _GOLDEN), (a, b * _GOLDEN, 0), (b * _GOLDEN, 0, a)]
        return _normalized("CIco12", "platonic", _height_azimuth_order(np.array(verts, float)))
    if name == "dodecahedron":
        inv = 1.0 / _GOLDEN
        verts = list(itertools.product((-1, 1), repeat=3))
        for a, b in itertools.product((-1, 1), repeat=2):
            verts += [(0, a * inv, b * _GOLDEN), (a * inv, b * _GOLDEN, 0), (b * _GOLDEN, 0, a * inv)]
        return _normalized("CDod20", "platonic", _height_azimuth_order(np.array(verts, float)))
    raise ValueError(f"unknown platonic solid {name!r}; expected one of {PLATONIC}")


def make_auxiliary(kind: str) -> Chassis:
    """Prisms, antiprisms, cupolae and friends with unit edge, then unit circumradius."""
    if kind == "tri_prism6":
        r = 1.0 / np.sqrt(3.0)
        verts = np.vstack([_ring(3, r, 0.5), _ring(3, r, -0.5)])
        return _normalized("CTriPr6", "prism", verts)
    if kind == "pent_bipyramid7":
        # equilateral faces: apex height from edge 2 sin(36 deg) on a unit ring
        edge = 2 * np.sin(np.pi / 5)
        h = np.sqrt(edge**2 - 1.0)
        verts = np.vstack([[0, 0, h], _ring(5, 1.0, 0.0), [0, 0, -h]])
        return _normalized("CPentBi7", "bipyramid", verts)
    if kind == "sq_antiprism8":
        h = 2.0 ** 0.25
        verts = np.vstack([_ring(4, 1.0, h / 2), _ring(4, 1.0, -h / 2, np.pi / 4)])
        return _normalized("CSqAnti8", "antiprism", verts)
    if kind == "tri_cupola9":
        # cap of the cuboctahedron: all nine vertices lie on the unit sphere
        top = _ring(3, 1.0 / np.sqrt(3.0), np.sqrt(2.0 / 3.0), np.pi / 6)
        verts = np.vstack([top, _ring(6, 1.0, 0.0)])
        return _normalized("CTriCup9", "cupola", verts)
    if kind == "cuboctahedron12":
        verts = set()
        for perm in itertools.permutations((1, 1, 0)):
            for signs in itertools.product((-1, 1), repeat=3):
                verts.add(tuple(float(s * c) for s, c in zip(signs, perm)))
        ordered = _height_azimuth_order(np.array(sorted(verts)))
        return _normalized("CCubOct12", "archimedean", ordered)
    if kind == "hex_prism12":
        verts = np.vstack([_ring(6, 1.0, 0.5), _ring(6, 1.0, -0.5)])
        return _normalized("CHexPr12", "prism", verts)
    raise ValueError(f"unknown auxiliary chassis {kind!r}; expected one of {AUXILIARY}")


def make_quasi_regular(base: Chassis, magnitude: float, seed: int, cid: str | None = None) -> Chassis:
    """Perturb every vertex by a seeded displacement drawn uniformly in a ball.

    Parameters
    ----------
    base : Chassis
        Geometry to perturb.
    magnitude : float
        Ball radius as a fraction of ``base.circumradius``; must lie in [0, 0.5).
    seed : int
        Seed for :func:`numpy.random.default_rng`.
    cid : str, optional
        Identifier of the result. Defaults to ``"<base.id>~q<magnitude>s<seed>"``.
    """
    if not 0.0 <= magnitude < 0.5:
        raise ValueError(f"magnitude must lie in [0, 0.5), got {magnitude}")
    cid = cid or f"{base.id}~q{magnitude:g}s{seed}"
    if magnitude == 0.0:
        return Chassis(cid, "quasi_regular", base.vertices.copy(), base.circumradius)
    rng = np.random.default_rng(seed)
    n = base.n
    direction = rng.standard_normal((n, 3))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    radius = magnitude * base.circumradius * rng.random(n) ** (1.0 / 3.0)
    verts = base.vertices + radius[:, None] * direction
    return _normalized(cid, "quasi_regular", verts)


# Quasi-regular library members: (base, magnitude, seed).
_QUASI = {
    "CQRPol6": ("CRPol6", 0.1, 6),
    "CQRPol7": ("CRPol7", 0.1, 7),
    "CQRPol8": ("CRPol8", 0.1, 8),
    "CQRPol9": ("CRPol9", 0.1, 9),
    "CQRPol10": ("CRPol10", 0.1, 10),
    "CQCub8": ("CCub8", 0.1, 8),
}

_FIXED = {
    "COct6": lambda: make_platonic("octahedron"),
    "CCub8": lambda: make_platonic("cube"),
    "CIco12": lambda: make_platonic("icosahedron"),
    "CDod20": lambda: make_platonic("dodecahedron"),
    "CTriPr6": lambda: make_auxiliary("tri_prism6"),
    "CPentBi7": lambda: make_auxiliary("pent_bipyramid7"),
    "CSqAnti8": lambda: make_auxiliary("sq_antiprism8"),
    "CTriCup9": lambda: make_auxiliary("tri_cupola9"),
    "CCubOct12": lambda: make_auxiliary("cuboctahedron12"),
    "CHexPr12": lambda: make_auxiliary("hex_prism12"),
}


def library_ids() -> list[str]:
    """Identifiers accepted by :func:`get_chassis` (polygons listed for N = 6..20)."""
    polys = [f"CRPol{n}" for n in range(6, 21)]
    return polys + list(_QUASI) + list(_FIXED)


def get_chassis(cid: str) -> Chassis:
    """Build a library chassis by identifier.

    ``CRPol<N>`` is accepted for any N >= 3.
    """
    if cid.startswith("CRPol") and cid[5:].isdigit():
        return make_regular_polygon(int(cid[5:]))
    if cid in _QUASI:
        base, mag, seed = _QUASI[cid]
        return make_quasi_regular(get_chassis(base), mag, seed, cid=cid)
    if cid in _FIXED:
        return _FIXED[cid]()
    raise KeyError(f"unknown chassis id {cid!r}")


def save_chassis(chassis: Chassis, path) -> None:
    Path(path).write_text(json.dumps(chassis.to_dict(), indent=2, sort_keys=True) + "\n")


def load_chassis(path) -> Chassis:
    """Read a chassis JSON document; invariants are checked on construction."""
    return Chassis.from_dict(json.loads(Path(path).read_text()))


def resolve_chassis(name: str) -> Chassis:
    """Accept either a library id or a path to a chassis JSON file."""
    path = Path(name)
    if path.suffix == ".json" or path.exists():
        return load_chassis(path)
    return get_chassis(name)
