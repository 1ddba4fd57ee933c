"""Isotropy-optimal rotor orientations for multirotor chassis.

Submodules: :mod:`.chassis` (geometries), :mod:`.wrench` (grasp matrix and
metrics), :mod:`.manifold` (projective geometry and phases), :mod:`.optimizer`
(local and multi-start search), :mod:`.topology` (landscape analysis) and
:mod:`.cli`.
"""

__version__ = "0.1.0"
