"""Exact Floer-theoretic data for anchored affine Lagrangians on the flat torus.

Modules:

* ``novikov`` -- truncated universal Novikov series over group-ring
  coefficients, with valuation, subring predicates and the Galois action;
* ``maslov`` -- winding-number Maslov indices for paths and loops of
  Lagrangian lines in the plane;
* ``torus`` -- the geometric backend: anchored lines on T^2, admissible
  generators, actions, degrees and triangle products;
* ``ainfty`` -- abstract filtered A-infinity tables, relation residuals,
  deformation and filtration checks;
* ``reduce`` -- prequantum holonomy, rationalizations, energy
  normalization and the Galois symmetry check;
* ``cli`` -- the ``floer`` command line front door.
"""

from .novikov import GroupRingCoeff, NovikovSeries

__all__ = ["GroupRingCoeff", "NovikovSeries"]
__version__ = "0.1.0"
