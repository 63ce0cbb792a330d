"""Numerics for the separatrix splitting at the L3 point of the RPC3BP.

Subpackages by theme:

* :mod:`l3lab.numerics` -- complex-path ODE integration, tanh-sinh contour
  quadrature, bracketed root finding.
* :mod:`l3lab.rpc3bp` -- the three-body Hamiltonian in Cartesian, polar and
  Poincare variables, the singular scaling, and the collinear equilibrium.
* :mod:`l3lab.separatrix` -- complex continuation of the reduced separatrix,
  the analyticity constant A, and the singularity structure at +-iA.
* :mod:`l3lab.inner` -- the inner equation at the singularity and the Stokes
  constant estimates theta_rho.
* :mod:`l3lab.splitting` -- direct measurement of the manifold gap at the
  quarter section and the exponential-smallness fit.
"""

__version__ = "0.1.0"

from . import inner, numerics, rpc3bp, separatrix, splitting  # noqa: F401,E402

__all__ = ["numerics", "rpc3bp", "separatrix", "inner", "splitting",
           "__version__"]
