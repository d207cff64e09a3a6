"""Numerics for isoperimetric regions in asymptotically hyperbolic 3-manifolds."""

__version__ = "0.1.0"
