"""Lie point symmetries of semilinear PDEs: prolongation, determining
equations, structure certificates and generator verification."""

__version__ = "0.1.0"
