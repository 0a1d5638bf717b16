"""Convex polyhedral analysis of constraint logic programs."""

from .poly import Constraint, LinearExpression, Polyhedron, PolyhedronError, Rel

__all__ = ["Constraint", "LinearExpression", "Polyhedron", "PolyhedronError", "Rel"]
__version__ = "0.1.0"
