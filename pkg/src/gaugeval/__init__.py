"""Exact valuation theory: norms, gauges and graded algebras with involution."""

from gaugeval.ordvalues import INFINITY, ConvexSubgroup, Value

__all__ = ["Value", "INFINITY", "ConvexSubgroup"]

__version__ = "0.1.0"
