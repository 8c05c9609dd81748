"""Exact computation engine for Nottingham-type thin graded Lie algebras
over prime fields: pattern compilation, axiom verification, the divided-power
tensor construction, deflation, and the maximal-class correspondence."""

__version__ = "0.1.0"
