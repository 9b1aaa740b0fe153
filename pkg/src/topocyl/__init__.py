"""Finite-model workbench for topological cylindric algebras: finite
topologies and S4/S4C semantics, topological cylindric set algebras,
abstract axiom suites, the finite rainbow construction, and bounded
atomic games."""

from .report import VERSION as __version__
