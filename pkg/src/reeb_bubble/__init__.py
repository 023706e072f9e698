"""Reeb spaces of bubbling-surgery fold maps: homology, cohomology rings,
and independent chain-level / simplicial verification."""

__version__ = "0.1.0"
