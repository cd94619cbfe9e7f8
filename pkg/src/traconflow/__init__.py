"""TRACON arrival-flow analysis and discrete-time landing simulation."""

__version__ = "0.1.0"
