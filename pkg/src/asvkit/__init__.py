"""Planning, simulation and processing tools for small autonomous surface vehicles."""

__version__ = "0.1.0"
