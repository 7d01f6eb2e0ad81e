"""Chamber simulator with a learning-based mobile base station controller."""

__version__ = "0.1.0"
