"""Rank-k numerical ranges of complex matrices via the Kippenhahn curve."""

__all__ = ["__version__"]
__version__ = "0.1.0"
