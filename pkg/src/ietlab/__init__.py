"""Exact-arithmetic lab for interval exchanges and their skew products."""

__version__ = "0.1.0"

from .scalar import ExactScalar, scalar

__all__ = ["ExactScalar", "scalar", "__version__"]
