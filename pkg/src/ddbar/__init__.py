"""Exact cohomology of finite double complexes from weighted exterior algebras."""

from ddbar.scalars import G, GaussianRational

__all__ = ["G", "GaussianRational"]
__version__ = "0.1.0"
