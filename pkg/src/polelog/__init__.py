"""Exact computations around the pole order spectral sequence, logarithmic
forms and the logarithmic comparison theorem."""

from .linalg import GF, QQ, Field
from .parser import parse_poly
from .poly import Poly, WeightVector
from .spectral import SpectralTable, ss_pages

__version__ = "0.1.0"

__all__ = ["GF", "QQ", "Field", "Poly", "WeightVector", "parse_poly", "SpectralTable", "ss_pages"]
