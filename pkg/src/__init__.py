"""biwave: bi-orthogonal wavelet transform for non-admissible wavelets and the relativistic hydrogen atom."""

from src.__version__ import __version__

__all__ = ["__version__"]
