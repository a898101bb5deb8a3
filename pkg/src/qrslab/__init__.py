"""qrslab: a desk-scale laboratory for quantum random sampling.

Generate random circuit instances (universal grid circuits, IQP families,
Fock and Gaussian boson sampling), compute their exact output probabilities
through independent routes, draw samples with exact and approximate
strategies, and score the samples with a verification battery.
"""

from ._kernels import BACKEND as kernel_backend
from .errors import DataError, SizeLimitError
from .rng import RngStream

__all__ = ["RngStream", "SizeLimitError", "DataError", "kernel_backend"]
__version__ = "0.1.0"
