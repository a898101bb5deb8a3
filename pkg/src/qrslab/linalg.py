"""Dense complex linear algebra shared by every sampling scheme.

Matrices are plain ``numpy.ndarray`` objects with ``complex128`` entries.
This module provides the random-matrix ensembles (Ginibre, Haar), the
row/column repetition primitive used to carve outcome submatrices out of an
interferometer unitary, and the JSON fixture format for matrix exchange.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import SizeLimitError  # noqa: F401  (re-exported for convenience)
from .rng import RngStream

__all__ = [
    "ginibre_matrix",
    "haar_unitary",
    "submatrix",
    "unitarity_defect",
    "require_unitary",
    "require_finite",
    "matrix_to_json",
    "matrix_from_json",
]

UNITARITY_TOL = 1e-12


def require_finite(a: np.ndarray) -> np.ndarray:
    """Return `a` as a complex128 array, rejecting NaN/Inf entries."""
    a = np.asarray(a, dtype=np.complex128)
    if a.size and not np.all(np.isfinite(a.view(np.float64))):
        raise ValueError("matrix contains non-finite entries")
    return a


def ginibre_matrix(n: int, m: int, sigma: float, rng: RngStream) -> np.ndarray:
    """Draw an n x m matrix of i.i.d. complex normals with mean 0 and E|z|^2 = sigma^2.

    Real and imaginary parts each carry variance sigma^2 / 2. Zero dimensions
    give an empty matrix.
    """
    if n < 0 or m < 0:
        raise ValueError("dimensions must be non-negative")
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    scale = sigma / np.sqrt(2.0)
    re = rng.normal(0.0, scale, size=(n, m))
    im = rng.normal(0.0, scale, size=(n, m))
    return re + 1j * im


def haar_unitary(d: int, rng: RngStream) -> np.ndarray:
    """Draw a d x d unitary from the Haar measure on U(d).

    QR-factorizes a Ginibre matrix and rescales Q by the phases of diag(R);
    without that correction the QR output is not Haar distributed.
    """
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    z = ginibre_matrix(d, d, 1.0, rng)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    q = q * (diag / np.abs(diag))
    return q


def unitarity_defect(u: np.ndarray) -> float:
    """Max-norm deviation of U†U from the identity."""
    u = np.asarray(u, dtype=np.complex128)
    d = u.shape[0]
    return float(np.max(np.abs(u.conj().T @ u - np.eye(d))))


def require_unitary(u: np.ndarray, tol: float = UNITARITY_TOL) -> np.ndarray:
    u = require_finite(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(f"unitary must be square, got shape {u.shape}")
    defect = unitarity_defect(u)
    if defect > tol:
        raise ValueError(f"matrix is not unitary: defect {defect:.3e} > {tol:.0e}")
    return u


def submatrix(a: np.ndarray, row_pattern: Sequence[int], col_pattern: Sequence[int]) -> np.ndarray:
    """Repeat row j of `a` row_pattern[j] times and column k col_pattern[k] times.

    Index order is preserved, so an all-ones pattern returns `a` itself and an
    all-zero pattern returns a 0 x 0 matrix (whose permanent and Hafnian are 1
    by the empty-product convention).
    """
    a = np.asarray(a, dtype=np.complex128)
    row_pattern = np.asarray(row_pattern, dtype=np.int64)
    col_pattern = np.asarray(col_pattern, dtype=np.int64)
    if row_pattern.shape != (a.shape[0],):
        raise ValueError(f"row pattern length {row_pattern.shape} does not match {a.shape[0]} rows")
    if col_pattern.shape != (a.shape[1],):
        raise ValueError(f"col pattern length {col_pattern.shape} does not match {a.shape[1]} cols")
    if np.any(row_pattern < 0) or np.any(col_pattern < 0):
        raise ValueError("patterns must be non-negative")
    rows = np.repeat(np.arange(a.shape[0]), row_pattern)
    cols = np.repeat(np.arange(a.shape[1]), col_pattern)
    return a[np.ix_(rows, cols)]


def matrix_to_json(a: np.ndarray) -> dict:
    """Serialize a matrix as {rows, cols, re, im} with row-major entry lists."""
    a = np.asarray(a, dtype=np.complex128)
    return {
        "rows": int(a.shape[0]),
        "cols": int(a.shape[1]),
        "re": [float(x) for x in a.real.ravel()],
        "im": [float(x) for x in a.imag.ravel()],
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    rows, cols = int(obj["rows"]), int(obj["cols"])
    re = np.asarray(obj["re"], dtype=np.float64).reshape(rows, cols)
    im = np.asarray(obj["im"], dtype=np.float64).reshape(rows, cols)
    return require_finite(re + 1j * im)
