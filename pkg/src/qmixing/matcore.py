"""Dense complex linear-algebra kernel used by every other module.

Operators are plain numpy arrays, complex128, row-major.  Everything here is
a pure function of its inputs; nothing is cached or mutated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import CapExceededError, NumericalError, ShapeError

# Largest dense matrix side the toolkit will allocate.  Superoperators of
# d <= 64 (up to six qubits) fit; anything larger must go through a
# closed-form path.
DESK_SCALE_CAP = 4096

# Default tolerances: equality-style checks and backward-error style checks.
DEFAULT_TOL = 1e-9
DEFAULT_BACKWARD_TOL = 1e-12


def as_cmatrix(entries, name: str = "matrix") -> np.ndarray:
    """Coerce input to a finite 2-D complex128 array."""
    A = np.asarray(entries, dtype=np.complex128)
    if A.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got ndim={A.ndim}")
    if A.size and not np.isfinite(A).all():
        raise ShapeError(f"{name} contains non-finite entries")
    return A


def require_square(A: np.ndarray, name: str = "matrix") -> np.ndarray:
    if A.shape[0] != A.shape[1]:
        raise ShapeError(f"{name} must be square, got shape {A.shape}")
    return A


def check_cap(side: int, cap: int = DESK_SCALE_CAP) -> None:
    if side > cap:
        raise CapExceededError(
            f"matrix side {side} exceeds the desk-scale cap {cap}; "
            "use a closed-form path instead of dense matrices"
        )


def dagger(A: np.ndarray) -> np.ndarray:
    return A.conj().T


def herm_part(A: np.ndarray) -> np.ndarray:
    return 0.5 * (A + A.conj().T)


def is_hermitian(A, tol: float = 1e-10) -> bool:
    A = as_cmatrix(A)
    if A.shape[0] != A.shape[1]:
        return False
    scale = max(1.0, float(np.abs(A).max()) if A.size else 0.0)
    return bool(np.abs(A - A.conj().T).max() <= tol * scale) if A.size else True


def mat_exp(A, t: float = 1.0) -> np.ndarray:
    """exp(t*A) by scaling-and-squaring with a degree-13 Pade approximant."""
    A = require_square(as_cmatrix(A))
    t = float(t)
    if not np.isfinite(t):
        raise ShapeError("time parameter must be finite")
    check_cap(A.shape[0])
    return scipy.linalg.expm(t * A)


def trace_norm(A) -> float:
    """Sum of singular values, ||A||_1 = tr sqrt(A^dag A)."""
    A = require_square(as_cmatrix(A))
    if A.size == 0:
        return 0.0
    return float(np.linalg.svd(A, compute_uv=False).sum())


def operator_norm(A) -> float:
    """Largest singular value."""
    A = as_cmatrix(A)
    if A.size == 0:
        return 0.0
    return float(np.linalg.svd(A, compute_uv=False)[0])


def kron(A, B) -> np.ndarray:
    """Kronecker product, standard row-major block convention."""
    A = as_cmatrix(A, "left factor")
    B = as_cmatrix(B, "right factor")
    check_cap(A.shape[0] * B.shape[0])
    check_cap(A.shape[1] * B.shape[1])
    return np.kron(A, B)


@dataclass
class EigenSystem:
    """Eigendata with an explicit accuracy certificate.

    right_vectors holds unit-norm eigenvectors as columns; residual is
    max_j ||A v_j - lambda_j v_j||_2 over the columns.
    """

    eigenvalues: np.ndarray
    right_vectors: np.ndarray
    residual: float


def eig(A, tol: float | None = None) -> EigenSystem:
    """Eigendecomposition via the LAPACK Schur-reduction solver.

    The attained residual is always reported.  If ``tol`` is given and the
    residual exceeds it, a NumericalError carrying the residual is raised
    instead of returning silently inaccurate eigendata.
    """
    A = require_square(as_cmatrix(A))
    check_cap(A.shape[0])
    if A.size == 0:
        return EigenSystem(np.zeros(0, complex), np.zeros((0, 0), complex), 0.0)
    w, V = scipy.linalg.eig(A)
    R = A @ V - V * w[np.newaxis, :]
    residual = float(np.linalg.norm(R, axis=0).max())
    if tol is not None and residual > tol:
        raise NumericalError(
            f"eigendecomposition residual {residual:.3e} above tolerance {tol:.3e}"
        )
    return EigenSystem(eigenvalues=w, right_vectors=V, residual=residual)


def ginibre(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    """Complex Gaussian matrix, entries N(0,1) + i N(0,1)."""
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
