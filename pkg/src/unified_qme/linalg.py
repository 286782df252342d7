"""Dense matrix and superoperator kernel.

Superoperators act on column-stacked density matrices, ``vec(rho) =
rho.reshape(-1, order="F")``, so that ``vec(A @ rho @ B) = kron(B.T, A) @
vec(rho)``.  Every superoperator in the package is assembled through the
``lift_*`` helpers below; the stacking convention lives only here.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

__all__ = [
    "InvariantError",
    "as_square",
    "as_hermitian",
    "as_density_matrix",
    "is_hermitian",
    "hermitian_eig",
    "matrix_exp",
    "trace_norm",
    "trace_distance",
    "vec",
    "unvec",
    "lift_left",
    "lift_right",
    "lift_commutator",
    "lift_sandwich",
    "apply_super",
]


class InvariantError(ValueError):
    """Raised when an input violates a structural invariant (shape, Hermiticity, ...)."""


def as_square(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvariantError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvariantError("matrix has non-finite entries")
    return a


def is_hermitian(m, rtol: float = 1e-12) -> bool:
    a = np.asarray(m)
    scale = np.max(np.abs(a)) if a.size else 0.0
    return bool(np.max(np.abs(a - a.conj().T), initial=0.0) <= rtol * max(scale, 1e-300))


def as_hermitian(m, rtol: float = 1e-12) -> np.ndarray:
    """Validate ``m`` as a Hermitian operator and return it as a complex array."""
    a = as_square(m)
    if not is_hermitian(a, rtol):
        dev = np.max(np.abs(a - a.conj().T))
        raise InvariantError(f"operator is not Hermitian (max |M - M^dag| = {dev:.3e})")
    return a


def as_density_matrix(m, atol: float = 1e-10) -> np.ndarray:
    """Validate ``m`` as a density matrix: Hermitian, unit trace, positive."""
    a = as_square(m)
    if np.max(np.abs(a - a.conj().T)) > atol:
        raise InvariantError("density matrix is not Hermitian")
    tr = np.trace(a)
    if abs(tr - 1.0) > atol:
        raise InvariantError(f"density matrix trace is {tr.real:.12g}, expected 1")
    lam_min = np.linalg.eigvalsh(0.5 * (a + a.conj().T))[0]
    if lam_min < -atol:
        raise InvariantError(f"density matrix has negative eigenvalue {lam_min:.3e}")
    return a


def hermitian_eig(h, group_tol: float = 0.0) -> list[tuple[float, np.ndarray]]:
    """Eigen-decompose a Hermitian matrix into distinct levels and projectors.

    Eigenvalues are sorted ascending and merged by single linkage: a run of
    eigenvalues whose consecutive gaps are all ``<= group_tol`` becomes one
    level whose value is the degeneracy-weighted mean and whose projector is
    the sum of the individual rank-one projectors.

    Parameters
    ----------
    h : array_like (d, d)
        Hermitian matrix.
    group_tol : float
        Merging threshold in the units of ``h``.

    Returns
    -------
    list of (float, ndarray)
        ``(eigenvalue, projector)`` pairs, eigenvalues strictly increasing.
    """
    if group_tol < 0:
        raise ValueError("group_tol must be non-negative")
    h = as_hermitian(h)
    w, v = np.linalg.eigh(0.5 * (h + h.conj().T))
    groups: list[list[int]] = [[0]]
    for k in range(1, len(w)):
        if w[k] - w[k - 1] <= group_tol:
            groups[-1].append(k)
        else:
            groups.append([k])
    levels = []
    for idx in groups:
        vecs = v[:, idx]
        levels.append((float(np.mean(w[idx])), vecs @ vecs.conj().T))
    return levels


def matrix_exp(m) -> np.ndarray:
    """Matrix exponential (scaling and squaring with Pade approximants)."""
    return scipy.linalg.expm(as_square(m))


def trace_norm(m) -> float:
    """Sum of singular values."""
    return float(np.sum(np.linalg.svd(np.asarray(m, dtype=complex), compute_uv=False)))


def trace_distance(a, b) -> float:
    """Half the trace norm of ``a - b``."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise InvariantError(f"dimension mismatch: {a.shape} vs {b.shape}")
    diff = a - b
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (diff + diff.conj().T)))))


def vec(rho) -> np.ndarray:
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v, dim: int | None = None) -> np.ndarray:
    v = np.asarray(v)
    if dim is None:
        dim = int(round(np.sqrt(v.size)))
    return v.reshape((dim, dim), order="F")


def _check_pair(a, b):
    a = as_square(a)
    b = as_square(b)
    if a.shape != b.shape:
        raise InvariantError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a, b


def lift_left(a) -> np.ndarray:
    """Superoperator of ``rho -> a @ rho``."""
    a = as_square(a)
    return np.kron(np.eye(a.shape[0]), a)


def lift_right(b) -> np.ndarray:
    """Superoperator of ``rho -> rho @ b``."""
    b = as_square(b)
    return np.kron(b.T, np.eye(b.shape[0]))


def lift_sandwich(a, b) -> np.ndarray:
    """Superoperator of ``rho -> a @ rho @ b``."""
    a, b = _check_pair(a, b)
    return np.kron(b.T, a)


def lift_commutator(h) -> np.ndarray:
    """Superoperator of ``rho -> h @ rho - rho @ h``."""
    return lift_left(h) - lift_right(h)


def apply_super(s, rho) -> np.ndarray:
    """Apply a superoperator to a matrix and return the resulting matrix."""
    rho = np.asarray(rho)
    return unvec(np.asarray(s) @ vec(rho), rho.shape[0])
