"""Dense complex linear algebra primitives for low-dimensional bipartite operators.

Index convention used everywhere: the product basis label |i, j> of an
A(x)B system maps to the flat index i * dim_b + j (row-major over A, then B),
which matches ``np.kron(op_a, op_b)``.
"""

from __future__ import annotations

import numpy as np

from .config import DEFAULT_TOL, Tolerances

Dims = tuple[int, int]


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two matrices."""
    return np.kron(np.asarray(a), np.asarray(b))


def dagger(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.asarray(a).conj().T


def hermitize(a: np.ndarray) -> np.ndarray:
    """Return the Hermitian part (A + A^dag) / 2."""
    a = np.asarray(a)
    return (a + a.conj().T) / 2


def is_hermitian(a: np.ndarray, tol: float = DEFAULT_TOL.hermiticity) -> bool:
    """Entrywise Hermiticity test against an absolute tolerance."""
    a = np.asarray(a)
    if a.shape[0] != a.shape[1]:
        return False
    return bool(np.max(np.abs(a - a.conj().T)) <= tol)


def check_dims(op: np.ndarray, dims: Dims) -> None:
    """Validate that a square operator matches the declared bipartite split."""
    da, db = dims
    n = op.shape[0]
    if op.shape != (n, n) or da * db != n:
        raise ValueError(f"operator of shape {op.shape} does not match dims {dims}")


def assert_density(rho: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> None:
    """Raise if ``rho`` is not a valid density operator (unit trace, PSD, Hermitian)."""
    if not is_hermitian(rho, 100 * tol.hermiticity):
        raise ValueError("density operator is not Hermitian")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > tol.trace_one:
        raise ValueError(f"density operator has trace {tr}, expected 1")
    lo = float(np.linalg.eigvalsh(hermitize(rho))[0])
    if lo < tol.psd_floor:
        raise ValueError(f"density operator has negative eigenvalue {lo}")


def partial_transpose(op: np.ndarray, dims: Dims, subsystem: str = "B") -> np.ndarray:
    """Transpose the indices of one subsystem only.

    ``subsystem`` is "A" or "B".  The map is an involution and preserves
    Hermiticity; it does not preserve positivity, which is the whole point.
    """
    da, db = dims
    check_dims(op, dims)
    t = np.asarray(op).reshape(da, db, da, db)
    if subsystem == "B":
        t = t.transpose(0, 3, 2, 1)
    elif subsystem == "A":
        t = t.transpose(2, 1, 0, 3)
    else:
        raise ValueError(f"unknown subsystem {subsystem!r}")
    return t.reshape(da * db, da * db)


def partial_trace(op: np.ndarray, dims: Dims, traced: str = "B") -> np.ndarray:
    """Trace out one subsystem, returning the reduced operator on the other."""
    da, db = dims
    check_dims(op, dims)
    t = np.asarray(op).reshape(da, db, da, db)
    if traced == "B":
        return np.trace(t, axis1=1, axis2=3)
    if traced == "A":
        return np.trace(t, axis1=0, axis2=2)
    raise ValueError(f"unknown subsystem {traced!r}")


def hermitian_eigen(op: np.ndarray, tol: float = 1e-10) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns eigenvalues in ascending order and the matching orthonormal
    eigenvector columns.  Rejects inputs that are not Hermitian within ``tol``.
    """
    op = np.asarray(op)
    if not is_hermitian(op, tol):
        raise ValueError("matrix is not Hermitian within tolerance")
    vals, vecs = np.linalg.eigh(hermitize(op))
    return vals, vecs


def hs_inner(a: np.ndarray, b: np.ndarray) -> float:
    """Hilbert-Schmidt inner product Tr(a b), real for Hermitian inputs."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    return float(np.trace(a @ b).real)


def min_eig(op: np.ndarray) -> float:
    """Smallest eigenvalue of a (numerically) Hermitian matrix."""
    return float(np.linalg.eigvalsh(hermitize(op))[0])


def hermitian_basis(n: int) -> list[np.ndarray]:
    """Orthonormal basis of the n x n Hermitian space w.r.t. Tr(AB)."""
    out = []
    for i in range(n):
        m = np.zeros((n, n), dtype=complex)
        m[i, i] = 1
        out.append(m)
    for i in range(n):
        for j in range(i + 1, n):
            m = np.zeros((n, n), dtype=complex)
            m[i, j] = m[j, i] = 1 / np.sqrt(2)
            out.append(m)
            m = np.zeros((n, n), dtype=complex)
            m[i, j] = -1j / np.sqrt(2)
            m[j, i] = 1j / np.sqrt(2)
            out.append(m)
    return out


def herm_coords(m: np.ndarray) -> np.ndarray:
    """Real coordinates of a Hermitian matrix (isometric: dots match Tr(AB))."""
    n = m.shape[0]
    iu = np.triu_indices(n, 1)
    return np.concatenate([np.diag(m).real, np.sqrt(2) * m[iu].real, np.sqrt(2) * m[iu].imag])


def herm_from_coords(v: np.ndarray, n: int) -> np.ndarray:
    """Inverse of :func:`herm_coords`."""
    m = np.zeros((n, n), dtype=complex)
    iu = np.triu_indices(n, 1)
    m[np.arange(n), np.arange(n)] = v[:n]
    k = n * (n - 1) // 2
    upper = (v[n:n + k] + 1j * v[n + k:]) / np.sqrt(2)
    m[iu] = upper
    m[iu[1], iu[0]] = upper.conj()
    return m
