"""Bipartite state families and partial-transpose classification.

Provides the two-qudit permutation-symmetric family built from the swap
operator, the 3x3 bound-entangled family, seeded random density operators,
and the PPT/NPT decision with its eigenvalue margin.
"""

from __future__ import annotations

import numpy as np

from .config import DEFAULT_TOL
from .linalg import Dims, hermitize, kron, min_eig, partial_transpose


def swap_operator(d: int) -> np.ndarray:
    """Swap |ij> -> |ji> on a d x d system."""
    f = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            f[i * d + j, j * d + i] = 1.0
    return f


def werner(d: int, beta: float) -> np.ndarray:
    """Swap-invariant family (I + beta * F) / (d^2 + d beta) on d x d.

    Separable exactly for beta >= -1/d; NPT below that.
    """
    if d not in (2, 3):
        raise ValueError(f"unsupported dimension {d}")
    if not -1.0 <= beta <= 1.0:
        raise ValueError(f"beta={beta} outside [-1, 1]")
    f = swap_operator(d)
    return (np.eye(d * d) + beta * f) / (d * d + d * beta)


def horodecki(lam: float) -> np.ndarray:
    """3x3 family interpolating separable, bound-entangled and NPT regions.

    rho = (2/7) P+ + (lam/7) s+ + ((5-lam)/7) s-  with  2 <= lam <= 5,
    where P+ projects onto the maximally entangled vector and s+/s- are the
    cyclic classical states on |01>,|12>,|20| and |10>,|21>,|02>.
    Separable for lam <= 3, bound entangled for 3 < lam <= 4, NPT above 4.
    """
    if not 2.0 <= lam <= 5.0:
        raise ValueError(f"lambda={lam} outside [2, 5]")
    d = 3
    phi = np.zeros(d * d)
    for i in range(d):
        phi[i * d + i] = 1.0
    phi /= np.sqrt(d)
    p_plus = np.outer(phi, phi)

    def basis_proj(i: int, j: int) -> np.ndarray:
        v = np.zeros(d * d)
        v[i * d + j] = 1.0
        return np.outer(v, v)

    sig_plus = (basis_proj(0, 1) + basis_proj(1, 2) + basis_proj(2, 0)) / 3
    sig_minus = (basis_proj(1, 0) + basis_proj(2, 1) + basis_proj(0, 2)) / 3
    return (2 / 7) * p_plus + (lam / 7) * sig_plus + ((5 - lam) / 7) * sig_minus


def random_density(d: int, rank: int, seed: int) -> np.ndarray:
    """Seeded random density operator G G^dag / Tr(G G^dag), G complex Gaussian d x rank."""
    if not 1 <= rank <= d:
        raise ValueError(f"rank {rank} outside [1, {d}]")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = g @ g.conj().T
    return hermitize(rho / np.trace(rho).real)


def random_npt_state(dims: Dims, seed: int, max_draws: int = 10_000) -> np.ndarray:
    """Rejection-sample full-rank random states until one has NPT margin below -1e-8."""
    da, db = dims
    d = da * db
    seq = np.random.SeedSequence(seed)
    for child in seq.spawn(max_draws):
        rho = random_density(d, d, child.generate_state(1)[0])
        if min_eig(partial_transpose(rho, dims)) < -1e-8:
            return rho
    raise RuntimeError(f"no NPT state found in {max_draws} draws (dims {dims})")


def random_separable(dims: Dims, seed: int, num_terms: int | None = None) -> np.ndarray:
    """Seeded convex mixture of random pure product states (separable by construction)."""
    da, db = dims
    rng = np.random.default_rng(seed)
    k = num_terms if num_terms is not None else da * da * db * db
    weights = rng.dirichlet(np.ones(k))
    rho = np.zeros((da * db, da * db), dtype=complex)
    for w in weights:
        a = rng.standard_normal(da) + 1j * rng.standard_normal(da)
        b = rng.standard_normal(db) + 1j * rng.standard_normal(db)
        v = kron(a / np.linalg.norm(a), b / np.linalg.norm(b))
        rho += w * np.outer(v, v.conj())
    return hermitize(rho)


def classify_ppt(rho: np.ndarray, dims: Dims) -> tuple[str, float]:
    """Peres-Horodecki test: ("NPT"|"PPT", margin).

    The margin is the smallest eigenvalue of the partial transpose; the state
    is declared NPT when it falls below the configured cutoff.
    """
    margin = min_eig(partial_transpose(rho, dims))
    label = "NPT" if margin < DEFAULT_TOL.npt_margin else "PPT"
    return label, margin
