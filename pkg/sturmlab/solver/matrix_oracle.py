"""
Finite-difference matrix oracle
Symmetric tridiagonal H = -d2/dx2 + V on interior points; eigenvalues by
Sturm-sequence bisection, eigenvectors by inverse iteration
"""

import logging
from typing import List, Tuple

import numpy as np
from scipy.linalg import eigh_tridiagonal, solve_banded

from ..config.app import get_tolerances
from ..errors import ConvergenceError, InvalidParameterError
from .grid import Eigenpair, Grid, normalize_and_fix_sign

logger = logging.getLogger(__name__)

SOLVER_TAG = "matrix_oracle"
INVERSE_ITERATIONS = 10
REORTHOGONALIZE_SPACING = 1e-8


def tridiagonal_operator(grid: Grid) -> Tuple[np.ndarray, np.ndarray]:
    """Diagonal 2/dx^2 + V_i and off-diagonal -1/dx^2 on the interior points"""
    inv_dx2 = 1.0 / (grid.dx * grid.dx)
    diag = 2.0 * inv_dx2 + grid.v[1:-1]
    off = np.full(len(diag) - 1, -inv_dx2)
    return diag, off


def sturm_count(diag: np.ndarray, off: np.ndarray, lam: float) -> int:
    """
    Number of eigenvalues of the symmetric tridiagonal matrix below lam,
    counted as negative pivots of the LDL^T factorisation of T - lam*I
    """
    diag = np.asarray(diag, dtype=float).tolist()
    off2 = (np.asarray(off, dtype=float) ** 2).tolist()
    tiny = np.finfo(float).tiny
    count = 0
    q = diag[0] - lam
    for i in range(len(diag)):
        if i > 0:
            q = (diag[i] - lam) - off2[i - 1] / q
        if q == 0.0:
            q = -tiny  # zero pivot counts as an eigenvalue at lam
        if q < 0.0:
            count += 1
    return count


def _inverse_iteration(diag: np.ndarray, off: np.ndarray, lam: float, seed: int,
                       previous: List[np.ndarray], scale: float) -> np.ndarray:
    """Eigenvector for lam by shifted inverse iteration"""
    m = len(diag)
    if m == 1:
        return np.ones(1)

    shift = lam + 8.0 * np.finfo(float).eps * scale
    banded = np.zeros((3, m))
    banded[0, 1:] = off
    banded[1, :] = diag - shift
    banded[2, :-1] = off

    rng = np.random.default_rng(seed)
    vec = rng.standard_normal(m)
    vec /= np.linalg.norm(vec)

    for iteration in range(INVERSE_ITERATIONS):
        nxt = solve_banded((1, 1), banded, vec)
        for other in previous:
            nxt -= np.dot(other, nxt) * other
        growth = np.linalg.norm(nxt)
        if not np.isfinite(growth) or growth == 0.0:
            raise ConvergenceError("Inverse iteration broke down",
                                   {"lambda": lam, "iteration": iteration})
        nxt /= growth
        if np.dot(nxt, vec) < 0:
            nxt = -nxt
        change = np.linalg.norm(nxt - vec)
        vec = nxt
        if change < 1e-14 * np.sqrt(m):
            break

    logger.debug(f"Inverse iteration for lambda={lam!r}: {iteration + 1} step(s)")
    return vec


def _flush_left_tail(psi: np.ndarray) -> np.ndarray:
    """Zero the samples before the first one above the noise floor so the sign is set by the bulk"""
    floor = get_tolerances().noise_floor * float(np.max(np.abs(psi)))
    significant = np.flatnonzero(np.abs(psi) > floor)
    if len(significant):
        psi[:significant[0]] = 0.0
    return psi


def matrix_oracle(grid: Grid, k: int) -> List[Eigenpair]:
    """
    Lowest k eigenpairs of the second-order finite-difference operator
    Eigenvectors are embedded with wall zeros, normalised and sign-fixed
    """
    interior = grid.n_points - 2
    if isinstance(k, bool) or int(k) != k or not 1 <= k <= interior:
        raise InvalidParameterError("State count out of range for the matrix oracle",
                                    {"k": k, "interior_points": interior})
    k = int(k)

    diag, off = tridiagonal_operator(grid)
    if interior == 1:
        energies = diag.copy()
    else:
        energies = eigh_tridiagonal(diag, off, eigvals_only=True, select='i',
                                    select_range=(0, k - 1), lapack_driver='stebz',
                                    tol=2.0 * np.finfo(float).tiny)

    upper = energies[-1] + 1e-8 * max(1.0, abs(energies[-1]))
    certified = sturm_count(diag, off, upper)
    if certified != k:
        logger.warning(f"Sturm count {certified} below {upper!r} differs from k={k}")

    scale = float(np.max(np.abs(diag)) + 2.0 * (np.max(np.abs(off)) if len(off) else 0.0))
    vectors: List[np.ndarray] = []
    pairs: List[Eigenpair] = []
    for j, lam in enumerate(energies):
        close = [vectors[i] for i in range(j)
                 if abs(lam - energies[i]) < REORTHOGONALIZE_SPACING * scale]
        vec = _inverse_iteration(diag, off, float(lam), seed=j, previous=close, scale=scale)
        vectors.append(vec)

        psi = np.zeros(grid.n_points)
        psi[1:-1] = vec
        psi = _flush_left_tail(psi)
        pairs.append(Eigenpair(n=j + 1, energy=float(lam),
                               psi=normalize_and_fix_sign(psi, grid),
                               grid=grid, solver_tag=SOLVER_TAG))

    logger.info(f"Matrix oracle: {k} state(s) on a={grid.a:g} with {grid.n_points} points")
    return pairs
