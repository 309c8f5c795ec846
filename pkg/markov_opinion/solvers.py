import logging

import numpy as np
import scipy.linalg
from scipy import sparse
from scipy.integrate import solve_ivp
from scipy.sparse.linalg import lsqr
from scipy.stats import poisson

from markov_opinion.exceptions import SingularSystem, ToleranceNotMet, InvalidTimeGrid

TRANSIENT_RTOL = 1e-8
TRANSIENT_ATOL = 1e-10

# generators up to this many states are solved by dense LU, larger ones by sparse least squares
DENSE_STATIONARY_LIMIT = 4096

# lsqr stop reason when iter_lim was reached
LSQR_ITERATION_LIMIT = 7

_logger = logging.getLogger(__name__)


def check_time_grid(t_grid) -> np.ndarray:
    t_grid = np.atleast_1d(np.asarray(t_grid, dtype=float))

    if t_grid.ndim != 1 or t_grid.size == 0:
        raise InvalidTimeGrid("Time grid must be a non-empty list of times")
    if not np.all(np.isfinite(t_grid)) or t_grid[0] < 0:
        raise InvalidTimeGrid("Time grid must start at t >= 0 and be finite")
    if np.any(np.diff(t_grid) <= 0):
        raise InvalidTimeGrid("Time grid must be strictly increasing")

    return t_grid


def integrate_linear(operator, y0: np.ndarray, t_grid, offset: np.ndarray = None,
                     rtol: float = TRANSIENT_RTOL, atol: float = TRANSIENT_ATOL) -> np.ndarray:
    """ Integrate dy/dt = operator @ y (+ offset) from y(0) = y0 with adaptive RK45.
    Returns one row per time in `t_grid`. """
    t_grid = check_time_grid(t_grid)
    y0 = np.asarray(y0, dtype=float)

    if t_grid[-1] == 0:
        return np.tile(y0, (t_grid.size, 1))

    if offset is None:
        def rhs(t, y):
            return operator @ y
    else:
        def rhs(t, y):
            return operator @ y + offset

    solution = solve_ivp(rhs, (0.0, t_grid[-1]), y0, method='RK45', t_eval=t_grid, rtol=rtol, atol=atol)
    if not solution.success:
        raise ToleranceNotMet("Integrator failed: %s" % solution.message)

    _logger.debug("RK45 took %s right-hand side evaluations" % solution.nfev)

    trajectory = solution.y.T.copy()
    trajectory[t_grid == 0] = y0
    return trajectory


def stationary_distribution(generator, residual_tol: float = 1e-10, iter_lim: int = None) -> np.ndarray:
    """ Solve G^T p = 0, sum(p) = 1 for a generator G (dense or sparse).

    Up to DENSE_STATIONARY_LIMIT states the last balance equation is replaced by the
    normalization row and the square system is solved by LU; larger chains solve the
    augmented least-squares system with at most `iter_lim` (default 50 n) iterations. """
    n = generator.shape[0]
    rhs = np.zeros(n)

    if n <= DENSE_STATIONARY_LIMIT:
        system = generator.T.toarray() if sparse.issparse(generator) else np.array(generator, dtype=float).T
        system[-1, :] = 1.0
        rhs[-1] = 1.0
        try:
            p = scipy.linalg.solve(system, rhs)
        except (np.linalg.LinAlgError, ValueError) as e:
            raise SingularSystem("Stationary solve failed: %s" % e)
    else:
        iter_lim = 50 * n if iter_lim is None else iter_lim
        augmented = sparse.vstack([sparse.csr_matrix(generator).T, sparse.csr_matrix(np.ones((1, n)))]).tocsr()
        p, istop, itn = lsqr(augmented, np.append(rhs, 1.0), atol=1e-14, btol=1e-14, iter_lim=iter_lim)[:3]
        if istop == LSQR_ITERATION_LIMIT:
            raise SingularSystem("Least-squares stationary solve stopped at the iteration limit (%s)" % itn)

    if not np.all(np.isfinite(p)):
        raise SingularSystem("Stationary solve produced non-finite values")

    scale = max(1.0, _inf_norm(generator))
    residual = float(np.max(np.abs(generator.T @ p)))
    if residual > residual_tol * scale:
        raise SingularSystem("Stationary residual %.3e exceeds %.1e" % (residual, residual_tol * scale))

    if np.min(p) < -np.sqrt(np.finfo(float).eps):
        raise SingularSystem("Stationary vector has negative entries, chain is not ergodic")

    return np.clip(p, 0.0, None)


def affine_stationary(operator: np.ndarray, offset: np.ndarray, constraints: np.ndarray,
                      targets: np.ndarray, residual_tol: float = 1e-10) -> np.ndarray:
    """ Solve operator @ x + offset = 0 subject to constraints @ x = targets by least squares
    on the augmented system. """
    system = np.vstack([operator, constraints])
    rhs = np.concatenate([-offset, targets])

    try:
        x, _, rank, _ = scipy.linalg.lstsq(system, rhs)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise SingularSystem("Affine stationary solve failed: %s" % e)

    if rank < operator.shape[1]:
        raise SingularSystem("Affine stationary system has rank %s < %s" % (rank, operator.shape[1]))

    residual = float(np.max(np.abs(system @ x - rhs)))
    if residual > residual_tol * max(1.0, _inf_norm(operator)):
        raise SingularSystem("Affine stationary residual %.3e exceeds tolerance" % residual)

    return x


def uniformized_transient(generator, p0: np.ndarray, t_grid, tol: float = 1e-12) -> np.ndarray:
    """ Transient distributions by uniformization: p(t) = sum_k Poisson(k; Lt) P^k p0
    with P = I + G^T / L and L the largest exit rate. """
    t_grid = check_time_grid(t_grid)
    generator = sparse.csr_matrix(generator)
    p0 = np.asarray(p0, dtype=float)

    uniform_rate = float(np.max(-generator.diagonal()))
    if uniform_rate <= 0:
        return np.tile(p0, (t_grid.size, 1))
    jump = (sparse.identity(generator.shape[0], format='csr') + generator.T / uniform_rate).tocsr()

    horizon = uniform_rate * t_grid[-1]
    n_terms = int(poisson.ppf(1.0 - tol, horizon)) + 10 if horizon > 0 else 1

    trajectory = np.zeros((t_grid.size, p0.size))
    term = p0.copy()
    for k in range(n_terms + 1):
        trajectory += np.outer(poisson.pmf(k, uniform_rate * t_grid), term)
        term = jump @ term

    return trajectory


def _inf_norm(matrix) -> float:
    if sparse.issparse(matrix):
        return float(abs(matrix).sum(axis=1).max())
    return float(np.max(np.sum(np.abs(matrix), axis=1)))
