"""Small dense linear programming.

``solve_lp`` runs a primal-dual path-following interior-point method
(Mehrotra predictor-corrector) on the homogeneous self-dual embedding of the
standard form ``min c.x  s.t.  A x = b, x >= 0``.  The embedding yields
infeasibility and unboundedness certificates without a phase-one problem.
Normal equations are solved by dense Cholesky with iterative refinement; the
problem sizes targeted here are a few dozen variables and constraints.

When the optimal face is not a single vertex the iterates converge toward its
analytic center, so no particular vertex is favoured.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

TOL = 1e-8
MAX_ITER = 200
STEP_FRACTION = 0.99995
STALL_FACTOR = 1e4  # stop once residuals grow this far past the best seen
NEAR = 1e-6  # residual level below which a blow-up counts as a stall
REG = 1e-14  # relative diagonal shift applied before Cholesky
RAY_TOL = 1e-6  # ray quality accepted once tau has collapsed
REFINE = 2  # iterative refinement sweeps per normal-equation solve
POLISH = 3  # extra iterations once converged; the best certified iterate is returned


class LPStatus(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    NUMERICAL_FAILURE = "numerical_failure"


Bound = Tuple[Optional[float], Optional[float]]


def _matrix(a, ncols):
    if a is None:
        return np.zeros((0, ncols))
    a = np.asarray(a, dtype=float)
    if a.ndim == 1:
        a = a.reshape(1, -1)
    return a


def _vector(v, size):
    if v is None:
        return np.zeros(size)
    return np.atleast_1d(np.asarray(v, dtype=float))


@dataclass
class LPProblem:
    """``min c.x`` subject to ``A_eq x = b_eq``, ``A_ub x <= b_ub`` and bounds.

    ``bounds`` holds one ``(lower, upper)`` pair per variable; ``None`` means
    unbounded on that side.  Missing bounds default to ``(0, None)``.
    """

    c: np.ndarray
    A_eq: Optional[np.ndarray] = None
    b_eq: Optional[np.ndarray] = None
    A_ub: Optional[np.ndarray] = None
    b_ub: Optional[np.ndarray] = None
    bounds: Optional[Sequence[Bound]] = None

    def __post_init__(self):
        self.c = np.atleast_1d(np.asarray(self.c, dtype=float))
        n = len(self.c)
        self.A_eq = _matrix(self.A_eq, n)
        self.b_eq = _vector(self.b_eq, self.A_eq.shape[0])
        self.A_ub = _matrix(self.A_ub, n)
        self.b_ub = _vector(self.b_ub, self.A_ub.shape[0])
        if self.bounds is None:
            self.bounds = [(0.0, None)] * n
        elif len(self.bounds) != n:
            raise ValueError(f"expected {n} bounds, got {len(self.bounds)}")
        lo = np.array([-np.inf if b[0] is None else b[0] for b in self.bounds], dtype=float)
        hi = np.array([np.inf if b[1] is None else b[1] for b in self.bounds], dtype=float)
        self.lower, self.upper = lo, hi

        for name, mat, rhs in (("eq", self.A_eq, self.b_eq), ("ub", self.A_ub, self.b_ub)):
            if mat.shape[1] != n:
                raise ValueError(f"A_{name} has {mat.shape[1]} columns, expected {n}")
            if mat.shape[0] != len(rhs):
                raise ValueError(f"A_{name} has {mat.shape[0]} rows but b_{name} has {len(rhs)}")
        for arr in (self.c, self.A_eq, self.b_eq, self.A_ub, self.b_ub):
            if not np.all(np.isfinite(arr)):
                raise ValueError("LP data must be finite")
        if np.any(np.isnan(lo)) or np.any(np.isnan(hi)) or np.any(lo > hi):
            raise ValueError("inconsistent variable bounds")

    @property
    def n(self) -> int:
        return len(self.c)


@dataclass
class LPSolution:
    x: np.ndarray
    objective: float
    status: LPStatus
    iterations: int
    primal_residual: float = np.nan
    dual_residual: float = np.nan
    gap: float = np.nan
    certificate: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def optimal(self) -> bool:
        return self.status is LPStatus.OPTIMAL


@dataclass
class _StandardForm:
    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    offset_x: np.ndarray  # x = offset_x + T @ x_std[:T.shape[1]]
    T: np.ndarray
    offset_obj: float


def _standardize(lp: LPProblem) -> _StandardForm:
    n = lp.n
    cols = []          # columns of T
    upper_rows = []    # (column index in T, upper - lower)
    x0 = np.zeros(n)
    for j in range(n):
        lo, hi = lp.lower[j], lp.upper[j]
        e = np.zeros(n)
        e[j] = 1.0
        if np.isfinite(lo):
            x0[j] = lo
            cols.append(e)
            if np.isfinite(hi):
                upper_rows.append((len(cols) - 1, hi - lo))
        elif np.isfinite(hi):
            x0[j] = hi
            cols.append(-e)
        else:
            cols.append(e)
            cols.append(-e)
    T = np.array(cols).T.reshape(n, len(cols))
    k = T.shape[1]
    m_eq, m_ub, m_up = lp.A_eq.shape[0], lp.A_ub.shape[0], len(upper_rows)

    A_eq = lp.A_eq @ T
    b_eq = lp.b_eq - lp.A_eq @ x0
    A_eq, b_eq, consistent = _drop_dependent_rows(A_eq, b_eq)
    if not consistent:
        raise _Infeasible()
    m_eq = A_eq.shape[0]

    n_std = k + m_ub + m_up
    A = np.zeros((m_eq + m_ub + m_up, n_std))
    b = np.zeros(m_eq + m_ub + m_up)
    A[:m_eq, :k] = A_eq
    b[:m_eq] = b_eq
    A[m_eq:m_eq + m_ub, :k] = lp.A_ub @ T
    A[m_eq:m_eq + m_ub, k:k + m_ub] = np.eye(m_ub)
    b[m_eq:m_eq + m_ub] = lp.b_ub - lp.A_ub @ x0
    for row, (col, width) in enumerate(upper_rows):
        r = m_eq + m_ub + row
        A[r, col] = 1.0
        A[r, k + m_ub + row] = 1.0
        b[r] = width
    c = np.zeros(n_std)
    c[:k] = T.T @ lp.c
    return _StandardForm(A=A, b=b, c=c, offset_x=x0, T=T, offset_obj=float(lp.c @ x0))


class _Infeasible(Exception):
    pass


def _drop_dependent_rows(A, b, rtol=1e-10):
    """Remove linearly dependent equality rows; report whether they were consistent."""
    basis = []
    keep = []
    for i, row in enumerate(A):
        norm = np.linalg.norm(row)
        if norm == 0.0:
            if abs(b[i]) > rtol * (1.0 + abs(b[i])) * 10:
                return A, b, False
            continue
        res = row.copy()
        for _ in range(2):  # re-orthogonalize once
            for q in basis:
                res -= (res @ q) * q
        rn = np.linalg.norm(res)
        if rn > rtol * norm:
            basis.append(res / rn)
            keep.append(i)
        else:
            w = np.linalg.lstsq(A[keep].T, row, rcond=None)[0]
            if abs(w @ b[keep] - b[i]) > 1e-9 * (1.0 + abs(b[i])):
                return A, b, False
    return A[keep], b[keep], True


def _factor(M):
    """Cholesky factor of ``M``, with a tiny diagonal shift if it is not positive definite."""
    shift = REG * max(float(np.max(np.diag(M), initial=0.0)), 1.0)
    for _ in range(8):
        try:
            return np.linalg.cholesky(M + shift * np.eye(len(M)))
        except np.linalg.LinAlgError:
            shift *= 100.0
    return None


def _solve(L, M, rhs):
    if L is None:
        return np.linalg.lstsq(M, rhs, rcond=None)[0]
    x = _chol_solve(L, rhs)
    for _ in range(REFINE):  # undo the effect of the diagonal shift
        x = x + _chol_solve(L, rhs - M @ x)
    return x


def _chol_solve(L, rhs):
    return np.linalg.solve(L.T, np.linalg.solve(L, rhs))


def _start(A, b, c):
    """Least-squares starting point, clamped from below at one."""
    x = np.linalg.lstsq(A, b, rcond=None)[0]
    y = np.linalg.lstsq(A.T, c, rcond=None)[0]
    z = c - A.T @ y
    return np.maximum(x, 1.0), y, np.maximum(z, 1.0)


def _max_step(v, dv):
    neg = dv < 0
    if not np.any(neg):
        return np.inf
    return float(np.min(-v[neg] / dv[neg]))


def _hsd(A, b, c, tol, max_iter):
    """Homogeneous self-dual interior point iterations on ``A x = b, x >= 0``.

    Returns ``(status, x, iterations, residuals, certificate)``.  The best
    iterate seen is kept: near a degenerate optimum the normal matrix becomes
    singular and a late step can undo progress already certified.
    """
    m, n = A.shape
    x, y, z = _start(A, b, c)
    tau = kappa = 1.0
    norm_b = 1.0 + np.max(np.abs(b), initial=0.0)
    norm_c = 1.0 + np.max(np.abs(c), initial=0.0)
    mu0 = (x @ z + tau * kappa) / (n + 1)
    best = (np.inf, None, None)
    done = None  # best certified iterate: (merit, x, iterations, residuals)
    polish = POLISH

    it = 0
    while True:
        xh, yh, zh = x / tau, y / tau, z / tau
        pres = np.max(np.abs(A @ xh - b), initial=0.0) / norm_b
        dres = np.max(np.abs(A.T @ yh + zh - c), initial=0.0) / norm_c
        obj = c @ xh
        gap = abs(xh @ zh) / (1.0 + abs(obj))
        res = (pres, dres, gap)
        merit = max(res)
        if pres <= tol and dres <= tol and gap <= tol:
            # a few more steps usually gain several digits for free
            if done is None or merit < done[0]:
                done = (merit, xh, it, res)
            if polish == 0 or merit == 0.0:
                break
            polish -= 1
        if merit < best[0]:
            best = (merit, xh, res)
        elif best[0] < NEAR and merit > STALL_FACTOR * best[0]:
            break

        mu = (x @ z + tau * kappa) / (n + 1)
        if done is None and tau < 1e-4 * kappa:
            # the homogeneous embedding drives tau -> 0 on infeasible
            # problems; (y, x) then converge to a dual / primal ray
            ny = np.max(np.abs(y), initial=0.0)
            nx = np.max(x)
            by = b @ y / ny if ny > 0 else 0.0
            cx = c @ x / nx
            dual_ray = np.max(A.T @ y / ny, initial=0.0) / by if by > 0 else np.inf
            primal_ray = np.max(np.abs(A @ x / nx), initial=0.0) / -cx if cx < 0 else np.inf
            collapsed = tau < 1e-10 * kappa
            limit = RAY_TOL if collapsed else tol
            if dual_ray <= limit and dual_ray <= primal_ray:
                return LPStatus.INFEASIBLE, xh, it, res, y / (b @ y)
            if primal_ray <= limit:
                return LPStatus.UNBOUNDED, xh, it, res, x / -(c @ x)
        if it >= max_iter or mu < 1e-30 * mu0 or not np.isfinite(mu):
            break
        it += 1

        r_P = b * tau - A @ x
        r_D = c * tau - A.T @ y - z
        r_G = c @ x - b @ y + kappa
        d = x / z
        AD = A * d
        M = AD @ A.T
        L = _factor(M)
        p = _solve(L, M, b + AD @ c)
        u = d * (A.T @ p - c)
        denom = b @ p - c @ u + kappa / tau

        def direction(eta, r_xz, r_tk):
            q = _solve(L, M, eta * r_P - AD @ (r_xz / x - eta * r_D))
            v = d * (A.T @ q - eta * r_D + r_xz / x)
            dtau = (eta * r_G + r_tk / tau - b @ q + c @ v) / denom
            dx = u * dtau + v
            dy = p * dtau + q
            dz = (r_xz - z * dx) / x
            dkappa = (r_tk - kappa * dtau) / tau
            return dx, dy, dz, dtau, dkappa

        def step(dx, dz, dtau, dkappa):
            return min(_max_step(x, dx), _max_step(z, dz),
                       _max_step(np.array([tau]), np.array([dtau])),
                       _max_step(np.array([kappa]), np.array([dkappa])))

        with np.errstate(all="ignore"):
            # predictor
            dx, dy, dz, dtau, dkappa = direction(1.0, -x * z, -tau * kappa)
            a_aff = min(1.0, step(dx, dz, dtau, dkappa))
            mu_aff = ((x + a_aff * dx) @ (z + a_aff * dz)
                      + (tau + a_aff * dtau) * (kappa + a_aff * dkappa)) / (n + 1)
            sigma = min(1.0, max(0.0, mu_aff / mu)) ** 3
            # corrector
            r_xz = sigma * mu - x * z - dx * dz
            r_tk = sigma * mu - tau * kappa - dtau * dkappa
            dx, dy, dz, dtau, dkappa = direction(1.0 - sigma, r_xz, r_tk)
            alpha = min(1.0, STEP_FRACTION * step(dx, dz, dtau, dkappa))
        if not (np.isfinite(alpha) and np.all(np.isfinite(dx)) and np.all(np.isfinite(dz))
                and np.all(np.isfinite(dy))):
            break
        x = x + alpha * dx
        y = y + alpha * dy
        z = z + alpha * dz
        tau = tau + alpha * dtau
        kappa = kappa + alpha * dkappa
        if not (np.all(x > 0) and np.all(z > 0) and tau > 0 and kappa > 0):
            break

    if done is not None:
        return LPStatus.OPTIMAL, done[1], done[2], done[3], None
    return LPStatus.NUMERICAL_FAILURE, best[1] if best[1] is not None else x / tau, it, best[2] or res, None


def solve_lp(problem: LPProblem, tol: float = TOL, max_iter: int = MAX_ITER) -> LPSolution:
    """Solve ``problem``; see :class:`LPProblem` for the form accepted."""
    try:
        sf = _standardize(problem)
    except _Infeasible:
        return LPSolution(x=np.full(problem.n, np.nan), objective=np.nan,
                          status=LPStatus.INFEASIBLE, iterations=0)
    m, n = sf.A.shape
    if m == 0:
        # only sign constraints: optimum at zero unless some cost is negative
        if np.any(sf.c < 0):
            ray = (sf.c < 0).astype(float)
            return LPSolution(x=np.full(problem.n, np.nan), objective=-np.inf,
                              status=LPStatus.UNBOUNDED, iterations=0, certificate=ray)
        xs = np.zeros(n)
        status, it, res, cert = LPStatus.OPTIMAL, 0, (0.0, 0.0, 0.0), None
    else:
        status, xs, it, res, cert = _hsd(sf.A, sf.b, sf.c, tol, max_iter)

    x = sf.offset_x + sf.T @ xs[:sf.T.shape[1]]
    if status is LPStatus.OPTIMAL:
        objective = float(problem.c @ x)
    elif status is LPStatus.UNBOUNDED:
        objective = -np.inf
    elif status is LPStatus.INFEASIBLE:
        objective = np.inf
    else:
        objective = np.nan
    return LPSolution(x=x, objective=objective, status=status, iterations=it,
                      primal_residual=res[0], dual_residual=res[1], gap=res[2],
                      certificate=cert)


def primal_violation(problem: LPProblem, x: np.ndarray) -> float:
    """Largest violation of any constraint or bound of ``problem`` at ``x``."""
    v = [0.0]
    if problem.A_eq.shape[0]:
        v.append(np.max(np.abs(problem.A_eq @ x - problem.b_eq)))
    if problem.A_ub.shape[0]:
        v.append(np.max(problem.A_ub @ x - problem.b_ub))
    v.append(np.max(problem.lower - x))
    v.append(np.max(x - problem.upper))
    return float(max(v))
