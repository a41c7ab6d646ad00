"""Poisson likelihood, rank-model MLE, AIC, and minimum-AIC selection.

Counts at the 16 projector settings are independent Poisson variables
with means M_nu = Tr[P_nu T T*].  The log-likelihood keeps the full
ln(n!) normalization so that absolute AIC values are comparable across
analyses.  Means are clamped at 1e-12 before the logarithm: a
rank-deficient model that assigns zero mean to a nonzero count then
scores astronomically badly instead of crashing, and AIC disposes of
it naturally.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.special import gammaln

from .exceptions import InvariantViolation
from .projectors import check_counts, linear_tomography, mean_counts
from .states import (
    CholeskyModel,
    RANK_NPARAMS,
    T_LAYOUT,
    density_from_cholesky,
    density_from_pauli,
    params_from_triangular,
    triangular,
)

MEAN_CLAMP = 1e-12
_N_RESTARTS = 4


@dataclass(frozen=True)
class EstimationResult:
    """One rank-model fit: parameters, likelihood, AIC, and the state."""

    rank: int
    theta_hat: np.ndarray
    log_likelihood: float
    aic: float
    rho_hat: np.ndarray
    lambda_hat: float
    converged: bool
    iterations: int


def aic(log_likelihood, rank):
    """-2 logL + 2k with k the parameter count of the rank model."""
    if rank not in RANK_NPARAMS:
        raise InvariantViolation("rank must be one of 1, 2, 3, 4")
    return -2.0 * float(log_likelihood) + 2.0 * RANK_NPARAMS[rank]


def log_likelihood(model, counts, pset):
    """Poisson log-likelihood sum_nu [-M + n ln M - ln n!]."""
    n = check_counts(counts)
    m = np.maximum(mean_counts(model, pset), MEAN_CLAMP)
    return float(np.sum(-m + n * np.log(m) - gammaln(n + 1.0)))


# mean counts are quadratic forms M_nu = theta^T Q_nu theta; the Q
# stack depends only on (rank, operator set) and is cached.
_QCACHE = {}


def _basis_matrices(rank):
    k = RANK_NPARAMS[rank]
    E = np.zeros((k, 4, 4), dtype=complex)
    for i, (row, col, is_imag) in enumerate(T_LAYOUT[:k]):
        E[i, row, col] = 1j if is_imag else 1.0
    return E


def _quadratic_forms(rank, pset):
    key = (rank, pset.operators.tobytes())
    q = _QCACHE.get(key)
    if q is None:
        E = _basis_matrices(rank)
        # Q[nu,i,j] = Re Tr[P_nu E_i E_j*]
        q = np.real(np.einsum('nab,ibc,jac->nij', pset.operators,
                              E, E.conj(), optimize=True))
        q = 0.5 * (q + np.transpose(q, (0, 2, 1)))
        _QCACHE[key] = q
    return q


def log_likelihood_gradient(model, counts, pset):
    """Closed-form score sum_nu (n/M - 1) dM/dtheta."""
    n = check_counts(counts)
    q = _quadratic_forms(model.rank, pset)
    theta = model.params
    m = np.maximum(np.einsum('nij,i,j->n', q, theta, theta), MEAN_CLAMP)
    dm = 2.0 * np.einsum('nij,j->ni', q, theta)
    return (n / m - 1.0) @ dm


def _negloglik_and_grad(theta, n, q, lgamma):
    m = np.einsum('nij,i,j->n', q, theta, theta)
    m = np.maximum(m, MEAN_CLAMP)
    f = -np.sum(-m + n * np.log(m)) + lgamma
    dm = 2.0 * np.einsum('nij,j->ni', q, theta)
    g = -((n / m - 1.0) @ dm)
    return f, g


def _rank_factor(rho, lam, rank):
    """theta for a rank-limited Cholesky factor approximating lam*rho."""
    w, v = np.linalg.eigh(rho)
    w = np.clip(w, 0.0, None)
    order = np.argsort(w)[::-1][:rank]
    a = v[:, order] * np.sqrt(w[order] * lam)       # 4 x rank, A A* ~ lam rho
    # LQ: A = R* Q* with R* lower-trapezoidal; column phases fixed real
    qm, r = np.linalg.qr(a.conj().T)
    t4 = np.zeros((4, 4), dtype=complex)
    t4[:, :rank] = r.conj().T
    for j in range(rank):
        d = t4[j, j]
        if abs(d) > 0:
            t4[:, j] *= np.conj(d) / abs(d)
    return params_from_triangular(t4, rank)


def _initial_theta(counts, pset, rank):
    """Linear inversion, clipped to the PSD cone, rank-truncated."""
    n = np.asarray(counts, dtype=float)
    try:
        phi, lam = linear_tomography(n, pset)
        rho = density_from_pauli(phi)
    except Exception:
        lam = max(float(n.sum()) / 4.0, 1.0)
        rho = np.eye(4, dtype=complex) / 4.0
    rho = 0.5 * (rho + rho.conj().T)
    w, v = np.linalg.eigh(rho)
    w = np.clip(w, 1e-6, None)
    rho = (v * w) @ v.conj().T
    rho /= np.trace(rho).real
    if lam <= 0:
        lam = max(float(n.sum()) / 4.0, 1.0)
    return _rank_factor(rho, lam, rank)


def mle(rank, counts, pset, init=None, seed=0, extra_inits=(),
        restarts=_N_RESTARTS):
    """Maximum-likelihood fit of one rank model.

    Quasi-Newton (BFGS) on the analytic score, with a Nelder-Mead
    polish when the line search stalls.  Starts from the PSD-clipped
    linear inversion (or `init`) plus seeded jitters, so the result is
    deterministic given (counts, init, seed).
    """
    n = check_counts(counts)
    q = _quadratic_forms(rank, pset)
    lgamma = float(np.sum(gammaln(n + 1.0)))
    k = RANK_NPARAMS[rank]

    theta0 = np.asarray(init, dtype=float) if init is not None \
        else _initial_theta(n, pset, rank)
    if theta0.shape != (k,):
        raise InvariantViolation(
            f"init must have {k} entries for rank {rank}")
    scale = max(np.abs(theta0).max(), np.sqrt(max(n.sum(), 1.0) / 4.0))

    starts = [theta0]
    for x in extra_inits:
        x = np.asarray(x, dtype=float)
        if x.shape == (k,):
            starts.append(x)
    rng = np.random.default_rng([max(seed, 0), rank])
    for _ in range(int(restarts)):
        jit = theta0 * (1.0 + 0.05 * rng.standard_normal(k)) \
            + 0.02 * scale * rng.standard_normal(k)
        starts.append(jit)

    best = None
    total_iter = 0
    for x0 in starts:
        res = minimize(_negloglik_and_grad, x0, args=(n, q, lgamma),
                       jac=True, method="BFGS",
                       options={"gtol": 1e-7, "maxiter": 2000})
        total_iter += int(res.nit)
        gexit = float(np.max(np.abs(res.jac)))
        if not res.success and gexit > 1e-6 * max(1.0, abs(res.fun)):
            # genuine stall away from a stationary point: simplex polish
            res2 = minimize(lambda t: _negloglik_and_grad(t, n, q, lgamma)[0],
                            res.x, method="Nelder-Mead",
                            options={"maxiter": 4000, "xatol": 1e-9,
                                     "fatol": 1e-9})
            total_iter += int(res2.nit)
            if res2.fun <= res.fun:
                res = res2
        if best is None or res.fun < best.fun:
            best = res

    theta = np.asarray(best.x, dtype=float)
    # gauge: make diagonal entries of T nonnegative by column sign flips
    theta = _canonical_gauge(theta, rank)
    model = CholeskyModel(rank=rank, params=theta)
    ll = log_likelihood(model, n, pset)
    gnorm = float(np.max(np.abs(log_likelihood_gradient(model, n, pset))))
    converged = bool(gnorm <= 1e-6 * max(1.0, abs(ll)))
    return EstimationResult(
        rank=rank,
        theta_hat=theta,
        log_likelihood=ll,
        aic=aic(ll, rank),
        rho_hat=density_from_cholesky(model),
        lambda_hat=model.lambda_scale,
        converged=converged,
        iterations=total_iter,
    )


def _canonical_gauge(theta, rank):
    t4 = triangular(CholeskyModel(rank=rank, params=np.asarray(theta, float)))
    for j in range(rank):
        if t4[j, j].real < 0:
            t4[:, j] = -t4[:, j]
    return params_from_triangular(t4, rank)


def maice(counts, pset, seed=0, restarts=_N_RESTARTS):
    """Fit all four rank models; pick the minimum-AIC one.

    Each rank is additionally warm-started from the zero-padded best
    parameters of the rank below, which enforces the nested-model
    likelihood ordering.  AIC ties resolve toward fewer parameters.
    """
    n = check_counts(counts)
    results = []
    prev_theta = None
    for rank in (1, 2, 3, 4):
        extra = ()
        if prev_theta is not None:
            padded = np.zeros(RANK_NPARAMS[rank])
            padded[:len(prev_theta)] = prev_theta
            extra = (padded,)
        r = mle(rank, n, pset, seed=seed, extra_inits=extra,
                restarts=restarts)
        results.append(r)
        prev_theta = r.theta_hat
    best = min(results, key=lambda r: (r.aic, RANK_NPARAMS[r.rank]))
    return best, tuple(results)


def kl_divergence(mean0, mean1):
    """Kullback-Leibler distance between two Poisson count models."""
    m0 = np.asarray(mean0, dtype=float)
    m1 = np.asarray(mean1, dtype=float)
    if m0.shape != (16,) or m1.shape != (16,):
        raise InvariantViolation("means must be length-16 vectors")
    if np.any(m0 <= 0) or np.any(m1 <= 0):
        raise InvariantViolation("Poisson means must be strictly positive")
    return float(np.sum(m0 * np.log(m0 / m1) - m0 + m1))
