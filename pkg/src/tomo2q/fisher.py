"""Fisher information, SLD operators, and the asymptotic Bures bound.

Under the Poisson count model the classical Fisher matrix has the
closed form J_ij = sum_nu (1/M_nu) dM_i dM_j, so the analytic routine
is exact and the Monte Carlo average of score outer products exists as
a cross-check (and to exhibit the bias of the rounded-Gaussian
sampling approximation at small means).

The asymptotic bound on infidelity is 1 - F >= C/lambda with
C = (1/8) Tr[J_SLD pinv(Jbar)], Jbar the Fisher matrix per unit of
acquisition scale.  C is invariant under linear reparametrization and
under rescaling theta to a different lambda at fixed state shape.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import (
    InconsistentDirectionError,
    InvariantViolation,
    UnboundedInformationError,
)
from .estimation import _basis_matrices, _quadratic_forms, \
    log_likelihood_gradient
from .linalg import pinv
from .projectors import mean_counts
from .states import CholeskyModel, density_from_cholesky, triangular

_SYM_TOL = 1e-10
_PSD_FLOOR = 1e-8


def _check_info_matrix(entries, what):
    entries = np.asarray(entries, dtype=float)
    if not np.allclose(entries, entries.T, atol=_SYM_TOL * max(
            1.0, np.abs(entries).max())):
        raise InconsistentDirectionError(f"{what} must be symmetric")
    w = np.linalg.eigvalsh(0.5 * (entries + entries.T))
    norm = max(np.abs(w).max(), 1e-300)
    if w[0] < -_PSD_FLOOR * norm:
        raise InconsistentDirectionError(
            f"{what} has negative eigenvalue {w[0]:.3e}")
    return entries


@dataclass(frozen=True)
class FisherMatrix:
    entries: np.ndarray
    rank_model: int
    at_theta: np.ndarray
    acquisition_scale: float

    def __post_init__(self):
        object.__setattr__(self, "entries",
                           _check_info_matrix(self.entries, "Fisher matrix"))


@dataclass(frozen=True)
class SldFisherMatrix:
    entries: np.ndarray
    rank_model: int
    at_theta: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "entries",
            _check_info_matrix(self.entries, "SLD Fisher matrix"))


@dataclass(frozen=True)
class BoundReport:
    coefficient: float
    rank_model: int
    set_name: str
    theta: np.ndarray


def density_gradient(model):
    """The k Hermitian traceless matrices d(rho)/d(theta_i)."""
    t4 = triangular(model)
    lam = model.lambda_scale
    rho = density_from_cholesky(model)
    E = _basis_matrices(model.rank)
    dw = np.einsum('iab,cb->iac', E, t4.conj())     # E_i T*
    dw = dw + np.transpose(dw.conj(), (0, 2, 1))    # + T E_i*
    dtr = np.real(np.trace(dw, axis1=1, axis2=2))
    grads = dw / lam - rho[None, :, :] * (dtr / lam)[:, None, None]
    return [0.5 * (g + g.conj().T) for g in grads]


def _mean_derivatives(model, pset):
    q = _quadratic_forms(model.rank, pset)
    theta = model.params
    m = np.einsum('nij,i,j->n', q, theta, theta)
    dm = 2.0 * np.einsum('nij,j->ni', q, theta)
    return m, dm


def fisher_analytic(model, pset, acquisition_time=1.0):
    """Exact Poisson Fisher matrix J_ij = sum (1/M) dM_i dM_j.

    With the unit-rate convention theta fixes the rate lambda-tilde and
    the acquisition time multiplies every mean, so J is exactly linear
    in acquisition_time.
    """
    t = float(acquisition_time)
    if t <= 0:
        raise InvariantViolation("acquisition time must be positive")
    m, dm = _mean_derivatives(model, pset)
    scale = max(model.lambda_scale, 1.0)
    alive = m > 1e-9 * scale
    dead_grad = np.abs(dm[~alive]).max() if (~alive).any() else 0.0
    if dead_grad > 1e-9 * scale:
        raise UnboundedInformationError(
            "a measurement mean vanishes while its derivative does not; "
            "the Fisher information diverges in that direction")
    entries = t * np.einsum('ni,n,nj->ij', dm[alive], 1.0 / m[alive],
                            dm[alive])
    entries = 0.5 * (entries + entries.T)
    return FisherMatrix(entries=entries, rank_model=model.rank,
                        at_theta=model.params.copy(),
                        acquisition_scale=model.lambda_scale * t)


def fisher_mc(model, pset, n_samples, sampling="poisson", seed=0):
    """Average of score outer products over sampled count vectors.

    poisson draws the exact count distribution; gaussian draws a normal
    with matching mean and variance rounded to the nearest nonnegative
    integer, which is biased at small means.
    """
    n_samples = int(n_samples)
    if n_samples < 100:
        raise InvariantViolation("n_samples must be at least 100")
    if sampling not in ("gaussian", "poisson"):
        raise InvariantViolation("sampling must be 'gaussian' or 'poisson'")
    m, dm = _mean_derivatives(model, pset)
    m = np.maximum(m, 1e-12)
    rng = np.random.default_rng(seed)
    if sampling == "poisson":
        draws = rng.poisson(m, size=(n_samples, 16)).astype(float)
    else:
        draws = rng.normal(m, np.sqrt(m), size=(n_samples, 16))
        draws = np.maximum(np.rint(draws), 0.0)
    scores = (draws / m - 1.0) @ dm                 # (S, k)
    entries = scores.T @ scores / n_samples
    entries = 0.5 * (entries + entries.T)
    return FisherMatrix(entries=entries, rank_model=model.rank,
                        at_theta=model.params.copy(),
                        acquisition_scale=model.lambda_scale)


def score(model, counts, pset):
    """Score vector of the Poisson model; zero-mean at the truth."""
    return log_likelihood_gradient(model, counts, pset)


def sld(rho, drho):
    """Symmetric logarithmic derivative: solve drho = (L rho + rho L)/2.

    The map X -> (X rho + rho X)/2 is vectorized to a 16x16 system and
    inverted with the Moore-Penrose pseudoinverse, giving the unique
    minimum-norm Hermitian solution on the support.
    """
    rho = np.asarray(rho, dtype=complex)
    drho = np.asarray(drho, dtype=complex)
    eye = np.eye(4, dtype=complex)
    k = 0.5 * (np.kron(rho.T, eye) + np.kron(eye, rho))
    lvec = pinv(k) @ drho.reshape(-1, order="F")
    L = lvec.reshape(4, 4, order="F")
    L = 0.5 * (L + L.conj().T)
    resid = np.linalg.norm(0.5 * (L @ rho + rho @ L) - drho)
    if resid > 1e-8 * max(1.0, np.linalg.norm(drho)):
        raise InconsistentDirectionError(
            f"direction lies outside the SLD range (residual {resid:.3e})")
    return L


def sld_fisher(model):
    """Quantum information matrix (1/2) Tr[rho (L_i L_j + L_j L_i)]."""
    rho = density_from_cholesky(model)
    grads = density_gradient(model)
    Ls = [sld(rho, g) for g in grads]
    k = len(Ls)
    entries = np.empty((k, k))
    for i in range(k):
        for j in range(i, k):
            v = 0.5 * np.trace(rho @ (Ls[i] @ Ls[j] + Ls[j] @ Ls[i]))
            entries[i, j] = entries[j, i] = v.real
    return SldFisherMatrix(entries=entries, rank_model=model.rank,
                           at_theta=model.params.copy())


def bound_coefficient(model, pset):
    """Asymptotic infidelity bound 1 - F >= C/lambda.

    C = (1/8) Tr[J_SLD pinv(Jbar)] with Jbar the Fisher matrix divided
    by the acquisition scale; pinv handles rank-deficient directions.
    """
    jbar = fisher_analytic(model, pset).entries / model.lambda_scale
    jsld = sld_fisher(model).entries
    c = 0.125 * float(np.trace(jsld @ pinv(jbar)))
    if c <= 0:
        raise UnboundedInformationError(
            "bound coefficient must be positive")
    return BoundReport(coefficient=c, rank_model=model.rank,
                       set_name=pset.name, theta=model.params.copy())


def bures_quadratic_form(model, delta_theta):
    """Local Bures metric (1/4) dtheta' J_SLD dtheta."""
    d = np.asarray(delta_theta, dtype=float)
    j = sld_fisher(model).entries
    return 0.25 * float(d @ j @ d)
