"""Two-qubit state representations and metrics.

Everything is expressed in the product basis |HH>, |HV>, |VH>, |VV> (first
qubit slowest). Three interchangeable parametrizations are provided:

* density matrix: 4x4 complex Hermitian PSD with unit trace,
* Pauli coefficients: 16 real numbers phi^mu against the normalized basis
  Gamma_{4i+j} = (sigma_i (x) sigma_j)/4,
* Cholesky parameters: a rank label k in {1,2,3,4} and 7/12/15/16 real
  numbers filling a lower-triangular T column by column, with
  rho = T T^dag / Tr[T T^dag]. The trace Tr[T T^dag] doubles as the total
  count scale lambda, so the parametrization carries the state and the
  Poisson nuisance parameter together.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateModelError, InvariantViolation
from .linalg import PSD_CLIP_FLOOR, psd_sqrt

SIGMA = np.array([
    [[1, 0], [0, 1]],
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)

# Gamma_{4i+j} = (sigma_i (x) sigma_j) / 4; Tr[Gamma_mu Gamma_nu] = delta/4.
_GAMMA = np.array([np.kron(SIGMA[i], SIGMA[j]) / 4.0
                   for i in range(4) for j in range(4)])

# Parameter slot -> (row, col, imag?) of the lower-triangular T. Diagonal
# entries are real, off-diagonals take a real/imaginary pair.
T_LAYOUT = (
    (0, 0, False),
    (1, 0, False), (1, 0, True),
    (2, 0, False), (2, 0, True),
    (3, 0, False), (3, 0, True),
    (1, 1, False),
    (2, 1, False), (2, 1, True),
    (3, 1, False), (3, 1, True),
    (2, 2, False),
    (3, 2, False), (3, 2, True),
    (3, 3, False),
)

# Number of real parameters for each rank model: the first k columns of T.
RANK_NPARAMS = {1: 7, 2: 12, 3: 15, 4: 16}

# Columns of T touched by each parameter slot, used to truncate the layout.
_PARAM_COL = np.array([col for _, col, _ in T_LAYOUT])


def _layout_for_rank(rank):
    return [i for i in range(16) if _PARAM_COL[i] < rank]


_RANK_SLOTS = {k: np.array(_layout_for_rank(k)) for k in (1, 2, 3, 4)}


@dataclass(frozen=True)
class CholeskyModel:
    """Rank label plus the real parameter vector theta.

    rank 1/2/3/4 uses 7/12/15/16 parameters (the first `rank` columns of
    the triangular matrix). The all-zero vector is rejected: it encodes no
    state and Tr[T T^dag] = 0 would divide out.
    """

    rank: int
    params: np.ndarray

    def __post_init__(self):
        if self.rank not in RANK_NPARAMS:
            raise InvariantViolation(f"rank must be 1..4, got {self.rank}")
        p = np.asarray(self.params, dtype=float)
        if p.shape != (RANK_NPARAMS[self.rank],):
            raise InvariantViolation(
                f"rank {self.rank} takes {RANK_NPARAMS[self.rank]} "
                f"parameters, got shape {p.shape}")
        if not np.all(np.isfinite(p)):
            raise InvariantViolation("non-finite Cholesky parameters")
        if not np.any(p):
            raise DegenerateModelError("all-zero Cholesky parameter vector")
        object.__setattr__(self, "params", p)

    @property
    def nparams(self):
        return RANK_NPARAMS[self.rank]

    @property
    def lambda_scale(self):
        """Total count scale lambda = Tr[T T^dag] = |theta|^2."""
        return float(self.params @ self.params)


def triangular(model):
    """Assemble the 4x4 lower-triangular T from a CholeskyModel."""
    t = np.zeros((4, 4), dtype=complex)
    slots = _RANK_SLOTS[model.rank]
    for value, slot in zip(model.params, slots):
        row, col, is_imag = T_LAYOUT[slot]
        t[row, col] += 1j * value if is_imag else value
    return t


def params_from_triangular(t, rank):
    """Read the parameter vector back off a lower-triangular matrix."""
    out = []
    for slot in _RANK_SLOTS[rank]:
        row, col, is_imag = T_LAYOUT[slot]
        out.append(t[row, col].imag if is_imag else t[row, col].real)
    return np.array(out)


def pauli_basis():
    """The 16 matrices Gamma_{4i+j} = (sigma_i (x) sigma_j)/4, index 4i+j."""
    return _GAMMA.copy()


def check_density(rho):
    """Validate the density-matrix invariants, returning rho as ndarray.

    Hermiticity and unit trace to 1e-12; smallest eigenvalue >= -1e-10
    (tiny negatives are tolerated here and clipped at the point of use).
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise InvariantViolation(f"density matrix must be 4x4, got {rho.shape}")
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > 1e-12:
        raise InvariantViolation(f"not Hermitian (defect {herm:.2e})")
    tr = np.trace(rho)
    if abs(tr - 1.0) > 1e-12:
        raise InvariantViolation(f"trace is {tr:.15g}, expected 1")
    wmin = float(np.linalg.eigvalsh(rho)[0])
    if wmin < -PSD_CLIP_FLOOR:
        raise InvariantViolation(f"not PSD (eigenvalue {wmin:.2e})")
    return rho


def density_from_pauli(phi):
    """rho = sum_mu Gamma_mu phi^mu. Positivity is NOT checked: the Pauli
    expansion parametrizes all Hermitian matrices of trace phi^0."""
    phi = np.asarray(phi, dtype=float)
    if phi.shape != (16,):
        raise InvariantViolation("phi must hold 16 real coefficients")
    return np.tensordot(phi, _GAMMA, axes=1)


def pauli_coefficients(rho):
    """Invert the Pauli expansion: phi^mu = 4 Tr[Gamma_mu rho]."""
    rho = check_density(rho)
    return 4.0 * np.real(np.einsum("mij,ji->m", _GAMMA, rho))


def density_from_cholesky(model):
    """rho = T T^dag / Tr[T T^dag]; PSD with unit trace for any real theta."""
    t = triangular(model)
    g = t @ t.conj().T
    lam = np.trace(g).real
    if lam <= 0.0:
        raise DegenerateModelError("Tr[T T^dag] vanished")
    rho = g / lam
    # exact Hermitization kills float round-off at the 1e-17 level
    return 0.5 * (rho + rho.conj().T)


def cholesky_from_density(rho, lam):
    """Rank-4 Cholesky parameters reproducing rho at scale lambda.

    Near-singular inputs are regularized by 1e-10 * identity before
    factorization, so the factorization never fails on valid states.
    """
    rho = check_density(rho)
    if lam <= 0:
        raise InvariantViolation("lambda must be positive")
    reg = rho + 1e-10 * np.eye(4)
    t = np.linalg.cholesky(reg)
    t *= np.sqrt(lam / np.trace(reg).real)
    return CholeskyModel(4, params_from_triangular(t, 4))


def fidelity(rho1, rho2):
    """Uhlmann fidelity F = Tr sqrt(sqrt(rho1) rho2 sqrt(rho1)), in [0, 1]."""
    rho1 = check_density(rho1)
    rho2 = check_density(rho2)
    s = psd_sqrt(rho1)
    w = np.linalg.eigvalsh(s @ rho2 @ s)
    f = float(np.sum(np.sqrt(np.clip(w, 0.0, None))))
    return min(max(f, 0.0), 1.0)


def bures_distance_sq(rho1, rho2):
    """Squared Bures distance d^2 = 2 (1 - F), in [0, 2]."""
    return 2.0 * (1.0 - fidelity(rho1, rho2))


def von_neumann_entropy(rho):
    """Entropy -sum p log2 p of the spectrum, in bits; 0 (pure) to 2 (I/4)."""
    w = np.clip(np.linalg.eigvalsh(check_density(rho)), 0.0, None)
    w = w[w > 0.0]
    return float(-np.sum(w * np.log2(w)))


def concurrence(rho):
    """Two-qubit concurrence via the spin-flipped state."""
    rho = check_density(rho)
    yy = np.kron(SIGMA[2], SIGMA[2])
    rho_tilde = yy @ rho.conj() @ yy
    w = np.linalg.eigvals(rho @ rho_tilde)
    # rho rho_tilde has real nonnegative spectrum up to round-off
    lam = np.sqrt(np.clip(np.real(w), 0.0, None))
    lam.sort()
    return float(max(0.0, lam[3] - lam[2] - lam[1] - lam[0]))


def _binary_entropy(x):
    out = 0.0
    for p in (x, 1.0 - x):
        if p > 0.0:
            out -= p * np.log2(p)
    return out


def entanglement_of_formation(rho):
    """Entanglement of formation from the concurrence, in [0, 1]."""
    c = concurrence(rho)
    x = 0.5 * (1.0 + np.sqrt(max(0.0, 1.0 - c * c)))
    return float(_binary_entropy(x))
