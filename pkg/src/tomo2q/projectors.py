"""Tomographic measurement sets, the B matrix, Poisson means, and linear
tomography for two polarization qubits.

A measurement set is 16 PSD operators M_nu. The local set uses rank-1
product projectors |m1 m2><m1 m2| over the single-qubit states H, V,
D = (H+V)/sqrt2, R = (H+iV)/sqrt2 on the first qubit and H, V, D,
L = (H-iV)/sqrt2 on the second, in row-major grid order. The inseparable
set mixes ten Bell-like projectors with six half-weighted single-qubit
operators (projector tensor I/2); those six are stored as the weighted
rank-2 operators themselves so the same mean-count formula
M_nu = Tr[M_nu T T^dag] covers every entry.
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import InvariantViolation, InversionError
from .states import (CholeskyModel, density_from_cholesky, pauli_basis,
                     triangular)

KET_H = np.array([1.0, 0.0], dtype=complex)
KET_V = np.array([0.0, 1.0], dtype=complex)
KET_D = (KET_H + KET_V) / np.sqrt(2.0)
KET_X = (KET_H - KET_V) / np.sqrt(2.0)
KET_R = (KET_H + 1j * KET_V) / np.sqrt(2.0)
KET_L = (KET_H - 1j * KET_V) / np.sqrt(2.0)

_SINGLE = {"H": KET_H, "V": KET_V, "D": KET_D, "X": KET_X,
           "R": KET_R, "L": KET_L}

# Row-major local grid: first qubit H, V, D, R; second qubit H, V, D, L.
LOCAL_LABELS = tuple(a + b for a in "HVDR" for b in "HVDL")

_GAMMA = pauli_basis()


def product_ket(label):
    """Two-qubit product ket from a two-letter label such as 'HD'."""
    return np.kron(_SINGLE[label[0]], _SINGLE[label[1]])


@dataclass(frozen=True)
class ProjectorSet:
    """16 measurement operators with the cached tomographic B matrix.

    kets holds the unit vectors for rank-1 entries and None where the
    operator is not a ket projector (the weighted rank-2 entries of the
    inseparable set).
    """

    name: str
    operators: np.ndarray
    kets: tuple = None
    b: np.ndarray = field(default=None, compare=False)

    def __post_init__(self):
        ops = np.asarray(self.operators, dtype=complex)
        if ops.shape != (16, 4, 4):
            raise InvariantViolation("expected 16 operators of shape 4x4")
        herm = np.max(np.abs(ops - ops.conj().transpose(0, 2, 1)))
        if herm > 1e-12:
            raise InvariantViolation(
                f"measurement operators must be Hermitian (defect {herm:.2e})")
        if self.kets is not None:
            for k in self.kets:
                if k is not None and abs(np.linalg.norm(k) - 1.0) > 1e-12:
                    raise InvariantViolation("projector kets must be unit norm")
        object.__setattr__(self, "operators", ops)
        object.__setattr__(self, "b", b_matrix_of(ops))

    def __len__(self):
        return 16


def b_matrix_of(operators):
    """B_{nu mu} = Tr[M_nu Gamma_mu]; real for Hermitian operators."""
    b = np.einsum("nij,mji->nm", operators, _GAMMA)
    imag = np.max(np.abs(b.imag))
    if imag > 1e-12:
        raise InvariantViolation(f"B matrix has imaginary part {imag:.2e}")
    return b.real


def b_matrix(pset):
    """The 16x16 tomographic matrix of a ProjectorSet."""
    return pset.b.copy()


def projector_set_from_kets(kets, name="custom"):
    kets = [np.asarray(k, dtype=complex) / np.linalg.norm(k) for k in kets]
    ops = np.array([np.outer(k, k.conj()) for k in kets])
    return ProjectorSet(name=name, operators=ops, kets=tuple(kets))


def local_projector_set():
    """The 16 product projectors of the row-major local grid."""
    return projector_set_from_kets(
        [product_ket(lab) for lab in LOCAL_LABELS], name="local")


def _bell_like(label1, label2, phase):
    k = (product_ket(label1) + phase * product_ket(label2)) / np.sqrt(2.0)
    return k


def inseparable_projector_set():
    """Ten Bell-like projectors plus six half-weighted local operators.

    The ten superposition kets comprise the four computational Bell
    states plus two members of each of two rotated Bell bases.  The
    three bases diagonalize the three cyclic pairings of local Pauli
    axes (XX/YY/ZZ, XY/YZ/ZX, XZ/YX/ZY), so together with the six
    half-weighted single-qubit projectors the set spans all sixteen
    two-qubit Pauli directions.  The relative phase of the D/X family
    must be imaginary; with a real phase that family duplicates the
    ZX direction and the B matrix drops to rank 14 (XY and YZ become
    unmeasurable), which completeness_check reports as failure.
    """
    kets = [
        _bell_like("HH", "VV", +1),
        _bell_like("HH", "VV", -1),
        _bell_like("HV", "VH", +1),
        _bell_like("HV", "VH", -1),
        _bell_like("HD", "VX", +1j),
        _bell_like("HD", "VX", -1j),
        _bell_like("HX", "VD", +1j),
        _bell_like("HR", "VL", +1),
        _bell_like("HR", "VL", -1),
        _bell_like("HL", "VR", +1),
    ]
    ops = [np.outer(k, k.conj()) for k in kets]
    eye2 = np.eye(2, dtype=complex)
    for single in ("H", "D", "R"):
        p = np.outer(_SINGLE[single], _SINGLE[single].conj())
        ops.append(np.kron(p, eye2 / 2.0))
        ops.append(np.kron(eye2 / 2.0, p))
    kets = tuple(kets) + (None,) * 6
    return ProjectorSet(name="inseparable", operators=np.array(ops),
                        kets=kets)


def completeness_check(pset):
    """(complete, condition_number) from the singular values of B."""
    s = np.linalg.svd(pset.b, compute_uv=False)
    complete = bool(s[-1] > 1e-10 * s[0])
    cond = float(s[0] / s[-1]) if s[-1] > 0 else np.inf
    return complete, cond


def mean_counts(model, pset):
    """Poisson means M_nu = Tr[M_nu T T^dag] >= 0 (scale included in T)."""
    t = triangular(model)
    g = t @ t.conj().T
    m = np.real(np.einsum("nij,ji->n", pset.operators, g))
    return np.clip(m, 0.0, None)


def mean_counts_of_density(rho, lam, pset):
    """Means lambda * Tr[M_nu rho] for a density matrix at scale lambda."""
    m = lam * np.real(np.einsum("nij,ji->n", pset.operators, rho))
    return np.clip(m, 0.0, None)


def check_counts(counts):
    counts = np.asarray(counts)
    if counts.shape != (16,):
        raise InvariantViolation(f"expected 16 counts, got shape {counts.shape}")
    if np.any(counts < 0):
        raise InvariantViolation("negative counts")
    if not np.all(np.isfinite(np.asarray(counts, dtype=float))):
        raise InvariantViolation("non-finite counts")
    return np.asarray(counts, dtype=float)


def linear_tomography(counts, pset):
    """Invert n = B (lambda phi) and split off lambda from phi^0 = 1.

    Returns (phi, lambda_hat). Exact on noiseless means; the implied
    density matrix is Hermitian with unit trace but not necessarily PSD.
    """
    counts = check_counts(counts)
    complete, _ = completeness_check(pset)
    if not complete:
        raise InvariantViolation(
            f"projector set '{pset.name}' is not tomographically complete")
    lam_phi = np.linalg.solve(pset.b, counts)
    lam_hat = lam_phi[0]
    if lam_hat <= 0.0:
        raise InversionError(
            f"linear tomography produced lambda_hat = {lam_hat:.6g} <= 0")
    phi = lam_phi / lam_hat
    return phi, float(lam_hat)
