"""Shared matrix primitives: Moore-Penrose pseudoinverse and the PSD square
root, with the clipping conventions used throughout the package."""

import numpy as np

from .exceptions import InvariantViolation

# Eigenvalues in [-PSD_CLIP_FLOOR, 0) are treated as numerical noise and
# clipped to zero; anything more negative is a genuine invariant violation.
PSD_CLIP_FLOOR = 1e-10

# Singular values below RELATIVE_PINV_TOL * s_max are treated as zero.
RELATIVE_PINV_TOL = 1e-10


def pinv(m, tol=None):
    """Moore-Penrose pseudoinverse via SVD.

    Parameters
    ----------
    m : (p, q) array_like, real or complex
    tol : float, optional
        Absolute singular-value cutoff. Defaults to
        ``RELATIVE_PINV_TOL * s_max``.

    Returns
    -------
    (q, p) ndarray satisfying the four Moore-Penrose identities.
    """
    m = np.asarray(m)
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    if tol is None:
        tol = RELATIVE_PINV_TOL * (s[0] if s.size else 0.0)
    inv_s = np.where(s > tol, 1.0 / np.where(s > tol, s, 1.0), 0.0)
    return (vh.conj().T * inv_s) @ u.conj().T


def psd_sqrt(m):
    """Hermitian square root of a positive-semidefinite matrix.

    Eigenvalues in [-1e-10, 0) are clipped to zero; more negative values or
    a non-Hermitian input raise InvariantViolation.
    """
    m = np.asarray(m, dtype=complex)
    herm_defect = np.max(np.abs(m - m.conj().T))
    if herm_defect > 1e-10:
        raise InvariantViolation(
            f"psd_sqrt needs a Hermitian matrix (defect {herm_defect:.2e})")
    w, u = np.linalg.eigh(m)
    scale = max(1.0, float(np.max(np.abs(w))))
    if w[0] < -PSD_CLIP_FLOOR * scale:
        raise InvariantViolation(
            f"matrix is not PSD (eigenvalue {w[0]:.2e})")
    w = np.clip(w, 0.0, None)
    return (u * np.sqrt(w)) @ u.conj().T
