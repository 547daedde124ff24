"""Dense complex linear algebra used by the channel and capacity modules.

Tensor products are always ordered system ⊗ environment with the
environment index running fastest, i.e. ``|s>|e>`` sits at row ``s * dE + e``.
"""

from __future__ import annotations

from typing import Literal, NamedTuple

import numpy as np

from .config import Tolerances, get_tolerances
from .errors import (
    DimensionMismatchError,
    InvalidDensityError,
    NonSquareError,
    NotHermitianError,
)


class Spectrum(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None = None


def _square(m) -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NonSquareError(f"expected a square matrix, got shape {m.shape}")
    return m


def hermiticity_defect(m: np.ndarray) -> float:
    m = _square(m)
    if m.size == 0:
        return 0.0
    return float(np.max(np.abs(m - m.conj().T)))


def hermitize(m, tol: Tolerances | None = None) -> np.ndarray:
    """Return ``(m + m†)/2`` after checking that ``m`` is Hermitian to tolerance."""
    tol = tol or get_tolerances()
    m = _square(m).astype(complex)
    defect = hermiticity_defect(m)
    if defect > tol.hermiticity:
        raise NotHermitianError(f"Hermiticity defect {defect:.3e} exceeds {tol.hermiticity:.1e}")
    return 0.5 * (m + m.conj().T)


def hermitian_eigensystem(
    m, vectors: bool = False, tol: Tolerances | None = None
) -> Spectrum:
    """Eigen-decompose the Hermitian part of ``m``.

    Eigenvalues are returned in ascending order; eigenvectors (if requested)
    are the columns of a unitary.
    """
    h = hermitize(m, tol)
    if vectors:
        w, v = np.linalg.eigh(h)
        return Spectrum(w, v)
    return Spectrum(np.linalg.eigvalsh(h))


def min_eigenvalue(m, tol: Tolerances | None = None) -> float:
    h = hermitize(m, tol)
    if h.size == 0:
        return 0.0
    return float(np.linalg.eigvalsh(h)[0])


def as_density_matrix(rho, tol: Tolerances | None = None) -> np.ndarray:
    """Validate ``rho`` as a density matrix and return an exactly Hermitian copy.

    Raises:
        InvalidDensityError: if the trace differs from one or the spectrum is
            negative beyond the configured tolerances.
    """
    tol = tol or get_tolerances()
    try:
        h = hermitize(rho, tol)
    except NotHermitianError as exc:
        raise InvalidDensityError(str(exc)) from exc
    tr = np.trace(h).real
    if abs(tr - 1.0) > tol.trace:
        raise InvalidDensityError(f"trace {tr!r} differs from 1 by more than {tol.trace:.1e}")
    lo = np.linalg.eigvalsh(h)[0]
    if lo < -tol.psd:
        raise InvalidDensityError(f"minimum eigenvalue {lo:.3e} below {-tol.psd:.1e}")
    return h


def entropy_of_spectrum(eigenvalues, tol: Tolerances | None = None) -> float:
    """Shannon entropy in bits of a probability vector, with ``0 log 0 = 0``.

    Entries in ``[-psd, 0)`` are clamped to zero; anything more negative is an
    error.
    """
    tol = tol or get_tolerances()
    lam = np.asarray(eigenvalues, dtype=float)
    if lam.size and lam.min() < -tol.psd:
        raise InvalidDensityError(f"negative eigenvalue {lam.min():.3e}")
    lam = lam[lam > 0]
    return float(-np.sum(lam * np.log2(lam)))


def von_neumann_entropy(rho, tol: Tolerances | None = None) -> float:
    """Von Neumann entropy ``-Tr[rho log2 rho]`` in bits."""
    h = as_density_matrix(rho, tol)
    return entropy_of_spectrum(np.linalg.eigvalsh(h), tol)


def partial_trace(
    joint, dims: tuple[int, int], keep: Literal["first", "second"] = "first"
) -> np.ndarray:
    """Reduced operator of one factor of a bipartite operator.

    Args:
        joint: ``(dA*dB) x (dA*dB)`` operator, second factor's index fastest.
        dims: ``(dA, dB)``.
        keep: ``"first"`` traces out the second factor, ``"second"`` the first.
    """
    joint = _square(joint)
    da, db = dims
    if joint.shape[0] != da * db:
        raise DimensionMismatchError(
            f"operator of size {joint.shape[0]} does not factor as {da} x {db}"
        )
    t = joint.reshape(da, db, da, db)
    if keep == "first":
        return np.einsum("ikjk->ij", t)
    if keep == "second":
        return np.einsum("kikj->ij", t)
    raise ValueError(f"keep must be 'first' or 'second', got {keep!r}")
