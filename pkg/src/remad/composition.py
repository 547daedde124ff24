"""Composition algebra of qutrit ReMAD channels.

Convention: ``compose_transitions(g, gprime)`` is the channel that applies
``g`` first and ``gprime`` second, i.e. ``Φ_{Γ'} ∘ Φ_Γ``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import QutritParams
from .config import Tolerances, get_tolerances
from .errors import DimensionMismatchError, OutOfDomainError
from .liouville import Superoperator


@dataclass(frozen=True)
class CompositionOutcome:
    """Population-level composite ``Γ''`` and whether the composite is itself ReMAD."""

    params: QutritParams
    closed: bool
    constraint_residual: float


def composed_params(g: QutritParams, gprime: QutritParams) -> tuple[float, float, float]:
    """``(γ''10, γ''21, γ''20)`` fixed by the population dynamics alone."""
    g10 = g.g10 + gprime.g10 * (1.0 - g.g10)
    g21 = (1.0 - gprime.g10) * g.g21 + gprime.g21 * g.g22
    g20 = g.g20 + gprime.g10 * g.g21 + gprime.g20 * g.g22
    return g10, g21, g20


def closure_residual(g: QutritParams, gprime: QutritParams) -> float:
    """Mismatch of the 01-coherence transfer between the product and ``Γ''``.

    The composite is ReMAD exactly when
    ``γ10 γ'21 γ22 = γ21 γ'10 (1 − γ10)(1 − γ'10)``.
    """
    lhs = g.g10 * gprime.g21 * g.g22
    rhs = g.g21 * gprime.g10 * (1.0 - g.g10) * (1.0 - gprime.g10)
    return abs(lhs - rhs)


def compose_transitions(
    g: QutritParams, gprime: QutritParams, tol: Tolerances | None = None
) -> CompositionOutcome:
    """Compose two qutrit ReMAD channels (``g`` first, ``gprime`` second)."""
    tol = tol or get_tolerances()
    for p in (g, gprime):
        if not isinstance(p, QutritParams):
            raise OutOfDomainError(f"expected QutritParams, got {type(p).__name__}")
    g10, g21, g20 = composed_params(g, gprime)
    # round-off can push the sum a hair above one
    if g21 + g20 > 1.0:
        g20 = 1.0 - g21
    params = QutritParams(min(g10, 1.0), min(g21, 1.0), min(g20, 1.0))
    res = closure_residual(g, gprime)
    return CompositionOutcome(params, res <= tol.closure, res)


def compose_superoperators(a: Superoperator, b: Superoperator) -> Superoperator:
    """``M_a · M_b``: the map that applies ``b`` first, then ``a``."""
    if a.dim_in != b.dim_out:
        raise DimensionMismatchError(f"cannot compose: {a.dim_in} != {b.dim_out}")
    return Superoperator(a.matrix @ b.matrix, b.dim_in, a.dim_out)


def gamma20_interpolator(
    g: QutritParams, g20_target: float, tol: Tolerances | None = None
) -> QutritParams | None:
    """ReMAD channel that raises ``γ20`` of ``g`` to ``g20_target``.

    The connecting channel has ``γ'10 = γ'21 = 0``, which leaves ``γ10`` and
    ``γ21`` untouched.  Returns ``None`` when the target is out of reach,
    i.e. above ``1 − γ21`` or when ``γ22 = 0``.

    Raises:
        OutOfDomainError: if the target is below the current ``γ20`` or
            outside [0, 1].
    """
    tol = tol or get_tolerances()
    eps = tol.boundary
    if not -eps <= g20_target <= 1.0 + eps:
        raise OutOfDomainError(f"target {g20_target} outside [0, 1]")
    if g20_target < g.g20 - eps:
        raise OutOfDomainError(f"target {g20_target} below current γ20 = {g.g20}")
    if abs(g20_target - g.g20) <= eps:
        return QutritParams(0.0, 0.0, 0.0)
    if g20_target > 1.0 - g.g21 + eps or g.g22 <= eps:
        return None
    ratio = float(np.clip((g20_target - g.g20) / g.g22, 0.0, 1.0))
    return QutritParams(0.0, 0.0, ratio)
