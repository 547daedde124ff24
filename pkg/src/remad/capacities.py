"""Entropic functionals and capacities of qutrit ReMAD channels.

All entropies are in bits.  The diagonal-input reductions rely on the phase
covariance of the channel: for degradable points the coherent information is
maximized on diagonal states, and the mutual information is always maximized
there.  Diagonal objectives are evaluated by the kernels in :mod:`remad.kernels`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from . import kernels
from .channels import (
    QutritParams,
    TransitionMatrix,
    apply_kraus,
    complementary_transition,
    remad_kraus,
)
from .config import Tolerances, get_tolerances
from .errors import InvalidDensityError, NotDegradableError, OutOfDomainError, OutOfRangeError
from .linalg import as_density_matrix, entropy_of_spectrum, von_neumann_entropy
from .liouville import Verdict, classify_qutrit

LOG2_3 = math.log2(3.0)
DEFAULT_RESOLUTION = 200


class Method(str, enum.Enum):
    CLOSED_FORM = "ClosedForm"
    DIAGONAL_OPTIMIZATION = "DiagonalOptimization"
    ZERO_BY_ANTIDEGRADABILITY = "ZeroByAntidegradability"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class DiagonalInput:
    populations: tuple[float, ...]

    def __post_init__(self):
        p = np.asarray(self.populations, dtype=float)
        tol = get_tolerances()
        if p.ndim != 1 or p.size < 2:
            raise InvalidDensityError("need at least two populations")
        if np.any(p < -tol.psd) or np.any(p > 1 + tol.psd):
            raise InvalidDensityError(f"populations {p} outside [0, 1]")
        if abs(p.sum() - 1.0) > tol.trace:
            raise InvalidDensityError(f"populations sum to {p.sum()!r}")
        object.__setattr__(self, "populations", tuple(float(x) for x in np.clip(p, 0, 1)))

    @classmethod
    def qutrit(cls, p1: float, p2: float) -> "DiagonalInput":
        return cls((1.0 - p1 - p2, p1, p2))

    def as_density(self) -> np.ndarray:
        return np.diag(np.asarray(self.populations, dtype=complex))


@dataclass(frozen=True)
class CapacityResult:
    """A capacity value with provenance.

    For ``method == Method.UNKNOWN`` the ``value`` is only a lower bound and
    ``bracket`` holds ``(lower, upper)``.
    """

    value: float
    method: Method
    argmax: DiagonalInput | None = None
    optimizer_evals: int = 0
    bracket: tuple[float, float] | None = None

    @property
    def exact(self) -> bool:
        return self.method is not Method.UNKNOWN


# -- entropic functionals -----------------------------------------------------


def _output_entropy(g: TransitionMatrix, rho: np.ndarray, tol: Tolerances) -> float:
    out = apply_kraus(remad_kraus(g), rho)
    out = 0.5 * (out + out.conj().T)
    return entropy_of_spectrum(np.linalg.eigvalsh(out), tol)


def coherent_information(g: TransitionMatrix, rho, tol: Tolerances | None = None) -> float:
    """``S(Φ(ρ)) − S(Φ~(ρ))`` for the ReMAD channel of ``g``."""
    tol = tol or get_tolerances()
    rho = as_density_matrix(rho, tol)
    return _output_entropy(g, rho, tol) - _output_entropy(complementary_transition(g), rho, tol)


def mutual_information(g: TransitionMatrix, rho, tol: Tolerances | None = None) -> float:
    """Quantum mutual information ``S(ρ) + I_coh(Φ, ρ)``."""
    tol = tol or get_tolerances()
    return von_neumann_entropy(rho, tol) + coherent_information(g, rho, tol)


def _shannon(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def diagonal_information(g: TransitionMatrix, populations, mutual: bool = False) -> float:
    """Coherent (or mutual) information of a diagonal input, any dimension.

    Diagonal inputs stay diagonal: the output populations are ``p @ Γ`` and
    the environment populations are ``p @ Γ~``.
    """
    p = np.asarray(populations, dtype=float)
    q = p @ g.gamma
    r = p @ complementary_transition(g).gamma
    v = _shannon(q) - _shannon(r)
    return v + _shannon(p) if mutual else v


def binary_entropy(x: float) -> float:
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


# -- optimizers -----------------------------------------------------------------


def project_to_simplex(v) -> np.ndarray:
    """Euclidean projection onto the probability simplex."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    k = np.arange(1, v.size + 1)
    rho = np.nonzero(u - css / k > 0)[0][-1]
    return np.maximum(v - css[rho] / (rho + 1.0), 0.0)


class _DiagonalOptimum(NamedTuple):
    value: float
    p1: float
    p2: float
    evals: int


def _maximize_diagonal(g: QutritParams, resolution: int, mode: int) -> _DiagonalOptimum:
    """Grid search over the 2-simplex, then Nelder–Mead on the projected objective."""
    if resolution < 1:
        raise OutOfRangeError(f"resolution must be positive, got {resolution}")
    g10, g21, g20 = g.as_tuple()
    best, p1, p2, evals = kernels.simplex_grid_argmax(g10, g21, g20, int(resolution), mode)

    def f(x):
        p = project_to_simplex(np.array([1.0 - x[0] - x[1], x[0], x[1]]))
        return -kernels.diag_objective(g10, g21, g20, p[1], p[2], mode)

    h = 1.0 / resolution
    start = np.array([p1, p2])
    simplex = np.array([start, start + [h, 0.0], start + [0.0, h]])
    res = minimize(
        f,
        start,
        method="Nelder-Mead",
        options={"initial_simplex": simplex, "xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000},
    )
    evals += int(res.nfev)
    if -res.fun > best:
        p = project_to_simplex(np.array([1.0 - res.x[0] - res.x[1], res.x[0], res.x[1]]))
        best, p1, p2 = float(-res.fun), float(p[1]), float(p[2])
    return _DiagonalOptimum(float(best), p1, p2, evals)


def _as_params(g) -> QutritParams:
    if isinstance(g, QutritParams):
        return g
    if isinstance(g, TransitionMatrix):
        return QutritParams.from_transition(g)
    return QutritParams(*g)


def diagonal_q1(
    g: QutritParams,
    resolution: int = DEFAULT_RESOLUTION,
    strict: bool = False,
    tol: Tolerances | None = None,
) -> CapacityResult:
    """Maximum coherent information over diagonal qutrit inputs.

    At degradable points this is the quantum (and private) capacity.
    Elsewhere the value is only a lower bound and is tagged ``Unknown``,
    unless ``strict`` is set, in which case :class:`NotDegradableError` is raised.
    """
    g = _as_params(g)
    tol = tol or get_tolerances()
    cls = classify_qutrit(g, tol)
    degradable = bool(cls.degradable.holds)
    if strict and not degradable:
        raise NotDegradableError(f"{g.as_tuple()} is {cls.verdict.value}")
    opt = _maximize_diagonal(g, resolution, 0)
    value = max(opt.value, 0.0)
    method = Method.DIAGONAL_OPTIMIZATION if degradable else Method.UNKNOWN
    return CapacityResult(
        value, method, DiagonalInput.qutrit(opt.p1, opt.p2), opt.evals,
        None if degradable else (value, LOG2_3),
    )


def _maximize_scalar(fun, evals_hint: int = 0) -> tuple[float, float, int]:
    """Maximize ``fun`` on [0, 1] with bounded Brent; endpoints are also checked."""
    res = minimize_scalar(lambda p: -fun(p), bounds=(0.0, 1.0), method="bounded",
                          options={"xatol": 1e-10})
    best_p, best = float(res.x), float(-res.fun)
    for p in (0.0, 1.0):
        v = fun(p)
        if v > best:
            best_p, best = p, v
    return best, best_p, int(res.nfev) + 2 + evals_hint


def qubit_adc_capacity(x: float) -> float:
    """Quantum capacity of the qubit amplitude-damping channel with damping ``x``.

    ``max_p H2((1 - x) p) − H2(x p)``, identically zero for ``x ≥ 1/2``.
    """
    if not 0.0 <= x <= 1.0:
        raise OutOfRangeError(f"damping {x} outside [0, 1]")
    if x >= 0.5:
        return 0.0
    value, _, _ = _maximize_scalar(lambda p: binary_entropy((1 - x) * p) - binary_entropy(x * p))
    return max(value, 0.0)


def _h(x: float) -> float:
    return -x * math.log2(x) if x > 0.0 else 0.0


def edge_q(g21: float, g20: float) -> float:
    """Effective-qubit capacity function on the ``γ10 = 1`` face.

    Maximum over inputs ``(1 − p)|0><0| + p|2><2|`` of the diagonal coherent
    information; set to zero for ``γ20 ≥ (1 − γ21)/2``.
    """
    tol = get_tolerances().boundary
    if g21 < -tol or g20 < -tol or g21 + g20 > 1 + tol:
        raise OutOfDomainError(f"({g21}, {g20}) outside the γ10 = 1 face")
    g21, g20 = max(g21, 0.0), max(g20, 0.0)
    if g20 >= (1.0 - g21) / 2.0:
        return 0.0
    g22 = max(1.0 - g21 - g20, 0.0)

    def f(p):
        return (_h(1 - (1 - g20) * p) + _h(g22 * p)
                - _h(1 - (g21 + g20) * p) - _h(g20 * p))

    value, _, _ = _maximize_scalar(f)
    return max(value, 0.0)


def _check_plane(a: float, b: float, what: str, tol: Tolerances, simplex: bool) -> None:
    eps = tol.boundary
    if not (-eps <= a <= 1 + eps and -eps <= b <= 1 + eps):
        raise (OutOfDomainError if simplex else OutOfRangeError)(f"{what} ({a}, {b}) outside [0, 1]")
    if simplex and a + b > 1 + eps:
        raise OutOfDomainError(f"{what} ({a}, {b}): sum exceeds 1")


def _diag_result(g: QutritParams, resolution: int) -> CapacityResult:
    opt = _maximize_diagonal(g, resolution, 0)
    return CapacityResult(
        max(opt.value, 0.0), Method.DIAGONAL_OPTIMIZATION,
        DiagonalInput.qutrit(opt.p1, opt.p2), opt.evals,
    )


def plane_gamma10_zero_capacity(
    g21: float, g20: float, resolution: int = DEFAULT_RESOLUTION
) -> CapacityResult:
    """Capacity on the ``γ10 = 0`` plane.

    The span of ``{|0>, |1>}`` is noiseless there, so the capacity is at
    least one bit.  It equals one bit for ``γ21 + γ20 ≥ 1/2``; below that the
    channel is degradable and the diagonal optimum applies.
    """
    tol = get_tolerances()
    _check_plane(g21, g20, "(γ21, γ20)", tol, simplex=True)
    if g21 + g20 >= 0.5:
        return CapacityResult(1.0, Method.CLOSED_FORM, DiagonalInput.qutrit(0.5, 0.0))
    r = _diag_result(QutritParams(0.0, g21, g20), resolution)
    if r.value < 1.0:
        return CapacityResult(1.0, r.method, DiagonalInput.qutrit(0.5, 0.0), r.optimizer_evals)
    return r


def plane_gamma21_zero_capacity(
    g10: float, g20: float, resolution: int = DEFAULT_RESOLUTION
) -> CapacityResult:
    """Capacity on the ``γ21 = 0`` plane, dispatched by quadrant.

    Both parameters at least 1/2: antidegradable, zero.  One on each side:
    the qubit ADC value of the smaller one.  Both below 1/2: degradable,
    diagonal optimum.
    """
    tol = get_tolerances()
    _check_plane(g10, g20, "(γ10, γ20)", tol, simplex=False)
    lo, hi = min(g10, g20), max(g10, g20)
    if lo >= 0.5:
        return CapacityResult(0.0, Method.ZERO_BY_ANTIDEGRADABILITY)
    if hi >= 0.5:
        return CapacityResult(qubit_adc_capacity(min(max(lo, 0.0), 1.0)), Method.CLOSED_FORM)
    return _diag_result(QutritParams(g10, 0.0, g20), resolution)


def edge_gamma10_one_capacity(g21: float, g20: float) -> CapacityResult:
    """Quantum capacity on the ``γ10 = 1`` face.

    The value is the best of two effective qubits: inputs on ``{|0>, |2>}``
    give ``edge_q(γ21, γ20)`` and inputs on ``{|1>, |2>}`` give
    ``edge_q(γ22, γ20)``.  It is exact on the lines ``γ21 = 0`` and
    ``γ21 + γ20 = 1``; elsewhere it is a lower bound tagged ``Unknown``.
    """
    tol = get_tolerances()
    _check_plane(g21, g20, "(γ21, γ20)", tol, simplex=True)
    g22 = max(1.0 - g21 - g20, 0.0)
    value = max(edge_q(g21, g20), edge_q(g22, g20))
    if g21 <= tol.boundary or g22 <= tol.boundary:
        return CapacityResult(value, Method.CLOSED_FORM)
    return CapacityResult(value, Method.UNKNOWN, bracket=(value, LOG2_3))


class EACapacity(NamedTuple):
    ce: float
    qe: float
    argmax: DiagonalInput
    optimizer_evals: int


def entanglement_assisted_capacity(
    g: QutritParams, resolution: int = DEFAULT_RESOLUTION
) -> EACapacity:
    """``C_E = max I(Φ, ρ)`` over diagonal inputs and ``Q_E = C_E / 2``.

    The mutual information is concave and covariant, so the diagonal grid plus
    local refinement finds the global maximum at every point of the domain.
    """
    g = _as_params(g)
    opt = _maximize_diagonal(g, resolution, 1)
    ce = min(max(opt.value, 0.0), 2 * LOG2_3)
    return EACapacity(ce, ce / 2.0, DiagonalInput.qutrit(opt.p1, opt.p2), opt.evals)


# -- dispatch -------------------------------------------------------------------

_MONOTONE_STEPS = 64


def _resolved_q(g: QutritParams, resolution: int, tol: Tolerances) -> CapacityResult | None:
    """Q at ``g`` if some regime resolves it, else ``None``."""
    eps = tol.boundary
    if g.g10 <= eps:
        return plane_gamma10_zero_capacity(g.g21, g.g20, resolution)
    if g.g21 <= eps:
        return plane_gamma21_zero_capacity(g.g10, g.g20, resolution)
    if g.g10 >= 1 - eps:
        r = edge_gamma10_one_capacity(g.g21, g.g20)
        return r if r.exact else None
    cls = classify_qutrit(g, tol)
    if cls.verdict is Verdict.ANTIDEGRADABLE:
        return CapacityResult(0.0, Method.ZERO_BY_ANTIDEGRADABILITY)
    if cls.verdict is Verdict.DEGRADABLE:
        return _diag_result(g, resolution)
    return None


def monotonicity_upper_bound(
    g: QutritParams, resolution: int = DEFAULT_RESOLUTION, tol: Tolerances | None = None
) -> float:
    """Upper bound on Q from the nearest resolved point with smaller ``γ20``.

    Raising ``γ20`` with ``γ10, γ21`` fixed is a post-processing by another
    ReMAD channel, so Q cannot increase.  The scan walks down in ``γ20`` and
    stops at the first resolved point; the bound is capped by ``Q_E``.
    """
    g = _as_params(g)
    tol = tol or get_tolerances()
    cap = min(LOG2_3, entanglement_assisted_capacity(g, resolution).qe)
    for g20 in np.linspace(g.g20, 0.0, _MONOTONE_STEPS + 1)[1:]:
        r = _resolved_q(QutritParams(g.g10, g.g21, float(g20)), resolution, tol)
        if r is not None:
            return min(cap, r.value)
    return cap


def capacity_dispatch(
    g: QutritParams, resolution: int = DEFAULT_RESOLUTION, tol: Tolerances | None = None
) -> tuple[CapacityResult, CapacityResult | None]:
    """Quantum capacity ``Q`` and private capacity ``Cp`` at a qutrit point.

    In every resolved regime ``Q = Cp``.  In the unresolved region ``Q`` is
    tagged ``Unknown`` with a ``(lower, upper)`` bracket and ``Cp`` is ``None``.
    """
    g = _as_params(g)
    tol = tol or get_tolerances()
    r = _resolved_q(g, resolution, tol)
    if r is not None:
        return r, r
    diag = _maximize_diagonal(g, resolution, 0)
    lo = max(diag.value, 0.0)
    if g.g10 >= 1 - tol.boundary:
        lo = max(lo, edge_gamma10_one_capacity(g.g21, g.g20).value)
    hi = max(monotonicity_upper_bound(g, resolution, tol), lo)
    q = CapacityResult(
        lo, Method.UNKNOWN, DiagonalInput.qutrit(diag.p1, diag.p2), diag.evals, (lo, hi)
    )
    return q, None
