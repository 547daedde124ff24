"""Liouville representation, Choi matrices and (anti)degradability tests.

Operators are vectorized row-major: the entry ``rho[i, j]`` lands at index
``i * d + j`` (``|i>⊗|j>``).  With that convention a Kraus channel acts as
``M = sum_k K_k ⊗ conj(K_k)``.

Degradability is decided two ways.  The analytic route solves for a ReMAD
degrading channel in closed form (qutrits only).  The numeric route forms
``M_D = M_Φ~ M_Φ^{-1}`` and checks its Choi matrix, which is exact whenever
``M_Φ`` is invertible because the degrading map is then unique.  The numeric
route is treated as ground truth; the analytic one supplies the witness.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .channels import (
    KrausSet,
    QutritParams,
    TransitionMatrix,
    apply_kraus,
    complementary_transition,
    remad_kraus,
)
from .config import Tolerances, get_tolerances
from .errors import (
    BadLengthError,
    DimensionMismatchError,
    InconsistentClassificationError,
    NonSquareError,
    NotOnBoundaryError,
    SingularError,
)
from .linalg import as_density_matrix, partial_trace


def vectorize(m) -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NonSquareError(f"expected a square matrix, got shape {m.shape}")
    return m.reshape(-1).copy()


def devectorize(v) -> np.ndarray:
    v = np.asarray(v).reshape(-1)
    d = int(round(np.sqrt(v.size)))
    if d * d != v.size or d == 0:
        raise BadLengthError(f"length {v.size} is not a perfect square")
    return v.reshape(d, d).copy()


@dataclass(frozen=True, eq=False)
class Superoperator:
    matrix: np.ndarray
    dim_in: int
    dim_out: int

    @classmethod
    def from_matrix(cls, m) -> "Superoperator":
        m = np.asarray(m, dtype=complex)
        di = int(round(np.sqrt(m.shape[1])))
        do = int(round(np.sqrt(m.shape[0])))
        if di * di != m.shape[1] or do * do != m.shape[0]:
            raise BadLengthError(f"superoperator shape {m.shape} is not d_out^2 x d_in^2")
        return cls(m, di, do)

    def apply(self, x) -> np.ndarray:
        x = np.asarray(x)
        if x.shape != (self.dim_in, self.dim_in):
            raise DimensionMismatchError(f"operator shape {x.shape} vs input dim {self.dim_in}")
        return (self.matrix @ x.reshape(-1)).reshape(self.dim_out, self.dim_out)

    @property
    def rank(self) -> int:
        return int(np.linalg.matrix_rank(self.matrix))


_CHECK_STATE_SEED = 20230116


def _check_state(d: int) -> np.ndarray:
    rng = np.random.default_rng(_CHECK_STATE_SEED + d)
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def superoperator_of(k: KrausSet, check: bool = True) -> Superoperator:
    """``M = sum_i K_i ⊗ conj(K_i)``, checked against the Kraus action on one state."""
    m = sum(np.kron(op, op.conj()) for op in k.operators)
    s = Superoperator(np.asarray(m, dtype=complex), k.dim_in, k.dim_out)
    if check:
        rho = _check_state(k.dim_in)
        err = np.max(np.abs(s.apply(rho) - apply_kraus(k, rho)))
        if err > 1e-12:
            raise ArithmeticError(f"superoperator disagrees with Kraus action by {err:.3e}")
    return s


def remad_superoperator(g: TransitionMatrix) -> Superoperator:
    return superoperator_of(remad_kraus(g), check=False)


def complementary_superoperator(g: TransitionMatrix) -> Superoperator:
    """Superoperator of the complementary channel, environment relabelled as system."""
    return superoperator_of(remad_kraus(complementary_transition(g)), check=False)


def _singular_values(m: np.ndarray) -> np.ndarray:
    return np.linalg.svd(m, compute_uv=False)


def is_invertible(m: Superoperator, tol: Tolerances | None = None) -> bool:
    tol = tol or get_tolerances()
    if m.matrix.shape[0] != m.matrix.shape[1]:
        return False
    s = _singular_values(m.matrix)
    return bool(s[-1] >= tol.singular * s[0])


def invert_superoperator(m: Superoperator, tol: Tolerances | None = None) -> Superoperator:
    """Matrix inverse of a square superoperator.

    Raises:
        SingularError: if the smallest singular value is below
            ``tol.singular`` times the largest.
    """
    tol = tol or get_tolerances()
    if m.matrix.shape[0] != m.matrix.shape[1]:
        raise NonSquareError("only square superoperators can be inverted")
    s = _singular_values(m.matrix)
    if s[-1] < tol.singular * s[0]:
        raise SingularError(
            f"superoperator is singular (sigma_min/sigma_max = {s[-1] / s[0]:.3e})"
        )
    return Superoperator(np.linalg.inv(m.matrix), m.dim_out, m.dim_in)


def qutrit_inverse_closed_form(g: QutritParams, rho) -> np.ndarray:
    """Entrywise inverse of the qutrit ReMAD map applied to ``rho``.

    ``rho`` may be any 3x3 operator (the inverse need not return a state).
    """
    tol = get_tolerances().boundary
    a = 1.0 - g.g10
    c = g.g22
    if a <= tol or c <= tol:
        raise SingularError(f"qutrit ReMAD map {g.as_tuple()} is not invertible")
    r = np.asarray(rho, dtype=complex)
    if r.shape != (3, 3):
        raise DimensionMismatchError(f"expected a 3x3 operator, got {r.shape}")
    g10, g21, g20 = g.g10, g.g21, g.g20
    out = np.empty((3, 3), dtype=complex)
    out[0, 0] = r[0, 0] - g10 / a * r[1, 1] + (g10 * g21 - g20 * a) / (a * c) * r[2, 2]
    out[1, 1] = r[1, 1] / a - g21 * r[2, 2] / (a * c)
    out[2, 2] = r[2, 2] / c
    mix = np.sqrt(g10 * g21) / (a * np.sqrt(c))
    out[0, 1] = r[0, 1] / np.sqrt(a) - mix * r[1, 2]
    out[1, 0] = r[1, 0] / np.sqrt(a) - mix * r[2, 1]
    out[0, 2] = r[0, 2] / np.sqrt(c)
    out[2, 0] = r[2, 0] / np.sqrt(c)
    out[1, 2] = r[1, 2] / np.sqrt(a * c)
    out[2, 1] = r[2, 1] / np.sqrt(a * c)
    return out


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    matrix: np.ndarray
    dim_in: int
    dim_out: int


def choi_of(m: Superoperator) -> ChoiMatrix:
    """``C = sum_ij |i><j| ⊗ map(|i><j|)`` (reference first, unnormalized)."""
    di, do = m.dim_in, m.dim_out
    c = m.matrix.reshape(do, do, di, di).transpose(2, 0, 3, 1).reshape(di * do, di * do)
    return ChoiMatrix(c, di, do)


class CPTPReport(NamedTuple):
    ok: bool
    min_eig: float
    tp_defect: float


def is_cptp(m: Superoperator, tol: float | None = None) -> CPTPReport:
    """Complete positivity and trace preservation from the Choi matrix."""
    if tol is None:
        tol = get_tolerances().cptp
    c = choi_of(m)
    h = 0.5 * (c.matrix + c.matrix.conj().T)
    min_eig = float(np.linalg.eigvalsh(h)[0])
    reduced = partial_trace(c.matrix, (m.dim_in, m.dim_out), keep="first")
    tp_defect = float(np.max(np.abs(reduced - np.eye(m.dim_in))))
    return CPTPReport(min_eig >= -tol and tp_defect <= tol, min_eig, tp_defect)


def degrading_superoperator(g: TransitionMatrix, tol: Tolerances | None = None) -> Superoperator:
    """``M_Φ~ M_Φ^{-1}`` (raises :class:`SingularError` if ``M_Φ`` is singular)."""
    inv = invert_superoperator(remad_superoperator(g), tol)
    comp = complementary_superoperator(g)
    return Superoperator(comp.matrix @ inv.matrix, g.dim, g.dim)


def antidegrading_superoperator(g: TransitionMatrix, tol: Tolerances | None = None) -> Superoperator:
    """``M_Φ M_Φ~^{-1}`` (raises :class:`SingularError` if ``M_Φ~`` is singular)."""
    inv = invert_superoperator(complementary_superoperator(g), tol)
    return Superoperator(remad_superoperator(g).matrix @ inv.matrix, g.dim, g.dim)


# -- analytic qutrit formulas ------------------------------------------------


def degrading_params_raw(g: QutritParams) -> tuple[float, float, float]:
    """Unconstrained ReMAD degrading parameters ``(γ'10, γ'21, γ'20)``."""
    tol = get_tolerances().boundary
    a = 1.0 - g.g10
    c = g.g22
    if a <= tol or c <= tol:
        raise SingularError(f"no analytic degrading map at {g.as_tuple()}")
    p10 = (1.0 - 2.0 * g.g10) / a
    p21 = p10 * g.g21 / c
    p20 = (1.0 - g.g21 - 2.0 * g.g20) / c - g.g21 / c * p10
    return (p10, p21, p20)


def antidegrading_params_raw(g: QutritParams) -> tuple[float, float, float]:
    """Unconstrained ReMAD antidegrading parameters ``(γ'10, γ'21, γ'20)``."""
    tol = get_tolerances().boundary
    if g.g10 <= tol or g.g20 <= tol:
        raise SingularError(f"no analytic antidegrading map at {g.as_tuple()}")
    p10 = (2.0 * g.g10 - 1.0) / g.g10
    p21 = g.g21 / g.g20 * p10
    p20 = 2.0 + (g.g21 * (1.0 - g.g10) - g.g10) / (g.g10 * g.g20)
    return (p10, p21, p20)


def domain_margin(p: tuple[float, float, float]) -> float:
    """Signed distance-like margin of a raw triple from the qutrit domain (>0 inside)."""
    p10, p21, p20 = p
    return min(p10, 1.0 - p10, p21, p20, 1.0 - p21 - p20)


def _to_params(p: tuple[float, float, float]) -> QutritParams:
    p10, p21, p20 = (min(max(x, 0.0), 1.0) for x in p)
    if p21 + p20 > 1.0:
        p20 = 1.0 - p21
    return QutritParams(p10, p21, p20)


def analytic_degrading_params(
    g: QutritParams, tol: Tolerances | None = None
) -> QutritParams | None:
    """ReMAD degrading parameters, or ``None`` when they leave the domain."""
    tol = tol or get_tolerances()
    raw = degrading_params_raw(g)
    return _to_params(raw) if domain_margin(raw) >= -tol.cptp else None


def analytic_antidegrading_params(
    g: QutritParams, tol: Tolerances | None = None
) -> QutritParams | None:
    """ReMAD antidegrading parameters, or ``None`` when they leave the domain."""
    tol = tol or get_tolerances()
    raw = antidegrading_params_raw(g)
    return _to_params(raw) if domain_margin(raw) >= -tol.cptp else None


# -- kernel inclusion on singular boundaries ----------------------------------


def _null_space(m: np.ndarray, rel: float) -> np.ndarray:
    _, s, vh = np.linalg.svd(m)
    rank = int(np.sum(s >= rel * s[0]))
    return vh[rank:].conj().T


def _kernel_excess(
    a: np.ndarray, b: np.ndarray, d: int, tol: Tolerances
) -> tuple[bool, str | None]:
    """Is ``ker a`` not contained in ``ker b``?  Returns the verdict and a witness."""
    zero = tol.equality
    for i in range(d):
        for j in range(d):
            if i == j:
                continue
            col = i * d + j
            if np.max(np.abs(a[:, col])) <= zero and np.max(np.abs(b[:, col])) > zero:
                return True, f"|{i}><{j}|"
    null = _null_space(a, tol.singular)
    if null.shape[1] and np.max(np.abs(b @ null)) > zero:
        return True, "null-space vector"
    return False, None


def _on_boundary(g: QutritParams, tol: Tolerances) -> bool:
    return g.g10 >= 1.0 - tol.boundary or g.g22 <= tol.boundary


def kernel_witness(
    g: QutritParams, direction: str = "degradable", tol: Tolerances | None = None
) -> str | None:
    """Witness that ``ker Φ ⊄ ker Φ~`` (``direction="degradable"``) or the reverse.

    Returns the witness label (e.g. ``"|0><2|"``) or ``None`` when the kernel
    inclusion holds and the test is inconclusive.
    """
    tol = tol or get_tolerances()
    t = g.to_transition()
    m = remad_superoperator(t).matrix
    mc = complementary_superoperator(t).matrix
    if direction == "degradable":
        found, witness = _kernel_excess(m, mc, 3, tol)
    elif direction == "antidegradable":
        found, witness = _kernel_excess(mc, m, 3, tol)
    else:
        raise ValueError(f"direction must be 'degradable' or 'antidegradable', got {direction!r}")
    return witness if found else None


def kernel_inclusion_nondegradable(g: QutritParams, tol: Tolerances | None = None) -> bool:
    """True when a kernel witness proves the channel is not degradable.

    Only defined on the singular boundaries ``γ10 = 1`` and ``γ21 + γ20 = 1``.
    """
    tol = tol or get_tolerances()
    if not _on_boundary(g, tol):
        raise NotOnBoundaryError(f"{g.as_tuple()} is not on a singular boundary of the channel")
    return kernel_witness(g, "degradable", tol) is not None


def kernel_inclusion_nonantidegradable(g: QutritParams, tol: Tolerances | None = None) -> bool:
    """True when ``ker Φ~ ⊄ ker Φ`` (so the channel is not antidegradable).

    Only defined where the complementary map is singular (``γ10 = 0`` or
    ``γ20 = 0``).
    """
    tol = tol or get_tolerances()
    if not (g.g10 <= tol.boundary or g.g20 <= tol.boundary):
        raise NotOnBoundaryError(f"{g.as_tuple()}: complementary map is invertible")
    return kernel_witness(g, "antidegradable", tol) is not None


# -- classification ------------------------------------------------------------


class Verdict(str, enum.Enum):
    DEGRADABLE = "Degradable"
    ANTIDEGRADABLE = "Antidegradable"
    NEITHER = "Neither"
    SINGULAR = "SingularCase"


@dataclass(frozen=True)
class SideResult:
    """Outcome of one direction (degrading or antidegrading) of the test."""

    holds: bool | None
    method: str  # "inversion" | "kernel" | "unresolved"
    min_eig: float | None = None
    tp_defect: float | None = None
    analytic_raw: tuple[float, float, float] | None = None
    witness: str | None = None


@dataclass(frozen=True)
class ChannelClassification:
    verdict: Verdict
    analytic_witness: QutritParams | None
    numeric_evidence: float | None
    degradable: SideResult = field(repr=False, default=None)
    antidegradable: SideResult = field(repr=False, default=None)

    @property
    def resolved(self) -> bool:
        return self.verdict in (Verdict.DEGRADABLE, Verdict.ANTIDEGRADABLE)


# Analytic/numeric disagreements closer than this to the domain boundary are
# attributed to round-off, not reported.
_ANALYTIC_MARGIN = 1e-7


def _side(
    g: QutritParams,
    t: TransitionMatrix,
    direction: str,
    tol: Tolerances,
) -> SideResult:
    if direction == "degradable":
        build, raw_fn = degrading_superoperator, degrading_params_raw
    else:
        build, raw_fn = antidegrading_superoperator, antidegrading_params_raw
    try:
        m = build(t, tol)
    except SingularError:
        witness = kernel_witness(g, direction, tol)
        if witness is not None:
            return SideResult(False, "kernel", witness=witness)
        return SideResult(None, "unresolved")
    report = is_cptp(m, tol.cptp)
    raw = None
    try:
        raw = raw_fn(g)
    except SingularError:
        pass
    if raw is not None:
        margin = domain_margin(raw)
        analytic = margin >= -tol.cptp
        if analytic != report.ok and abs(margin) > _ANALYTIC_MARGIN:
            raise InconsistentClassificationError(
                f"{direction} test at {g.as_tuple()}: analytic says {analytic} "
                f"(margin {margin:.3e}), Choi says {report.ok} (min eig {report.min_eig:.3e})"
            )
    return SideResult(report.ok, "inversion", report.min_eig, report.tp_defect, raw)


def classify_qutrit(g: QutritParams, tol: Tolerances | None = None) -> ChannelClassification:
    """Degradable / antidegradable / neither verdict for a qutrit ReMAD channel.

    Both the closed-form region formulas and Choi positivity of the inverted
    maps are evaluated; on the singular boundaries the kernel-inclusion test is
    used instead.  A point that is both degradable and antidegradable has zero
    capacity and is reported as antidegradable.
    """
    tol = tol or get_tolerances()
    t = g.to_transition()
    deg = _side(g, t, "degradable", tol)
    anti = _side(g, t, "antidegradable", tol)
    if anti.holds:
        witness = _to_params(anti.analytic_raw) if anti.analytic_raw else None
        return ChannelClassification(Verdict.ANTIDEGRADABLE, witness, anti.min_eig, deg, anti)
    if deg.holds:
        witness = _to_params(deg.analytic_raw) if deg.analytic_raw else None
        return ChannelClassification(Verdict.DEGRADABLE, witness, deg.min_eig, deg, anti)
    if deg.holds is False and anti.holds is False:
        evidence = [x for x in (deg.min_eig, anti.min_eig) if x is not None]
        return ChannelClassification(
            Verdict.NEITHER, None, min(evidence) if evidence else None, deg, anti
        )
    return ChannelClassification(Verdict.SINGULAR, None, None, deg, anti)


def classify_transition(g: TransitionMatrix, tol: Tolerances | None = None) -> Verdict:
    """Numeric-only verdict for a ReMAD channel of any dimension.

    Singular maps are reported as :attr:`Verdict.SINGULAR` unless the other
    direction settles the question.
    """
    tol = tol or get_tolerances()
    flags = []
    for build in (degrading_superoperator, antidegrading_superoperator):
        try:
            flags.append(is_cptp(build(g, tol), tol.cptp).ok)
        except SingularError:
            flags.append(None)
    deg, anti = flags
    if anti:
        return Verdict.ANTIDEGRADABLE
    if deg:
        return Verdict.DEGRADABLE
    if deg is False and anti is False:
        return Verdict.NEITHER
    return Verdict.SINGULAR


# -- batched numeric path ------------------------------------------------------


def _batch_superops(params: np.ndarray) -> np.ndarray:
    """Stacked 9x9 ReMAD superoperators for an ``(N, 3)`` array of ``(γ10, γ21, γ20)``."""
    g10, g21, g20 = params[:, 0], params[:, 1], params[:, 2]
    g22 = np.clip(1.0 - g21 - g20, 0.0, 1.0)
    n = len(params)
    k = np.zeros((n, 3, 3, 3))
    k[:, 0, 0, 0] = 1.0
    k[:, 0, 1, 1] = np.sqrt(1.0 - g10)
    k[:, 0, 2, 2] = np.sqrt(g22)
    k[:, 1, 0, 1] = np.sqrt(g10)
    k[:, 1, 1, 2] = np.sqrt(g21)
    k[:, 2, 0, 2] = np.sqrt(g20)
    # real Kraus operators, so conj is a no-op
    return np.einsum("nkab,nkij->naibj", k, k).reshape(n, 9, 9)


def _batch_choi_min_eig(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = m.shape[0]
    c = m.reshape(n, 3, 3, 3, 3).transpose(0, 3, 1, 4, 2).reshape(n, 9, 9)
    c = 0.5 * (c + np.swapaxes(c, 1, 2))
    eig = np.linalg.eigvalsh(c)[:, 0]
    red = np.einsum("niaja->nij", c.reshape(n, 3, 3, 3, 3))
    tp = np.max(np.abs(red - np.eye(3)), axis=(1, 2))
    return eig, tp


def batch_numeric_verdicts(
    params, tol: Tolerances | None = None, chunk: int = 4096
) -> dict[str, np.ndarray]:
    """Vectorized Choi test of the inverted maps over many qutrit points.

    Returns arrays ``deg_invertible``, ``deg_min_eig``, ``deg_cptp`` and the
    ``anti_*`` counterparts.  Entries for singular maps are ``nan`` / ``False``.
    """
    tol = tol or get_tolerances()
    params = np.atleast_2d(np.asarray(params, dtype=float))
    n = len(params)
    out = {
        f"{side}_{key}": np.full(n, np.nan) if key == "min_eig" else np.zeros(n, bool)
        for side in ("deg", "anti")
        for key in ("invertible", "min_eig", "cptp")
    }
    for start in range(0, n, chunk):
        sl = slice(start, min(start + chunk, n))
        p = params[sl]
        comp = np.stack([1.0 - p[:, 0], p[:, 1], np.clip(1.0 - p[:, 1] - p[:, 2], 0, 1)], axis=1)
        m_phi = _batch_superops(p)
        m_comp = _batch_superops(comp)
        for side, num, den in (("deg", m_comp, m_phi), ("anti", m_phi, m_comp)):
            s = np.linalg.svd(den, compute_uv=False)
            ok = s[:, -1] >= tol.singular * s[:, 0]
            idx = np.nonzero(ok)[0]
            if idx.size:
                prod = num[idx] @ np.linalg.inv(den[idx])
                eig, tp = _batch_choi_min_eig(prod)
                out[f"{side}_min_eig"][sl][idx] = eig
                out[f"{side}_cptp"][sl][idx] = (eig >= -tol.cptp) & (tp <= tol.cptp)
            out[f"{side}_invertible"][sl] = ok
    return out


def batch_analytic_margins(params, tol: Tolerances | None = None) -> dict[str, np.ndarray]:
    """Vectorized closed-form region test over many qutrit points.

    Returns ``deg_margin`` / ``anti_margin`` (``nan`` where the formula is
    singular) and the boolean ``deg_region`` / ``anti_region`` obtained with
    the same slack as the numeric CPTP test.
    """
    tol = tol or get_tolerances()
    p = np.atleast_2d(np.asarray(params, dtype=float))
    g10, g21, g20 = p[:, 0], p[:, 1], p[:, 2]
    g22 = np.clip(1.0 - g21 - g20, 0.0, 1.0)
    eps = tol.boundary
    with np.errstate(divide="ignore", invalid="ignore"):
        a = 1.0 - g10
        d10 = (1.0 - 2.0 * g10) / a
        d21 = d10 * g21 / g22
        d20 = (1.0 - g21 - 2.0 * g20) / g22 - g21 / g22 * d10
        a10 = (2.0 * g10 - 1.0) / g10
        a21 = g21 / g20 * a10
        a20 = 2.0 + (g21 * (1.0 - g10) - g10) / (g10 * g20)

    def margin(x10, x21, x20, ok):
        m = np.minimum.reduce([x10, 1.0 - x10, x21, x20, 1.0 - x21 - x20])
        return np.where(ok, m, np.nan)

    with np.errstate(invalid="ignore"):
        deg = margin(d10, d21, d20, (a > eps) & (g22 > eps))
        anti = margin(a10, a21, a20, (g10 > eps) & (g20 > eps))
    return {
        "deg_margin": deg,
        "anti_margin": anti,
        "deg_region": deg >= -tol.cptp,
        "anti_region": anti >= -tol.cptp,
    }
