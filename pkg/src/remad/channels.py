"""Multilevel amplitude damping channels built from transition matrices.

A transition matrix ``Γ`` is lower triangular; ``Γ[j, k]`` is the probability
that level ``j`` decays to level ``k <= j`` and every row sums to one.  The
resonant variant (ReMAD) lets equal-gap jumps excite the same environment
level, so it needs only ``d`` Kraus operators; the distinguishable-jump
variant (MAD) needs ``1 + d(d-1)/2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Iterable, Literal, Sequence

import numpy as np

from .config import Tolerances, get_tolerances
from .errors import DimensionMismatchError, OutOfDomainError, OutOfRangeError
from .linalg import as_density_matrix, partial_trace


def _clip_unit(x: float, tol: float, what: str) -> float:
    if x < -tol or x > 1 + tol or not np.isfinite(x):
        raise OutOfDomainError(f"{what}={x!r} is not a probability")
    return min(max(float(x), 0.0), 1.0)


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    """Lower-triangular stochastic matrix ``gamma[j, k]`` (``k <= j``)."""

    gamma: np.ndarray

    def __post_init__(self):
        tol = get_tolerances().stochastic
        g = np.array(self.gamma, dtype=float)
        if g.ndim != 2 or g.shape[0] != g.shape[1] or g.shape[0] < 2:
            raise OutOfDomainError(f"transition matrix must be d x d with d >= 2, got {g.shape}")
        if np.any(np.abs(np.triu(g, 1)) > 0):
            raise OutOfDomainError("transition matrix must be lower triangular")
        d = g.shape[0]
        for j in range(d):
            for k in range(j + 1):
                g[j, k] = _clip_unit(g[j, k], tol, f"gamma[{j},{k}]")
            s = g[j, : j + 1].sum()
            if abs(s - 1.0) > tol:
                raise OutOfDomainError(f"row {j} sums to {s!r}, not 1")
        g[0, 0] = 1.0
        g.setflags(write=False)
        object.__setattr__(self, "gamma", g)

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[float]]) -> "TransitionMatrix":
        rows = [list(r) for r in rows]
        d = len(rows)
        g = np.zeros((d, d))
        for j, r in enumerate(rows):
            if len(r) != j + 1:
                raise OutOfDomainError(f"row {j} must have {j + 1} entries, got {len(r)}")
            g[j, : j + 1] = r
        return cls(g)

    @classmethod
    def identity(cls, d: int) -> "TransitionMatrix":
        return cls(np.eye(d))

    @property
    def dim(self) -> int:
        return self.gamma.shape[0]

    def rows(self) -> list[list[float]]:
        return [list(self.gamma[j, : j + 1]) for j in range(self.dim)]

    def __getitem__(self, jk: tuple[int, int]) -> float:
        return float(self.gamma[jk])

    def allclose(self, other: "TransitionMatrix", atol: float = 1e-12) -> bool:
        return self.dim == other.dim and bool(np.allclose(self.gamma, other.gamma, rtol=0, atol=atol))

    def __repr__(self) -> str:
        return f"TransitionMatrix({self.rows()!r})"


@dataclass(frozen=True)
class QutritParams:
    """Qutrit decay probabilities ``(γ10, γ21, γ20)`` with ``γ21 + γ20 <= 1``."""

    g10: float
    g21: float
    g20: float

    def __post_init__(self):
        tol = get_tolerances().boundary
        g10 = _clip_unit(self.g10, tol, "g10")
        g21 = _clip_unit(self.g21, tol, "g21")
        g20 = _clip_unit(self.g20, tol, "g20")
        if g21 + g20 > 1 + tol:
            raise OutOfDomainError(f"g21 + g20 = {g21 + g20!r} exceeds 1")
        object.__setattr__(self, "g10", g10)
        object.__setattr__(self, "g21", g21)
        object.__setattr__(self, "g20", g20)

    @property
    def g22(self) -> float:
        """Survival probability of level 2."""
        return max(0.0, 1.0 - self.g21 - self.g20)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.g10, self.g21, self.g20)

    def to_transition(self) -> TransitionMatrix:
        return qutrit_params_to_transition(self)

    @classmethod
    def from_transition(cls, t: TransitionMatrix) -> "QutritParams":
        if t.dim != 3:
            raise DimensionMismatchError(f"expected a qutrit transition matrix, got d={t.dim}")
        return cls(t[1, 0], t[2, 1], t[2, 0])


def qutrit_params_to_transition(p: QutritParams) -> TransitionMatrix:
    return TransitionMatrix.from_rows(
        [[1.0], [p.g10, 1.0 - p.g10], [p.g20, p.g21, p.g22]]
    )


def beamsplitter_transition(eta: float, d: int) -> TransitionMatrix:
    """Transition matrix of a Fock-encoded qudit through a beamsplitter.

    ``eta`` is the per-photon transmittance, so
    ``gamma[j, k] = C(j, k) eta**k (1 - eta)**(j - k)``.
    """
    if not 0.0 <= eta <= 1.0:
        raise OutOfRangeError(f"transmittance {eta!r} outside [0, 1]")
    if d < 2:
        raise OutOfRangeError(f"dimension must be >= 2, got {d}")
    g = np.zeros((d, d))
    for j in range(d):
        for k in range(j + 1):
            g[j, k] = comb(j, k) * eta**k * (1.0 - eta) ** (j - k)
    return TransitionMatrix(g)


def beamsplitter_params(eta: float) -> QutritParams:
    return QutritParams.from_transition(beamsplitter_transition(eta, 3))


def complementary_transition(g: TransitionMatrix) -> TransitionMatrix:
    """Environment-side transition matrix, ``γ~[j, k] = γ[j, j-k]``."""
    d = g.dim
    out = np.zeros((d, d))
    for j in range(d):
        out[j, : j + 1] = g.gamma[j, j::-1]
    return TransitionMatrix(out)


@dataclass(frozen=True, eq=False)
class KrausSet:
    operators: tuple[np.ndarray, ...]
    dim_in: int
    dim_out: int

    @classmethod
    def from_operators(cls, ops: Iterable, check: bool = True) -> "KrausSet":
        ops = tuple(np.asarray(k, dtype=complex) for k in ops)
        if not ops:
            raise DimensionMismatchError("empty Kraus set")
        shape = ops[0].shape
        if any(k.shape != shape for k in ops):
            raise DimensionMismatchError("Kraus operators have mismatched shapes")
        ks = cls(ops, dim_in=shape[1], dim_out=shape[0])
        if check:
            defect = ks.completeness_defect()
            tol = get_tolerances().stochastic
            if defect > tol:
                raise OutOfDomainError(f"Kraus completeness violated by {defect:.3e}")
        return ks

    def completeness_defect(self) -> float:
        s = sum(k.conj().T @ k for k in self.operators)
        return float(np.max(np.abs(s - np.eye(self.dim_in))))

    def __len__(self) -> int:
        return len(self.operators)

    def __iter__(self):
        return iter(self.operators)


def remad_kraus(g: TransitionMatrix) -> KrausSet:
    """``K_i = sum_l sqrt(γ[i+l, l]) |l><i+l|`` for ``i = 0..d-1``."""
    d = g.dim
    ops = []
    for i in range(d):
        k = np.zeros((d, d), dtype=complex)
        for l in range(d - i):
            k[l, i + l] = np.sqrt(g.gamma[i + l, l])
        ops.append(k)
    return KrausSet.from_operators(ops)


def mad_kraus(g: TransitionMatrix) -> KrausSet:
    """Diagonal survival operator followed by one operator per jump ``(j, k)``.

    Jumps are ordered lexicographically in ``(j, k)``, with ``k`` the number of
    levels descended.
    """
    d = g.dim
    ops = [np.diag(np.sqrt(np.diag(g.gamma))).astype(complex)]
    for j in range(1, d):
        for k in range(1, j + 1):
            m = np.zeros((d, d), dtype=complex)
            m[j - k, j] = np.sqrt(g.gamma[j, j - k])
            ops.append(m)
    return KrausSet.from_operators(ops)


def apply_kraus(k: KrausSet, x) -> np.ndarray:
    """Raw linear action ``sum_i K_i x K_i†`` on an arbitrary operator."""
    x = np.asarray(x, dtype=complex)
    if x.shape != (k.dim_in, k.dim_in):
        raise DimensionMismatchError(f"operator shape {x.shape} does not match input dim {k.dim_in}")
    ops = np.stack(k.operators)
    return np.einsum("kab,bc,kdc->ad", ops, x, ops.conj())


def apply_channel(k: KrausSet, rho, tol: Tolerances | None = None) -> np.ndarray:
    """Apply a Kraus channel to a density matrix and return the output state."""
    rho = as_density_matrix(rho, tol)
    out = apply_kraus(k, rho)
    return 0.5 * (out + out.conj().T)


def stinespring_unitary(g: TransitionMatrix) -> np.ndarray:
    """Unitary on system ⊗ environment extending ``|j>|0> -> sum_k sqrt(γ[j,j-k]) |j-k>|k>``.

    Only the ``|j>|0>`` columns are physical; the rest are completed by
    Gram-Schmidt over the canonical basis, which keeps the result
    deterministic.
    """
    d = g.dim
    n = d * d
    u = np.zeros((n, n), dtype=complex)
    filled = []
    for j in range(d):
        col = np.zeros(n, dtype=complex)
        for k in range(j + 1):
            col[(j - k) * d + k] = np.sqrt(g.gamma[j, j - k])
        u[:, j * d] = col
        filled.append(j * d)
    basis = [u[:, c] for c in filled]
    free = [c for c in range(n) if c not in filled]
    e = 0
    for c in free:
        while True:
            v = np.zeros(n, dtype=complex)
            v[e] = 1.0
            e += 1
            for b in basis:
                v -= np.vdot(b, v) * b
            norm = np.linalg.norm(v)
            if norm > 1e-8:
                break
        v /= norm
        # second pass restores orthogonality lost to rounding
        for b in basis:
            v -= np.vdot(b, v) * b
        v /= np.linalg.norm(v)
        u[:, c] = v
        basis.append(v)
    return u


def stinespring_apply(
    g: TransitionMatrix,
    rho,
    trace_out: Literal["environment", "system"] = "environment",
    tol: Tolerances | None = None,
) -> np.ndarray:
    """Evolve ``rho ⊗ |0><0|_E`` with the dilation unitary and trace one side out.

    Tracing the system gives the complementary output expressed in the
    environment basis, which equals the ReMAD output of the complementary
    transition matrix.
    """
    rho = as_density_matrix(rho, tol)
    d = g.dim
    if rho.shape != (d, d):
        raise DimensionMismatchError(f"state of dim {rho.shape[0]} vs channel dim {d}")
    env0 = np.zeros((d, d))
    env0[0, 0] = 1.0
    u = stinespring_unitary(g)
    joint = u @ np.kron(rho, env0) @ u.conj().T
    if trace_out == "environment":
        out = partial_trace(joint, (d, d), keep="first")
    elif trace_out == "system":
        out = partial_trace(joint, (d, d), keep="second")
    else:
        raise ValueError(f"trace_out must be 'environment' or 'system', got {trace_out!r}")
    return 0.5 * (out + out.conj().T)


def covariance_unitary(theta: float, d: int) -> np.ndarray:
    """``diag(exp(-i j theta))`` for ``j = 0..d-1``."""
    if d < 2:
        raise OutOfRangeError(f"dimension must be >= 2, got {d}")
    return np.diag(np.exp(-1j * theta * np.arange(d)))


def parse_transition_text(text: str) -> TransitionMatrix:
    """Parse the row-per-line text format (``#`` starts a comment)."""
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            rows.append([float(tok) for tok in line.split()])
        except ValueError as exc:
            raise OutOfDomainError(f"line {lineno}: {exc}") from None
    if not rows:
        raise OutOfDomainError("no rows found in transition matrix text")
    return TransitionMatrix.from_rows(rows)


def format_transition_text(g: TransitionMatrix) -> str:
    return "".join(" ".join(f"{x:.17g}" for x in row) + "\n" for row in g.rows())
