"""Numerical tolerances used across the package.

All thresholds live in a single :class:`Tolerances` record so that the
library, the tests and the command line agree on one set of numbers.  The
active record is chosen by the ``REMAD_TOLERANCE_PROFILE`` environment
variable (``default`` or ``strict``).
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass

PROFILE_ENV = "REMAD_TOLERANCE_PROFILE"


@dataclass(frozen=True)
class Tolerances:
    hermiticity: float = 1e-9
    trace: float = 1e-12
    psd: float = 1e-10
    equality: float = 1e-10
    # transition-matrix row sums and Kraus completeness
    stochastic: float = 1e-12
    # candidate (anti)degrading maps: min Choi eigenvalue and TP defect
    cptp: float = 1e-9
    # smallest/largest singular value ratio below which a superoperator is singular
    singular: float = 1e-10
    closure: float = 1e-10
    boundary: float = 1e-12

    def replace(self, **overrides: float) -> "Tolerances":
        unknown = set(overrides) - {f.name for f in dataclasses.fields(self)}
        if unknown:
            raise KeyError(f"unknown tolerance field(s): {sorted(unknown)}")
        return dataclasses.replace(self, **{k: float(v) for k, v in overrides.items()})

    def as_dict(self) -> dict[str, float]:
        return dataclasses.asdict(self)


PROFILES: dict[str, Tolerances] = {
    "default": Tolerances(),
    "strict": Tolerances(
        hermiticity=1e-11,
        psd=1e-12,
        equality=1e-12,
        cptp=1e-11,
        singular=1e-12,
        closure=1e-12,
    ),
}


def get_tolerances(profile: str | None = None) -> Tolerances:
    """Return the tolerance record for ``profile`` (or the environment's choice)."""
    name = profile or os.environ.get(PROFILE_ENV, "default")
    try:
        return PROFILES[name]
    except KeyError:
        raise KeyError(
            f"unknown tolerance profile {name!r}; expected one of {sorted(PROFILES)}"
        ) from None


DEFAULT = PROFILES["default"]
