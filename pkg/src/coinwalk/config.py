"""Numerical tolerances shared by all modules.

Every check in the package reads its threshold from a :class:`Tolerances`
instance. Functions accept an optional ``tol`` argument; when omitted the
module-level :data:`DEFAULT` is used.
"""
from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    unitary: float = 1e-12  # max-norm of U^dag U - I
    projector: float = 1e-12
    kraus: float = 1e-12  # both completeness sums
    eig: float = 1e-10  # eigenpair residual / orthonormality
    degeneracy: float = 1e-8  # angular distance grouping eigenvalues of a unitary
    subspace: float = 1e-10  # rhs distance from the projector range
    condition_bound: float = 1e12  # one-norm condition number ceiling
    norm: float = 1e-10  # state normalization / trace
    theta_slack: float = 1e-9  # accepted overshoot of pi/4 from decimal input

    def with_(self, **changes) -> "Tolerances":
        return replace(self, **changes)


DEFAULT = Tolerances()


def resolve(tol: Tolerances | None) -> Tolerances:
    return DEFAULT if tol is None else tol
