"""Differentially private covariance release by Gaussian random projection.

A data holder wants to publish enough about a covariance ``F F^T`` for an
analyst to evaluate directional variance queries ``y^T F F^T y``, without
publishing ``F``.  The release is

    P = (1/sqrt(r)) * R * A_hat,      A_hat = [ F^T ]   ((k+n) x n)
                                              [ w I ]

where ``R`` is an r x (k+n) matrix of independent standard normals and
``w > 0`` is a spectral floor stacked under the factor so that
``A_hat^T A_hat = F F^T + w^2 I`` has least singular value at least ``w``.
For any query direction ``y``,

    E ||P y||^2 = y^T F F^T y + w^2 ||y||^2,

and with ``r`` rows the answer concentrates within a multiplicative
``1 +/- eta`` of that mean with failure probability ``nu`` per query.
The parameters are

    r = ceil(8 ln(2/nu) / eta^2),
    w = (16 sqrt(r ln(2/delta)) / epsilon) * ln(16 r / delta),

which make the release (epsilon, delta)-differentially private; the floor
inflates every answer by ``w^2 ||y||^2``, giving the mechanism-level
additive constant ``tau_mech = (1 + eta) w^2`` for unit queries.  A
closed-form additive constant ``tau`` for the end-to-end ratio guarantee is
also provided; both are reported side by side because the closed form is a
loose analytical bound while ``tau_mech`` reflects the mechanism actually
run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvalidInputError, ShapeError

__all__ = [
    "PrivacyParams",
    "JlParams",
    "PrivateProjection",
    "jl_params",
    "tau",
    "tau_mechanism",
    "privatize_covariance",
    "private_directional_variance",
    "private_sum_directional_variances",
]


@dataclass(frozen=True)
class PrivacyParams:
    """Privacy and accuracy parameters of one release.

    epsilon, delta: the differential-privacy budget; eta: multiplicative
    query accuracy in (0, 1); nu: per-query failure probability in (0, 1).
    """

    epsilon: float
    delta: float
    eta: float
    nu: float

    def __post_init__(self) -> None:
        for name in ("epsilon", "delta", "eta", "nu"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise InvalidInputError(f"{name} must be a finite number, got {value!r}")
        if self.epsilon <= 0.0:
            raise InvalidInputError(f"epsilon must be > 0, got {self.epsilon}")
        if not (0.0 < self.delta < 1.0):
            raise InvalidInputError(f"delta must lie in (0, 1), got {self.delta}")
        if not (0.0 < self.eta < 1.0):
            raise InvalidInputError(f"eta must lie in (0, 1), got {self.eta}")
        if not (0.0 < self.nu < 1.0):
            raise InvalidInputError(f"nu must lie in (0, 1), got {self.nu}")

    def half_budget(self) -> "PrivacyParams":
        """Per-release parameters when the budget is split over two releases."""
        return PrivacyParams(self.epsilon / 2.0, self.delta / 2.0, self.eta, self.nu)


class JlParams(NamedTuple):
    """Projection row count ``r`` and spectral floor ``w``."""

    r: int
    w: float


def jl_params(p: PrivacyParams) -> JlParams:
    """Compute (r, w) from the privacy/accuracy parameters.

    ``r`` is rounded up to an integer row count.
    """
    r = math.ceil(8.0 * math.log(2.0 / p.nu) / p.eta**2)
    w = 16.0 * math.sqrt(r * math.log(2.0 / p.delta)) / p.epsilon * math.log(16.0 * r / p.delta)
    if not (r >= 1 and math.isfinite(w) and w > 0.0):
        raise InvalidInputError(f"degenerate projection parameters r={r}, w={w}")
    return JlParams(r, w)


def tau(p: PrivacyParams, m: int, n: int) -> float:
    """Closed-form additive error constant for an m + n query workload.

    tau = (2048 ln(2/((m+n)nu)) ln(2/delta) / (eta epsilon^2))
          * ln^2(128 ln(1/((m+n)nu)) / (eta^2 delta))

    Requires ``(m + n) nu < 1`` (and every logarithm above to have argument
    > 1) so the constant is positive and meaningful.
    """
    if m < 1 or n < 1:
        raise InvalidInputError(f"query counts must be positive, got m={m}, n={n}")
    total = (m + n) * p.nu
    if not (total < 1.0):
        raise InvalidInputError(
            f"(m+n)*nu = {total:.6g} must be < 1 for the additive constant to be defined"
        )
    inner = 128.0 * math.log(1.0 / total) / (p.eta**2 * p.delta)
    if inner <= 1.0:
        raise InvalidInputError(
            f"log argument 128*ln(1/((m+n)nu))/(eta^2*delta) = {inner:.6g} must exceed 1"
        )
    lead = 2048.0 * math.log(2.0 / total) * math.log(2.0 / p.delta) / (p.eta * p.epsilon**2)
    return lead * math.log(inner) ** 2


def tau_mechanism(p: PrivacyParams) -> float:
    """Mechanism-level additive constant ``(1 + eta) w^2`` for unit queries."""
    return (1.0 + p.eta) * jl_params(p).w ** 2


@dataclass(frozen=True, eq=False)
class PrivateProjection:
    """A released projection ``P`` of shape (r, n).

    Answers directional variance queries ``||P y||^2`` approximating
    ``y^T F F^T y + w^2 ||y||^2``.  ``seed`` is the generator seed used by
    the data holder; it is retained in memory only and never serialized.
    """

    values: np.ndarray
    params: PrivacyParams
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.values.ndim != 2:
            raise ShapeError(f"projection values must be 2-D, got shape {self.values.shape}")
        if not np.all(np.isfinite(self.values)):
            raise InvalidInputError("projection contains non-finite entries")

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[1]


def privatize_covariance(F, p: PrivacyParams, seed: int) -> PrivateProjection:
    """Release a private projection for the covariance ``F F^T``.

    Args:
        F: n x k factor of the target covariance (rows are samples).
        p: privacy/accuracy parameters of this release.
        seed: 64-bit generator seed; identical (F, p, seed) gives a
            bit-identical release.

    Returns:
        PrivateProjection with values ``(1/sqrt(r)) R [F^T; w I]``.
    """
    A = np.asarray(F, dtype=np.float64)
    if A.ndim == 1:
        A = A[:, None]
    if A.ndim != 2 or A.shape[0] < 2:
        raise ShapeError(f"factor must be 2-D with at least 2 rows, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidInputError("factor contains non-finite entries")
    n, k = A.shape
    r, w = jl_params(p)
    augmented = np.vstack([A.T, w * np.eye(n)])  # (k + n, n)
    rng = np.random.default_rng(int(seed))
    R = rng.standard_normal((r, k + n))
    P = (R @ augmented) / math.sqrt(r)
    return PrivateProjection(values=P, params=p, seed=int(seed))


def _identity_projection(F, p: PrivacyParams) -> PrivateProjection:
    """Testing hook: a 'release' with no noise and no floor (P = F^T).

    ``||P y||^2 = y^T F F^T y`` exactly.  Exists only so end-to-end tests
    can compare the protocol against the non-private statistics; nothing in
    the command-line surface can reach it.
    """
    A = np.asarray(F, dtype=np.float64)
    if A.ndim == 1:
        A = A[:, None]
    return PrivateProjection(values=A.T.copy(), params=p, seed=None)


def _query_matrix(y, n: int) -> np.ndarray:
    v = np.asarray(y, dtype=np.float64)
    if v.ndim != 1 or v.shape[0] != n:
        raise ShapeError(f"query direction must be a vector of length {n}, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InvalidInputError("query direction contains non-finite entries")
    return v


def private_directional_variance(P: PrivateProjection, y) -> float:
    """Answer one directional variance query: ``||P y||^2``.

    Non-unit directions are answered as asked; the value scales as
    ``||y||^2``, so callers normalize when the unit-direction convention
    matters.
    """
    v = _query_matrix(y, P.n)
    z = P.values @ v
    return float(z @ z)


def private_sum_directional_variances(P: PrivateProjection, V) -> float:
    """Sum of query answers over the columns of ``V``: ``||P V||_F^2``."""
    M = np.asarray(V, dtype=np.float64)
    if M.ndim == 1:
        M = M[:, None]
    if M.ndim != 2 or M.shape[0] != P.n:
        raise ShapeError(f"query matrix must have {P.n} rows, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise InvalidInputError("query matrix contains non-finite entries")
    Z = P.values @ M
    return float(np.sum(Z * Z))
