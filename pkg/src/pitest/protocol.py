"""The one-way two-party test protocol and its wire format.

Roles:

- The *data holder* (Alice) owns ``X``.  She computes the centered-distance
  Laplacian of ``X``, factors it, and releases two private projections —
  one for the Laplacian's covariance ``B B^T``, one for ``X X^T`` — each
  spending half of the (epsilon, delta) budget.  The package of the two
  projections plus the sample count is all that ever leaves her side.
- The *analyst* (Bob) owns ``Y``.  From the package alone he evaluates the
  private statistics

      omega_bar_sq = (2/n^2) * sum_i ||P_B y_i||^2           (columns of Y)
      s_bar        = (4/n^4) * sum_i ||P_X g_i||^2 * Tr(Y^T L_S Y)

  with ``G = sqrt(n) J`` the complete-graph factor, forms
  ``Gamma = n * omega_bar_sq / s_bar``, and applies the rejection rule.
  Nothing flows back, so the release's privacy guarantee is preserved under
  this post-processing.

The package serializes to a versioned UTF-8 JSON document; matrix payloads
are base64-encoded little-endian IEEE-754 binary64, row-major, so
round-trips are bit-exact.
"""

from __future__ import annotations

import base64
import binascii
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    InvalidInputError,
    PackageFormatError,
    ShapeError,
    UnsupportedVersionError,
)
from .estimators import (
    rejection_threshold,
    s_hat_directional,
    test_statistic,
)
from .matrices import _as_sample_matrix, factor_S, factor_W, laplacian_W
from .privacy import (
    PrivacyParams,
    PrivateProjection,
    _identity_projection,
    private_sum_directional_variances,
    privatize_covariance,
    tau,
    tau_mechanism,
)
from .bounds import (
    aggregate_coverage_probability,
    lower_bound_ratio,
    upper_bound_ratio,
)

__all__ = [
    "FORMAT_VERSION",
    "AlicePackage",
    "BoundsReport",
    "TestReport",
    "alice_prepare",
    "bob_evaluate",
    "serialize_package",
    "deserialize_package",
    "report_to_dict",
]

FORMAT_VERSION = 1


@dataclass(frozen=True, eq=False)
class AlicePackage:
    """Everything the data holder sends: two projections and the metadata."""

    n: int
    params: PrivacyParams  # total budget; each projection spent half
    proj_B: PrivateProjection
    proj_X: PrivateProjection
    version: int = FORMAT_VERSION

    def __post_init__(self) -> None:
        if self.proj_B.n != self.n or self.proj_X.n != self.n:
            raise ShapeError(
                f"projection widths ({self.proj_B.n}, {self.proj_X.n}) "
                f"must both equal n = {self.n}"
            )


@dataclass(frozen=True)
class BoundsReport:
    """Two-sided bound on the private ratio, evaluated at the observed value.

    ``tau_used`` is the mechanism-level additive constant the transforms
    were evaluated with; ``tau_closed_form`` is the analytical constant for
    the same workload (None when its precondition fails), reported alongside
    for comparison.  ``upper`` is ``inf`` when ``s_param`` fell outside the
    validity region (recorded by ``s_param_clamped``).
    """

    lower: float
    upper: float
    s_param: float
    tau_used: float
    tau_closed_form: float | None
    prob_floor: float | None
    s_param_clamped: bool


@dataclass(frozen=True)
class TestReport:
    """The analyst's verdict plus everything needed to audit it."""

    omega_bar_sq: float
    s_bar: float
    statistic: float | None
    threshold: float
    alpha: float
    reject: bool | None
    bounds: BoundsReport | None
    degenerate: bool
    n: int
    m: int


def alice_prepare(X, p: PrivacyParams, master_seed: int) -> AlicePackage:
    """Build the data holder's package from her data matrix.

    The master seed is expanded into one 64-bit seed per release (incidence
    factor first, data matrix second), so the whole package is a
    deterministic function of (X, p, master_seed).  Raw ``X`` and every
    intermediate (distance matrix, Laplacian, factor) stay on this side.
    """
    A = _as_sample_matrix(X, "X", min_rows=2)
    L = laplacian_W(A)  # also asserts the degree check
    B = factor_W(A)
    recon_err = float(np.linalg.norm(B @ B.T - L))
    if recon_err > 1e-8 * (1.0 + float(np.linalg.norm(L))):
        raise AssertionError(
            f"factor does not reproduce the Laplacian (||BB^T - L||_F = {recon_err:.3e})"
        )
    try:
        seeds = np.random.SeedSequence(master_seed).generate_state(2, np.uint64)
    except (ValueError, TypeError) as exc:
        raise InvalidInputError(f"invalid master seed {master_seed!r}: {exc}") from exc
    per_release = p.half_budget()
    proj_B = privatize_covariance(B, per_release, int(seeds[0]))
    proj_X = privatize_covariance(A, per_release, int(seeds[1]))
    return AlicePackage(n=A.shape[0], params=p, proj_B=proj_B, proj_X=proj_X)


def _alice_prepare_identity(X, p: PrivacyParams) -> AlicePackage:
    """Testing hook: a package whose 'projections' answer queries exactly.

    Used only to verify that the analyst's pipeline reproduces the
    non-private statistics when no noise is injected.  Not reachable from
    the command line.
    """
    A = _as_sample_matrix(X, "X", min_rows=2)
    per_release = p.half_budget()
    return AlicePackage(
        n=A.shape[0],
        params=p,
        proj_B=_identity_projection(factor_W(A), per_release),
        proj_X=_identity_projection(A, per_release),
    )


def bob_evaluate(pkg: AlicePackage, Y, alpha: float = 0.05, s_param: float | None = None) -> TestReport:
    """Evaluate the analyst's side of the protocol from a package and ``Y``.

    Args:
        pkg: the data holder's package.
        Y: analyst's n x m data matrix (must match the package's n).
        alpha: significance level in (0, 1).
        s_param: scale parameter for the closed-form upper bound; defaults
            to ``s_bar / n``.  Values outside the validity region make the
            upper bound infinite (recorded in the report, not an error).

    Returns:
        TestReport.  ``degenerate`` is set (and statistic/reject are None)
        when the private denominator is not positive — e.g. constant ``Y``.
        Deterministic given (pkg, Y, alpha, s_param): the analyst draws no
        randomness.
    """
    Ym = _as_sample_matrix(Y, "Y", min_rows=2)
    if Ym.shape[0] != pkg.n:
        raise ShapeError(
            f"package was built for n = {pkg.n} samples but Y has {Ym.shape[0]} rows"
        )
    n, m = pkg.n, Ym.shape[1]
    threshold = rejection_threshold(alpha)

    omega_bar_sq = 2.0 / n**2 * private_sum_directional_variances(pkg.proj_B, Ym)
    s_bar = s_hat_directional(pkg.proj_X, factor_S(n), Ym)

    if not (s_bar > 0.0):
        return TestReport(
            omega_bar_sq=omega_bar_sq,
            s_bar=s_bar,
            statistic=None,
            threshold=threshold,
            alpha=alpha,
            reject=None,
            bounds=None,
            degenerate=True,
            n=n,
            m=m,
        )

    statistic = test_statistic(omega_bar_sq, s_bar, n)
    reject = statistic > threshold

    per_release = pkg.proj_B.params
    eta = per_release.eta
    tau_used = tau_mechanism(per_release)
    ratio = omega_bar_sq / s_bar
    requested_s = float(s_param) if s_param is not None else s_bar / n
    clamped = not (requested_s > tau_used / (1.0 - eta))
    upper = math.inf if clamped else upper_bound_ratio(ratio, eta, tau_used, requested_s)
    lower = lower_bound_ratio(ratio, eta)
    try:
        tau_closed: float | None = tau(per_release, m, n)
    except InvalidInputError:
        tau_closed = None
    try:
        prob_floor: float | None = aggregate_coverage_probability(m, n, per_release.nu)
    except InvalidInputError:
        prob_floor = None

    return TestReport(
        omega_bar_sq=omega_bar_sq,
        s_bar=s_bar,
        statistic=statistic,
        threshold=threshold,
        alpha=alpha,
        reject=reject,
        bounds=BoundsReport(
            lower=lower,
            upper=upper,
            s_param=requested_s,
            tau_used=tau_used,
            tau_closed_form=tau_closed,
            prob_floor=prob_floor,
            s_param_clamped=clamped,
        ),
        degenerate=False,
        n=n,
        m=m,
    )


def _encode_projection(P: PrivateProjection) -> dict:
    raw = np.ascontiguousarray(P.values, dtype="<f8").tobytes()
    return {
        "rows": P.rows,
        "cols": P.n,
        "data": base64.b64encode(raw).decode("ascii"),
    }


def serialize_package(pkg: AlicePackage) -> bytes:
    """Encode a package as canonical UTF-8 JSON bytes (bit-exact payloads)."""
    doc = {
        "version": pkg.version,
        "n": pkg.n,
        "privacy": {
            "epsilon": pkg.params.epsilon,
            "delta": pkg.params.delta,
            "eta": pkg.params.eta,
            "nu": pkg.params.nu,
            "split": "half-half",
        },
        "proj_B": _encode_projection(pkg.proj_B),
        "proj_X": _encode_projection(pkg.proj_X),
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":")).encode("utf-8")


def _require(doc: dict, field: str, where: str = "package"):
    if field not in doc:
        raise PackageFormatError(f"{where} is missing required section '{field}'")
    return doc[field]


def _decode_projection(section, name: str, n: int, params: PrivacyParams) -> PrivateProjection:
    if not isinstance(section, dict):
        raise PackageFormatError(f"section '{name}' must be an object")
    rows = _require(section, "rows", f"section '{name}'")
    cols = _require(section, "cols", f"section '{name}'")
    data = _require(section, "data", f"section '{name}'")
    if not isinstance(rows, int) or isinstance(rows, bool) or rows < 1:
        raise PackageFormatError(f"section '{name}': rows must be a positive integer, got {rows!r}")
    if not isinstance(cols, int) or isinstance(cols, bool) or cols != n:
        raise PackageFormatError(f"section '{name}': cols must equal n = {n}, got {cols!r}")
    if not isinstance(data, str):
        raise PackageFormatError(f"section '{name}': data must be a base64 string")
    try:
        raw = base64.b64decode(data.encode("ascii"), validate=True)
    except (binascii.Error, UnicodeEncodeError) as exc:
        raise PackageFormatError(f"section '{name}': invalid base64 payload: {exc}") from exc
    expected = rows * cols * 8
    if len(raw) != expected:
        raise PackageFormatError(
            f"section '{name}': payload holds {len(raw)} bytes, expected {expected} "
            f"({rows}x{cols} float64)"
        )
    values = np.frombuffer(raw, dtype="<f8").reshape(rows, cols).astype(np.float64)
    if not np.all(np.isfinite(values)):
        raise PackageFormatError(f"section '{name}': payload contains NaN or infinite entries")
    return PrivateProjection(values=values, params=params, seed=None)


def deserialize_package(data: bytes | str) -> AlicePackage:
    """Parse and validate package bytes; inverse of :func:`serialize_package`.

    Raises PackageFormatError (or its UnsupportedVersionError subclass)
    for every malformed input; never returns a partially validated package.
    """
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise PackageFormatError(f"package is not valid UTF-8: {exc}") from exc
    else:
        text = data
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PackageFormatError(f"package is not valid JSON (truncated?): {exc}") from exc
    if not isinstance(doc, dict):
        raise PackageFormatError(f"package must be a JSON object, got {type(doc).__name__}")

    version = _require(doc, "version")
    if not isinstance(version, int) or isinstance(version, bool):
        raise PackageFormatError(f"version must be an integer, got {version!r}")
    if version != FORMAT_VERSION:
        raise UnsupportedVersionError(
            f"unsupported package version {version}; this build reads version {FORMAT_VERSION}"
        )

    n = _require(doc, "n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 2:
        raise PackageFormatError(f"n must be an integer >= 2, got {n!r}")

    privacy = _require(doc, "privacy")
    if not isinstance(privacy, dict):
        raise PackageFormatError("section 'privacy' must be an object")
    kwargs = {}
    for field in ("epsilon", "delta", "eta", "nu"):
        value = _require(privacy, field, "section 'privacy'")
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise PackageFormatError(f"privacy field '{field}' must be a number, got {value!r}")
        kwargs[field] = float(value)
    split = privacy.get("split", "half-half")
    if split != "half-half":
        raise PackageFormatError(f"unsupported budget split {split!r}; expected 'half-half'")
    try:
        params = PrivacyParams(**kwargs)
    except InvalidInputError as exc:
        raise PackageFormatError(f"invalid privacy parameters: {exc}") from exc

    per_release = params.half_budget()
    proj_B = _decode_projection(_require(doc, "proj_B"), "proj_B", n, per_release)
    proj_X = _decode_projection(_require(doc, "proj_X"), "proj_X", n, per_release)
    return AlicePackage(n=n, params=params, proj_B=proj_B, proj_X=proj_X, version=version)


def report_to_dict(report: TestReport) -> dict:
    """JSON-safe dict for a TestReport (infinities become null + flag)."""
    bounds = None
    if report.bounds is not None:
        b = report.bounds
        bounds = {
            "lower": b.lower,
            "upper": None if math.isinf(b.upper) else b.upper,
            "upper_finite": not math.isinf(b.upper),
            "s_param": b.s_param,
            "tau_used": b.tau_used,
            "tau_closed_form": b.tau_closed_form,
            "prob_floor": b.prob_floor,
            "s_param_clamped": b.s_param_clamped,
        }
    return {
        "omega_bar_sq": report.omega_bar_sq,
        "s_bar": report.s_bar,
        "statistic": report.statistic,
        "threshold": report.threshold,
        "alpha": report.alpha,
        "reject": report.reject,
        "degenerate": report.degenerate,
        "n": report.n,
        "m": report.m,
        "bounds": bounds,
    }
