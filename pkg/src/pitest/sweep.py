"""Privacy-utility sweep: relative error of the private statistics vs epsilon.

For every (epsilon, eta) cell the protocol is replayed `replications` times
with fresh seeds against fixed (X, Y); each trial's private statistic,
denominator and numerator are compared to the non-private values on the same
data as percent relative error, and the cell reports mean and standard
deviation of each.  Cells whose non-private reference is zero are marked
degenerate with NaN entries.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvalidInputError
from .estimators import dcov_sq_direct, s_hat
from .privacy import PrivacyParams
from .protocol import alice_prepare, bob_evaluate

__all__ = ["SweepConfig", "SweepRow", "SWEEP_HEADER", "run_sweep", "sweep_rows_to_csv"]

SWEEP_HEADER = (
    "epsilon,eta,mean_rel_err_gamma,sd_gamma,mean_rel_err_s,sd_s,mean_rel_err_omega,sd_omega"
)


@dataclass(frozen=True)
class SweepConfig:
    epsilons: tuple[float, ...]
    replications: int = 50
    eta_values: tuple[float, ...] = (0.05, 0.1)
    delta: float = 2e-4
    nu: float = 0.05
    alpha: float = 0.05
    master_seed: int = 0

    def __post_init__(self) -> None:
        if not self.epsilons or any(e <= 0 for e in self.epsilons):
            raise InvalidInputError("epsilons must be a non-empty list of positive values")
        if list(self.epsilons) != sorted(set(self.epsilons)):
            raise InvalidInputError("epsilons must be strictly increasing")
        if self.replications < 1:
            raise InvalidInputError(f"replications must be >= 1, got {self.replications}")
        if not self.eta_values:
            raise InvalidInputError("eta_values must be non-empty")


class SweepRow(NamedTuple):
    epsilon: float
    eta: float
    mean_rel_err_gamma: float
    sd_gamma: float
    mean_rel_err_s: float
    sd_s: float
    mean_rel_err_omega: float
    sd_omega: float


def _thread_count() -> int:
    env = os.environ.get("PI_TEST_THREADS")
    if env:
        try:
            workers = int(env)
        except ValueError:
            raise InvalidInputError(f"PI_TEST_THREADS must be an integer, got {env!r}") from None
        if workers < 1:
            raise InvalidInputError(f"PI_TEST_THREADS must be >= 1, got {workers}")
        return workers
    return min(32, os.cpu_count() or 1)


def _rel_err_pct(private: float, reference: float) -> float:
    if reference == 0.0:
        return float("nan")  # degenerate reference; cell is marked, not crashed
    return abs(private - reference) / abs(reference) * 100.0


def _mean_sd(values: list[float]) -> tuple[float, float]:
    arr = np.asarray(values, dtype=np.float64)
    mean = float(arr.mean())
    sd = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    return mean, sd


def run_sweep(cfg: SweepConfig, X, Y) -> list[SweepRow]:
    """Run the sweep; one row per (epsilon, eta) in configuration order.

    Trial seeds are derived from (master_seed, epsilon index, eta index,
    replication index), so results are reproducible regardless of how the
    replications are scheduled across threads (capped by PI_TEST_THREADS).
    """
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    n = X.shape[0]

    omega_ref = dcov_sq_direct(X, Y)
    s_ref = s_hat(X, Y)
    gamma_ref = n * omega_ref / s_ref if s_ref > 0.0 else 0.0

    def one_trial(args: tuple[int, int, int]) -> tuple[float, float, float]:
        i_eps, i_eta, rep = args
        seed = int(
            np.random.SeedSequence([cfg.master_seed, i_eps, i_eta, rep]).generate_state(
                1, np.uint64
            )[0]
        )
        p = PrivacyParams(cfg.epsilons[i_eps], cfg.delta, cfg.eta_values[i_eta], cfg.nu)
        report = bob_evaluate(alice_prepare(X, p, seed), Y, cfg.alpha)
        gamma_bar = report.statistic if report.statistic is not None else float("nan")
        return (
            _rel_err_pct(gamma_bar, gamma_ref) if s_ref > 0.0 else float("nan"),
            _rel_err_pct(report.s_bar, s_ref),
            _rel_err_pct(report.omega_bar_sq, omega_ref),
        )

    rows: list[SweepRow] = []
    with ThreadPoolExecutor(max_workers=_thread_count()) as pool:
        for i_eps, epsilon in enumerate(cfg.epsilons):
            for i_eta, eta in enumerate(cfg.eta_values):
                jobs = [(i_eps, i_eta, rep) for rep in range(cfg.replications)]
                results = list(pool.map(one_trial, jobs))
                g_mean, g_sd = _mean_sd([r[0] for r in results])
                s_mean, s_sd = _mean_sd([r[1] for r in results])
                o_mean, o_sd = _mean_sd([r[2] for r in results])
                rows.append(SweepRow(epsilon, eta, g_mean, g_sd, s_mean, s_sd, o_mean, o_sd))
    return rows


def sweep_rows_to_csv(rows: list[SweepRow]) -> str:
    lines = [SWEEP_HEADER]
    for row in rows:
        lines.append(",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"
