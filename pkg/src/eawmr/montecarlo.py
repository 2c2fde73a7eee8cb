"""
Seeded Monte Carlo simulation of the full protocol: channel, environment
measurement, weak-measurement reversal.

Randomness
----------
Trial ``i`` under seed ``s`` consumes exactly two uniforms, taken from the
first two 64-bit words of block ``i`` of the Philox4x64-10 counter-based
generator keyed with ``s`` (numpy's ``Philox(key=s, counter=i)``), converted
to doubles as ``(word >> 11) * 2**-53``. The first uniform selects the
environment outcome by inverse CDF, the second decides the weak measurement.
Trials therefore depend only on ``(seed, i)``, never on chunking or threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np
from numpy.random import Generator, Philox

from .channels import KrausChannel
from .errors import DimensionError
from .linalg import PureState
from .restoration import (
    MIN_PROBABILITY,
    apply_reversal,
    build_reversal,
    env_probabilities,
    fidelity,
    normalization_constant,
)

RNG_ALGORITHM = "Philox4x64-10 (numpy.random.Philox), block index = trial index"
_SEED_LIMIT = 2**64
_WORDS_PER_BLOCK = 4
_TO_UNIT = 2.0**-53


@dataclass(frozen=True)
class TrialOutcome:
    env_outcome: int
    attempted_reversal: bool
    success: bool
    fidelity: Optional[float] = None


@dataclass(frozen=True)
class McStats:
    n_trials: int
    n_success: int
    empirical_p: float
    std_err: float
    min_fidelity: Optional[float]
    seed: int
    outcome_counts: tuple = field(default=())

    def record(self, analytic_p: float) -> dict:
        return {
            "n_trials": self.n_trials,
            "n_success": self.n_success,
            "empirical_p": self.empirical_p,
            "std_err": self.std_err,
            "analytic_p": analytic_p,
            "min_fidelity": self.min_fidelity,
            "seed": self.seed,
        }


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed < _SEED_LIMIT:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def trial_rng(seed: int, trial_index: int) -> Generator:
    """Generator whose first two ``random()`` draws are trial ``trial_index``'s."""
    return Generator(Philox(key=_check_seed(seed), counter=int(trial_index)))


def trial_uniforms(seed: int, start: int, count: int) -> np.ndarray:
    """``(count, 2)`` uniforms for trials ``start .. start + count - 1``."""
    bitgen = Philox(key=_check_seed(seed), counter=int(start))
    words = bitgen.random_raw(_WORDS_PER_BLOCK * count).reshape(count, _WORDS_PER_BLOCK)
    return (words[:, :2] >> np.uint64(11)).astype(np.float64) * _TO_UNIT


def _select_outcome(cdf: np.ndarray, last_reachable: int, u):
    n = np.searchsorted(cdf, u, side="right")
    return np.minimum(n, last_reachable)


@dataclass(frozen=True, eq=False)
class _Plan:
    """Per-branch quantities; only the sampling differs between trials."""

    cdf: np.ndarray
    last_reachable: int
    attempt: np.ndarray
    q_success: np.ndarray
    fid: np.ndarray


def _check_inputs(ch: KrausChannel, psi0: PureState) -> None:
    if psi0.dim != ch.dim:
        raise DimensionError(f"state has dim {psi0.dim}, channel acts on dim {ch.dim}")


def _plan(ch: KrausChannel, psi0: PureState) -> _Plan:
    _check_inputs(ch, psi0)
    rho0 = psi0.projector()
    p1 = env_probabilities(ch, rho0)
    m = len(ch)
    attempt = np.zeros(m, dtype=bool)
    q = np.zeros(m)
    fid = np.full(m, np.nan)
    for n, k in enumerate(ch.ops):
        if p1[n] < MIN_PROBABILITY or normalization_constant(k) == 0.0:
            continue
        attempt[n] = True
        branch = k @ rho0 @ k.conj().T / p1[n]
        prob, restored = apply_reversal(build_reversal(k), branch)
        q[n] = prob
        fid[n] = fidelity(restored, psi0)
    reachable = np.flatnonzero(p1 > 0.0)
    return _Plan(np.cumsum(p1), int(reachable[-1]), attempt, q, fid)


def run_trial(ch: KrausChannel, psi0: PureState, rng: Generator) -> TrialOutcome:
    """One pass of the protocol, drawing two uniforms from ``rng``."""
    _check_inputs(ch, psi0)
    u_env, u_weak = rng.random(2)
    rho0 = psi0.projector()
    p1 = env_probabilities(ch, rho0)
    reachable = np.flatnonzero(p1 > 0.0)
    n = int(_select_outcome(np.cumsum(p1), int(reachable[-1]), u_env))
    k = ch[n]
    if p1[n] < MIN_PROBABILITY or normalization_constant(k) == 0.0:
        return TrialOutcome(n, False, False)
    branch = k @ rho0 @ k.conj().T / p1[n]
    prob, restored = apply_reversal(build_reversal(k), branch)
    if u_weak >= prob:
        return TrialOutcome(n, True, False)
    return TrialOutcome(n, True, True, fidelity(restored, psi0))


def _chunk(plan: _Plan, seed: int, start: int, count: int):
    u = trial_uniforms(seed, start, count)
    n = _select_outcome(plan.cdf, plan.last_reachable, u[:, 0])
    ok = plan.attempt[n] & (u[:, 1] < plan.q_success[n])
    counts = np.bincount(n, minlength=plan.cdf.size)
    hit = np.unique(n[ok])
    min_fid = float(np.min(plan.fid[hit])) if hit.size else math.inf
    return int(np.count_nonzero(ok)), counts, min_fid


def trials(
    ch: KrausChannel, psi0: PureState, n_trials: int, seed: int, start: int = 0
) -> Iterator[TrialOutcome]:
    """Per-trial outcomes, identical to :func:`run_trial` with :func:`trial_rng`."""
    plan = _plan(ch, psi0)
    u = trial_uniforms(seed, start, n_trials)
    for u_env, u_weak in u:
        n = int(_select_outcome(plan.cdf, plan.last_reachable, u_env))
        if not plan.attempt[n]:
            yield TrialOutcome(n, False, False)
        elif u_weak < plan.q_success[n]:
            yield TrialOutcome(n, True, True, float(plan.fid[n]))
        else:
            yield TrialOutcome(n, True, False)


def run(
    ch: KrausChannel,
    psi0: PureState,
    n_trials: int,
    seed: int,
    chunk_size: int = 1 << 16,
    workers: int = 1,
) -> McStats:
    """Aggregate ``n_trials`` independent trials.

    Output is bit-identical for any ``chunk_size`` and ``workers``.
    """
    if n_trials < 1:
        raise ValueError(f"n_trials must be >= 1, got {n_trials}")
    if chunk_size < 1:
        raise ValueError("chunk_size must be positive")
    seed = _check_seed(seed)
    plan = _plan(ch, psi0)
    starts = range(0, n_trials, chunk_size)

    def job(start):
        return _chunk(plan, seed, start, min(chunk_size, n_trials - start))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, starts))
    else:
        parts = [job(s) for s in starts]

    n_success = sum(p[0] for p in parts)
    counts = sum(p[1] for p in parts)
    min_fid = min(p[2] for p in parts)
    p_hat = n_success / n_trials
    return McStats(
        n_trials=n_trials,
        n_success=n_success,
        empirical_p=p_hat,
        std_err=math.sqrt(p_hat * (1.0 - p_hat) / n_trials),
        min_fidelity=None if math.isinf(min_fid) else min_fid,
        seed=seed,
        outcome_counts=tuple(int(c) for c in counts),
    )
