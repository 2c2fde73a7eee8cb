"""
Environment-assisted restoration with a weak-measurement reversal.

After the environment is measured with outcome ``n`` the system sits in
``K_n rho K_n^dag`` (unnormalized). When ``K_n`` is invertible the two-outcome
measurement

    M1 = N_n K_n^{-1},        M2 = sqrt(I - M1^dag M1)

undoes the branch on outcome ``M1``. ``N_n`` is the smallest singular value of
``K_n``, the largest scale for which ``M1^dag M1 <= I``. The overall success
probability is ``sum_n N_n^2`` whatever the input state.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .channels import KrausChannel, RuDecomposition
from .errors import DimensionError, NotInvertible, SingularError, ZeroCoefficient, ZeroProbability
from .linalg import (
    TOL_INV,
    DensityMatrix,
    PureState,
    _frozen,
    as_matrix,
    hermitian_eigenvalues,
    hermitian_sqrt,
    inverse,
)

TOL_POVM = 1e-9
MIN_PROBABILITY = 1e-15
P2_CROSS_CHECK_TOL = 1e-9

StateLike = Union[DensityMatrix, PureState, np.ndarray]


def _state_matrix(rho: StateLike) -> np.ndarray:
    if isinstance(rho, PureState):
        return rho.projector()
    return as_matrix(rho)


def _singular_value_range(k: np.ndarray) -> tuple[float, float]:
    """Squared singular values ``(min, max)`` of ``k``, from ``k k^dag``."""
    w = hermitian_eigenvalues(k @ k.conj().T)
    return max(float(w[0]), 0.0), max(float(w[-1]), 0.0)


@dataclass(frozen=True, eq=False)
class ReversalPovm:
    """Two-outcome weak measurement ``{M1 = N K^-1, M2}``."""

    success_effect: np.ndarray
    discard_effect: np.ndarray
    n_const: float

    def completeness_residual(self) -> float:
        m1, m2 = self.success_effect, self.discard_effect
        total = m1.conj().T @ m1 + m2.conj().T @ m2
        return float(np.max(np.abs(total - np.eye(m1.shape[0]))))

    @property
    def dim(self) -> int:
        return self.success_effect.shape[0]


@dataclass(frozen=True, eq=False)
class RestorationReport:
    outcome_index: int
    p1: float
    p2: float
    restored: Optional[DensityMatrix] = None
    fidelity_to_initial: Optional[float] = None


def normalization_constant(k, tol_inv: float = TOL_INV) -> float:
    """Smallest singular value of ``k``; 0 when ``k`` is (numerically) singular.

    Singularity uses the same relative test as :func:`build_reversal`: the
    ratio of smallest to largest singular value below ``tol_inv``.
    """
    k = as_matrix(k)
    if k.shape[0] != k.shape[1]:
        raise DimensionError(f"Kraus operator must be square, got {k.shape}")
    lo, hi = _singular_value_range(k)
    if hi == 0.0 or np.sqrt(lo / hi) < tol_inv:
        return 0.0
    # sqrt(min eig of k k^dag) loses ~cond(k)^2 eps; 1 / ||k^-1|| keeps ~eps
    try:
        kinv = inverse(k, tol_inv)
    except SingularError:
        return float(np.sqrt(lo))
    g = kinv @ kinv.conj().T
    top = hermitian_eigenvalues(0.5 * (g + g.conj().T))[-1]
    return float(1.0 / np.sqrt(top))


def build_reversal(k, tol_inv: float = TOL_INV) -> ReversalPovm:
    """Construct the reversal measurement for an invertible Kraus operator.

    Raises
    ------
    NotInvertible
        If ``N / sqrt(max eigenvalue of k k^dag) < tol_inv``.
    """
    k = as_matrix(k)
    n_const = normalization_constant(k, tol_inv)
    if n_const == 0.0:
        raise NotInvertible("Kraus operator is singular; branch must be discarded")
    m1 = n_const * inverse(k, tol_inv)
    completion = np.eye(k.shape[0]) - m1.conj().T @ m1
    m2 = hermitian_sqrt(0.5 * (completion + completion.conj().T))
    povm = ReversalPovm(_frozen(m1), _frozen(m2), n_const)
    res = povm.completeness_residual()
    if res > TOL_POVM:
        raise RuntimeError(f"reversal POVM incomplete (residual {res:.3e})")
    return povm


def env_probabilities(ch: KrausChannel, rho0: StateLike) -> np.ndarray:
    """Outcome probabilities ``tr[K_n rho K_n^dag]`` of the environment measurement."""
    r = _state_matrix(rho0)
    if r.shape != (ch.dim, ch.dim):
        raise DimensionError(f"state has shape {r.shape}, channel acts on dim {ch.dim}")
    p = np.array([np.trace(k @ r @ k.conj().T).real for k in ch.ops])
    return np.clip(p, 0.0, None)


def p_success_conditional(k, rho0: StateLike, tol_inv: float = TOL_INV) -> float:
    """Probability that the reversal succeeds given the branch of ``k`` occurred."""
    k = as_matrix(k)
    r = _state_matrix(rho0)
    if r.shape != k.shape:
        raise DimensionError(f"state has shape {r.shape}, operator has {k.shape}")
    n_const = normalization_constant(k, tol_inv)
    if n_const == 0.0:
        raise NotInvertible("Kraus operator is singular")
    branch = k @ r @ k.conj().T
    p1 = float(np.trace(branch).real)
    if p1 < MIN_PROBABILITY:
        raise ZeroProbability(f"branch probability {p1:.3e} is zero")
    closed = n_const**2 * float(np.trace(r).real) / p1
    r_prime = n_const * inverse(k, tol_inv)
    via_trace = float(np.trace(r_prime @ branch @ r_prime.conj().T).real) / p1
    if abs(closed - via_trace) > P2_CROSS_CHECK_TOL:
        raise RuntimeError(
            f"conditional success probability mismatch: {closed!r} vs {via_trace!r}"
        )
    return min(max(closed, 0.0), 1.0)


def operator_breakdown(ch: KrausChannel, tol_inv: float = TOL_INV) -> list[tuple[float, bool]]:
    """``(N_n^2, invertible)`` for every Kraus operator."""
    out = []
    for k in ch.ops:
        n_const = normalization_constant(k, tol_inv)
        out.append((n_const**2, n_const > 0.0))
    return out


def p_ew(ch: KrausChannel, tol_inv: float = TOL_INV) -> float:
    """Total success probability ``sum_n N_n^2``; singular operators add nothing."""
    total = sum(n_sq for n_sq, _ in operator_breakdown(ch, tol_inv))
    return min(max(total, 0.0), 1.0)


def eaec_reverse(ru: RuDecomposition, outcome: int, rho_n) -> DensityMatrix:
    """Undo branch ``outcome`` of a random-unitary channel with ``U^-1 / c``."""
    if not 0 <= outcome < len(ru.coeffs):
        raise IndexError(f"outcome {outcome} out of range")
    c = ru.coeffs[outcome]
    if c <= 0.0:
        raise ZeroCoefficient(f"coefficient of outcome {outcome} is zero")
    r_op = ru.unitaries[outcome].conj().T / c
    rho_n = as_matrix(rho_n)
    return DensityMatrix.normalized(r_op @ rho_n @ r_op.conj().T)


def apply_reversal(povm: ReversalPovm, rho) -> tuple[float, DensityMatrix]:
    """Perform the weak measurement and keep the success outcome."""
    r = as_matrix(rho)
    if r.shape != (povm.dim, povm.dim):
        raise DimensionError(f"state has shape {r.shape}, measurement acts on dim {povm.dim}")
    m1 = povm.success_effect
    kept = m1 @ r @ m1.conj().T
    prob = float(np.trace(kept).real)
    if prob < MIN_PROBABILITY:
        raise ZeroProbability(f"success probability {prob:.3e} is zero")
    kept = kept / prob
    return prob, DensityMatrix(0.5 * (kept + kept.conj().T))


def fidelity(rho, psi: PureState) -> float:
    """Overlap ``<psi|rho|psi>``."""
    r = as_matrix(rho)
    if r.shape != (psi.dim, psi.dim):
        raise DimensionError(f"state has shape {r.shape}, reference has dim {psi.dim}")
    amp = psi.amplitudes
    f = float(np.vdot(amp, r @ amp).real)
    return min(max(f, 0.0), 1.0)


def restore(
    ch: KrausChannel,
    outcome: int,
    rho0: StateLike,
    weak_success: bool = True,
    tol_inv: float = TOL_INV,
) -> RestorationReport:
    """Analytic account of one branch of the protocol.

    ``restored`` is filled only when ``K_outcome`` is invertible and
    ``weak_success`` is true; fidelity is reported when ``rho0`` is pure.
    """
    k = ch[outcome]
    r = _state_matrix(rho0)
    p1 = float(env_probabilities(ch, r)[outcome])
    n_const = normalization_constant(k, tol_inv)
    if n_const == 0.0 or p1 < MIN_PROBABILITY:
        return RestorationReport(outcome, min(p1, 1.0), 0.0)
    p2 = p_success_conditional(k, r, tol_inv)
    if not weak_success:
        return RestorationReport(outcome, min(p1, 1.0), p2)
    branch = k @ r @ k.conj().T / p1
    _, restored = apply_reversal(build_reversal(k, tol_inv), branch)
    fid = fidelity(restored, rho0) if isinstance(rho0, PureState) else None
    return RestorationReport(outcome, min(p1, 1.0), p2, restored, fid)
