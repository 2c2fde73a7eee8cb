"""
Kraus channels: construction, application, unitary remixing of the
decomposition, random-unitary detection and JSON interchange.

Basis convention: index 0 is the decaying (excited) level, so the lowering
operator ``[[0, 0], [w, 0]]`` maps index 0 to index 1.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import CptpError, DimensionError, NotUnitary
from .linalg import DensityMatrix, _frozen, as_matrix, kron

TOL_CPTP = 1e-10
TOL_UNITARY = 1e-10
MAX_DIM = 8


def cptp_residual(ops: Sequence[np.ndarray]) -> float:
    """Max entrywise deviation of ``sum K^dag K`` from the identity."""
    dim = ops[0].shape[0]
    total = sum(k.conj().T @ k for k in ops)
    return float(np.max(np.abs(total - np.eye(dim))))


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """Ordered Kraus operators satisfying ``sum_n K_n^dag K_n = I``."""

    ops: tuple

    def __post_init__(self):
        ops = tuple(_frozen(as_matrix(k)) for k in self.ops)
        if not ops:
            raise ValueError("a channel needs at least one Kraus operator")
        dim = ops[0].shape[0]
        if dim > MAX_DIM:
            raise DimensionError(f"dimension {dim} exceeds supported maximum {MAX_DIM}")
        for n, k in enumerate(ops):
            if k.shape != (dim, dim):
                raise DimensionError(f"operator {n} has shape {k.shape}, expected {(dim, dim)}")
        res = cptp_residual(ops)
        if res > TOL_CPTP:
            raise CptpError(
                f"Kraus operators are not trace preserving (residual {res:.3e})", res
            )
        object.__setattr__(self, "ops", ops)

    @property
    def dim(self) -> int:
        return self.ops[0].shape[0]

    def __len__(self) -> int:
        return len(self.ops)

    def __iter__(self):
        return iter(self.ops)

    def __getitem__(self, n: int) -> np.ndarray:
        return self.ops[n]


@dataclass(frozen=True)
class DecayParams:
    """Decay amplitudes of the two qubits; ``omega = sqrt(1 - gamma^2)``."""

    gamma_a: float
    gamma_b: float

    def __post_init__(self):
        for name in ("gamma_a", "gamma_b"):
            g = getattr(self, name)
            if not (0.0 <= g <= 1.0):
                raise ValueError(f"{name} must lie in [0, 1], got {g}")

    @property
    def omega_a(self) -> float:
        return _omega(self.gamma_a)

    @property
    def omega_b(self) -> float:
        return _omega(self.gamma_b)


@dataclass(frozen=True)
class DecayProfile:
    """Markovian decay ``gamma(t) = exp(-rate * t / 2)``."""

    rate: float = 1.0

    def __post_init__(self):
        if not (self.rate > 0.0 and math.isfinite(self.rate)):
            raise ValueError(f"decay rate must be positive, got {self.rate}")

    def __call__(self, t: float) -> float:
        return gamma_at(self, t)


@dataclass(frozen=True, eq=False)
class RuDecomposition:
    """``K_n = c_n U_n`` with real non-negative ``c_n``."""

    coeffs: tuple
    unitaries: tuple


@dataclass(frozen=True)
class NotRu:
    """Result of :func:`detect_ru` when some operator is not ``c * unitary``."""

    failing_index: int
    residual: float


def _omega(gamma: float) -> float:
    return math.sqrt(max(0.0, 1.0 - gamma * gamma))


def _check_gamma(gamma: float) -> float:
    if not (0.0 <= gamma <= 1.0):
        raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
    return float(gamma)


def _damping_factors(gamma: float) -> tuple[np.ndarray, np.ndarray]:
    w = _omega(gamma)
    keep = np.array([[gamma, 0.0], [0.0, 1.0]], dtype=np.complex128)
    jump = np.array([[0.0, 0.0], [w, 0.0]], dtype=np.complex128)
    return keep, jump


def amplitude_damping(gamma: float) -> KrausChannel:
    """Single-qubit dissipative channel ``{diag(gamma, 1), [[0,0],[omega,0]]}``."""
    return KrausChannel(_damping_factors(_check_gamma(gamma)))


def two_qubit_dissipative(params: DecayParams) -> KrausChannel:
    """Two qubits decaying into independent baths.

    Operators in order: keep x keep, keep x jump, jump x keep, jump x jump.
    """
    ka, ja = _damping_factors(params.gamma_a)
    kb, jb = _damping_factors(params.gamma_b)
    return KrausChannel((kron(ka, kb), kron(ka, jb), kron(ja, kb), kron(ja, jb)))


def identity_channel(dim: int = 2) -> KrausChannel:
    return KrausChannel((np.eye(dim, dtype=np.complex128),))


PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128)


def dephasing(p: float) -> KrausChannel:
    """Random-unitary phase-flip channel ``{sqrt(p) I, sqrt(1-p) Z}``."""
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"p must lie in [0, 1], got {p}")
    return KrausChannel((math.sqrt(p) * np.eye(2), math.sqrt(1.0 - p) * PAULI_Z))


def random_unitary_channel(probs: Sequence[float], unitaries: Sequence) -> KrausChannel:
    return KrausChannel(tuple(math.sqrt(p) * as_matrix(u) for p, u in zip(probs, unitaries)))


def apply(ch: KrausChannel, rho) -> DensityMatrix:
    """``sum_n K_n rho K_n^dag``."""
    r = as_matrix(rho)
    if r.shape != (ch.dim, ch.dim):
        raise DimensionError(f"state has shape {r.shape}, channel acts on dim {ch.dim}")
    out = sum(k @ r @ k.conj().T for k in ch.ops)
    return DensityMatrix(0.5 * (out + out.conj().T))


def unitarity_residual(v) -> float:
    v = as_matrix(v)
    if v.shape[0] != v.shape[1]:
        return float("inf")
    return float(np.max(np.abs(v.conj().T @ v - np.eye(v.shape[0]))))


def transform(ch: KrausChannel, v) -> KrausChannel:
    """Remix the decomposition: ``L_n = sum_m V[n, m] K_m``.

    The result describes the same channel; the CPTP invariant is re-checked
    on construction.
    """
    v = as_matrix(v)
    m = len(ch)
    if v.shape != (m, m):
        raise DimensionError(f"mixing matrix has shape {v.shape}, channel has {m} operators")
    res = unitarity_residual(v)
    if res > TOL_UNITARY:
        raise NotUnitary(f"mixing matrix is not unitary (residual {res:.3e})")
    stack = np.stack(ch.ops)
    return KrausChannel(tuple(np.tensordot(v, stack, axes=1)))


def detect_ru(ch: KrausChannel, tol: float = 1e-10) -> RuDecomposition | NotRu:
    """Decide whether every operator is a multiple of a unitary.

    For each ``K``, ``K^dag K`` must equal ``s * I`` where ``s`` is taken as
    the mean of its diagonal; then ``c = sqrt(s)`` and ``U = K / c``. Zero
    operators get ``c = 0`` and ``U = I``.
    """
    coeffs, unitaries = [], []
    eye = np.eye(ch.dim)
    for n, k in enumerate(ch.ops):
        kk = k.conj().T @ k
        s = float(np.mean(kk.diagonal().real))
        res = float(np.max(np.abs(kk - s * eye)))
        if res > tol:
            return NotRu(failing_index=n, residual=res)
        c = math.sqrt(max(s, 0.0))
        if c <= tol:
            coeffs.append(0.0)
            unitaries.append(_frozen(eye))
        else:
            coeffs.append(c)
            unitaries.append(_frozen(k / c))
    return RuDecomposition(tuple(coeffs), tuple(unitaries))


def gamma_at(profile: DecayProfile, t: float) -> float:
    if t < 0:
        raise ValueError(f"time must be non-negative, got {t}")
    return math.exp(-profile.rate * t / 2.0)


# JSON interchange: {"dim": n, "ops": [[[re, im], ...], ...]}, row-major.

def channel_to_dict(ch: KrausChannel) -> dict:
    return {
        "dim": ch.dim,
        "ops": [[[float(z.real), float(z.imag)] for z in k.reshape(-1)] for k in ch.ops],
    }


def channel_from_dict(data: dict) -> KrausChannel:
    try:
        dim = int(data["dim"])
        raw_ops = data["ops"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed channel JSON: {exc}") from exc
    if dim < 1 or dim > MAX_DIM:
        raise ValueError(f"malformed channel JSON: dim {dim} out of range")
    ops = []
    for n, entries in enumerate(raw_ops):
        if len(entries) != dim * dim:
            raise ValueError(
                f"malformed channel JSON: operator {n} has {len(entries)} entries, "
                f"expected {dim * dim}"
            )
        try:
            flat = np.array([complex(float(re), float(im)) for re, im in entries])
        except (TypeError, ValueError) as exc:
            raise ValueError(f"malformed channel JSON: operator {n}: {exc}") from exc
        ops.append(flat.reshape(dim, dim))
    return KrausChannel(tuple(ops))


def dumps_channel(ch: KrausChannel) -> str:
    # json writes floats with repr, the shortest exact round-trip form
    return json.dumps(channel_to_dict(ch))


def loads_channel(text: str) -> KrausChannel:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed channel JSON: {exc}") from exc
    return channel_from_dict(data)


def load_channel(path: str | Path) -> KrausChannel:
    return loads_channel(Path(path).read_text(encoding="utf-8"))


def save_channel(ch: KrausChannel, path: str | Path) -> None:
    Path(path).write_text(dumps_channel(ch) + "\n", encoding="utf-8")
