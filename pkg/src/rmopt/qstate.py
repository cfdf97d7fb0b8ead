"""Quantum state containers, local unitaries, and entropy primitives.

Conventions
-----------
Pure states of ``n`` qubits are vectors of ``2**n`` complex amplitudes in
the computational basis with big-endian bit order: the basis index
``b_1 b_2 ... b_n`` (as a binary number) has qubit 1 in the most
significant bit.  Applying a single-qubit unitary to qubit ``k`` therefore
acts on axis ``k-1`` of the amplitude tensor reshaped to ``(2,)*n``.

Entropies are in bits (base-2 logarithms) throughout.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "DensityMatrix",
    "HermitianParams",
    "InvalidStateError",
    "LocalUnitaryParams",
    "PureState",
    "apply_local_unitaries",
    "apply_qubit_unitaries",
    "ghz_state",
    "grover_state",
    "hermitian_eigensystem",
    "hermitian_from_flat",
    "load_density_matrix",
    "load_pure_state",
    "measurement_entropy",
    "partial_trace",
    "product_state",
    "random_density_matrix",
    "random_pure_state",
    "save_density_matrix",
    "save_pure_state",
    "tensor_product",
    "unitary_2x2",
    "unitary_from_hermitian",
    "von_neumann_entropy",
]

#: Validation tolerances: norms and hermiticity must hold to NORM_ATOL;
#: density-matrix eigenvalues may undershoot zero by at most EIG_ATOL
#: (anything in between is clamped to zero before taking logs).
NORM_ATOL = 1e-12
EIG_ATOL = 1e-10


class InvalidStateError(ValueError):
    """Raised when a state fails normalization/hermiticity/positivity checks."""


@dataclass(frozen=True)
class PureState:
    """Immutable pure state of ``n_qubits`` qubits.

    ``amplitudes`` must have length ``2**n_qubits`` and unit norm within
    ``NORM_ATOL``; the stored array is complex128 and write-protected.
    """

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if not isinstance(self.n_qubits, int) or self.n_qubits < 1:
            raise InvalidStateError(
                f"n_qubits must be a positive integer, got {self.n_qubits!r}")
        amps = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1).copy()
        if amps.shape != (2 ** self.n_qubits,):
            raise InvalidStateError(
                f"expected {2 ** self.n_qubits} amplitudes for "
                f"{self.n_qubits} qubits, got {amps.shape[0]}")
        norm_sq = float(np.sum(amps.real ** 2 + amps.imag ** 2))
        if abs(norm_sq - 1.0) > NORM_ATOL:
            raise InvalidStateError(
                f"state is not normalized: sum |a|^2 = {norm_sq!r}")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return 2 ** self.n_qubits

    def probabilities(self) -> np.ndarray:
        """Computational-basis measurement probabilities ``|a_i|^2``."""
        a = self.amplitudes
        return a.real ** 2 + a.imag ** 2


@dataclass(frozen=True)
class DensityMatrix:
    """Immutable density matrix on a bipartite system A (x) B.

    ``entries`` is ``(dim_a*dim_b, dim_a*dim_b)``, must be Hermitian and
    unit-trace within ``NORM_ATOL``, with eigenvalues above ``-EIG_ATOL``.
    Basis order is row-major over (A index, B index), i.e. B varies fastest.
    """

    dim_a: int
    dim_b: int
    entries: np.ndarray

    def __post_init__(self) -> None:
        for label, d in (("dim_a", self.dim_a), ("dim_b", self.dim_b)):
            if not isinstance(d, int) or d < 1:
                raise InvalidStateError(
                    f"{label} must be a positive integer, got {d!r}")
        d = self.dim_a * self.dim_b
        mat = np.asarray(self.entries, dtype=np.complex128).copy()
        if mat.shape != (d, d):
            raise InvalidStateError(
                f"expected a {d}x{d} matrix for dims "
                f"({self.dim_a}, {self.dim_b}), got shape {mat.shape}")
        if np.max(np.abs(mat - mat.conj().T)) > NORM_ATOL:
            raise InvalidStateError("matrix is not Hermitian")
        tr = complex(np.trace(mat))
        if abs(tr - 1.0) > NORM_ATOL:
            raise InvalidStateError(f"trace must be 1, got {tr!r}")
        if float(np.min(np.linalg.eigvalsh(mat))) < -EIG_ATOL:
            raise InvalidStateError("matrix has a negative eigenvalue")
        mat.flags.writeable = False
        object.__setattr__(self, "entries", mat)

    @property
    def dim(self) -> int:
        return self.dim_a * self.dim_b


@dataclass(frozen=True)
class LocalUnitaryParams:
    """Angles ``(delta_k, gamma_k)`` of one single-qubit unitary per qubit.

    Stored as an ``(n_qubits, 2)`` array; :meth:`from_flat` /
    :meth:`to_flat` convert to the flat layout
    ``(delta_1, gamma_1, ..., delta_n, gamma_n)`` used by the optimizer.
    """

    angles: np.ndarray

    def __post_init__(self) -> None:
        a = np.asarray(self.angles, dtype=float).copy()
        if a.ndim != 2 or a.shape[1] != 2 or a.shape[0] < 1:
            raise ValueError(
                f"angles must have shape (n_qubits, 2), got {a.shape}")
        a.flags.writeable = False
        object.__setattr__(self, "angles", a)

    @property
    def n_qubits(self) -> int:
        return self.angles.shape[0]

    @classmethod
    def from_flat(cls, vec: np.ndarray) -> "LocalUnitaryParams":
        vec = np.asarray(vec, dtype=float)
        if vec.ndim != 1 or vec.size % 2:
            raise ValueError(
                f"flat parameter vector must have even length, got {vec.shape}")
        return cls(vec.reshape(-1, 2))

    def to_flat(self) -> np.ndarray:
        return self.angles.reshape(-1).copy()

    def matrices(self) -> np.ndarray:
        """The ``(n_qubits, 2, 2)`` stack of unitaries."""
        return _unitary_2x2_batch(self.angles[:, 0], self.angles[:, 1])


@dataclass(frozen=True)
class HermitianParams:
    """Real parametrization of a ``dim x dim`` Hermitian matrix.

    The flat layout has ``dim**2`` entries: first the ``dim`` diagonal
    values, then ``(Re H_ij, Im H_ij)`` for each upper pair ``i < j`` in
    row-major order.
    """

    dim: int
    values: np.ndarray

    def __post_init__(self) -> None:
        if not isinstance(self.dim, int) or self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim!r}")
        v = np.asarray(self.values, dtype=float).reshape(-1).copy()
        if v.shape != (self.dim ** 2,):
            raise ValueError(
                f"expected {self.dim ** 2} parameters for dim={self.dim}, "
                f"got {v.shape[0]}")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def matrix(self) -> np.ndarray:
        return hermitian_from_flat(self.values[np.newaxis, :], self.dim)[0]


def hermitian_from_flat(flat: np.ndarray, dim: int) -> np.ndarray:
    """Build a batch of Hermitian matrices from flat real parameters.

    ``flat`` has shape ``(m, dim**2)`` in the :class:`HermitianParams`
    layout; returns ``(m, dim, dim)`` complex matrices.
    """
    flat = np.asarray(flat, dtype=float)
    m = flat.shape[0]
    if flat.shape != (m, dim ** 2):
        raise ValueError(f"expected shape (m, {dim ** 2}), got {flat.shape}")
    h = np.zeros((m, dim, dim), dtype=np.complex128)
    diag = np.arange(dim)
    h[:, diag, diag] = flat[:, :dim]
    if dim > 1:
        iu, ju = np.triu_indices(dim, k=1)
        re = flat[:, dim::2]
        im = flat[:, dim + 1::2]
        h[:, iu, ju] = re + 1j * im
        h[:, ju, iu] = re - 1j * im
    return h


def _unitary_2x2_batch(delta: np.ndarray, gamma: np.ndarray) -> np.ndarray:
    """Stack of single-qubit unitaries for angle arrays of equal shape."""
    delta = np.asarray(delta, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    phase = np.exp(1j * delta)
    cos_g, sin_g = np.cos(gamma), np.sin(gamma)
    u = np.empty(delta.shape + (2, 2), dtype=np.complex128)
    u[..., 0, 0] = cos_g / phase
    u[..., 0, 1] = -sin_g * phase
    u[..., 1, 0] = sin_g / phase
    u[..., 1, 1] = cos_g * phase
    return u


def unitary_2x2(delta: float, gamma: float) -> np.ndarray:
    """Two-parameter single-qubit unitary.

    ``[[exp(-i*delta)*cos(gamma), -exp(i*delta)*sin(gamma)],
       [exp(-i*delta)*sin(gamma),  exp(i*delta)*cos(gamma)]]``

    Covers every unitary relevant to minimizing measurement entropy: a
    global phase and a relative phase of the output basis drop out of the
    probabilities.
    """
    return _unitary_2x2_batch(np.float64(delta), np.float64(gamma))


def hermitian_eigensystem(
        h: HermitianParams | np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvector columns of ``H``.

    Only the lower triangle is read, so slightly non-Hermitian input is
    symmetrized implicitly.
    """
    mat = h.matrix() if isinstance(h, HermitianParams) else np.asarray(h)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {mat.shape}")
    return np.linalg.eigh(mat)


def unitary_from_hermitian(h: HermitianParams | np.ndarray) -> np.ndarray:
    """``exp(i*H)`` via the eigendecomposition of Hermitian ``H``."""
    mat = h.matrix() if isinstance(h, HermitianParams) else np.asarray(h)
    w, v = np.linalg.eigh(mat)
    return (v * np.exp(1j * w)) @ v.conj().T


def apply_qubit_unitaries(psi: PureState, mats: Sequence[np.ndarray]) -> PureState:
    """Apply one 2x2 unitary per qubit: ``(U_1 (x) ... (x) U_n) |psi>``."""
    mats = np.asarray(mats, dtype=np.complex128)
    n = psi.n_qubits
    if mats.shape != (n, 2, 2):
        raise ValueError(
            f"expected {n} unitaries of shape (2, 2), got {mats.shape}")
    amps = psi.amplitudes
    dim = amps.size
    for k in range(n):
        block = dim >> (k + 1)
        amps = np.einsum("ij,ajb->aib",
                         mats[k], amps.reshape(2 ** k, 2, block))
        amps = amps.reshape(dim)
    # Renormalize away accumulated rounding; unitaries preserve norm to ~1e-15.
    amps = amps / np.sqrt(np.sum(amps.real ** 2 + amps.imag ** 2))
    return PureState(n, amps)


def apply_local_unitaries(psi: PureState, params: LocalUnitaryParams) -> PureState:
    """Apply the angle-parametrized local unitaries of ``params``."""
    if params.n_qubits != psi.n_qubits:
        raise ValueError(
            f"params describe {params.n_qubits} qubits, state has {psi.n_qubits}")
    return apply_qubit_unitaries(psi, params.matrices())


def entropy_bits(p: np.ndarray) -> float:
    """Shannon entropy (base 2) of a probability vector; ``0*log 0 = 0``."""
    p = np.asarray(p, dtype=float)
    pos = p[p > 0.0]
    return float(-np.sum(pos * np.log2(pos)) + 0.0)  # +0.0 kills -0.0


def measurement_entropy(psi: PureState) -> float:
    """Entropy in bits of the computational-basis measurement of ``psi``."""
    return entropy_bits(psi.probabilities())


def von_neumann_entropy(rho: DensityMatrix | np.ndarray) -> float:
    """``-tr(rho log2 rho)`` from the eigenvalues of ``rho``.

    Eigenvalues in ``[-EIG_ATOL, 0)`` are rounding noise and are clamped
    to zero; anything lower raises :class:`InvalidStateError`.
    """
    mat = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho)
    w = np.linalg.eigvalsh(mat)
    if float(w[0]) < -EIG_ATOL:
        raise InvalidStateError(
            f"matrix has negative eigenvalue {float(w[0])!r}")
    return entropy_bits(np.maximum(w, 0.0))


def partial_trace(rho: DensityMatrix, keep: str) -> np.ndarray:
    """Reduced density matrix of subsystem ``keep`` ("A" or "B")."""
    t = rho.entries.reshape(rho.dim_a, rho.dim_b, rho.dim_a, rho.dim_b)
    if keep == "A":
        return np.einsum("abcb->ac", t)
    if keep == "B":
        return np.einsum("abad->bd", t)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


# ---------------------------------------------------------------------------
# Fixtures

def ghz_state(n_qubits: int, l0: complex, l1: complex) -> PureState:
    """``l0|0...0> + l1|1...1>`` normalized; errors if both weights vanish."""
    norm = abs(l0) ** 2 + abs(l1) ** 2
    if norm <= 0.0:
        raise InvalidStateError("l0 and l1 must not both be zero")
    amps = np.zeros(2 ** n_qubits, dtype=np.complex128)
    amps[0] = l0
    amps[-1] = l1
    return PureState(n_qubits, amps / np.sqrt(norm))


def grover_state(n_qubits: int, t: int, target: int = 0) -> PureState:
    """State of a search register after ``t`` amplitude-amplification steps.

    With ``N = 2**n_qubits`` and ``theta = arcsin(1/sqrt(N))``, the marked
    index carries amplitude ``sin((2t+1)*theta)`` and every other index
    ``cos((2t+1)*theta)/sqrt(N-1)``.  ``t = 0`` is the uniform
    superposition.
    """
    if not isinstance(t, int) or t < 0:
        raise ValueError(f"t must be a non-negative integer, got {t!r}")
    dim = 2 ** n_qubits
    if not 0 <= target < dim:
        raise ValueError(f"target must be in 0..{dim - 1}, got {target!r}")
    theta = np.arcsin(1.0 / np.sqrt(dim))
    amps = np.full(dim, np.cos((2 * t + 1) * theta) / np.sqrt(dim - 1),
                   dtype=np.complex128)
    amps[target] = np.sin((2 * t + 1) * theta)
    amps /= np.sqrt(np.sum(amps.real ** 2 + amps.imag ** 2))
    return PureState(n_qubits, amps)


def random_pure_state(n_qubits: int, rng: np.random.Generator) -> PureState:
    """Haar-random pure state (normalized complex Gaussian vector)."""
    dim = 2 ** n_qubits
    amps = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return PureState(n_qubits, amps / np.linalg.norm(amps))


def product_state(n_qubits: int, rng: np.random.Generator) -> PureState:
    """Tensor product of independent Haar-random single-qubit states."""
    amps = np.ones(1, dtype=np.complex128)
    for _ in range(n_qubits):
        q = rng.normal(size=2) + 1j * rng.normal(size=2)
        amps = np.kron(amps, q / np.linalg.norm(q))
    return PureState(n_qubits, amps)


def tensor_product(a: PureState, b: PureState) -> PureState:
    """``|a> (x) |b>`` with ``a``'s qubits first (most significant)."""
    return PureState(a.n_qubits + b.n_qubits,
                     np.kron(a.amplitudes, b.amplitudes))


def random_density_matrix(dim_a: int, dim_b: int,
                          rng: np.random.Generator) -> DensityMatrix:
    """Full-rank random state: normalized Wishart matrix ``G G^dag / tr``."""
    d = dim_a * dim_b
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    mat = g @ g.conj().T
    mat /= np.trace(mat).real
    # Symmetrize away the last few ulps so validation never flakes.
    mat = (mat + mat.conj().T) / 2.0
    return DensityMatrix(dim_a, dim_b, mat)


# ---------------------------------------------------------------------------
# JSON serialization

def _complex_pairs(values: Iterable[complex]) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in values]


def save_pure_state(psi: PureState, path: str | os.PathLike) -> None:
    """Write ``{"n_qubits": n, "amplitudes": [[re, im], ...]}``."""
    doc = {"n_qubits": psi.n_qubits,
           "amplitudes": _complex_pairs(psi.amplitudes)}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def load_pure_state(path: str | os.PathLike) -> PureState:
    """Inverse of :func:`save_pure_state`; malformed input raises
    :class:`InvalidStateError`."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    try:
        n = doc["n_qubits"]
        pairs = doc["amplitudes"]
        amps = np.array([complex(re, im) for re, im in pairs],
                        dtype=np.complex128)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidStateError(f"malformed pure-state file {path}: {exc}") from exc
    if not isinstance(n, int):
        raise InvalidStateError(f"n_qubits must be an integer, got {n!r}")
    return PureState(n, amps)


def save_density_matrix(rho: DensityMatrix, path: str | os.PathLike) -> None:
    """Write ``{"dim_a": ..., "dim_b": ..., "rows": [[[re, im], ...], ...]}``."""
    doc = {"dim_a": rho.dim_a, "dim_b": rho.dim_b,
           "rows": [_complex_pairs(row) for row in rho.entries]}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def load_density_matrix(path: str | os.PathLike) -> DensityMatrix:
    """Inverse of :func:`save_density_matrix`; malformed input raises
    :class:`InvalidStateError`."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    try:
        dim_a, dim_b = doc["dim_a"], doc["dim_b"]
        rows = doc["rows"]
        mat = np.array([[complex(re, im) for re, im in row] for row in rows],
                       dtype=np.complex128)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidStateError(f"malformed density-matrix file {path}: {exc}") from exc
    if not isinstance(dim_a, int) or not isinstance(dim_b, int):
        raise InvalidStateError("dim_a and dim_b must be integers")
    return DensityMatrix(dim_a, dim_b, mat)
