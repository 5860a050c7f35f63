"""State containers and dense linear algebra for small multipartite systems.

States carry named tensor factors (for example ("S", "E", "A")) so that
marginals are requested by name rather than by axis index. Everything is
dense and exact up to floating point; total dimensions stay small (<= 512).
"""

from __future__ import annotations

import math
from typing import Union

import numpy as np

from .errors import InvalidStateError, TruncationError
from .tolerances import DEFAULT_TOLERANCES, Tolerances

__all__ = [
    "DensityMatrix",
    "PureState",
    "tensor",
    "partial_trace",
    "eig_hermitian",
    "coherent_state",
    "coherent_truncation_tail",
    "purify",
    "purity",
    "PAULI_X",
    "PAULI_Y",
    "PAULI_Z",
    "HADAMARD",
]

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
HADAMARD = (PAULI_X + PAULI_Z) / math.sqrt(2.0)

PAULI_X.setflags(write=False)
PAULI_Y.setflags(write=False)
PAULI_Z.setflags(write=False)
HADAMARD.setflags(write=False)


def _normalize_factors(dim: int, dims, labels):
    if dims is None:
        dims = (dim,)
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims):
        raise InvalidStateError(f"factor dimensions must be >= 1, got {dims}")
    if math.prod(dims) != dim:
        raise InvalidStateError(
            f"factor dimensions {dims} do not multiply to total dimension {dim}"
        )
    if labels is None:
        labels = tuple(f"q{i}" for i in range(len(dims)))
    else:
        labels = tuple(str(s) for s in labels)
    if len(labels) != len(dims):
        raise InvalidStateError(
            f"{len(labels)} labels given for {len(dims)} factors"
        )
    if len(set(labels)) != len(labels):
        raise InvalidStateError(f"duplicate factor labels in {labels}")
    return dims, labels


class DensityMatrix:
    """Density matrix with named tensor factors.

    Parameters
    ----------
    data : array_like, shape (d, d)
    dims : sequence of int, optional
        Dimension of each factor; product must equal d. Default (d,).
    labels : sequence of str, optional
        One name per factor. Default "q0", "q1", ...
    validate : bool
        When True (default), check hermiticity, unit trace, and positivity
        against the given tolerances. Structural checks always run.
    """

    __slots__ = ("data", "dims", "labels")

    def __init__(self, data, dims=None, labels=None, *,
                 tolerances: Tolerances = DEFAULT_TOLERANCES, validate=True):
        data = np.array(data, dtype=complex)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise InvalidStateError(f"expected a square matrix, got shape {data.shape}")
        dims, labels = _normalize_factors(data.shape[0], dims, labels)
        if validate:
            herm = np.max(np.abs(data - data.conj().T))
            if herm > tolerances.hermiticity:
                raise InvalidStateError(f"not Hermitian: residual {herm:.3e}")
            tr = data.trace()
            if abs(tr - 1.0) > tolerances.trace:
                raise InvalidStateError(f"trace {tr:.12g} differs from 1")
            lo = float(np.linalg.eigvalsh(data)[0])
            if lo < -tolerances.positivity:
                raise InvalidStateError(f"negative eigenvalue {lo:.3e}")
        data.setflags(write=False)
        self.data = data
        self.dims = dims
        self.labels = labels

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def label_index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise InvalidStateError(
                f"unknown subsystem {label!r}, have {self.labels}"
            ) from None

    def dim_of(self, label: str) -> int:
        return self.dims[self.label_index(label)]

    def as_tensor(self) -> np.ndarray:
        """View with one row and one column axis per factor."""
        return self.data.reshape(self.dims + self.dims)

    def __repr__(self):
        parts = ", ".join(f"{s}:{d}" for s, d in zip(self.labels, self.dims))
        return f"DensityMatrix({parts})"


class PureState:
    """State vector with named tensor factors. Norm is validated to 1."""

    __slots__ = ("amplitudes", "dims", "labels")

    def __init__(self, amplitudes, dims=None, labels=None, *,
                 tolerances: Tolerances = DEFAULT_TOLERANCES, validate=True):
        amplitudes = np.array(amplitudes, dtype=complex).reshape(-1)
        dims, labels = _normalize_factors(amplitudes.shape[0], dims, labels)
        if validate:
            norm = np.linalg.norm(amplitudes)
            if abs(norm - 1.0) > tolerances.unit_norm:
                raise InvalidStateError(f"norm {norm:.12g} differs from 1")
        amplitudes.setflags(write=False)
        self.amplitudes = amplitudes
        self.dims = dims
        self.labels = labels

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def label_index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise InvalidStateError(
                f"unknown subsystem {label!r}, have {self.labels}"
            ) from None

    def dim_of(self, label: str) -> int:
        return self.dims[self.label_index(label)]

    def density_matrix(self) -> DensityMatrix:
        rho = np.outer(self.amplitudes, self.amplitudes.conj())
        return DensityMatrix(rho, self.dims, self.labels, validate=False)

    def as_tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.dims)

    def __repr__(self):
        parts = ", ".join(f"{s}:{d}" for s, d in zip(self.labels, self.dims))
        return f"PureState({parts})"


State = Union[DensityMatrix, PureState]


def tensor(a: State, b: State):
    """Tensor product of two states of the same kind. Labels must not clash."""
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        return DensityMatrix(np.kron(a.data, b.data), a.dims + b.dims,
                             a.labels + b.labels, validate=False)
    if isinstance(a, PureState) and isinstance(b, PureState):
        return PureState(np.kron(a.amplitudes, b.amplitudes), a.dims + b.dims,
                         a.labels + b.labels, validate=False)
    raise TypeError("tensor requires two DensityMatrix or two PureState operands")


def _resolve_keep(state: State, keep) -> tuple[int, ...]:
    if isinstance(keep, str):
        keep = (keep,)
    keep = tuple(keep)
    if not keep:
        raise InvalidStateError("keep must name at least one subsystem")
    if len(set(keep)) != len(keep):
        raise InvalidStateError(f"repeated subsystem names in {keep}")
    idx = tuple(state.label_index(s) for s in keep)
    return tuple(sorted(idx))


def partial_trace(state: State, keep) -> DensityMatrix:
    """Reduced density matrix over the named factors, in their original order.

    Accepts a DensityMatrix or a PureState; the pure-state path contracts the
    amplitude tensor directly and never forms the global matrix.
    """
    keep_idx = _resolve_keep(state, keep)
    n = len(state.dims)
    traced = tuple(i for i in range(n) if i not in keep_idx)
    new_dims = tuple(state.dims[i] for i in keep_idx)
    new_labels = tuple(state.labels[i] for i in keep_idx)
    d_keep = math.prod(new_dims)

    if isinstance(state, PureState):
        psi = state.as_tensor()
        if not traced:
            rho = np.outer(state.amplitudes, state.amplitudes.conj())
        else:
            rho = np.tensordot(psi, psi.conj(), axes=(traced, traced))
            rho = rho.reshape(d_keep, d_keep)
        return DensityMatrix(rho, new_dims, new_labels, validate=False)

    t = state.as_tensor()
    # Trace out axes from the highest index down so positions stay valid.
    for axis in sorted(traced, reverse=True):
        m = t.ndim // 2
        t = np.trace(t, axis1=axis, axis2=axis + m)
    rho = t.reshape(d_keep, d_keep)
    return DensityMatrix(rho, new_dims, new_labels, validate=False)


def eig_hermitian(matrix, *, tolerances: Tolerances = DEFAULT_TOLERANCES):
    """Eigenvalues (descending) and matching eigenvector columns of a
    Hermitian matrix. Raises InvalidStateError if the input is not Hermitian
    within tolerance."""
    m = matrix.data if isinstance(matrix, DensityMatrix) else np.asarray(matrix)
    herm = np.max(np.abs(m - m.conj().T))
    if herm > tolerances.hermiticity:
        raise InvalidStateError(f"not Hermitian: residual {herm:.3e}")
    w, v = np.linalg.eigh(m)
    return w[::-1].copy(), v[:, ::-1].copy()


def _coherent_amplitudes(alpha: complex, n_max: int):
    # c_n = alpha^n / sqrt(n!) * exp(-|alpha|^2 / 2), built by recurrence so
    # neither alpha^n nor n! is ever formed explicitly.
    amps = np.empty(n_max + 1, dtype=complex)
    amps[0] = 1.0
    for n in range(1, n_max + 1):
        amps[n] = amps[n - 1] * alpha / math.sqrt(n)
    amps *= math.exp(-abs(alpha) ** 2 / 2.0)
    tail = max(0.0, 1.0 - float(np.sum(np.abs(amps) ** 2)))
    return amps, tail


def coherent_truncation_tail(alpha: complex, n_max: int) -> float:
    """Probability weight 1 - sum |c_n|^2 lost by truncating at n_max."""
    if n_max < 1:
        raise InvalidStateError(f"n_max must be >= 1, got {n_max}")
    return _coherent_amplitudes(alpha, n_max)[1]


def coherent_state(alpha: complex, n_max: int, *, label: str = "E",
                   tolerances: Tolerances = DEFAULT_TOLERANCES) -> PureState:
    """Coherent state |alpha> truncated to Fock levels 0..n_max, renormalized.

    Raises TruncationError when the discarded Poisson tail exceeds
    tolerances.coherent_tail.
    """
    if n_max < 1:
        raise InvalidStateError(f"n_max must be >= 1, got {n_max}")
    amps, tail = _coherent_amplitudes(alpha, n_max)
    if tail > tolerances.coherent_tail:
        raise TruncationError(
            f"coherent-state tail {tail:.3e} exceeds {tolerances.coherent_tail:.1e} "
            f"at n_max={n_max}; increase n_max (mean photon number is {abs(alpha)**2:.1f})"
        )
    amps = amps / np.linalg.norm(amps)
    return PureState(amps, (n_max + 1,), (label,), validate=False)


def purify(rho: DensityMatrix, *, ancilla_label: str = "A",
           tolerances: Tolerances = DEFAULT_TOLERANCES) -> PureState:
    """Purification of rho with a minimal ancilla appended as the last factor.

    The ancilla dimension equals the numerical rank of rho (eigenvalues above
    purification_rank_cut relative to the largest). Tracing the ancilla back
    out reproduces rho up to the roundtrip tolerance.
    """
    w, v = eig_hermitian(rho, tolerances=tolerances)
    if w[0] <= 0.0:
        raise InvalidStateError("cannot purify a state with no positive weight")
    cut = tolerances.purification_rank_cut * w[0]
    rank = int(np.sum(w > cut))
    # psi = sum_i sqrt(w_i) |v_i> x |i>_A, laid out with the ancilla minor.
    amps = (v[:, :rank] * np.sqrt(np.maximum(w[:rank], 0.0))).reshape(-1)
    amps = amps / np.linalg.norm(amps)
    labels = rho.labels + (ancilla_label,)
    return PureState(amps, rho.dims + (rank,), labels, validate=False)


def purity(state: State) -> float:
    """Tr[rho^2]; equals 1 for pure states."""
    if isinstance(state, PureState):
        return float(np.sum(np.abs(state.amplitudes) ** 2) ** 2)
    return float(np.einsum("ij,ji->", state.data, state.data).real)
