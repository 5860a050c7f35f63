"""Exact dynamics of small system-environment pairs with a purifying ancilla.

Models expose a joint Hamiltonian on S x E; trajectories purify the initial
joint state with a minimal ancilla A, evolve with U_SE x 1_A from a single
spectral decomposition, and record entropies and correlation measures on a
uniform time grid. hbar = 1 throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from .correlations import (DEFAULT_DISCORD_SETTINGS, DiscordSettings, concurrence,
                           discord, von_neumann_entropy, zero_discord_witness)
from .errors import InvalidStateError, NumericalError
from .states import (DensityMatrix, HADAMARD, PAULI_Z, coherent_state,
                     coherent_truncation_tail, partial_trace, purify, tensor)
from .tolerances import DEFAULT_LOG_BASE, DEFAULT_TOLERANCES, Tolerances

__all__ = [
    "SpectralPropagator",
    "JaynesCummingsModel",
    "DephasingModel",
    "CustomHamiltonianModel",
    "jc_propagator",
    "jc_excitation_number",
    "dephasing_propagator",
    "dephasing_kraus_pair",
    "hadamard_channel",
    "hadamard_demo_initial_state",
    "TrajectoryOptions",
    "TrajectorySample",
    "Trajectory",
    "run_trajectory",
    "run_hadamard_demo",
]

_SIGMA_PLUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)   # |1><0|
_SIGMA_MINUS = _SIGMA_PLUS.T.copy()


def _destroy(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1.0, dim)), 1).astype(complex)


class SpectralPropagator:
    """U(t) = V exp(-i D t) V^dag from one Hermitian eigendecomposition.

    Exact for every t (no step-size error); evolving a block of columns costs
    two small matrix products.
    """

    def __init__(self, hamiltonian: np.ndarray, *,
                 tolerances: Tolerances = DEFAULT_TOLERANCES):
        h = np.asarray(hamiltonian, dtype=complex)
        herm = np.max(np.abs(h - h.conj().T))
        if herm > tolerances.hermiticity:
            raise InvalidStateError(f"Hamiltonian not Hermitian: residual {herm:.3e}")
        self.energies, self.modes = np.linalg.eigh(h)

    @property
    def dim(self) -> int:
        return self.energies.shape[0]

    def unitary(self, t: float) -> np.ndarray:
        phase = np.exp(-1j * self.energies * t)
        return (self.modes * phase) @ self.modes.conj().T

    def evolve(self, t: float, block: np.ndarray) -> np.ndarray:
        """Apply U(t) to a (dim, m) block of column vectors."""
        phase = np.exp(-1j * self.energies * t)
        return self.modes @ (phase[:, None] * (self.modes.conj().T @ block))


@dataclass(frozen=True)
class JaynesCummingsModel:
    """Resonant qubit exchanging one excitation with a truncated cavity mode.

    H = coupling * (sigma^- a^dag + sigma^+ a) on S x E; the qubit starts in
    diag(epsilon, 1 - epsilon) and the cavity in a coherent state |alpha>
    truncated at n_max Fock levels.
    """

    coupling: float = 1.0
    alpha: complex = 5.0
    epsilon: float = 0.2
    n_max: int = 80

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise InvalidStateError(f"epsilon {self.epsilon} outside [0, 1]")
        if self.n_max < 1:
            raise InvalidStateError(f"n_max must be >= 1, got {self.n_max}")

    def hamiltonian(self) -> np.ndarray:
        a = _destroy(self.n_max + 1)
        h = np.kron(_SIGMA_MINUS, a.conj().T) + np.kron(_SIGMA_PLUS, a)
        return self.coupling * h

    @cached_property
    def propagator(self) -> SpectralPropagator:
        return SpectralPropagator(self.hamiltonian())

    def coherent_tail(self) -> float:
        return coherent_truncation_tail(self.alpha, self.n_max)

    def initial_joint_state(self, *, tolerances: Tolerances = DEFAULT_TOLERANCES) -> DensityMatrix:
        rho_s = DensityMatrix(np.diag([self.epsilon, 1.0 - self.epsilon]),
                              (2,), ("S",), validate=False)
        cavity = coherent_state(self.alpha, self.n_max, label="E", tolerances=tolerances)
        return tensor(rho_s, cavity.density_matrix())

    def with_n_max(self, n_max: int) -> "JaynesCummingsModel":
        return replace(self, n_max=n_max)


def jc_propagator(model: JaynesCummingsModel, t: float) -> np.ndarray:
    """Exact propagator of the exchange Hamiltonian at time t."""
    return model.propagator.unitary(t)


def jc_excitation_number(n_max: int) -> np.ndarray:
    """Conserved excitation operator sigma^+ sigma^- x 1 + 1 x a^dag a."""
    dim = n_max + 1
    return (np.kron(np.diag([0.0, 1.0]), np.eye(dim))
            + np.kron(np.eye(2), np.diag(np.arange(float(dim))))).astype(complex)


def _plus_state() -> DensityMatrix:
    v = np.full((2, 2), 0.5, dtype=complex)
    return DensityMatrix(v, (2,), ("S",), validate=False)


@dataclass(frozen=True, eq=False)
class DephasingModel:
    """Qubit dephased by a single two-level environment.

    H = (1/4)(1 + sigma3_S + sigma3_E - sigma3_S sigma3_E); the environment
    starts in diag(p0, 1 - p0) and stays frozen for all t. Default system
    state is |+><+|.
    """

    p0: float = 0.5
    initial_system: DensityMatrix = field(default_factory=_plus_state)

    def __post_init__(self):
        if not 0.0 <= self.p0 <= 1.0:
            raise InvalidStateError(f"p0 {self.p0} outside [0, 1]")
        if self.initial_system.dims != (2,):
            raise InvalidStateError("initial_system must be a single qubit")
        if self.initial_system.labels != ("S",):
            raise InvalidStateError("initial_system must carry the label 'S'")

    @property
    def p1(self) -> float:
        return 1.0 - self.p0

    def hamiltonian(self) -> np.ndarray:
        eye2 = np.eye(2, dtype=complex)
        return 0.25 * (np.eye(4, dtype=complex) + np.kron(PAULI_Z, eye2)
                       + np.kron(eye2, PAULI_Z) - np.kron(PAULI_Z, PAULI_Z))

    @cached_property
    def propagator(self) -> SpectralPropagator:
        return SpectralPropagator(self.hamiltonian())

    def initial_joint_state(self, *, tolerances: Tolerances = DEFAULT_TOLERANCES) -> DensityMatrix:
        env = DensityMatrix(np.diag([self.p0, self.p1]), (2,), ("E",), validate=False)
        return tensor(self.initial_system, env)


def dephasing_propagator(model: DephasingModel, t: float) -> np.ndarray:
    """Closed-form propagator: a controlled phase in the joint eigenbasis,
    diag(e^{-it/2}, e^{-it/2}, e^{-it/2}, e^{+it/2}) on |se>."""
    lo = complex(math.cos(t / 2.0), -math.sin(t / 2.0))
    return np.diag([lo, lo, lo, lo.conjugate()]).astype(complex)


def dephasing_kraus_pair(model: DephasingModel, t: float) -> tuple[np.ndarray, np.ndarray]:
    """Kraus operators of the reduced qubit channel at time t.

    A_0 = sqrt(p0) e^{-it/2} 1, A_1 = sqrt(p1) exp(-i t sigma3 / 2); they
    satisfy A_0^dag A_0 + A_1^dag A_1 = 1 exactly.
    """
    lo = complex(math.cos(t / 2.0), -math.sin(t / 2.0))
    a0 = math.sqrt(model.p0) * lo * np.eye(2, dtype=complex)
    a1 = math.sqrt(model.p1) * np.diag([lo, lo.conjugate()]).astype(complex)
    return a0, a1


@dataclass(frozen=True, eq=False)
class CustomHamiltonianModel:
    """Bilinear dilation H = H_S x 1 + 1 x H_E + coupling * H_int with
    arbitrary (small) factor dimensions and product initial state."""

    system_hamiltonian: np.ndarray
    environment_hamiltonian: np.ndarray
    interaction: np.ndarray
    initial_system: DensityMatrix
    initial_environment: DensityMatrix
    coupling: float = 1.0

    def __post_init__(self):
        d_s = self.initial_system.dim
        d_e = self.initial_environment.dim
        for name, h, d in (("system_hamiltonian", self.system_hamiltonian, d_s),
                           ("environment_hamiltonian", self.environment_hamiltonian, d_e),
                           ("interaction", self.interaction, d_s * d_e)):
            h = np.asarray(h)
            if h.shape != (d, d):
                raise InvalidStateError(f"{name} has shape {h.shape}, expected {(d, d)}")
        if self.initial_system.labels != ("S",) or self.initial_environment.labels != ("E",):
            raise InvalidStateError("initial factors must carry labels 'S' and 'E'")

    def hamiltonian(self) -> np.ndarray:
        d_s = self.initial_system.dim
        d_e = self.initial_environment.dim
        h = (np.kron(np.asarray(self.system_hamiltonian, dtype=complex), np.eye(d_e))
             + np.kron(np.eye(d_s), np.asarray(self.environment_hamiltonian, dtype=complex)))
        return h + self.coupling * np.asarray(self.interaction, dtype=complex)

    @cached_property
    def propagator(self) -> SpectralPropagator:
        return SpectralPropagator(self.hamiltonian())

    def initial_joint_state(self, *, tolerances: Tolerances = DEFAULT_TOLERANCES) -> DensityMatrix:
        return tensor(self.initial_system, self.initial_environment)


def hadamard_channel(rho: DensityMatrix, p: float, applied_to: str = "S") -> DensityMatrix:
    """(1 - p) rho + p (H x 1) rho (H x 1) with the Hadamard acting on one
    named qubit factor. A local channel on that factor alone."""
    if not 0.0 <= p <= 1.0:
        raise InvalidStateError(f"mixing probability {p} outside [0, 1]")
    k = rho.label_index(applied_to)
    if rho.dims[k] != 2:
        raise InvalidStateError(f"factor {applied_to!r} must be a qubit")
    factors = [np.eye(d, dtype=complex) for d in rho.dims]
    factors[k] = HADAMARD
    op = factors[0]
    for f in factors[1:]:
        op = np.kron(op, f)
    data = (1.0 - p) * rho.data + p * (op @ rho.data @ op)
    return DensityMatrix(data, rho.dims, rho.labels, validate=False)


def hadamard_demo_initial_state() -> DensityMatrix:
    """Classically correlated qubit pair (1/2)(|00><00| + |11><11|) on (S, A);
    zero discord on both sides before any channel acts."""
    data = np.diag([0.5, 0.0, 0.0, 0.5]).astype(complex)
    return DensityMatrix(data, (2, 2), ("S", "A"), validate=False)


@dataclass(frozen=True)
class TrajectoryOptions:
    log_base: float = DEFAULT_LOG_BASE
    record_discord: bool = False
    record_witness: bool = False
    discord_settings: DiscordSettings = DEFAULT_DISCORD_SETTINGS
    tolerances: Tolerances = DEFAULT_TOLERANCES


@dataclass(frozen=True)
class TrajectorySample:
    t: float
    entropy_system: float
    entropy_ancilla: float
    delta: float
    concurrence_sa: float | None
    concurrence_ea: float | None
    discord_s: float | None
    witness_comm: float | None


@dataclass
class Trajectory:
    """Uniformly sampled scalar series from one evolution."""

    times: np.ndarray
    samples: list[TrajectorySample]
    log_base: float
    diagnostics: dict

    def deltas(self) -> np.ndarray:
        return np.array([s.delta for s in self.samples])

    def column(self, name: str) -> list:
        return [getattr(s, name) for s in self.samples]


def _time_grid(t_end: float, dt: float) -> np.ndarray:
    if dt <= 0.0:
        raise InvalidStateError(f"dt must be positive, got {dt}")
    if t_end < dt:
        raise InvalidStateError(f"t_end {t_end} smaller than dt {dt}")
    n = int(math.floor(t_end / dt + 1e-9))
    times = dt * np.arange(n + 1)
    if times[-1] < t_end - 1e-9 * dt:
        times = np.append(times, t_end)
    return times


def _pair_matrix(psi3: np.ndarray, traced_axis: int, dims, labels) -> DensityMatrix:
    rho = np.tensordot(psi3, psi3.conj(), axes=((traced_axis,), (traced_axis,)))
    d = dims[0] * dims[1]
    return DensityMatrix(rho.reshape(d, d), dims, labels, validate=False)


def run_trajectory(model, t_end: float, dt: float,
                   options: TrajectoryOptions = TrajectoryOptions()) -> Trajectory:
    """Purify the model's initial S x E state, evolve under U_SE x 1_A, and
    record entropies, the entropy gap delta = S[rho_S] - S[rho_A], pair
    concurrences where both factors are qubits, and (optionally) discord and
    the commutator witness on rho_SE.

    The ancilla marginal never moves; every sampled global state stays pure
    within the purity tolerance or a NumericalError is raised.
    """
    tol = options.tolerances
    joint = model.initial_joint_state(tolerances=tol)
    psi0 = purify(joint, ancilla_label="A", tolerances=tol)
    d_s, d_e = joint.dims
    d_a = psi0.dims[-1]
    base = options.log_base

    if options.record_discord and d_s != 2:
        raise InvalidStateError("discord recording requires a qubit system factor")

    prop = model.propagator
    times = _time_grid(t_end, dt)
    # One eigenbasis projection of the initial block serves every time point.
    block0 = prop.modes.conj().T @ psi0.amplitudes.reshape(d_s * d_e, d_a)

    samples: list[TrajectorySample] = []
    max_norm_dev = 0.0
    for t in times:
        phase = np.exp(-1j * prop.energies * t)
        block = prop.modes @ (phase[:, None] * block0)
        norm2 = float(np.sum(np.abs(block) ** 2))
        max_norm_dev = max(max_norm_dev, abs(norm2 - 1.0))
        if abs(norm2 - 1.0) > tol.purity:
            raise NumericalError(f"state norm drifted to {norm2:.12f} at t={t:g}")
        psi3 = block.reshape(d_s, d_e, d_a)

        rho_s = np.tensordot(psi3, psi3.conj(), axes=((1, 2), (1, 2)))
        rho_a = np.tensordot(psi3, psi3.conj(), axes=((0, 1), (0, 1)))
        s_s = von_neumann_entropy(rho_s, base)
        s_a = von_neumann_entropy(rho_a, base)

        conc_sa = None
        if d_s == 2 and d_a == 2:
            rho_sa = _pair_matrix(psi3, 1, (d_s, d_a), ("S", "A"))
            conc_sa = concurrence(rho_sa)
        conc_ea = None
        if d_e == 2 and d_a == 2:
            rho_ea = _pair_matrix(psi3, 0, (d_e, d_a), ("E", "A"))
            conc_ea = concurrence(rho_ea)

        disc = wit = None
        if options.record_discord or options.record_witness:
            rho_se = _pair_matrix(psi3, 2, (d_s, d_e), ("S", "E"))
            if options.record_discord:
                disc = discord(rho_se, measured="S", base=base,
                               settings=options.discord_settings, tolerances=tol).value
            if options.record_witness:
                wit = zero_discord_witness(rho_se, measured="S")

        samples.append(TrajectorySample(
            t=float(t), entropy_system=s_s, entropy_ancilla=s_a, delta=s_s - s_a,
            concurrence_sa=conc_sa, concurrence_ea=conc_ea,
            discord_s=disc, witness_comm=wit))

    diagnostics = {
        "ancilla_dim": int(d_a),
        "max_purity_deviation": max_norm_dev,
        "log_base": base,
    }
    if isinstance(model, JaynesCummingsModel):
        diagnostics["coherent_tail"] = model.coherent_tail()
    return Trajectory(times=times, samples=samples, log_base=base,
                      diagnostics=diagnostics)


def run_hadamard_demo(t_end: float = 0.5, dt: float = 0.01,
                      options: TrajectoryOptions = TrajectoryOptions()) -> Trajectory:
    """Sweep the Hadamard mixing probability p = t over a grid and record the
    same columns as run_trajectory on the (S, A) pair.

    Every output block of the mixing channel is an affine combination of the
    identity and one fixed operator, so the blocks keep commuting and both the
    discord and the commutator witness stay at zero for every p. The sweep
    records those (honest) zeros; delta is also exactly 0 since the channel is
    local on S. The sweep's states are mixed, so there is no purity check.
    """
    if t_end > 1.0:
        raise InvalidStateError("the demo mixing parameter p = t is capped at 1")
    base = options.log_base
    rho0 = hadamard_demo_initial_state()
    times = _time_grid(t_end, dt)
    samples: list[TrajectorySample] = []
    for t in times:
        rho = hadamard_channel(rho0, p=float(t), applied_to="S")
        rho_s = partial_trace(rho, "S").data
        rho_a = partial_trace(rho, "A").data
        s_s = von_neumann_entropy(rho_s, base)
        s_a = von_neumann_entropy(rho_a, base)
        disc = wit = None
        if options.record_discord:
            disc = discord(rho, measured="S", base=base,
                           settings=options.discord_settings,
                           tolerances=options.tolerances).value
        if options.record_witness:
            wit = zero_discord_witness(rho, measured="S")
        samples.append(TrajectorySample(
            t=float(t), entropy_system=s_s, entropy_ancilla=s_a, delta=s_s - s_a,
            concurrence_sa=concurrence(rho), concurrence_ea=None,
            discord_s=disc, witness_comm=wit))
    diagnostics = {"channel_demo": True, "log_base": base, "ancilla_dim": 2}
    return Trajectory(times=times, samples=samples, log_base=base,
                      diagnostics=diagnostics)
