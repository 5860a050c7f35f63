"""Entropies, entanglement measures, and measurement-based discord.

Discord here is always of the measured-subsystem kind: the minimum over
rank-1 projective measurements on a single qubit factor of

    D = S[rho_measured] - S[rho] + sum_j p_j S[rho_rest | outcome j].

The minimization runs a coarse Bloch-sphere grid followed by Nelder-Mead
refinement from the best grid points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import InvalidStateError, NumericalError
from .states import DensityMatrix, PureState, PAULI_Y, partial_trace
from .tolerances import DEFAULT_LOG_BASE, DEFAULT_TOLERANCES, Tolerances

__all__ = [
    "von_neumann_entropy",
    "binary_entropy",
    "conditional_entropy",
    "concurrence",
    "entanglement_of_formation",
    "MeasurementBasis",
    "DiscordSettings",
    "DiscordResult",
    "discord",
    "discord_at_basis",
    "zero_discord_witness",
    "monogamy_residual",
]


def _entropy_from_eigenvalues(w: np.ndarray, base: float, floor: float) -> float:
    w = w[w > floor]
    if w.size == 0:
        return 0.0
    return float(-(w @ np.log(w)) / math.log(base))


def von_neumann_entropy(state, base: float = DEFAULT_LOG_BASE, *,
                        eig_floor: float = DEFAULT_TOLERANCES.entropy_eig_floor) -> float:
    """S[rho] = -Tr[rho log rho] in the given log base.

    Accepts a DensityMatrix, a PureState (entropy 0 up to rounding), or a raw
    Hermitian ndarray. Eigenvalues at or below eig_floor are dropped.
    """
    if isinstance(state, PureState):
        state = state.density_matrix()
    m = state.data if isinstance(state, DensityMatrix) else np.asarray(state)
    w = np.linalg.eigvalsh(m)
    return _entropy_from_eigenvalues(w, base, eig_floor)


def binary_entropy(p: float, base: float = DEFAULT_LOG_BASE) -> float:
    """Entropy of the distribution (p, 1-p)."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability {p} outside [0, 1]")
    if p == 0.0 or p == 1.0:
        return 0.0
    return float(-(p * math.log(p) + (1.0 - p) * math.log(1.0 - p)) / math.log(base))


def conditional_entropy(rho: DensityMatrix, conditioning: str = "S",
                        base: float = DEFAULT_LOG_BASE) -> float:
    """S[rho] - S[rho_conditioning], the entropy conditioned on one factor."""
    marginal = partial_trace(rho, conditioning)
    return von_neumann_entropy(rho, base) - von_neumann_entropy(marginal, base)


def concurrence(rho: DensityMatrix) -> float:
    """Two-qubit concurrence max(0, l1 - l2 - l3 - l4) from the decreasing
    square roots of the eigenvalues of rho (Y x Y) rho* (Y x Y)."""
    if rho.dims != (2, 2):
        raise InvalidStateError(f"concurrence needs a two-qubit state, got dims {rho.dims}")
    yy = np.kron(PAULI_Y, PAULI_Y)
    r = rho.data @ yy @ rho.data.conj() @ yy
    ev = np.linalg.eigvals(r).real
    roots = np.sqrt(np.clip(ev, 0.0, None))
    roots[::-1].sort()
    c = roots[0] - roots[1] - roots[2] - roots[3]
    return float(min(max(c, 0.0), 1.0))


def entanglement_of_formation(rho: DensityMatrix, base: float = DEFAULT_LOG_BASE) -> float:
    """Two-qubit entanglement of formation h((1 + sqrt(1 - C^2)) / 2)."""
    c = concurrence(rho)
    x = (1.0 + math.sqrt(max(0.0, 1.0 - c * c))) / 2.0
    return binary_entropy(x, base)


@dataclass(frozen=True)
class MeasurementBasis:
    """Rank-1 projective qubit basis from Bloch angles.

    The measured directions are |u> = cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>
    and its orthogonal complement.
    """

    theta: float
    phi: float

    def ket(self) -> np.ndarray:
        half = self.theta / 2.0
        return np.array([math.cos(half),
                         complex(math.cos(self.phi), math.sin(self.phi)) * math.sin(half)],
                        dtype=complex)

    def projectors(self) -> tuple[np.ndarray, np.ndarray]:
        u = self.ket()
        p0 = np.outer(u, u.conj())
        return p0, np.eye(2, dtype=complex) - p0

    def canonical(self) -> "MeasurementBasis":
        """Equivalent angles with theta in [0, pi] and phi in [0, 2 pi)."""
        nx = math.sin(self.theta) * math.cos(self.phi)
        ny = math.sin(self.theta) * math.sin(self.phi)
        nz = math.cos(self.theta)
        theta = math.acos(min(1.0, max(-1.0, nz)))
        phi = math.atan2(ny, nx) % (2.0 * math.pi)
        return MeasurementBasis(theta, phi)


@dataclass(frozen=True)
class DiscordSettings:
    """Coarse-grid and refinement parameters for the discord minimizer."""

    theta_points: int = 24
    phi_points: int = 48
    refine_starts: int = 3
    xatol: float = 1e-8
    fatol: float = 1e-10
    max_iterations: int = 400
    chunk: int = 256


DEFAULT_DISCORD_SETTINGS = DiscordSettings()


@dataclass(frozen=True)
class DiscordResult:
    value: float
    basis: MeasurementBasis
    probabilities: tuple[float, float]
    evaluations: int


def _measured_blocks(rho: DensityMatrix, measured: str):
    """2x2 grid of operator blocks B[a, b] = <a|rho|b> on the measured qubit.

    Returns (blocks, rest_dim) with blocks of shape (2, 2, r, r), the measured
    factor moved to the front.
    """
    k = rho.label_index(measured)
    if rho.dims[k] != 2:
        raise InvalidStateError(
            f"measured factor {measured!r} must be a qubit, has dimension {rho.dims[k]}"
        )
    n = len(rho.dims)
    rest = math.prod(rho.dims) // 2
    t = rho.as_tensor()
    order = ([k] + [i for i in range(n) if i != k]
             + [k + n] + [i + n for i in range(n) if i != k])
    blocks = t.transpose(order).reshape(2, rest, 2, rest).transpose(0, 2, 1, 3)
    return np.ascontiguousarray(blocks), rest


def _conditional_term(blocks, thetas, phis, base, floor, eig_floor):
    """sum_j p_j S[conditional_j] for arrays of basis angles (vectorized)."""
    c = np.cos(thetas / 2.0)
    s = np.sin(thetas / 2.0)
    e = np.exp(1j * phis)
    b00, b01, b10, b11 = blocks[0, 0], blocks[0, 1], blocks[1, 0], blocks[1, 1]
    rest = b00 + b11
    m0 = (np.multiply.outer(c * c, b00)
          + np.multiply.outer(s * s, b11)
          + np.multiply.outer(c * s * e, b01)
          + np.multiply.outer(c * s * e.conj(), b10))
    m1 = rest[None, :, :] - m0
    out = np.zeros(len(thetas))
    for m in (m0, m1):
        p = np.trace(m, axis1=1, axis2=2).real
        w = np.linalg.eigvalsh(m)
        live = p > floor
        wn = np.where(w[live] > eig_floor * np.maximum(p[live, None], 1.0),
                      w[live], 1.0)
        # sum w log(w/p) = sum w log w - p log p, all per row
        ent = -(np.sum(wn * np.log(wn), axis=1) - p[live] * np.log(p[live]))
        out[live] += ent
    return out / math.log(base)


def discord_at_basis(rho: DensityMatrix, basis: MeasurementBasis,
                     measured: str = "S", base: float = DEFAULT_LOG_BASE) -> float:
    """Discord objective evaluated at one fixed measurement basis (no
    minimization). Always >= the optimized discord."""
    blocks, _ = _measured_blocks(rho, measured)
    tol = DEFAULT_TOLERANCES
    cond = _conditional_term(blocks, np.array([basis.theta]), np.array([basis.phi]),
                             base, tol.discord_branch_floor, tol.entropy_eig_floor)
    s_meas = von_neumann_entropy(_measured_marginal(blocks), base)
    s_tot = von_neumann_entropy(rho, base)
    return float(s_meas - s_tot + cond[0])


def _measured_marginal(blocks) -> np.ndarray:
    return np.trace(blocks, axis1=2, axis2=3)


def discord(rho: DensityMatrix, measured: str = "S",
            base: float = DEFAULT_LOG_BASE,
            settings: DiscordSettings = DEFAULT_DISCORD_SETTINGS,
            *, tolerances: Tolerances = DEFAULT_TOLERANCES) -> DiscordResult:
    """Quantum discord with projective measurements on the named qubit factor.

    A theta x phi coarse grid seeds Nelder-Mead refinements from the best
    refine_starts grid points; the returned basis is the canonical form of the
    best refined point. Small negative values inside the clamp tolerance are
    reported as 0.
    """
    blocks, rest = _measured_blocks(rho, measured)
    s_meas = von_neumann_entropy(_measured_marginal(blocks), base)
    s_tot = von_neumann_entropy(rho, base)
    floor = tolerances.discord_branch_floor
    eig_floor = tolerances.entropy_eig_floor

    thetas = np.linspace(0.0, math.pi, settings.theta_points)
    phis = np.linspace(0.0, 2.0 * math.pi, settings.phi_points, endpoint=False)
    tt, pp = np.meshgrid(thetas, phis, indexing="ij")
    tt = tt.reshape(-1)
    pp = pp.reshape(-1)

    values = np.empty(tt.size)
    for start in range(0, tt.size, settings.chunk):
        sl = slice(start, start + settings.chunk)
        values[sl] = _conditional_term(blocks, tt[sl], pp[sl], base, floor, eig_floor)
    evaluations = tt.size

    def objective(x):
        v = _conditional_term(blocks, np.array([x[0]]), np.array([x[1]]),
                              base, floor, eig_floor)
        return float(v[0])

    order = np.argsort(values)
    best_val = float(values[order[0]])
    best_angles = (float(tt[order[0]]), float(pp[order[0]]))
    step_t = math.pi / max(settings.theta_points - 1, 1) / 2.0
    step_p = 2.0 * math.pi / settings.phi_points / 2.0
    for idx in order[: settings.refine_starts]:
        x0 = np.array([tt[idx], pp[idx]])
        simplex = np.array([x0, x0 + [step_t, 0.0], x0 + [0.0, step_p]])
        res = minimize(objective, x0, method="Nelder-Mead",
                       options={"xatol": settings.xatol, "fatol": settings.fatol,
                                "maxiter": settings.max_iterations,
                                "initial_simplex": simplex})
        evaluations += res.nfev
        if res.fun < best_val:
            best_val = float(res.fun)
            best_angles = (float(res.x[0]), float(res.x[1]))

    raw = s_meas - s_tot + best_val
    if raw < -tolerances.discord_negative_clamp:
        raise NumericalError(f"discord evaluated to {raw:.3e}, beyond the clamp tolerance")
    value = max(raw, 0.0)

    basis = MeasurementBasis(*best_angles).canonical()
    b00, b01, b10, b11 = blocks[0, 0], blocks[0, 1], blocks[1, 0], blocks[1, 1]
    half = basis.theta / 2.0
    cth, sth = math.cos(half), math.sin(half)
    eph = complex(math.cos(basis.phi), math.sin(basis.phi))
    m0 = (cth * cth * b00 + sth * sth * b11
          + cth * sth * (eph * b01 + eph.conjugate() * b10))
    p0 = float(np.trace(m0).real)
    p0 = min(max(p0, 0.0), 1.0)
    return DiscordResult(value=value, basis=basis,
                         probabilities=(p0, 1.0 - p0), evaluations=evaluations)


def zero_discord_witness(rho: DensityMatrix, measured: str = "S") -> float:
    """Largest entry of |[rho, rho_measured x 1]|.

    Any positive value certifies nonzero discord on the measured side. The
    converse does not hold: a degenerate measured marginal (for example the
    maximally mixed qubit) commutes with everything, so discordant states can
    still score zero here. Classical states always score zero.
    """
    k = rho.label_index(measured)
    marginal = partial_trace(rho, measured)
    factors = [np.eye(d, dtype=complex) for d in rho.dims]
    factors[k] = marginal.data
    x = factors[0]
    for f in factors[1:]:
        x = np.kron(x, f)
    comm = rho.data @ x - x @ rho.data
    return float(np.max(np.abs(comm)))


def monogamy_residual(psi: PureState, measured: str = "S", environment: str = "E",
                      ancilla: str = "A", base: float = DEFAULT_LOG_BASE,
                      settings: DiscordSettings = DEFAULT_DISCORD_SETTINGS) -> float:
    """| E_f[rho_EA] - D[rho_ES] - S[rho_A] + S[rho_S] | on a pure three-qubit
    state; vanishes identically in exact arithmetic."""
    for name in (measured, environment, ancilla):
        if psi.dim_of(name) != 2:
            raise InvalidStateError(f"factor {name!r} must be a qubit for the monogamy identity")
    rho_ea = partial_trace(psi, (environment, ancilla))
    rho_es = partial_trace(psi, (environment, measured))
    ef = entanglement_of_formation(rho_ea, base)
    d = discord(rho_es, measured=measured, base=base, settings=settings).value
    s_a = von_neumann_entropy(partial_trace(psi, ancilla), base)
    s_s = von_neumann_entropy(partial_trace(psi, measured), base)
    return float(abs(ef - d - s_a + s_s))
