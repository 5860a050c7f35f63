"""Detect and quantify non-Markovianity of small open quantum systems.

The package evolves exactly solvable system-environment models, purifies the
initial state with a minimal ancilla, and witnesses information backflow
through the entropy gap S[rho_S] - S[rho_A], which lower-bounds the quantum
discord carried by the environment-system pair.
"""

from .correlations import (DiscordResult, DiscordSettings, MeasurementBasis,
                           binary_entropy, concurrence, conditional_entropy,
                           discord, discord_at_basis, entanglement_of_formation,
                           monogamy_residual, von_neumann_entropy,
                           zero_discord_witness)
from .dynamics import (CustomHamiltonianModel, DephasingModel,
                       JaynesCummingsModel, SpectralPropagator, Trajectory,
                       TrajectoryOptions, TrajectorySample,
                       dephasing_kraus_pair, dephasing_propagator,
                       hadamard_channel, hadamard_demo_initial_state,
                       jc_excitation_number, jc_propagator, run_hadamard_demo,
                       run_trajectory)
from .errors import (ConfigError, InvalidStateError, NumericalError,
                     TruncationError)
from .states import (DensityMatrix, PureState, coherent_state,
                     coherent_truncation_tail, eig_hermitian, partial_trace,
                     purify, purity, tensor)
from .tolerances import (DEFAULT_LOG_BASE, DEFAULT_TOLERANCES, Tolerances,
                         resolve_log_base)
from .witness import (VERDICT_NOT_WITNESSED, VERDICT_WITNESSED, WitnessReport,
                      assemble_report, delta_sa, first_detection_time, p_nm,
                      p_nm_tilde)

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "CustomHamiltonianModel", "DEFAULT_LOG_BASE",
    "DEFAULT_TOLERANCES", "DensityMatrix", "DephasingModel", "DiscordResult",
    "DiscordSettings", "InvalidStateError", "JaynesCummingsModel",
    "MeasurementBasis", "NumericalError", "PureState", "SpectralPropagator",
    "Tolerances", "Trajectory", "TrajectoryOptions", "TrajectorySample",
    "TruncationError", "VERDICT_NOT_WITNESSED", "VERDICT_WITNESSED",
    "WitnessReport", "assemble_report", "binary_entropy", "coherent_state",
    "coherent_truncation_tail", "concurrence", "conditional_entropy",
    "delta_sa", "dephasing_kraus_pair", "dephasing_propagator", "discord",
    "discord_at_basis", "eig_hermitian", "entanglement_of_formation",
    "first_detection_time", "hadamard_channel", "hadamard_demo_initial_state",
    "jc_excitation_number", "jc_propagator", "monogamy_residual", "p_nm",
    "p_nm_tilde", "partial_trace", "purify", "purity", "resolve_log_base",
    "run_hadamard_demo", "run_trajectory", "tensor", "von_neumann_entropy",
    "zero_discord_witness", "__version__",
]
