"""lobsim: exact linear-optics simulation of Bell measurement and teleportation.

The package models three qubit encodings on truncated Fock space --
polarization rail pairs, coherent-state superpositions, and hybrid
rail (x) field qubits -- together with the linear-optical Bell analyzers,
feed-forward corrections, and resource-state generation built on them.
"""

from .fock import (
    BRANCH_PROB_FLOOR,
    CutoffPolicy,
    Mode,
    ModeKind,
    ModeLayout,
    PRUNE_THRESHOLD,
    PureState,
    coherent_amplitudes,
    coherent_state,
    field_mode,
    fidelity,
    fock_state,
    inner_product,
    mean_occupation_amplitude,
    number_marginal,
    partial_inner,
    pol_pair,
    project,
    rail_labels,
    superpose,
    tensor,
    vacuum,
)
from .elements import (
    BS_5050,
    JONES_ANTIDIAGONAL,
    JONES_DIAGONAL,
    JONES_SWAP,
    beam_splitter_5050,
    conditional_kerr,
    displacement,
    ideal_coherent_z,
    pauli_x,
    pauli_z,
    pbs_route,
    phase_shift,
    wave_plate,
)
from .encodings import (
    BellIndex,
    Encoding,
    EncodingParams,
    LogicalAmplitudes,
    coherent_bell_normalization,
    hybrid_basis_state,
    make_coherent_bell,
    make_coherent_qubit,
    make_hybrid_channel,
    make_hybrid_qubit,
    make_polarization_bell,
    make_polarization_qubit,
    minus_state,
    plus_state,
    polarization_state,
    scs_state,
)
from .measurement import (
    Detector,
    DetectorKind,
    OutcomeDistribution,
    OutcomeRecord,
    PnpdClass,
    derive_seed,
    enumerate_outcomes,
    sample_outcome,
)
from .analyzers import (
    BAlphaClass,
    BAlphaOutcome,
    BaBranch,
    BPClass,
    BPOutcome,
    BpBranch,
    FeedForward,
    HybridBsmBranch,
    b_p_oracle,
    hybrid_bsm,
    identified_bell,
    run_b_alpha,
    run_b_p,
    table1_feedforward,
)
from .teleport import (
    Metrics,
    SweepPoint,
    TeleportConfig,
    TeleportRun,
    TeleportStatus,
    analytic_success,
    hybrid_success_law,
    sweep_alpha,
    teleport,
    teleport_coherent,
    teleport_hybrid,
    teleport_polarization,
)
from .kerrgen import (
    KerrGenParams,
    expected_uncompensated_fidelity,
    generate_ecs_via_bs,
    generate_hybrid_pair,
    hybrid_pair_target,
    rotation_exactness_check,
)
from . import errors

__version__ = "0.1.0"
