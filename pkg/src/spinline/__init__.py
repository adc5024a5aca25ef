"""Spin-1/2 XY communication line: transfer tensor and correlation landscapes."""

from .chain import (
    ChainSpec,
    ExcitationBasis,
    Propagator,
    build_basis,
    oracle_full_propagator,
    propagator,
    single_particle_amplitudes,
    two_particle_amplitude,
)
from .measures import (
    DeterminantPair,
    analytic_alpha_averages,
    concurrence,
    delta1,
    delta2,
    determinant_pair,
    entanglement_of_formation,
    info_correlation,
    jacobian_x,
)
from .states import (
    BlochX,
    ControlParams,
    ReceiverAffineMap,
    bloch_x,
    initial_qubit_state,
    receiver_map,
    rho_sr,
    unitary_from_angles,
)
from .transfer import (
    TransferTensor,
    classify_families,
    compute_transfer_tensor,
    read_archive,
    reduced_receiver_tensor,
    write_archive,
)

__version__ = "0.1.0"
