"""Quantum discord and entropic deficits under qutrit projective measurements."""

from .linalg import (
    DensityMatrix,
    DimensionError,
    HermitianEig,
    commutator,
    hermitian_eig,
    kron,
    matrix_func,
    partial_trace,
    ptrace,
)
from .measurements import (
    MeasurementBasis,
    MeasurementParams,
    MeasurementType,
    SpinDiagram,
    classify,
    diagram_record,
    full_basis,
    intrinsic_basis,
    spin_basis,
    spin_diagram,
    type_ii_basis,
    type_iii_basis,
)
from .measures import (
    LINEAR,
    VON_NEUMANN,
    EntropyFunctional,
    MeasureAtM,
    StationarityResidual,
    apply_measurement,
    deficit_given,
    discord_given,
    f_entropy,
    i2_given,
    parity_invariance_check,
    stationarity_d,
    stationarity_f,
    vn_entropy,
)
from .models import (
    THETA_C,
    AlignedMixtureState,
    XYZChainSpec,
    aligned_mixture,
    alpha_star,
    bell_anchor,
    d_closed,
    fixed_parity_state,
    ground_state,
    i2_closed,
    load_state,
    reduce_pair,
    save_state,
    thermal_state,
    xyz_hamiltonian,
)
from .optimize import (
    FamilyComparison,
    MeasurementFamily,
    OptimizationResult,
    OptimizerConfig,
    minimize,
    minimize_all_families,
)
from .spins import (
    ParityOperator,
    SpinTriple,
    coherent_state,
    composite_parity,
    parity_z,
    rotation,
    spin_operators,
)

__version__ = "0.1.0"
