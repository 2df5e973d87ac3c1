"""Coherence processing under time-translation symmetry and thermal operations."""
from ._kernels import BACKEND
from .bounds import (
    BoundQuery,
    cptp_bound,
    merge_bound_symmetric,
    merge_bound_thermal,
    qubit_symmetric_bound,
    qubit_thermal_bound,
    symmetric_bound,
    thermal_bound,
)
from .channels import (
    ChannelClassReport,
    KrausChannel,
    StochasticMatrix,
    apply,
    check_gibbs_preserving,
    check_symmetric,
    classify,
    compose,
    convex_combine,
    induced_stochastic,
    merge_channel,
    qubit_extremal_symmetric_channel,
    shift_channel,
)
from .errors import DomainError, FormatError, ModeflowError
from .qstate import (
    DensityMatrix,
    HamiltonianSpec,
    ModeDecomposition,
    dephase,
    gibbs_state,
    mode_decompose,
    mode_l1,
    time_translate,
)
from .thermo import (
    EnergyDistribution,
    LorenzCurve,
    beta_order,
    extremal_incoherent_qubit,
    guaranteed_lambda,
    guaranteed_sigma,
    guaranteed_transform,
    lorenz_curve,
    thermomajorizes,
    transition_bound,
)

__version__ = "0.1.0"
