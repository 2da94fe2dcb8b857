"""Coherence and predictability quantifiers for qudits, with randomised checks
of their trade-off and complementarity inequalities."""
from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import *  # noqa: F401,F403
from .gellmann import (
    GellMannBasis,
    GmComponents,
    bloch_from_populations,
    build_basis,
    decompose,
    populations_from_bloch,
    reconstruct,
)
from .linalg import EigenSystem, hermitian_eig, hs_inner, positivity_coefficient, spectral_apply, sqrtm_psd
from .measures import (
    MeasureValue,
    c_hs,
    c_l1,
    c_wy,
    linear_entropy,
    measure_values,
    p_hs_linear,
    p_hs_vn,
    p_l1,
    population_bound,
    von_neumann_entropy,
    wy_bounds,
)
from .states import (
    DensityMatrix,
    IncoherentState,
    basis_state,
    closest_incoherent,
    maximally_mixed,
    pure_state,
    random_state,
    random_states,
    validate,
    werner_ququart,
)
from .verify import (
    AxiomReport,
    TradeoffRecord,
    axiom_suite_predictability,
    axiom_suite_wave,
    campaign,
    evaluate,
    werner_sweep,
)

__version__ = "0.1.0"
