"""Circle-equivariant spectral and gerbe-curvature check toolkit.

Modules
-------
spectral   twisted circle Dirac spectra, spectral cuts, flow counting
detline    determinant lines over spectral bands and the cocycle check
fock       truncated fermionic Fock space, currents, Bogoliubov transport
liealg     su(n) bases, weight multiplicities, exact Dynkin indices
grids      periodic grid forms, stencil derivatives, exterior derivative
caloron    sampled connections over S1 x T^d and curvature identities
presets    named analytic connection families and gauge loops
moduli     surface-group representations and the curvature pairing
cli        scenario runner with JSON reports (`gerbetool` entry point)
"""

from .version import __version__
from .errors import (
    ArgumentError,
    CapabilityError,
    CompositionError,
    ConfigError,
    ConsistencyError,
    CoverViolationError,
    DimensionError,
    GerbeToolError,
    PrecisionError,
    RangeError,
    ResolutionError,
    ResourceError,
    ValidationError,
)
from .spectral import (
    EigenMode,
    Holonomy,
    SpectralCut,
    Spectrum,
    band,
    dirac_spectrum,
    holonomy_phases,
    in_cover,
    rational,
    spectral_flow,
)
from .detline import (
    CechTriple,
    DetLine,
    compose,
    delta_triviality,
    det_line,
    hodge_dual_iso,
    permutation_sign,
)
from .fock import (
    FockState,
    FockVector,
    FockWindow,
    ModeOperator,
    SparseOperator,
    apply_mode,
    bogoliubov_vacuum,
    commutator_check,
    cut_shift_check,
    elementary_action,
    enumerate_states,
    mode_operator_matrix,
    normal_ordered_pair,
    projective_equality_check,
    psi,
    psibar,
    safe_states,
    sigma,
    vacuum,
)
from .liealg import (
    LieAlgebraSpec,
    Representation,
    dynkin_index,
    inner,
    su_algebra,
    su_basis,
    weight_multiplicities,
    weyl_dimension,
)
from .grids import GridForm, central_diff4, spectral_theta_derivative
from .caloron import (
    AnalyticConnection,
    CurvatureSamples,
    GaugeLoop,
    LatticeConnection,
    LoopHiggsPair,
    b_field,
    curvature,
    from_caloron,
    higgs_gauge_law_check,
    index_curvature,
    ms_identity_check,
    pontryagin_density,
    rho_scaling_check,
    sample_connection,
    to_caloron,
)
from .presets import (
    connection_preset,
    connection_preset_names,
    constant_gauge,
    winding_gauge,
)
from .moduli import (
    LoopWord,
    ModuliFamily,
    SurfaceGroupRep,
    conjugate,
    holonomy,
    holonomy_path,
    irreducibility_check,
    pontryagin_pairing,
    random_special_unitary,
    relation_check,
    standard_genus2_su2,
)

__all__ = [name for name in dir() if not name.startswith("_")]
