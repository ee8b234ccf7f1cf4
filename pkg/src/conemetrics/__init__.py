"""Thompson and Hilbert metrics on convex cones.

Distances, distinguished geodesics, derivative-norm contraction bounds,
an order-preserving orthant embedding, and seeded verification campaigns,
served over HTTP with a thin command-line client.
"""

from .campaigns import (
    CAMPAIGN_KINDS,
    CampaignConfig,
    CampaignReport,
    TightnessReport,
    run_campaign,
    tightness_sweep,
)
from .cones import (
    Cone,
    ConePoint,
    LorentzCone,
    OracleCone,
    Orthant,
    SymPDCone,
    cone_from_dict,
    contains_interior,
    oracle_wrap,
    order_inf,
    order_sup,
    sample_interior,
    sym_to_vec,
    vec_to_sym,
)
from .contraction import (
    DerivativeTable,
    InequalityReport,
    ScalarFunctions,
    bound_hilbert,
    bound_thompson,
    check_busemann,
    check_contraction,
    check_semihyperbolic,
    contraction_bound,
    derivative_table,
    fd_derivative_table,
    hilbert_opnorm_analytic,
    hilbert_opnorm_bruteforce,
    hilbert_opnorm_numeric,
    hilbert_opnorm_pair,
    thompson_opnorm_analytic,
    thompson_opnorm_numeric,
    unit_geodesic_map,
)
from .embedding import (
    ConeEmbedding,
    EmbeddingReport,
    TransferReport,
    embed_points,
    geodesic_transfer_check,
    verify_embedding,
)
from .errors import (
    BoundarySearchError,
    ConeGeometryError,
    DifferentPartsError,
    DimensionMismatchError,
    NonSmoothPointError,
    NotInteriorError,
    SamplingBudgetError,
)
from .geodesics import (
    Geodesic,
    bicombing,
    make_geodesic,
    midpoint,
    sample_geodesic,
    spd_geodesic,
)
from .metrics import (
    Metric,
    PathSample,
    TangentVector,
    distance,
    finsler_hilbert_seminorm,
    finsler_norm,
    finsler_thompson_norm,
    hilbert_cross_ratio,
    hilbert_distance,
    path_length,
    thompson_distance,
)

__version__ = "0.1.0"
