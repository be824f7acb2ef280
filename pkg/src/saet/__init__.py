"""Exact-arithmetic toolkit for piecewise-linear semialgebraic sets.

Marked simplicial complexes with rational coordinates; local-closedness
strata and the obstruction set of defective boundary germs; certified
tubular neighborhoods and the carving deformation that makes any marked
set appropriately embedded; weak continuous extension of piecewise
linear-fractional functions; evaluation homomorphisms along path germs.
"""

from .carve import (
    CarvedSet,
    DeformCoeffs,
    DeformationMap,
    appropriate_embed,
    carve_base_vertices,
    carve_level,
    deformation_coeffs,
    probe_germ,
    push_point,
)
from .complexes import (
    Complex,
    PLSet,
    Simplex,
    barycentric_subdivide,
    build_complex,
    closure,
    eta,
    germ_connected,
    is_appropriately_embedded,
    lc_part,
    local_dim,
    rho,
)
from .extend import (
    ExtensionReport,
    LimitResult,
    PLFFunction,
    RatioForm,
    dim2_extension,
    face_limit,
    graph_closure_oracle,
    weak_extension,
)
from .germs import (
    ConeSet,
    GermValue,
    PathGerm,
    adjacency_test,
    cone_restriction,
    core,
    depth,
    distinct_homs_witness,
    eval_hom,
    evaluate,
    hom_via_cone,
    is_in_extension,
)
from .intervals import Interval, IntervalPoint, sqrt_enclosure
from .metric import (
    FaceFunctionals,
    Hyperplane,
    certificate_for,
    certify_epsilon,
    face_functionals,
    incenter,
    separating_hyperplane,
)
from .rationals import AffineForm, rat, rat_str
from .tubes import (
    INSIDE_OPEN,
    ON_BOUNDARY,
    OUTSIDE,
    CrossSection,
    HatSimplex,
    Tube,
    VertexBall,
    carved_difference_eta,
    cross_section,
    hat_lift_membership,
    hat_simplex,
    slice_containment_check,
    tube_membership,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
