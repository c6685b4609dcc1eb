"""Exact arithmetic for affine reflection systems and the classification of
their maximal closed subroot systems."""

from .errors import ResourceBoundError, ValidationError
from .lattice import (
    CosetSet,
    LatticeSubgroup,
    cs_canonicalize,
    cs_equal,
    cs_intersect,
    cs_subset,
    cs_sum,
    enumerate_prime_maximal_subgroups,
    hermite_normal_form,
)
from .roots import (
    RootSystem,
    RootSystemType,
    all_maximal_closed,
    borel_de_siebenthal,
    build_root_system,
    classify_subset,
    closed_closure,
    gamma_pairs,
    highest_root_marks,
    m_constant,
    reflect,
)
from .systems import (
    AffineReflectionSystem,
    ExtensionDatum,
    build_system,
    custom_system,
    finite_system,
    saito_system,
    toroidal_system,
    twisted_affine_system,
    validate_extension_datum,
)
from .subroot import (
    CellQuotient,
    SubrootDescriptor,
    common_period,
    enumerate_maximal_periodic,
    full_descriptor,
    gradient_class,
    is_closed_subroot,
    is_maximal_periodic,
    p_function,
    periodic_closure,
)
from .classify import (
    ClassificationReport,
    ClassifyRequest,
    classify_all,
    classify_bc,
    classify_full_gradient,
    classify_proper_closed,
    classify_semi_closed,
)
from .toroidal import (
    TripleDescriptor,
    enumerate_triples,
    psi_to_triple,
    saito_families,
    triple_to_psi,
)

__version__ = "0.1.0"
