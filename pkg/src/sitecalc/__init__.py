"""Grothendieck topologies on finite posets, with their localic and
sheaf-theoretic presentations, verified by exhaustive computation."""

from .catalog import ALIASES, CATALOG_NAMES, catalog, catalog_poset
from .errors import (
    AxiomViolation,
    BasePointError,
    CycleError,
    DuplicateElementError,
    FrameTooLargeError,
    FunctorialityError,
    InvalidInnerTopologyError,
    NotACongruenceError,
    NotAFrameMorphismError,
    NotANucleusError,
    NotASublocaleError,
    NotDenseError,
    NotDownwardsDirectedError,
    NotMatchingError,
    NotOrderIsomorphismError,
    NotOrderMorphismError,
    NotSurjectiveError,
    ParseError,
    PosetMismatchError,
    SiteCalcError,
    TooLargeError,
    TooLargeForBruteForceError,
)
from .localic import (
    Congruence,
    Nucleus,
    Sublocale,
    SubsetForms,
    congruence_from_nucleus,
    congruence_from_topology,
    congruence_is_complete,
    double_negation_nucleus,
    extract_subset,
    homomorphism_factorization,
    mx_frame_isomorphism,
    nucleus_from_congruence,
    nucleus_from_sublocale,
    nucleus_from_topology,
    nucleus_is_complete,
    quotient_frame,
    sublocale_from_nucleus,
    sublocale_from_topology,
    subset_forms,
    topology_from_congruence,
    topology_from_nucleus,
    topology_from_sublocale,
    verify_commuting_diagram,
)
from .poset import (
    DownSetFrame,
    FinitePoset,
    FrameMap,
    OrderMorphism,
    all_order_isomorphisms,
    all_order_morphisms,
    dm_closure,
    dm_completion,
    double_negation,
    enumerate_downsets,
    export_dot,
    frame_morphism_violation,
    heyting_implication,
    negation,
    parse_poset,
    restriction_frame_map,
    sieves_on,
    subset_of_labels,
    upper_adjoint,
)
from .sheaves import (
    ComparisonReport,
    ExtendedPresheaf,
    KxEquivalenceReport,
    MatchingFamily,
    NaturalTransformation,
    Presheaf,
    adjoin_zero,
    amalgamations,
    choose_base_point,
    comparison_check,
    enumerate_presheaves,
    extend_presheaf,
    is_sheaf,
    kx_sheaf_equivalence_check,
    matching_families,
    natural_iso_exists,
    restrict_presheaf,
    validate_presheaf,
    yoneda_presheaf,
)
from .sites import (
    CanonicalSubsetReport,
    GrothTopology,
    Sieve,
    SiteMorphismReport,
    adjoint_transfer_consistent,
    atomic_topology,
    canonical_constructors,
    canonical_subset_report,
    dense_topology,
    derived_topology,
    discrete_topology,
    enumerate_all_topologies,
    extend_topology,
    generating_subset,
    has_clp,
    indiscrete_topology,
    is_complete,
    is_site_isomorphism,
    is_subcanonical,
    join,
    lx_topology,
    lxy_topology,
    meet,
    preserves_covers,
    representable_is_sheaf,
    restrict_topology,
    site_morphism_report,
    subcanonicity_report,
    subset_subcanonicity_witnesses,
    subset_topology,
    topology_leq,
    validate_topology,
)

__version__ = "0.1.0"
