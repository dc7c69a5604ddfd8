"""Exact invariants of metric groups: Gauss sums, spin state spaces,
surgery invariants, abelian spin Chern-Simons classification and torus
mapping class group representations."""

from .scalars import (
    Cyclotomic,
    OrderOverflowError,
    QmodZ,
    root_of_unity,
    sqrt_nat,
    to_complex,
)
from .groups import (
    EnumerationCapError,
    FiniteAbelianGroup,
    GroupElement,
    GroupHom,
    NotWellDefinedError,
    QuadraticForm,
    QuotientPresentation,
    automorphisms,
    gauss_sum,
    isomorphisms,
    qclass_equivalent,
    quotient,
    subgroup_elements,
    subquotient,
)
from .spin import (
    PointedSpinModular,
    SimpleObject,
    SpinModularSummary,
    SurfaceSpinStructure,
    arf,
    grading_degree,
    ising_summary,
    kirby_color,
    pointed_summary,
    spin_state_dims,
    three_torus_closed_form,
)
from .surgery import (
    CharacteristicSublink,
    Inertia,
    LinkingMatrix,
    characteristic_sublinks,
    colored_link_eval,
    framing_parities,
    graded_link_eval,
    inertia,
    oriented_manifold_invariant,
    refinement_check,
    spin_manifold_invariant,
    spin_surgery_invariant,
)
from .classify import (
    AscsTriple,
    LatticeData,
    ascs_from_lattice,
    classify_pointed,
    kernel_automorphism,
    psm_from_even_sublattice,
    triples_equivalent,
    two_to_one_check,
)
from .mcg import (
    SectorMap,
    SpinTorusBasis,
    intertwiner_check,
    oriented_restriction_check,
    spin_s,
    spin_t,
    torus_basis,
    wavefunction_matrices,
)

__version__ = "0.1.0"
