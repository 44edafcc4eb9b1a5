"""A finite-model workbench for measurings between algebras of polynomial
endofunctors on finite sets: fixed points, coalgebra-indexed partial
homomorphisms, their representing objects, and brute-force verification of
the structural theorems at desk scale."""

from .core import (
    Carrier,
    Label,
    Map,
    SizeGuardError,
    Tag,
    carrier,
    classify_map,
    enumerate_functions,
    label_text,
    mk_coproduct,
    mk_hom,
    mk_product,
    parse_label,
    set_default_guard,
)
from .functor import (
    PolyFunctor,
    PositionMonoid,
    apply_to_map,
    apply_to_set,
    automaton_functor,
    bintree_functor,
    bounded_tree_functor,
    compose_functors,
    const_monoid_functor,
    eta,
    identity_functor,
    list_functor,
    maybe_functor,
    monoid_from_op,
    nabla,
    nabla_tilde,
    trivial_monoid,
    unit_functor,
    validate_functor,
    z_mod,
)
from .fixpoints import (
    Algebra,
    Coalgebra,
    INF,
    LazyAlgebra,
    adamek,
    algebra,
    bisim_partition,
    cata,
    coalgebra,
    initial_lazy,
    is_preinitial,
    is_subterminal,
    lambek_check,
    list_alg,
    list_coalg,
    maybe_index,
    nat_automaton,
    nat_lazy,
    node,
    quotient_algebra,
    reachable_set,
    std_alg,
    std_coalg,
    subcoalgebras,
    tree_alg,
    tree_coalg,
    unfold,
    var,
)
from .measuring import (
    Measuring,
    compose_measurings,
    enumerate_measurings,
    forced_measuring,
    identity_measuring,
    is_measuring,
    measuring_from_fn,
    measuring_set,
    tensor_coalgebras,
    unit_coalgebra,
)
from .mixed import mixed_setup, enumerate_mixed_measurings, mixed_measuring_check
from .universal import (
    SubterminalDescriptor,
    c_initial_check,
    c_initial_via_dual,
    convolution_algebra,
    dual_coalgebra,
    dual_pairing_check,
    maybe_subterminal_family,
    measuring_tensor,
    terminal_c_initial_search,
    tensor_universal_map,
    tower,
    truncation_family,
    universal_measuring,
    verify_universal,
)

__version__ = "0.1.0"
