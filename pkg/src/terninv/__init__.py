"""Rational orthogonal invariants of even-degree ternary forms.

Exact construction of signed-permutation-equivariant harmonic bases,
evaluation of a minimal generating set of rational invariants, orthogonal
equivalence testing, rewriting of arbitrary invariants in the generators,
and reconstruction of a form from prescribed invariant values.
"""

from .forms import (
    Matrix3,
    TernaryForm,
    act,
    add,
    apolar,
    evaluate,
    form_from_json,
    form_q,
    form_to_json,
    laplacian,
    load_form,
    monomial,
    multiply,
    save_form,
    scale,
    signed_permutation,
    signed_permutation_group,
    sub,
    zero_form,
)
from .harmonic import (
    EquivariantSignature,
    EquivariantSpanningSet,
    HarmonicComponents,
    NotInSliceError,
    SliceBasis,
    SliceCoordinates,
    cyclic_images,
    even_generator,
    harmonic_decompose,
    linear_combination,
    odd_generator,
    reassemble,
    rep_multiplicities,
    rep_multiplicities_closed_form,
    signed_binomial,
    slice_basis,
    slice_coordinates,
    spanning_set,
)
from .invariants import (
    InvariantVector,
    NoUnambiguousReconstruction,
    QuadraticInvariants,
    QuarticAuxInvariants,
    RepeatedLambdaError,
    Verdict,
    equivalent,
    equivariant_matrices,
    evaluate_invariants,
    invariant_count,
    invariants_from_json,
    invariants_to_json,
    quad_invariants,
    quartic_aux_invariants,
    reconstruct,
    slice_invariants,
)
from .rewrite import (
    NotInvariantError,
    RationalExpr,
    parse_expression,
    quartic_aux_rewrite,
    rewrite_invariant,
    verify_rewrite,
)
from .slicing import (
    DegenerateForm,
    EigenDecomposition,
    SymmetricMatrix3,
    eigendecompose,
    quadratic_matrix,
    rotate_to_slice,
)

__version__ = "0.1.0"
