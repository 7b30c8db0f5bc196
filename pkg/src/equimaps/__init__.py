"""Explicit bases of equivariant maps from homogeneous spaces into representations."""
from .algebra import (
    classify_commutant,
    cyclic_nilpotent_certificate,
    invariant_vector_fields,
    matrix_product,
    pointwise_structure_match,
    structure_constants,
)
from .exceptions import (
    ClosureError,
    DomainError,
    EquimapsError,
    NonSemisimpleError,
    NumericalError,
    ParityError,
    ProjectorError,
    SpecError,
)
from .invariants import algebra_fixed_space, full_fixed_space, haar_projector_rank
from .kernels import (
    RadialProfileSet,
    build_basis,
    check_equivariance,
    check_kernel_constraint,
    evaluate,
    hom_rep_with_det_twist,
    rd_kernel,
)
from .lie_core import LieGroupSpec, Representation
from .sections import catalog, get_space

__version__ = "0.1.0"
