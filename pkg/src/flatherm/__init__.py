"""Riemannian and Hermitian invariants of metric Lie algebras."""

from .algebra import (
    AlmostComplexStructure,
    LieAlgebra,
    MetricTensor,
    Subspace,
    center,
    derived_algebra,
    integrability_defect,
    integrability_tensor,
    is_two_step_solvable,
    is_unimodular,
    jacobi_defect,
)
from .errors import (
    DegenerateSplitting,
    DependentFrame,
    ExactnessError,
    FlathermError,
    InputError,
    NotAComplexStructure,
    NotFlat,
    NotTwoStepSolvable,
    OddDimension,
    SpecInvalid,
)
from .frames import ComplexFrame, bianchi_defect, complexify, frame_from_vectors, structure_equation_defect
from .gensearch import (
    FlatSpec,
    KahlerFlatSpec,
    SearchConfig,
    SearchReport,
    build_flat,
    build_kaehler_flat,
    random_compatible_J,
    search_integrable,
)
from .hermitian import (
    AdmissibleFrame,
    ChernTorsion,
    HermitianDecomposition,
    ProofReport,
    admissible_frame,
    chern_connection_oracle,
    chern_torsion,
    decompose,
    kaehler_defect,
    lemma2_defect,
    proof_suite,
)
from .riemannian import (
    FlatStructure,
    flatness_defect,
    levi_civita,
    milnor_decompose,
    milnor_verify,
    riemann_curvature,
)
from .scalars import ExactComplex

__version__ = "0.1.0"
