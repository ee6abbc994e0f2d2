"""Decision engine for possibilistic quantum logic over finite dimension.

The package decides sentences about subspaces of a finite-dimensional
complex inner-product space, runs possibilistic circuits, checks finite
structures for modelhood, and ships the closed-form constructions used
as independent oracles in the test suite.
"""

from .subspace import (
    DEFAULT_TOL,
    InternalInvariantError,
    Subspace,
    Tolerance,
    UnitaryOp,
    apply_unitary,
    bottom,
    compatible,
    eq,
    join,
    leq,
    meet,
    ortho,
    principal_angles,
    sasaki_and,
    sasaki_hook,
    span_of,
    subspace_to_json,
    top,
)
from .sampling import (
    random_ray,
    random_ray_within,
    random_subspace,
    random_subspace_within,
    random_unitary,
)
from .lang import (
    CircuitProblem,
    Diagnostic,
    FrontendError,
    LexError,
    ParseError,
    Problem,
    SemanticError,
    parse_circuit_file,
    parse_definitions,
    parse_formula,
    parse_problem,
    pretty_print,
    validate,
)
from .normalize import (
    NormalizationLimitError,
    combo_to_formula,
    combo_to_json,
    normalize,
)
from .decide import (
    Verdict,
    check_axiom_suite,
    cross_check_vd,
    decide_basic,
    evaluate,
    verdict_to_json,
)
from .circuit import (
    Circuit,
    build_circuit,
    check_axioms_from_rules,
    check_rule_suite,
    run_circuit,
    run_circuit_trace,
)
from .structures import (
    FiniteStructure,
    StructureValidationError,
    boolean_fragment,
    check_characterization,
    check_strong_morphism,
    check_structure_axioms,
    filter_of,
    image_structure,
    kappa_of,
    load_structure,
    mixed_fragment,
    parse_structure_json,
    saturate,
    structure_to_json,
)
from .oracles import (
    CompatibleInputError,
    OracleDomainError,
    ellipse_witness,
    f_chain,
    f_step,
    incompat_decompose,
    steps_to_one,
    two_ray_collapse,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_TOL",
    "InternalInvariantError",
    "Subspace",
    "Tolerance",
    "UnitaryOp",
    "apply_unitary",
    "bottom",
    "compatible",
    "eq",
    "join",
    "leq",
    "meet",
    "ortho",
    "principal_angles",
    "sasaki_and",
    "sasaki_hook",
    "span_of",
    "subspace_to_json",
    "top",
    "random_ray",
    "random_ray_within",
    "random_subspace",
    "random_subspace_within",
    "random_unitary",
    "CircuitProblem",
    "Diagnostic",
    "FrontendError",
    "LexError",
    "ParseError",
    "Problem",
    "SemanticError",
    "parse_circuit_file",
    "parse_definitions",
    "parse_formula",
    "parse_problem",
    "pretty_print",
    "validate",
    "NormalizationLimitError",
    "combo_to_formula",
    "combo_to_json",
    "normalize",
    "Verdict",
    "check_axiom_suite",
    "cross_check_vd",
    "decide_basic",
    "evaluate",
    "verdict_to_json",
    "Circuit",
    "build_circuit",
    "check_axioms_from_rules",
    "check_rule_suite",
    "run_circuit",
    "run_circuit_trace",
    "FiniteStructure",
    "StructureValidationError",
    "boolean_fragment",
    "check_characterization",
    "check_strong_morphism",
    "check_structure_axioms",
    "filter_of",
    "image_structure",
    "kappa_of",
    "load_structure",
    "mixed_fragment",
    "parse_structure_json",
    "saturate",
    "structure_to_json",
    "CompatibleInputError",
    "OracleDomainError",
    "ellipse_witness",
    "f_chain",
    "f_step",
    "incompat_decompose",
    "steps_to_one",
    "two_ray_collapse",
    "__version__",
]
