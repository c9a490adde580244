"""antiassoc: exact verification toolkit for the classification of complex
antiassociative algebras in dimension <= 5.

An antiassociative algebra satisfies (xy)z + x(yz) = 0; every product of
four elements vanishes.  The package re-verifies classification data for
these algebras: multiplication tables, second cohomology, central
extensions, orbit degenerations and orbit-closure dimensions.
"""

__version__ = "0.1.0"

from .scalars import (  # noqa: F401
    CYCLO,
    CYCLO_I,
    CYCLO_W,
    BigComplex,
    ComplexField,
    Cyclo12,
    DomainError,
    MultiPoly,
    PolyRing,
    QQ,
    RatFun,
    RatFunField,
    eval_expr,
    parse_expr,
    poly_equal,
    print_expr,
)
from .linalg import Matrix, Subspace, intersect, kernel, rref, solve  # noqa: F401
from .algebra import (  # noqa: F401
    AlgebraSC,
    Fingerprint,
    annihilator,
    basis_change,
    check_antiassociative,
    check_nilpotency4,
    derivations,
    fingerprint,
    make_algebra,
)
from .cohomology import (  # noqa: F401
    CohomologySpaces,
    ExtensionSpec,
    aut_action,
    central_extension,
    check_Ts,
    cocycle_annihilator,
    compute_B2,
    compute_H2,
    compute_Z2,
)
from .degeneration import (  # noqa: F401
    DegenConfig,
    DegenerationClaim,
    Verdict,
    check_degeneration,
    family_closure_dim,
    moved_constants,
    orbit_dim,
)
from .corpus import Corpus, CorpusError, load_corpus, validate_corpus  # noqa: F401
