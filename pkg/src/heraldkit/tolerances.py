"""Numeric tolerances and fixed defaults, collected in one place.

Every hard-coded threshold used by the package lives here so that tests and
calling code can reference the same named constants instead of repeating
magic numbers.
"""

# Unit-norm agreement required after any operation documented as normalizing.
NORM_ATOL = 1e-12

# Hermiticity tolerance for density matrices.
HERMITICITY_ATOL = 1e-12

# Trace agreement for trace-preserving maps and normalized density matrices.
TRACE_ATOL = 1e-10

# Most negative eigenvalue tolerated in a physical density matrix.
EIGENVALUE_FLOOR = -1e-10

# Unitarity tolerance of the beam-splitter block matrices.
UNITARITY_ATOL = 1e-12

# Norm tolerance when validating caller-supplied states (looser than
# NORM_ATOL because callers may have accumulated rounding of their own).
INPUT_NORM_ATOL = 1e-8

# Number of top Fock levels inspected by the tail-mass diagnostic.
TAIL_WINDOW = 5

# Relative probability mass allowed in the tail window before a truncated
# computation is considered invalid.
TAIL_MASS_LIMIT = 1e-8

# Below this squeezing magnitude the Hermite-form expansions are singular
# and the coherent-state branch (or the numeric pipeline) must be used.
MIN_SQUEEZING = 1e-8

# Node-doubling agreement required from the window quadrature, and the node
# counts between which the doubling search runs.
QUADRATURE_STEP_ATOL = 1e-8
QUADRATURE_MIN_NODES = 64
QUADRATURE_MAX_NODES = 1024

# Default photon-number cutoff for final scoring and reporting.
DEFAULT_CUTOFF = 40

# Reduced cutoff used inside the genetic search loop.
SEARCH_CUTOFF = 30

# Default number of subranges for window-averaged misfit.
DEFAULT_SUBRANGES = 21
