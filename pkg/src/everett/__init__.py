"""Observer-inclusive measurement: branch weights, Born frequencies, cat observers."""

__version__ = "0.1.0"

from .asymptotics import (
    chebyshev_floor,
    lagrange_fractions,
    modal_class,
    residual_measure,
    typicality_measure,
)
from .branching import (
    Branch,
    BranchEnsemble,
    Coefficients,
    CountClass,
    class_count,
    class_measure,
    class_of,
    measure_step,
    run_sequence,
)
from .hilbert import (
    BasisLabel,
    LinearOperator,
    Space,
    StateVector,
    apply,
    inner,
    is_unitary,
    make_state,
    tensor,
)
from .measure import MeasureValue, coeff_measure, subset_measure, verify_additivity
