"""bellswap: exact simulator and analytic model for a hybrid CV-DV
entanglement swapping protocol with squeezed optical modes."""

__version__ = "0.1.0"

from .analytic import (  # noqa: F401
    AnalyticPrediction,
    NoSolutionError,
    max_success_prob,
    min_sc,
    min_squeezing_db,
    predict,
    prob_bounds,
    prob_extra_pair,
    prob_nb_pairs,
    saturation_threshold_db,
    success_prob,
)
from .experiments import (  # noqa: F401
    SweepRow,
    SweepSpec,
    brute_force_success_prob,
    emit,
    fig2_curve,
    monte_carlo_point,
    sweep,
)
from .modes import (  # noqa: F401
    PdDecomposition,
    SqueezedMode,
    db_from_sigma,
    decompose_pd,
    sample_pd,
    sample_xd,
    sigma_from_db,
)
from .protocol import (  # noqa: F401
    ClassicalMessage,
    DegenerateOutcomeError,
    ProtocolConfig,
    TrialResult,
    run_trial,
)
from .register import (  # noqa: F401
    JointState,
    MeasurementOutcome,
    RegisterSpec,
    Side,
    bell_state,
    delta,
    fidelity_to_bell,
    measure_qubits,
    qft_apply,
    xbar,
)
