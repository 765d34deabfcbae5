"""Bell functionals for n-bit parity-oblivious random access codes.

The package builds the anti-commuting measurement sets for both parties,
evaluates the associated Bell functional on noisy two-qubit-per-site states
before and after local diagonal filtering, and locates the noise thresholds
where nonlocality and preparation contextuality appear.
"""

from .analysis import (
    CriticalResult,
    RegionGrid,
    critical_q_at_xi,
    critical_q_unfiltered,
    export_figure,
    export_grid,
    min_critical_q,
    quantum_minus_pnc,
    scan_region,
    vanishing_filter_limit,
)
from .bell import (
    BellReport,
    bell_value_brute,
    bell_value_closed,
    brute_force_value,
    build_report,
    classify,
    local_bound,
    optimal_value,
    pnc_bound,
    success_probability,
    unfiltered_value,
)
from .matkernel import SpectralReport, hermitian_eigenvalues, randomized_positivity_probe
from .observables import (
    AliceSet,
    ObservableSet,
    alice_observables,
    bob_observables,
    check_anticommuting,
    check_parity_oblivious,
    enumerate_inputs,
)
from .states import (
    FilteredState,
    FilterPair,
    NoisyState,
    apply_filters,
    filtered_norm,
    filtered_state_closed_form,
    is_superunit,
    make_filters,
    max_entangled,
    mixed_state,
)

__version__ = "0.1.0"

__all__ = [
    "AliceSet",
    "BellReport",
    "CriticalResult",
    "FilterPair",
    "FilteredState",
    "NoisyState",
    "ObservableSet",
    "RegionGrid",
    "SpectralReport",
    "alice_observables",
    "apply_filters",
    "bell_value_brute",
    "bell_value_closed",
    "bob_observables",
    "brute_force_value",
    "build_report",
    "check_anticommuting",
    "check_parity_oblivious",
    "classify",
    "critical_q_at_xi",
    "critical_q_unfiltered",
    "enumerate_inputs",
    "export_figure",
    "export_grid",
    "filtered_norm",
    "filtered_state_closed_form",
    "hermitian_eigenvalues",
    "is_superunit",
    "local_bound",
    "make_filters",
    "max_entangled",
    "min_critical_q",
    "mixed_state",
    "optimal_value",
    "pnc_bound",
    "quantum_minus_pnc",
    "randomized_positivity_probe",
    "scan_region",
    "success_probability",
    "unfiltered_value",
    "vanishing_filter_limit",
    "__version__",
]
