"""Workbench for Whitehead's algorithm on free groups and its generic-case behavior."""

from .words import (
    Alphabet,
    CyclicWord,
    canonical_rotation,
    conjugacy_class,
    cyclic_reduce,
    format_word,
    free_reduce,
    invert_word,
    occurrences_cyclic,
    occurrences_symmetrized,
    parse_word,
)
from .moves import MoveSet, WhiteheadMove, get_move_set, invert
from .algorithm import (
    CapExceeded,
    LevelComponent,
    MinimizeResult,
    Witness,
    equivalent,
    level_component,
    minimize,
    speedup_minimize,
    stabilizer_generators,
)
from .minimality import (
    DistortionEstimate,
    MinimizingSet,
    MleParams,
    MlewFailure,
    detect_mlew,
    estimate_distortion,
    is_strictly_minimal,
    orbit_ball,
    verify_minimizing_set,
)
from .fsmc import (
    Fsmc,
    NotIrreducible,
    StationaryData,
    build_iterated,
    is_irreducible,
    is_tight,
    mu0_k,
    sample,
    stationary,
)
from .graphs import (
    ClosingSystem,
    DegenerateClass,
    MarkedGraph,
    NoClosingPath,
    breve_closing,
    build_closing_system,
    fan_of_lollipops,
    hat_closing,
    path_to_class,
    rose,
    theta_chart,
    validate_gamma_based,
)
from .samplers import (
    Preset,
    make_preset,
    make_sampler,
    sampler_biased_letters,
    sampler_fsmc_directed,
    sampler_group_walk,
    sampler_uniform_cyclic,
    sampler_uniform_nb,
)
from .currents import (
    FillingCertificate,
    GraphChart,
    Inconclusive,
    RoseChart,
    WeightTable,
    certify_filling,
    characteristic_current,
    counting_current,
    default_probes,
    length_norm,
    projective_distance,
    uniform_current,
)

__version__ = "0.1.0"
