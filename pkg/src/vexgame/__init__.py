"""Path functionals and Sceptic trading strategies for continuous price paths."""

from vexgame.paths import (
    GridCrossingSequence,
    SampledPath,
    evaluate,
    generate_brownian,
    generate_deterministic,
    generate_fbm,
    grid_crossings,
    hitting_time,
    normalize,
    restrict,
)
from vexgame.analysis import (
    BruneauReport,
    VariationReport,
    bruneau_bound_check,
    bruneau_constant,
    count_upcrossings,
    grid_upcrossing_sum,
    var_p,
    var_p_bruteforce,
    var_p_prefix,
    vex_estimate,
)
from vexgame.gametheory import (
    CapitalTrajectory,
    CertificateRefused,
    CertificateReport,
    ElementaryStrategy,
    PositiveCapitalEnsemble,
    doob_strategy,
    doob_until_floor,
    event_E_pA,
    event_E_pCA,
    nc,
    run_elementary,
    strategy_A,
    strategy_B,
    superhedge_certificate,
    verify_cumulative_identity,
)

__version__ = "0.1.0"
