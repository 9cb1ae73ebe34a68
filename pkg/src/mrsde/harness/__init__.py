"""Monte Carlo experiments tying the simulators to their asymptotic theory."""

from mrsde.harness.ldp import (
    Event,
    ExperimentPlan,
    LdpReport,
    LdpRow,
    ReferenceLabels,
    run_ldp_experiment,
    sup_deviation_bound,
)
from mrsde.harness.statistics import batch_means, loglog_slope
from mrsde.harness.studies import (
    ConvergenceRow,
    ConvergenceStudy,
    EpsLimitRow,
    EpsLimitStudy,
    is_closed_form,
    run_convergence_study,
    run_eps_limit_study,
)

__all__ = [
    "ConvergenceRow",
    "ConvergenceStudy",
    "EpsLimitRow",
    "EpsLimitStudy",
    "Event",
    "ExperimentPlan",
    "LdpReport",
    "LdpRow",
    "ReferenceLabels",
    "batch_means",
    "is_closed_form",
    "loglog_slope",
    "run_convergence_study",
    "run_eps_limit_study",
    "run_ldp_experiment",
    "sup_deviation_bound",
]
