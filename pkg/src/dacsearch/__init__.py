"""Greedy best-first search with per-heuristic open lists and dynamic
heuristic selection, plus a from-scratch Q-learning controller trainer,
adversarial task generators, and an evaluation harness."""

from .tasks import (
    ExplicitArc,
    ExplicitTask,
    InapplicableOperatorError,
    Operator,
    PlanValidationError,
    SasTask,
    TaskError,
    TaskFormatError,
    apply_operator,
    is_applicable,
    load_task,
    parse_task,
    partial_assignment,
    save_task,
    serialize_task,
    validate_plan,
)
from .heuristics import (
    AdditiveHeuristic,
    FFHeuristic,
    GoalCountHeuristic,
    Heuristic,
    MaxHeuristic,
    PerfectHeuristic,
    TabularHeuristic,
    make_portfolio,
    resolve_heuristic,
)
from .features import compute_features, feature_diff, num_features, step_reward
from .policies import (
    AlternationPolicy,
    ArgminMuPolicy,
    ControlPolicy,
    QNetworkPolicy,
    RandomPolicy,
    ScriptedPolicy,
    SinglePolicy,
    lift_policy,
    parse_policy_spec,
)
from .search import (
    BUDGET_EXCEEDED,
    EXHAUSTED,
    PLAN_FOUND,
    Budget,
    GbfsRun,
    SearchResult,
    run_gbfs,
)
from .generators import (
    ArtificialInstance,
    TransportInstance,
    gen_artificial,
    gen_pi_n,
    gen_pi_prime_n,
    gen_transport,
    swap_heuristic_tables,
)
from .nn import AdamOptimizer, Mlp
from .training import (
    ReplayBuffer,
    TrainConfig,
    TrainResult,
    Transition,
    double_dqn_target,
    epsilon_at,
    evaluate_policy,
    load_policy,
    save_policy,
    train,
)
from .metrics import (
    best_as,
    coverage,
    guidance_score,
    quality_score,
    speed_score,
    switch_frequency,
    usage_quarters,
)
from .experiment import ExperimentConfig, RunRecord, build_report, run_experiment
from .bridge import RemotePolicy, connect_controller, serve_controller, serve_search

__version__ = "0.1.0"
