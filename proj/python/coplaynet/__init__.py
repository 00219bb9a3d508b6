"""Co-play performance networks: skill rating, network construction and
link-weight prediction for teammate recommendation."""

from ._core import (
    AggregateRow,
    DataError,
    DecayConfig,
    Edge,
    EvalReport,
    HistoryEntry,
    MatchRecord,
    Matrix,
    MetricCell,
    NetworkKind,
    Nonlinearity,
    NumericError,
    Outcome,
    PerformanceNetwork,
    PlantedNetwork,
    PlayerHistory,
    PlayerSlot,
    Predictor,
    Rating,
    RatingConfig,
    RatingTimeline,
    Reject,
    SynthLog,
    Team,
    TeamPolicy,
    TimelinePoint,
    aggregate_network,
    ae_train,
    avg_rec_at_k,
    baseline_average,
    build_histories,
    decile_timeline_report,
    filter_experienced_players,
    filter_valid_matches,
    generate_match_log,
    generate_planted_network,
    gf_train,
    initial_rating,
    kendall_tau_global,
    kendall_tau_per_player,
    largest_connected_component,
    long_term_weight,
    mane,
    mse,
    parse_match_log,
    rate_dataset,
    run_benchmark,
    sample_subnetwork,
    short_term_weight,
    split_edges,
    threshold_edges,
    update_two_team,
)

__all__ = [
    "AggregateRow",
    "DataError",
    "DecayConfig",
    "Edge",
    "EvalReport",
    "HistoryEntry",
    "MatchRecord",
    "Matrix",
    "MetricCell",
    "NetworkKind",
    "Nonlinearity",
    "NumericError",
    "Outcome",
    "PerformanceNetwork",
    "PlantedNetwork",
    "PlayerHistory",
    "PlayerSlot",
    "Predictor",
    "Rating",
    "RatingConfig",
    "RatingTimeline",
    "Reject",
    "SynthLog",
    "Team",
    "TeamPolicy",
    "TimelinePoint",
    "aggregate_network",
    "ae_train",
    "avg_rec_at_k",
    "baseline_average",
    "build_histories",
    "decile_timeline_report",
    "filter_experienced_players",
    "filter_valid_matches",
    "generate_match_log",
    "generate_planted_network",
    "gf_train",
    "initial_rating",
    "kendall_tau_global",
    "kendall_tau_per_player",
    "largest_connected_component",
    "long_term_weight",
    "mane",
    "mse",
    "parse_match_log",
    "rate_dataset",
    "run_benchmark",
    "sample_subnetwork",
    "short_term_weight",
    "split_edges",
    "threshold_edges",
    "update_two_team",
]

__version__ = "0.1.0"
