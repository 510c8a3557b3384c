"""Python bindings for the aoilab sub-metaverse simulator."""

from ._aoilab import (  # noqa: F401
    Action,
    CompletionRecord,
    ConfigError,
    EpisodeFinished,
    ExperimentConfig,
    Observation,
    PolicyNet,
    PPOConfig,
    RewardParams,
    SimConfig,
    SplitResult,
    StepOutcome,
    SubMetaverseEnv,
    TrainingDiverged,
    compute_gae,
    compute_reward,
    data_rate,
    default_grid,
    evaluate_policy,
    grid_search,
    load_config,
    pareto_frontier,
    path_loss_db,
    reward_for,
    train_policy,
)

__all__ = [name for name in dir() if not name.startswith("_")]
