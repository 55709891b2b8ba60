//! Evaluation harnesses: retrieval-rescue runs with bootstrap statistics,
//! link-prediction ablation over onset-binned relations, trajectory
//! clustering, and evidence-age analysis.

mod cluster;
mod decay;
mod rag;
mod stats;
mod transe;

pub use cluster::{cluster_trajectories, trajectory_features, ClusterReport, TrajectoryFeatures};
pub use decay::{evidence_age_stats, EvidenceAgeStats};
pub use rag::{
    build_context, rescue_rate, run_condition, Condition, ConditionResult, ConditionRow,
    ContextResult, MockRagProvider, RagSources, RescueReport,
};
pub use stats::{
    bootstrap_ci, mcnemar_exact, mcnemar_from_discordants, paired_t, two_sided_t_pvalue,
};
pub use transe::{
    ablation_run, augment_temporal, evaluate_ranking, train_transe, AblationReport, BinMode,
    ConditionSummary, EvalMode, GraphTriple, RankingMetrics, TransEModel, TransEParams,
};
