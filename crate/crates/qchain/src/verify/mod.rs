//! Deterministic verification of divergence chain rules and randomized
//! campaign machinery.

mod campaign;
mod checks;
mod explore;
mod result;

pub use campaign::{
    fmt_g12, run_campaign, CampaignConfig, CampaignReport, CheckName, CheckSummary, MapFamily,
    CLASSICAL_REDUCTION_TOL, DPI_TOL, MATSUMOTO_GAP_TOL, MATSUMOTO_RESIDUAL_TOL, ORDERING_TOL,
    PINCHING_INEQ_TOL, REGULARIZED_SEQ_TOL, SPOT_CHANNEL_TOL, SPOT_TOL,
};
pub use checks::{
    check_geometric_chain, check_meta_chain, check_pinching_bound, check_preprocessing_chain,
    check_regularized_chain, check_sandwiched_chain, check_unital_entropy, MetaChainOutcome,
    CHAIN_TOL, PINCH_BOUND_TOL,
};
pub use explore::{explore_preprocessing_regularization, ExploreReport};
pub use result::{ext_add, ext_slack, CheckResult};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("order {order} outside the asserted range {range} for {check}")]
    OrderOutOfRange {
        check: String,
        order: String,
        range: String,
    },

    #[error("reference map is not unital")]
    NonUnitalCandidate,

    #[error("invalid campaign configuration: {0}")]
    BadConfig(String),

    #[error(transparent)]
    Quantum(#[from] crate::quantum::QuantumError),

    #[error(transparent)]
    Divergence(#[from] crate::divergence::DivergenceError),

    #[error(transparent)]
    ReverseTest(#[from] crate::reverse_test::ReverseTestError),

    #[error(transparent)]
    ChannelDiv(#[from] crate::channel_div::ChannelDivError),

    #[error(transparent)]
    Num(#[from] crate::numkernel::NumError),
}
