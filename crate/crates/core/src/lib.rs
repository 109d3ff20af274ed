//! Approximate maximin-share allocation of indivisible chores via
//! Heterogeneous First Fit Decreasing, together with the FFD/MultiFit
//! scheduling routines it reduces to and executable verifiers for the
//! First-Fit-Valid machinery behind its analysis.

pub mod bundle;
pub mod corpus;
pub mod error;
pub mod ffd;
pub mod fptas;
pub mod hffd;
pub mod instance;
pub mod io;
pub mod mms;
pub mod monotonicity;
pub mod reduction;
pub mod report;
pub mod threshold;

pub use bundle::{lex_cmp, Allocation, Bundle};
pub use error::{Error, Result};
pub use ffd::{benchmark_bundle, ffd, ffd_succeeds, multifit, MultifitResult};
pub use fptas::{
    allocate, alpha_ratio, binary_search_threshold, exact_small_n_epsilon, fptas_allocate, update_bound, FptasOutcome,
    FptasTrace,
};
pub use hffd::{ffv_lemma_checks, hffd, AssignmentRule, FfvTuple, MmsPrecondition};
pub use instance::{from_ido_allocation, to_ido, IdoInstance, Instance};
pub use mms::{feasible, mms, MmsCertificate};
pub use monotonicity::{
    benchmark_filter_check, check_monotone, check_weak_monotone, enumerate_ffv, fuzz_monotonicity, Counterexample, FuzzConfig,
    FuzzOutcome, Visit,
};
pub use reduction::{
    classify_chores, dominates, fit_in_space, is_redundant, reduce_excessive, reduction_check, suitable_reduced_cost,
    tidy_lemma_check, tidy_up, tidy_up_with_partition, ChoreClass, Reduction, TidyContext,
};
pub use report::{Failure, Report};
pub use threshold::Threshold;
