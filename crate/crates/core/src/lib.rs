//! Shortest straight-line programs over `+`, `-`, `*` starting from 1.
//!
//! The crate enumerates range-isomorphism classes of normalized programs
//! level by level ([`enumerate`]), extends them toward specific targets
//! with branch-and-bound depth-first search ([`search`]), and persists
//! frontiers and results ([`store`]). All arithmetic is generic over
//! [`SlpInt`]; the aliases below name the concrete widths used in practice.

pub mod enumerate;
pub mod eval;
pub mod numtheory;
pub mod program;
pub mod scalar;
pub mod search;
pub mod store;

pub use bnum::types::{U256, U512};
pub use num_bigint::BigUint;

pub use enumerate::{
    build_frontiers, expand, initial_interval, reached_set, run_levels, DedupMode, EnumerateError, Frontier, LevelOptions, LevelRun,
    LevelStats,
};
pub use eval::{
    canonical_key, computes_target, digest_sorted, evaluate, hits_target, is_normalized, CanonicalKey, Digest,
    EvalError, Evaluation, TargetMode,
};
pub use program::{Op, Program, ProgramError, Step};
pub use scalar::{ScalarWidth, SlpInt};
pub use search::{
    batch_targets, dfs_extend, heuristic_extend, prune_value_bound, search_target, SearchError, SearchOptions,
    SearchOutcome, TargetKind, TargetSpec,
};
pub use store::{RunDir, StoreError};

/// Evaluation in machine words; enough for programs of up to 6 steps.
pub type SmallEvaluation = Evaluation<u64>;
/// Evaluation in 128-bit words; enough for programs of up to 7 steps.
pub type Evaluation128 = Evaluation<u128>;
/// Evaluation in 256-bit words; enough for programs of up to 8 steps.
pub type Evaluation256 = Evaluation<U256>;
/// Evaluation in 512-bit words; enough for programs of up to 9 steps.
pub type Evaluation512 = Evaluation<U512>;
/// Evaluation in arbitrary precision.
pub type BigEvaluation = Evaluation<BigUint>;
