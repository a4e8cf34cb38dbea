//! Minimal walks on ordinals, the trace colourings built from them, and
//! brute-force checkers for square-bracket partition properties of finite
//! colourings.

pub mod colouring;
pub mod csequence;
pub mod dfunction;
pub mod ordinal;
pub mod partition;
pub mod suites;
pub mod walks;

pub use colouring::{
    derive_colouring, evaluate, promote_colouring, ColourTable, ColouringError, ColouringSystem, DerivationTable,
    Generator, PairEvaluation, Promotion, Which,
};
pub use csequence::{CSequence, CanonicalLadder, CsError, FiniteSuccessor, Point, TableCSequence};
pub use dfunction::{
    claim_e4_sweep, d_by_enumeration, d_direct, d_index, valid_decomposition, DError, Decomposition, LabelledSeq,
    SweepConfig, SweepMode, SweepReport,
};
pub use ordinal::{Ordinal, OrdinalError, OrdinalKind};
pub use partition::{
    check_instance, check_pr_instance, check_qr_instance, normalize_theta, pairing_pr, search_counterexample,
    InstanceFile, PartitionError, PartitionParams, PrInstance, QrInstance, SearchBounds, SearchReport, Strategy, Theta,
    Variant, Verdict,
};
pub use walks::{walk, walk_labels, WalkError, WalkTrace};

/// Schema tag carried by every JSON file this crate reads or writes.
pub const SCHEMA: &str = "walkforge/1";

/// Name of the seeded random generator behind every randomized routine.
pub const GENERATOR: &str = "chacha8-rand_chacha-0.9";
