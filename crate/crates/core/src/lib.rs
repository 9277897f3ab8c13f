//! Model of two-photon quantum fingerprinting.
//!
//! Alice and Bob encode their inputs as phase patterns over time bins and send
//! one photon each to a referee, who overlaps the two on a balanced beam
//! splitter. Equal inputs give perfect Hong-Ou-Mandel suppression of
//! coincidences; different inputs let coincidences through. The crate covers
//! the code construction, the ideal and imperfect click statistics, the
//! minimum-error test on the coincidence count, its Chernoff exponent, the
//! information comparison against classical and coherent-state schemes, and a
//! seeded Monte Carlo simulator that cross-checks the closed forms.

// `!(x >= 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chernoff;
pub mod cli;
pub mod codes;
pub mod decision;
pub mod error;
pub mod imperfections;
pub mod information;
pub mod interference;
pub mod montecarlo;
pub mod special;

pub use chernoff::{
    asymptotic_error, chernoff_information, rescaled_chernoff_zeta, two_click_chernoff,
    ChernoffResult,
};
pub use codes::{
    binary_entropy, encode, extend_codeword, generate_random_linear_code, gv_rate,
    hamming_distance, map_coherent_to_twophoton_distance, map_twophoton_to_coherent_distance,
    modified_gv_rate, overhead_ratio, relative_distance, Codeword, DistanceProfile, LinearCode,
};
pub use decision::{
    binomial_log_pmf, decide, exact_error_probability, Decision, TestOutcome,
};
pub use error::{Error, Result};
pub use imperfections::{
    coincidence_fraction, effective_visibility, hypothesis_pair, two_click_probability,
    HypothesisPair, SourceParams,
};
pub use information::{
    classical_bound, coherent_information, crossover_length, operating_point,
    two_photon_information, Crossover, ErrorConvention, ProtocolOperatingPoint,
};
pub use interference::{
    coherent_click_probability, coincidence_probability, misid_probability_coherent,
    misid_probability_twophoton, single_source_pair_split, visibility, SplitDistribution,
    Visibility,
};
pub use montecarlo::{
    simulate_batch, simulate_protocol, simulate_run, Classification, EventTally, RunOutcome,
};
