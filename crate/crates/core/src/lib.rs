//! Economic model of a rational offline password cracker.
//!
//! The crate is organised around a few building blocks:
//!
//! - [`corpus`]: password frequency lists (`f_1 >= f_2 >= ...`), loading, summaries and subsampling.
//! - [`zipf_fit`]: CDF-Zipf (`lambda_t = y * t^r`) and PDF-Zipf (`f_i = C / i^s`) fits with
//!   R² and Kolmogorov–Smirnov distance.
//! - [`distributions`]: a uniform interface over empirical and Zipf password distributions.
//! - [`attacker`]: expected cost/revenue curves and the attacker's optimal stopping threshold.
//! - [`zipf_threshold`]: the `v/k` ratios above which a rational attacker cracks everything.
//! - [`bounds`]: distribution-free lower and upper bounds on the number of cracked accounts.
//! - [`cost`]: key-stretching cost models (iterated hashing and memory hard functions).
//! - [`dp_perturb`]: noisy perturbation of frequency lists and the fit-robustness study.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod attacker;
pub mod bounds;
pub mod corpus;
pub mod cost;
pub mod distributions;
pub mod dp_perturb;
mod error;
pub mod numeric;
pub mod search;
pub mod zipf_fit;
pub mod zipf_threshold;

pub use attacker::{AttackMode, AttackOutcome, AttackerParams};
pub use corpus::{CorpusFormat, EmpiricalCdf, FrequencyCorpus};
pub use distributions::{DistSpec, PasswordDistribution};
pub use error::{Error, Result};

/// Deterministic RNG used for every seeded operation in the crate.
pub type SeededRng = rand_chacha::ChaCha12Rng;

pub(crate) fn seeded_rng(seed: u64) -> SeededRng {
    use rand::SeedableRng;
    SeededRng::seed_from_u64(seed)
}
