use thiserror::Error;

/// Errors raised by the fingerprinting model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A numeric argument lies outside the domain of the operation.
    #[error("{name} = {value} is outside its domain: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("incompatible codeword lengths: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("invalid bit string {0:?}: expected a non-empty string of '0'/'1'")]
    InvalidBits(String),

    #[error("generator matrix is rank deficient after {0} attempts")]
    RankDeficient(u32),

    #[error("invalid code dimensions n = {n}, m = {m}: {reason}")]
    CodeDimensions {
        n: usize,
        m: usize,
        reason: &'static str,
    },

    #[error("rate bound vanishes")]
    RateVanishes,

    #[error("no crossover found for n <= {0:e}")]
    NoCrossover(f64),

    #[error("invalid probability vector: {0}")]
    InvalidDistribution(String),

    #[error("invalid source parameters: {0}")]
    InvalidParams(String),

    #[error("count out of range: n_c = {n_c} exceeds n2 = {n2}")]
    CountOutOfRange { n_c: u64, n2: u64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(name: &'static str, value: f64, reason: &'static str) -> Error {
    Error::Domain {
        name,
        value,
        reason,
    }
}

/// Checks `0 <= x <= 1` (rejecting NaN).
pub(crate) fn check_probability(name: &'static str, x: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(domain(name, x, "must be a probability in [0, 1]"))
    }
}
