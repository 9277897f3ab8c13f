//! How much classical information each fingerprinting scheme could carry
//! with the resources it spends, and where the quantum schemes overtake the
//! classical bound.

use serde::{Deserialize, Serialize};

use crate::codes::{gv_rate, map_coherent_to_twophoton_distance, modified_gv_rate};
use crate::error::{domain, Error, Result};
use crate::interference::{misid_probability_coherent, misid_probability_twophoton};
use crate::special::log2_choose;

/// The classical figure is the best known lower bound on the information
/// a classical protocol must leak; it may not be tight.
pub const CLASSICAL_BOUND_CAVEAT: &str =
    "classical bound is a lower bound; it is not known to be saturable";

const SEARCH_MIN_N: f64 = 1e2;
const SEARCH_MAX_N: f64 = 1e12;
const SEARCH_GRID_POINTS: usize = 20;
const SEARCH_REL_WIDTH: f64 = 1e-3;

/// `(1 − 2√P_err) √(n / (2 ln 2)) − 1` bits.
pub fn classical_bound(n: u64, p_err: f64) -> Result<f64> {
    if n == 0 {
        return Err(domain("n", 0.0, "input length must be at least 1"));
    }
    if !(p_err > 0.0 && p_err < 0.25) {
        return Err(domain("p_err", p_err, "must lie in (0, 1/4)"));
    }
    let scale = (n as f64 / (2.0 * std::f64::consts::LN_2)).sqrt();
    Ok((1.0 - 2.0 * p_err.sqrt()) * scale - 1.0)
}

/// `log₂ C(N₂ + M N₂, N₂)`: bits that at most `N₂` photons can carry in
/// `M N₂` modes.
pub fn two_photon_information(n2: u64, m_seq: u64) -> Result<f64> {
    if n2 == 0 {
        return Err(domain("n2", 0.0, "photon number must be at least 1"));
    }
    if m_seq == 0 {
        return Err(domain("m_seq", 0.0, "sequence length must be at least 1"));
    }
    let modes = m_seq
        .checked_mul(n2)
        .and_then(|k| k.checked_add(n2))
        .ok_or(domain("m_seq", m_seq as f64, "mode count overflows"))?;
    Ok(log2_choose(modes, n2))
}

/// `(n̄ + m) log₂(n̄ + m) − n̄ log₂ n̄ − m log₂ m`, the coherent-state
/// capacity of `m` bosonic modes at total mean photon number `n̄`.
pub fn coherent_information(nbar: f64, m_seq: u64) -> Result<f64> {
    if !(nbar >= 0.0 && nbar.is_finite()) {
        return Err(domain("nbar", nbar, "must be finite and nonnegative"));
    }
    if m_seq == 0 {
        return Err(domain("m_seq", 0.0, "sequence length must be at least 1"));
    }
    if nbar == 0.0 {
        return Ok(0.0);
    }
    let m = m_seq as f64;
    // regrouped as n̄ log₂(1 + m/n̄) + m log₂(1 + n̄/m) to avoid cancellation
    let bits = (nbar * (m / nbar).ln_1p() + m * (nbar / m).ln_1p()) / std::f64::consts::LN_2;
    Ok(bits)
}

/// What a target error probability is compared against when sizing photon
/// budgets.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorConvention {
    /// The chance that different inputs go unnoticed.
    #[default]
    ConditionalMisidentification,
    /// The error averaged over equiprobable hypotheses, half the former.
    AverageError,
}

impl ErrorConvention {
    fn misidentification_target(self, p_err: f64) -> f64 {
        match self {
            ErrorConvention::ConditionalMisidentification => p_err,
            ErrorConvention::AverageError => 2.0 * p_err,
        }
    }
}

impl std::str::FromStr for ErrorConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "conditional-misidentification" => Ok(Self::ConditionalMisidentification),
            "average-error" => Ok(Self::AverageError),
            _ => Err(Error::InvalidParams(format!(
                "unknown convention {s:?}; expected conditional-misidentification or average-error"
            ))),
        }
    }
}

/// Resources each quantum scheme spends on an `n`-bit input at a given
/// reliability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolOperatingPoint {
    pub n: u64,
    pub p_err_target: f64,
    pub delta_coh: f64,
    #[serde(rename = "Delta_min")]
    pub delta_ext: f64,
    pub convention: ErrorConvention,
    /// Mean photon number per party, coherent-state scheme.
    pub nbar: f64,
    /// Photon pairs, two-photon scheme.
    pub n2: u64,
    /// Base codeword length.
    pub m: u64,
    /// Extended codeword length.
    #[serde(rename = "M")]
    pub m_ext: u64,
}

impl ProtocolOperatingPoint {
    pub fn classical_bits(&self) -> Result<f64> {
        classical_bound(self.n, self.p_err_target)
    }

    pub fn two_photon_bits(&self) -> Result<f64> {
        two_photon_information(self.n2, self.m_ext)
    }

    pub fn coherent_bits(&self) -> Result<f64> {
        coherent_information(self.nbar, self.m)
    }
}

fn round_length(x: f64) -> Result<u64> {
    let r = x.round();
    if r < 1.0 || r > u64::MAX as f64 {
        return Err(domain("length", x, "rounded sequence length out of range"));
    }
    Ok(r as u64)
}

/// Sizes `n̄` and `N₂` so both misidentification probabilities meet the target,
/// and the sequence lengths from the Gilbert–Varshamov rates.
pub fn operating_point(
    n: u64,
    p_err: f64,
    delta_coh: f64,
    convention: ErrorConvention,
) -> Result<ProtocolOperatingPoint> {
    if n == 0 {
        return Err(domain("n", 0.0, "input length must be at least 1"));
    }
    if !(delta_coh > 0.0 && delta_coh <= 0.25) {
        return Err(domain("delta_coh", delta_coh, "must lie in (0, 0.25]"));
    }
    let target = convention.misidentification_target(p_err);
    if !(p_err > 0.0 && target < 1.0) {
        return Err(domain("p_err", p_err, "target misidentification must lie in (0, 1)"));
    }
    let delta_ext = map_coherent_to_twophoton_distance(delta_coh)?;

    let mut nbar = -target.ln() / (2.0 * delta_coh);
    while misid_probability_coherent(nbar, delta_coh)? > target {
        nbar = nbar.next_up();
    }

    let ln_base = (-2.0 * delta_ext * (1.0 - delta_ext)).ln_1p();
    let mut n2 = (target.ln() / ln_base).ceil().max(0.0) as u64;
    while misid_probability_twophoton(n2, delta_ext)? > target {
        n2 += 1;
    }
    // at least one pair is needed for the information count to be defined
    let n2 = n2.max(1);

    let r = gv_rate(delta_coh)?;
    let big_r = modified_gv_rate(delta_ext)?;
    if big_r <= 0.0 || r <= 0.0 {
        return Err(Error::RateVanishes);
    }
    Ok(ProtocolOperatingPoint {
        n,
        p_err_target: p_err,
        delta_coh,
        delta_ext,
        convention,
        nbar,
        n2,
        m: round_length(n as f64 / r)?,
        m_ext: round_length(n as f64 / big_r)?,
    })
}

/// Input lengths above which each quantum scheme needs fewer bits than the
/// classical bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossover {
    pub two_photon: u64,
    pub coherent: Option<u64>,
}

fn n_at(log10_n: f64) -> u64 {
    10f64.powf(log10_n).round() as u64
}

// Smallest n on the search range where `below(n)` holds, assuming it stays
// true once it becomes true.
fn search<F>(below: F) -> Result<Option<u64>>
where
    F: Fn(u64) -> Result<bool>,
{
    let (lo, hi) = (SEARCH_MIN_N.log10(), SEARCH_MAX_N.log10());
    let step = (hi - lo) / (SEARCH_GRID_POINTS - 1) as f64;
    let mut prev = None;
    for i in 0..SEARCH_GRID_POINTS {
        let x = lo + step * i as f64;
        if below(n_at(x))? {
            let Some(mut a) = prev else {
                return Ok(Some(n_at(x)));
            };
            let mut b = x;
            while 10f64.powf(b - a) - 1.0 > SEARCH_REL_WIDTH {
                let mid = 0.5 * (a + b);
                if below(n_at(mid))? {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            return Ok(Some(n_at(b)));
        }
        prev = Some(x);
    }
    Ok(None)
}

/// Crossover lengths at fixed reliability and base-code distance.
///
/// The coherent-state crossover is reported when it exists in the same
/// search range; only a missing two-photon crossover is an error.
pub fn crossover_length(
    p_err: f64,
    delta_coh: f64,
    convention: ErrorConvention,
) -> Result<Crossover> {
    let two_photon = search(|n| {
        let op = operating_point(n, p_err, delta_coh, convention)?;
        Ok(op.two_photon_bits()? < op.classical_bits()?)
    })?
    .ok_or(Error::NoCrossover(SEARCH_MAX_N))?;
    let coherent = search(|n| {
        let op = operating_point(n, p_err, delta_coh, convention)?;
        Ok(op.coherent_bits()? < op.classical_bits()?)
    })?;
    Ok(Crossover {
        two_photon,
        coherent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_examples() {
        let n = 2.0 * std::f64::consts::LN_2;
        // n must be an integer, so check the closed form at n = 1 and scale
        let one = classical_bound(1, 1e-18).unwrap();
        assert!((one - ((1.0 - 2e-9) / n.sqrt() - 1.0)).abs() < 1e-15);
        let v = classical_bound(1_000_000, 1e-6).unwrap();
        assert!((v - 846.623_156_687_443).abs() < 1e-9, "{v}");
        assert!(classical_bound(10, 0.25).is_err());
    }

    #[test]
    fn two_photon_examples() {
        assert!((two_photon_information(1, 2).unwrap() - 3f64.log2()).abs() < 1e-15);
        assert!((two_photon_information(1, 1).unwrap() - 1.0).abs() < 1e-15);
        assert!(two_photon_information(0, 1).is_err());
    }

    #[test]
    fn coherent_examples() {
        assert_eq!(coherent_information(7.0, 7).unwrap(), 14.0);
        assert_eq!(coherent_information(1.0, 1).unwrap(), 2.0);
        assert_eq!(coherent_information(0.0, 5).unwrap(), 0.0);
        assert!(coherent_information(1e-300, 3).unwrap() < 1e-290);
    }

    #[test]
    fn operating_point_example() {
        let op = operating_point(1_000_000, 1e-6, 0.2, ErrorConvention::default()).unwrap();
        assert!((op.nbar - 34.538_776_394_910_684).abs() < 1e-9);
        assert_eq!(op.n2, 35);
        assert_eq!(op.m, 3_596_192);
        assert!((op.delta_ext - 0.208_178_097_090_332).abs() < 1e-12);
        assert!(misid_probability_coherent(op.nbar, 0.2).unwrap() <= 1e-6);
        assert!(misid_probability_twophoton(op.n2, op.delta_ext).unwrap() <= 1e-6);
    }

    #[test]
    fn budgets_vanish_near_unit_error() {
        let op = operating_point(1000, 0.999_999, 0.2, ErrorConvention::default()).unwrap();
        assert!(op.nbar < 1e-5);
        assert_eq!(op.n2, 1);
        assert!(operating_point(1000, 0.6, 0.2, ErrorConvention::AverageError).is_err());
    }
}
