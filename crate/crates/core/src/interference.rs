//! Ideal-protocol click statistics.

use serde::{Deserialize, Serialize};

use crate::codes::{hamming_distance, Codeword};
use crate::error::{domain, Result};

/// Normalized overlap of two binary phase patterns, in `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Visibility(f64);

impl Visibility {
    pub fn new(v: f64) -> Result<Self> {
        if (-1.0..=1.0).contains(&v) {
            Ok(Self(v))
        } else {
            Err(domain("v", v, "visibility must lie in [-1, 1]"))
        }
    }

    /// `1 − 2δ` for codewords at relative distance `δ`.
    pub fn from_relative_distance(delta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&delta) {
            return Err(domain("delta", delta, "relative distance must lie in [0, 1]"));
        }
        Self::new(1.0 - 2.0 * delta)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Visibility {
    type Error = crate::error::Error;

    fn try_from(v: f64) -> Result<Self> {
        Self::new(v)
    }
}

impl From<Visibility> for f64 {
    fn from(v: Visibility) -> f64 {
        v.0
    }
}

/// `(1/m) Σᵢ (−1)^{xᵢ + yᵢ}`.
pub fn visibility(ex: &Codeword, ey: &Codeword) -> Result<Visibility> {
    let m = ex.len() as f64;
    let d = hamming_distance(ex, ey)? as f64;
    // (m - 2d)/m is exact in the numerator for any realistic m
    Visibility::new((m - 2.0 * d) / m)
}

/// Probability of a coincidence for two single photons, `(1 − v²)/2`.
pub fn coincidence_probability(v: Visibility) -> f64 {
    let v = v.value();
    // (1-v)(1+v) keeps precision when |v| is close to 1
    0.5 * (1.0 - v) * (1.0 + v)
}

fn check_nbar(nbar: f64) -> Result<()> {
    if nbar >= 0.0 && nbar.is_finite() {
        Ok(())
    } else {
        Err(domain("nbar", nbar, "mean photon number must be finite and nonnegative"))
    }
}

/// Probability that the dark port of the coherent-state interferometer
/// registers at least one count: `1 − exp[−n̄(1 − v)]`.
pub fn coherent_click_probability(nbar: f64, v: Visibility) -> Result<f64> {
    check_nbar(nbar)?;
    Ok(-(-nbar * (1.0 - v.value())).exp_m1())
}

/// `exp(−2 n̄ δ)`: the chance that coherent pulses from inputs at distance `δ`
/// produce no count at all.
pub fn misid_probability_coherent(nbar: f64, delta_min: f64) -> Result<f64> {
    check_nbar(nbar)?;
    if !(0.0..0.5).contains(&delta_min) {
        return Err(domain("delta_min", delta_min, "must lie in [0, 1/2)"));
    }
    Ok((-2.0 * nbar * delta_min).exp())
}

/// `[(1 + (1 − 2Δ)²)/2]^{N₂}`: the chance that `N₂` photon pairs from inputs
/// at distance `Δ` yield no coincidence.
pub fn misid_probability_twophoton(n2: u64, extended_delta_min: f64) -> Result<f64> {
    let d = extended_delta_min;
    if !(0.0..=0.5).contains(&d) {
        return Err(domain("Delta_min", d, "must lie in [0, 1/2]"));
    }
    let ln_base = (-2.0 * d * (1.0 - d)).ln_1p();
    Ok((n2 as f64 * ln_base).exp())
}

/// Output-port statistics when two photons enter one input port of a
/// balanced beam splitter in the same mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitDistribution {
    pub p_both_a: f64,
    pub p_both_b: f64,
    pub p_coincidence: f64,
}

/// `(â†)²|0⟩/√2 ↦ [(â†)² + 2â†b̂† + (b̂†)²]/(2√2)|0⟩` gives `1/4, 1/2, 1/4`.
pub fn single_source_pair_split() -> SplitDistribution {
    SplitDistribution {
        p_both_a: 0.25,
        p_both_b: 0.25,
        p_coincidence: 0.5,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: f64) -> Visibility {
        Visibility::new(x).unwrap()
    }

    #[test]
    fn visibility_examples() {
        let c: Codeword = "0110".parse().unwrap();
        assert_eq!(visibility(&c, &c).unwrap().value(), 1.0);
        assert_eq!(visibility(&c, &c.negated()).unwrap().value(), -1.0);
        let d: Codeword = "0111".parse().unwrap();
        assert_eq!(visibility(&c, &d).unwrap().value(), 0.5);
        assert!(Visibility::new(1.0 + 1e-12).is_err());
        assert!(Visibility::new(f64::NAN).is_err());
    }

    #[test]
    fn coincidence_examples() {
        assert_eq!(coincidence_probability(v(1.0)), 0.0);
        assert_eq!(coincidence_probability(v(-1.0)), 0.0);
        assert!((coincidence_probability(v(0.8)) - 0.18).abs() < 1e-16);
    }

    #[test]
    fn coherent_examples() {
        assert_eq!(coherent_click_probability(3.0, v(1.0)).unwrap(), 0.0);
        assert_eq!(coherent_click_probability(0.0, v(0.3)).unwrap(), 0.0);
        let p = coherent_click_probability(1.0, v(-1.0)).unwrap();
        assert!((p - (1.0 - (-2.0f64).exp())).abs() < 1e-15);
        assert!(coherent_click_probability(-1.0, v(0.0)).is_err());

        assert_eq!(misid_probability_coherent(0.0, 0.3).unwrap(), 1.0);
        let p = misid_probability_coherent(10.0, 0.2).unwrap();
        assert!((p - (-4.0f64).exp()).abs() < 1e-17);
    }

    #[test]
    fn twophoton_misid() {
        assert_eq!(misid_probability_twophoton(0, 0.3).unwrap(), 1.0);
        let p = misid_probability_twophoton(10, 0.1).unwrap();
        assert!((p / 0.82f64.powi(10) - 1.0).abs() < 1e-14);
        assert!(misid_probability_twophoton(1, 0.6).is_err());
    }

    #[test]
    fn split_is_normalized() {
        let s = single_source_pair_split();
        assert_eq!(s.p_both_a + s.p_both_b + s.p_coincidence, 1.0);
    }
}
