//! Minimum-error test between "different" and "equal" on the coincidence
//! count among `N₂` two-click events.
//!
//! Under either hypothesis `N_c ~ Binomial(N₂, Q)`. The log-likelihood ratio
//! is linear in `N_c`, so the optimal rule is a single threshold and the
//! error probability splits into one lower and one upper binomial tail.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};
use crate::imperfections::HypothesisPair;
use crate::special::{ln_add, ln_binom_lower_tail, ln_binom_pmf, ln_binom_upper_tail};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Different,
    Equal,
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decision::Different => "different",
            Decision::Equal => "equal",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub decision: Decision,
    pub n_c: u64,
    pub n2: u64,
}

fn check_count(n_c: u64, n2: u64) -> Result<()> {
    if n_c > n2 {
        Err(Error::CountOutOfRange { n_c, n2 })
    } else {
        Ok(())
    }
}

/// `ln[C(N₂, N_c) q^{N_c} (1−q)^{N₂−N_c}]`, or `-inf` for impossible counts.
pub fn binomial_log_pmf(n2: u64, q: f64, n_c: u64) -> Result<f64> {
    check_count(n_c, n2)?;
    check_probability("q", q)?;
    Ok(ln_binom_pmf(n_c, n2, q))
}

// a·x with the measure-theoretic convention 0·∞ = 0.
fn scaled(x: f64, a: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * a
    }
}

/// Log-likelihood ratio `ln p_hi(k) − ln p_lo(k)` for `q_lo < q_hi`.
struct Llr {
    n: u64,
    slope_hit: f64,
    slope_miss: f64,
}

impl Llr {
    fn new(n: u64, q_lo: f64, q_hi: f64) -> Self {
        Self {
            n,
            slope_hit: q_hi.ln() - q_lo.ln(),
            slope_miss: (-q_hi).ln_1p() - (-q_lo).ln_1p(),
        }
    }

    fn at(&self, k: u64) -> f64 {
        scaled(k as f64, self.slope_hit) + scaled((self.n - k) as f64, self.slope_miss)
    }

    /// Largest `k` with `LLR(k) <= 0`, or `None` if every count favors `hi`.
    fn threshold(&self) -> Option<u64> {
        // LLR is nondecreasing in k; binary search for the last nonpositive value.
        if self.at(0) > 0.0 {
            return None;
        }
        let (mut lo, mut hi) = (0u64, self.n);
        while lo < hi {
            let mid = lo + (hi - lo).div_ceil(2);
            if self.at(mid) <= 0.0 {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        Some(lo)
    }
}

/// Picks the hypothesis with the larger likelihood; ties go to `Equal`.
pub fn decide(n_c: u64, n2: u64, hp: &HypothesisPair) -> Result<TestOutcome> {
    check_count(n_c, n2)?;
    let decision = if hp.q_d == hp.q_e {
        Decision::Equal
    } else {
        let (lo, hi) = if hp.q_e < hp.q_d { (hp.q_e, hp.q_d) } else { (hp.q_d, hp.q_e) };
        let llr = Llr::new(n2, lo, hi).at(n_c);
        let d_wins = if hp.q_d > hp.q_e { llr > 0.0 } else { llr < 0.0 };
        if d_wins {
            Decision::Different
        } else {
            Decision::Equal
        }
    };
    Ok(TestOutcome { decision, n_c, n2 })
}

/// `½ Σ_{N_c} min{p_D(N_c), p_E(N_c)}` with equiprobable hypotheses.
pub fn exact_error_probability(n2: u64, hp: &HypothesisPair) -> Result<f64> {
    Ok(ln_exact_error_probability(n2, hp.q_d, hp.q_e)?.exp())
}

/// Natural log of [`exact_error_probability`], usable far below the `f64`
/// underflow threshold. Symmetric in the two fractions.
pub fn ln_exact_error_probability(n2: u64, q_d: f64, q_e: f64) -> Result<f64> {
    check_probability("q_d", q_d)?;
    check_probability("q_e", q_e)?;
    let half = -std::f64::consts::LN_2;
    if q_d == q_e {
        return Ok(half);
    }
    let (lo, hi) = if q_e < q_d { (q_e, q_d) } else { (q_d, q_e) };
    // Counts up to k* are attributed to `lo`, the rest to `hi`; the error
    // is the mass each hypothesis puts on the other's region.
    let ln_sum = match Llr::new(n2, lo, hi).threshold() {
        None => 0.0,
        Some(k) => {
            let hi_below = ln_binom_lower_tail(k, n2, hi);
            let lo_above = if k >= n2 {
                f64::NEG_INFINITY
            } else {
                ln_binom_upper_tail(k + 1, n2, lo)
            };
            ln_add(hi_below, lo_above)
        }
    };
    Ok(half + ln_sum)
}
