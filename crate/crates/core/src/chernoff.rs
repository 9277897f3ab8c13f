//! Chernoff information and the error exponents derived from it.
//!
//! The objective `g(α) = Σ_k p(k)^α q(k)^{1−α}` is log-convex, so its minimum
//! over `[0, 1]` is found by ternary search on `ln g`. Where one distribution
//! has zeros, `g` jumps at the endpoints; the minimum is then the infimum over
//! the open interval, which the search picks up through the one-sided limits
//! `g(0⁺)` and `g(1⁻)`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::imperfections::{hypothesis_pair, two_click_probability, HypothesisPair, SourceParams};
use crate::special::LogSum;

const MAX_ITERATIONS: u32 = 200;
const ALPHA_TOL: f64 = 1e-12;
const NORMALIZATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChernoffResult {
    /// Chernoff information in nats.
    pub c: f64,
    pub alpha_star: f64,
    /// `min_α g(α)`, equal to `exp(−c)`.
    pub objective_min: f64,
}

/// Log-domain view of two distributions restricted to their joint support.
struct Objective {
    // (ln p, ln q) over outcomes where both are positive
    terms: Vec<(f64, f64)>,
    ln_limit_at_0: f64,
    ln_limit_at_1: f64,
    identical: bool,
}

impl Objective {
    fn new(p: &[f64], q: &[f64]) -> Self {
        let mut terms = Vec::with_capacity(p.len());
        let mut at0 = LogSum::new();
        let mut at1 = LogSum::new();
        for (&a, &b) in p.iter().zip(q) {
            if a > 0.0 {
                at0.push(b.ln());
            }
            if b > 0.0 {
                at1.push(a.ln());
            }
            if a > 0.0 && b > 0.0 {
                terms.push((a.ln(), b.ln()));
            }
        }
        Self {
            terms,
            ln_limit_at_0: at0.ln(),
            ln_limit_at_1: at1.ln(),
            identical: p == q,
        }
    }

    fn ln_at(&self, alpha: f64) -> f64 {
        let mut s = LogSum::new();
        for &(lp, lq) in &self.terms {
            s.push(alpha * lp + (1.0 - alpha) * lq);
        }
        s.ln()
    }

    /// `(ln min g, argmin)`.
    fn minimize(&self) -> (f64, f64) {
        // identical inputs: g ≡ 1, which rounding in the sum would blur
        if self.identical {
            return (0.0, 0.5);
        }
        let (mut a, mut b) = (0.0f64, 1.0f64);
        for _ in 0..MAX_ITERATIONS {
            if b - a < ALPHA_TOL {
                break;
            }
            let m1 = a + (b - a) / 3.0;
            let m2 = b - (b - a) / 3.0;
            if self.ln_at(m1) <= self.ln_at(m2) {
                b = m2;
            } else {
                a = m1;
            }
        }
        let alpha = 0.5 * (a + b);
        let mut best = (self.ln_at(alpha), alpha);
        if self.ln_limit_at_0 < best.0 {
            best = (self.ln_limit_at_0, 0.0);
        }
        if self.ln_limit_at_1 < best.0 {
            best = (self.ln_limit_at_1, 1.0);
        }
        best
    }
}

fn check_distribution(name: &str, p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::InvalidDistribution(format!("{name} is empty")));
    }
    if let Some(x) = p.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(Error::InvalidDistribution(format!("{name} has entry {x}")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::InvalidDistribution(format!("{name} sums to {total}")));
    }
    Ok(())
}

fn result_from(ln_min: f64, alpha_star: f64) -> ChernoffResult {
    ChernoffResult {
        c: (-ln_min).max(0.0),
        alpha_star,
        objective_min: ln_min.exp().min(1.0),
    }
}

/// `C = −ln min_{0≤α≤1} Σ_k p_D(k)^α p_E(k)^{1−α}`.
pub fn chernoff_information(p_d: &[f64], p_e: &[f64]) -> Result<ChernoffResult> {
    if p_d.len() != p_e.len() {
        return Err(Error::InvalidDistribution(format!(
            "length mismatch: {} vs {}",
            p_d.len(),
            p_e.len()
        )));
    }
    check_distribution("p_d", p_d)?;
    check_distribution("p_e", p_e)?;
    let (ln_min, alpha) = Objective::new(p_d, p_e).minimize();
    Ok(result_from(ln_min, alpha))
}

/// `ln min_α [Q_D^α Q_E^{1−α} + (1−Q_D)^α (1−Q_E)^{1−α}]` and its argmin.
fn bernoulli_objective(q_d: f64, q_e: f64) -> (f64, f64) {
    Objective::new(&[q_d, 1.0 - q_d], &[q_e, 1.0 - q_e]).minimize()
}

/// Per-run Chernoff information when only two-click events carry
/// information: `−ln(1 − P₂ + P₂ · min_α[…])`.
pub fn two_click_chernoff(hp: &HypothesisPair) -> Result<ChernoffResult> {
    let hp = HypothesisPair::new(hp.q_d, hp.q_e, hp.p2)?;
    let (ln_m, alpha) = bernoulli_objective(hp.q_d, hp.q_e);
    let gap = -ln_m.exp_m1();
    let c = -(-hp.p2 * gap).ln_1p();
    Ok(ChernoffResult {
        c: c.max(0.0),
        alpha_star: alpha,
        objective_min: 1.0 - hp.p2 * gap,
    })
}

/// Leading-order two-click exponent per detected pair,
/// `ζ = (1 + g² + 4d + 2d²)(1 − min_α[…])`. Independent of `ηn̄`.
pub fn rescaled_chernoff_zeta(p: &SourceParams, extended_delta_min: f64) -> Result<f64> {
    let hp = hypothesis_pair(p, extended_delta_min)?;
    let (ln_m, _) = bernoulli_objective(hp.q_d, hp.q_e);
    Ok((p.bracket() * -ln_m.exp_m1()).max(0.0))
}

/// `C / (ηn̄)²` from the full two-click exponent, without linearization.
pub fn exact_rescaled_chernoff(p: &SourceParams, extended_delta_min: f64) -> Result<f64> {
    if p.eta_nbar <= 0.0 {
        return Err(domain("eta_nbar", p.eta_nbar, "must be positive to rescale"));
    }
    let hp = hypothesis_pair(p, extended_delta_min)?;
    two_click_probability(p)?;
    Ok(two_click_chernoff(&hp)?.c / (p.eta_nbar * p.eta_nbar))
}

/// `exp[−(ηn̄)² N ζ]`.
pub fn asymptotic_error(n_runs: f64, eta_nbar: f64, zeta: f64) -> Result<f64> {
    for (name, x) in [("n_runs", n_runs), ("eta_nbar", eta_nbar), ("zeta", zeta)] {
        if !(x >= 0.0) {
            return Err(domain(name, x, "must be nonnegative"));
        }
    }
    let exponent = eta_nbar * eta_nbar * n_runs * zeta;
    Ok(if exponent == 0.0 { 1.0 } else { (-exponent).exp() })
}
