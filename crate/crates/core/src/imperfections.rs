//! Leading-order click statistics with loss, dark counts, multiphoton
//! emission and partial distinguishability.
//!
//! Everything depends on the source only through `ηn̄`, `g²`, the dark-count
//! ratio `p_d/(ηn̄)` and the indistinguishability `W`. The expressions keep
//! the terms of order `(ηn̄)²`; [`SourceParams::warnings`] flags parameter
//! sets where the dropped terms stop being small.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::interference::Visibility;

/// Threshold above which `ηn̄·g²` or `p_d/(ηn̄)` is reported as outside the
/// leading-order regime.
pub const VALIDITY_THRESHOLD: f64 = 0.1;

/// One party's source, channel and detector, assumed identical for both.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSourceParams")]
pub struct SourceParams {
    pub eta_nbar: f64,
    pub g2: f64,
    pub dark_ratio: f64,
    pub w: f64,
}

#[derive(Deserialize)]
struct RawSourceParams {
    eta_nbar: f64,
    g2: f64,
    dark_ratio: f64,
    w: f64,
}

impl TryFrom<RawSourceParams> for SourceParams {
    type Error = Error;

    fn try_from(r: RawSourceParams) -> Result<Self> {
        SourceParams::new(r.eta_nbar, r.g2, r.dark_ratio, r.w)
    }
}

/// A way in which a parameter set strays from the model's assumptions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValidityWarning {
    /// `ηn̄·g²` is not small, so three-photon terms matter.
    Multiphoton,
    /// `p_d/(ηn̄)` is not small.
    DarkCounts,
}

impl fmt::Display for ValidityWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidityWarning::Multiphoton => write!(
                f,
                "eta_nbar * g2 > {VALIDITY_THRESHOLD}: multiphoton terms beyond leading order are not negligible"
            ),
            ValidityWarning::DarkCounts => write!(
                f,
                "dark_ratio > {VALIDITY_THRESHOLD}: dark counts beyond leading order are not negligible"
            ),
        }
    }
}

impl SourceParams {
    pub fn new(eta_nbar: f64, g2: f64, dark_ratio: f64, w: f64) -> Result<Self> {
        let finite_nonneg = |x: f64| x >= 0.0 && x.is_finite();
        if !finite_nonneg(eta_nbar) {
            return Err(domain("eta_nbar", eta_nbar, "must be finite and nonnegative"));
        }
        if !finite_nonneg(g2) {
            return Err(domain("g2", g2, "must be finite and nonnegative"));
        }
        if !finite_nonneg(dark_ratio) {
            return Err(domain("dark_ratio", dark_ratio, "must be finite and nonnegative"));
        }
        if !(0.0..=1.0).contains(&w) {
            return Err(domain("w", w, "indistinguishability must lie in [0, 1]"));
        }
        if eta_nbar + 0.5 * eta_nbar * eta_nbar * g2 > 1.0 {
            return Err(Error::InvalidParams(format!(
                "emission probabilities exceed 1: eta_nbar = {eta_nbar}, g2 = {g2}"
            )));
        }
        Ok(Self {
            eta_nbar,
            g2,
            dark_ratio,
            w,
        })
    }

    /// Ideal single photons: `g² = 0`, no dark counts, `W = 1`.
    pub fn ideal(eta_nbar: f64) -> Result<Self> {
        Self::new(eta_nbar, 0.0, 0.0, 1.0)
    }

    pub fn warnings(&self) -> Vec<ValidityWarning> {
        let mut out = Vec::new();
        if self.eta_nbar * self.g2 > VALIDITY_THRESHOLD {
            out.push(ValidityWarning::Multiphoton);
        }
        if self.dark_ratio > VALIDITY_THRESHOLD {
            out.push(ValidityWarning::DarkCounts);
        }
        out
    }

    /// `1 + g² + 4d + 2d²` with `d = p_d/(ηn̄)`.
    pub fn bracket(&self) -> f64 {
        let d = self.dark_ratio;
        1.0 + self.g2 + 4.0 * d + 2.0 * d * d
    }

    /// Mean dark counts per detector per run.
    pub fn dark_mean(&self) -> f64 {
        self.dark_ratio * self.eta_nbar
    }
}

/// `P₂ = (ηn̄)² (1 + g² + 4d + 2d²)`.
pub fn two_click_probability(p: &SourceParams) -> Result<f64> {
    let p2 = p.eta_nbar * p.eta_nbar * p.bracket();
    if p2 > 1.0 {
        return Err(Error::InvalidParams(format!(
            "two-click probability {p2} exceeds 1; parameters are far outside the model"
        )));
    }
    Ok(p2)
}

/// `V_eff = W v² / (1 + g² + 4d + 2d²)`.
pub fn effective_visibility(p: &SourceParams, v: Visibility) -> f64 {
    let v = v.value();
    p.w * v * v / p.bracket()
}

/// Fraction of two-click events that are coincidences, `(1 − V_eff)/2`.
pub fn coincidence_fraction(p: &SourceParams, v: Visibility) -> f64 {
    0.5 * (1.0 - effective_visibility(p, v))
}

/// Coincidence fractions under the two hypotheses and the shared two-click
/// probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HypothesisPair {
    pub q_d: f64,
    pub q_e: f64,
    pub p2: f64,
}

impl HypothesisPair {
    pub fn new(q_d: f64, q_e: f64, p2: f64) -> Result<Self> {
        for (name, x) in [("q_d", q_d), ("q_e", q_e), ("p2", p2)] {
            crate::error::check_probability(name, x)?;
        }
        Ok(Self { q_d, q_e, p2 })
    }
}

/// Worst case over code pairs: `Q_D` at `v = 1 − 2Δ_min`, `Q_E` at `v = 1`.
pub fn hypothesis_pair(p: &SourceParams, extended_delta_min: f64) -> Result<HypothesisPair> {
    let d = extended_delta_min;
    if !(0.0..=0.5).contains(&d) {
        return Err(domain("Delta_min", d, "must lie in [0, 1/2]"));
    }
    let q_d = coincidence_fraction(p, Visibility::from_relative_distance(d)?);
    let q_e = coincidence_fraction(p, Visibility::new(1.0)?);
    HypothesisPair::new(q_d, q_e, two_click_probability(p)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn two_click_examples() {
        let p = SourceParams::new(0.1, 1.0, 0.01, 1.0).unwrap();
        close(two_click_probability(&p).unwrap(), 0.020402, 1e-16);
        let p = SourceParams::new(0.1, 0.0, 0.0, 1.0).unwrap();
        close(two_click_probability(&p).unwrap(), 0.01, 1e-17);
        let p = SourceParams::new(0.0, 1.0, 0.5, 1.0).unwrap();
        assert_eq!(two_click_probability(&p).unwrap(), 0.0);
    }

    #[test]
    fn visibility_examples() {
        let one = Visibility::new(1.0).unwrap();
        let p = SourceParams::new(0.05, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(effective_visibility(&p, one), 0.5);
        assert_eq!(coincidence_fraction(&p, one), 0.25);

        let p = SourceParams::new(0.05, 0.0, 0.01, 0.98).unwrap();
        let v = Visibility::new(0.8).unwrap();
        close(effective_visibility(&p, v), 0.6272 / 1.0402, 1e-15);
        close(coincidence_fraction(&p, v), 0.198_519_515_477_792_73, 1e-15);
    }

    #[test]
    fn hypothesis_examples() {
        let hp = hypothesis_pair(&SourceParams::ideal(0.1).unwrap(), 0.1).unwrap();
        close(hp.q_d, 0.18, 1e-15);
        assert_eq!(hp.q_e, 0.0);
        let p = SourceParams::new(0.05, 0.0, 0.01, 0.98).unwrap();
        let hp = hypothesis_pair(&p, 0.0).unwrap();
        assert_eq!(hp.q_d, hp.q_e);
        let hp = hypothesis_pair(&p, 0.1).unwrap();
        close(hp.q_e, (1.0 - 0.98 / 1.0402) / 2.0, 1e-16);
        close(hp.q_e, 0.028_936_742_934_051_14, 1e-15);
    }

    #[test]
    fn validation_and_warnings() {
        assert!(SourceParams::new(-0.1, 0.0, 0.0, 1.0).is_err());
        assert!(SourceParams::new(0.1, 0.0, 0.0, 1.5).is_err());
        assert!(SourceParams::new(0.9, 1.0, 0.0, 1.0).is_err());
        assert!(SourceParams::new(0.05, 0.0, 0.01, 0.98).unwrap().warnings().is_empty());
        let p = SourceParams::new(0.5, 1.0, 0.2, 1.0).unwrap();
        assert_eq!(
            p.warnings(),
            vec![ValidityWarning::Multiphoton, ValidityWarning::DarkCounts]
        );
        let json = r#"{"eta_nbar":0.1,"g2":0.0,"dark_ratio":0.0,"w":2.0}"#;
        assert!(serde_json::from_str::<SourceParams>(json).is_err());
    }
}
