//! Binary codewords, the two-photon code extension, and Gilbert–Varshamov
//! rate bounds.
//!
//! Two-photon interference cannot tell a codeword pair at relative distance
//! `δ` from one at `1 - δ`, so base codewords are extended by a block of
//! identical bits. That caps pairwise distances away from 1 at the price of a
//! longer sequence; [`overhead_ratio`] quantifies the price at equal
//! misidentification scaling.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain, Error, Result};

/// Largest input length for which the minimum distance is certified
/// exhaustively.
pub const MAX_CERTIFIED_N: usize = 24;

/// Largest supported codeword length for [`LinearCode`].
pub const MAX_CODE_LENGTH: usize = 64;

/// A fixed-length binary sequence, read as a ± phase pattern (0 ↦ +, 1 ↦ −).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Codeword {
    bits: Vec<bool>,
}

impl Codeword {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::InvalidBits(String::new()));
        }
        Ok(Self { bits })
    }

    pub fn zeros(len: usize) -> Result<Self> {
        Self::new(vec![false; len])
    }

    /// Builds a codeword from the low `len` bits of `mask`, most significant
    /// position first.
    pub fn from_mask(mask: u64, len: usize) -> Result<Self> {
        if len > 64 {
            return Err(Error::CodeDimensions {
                n: len,
                m: len,
                reason: "mask codewords are limited to 64 bits",
            });
        }
        Self::new((0..len).map(|i| (mask >> (len - 1 - i)) & 1 == 1).collect())
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn weight(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Bitwise negation: the same phase pattern up to a global π shift.
    pub fn negated(&self) -> Self {
        Self {
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }
}

impl fmt::Debug for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Codeword({self})")
    }
}

impl fmt::Display for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Codeword {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::InvalidBits(s.to_owned())),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(bits).map_err(|_| Error::InvalidBits(s.to_owned()))
    }
}

impl Serialize for Codeword {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Codeword {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn hamming_distance(a: &Codeword, b: &Codeword) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    Ok(a.bits.iter().zip(&b.bits).filter(|(x, y)| x != y).count())
}

/// Fraction of positions at which `a` and `b` differ.
pub fn relative_distance(a: &Codeword, b: &Codeword) -> Result<f64> {
    Ok(hamming_distance(a, b)? as f64 / a.len() as f64)
}

/// Relative minimum distance before and after the two-photon extension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceProfile {
    pub delta_min: f64,
    #[serde(rename = "Delta_min")]
    pub extended_delta_min: f64,
}

impl DistanceProfile {
    pub fn from_base(delta_min: f64) -> Result<Self> {
        check_base_distance(delta_min)?;
        Ok(Self {
            delta_min,
            extended_delta_min: delta_min / (1.0 + delta_min),
        })
    }
}

fn check_base_distance(delta_min: f64) -> Result<()> {
    if delta_min > 0.0 && delta_min < 0.5 {
        Ok(())
    } else {
        Err(domain("delta_min", delta_min, "must lie in (0, 1/2)"))
    }
}

/// Number of padding bits `round(m · δ_min)`, ties rounded up.
pub fn pad_length(m: usize, delta_min: f64) -> Result<usize> {
    check_base_distance(delta_min)?;
    let exact = m as f64 * delta_min;
    // absorb representation error so that e.g. 5 * 0.1 counts as a tie
    let slack = 1e-9 * exact.max(1.0);
    Ok((exact + 0.5 + slack).floor() as usize)
}

/// Appends `round(m · δ_min)` zero bits to `c`.
pub fn extend_codeword(c: &Codeword, delta_min: f64) -> Result<Codeword> {
    let pad = pad_length(c.len(), delta_min)?;
    let mut bits = c.bits.clone();
    bits.resize(c.len() + pad, false);
    Codeword::new(bits)
}

/// `H₂(x) = −x log₂ x − (1−x) log₂(1−x)`, with `0 log 0 = 0`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(domain("x", x, "binary entropy is defined on [0, 1]"));
    }
    let term = |p: f64| if p == 0.0 { 0.0 } else { -p * p.log2() };
    Ok(term(x) + term(1.0 - x))
}

/// Asymptotic Gilbert–Varshamov rate `1 − H₂(δ_min)`.
pub fn gv_rate(delta_min: f64) -> Result<f64> {
    if !(0.0..0.5).contains(&delta_min) {
        return Err(domain(
            "delta_min",
            delta_min,
            "bound is valid for delta_min < 1/2",
        ));
    }
    Ok(1.0 - binary_entropy(delta_min)?)
}

/// Gilbert–Varshamov rate of the extended code, in terms of its relative
/// minimum distance `Δ_min`: `(1 − Δ) · r_GV(Δ / (1 − Δ))`.
pub fn modified_gv_rate(extended_delta_min: f64) -> Result<f64> {
    let d = extended_delta_min;
    if !(0.0..1.0 / 3.0).contains(&d) {
        return Err(domain(
            "Delta_min",
            d,
            "extended codes require Delta_min < 1/3",
        ));
    }
    Ok((1.0 - d) * gv_rate(d / (1.0 - d))?)
}

/// Extended-code distance `Δ_min` whose two-photon misidentification exponent
/// matches the coherent-state exponent of a base code with distance `δ`:
/// `Δ = (1 − sqrt(2 e^{−2δ} − 1)) / 2`.
pub fn map_coherent_to_twophoton_distance(delta_coh: f64) -> Result<f64> {
    if !(delta_coh >= 0.0) {
        return Err(domain("delta_coh", delta_coh, "must be nonnegative"));
    }
    let arg = 2.0 * (-2.0 * delta_coh).exp() - 1.0;
    if arg < 0.0 {
        return Err(domain(
            "delta_coh",
            delta_coh,
            "square-root argument negative (delta_coh > ln(2)/2)",
        ));
    }
    Ok(0.5 * (1.0 - arg.sqrt()))
}

/// Inverse of [`map_coherent_to_twophoton_distance`]:
/// `δ = −ln[(1 + (1 − 2Δ)²)/2] / 2`.
pub fn map_twophoton_to_coherent_distance(extended_delta_min: f64) -> Result<f64> {
    let d = extended_delta_min;
    if !(0.0..=0.5).contains(&d) {
        return Err(domain("Delta_min", d, "must lie in [0, 1/2]"));
    }
    // (1 + (1-2Δ)²)/2 = 1 - 2Δ(1-Δ)
    Ok(-0.5 * (-2.0 * d * (1.0 - d)).ln_1p())
}

/// Codeword-length overhead `M/m = r_GV(δ) / R_GV(Δ(δ))` of the two-photon
/// protocol at equal misidentification scaling.
pub fn overhead_ratio(delta_coh: f64) -> Result<f64> {
    if !(delta_coh > 0.0 && delta_coh <= 0.25) {
        return Err(domain("delta_coh", delta_coh, "must lie in (0, 0.25]"));
    }
    let denom = modified_gv_rate(map_coherent_to_twophoton_distance(delta_coh)?)?;
    if denom <= 0.0 {
        return Err(Error::RateVanishes);
    }
    Ok(gv_rate(delta_coh)? / denom)
}

/// A binary linear code `x ↦ G x` over GF(2).
///
/// Row `i` of the generator is stored as an `n`-bit mask whose most
/// significant bit multiplies input position 0; inputs and codewords use the
/// same most-significant-first convention.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LinearCodeRepr")]
pub struct LinearCode {
    n: usize,
    m: usize,
    generator: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    certified_min_distance: Option<u32>,
}

#[derive(Deserialize)]
struct LinearCodeRepr {
    n: usize,
    m: usize,
    generator: Vec<u64>,
    #[serde(default)]
    certified_min_distance: Option<u32>,
}

impl TryFrom<LinearCodeRepr> for LinearCode {
    type Error = Error;

    fn try_from(r: LinearCodeRepr) -> Result<Self> {
        let code = LinearCode::from_generator(r.n, r.m, r.generator)?;
        match r.certified_min_distance {
            None => Ok(code),
            Some(claimed) => {
                let code = code.certified()?;
                if code.certified_min_distance == Some(claimed) {
                    Ok(code)
                } else {
                    Err(Error::CodeDimensions {
                        n: code.n,
                        m: code.m,
                        reason: "certified_min_distance does not match the generator",
                    })
                }
            }
        }
    }
}

impl LinearCode {
    /// Validates dimensions and full column rank; does not certify.
    pub fn from_generator(n: usize, m: usize, generator: Vec<u64>) -> Result<Self> {
        check_dims(n, m)?;
        if generator.len() != m {
            return Err(Error::CodeDimensions {
                n,
                m,
                reason: "generator must have exactly m rows",
            });
        }
        let width_mask = low_mask(n);
        if generator.iter().any(|&row| row & !width_mask != 0) {
            return Err(Error::CodeDimensions {
                n,
                m,
                reason: "generator row has bits beyond the input length",
            });
        }
        if gf2_rank(&generator) != n {
            return Err(Error::RankDeficient(1));
        }
        Ok(Self {
            n,
            m,
            generator,
            certified_min_distance: None,
        })
    }

    /// The `n × n` identity code (minimum distance 1).
    pub fn identity(n: usize) -> Result<Self> {
        check_dims(n, n)?;
        let rows = (0..n).map(|i| 1u64 << (n - 1 - i)).collect();
        Self::from_generator(n, n, rows)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn generator(&self) -> &[u64] {
        &self.generator
    }

    pub fn certified_min_distance(&self) -> Option<u32> {
        self.certified_min_distance
    }

    /// Code rate `n / m`.
    pub fn rate(&self) -> f64 {
        self.n as f64 / self.m as f64
    }

    /// Populates `certified_min_distance` by exhaustive search.
    pub fn certified(mut self) -> Result<Self> {
        self.certified_min_distance = Some(self.exhaustive_min_distance()?);
        Ok(self)
    }

    /// Minimum Hamming weight over all `2ⁿ − 1` nonzero codewords.
    ///
    /// The input space is walked in Gray-code order in fixed-size blocks; the
    /// result does not depend on how blocks are scheduled across threads.
    pub fn exhaustive_min_distance(&self) -> Result<u32> {
        if self.n > MAX_CERTIFIED_N {
            return Err(Error::CodeDimensions {
                n: self.n,
                m: self.m,
                reason: "n too large for exhaustive certification",
            });
        }
        const BLOCK: u64 = 1 << 12;
        let columns = self.columns();
        let total = 1u64 << self.n;
        let blocks = total.div_ceil(BLOCK);
        let min = (0..blocks)
            .into_par_iter()
            .map(|b| {
                let start = (b * BLOCK).max(1);
                let end = ((b + 1) * BLOCK).min(total);
                let mut word = self.encode_mask(start ^ (start >> 1));
                let mut best = word.count_ones();
                for i in start + 1..end {
                    word ^= columns[i.trailing_zeros() as usize];
                    best = best.min(word.count_ones());
                }
                best
            })
            .min()
            .unwrap_or(u32::MAX);
        Ok(min)
    }

    // Column j is the codeword of the input with only Gray bit j set, i.e.
    // input position n-1-j.
    fn columns(&self) -> Vec<u64> {
        (0..self.n).map(|j| self.encode_mask(1 << j)).collect()
    }

    /// Encodes an input given as an `n`-bit mask into an `m`-bit mask.
    pub fn encode_mask(&self, input: u64) -> u64 {
        self.generator
            .iter()
            .fold(0u64, |acc, &row| (acc << 1) | ((row & input).count_ones() as u64 & 1))
    }

    pub fn encode(&self, input: &[bool]) -> Result<Codeword> {
        if input.len() != self.n {
            return Err(Error::LengthMismatch(input.len(), self.n));
        }
        let mask = input.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64);
        Codeword::from_mask(self.encode_mask(mask), self.m)
    }

    /// All `2ⁿ` codewords, indexed by input mask.
    pub fn codewords(&self) -> impl Iterator<Item = Codeword> + '_ {
        (0..1u64 << self.n).map(move |x| {
            Codeword::from_mask(self.encode_mask(x), self.m).expect("m >= 1 by construction")
        })
    }
}

fn check_dims(n: usize, m: usize) -> Result<()> {
    let reason = if n == 0 {
        "n must be at least 1"
    } else if n > m {
        "n must not exceed m"
    } else if m > MAX_CODE_LENGTH {
        "m must not exceed 64"
    } else {
        return Ok(());
    };
    Err(Error::CodeDimensions { n, m, reason })
}

fn low_mask(bits: usize) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

fn gf2_rank(rows: &[u64]) -> usize {
    let mut basis: Vec<u64> = Vec::new();
    for &row in rows {
        let mut v = row;
        for &b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

/// Draws a random full-rank `m × n` generator and certifies its minimum
/// distance. Deterministic in `seed`.
pub fn generate_random_linear_code(n: usize, m: usize, seed: u64) -> Result<LinearCode> {
    const ATTEMPTS: u32 = 64;
    check_dims(n, m)?;
    if n > MAX_CERTIFIED_N {
        return Err(Error::CodeDimensions {
            n,
            m,
            reason: "n too large for exhaustive certification",
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mask = low_mask(n);
    for _ in 0..ATTEMPTS {
        let rows: Vec<u64> = (0..m).map(|_| rng.gen::<u64>() & mask).collect();
        if gf2_rank(&rows) == n {
            return LinearCode::from_generator(n, m, rows)?.certified();
        }
    }
    Err(Error::RankDeficient(ATTEMPTS))
}

pub fn encode(code: &LinearCode, input: &[bool]) -> Result<Codeword> {
    code.encode(input)
}
