//! Run-by-run simulation of the imperfect protocol.
//!
//! Each run draws how many photons each party delivers, routes them through
//! the beam splitter, adds dark counts and classifies the detector record.
//! Batches are split into blocks of [`BLOCK_RUNS`] runs; block `i` draws from
//! a ChaCha8 generator seeded with `seed` on stream `i`, so a tally depends on
//! the seed and run count only, never on how blocks land on threads.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codes::Codeword;
use crate::decision::{decide, TestOutcome};
use crate::error::{domain, Result};
use crate::imperfections::{hypothesis_pair, SourceParams};
use crate::interference::{single_source_pair_split, visibility, Visibility};

/// Runs per independently seeded block.
pub const BLOCK_RUNS: u64 = 1 << 16;

// Poisson inversion stops here; the remaining mass is far below 2^-53 for any
// mean that passes parameter validation.
const POISSON_MAX: u32 = 1_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    NoTwoClick,
    Coincidence,
    DoubleA,
    DoubleB,
}

impl Classification {
    pub fn of(clicks_a: u32, clicks_b: u32) -> Self {
        match (clicks_a, clicks_b) {
            (a, b) if a >= 1 && b >= 1 => Classification::Coincidence,
            (a, 0) if a >= 2 => Classification::DoubleA,
            (0, b) if b >= 2 => Classification::DoubleB,
            _ => Classification::NoTwoClick,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub clicks_a: u32,
    pub clicks_b: u32,
    pub classification: Classification,
}

impl RunOutcome {
    fn new(clicks_a: u32, clicks_b: u32) -> Self {
        Self {
            clicks_a,
            clicks_b,
            classification: Classification::of(clicks_a, clicks_b),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventTally {
    pub n_runs: u64,
    pub n_coincidence: u64,
    pub n_double: u64,
    pub n_two_click: u64,
}

impl EventTally {
    pub fn record(&mut self, outcome: &RunOutcome) {
        self.n_runs += 1;
        match outcome.classification {
            Classification::Coincidence => {
                self.n_coincidence += 1;
                self.n_two_click += 1;
            }
            Classification::DoubleA | Classification::DoubleB => {
                self.n_double += 1;
                self.n_two_click += 1;
            }
            Classification::NoTwoClick => {}
        }
    }

    pub fn merge(self, other: Self) -> Self {
        Self {
            n_runs: self.n_runs + other.n_runs,
            n_coincidence: self.n_coincidence + other.n_coincidence,
            n_double: self.n_double + other.n_double,
            n_two_click: self.n_two_click + other.n_two_click,
        }
    }

    /// Observed `N_c / N₂`, or `None` without two-click events.
    pub fn coincidence_fraction(&self) -> Option<f64> {
        (self.n_two_click > 0).then(|| self.n_coincidence as f64 / self.n_two_click as f64)
    }

    pub fn two_click_rate(&self) -> Option<f64> {
        (self.n_runs > 0).then(|| self.n_two_click as f64 / self.n_runs as f64)
    }
}

fn uniform<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.gen::<f64>()
}

fn coin<R: Rng + ?Sized>(rng: &mut R) -> bool {
    uniform(rng) < 0.5
}

fn emitted<R: Rng + ?Sized>(p: &SourceParams, rng: &mut R) -> u8 {
    let one = p.eta_nbar;
    let two = 0.5 * p.eta_nbar * p.eta_nbar * p.g2;
    let u = uniform(rng);
    if u < one {
        1
    } else if u < one + two {
        2
    } else {
        0
    }
}

fn poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u32 {
    let u = uniform(rng);
    let mut term = (-mean).exp();
    let mut cdf = term;
    let mut k = 0;
    while u >= cdf && k < POISSON_MAX {
        k += 1;
        term *= mean / k as f64;
        cdf += term;
    }
    k
}

// Two photons from one source in one mode: both to a, both to b, or split.
fn route_same_source<R: Rng + ?Sized>(rng: &mut R) -> (u32, u32) {
    let split = single_source_pair_split();
    let u = uniform(rng);
    if u < split.p_both_a {
        (2, 0)
    } else if u < split.p_both_a + split.p_both_b {
        (0, 2)
    } else {
        (1, 1)
    }
}

fn route_single<R: Rng + ?Sized>(rng: &mut R) -> (u32, u32) {
    if coin(rng) {
        (1, 0)
    } else {
        (0, 1)
    }
}

/// Detector counts produced by `k_a` photons from Alice and `k_b` from Bob,
/// before dark counts.
///
/// One photon from each side interferes with probability `w` and then gives
/// a coincidence with probability `(1 − v²)/2`, otherwise both leave through
/// one port; a distinguishable pair splits independently. With three or more
/// photons nothing interferes and each party's photons are routed alone.
pub fn route_photons<R: Rng + ?Sized>(k_a: u8, k_b: u8, w: f64, v: Visibility, rng: &mut R) -> (u32, u32) {
    let per_source = |k: u8, rng: &mut R| match k {
        0 => (0, 0),
        1 => route_single(rng),
        _ => route_same_source(rng),
    };
    match (k_a, k_b) {
        (1, 1) => {
            if uniform(rng) < w {
                let v = v.value();
                if uniform(rng) < 0.5 * (1.0 - v) * (1.0 + v) {
                    (1, 1)
                } else if coin(rng) {
                    (2, 0)
                } else {
                    (0, 2)
                }
            } else {
                let (a1, b1) = route_single(rng);
                let (a2, b2) = route_single(rng);
                (a1 + a2, b1 + b2)
            }
        }
        _ => {
            let (a1, b1) = per_source(k_a, rng);
            let (a2, b2) = per_source(k_b, rng);
            (a1 + a2, b1 + b2)
        }
    }
}

/// One protocol run.
pub fn simulate_run<R: Rng + ?Sized>(p: &SourceParams, v: Visibility, rng: &mut R) -> RunOutcome {
    let k_a = emitted(p, rng);
    let k_b = emitted(p, rng);
    let (a, b) = route_photons(k_a, k_b, p.w, v, rng);
    let dark = p.dark_mean();
    let dark_a = poisson(dark, rng);
    let dark_b = poisson(dark, rng);
    RunOutcome::new(a + dark_a, b + dark_b)
}

/// The generator for block `block` of a batch seeded with `seed`.
pub fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

/// Tally of `n_runs` independent runs, deterministic in `(seed, n_runs, p, v)`.
pub fn simulate_batch(p: &SourceParams, v: Visibility, n_runs: u64, seed: u64) -> Result<EventTally> {
    if n_runs == 0 {
        return Err(domain("n_runs", 0.0, "must be at least 1"));
    }
    let p = SourceParams::new(p.eta_nbar, p.g2, p.dark_ratio, p.w)?;
    let blocks = n_runs.div_ceil(BLOCK_RUNS);
    let tally = (0..blocks)
        .into_par_iter()
        .map(|block| {
            let mut rng = block_rng(seed, block);
            let runs = BLOCK_RUNS.min(n_runs - block * BLOCK_RUNS);
            let mut t = EventTally::default();
            for _ in 0..runs {
                t.record(&simulate_run(&p, v, &mut rng));
            }
            t
        })
        .reduce(EventTally::default, EventTally::merge);
    Ok(tally)
}

/// Encodes, simulates and decides: the referee's verdict on one protocol
/// execution of `n_runs` runs, testing against the worst-case hypothesis
/// pair for an extended code of relative distance `extended_delta_min`.
pub fn simulate_protocol(
    code_a: &Codeword,
    code_b: &Codeword,
    p: &SourceParams,
    extended_delta_min: f64,
    n_runs: u64,
    seed: u64,
) -> Result<TestOutcome> {
    let v = visibility(code_a, code_b)?;
    let hp = hypothesis_pair(p, extended_delta_min)?;
    let tally = simulate_batch(p, v, n_runs, seed)?;
    decide(tally.n_coincidence, tally.n_two_click, &hp)
}
