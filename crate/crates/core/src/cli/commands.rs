use std::fs;
use std::path::PathBuf;

use clap::Args;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::output::{linspace, num, opt_num, Csv};
use super::{CliError, CliResult, Globals};
use crate::chernoff::{asymptotic_error, rescaled_chernoff_zeta};
use crate::codes::{
    gv_rate, map_coherent_to_twophoton_distance, modified_gv_rate, overhead_ratio, Codeword,
};
use crate::decision::{decide, exact_error_probability};
use crate::imperfections::{hypothesis_pair, two_click_probability, SourceParams};
use crate::information::{
    crossover_length, operating_point, ErrorConvention, CLASSICAL_BOUND_CAVEAT,
};
use crate::interference::{visibility, Visibility};
use crate::montecarlo::simulate_batch;

// Fills every unset field of `$args` from the config-file section, if any.
macro_rules! merge_from {
    ($args:ident, $file:ident; $($field:ident),+ $(,)?) => {
        if let Some(file) = $file {
            $(
                if $args.$field.is_none() {
                    $args.$field = file.$field;
                }
            )+
        }
    };
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn check_points(name: &str, points: usize) -> CliResult<()> {
    if points == 0 {
        Err(usage(format!("--{name} must be at least 1")))
    } else {
        Ok(())
    }
}

fn warn_params(p: &SourceParams, label: &str) {
    for w in p.warnings() {
        eprintln!("warning ({label}): {w}");
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundsArgs {
    /// Smallest base-code distance on the grid [default: 0.005]
    #[arg(long)]
    pub delta_start: Option<f64>,
    /// Largest base-code distance on the grid [default: 0.25]
    #[arg(long)]
    pub delta_stop: Option<f64>,
    /// Number of grid points [default: 50]
    #[arg(long)]
    pub points: Option<usize>,
}

impl BoundsArgs {
    pub(crate) fn merged(mut self, file: Option<Self>) -> Self {
        merge_from!(self, file; delta_start, delta_stop, points);
        self
    }
}

pub(crate) fn bounds(a: BoundsArgs, out: &mut Vec<u8>) -> CliResult<()> {
    let start = a.delta_start.unwrap_or(0.005);
    let stop = a.delta_stop.unwrap_or(0.25);
    let points = a.points.unwrap_or(50);
    check_points("points", points)?;
    if !(start > 0.0 && start <= stop && stop <= 0.25) {
        return Err(usage("the grid must satisfy 0 < delta-start <= delta-stop <= 0.25"));
    }
    let mut csv = Csv::new(out, &["delta_coh", "Delta_min", "r_gv", "R_gv", "overhead"])?;
    for delta in linspace(start, stop, points) {
        let big_delta = map_coherent_to_twophoton_distance(delta)?;
        csv.row(&[
            num(delta),
            num(big_delta),
            num(gv_rate(delta)?),
            num(modified_gv_rate(big_delta)?),
            num(overhead_ratio(delta)?),
        ])?;
    }
    Ok(())
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InformationArgs {
    /// Shortest input length [default: 1e2]
    #[arg(long)]
    pub n_min: Option<f64>,
    /// Longest input length [default: 1e12]
    #[arg(long)]
    pub n_max: Option<f64>,
    /// Number of log-spaced lengths [default: 41]
    #[arg(long)]
    pub points: Option<usize>,
    /// Target error probability [default: 1e-6]
    #[arg(long)]
    pub p_err: Option<f64>,
    /// Base-code relative distance [default: 0.2]
    #[arg(long)]
    pub delta_coh: Option<f64>,
    /// conditional-misidentification or average-error [default: conditional-misidentification]
    #[arg(long)]
    pub convention: Option<ErrorConvention>,
}

impl InformationArgs {
    pub(crate) fn merged(mut self, file: Option<Self>) -> Self {
        merge_from!(self, file; n_min, n_max, points, p_err, delta_coh, convention);
        self
    }
}

pub(crate) fn information(a: InformationArgs, out: &mut Vec<u8>) -> CliResult<()> {
    let n_min = a.n_min.unwrap_or(1e2);
    let n_max = a.n_max.unwrap_or(1e12);
    let points = a.points.unwrap_or(41);
    let p_err = a.p_err.unwrap_or(1e-6);
    let delta = a.delta_coh.unwrap_or(0.2);
    let convention = a.convention.unwrap_or_default();
    check_points("points", points)?;
    if !(n_min >= 1.0 && n_min <= n_max && n_max <= 1e15) {
        return Err(usage("the grid must satisfy 1 <= n-min <= n-max <= 1e15"));
    }
    let mut lengths: Vec<u64> = linspace(n_min.log10(), n_max.log10(), points)
        .into_iter()
        .map(|x| 10f64.powf(x).round() as u64)
        .collect();
    lengths.dedup();

    let mut csv = Csv::new(out, &["n", "I_class", "I_S", "I_coh", "ratio_IS_Icoh"])?;
    for n in lengths {
        let op = operating_point(n, p_err, delta, convention)?;
        let i_s = op.two_photon_bits()?;
        let i_coh = op.coherent_bits()?;
        csv.row(&[
            n.to_string(),
            num(op.classical_bits()?),
            num(i_s),
            num(i_coh),
            num(i_s / i_coh),
        ])?;
    }
    csv.comment(&format!("note: {CLASSICAL_BOUND_CAVEAT}"))?;
    let annotation = match crossover_length(p_err, delta, convention) {
        Ok(c) => format!(
            "crossover two_photon={} coherent={}",
            c.two_photon,
            c.coherent.map_or("none".to_string(), |n| n.to_string())
        ),
        Err(crate::Error::NoCrossover(_)) => "crossover two_photon=none coherent=none".to_string(),
        Err(e) => return Err(e.into()),
    };
    csv.comment(&annotation)?;
    Ok(())
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ErrorArgs {
    /// Extended-code relative distance [default: 0.1]
    #[arg(long)]
    pub delta_min: Option<f64>,
    /// Dark counts relative to eta*nbar [default: 0.01]
    #[arg(long)]
    pub dark_ratio: Option<f64>,
    /// Indistinguishability [default: 0.98]
    #[arg(long)]
    pub w: Option<f64>,
    /// Detected photons per party per run, used to report run counts [default: 0.05]
    #[arg(long)]
    pub eta_nbar: Option<f64>,
    /// Smallest (eta*nbar)^2 N [default: 0]
    #[arg(long)]
    pub x_min: Option<f64>,
    /// Largest (eta*nbar)^2 N [default: 500]
    #[arg(long)]
    pub x_max: Option<f64>,
    /// Number of grid points per source [default: 51]
    #[arg(long)]
    pub points: Option<usize>,
}

impl ErrorArgs {
    pub(crate) fn merged(mut self, file: Option<Self>) -> Self {
        merge_from!(self, file; delta_min, dark_ratio, w, eta_nbar, x_min, x_max, points);
        self
    }
}

pub(crate) fn error(a: ErrorArgs, out: &mut Vec<u8>) -> CliResult<()> {
    let delta_min = a.delta_min.unwrap_or(0.1);
    let dark = a.dark_ratio.unwrap_or(0.01);
    let w = a.w.unwrap_or(0.98);
    let eta = a.eta_nbar.unwrap_or(0.05);
    let x_min = a.x_min.unwrap_or(0.0);
    let x_max = a.x_max.unwrap_or(500.0);
    let points = a.points.unwrap_or(51);
    check_points("points", points)?;
    if !(x_min >= 0.0 && x_min <= x_max && x_max.is_finite()) {
        return Err(usage("the grid must satisfy 0 <= x-min <= x-max"));
    }
    if !(eta > 0.0) {
        return Err(usage("--eta-nbar must be positive"));
    }
    let mut csv = Csv::new(
        out,
        &["source", "x", "n_runs", "n2", "p_err_exact", "p_err_asymptotic", "zeta", "inset"],
    )?;
    for (label, g2) in [("single_photon", 0.0), ("poissonian", 1.0)] {
        let p = SourceParams::new(eta, g2, dark, w)?;
        warn_params(&p, label);
        let hp = hypothesis_pair(&p, delta_min)?;
        let zeta = rescaled_chernoff_zeta(&p, delta_min)?;
        for x in linspace(x_min, x_max, points) {
            // N₂ = round(P₂ N) with P₂ N = bracket · x
            let n2 = (p.bracket() * x).round() as u64;
            let exact = exact_error_probability(n2, &hp)?;
            let n_runs = x / (eta * eta);
            let inset = (x > 0.0).then(|| -exact.ln() / x);
            csv.row(&[
                label.to_string(),
                num(x),
                num(n_runs),
                n2.to_string(),
                num(exact),
                num(asymptotic_error(n_runs, eta, zeta)?),
                num(zeta),
                opt_num(inset),
            ])?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChernoffSurfaceArgs {
    /// Indistinguishability [default: 0.98]
    #[arg(long)]
    pub w: Option<f64>,
    /// Smallest dark-count ratio [default: 0]
    #[arg(long)]
    pub dark_min: Option<f64>,
    /// Largest dark-count ratio [default: 0.05]
    #[arg(long)]
    pub dark_max: Option<f64>,
    /// Dark-count grid points [default: 20]
    #[arg(long)]
    pub dark_points: Option<usize>,
    /// Smallest extended-code distance [default: 0.1]
    #[arg(long)]
    pub delta_min_lo: Option<f64>,
    /// Largest extended-code distance [default: 0.25]
    #[arg(long)]
    pub delta_min_hi: Option<f64>,
    /// Distance grid points [default: 20]
    #[arg(long)]
    pub delta_points: Option<usize>,
}

impl ChernoffSurfaceArgs {
    pub(crate) fn merged(mut self, file: Option<Self>) -> Self {
        merge_from!(
            self, file;
            w, dark_min, dark_max, dark_points, delta_min_lo, delta_min_hi, delta_points
        );
        self
    }
}

// ζ does not depend on ηn̄; any small valid value will do.
const NOMINAL_ETA_NBAR: f64 = 0.01;

pub(crate) fn chernoff_surface(a: ChernoffSurfaceArgs, out: &mut Vec<u8>) -> CliResult<()> {
    let w = a.w.unwrap_or(0.98);
    let dark_min = a.dark_min.unwrap_or(0.0);
    let dark_max = a.dark_max.unwrap_or(0.05);
    let dark_points = a.dark_points.unwrap_or(20);
    let lo = a.delta_min_lo.unwrap_or(0.1);
    let hi = a.delta_min_hi.unwrap_or(0.25);
    let delta_points = a.delta_points.unwrap_or(20);
    check_points("dark-points", dark_points)?;
    check_points("delta-points", delta_points)?;
    if !(dark_min >= 0.0 && dark_min <= dark_max && dark_max.is_finite()) {
        return Err(usage("the grid must satisfy 0 <= dark-min <= dark-max"));
    }
    if !(lo >= 0.0 && lo <= hi && hi <= 0.5) {
        return Err(usage("the grid must satisfy 0 <= delta-min-lo <= delta-min-hi <= 0.5"));
    }
    let grid: Vec<(f64, f64)> = linspace(dark_min, dark_max, dark_points)
        .into_iter()
        .flat_map(|d| linspace(lo, hi, delta_points).into_iter().map(move |x| (d, x)))
        .collect();
    let rows = grid
        .par_iter()
        .map(|&(dark, delta)| -> crate::Result<[f64; 4]> {
            let single = SourceParams::new(NOMINAL_ETA_NBAR, 0.0, dark, w)?;
            let poisson = SourceParams::new(NOMINAL_ETA_NBAR, 1.0, dark, w)?;
            let zs = rescaled_chernoff_zeta(&single, delta)?;
            let zp = rescaled_chernoff_zeta(&poisson, delta)?;
            Ok([dark, delta, zs, zp])
        })
        .collect::<crate::Result<Vec<_>>>()?;
    let mut csv = Csv::new(out, &["dark_ratio", "Delta_min", "zeta_s", "zeta_p", "ratio"])?;
    for [dark, delta, zs, zp] in rows {
        let ratio = (zp > 0.0).then(|| zs / zp);
        csv.row(&[num(dark), num(delta), num(zs), num(zp), opt_num(ratio)])?;
    }
    Ok(())
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateArgs {
    /// Detected photons per party per run [default: 0.05]
    #[arg(long)]
    pub eta_nbar: Option<f64>,
    /// Second-order correlation [default: 0]
    #[arg(long)]
    pub g2: Option<f64>,
    /// Dark counts relative to eta*nbar [default: 0.01]
    #[arg(long)]
    pub dark_ratio: Option<f64>,
    /// Indistinguishability [default: 0.98]
    #[arg(long)]
    pub w: Option<f64>,
    /// Alice's codeword as a 0/1 string
    #[arg(long, requires = "code_b")]
    pub code_a: Option<String>,
    /// Bob's codeword as a 0/1 string
    #[arg(long, requires = "code_a")]
    pub code_b: Option<String>,
    /// Visibility, instead of codewords
    #[arg(long, conflicts_with_all = ["code_a", "code_b"])]
    pub v: Option<f64>,
    /// Extended-code distance for the decision; also sets v = 1 - 2*Delta_min
    /// when neither codewords nor --v are given [default: 0.1]
    #[arg(long)]
    pub delta_min: Option<f64>,
    /// Number of runs; scientific notation accepted [default: 1e7]
    #[arg(long)]
    pub runs: Option<f64>,
    /// Write the batch record as JSON to this path
    #[arg(long, value_name = "PATH")]
    pub json_out: Option<PathBuf>,
    /// |z| above which a comparison raises an alarm [default: 4]
    #[arg(long)]
    pub z_alarm: Option<f64>,
}

impl SimulateArgs {
    pub(crate) fn merged(mut self, file: Option<Self>) -> Self {
        merge_from!(
            self, file;
            eta_nbar, g2, dark_ratio, w, code_a, code_b, v, delta_min, runs, json_out, z_alarm
        );
        self
    }
}

#[derive(Serialize)]
struct BatchRecord<'a> {
    params: &'a SourceParams,
    v: f64,
    n_runs: u64,
    seed: u64,
    tally: &'a crate::montecarlo::EventTally,
}

/// `(observed − expected) / σ`, with `σ` the binomial standard error.
fn z_score(observed: f64, expected: f64, trials: u64) -> f64 {
    let se = (expected * (1.0 - expected) / trials as f64).sqrt();
    let diff = observed - expected;
    if se > 0.0 {
        diff / se
    } else if diff == 0.0 {
        0.0
    } else {
        diff.signum() * f64::INFINITY
    }
}

pub(crate) fn simulate(a: SimulateArgs, g: &Globals, out: &mut Vec<u8>) -> CliResult<()> {
    let p = SourceParams::new(
        a.eta_nbar.unwrap_or(0.05),
        a.g2.unwrap_or(0.0),
        a.dark_ratio.unwrap_or(0.01),
        a.w.unwrap_or(0.98),
    )?;
    warn_params(&p, "simulate");
    let delta_min = a.delta_min.unwrap_or(0.1);
    let runs = a.runs.unwrap_or(1e7);
    if !(runs >= 1.0 && runs.fract() == 0.0 && runs <= 9.007_199_254_740_992e15) {
        return Err(usage("--runs must be a positive integer"));
    }
    let runs = runs as u64;
    let z_alarm = a.z_alarm.unwrap_or(4.0);
    let v = match (&a.code_a, &a.code_b, a.v) {
        (Some(x), Some(y), None) => {
            let x: Codeword = x.parse().map_err(|e: crate::Error| usage(e.to_string()))?;
            let y: Codeword = y.parse().map_err(|e: crate::Error| usage(e.to_string()))?;
            visibility(&x, &y)?
        }
        (None, None, Some(v)) => Visibility::new(v)?,
        (None, None, None) => Visibility::from_relative_distance(delta_min)?,
        _ => return Err(usage("give both codewords, or --v, but not both")),
    };

    let tally = simulate_batch(&p, v, runs, g.seed)?;
    let hp = hypothesis_pair(&p, delta_min)?;
    let outcome = decide(tally.n_coincidence, tally.n_two_click, &hp)?;

    let q_model = crate::imperfections::coincidence_fraction(&p, v);
    let rate_model = two_click_probability(&p)?;
    let q_obs = tally.coincidence_fraction();
    let rate_obs = tally.n_two_click as f64 / runs as f64;
    let z_q = q_obs.map(|q| z_score(q, q_model, tally.n_two_click));
    let z_rate = z_score(rate_obs, rate_model, runs);

    let mut csv = Csv::new(
        out,
        &[
            "n_runs",
            "seed",
            "v",
            "n_coincidence",
            "n_double",
            "n_two_click",
            "q_empirical",
            "q_model",
            "z_q",
            "rate_empirical",
            "rate_model",
            "z_rate",
            "decision",
        ],
    )?;
    csv.row(&[
        runs.to_string(),
        g.seed.to_string(),
        num(v.value()),
        tally.n_coincidence.to_string(),
        tally.n_double.to_string(),
        tally.n_two_click.to_string(),
        opt_num(q_obs),
        num(q_model),
        opt_num(z_q),
        num(rate_obs),
        num(rate_model),
        num(z_rate),
        outcome.decision.to_string(),
    ])?;

    if let Some(path) = &a.json_out {
        let record = BatchRecord {
            params: &p,
            v: v.value(),
            n_runs: runs,
            seed: g.seed,
            tally: &tally,
        };
        let mut text = serde_json::to_string_pretty(&record)
            .map_err(|e| CliError::Domain(format!("cannot encode batch record: {e}")))?;
        text.push('\n');
        fs::write(path, text)?;
    }

    // The two-click rate formula is leading order in ηn̄, so its comparison
    // allows a relative model error of 2ηn̄ on top of the statistical band.
    let mut alarms = Vec::new();
    if let Some(z) = z_q.filter(|z| z.abs() > z_alarm) {
        alarms.push(format!("coincidence fraction off by z = {z:.2}"));
    }
    let rate_band = z_alarm * (rate_model * (1.0 - rate_model) / runs as f64).sqrt()
        + 2.0 * p.eta_nbar * rate_model;
    if (rate_obs - rate_model).abs() > rate_band {
        alarms.push(format!("two-click rate off by z = {z_rate:.2}"));
    }
    if alarms.is_empty() {
        return Ok(());
    }
    let msg = alarms.join("; ");
    if g.strict {
        Err(CliError::Alarm(msg))
    } else {
        eprintln!("warning: {msg}");
        Ok(())
    }
}
