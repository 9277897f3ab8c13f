//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Runs without the libtest harness so that every criterion is reported even
//! when an earlier one fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use hom_fingerprint::chernoff::exact_rescaled_chernoff;
use hom_fingerprint::codes::pad_length;
use hom_fingerprint::decision::ln_exact_error_probability;
use hom_fingerprint::special::ln_binom_pmf;
use hom_fingerprint::*;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 })
        .collect()
}

fn ln_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

fn device(eta: f64, g2: f64) -> SourceParams {
    SourceParams::new(eta, g2, 0.01, 0.98).unwrap()
}

// ---------------------------------------------------------------- 1

fn overhead() -> Verdict {
    let at = overhead_ratio(0.25).unwrap();
    let grid = linspace(1e-4, 0.25, 2000);
    let values: Vec<f64> = grid.iter().map(|&d| overhead_ratio(d).unwrap()).collect();
    let monotone = values.windows(2).all(|w| w[1] >= w[0]);
    verdict(
        (5.0..=5.2).contains(&at) && monotone,
        format!("overhead(0.25) = {at:.6}, nondecreasing on 2000 points: {monotone}"),
    )
}

// ---------------------------------------------------------------- 2

fn distance_mapping() -> Verdict {
    let mut worst = 0.0f64;
    for d in linspace(0.0, 0.34, 100) {
        let big = map_coherent_to_twophoton_distance(d).unwrap();
        let coh = misid_probability_coherent(50.0, d).unwrap();
        let two = misid_probability_twophoton(50, big).unwrap();
        worst = worst.max((coh - two).abs() / coh);
    }
    verdict(worst < 1e-10, format!("max relative mismatch {worst:.3e} over 100 points"))
}

// ---------------------------------------------------------------- 3

fn crossover() -> Verdict {
    let c = crossover_length(1e-6, 0.2, ErrorConvention::default()).unwrap();
    let n = c.two_photon as f64;
    let in_band = n >= 10f64.powf(5.5) && n <= 10f64.powf(6.5);
    let op = operating_point(10_000_000_000, 1e-6, 0.2, ErrorConvention::default()).unwrap();
    let ratio = op.two_photon_bits().unwrap() / op.coherent_bits().unwrap();
    verdict(
        in_band && (0.8..=1.25).contains(&ratio),
        format!(
            "two-photon crossover n = {} (coherent {:?}), I_S/I_coh at 1e10 = {ratio:.4}",
            c.two_photon, c.coherent
        ),
    )
}

// ---------------------------------------------------------------- 4

const ETA: f64 = 0.05;
const DELTA_MIN: f64 = 0.1;

struct ErrorCurve {
    zeta: f64,
    // (x, ln P_err exact, ln P_err asymptotic)
    points: Vec<(f64, f64, f64)>,
}

fn error_curve(g2: f64, xs: &[f64]) -> ErrorCurve {
    let p = device(ETA, g2);
    let hp = hypothesis_pair(&p, DELTA_MIN).unwrap();
    let zeta = rescaled_chernoff_zeta(&p, DELTA_MIN).unwrap();
    let points = xs
        .iter()
        .map(|&x| {
            let n2 = (p.bracket() * x).round() as u64;
            let exact = ln_exact_error_probability(n2, hp.q_d, hp.q_e).unwrap();
            let asym = asymptotic_error(x / (ETA * ETA), ETA, zeta).unwrap().ln();
            (x, exact, asym)
        })
        .collect();
    ErrorCurve { zeta, points }
}

fn exact_vs_asymptotic() -> Verdict {
    let xs = linspace(1.0, 500.0, 50);
    let single = error_curve(0.0, &xs);
    let poisson = error_curve(1.0, &xs);
    let below = single
        .points
        .iter()
        .chain(&poisson.points)
        .all(|&(_, exact, asym)| exact <= asym);
    let ordered = single
        .points
        .iter()
        .zip(&poisson.points)
        .all(|(s, p)| s.1 < p.1);
    let inset = |c: &ErrorCurve| {
        let &(x, ln_p, _) = c.points.last().unwrap();
        -ln_p / x / c.zeta
    };
    let (rs, rp) = (inset(&single), inset(&poisson));
    let converged = (rs - 1.0).abs() <= 0.1 && (rp - 1.0).abs() <= 0.1;
    let mut detail = format!(
        "exact <= asymptotic: {below}; single < poissonian: {ordered}; \
         inset/zeta at x=500: single {rs:.4}, poissonian {rp:.4} (need within 10%)"
    );
    // the sublinear prefactor decays like ln(x)/x; show where it gets there
    let far: Vec<String> = [5e3, 5e4, 5e5]
        .iter()
        .map(|&x| {
            let s = error_curve(0.0, &[x]);
            let p = error_curve(1.0, &[x]);
            format!(
                "x={x:.0e}: {:.4}/{:.4}",
                -s.points[0].1 / x / s.zeta,
                -p.points[0].1 / x / p.zeta
            )
        })
        .collect();
    detail.push_str(&format!("; beyond grid {}", far.join(", ")));
    verdict(below && ordered && converged, detail)
}

// ---------------------------------------------------------------- 5

fn zeta_surfaces() -> Verdict {
    let darks = linspace(0.0, 0.05, 20);
    let deltas = linspace(0.1, 0.25, 20);
    let mut all_above = true;
    let mut best = (f64::NEG_INFINITY, 0usize, 0usize);
    for (i, &d) in darks.iter().enumerate() {
        for (j, &delta) in deltas.iter().enumerate() {
            let zs = rescaled_chernoff_zeta(&SourceParams::new(0.01, 0.0, d, 0.98).unwrap(), delta)
                .unwrap();
            let zp = rescaled_chernoff_zeta(&SourceParams::new(0.01, 1.0, d, 0.98).unwrap(), delta)
                .unwrap();
            all_above &= zs > zp;
            if zs / zp > best.0 {
                best = (zs / zp, i, j);
            }
        }
    }
    verdict(
        all_above && best.1 == 0 && best.2 == 0,
        format!(
            "zeta_S > zeta_P on all 400 points: {all_above}; max ratio {:.4} at dark index {}, Delta index {}",
            best.0, best.1, best.2
        ),
    )
}

// ---------------------------------------------------------------- 6

fn monte_carlo() -> Verdict {
    let v = Visibility::new(0.8).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for g2 in [0.0, 1.0] {
        let p = device(0.05, g2);
        let t = simulate_batch(&p, v, 10_000_000, 20_240_601).unwrap();
        let q_model = coincidence_fraction(&p, v);
        let n2 = t.n_two_click as f64;
        let q_se = (q_model * (1.0 - q_model) / n2).sqrt();
        let z_q = (t.coincidence_fraction().unwrap() - q_model) / q_se;
        let p2 = two_click_probability(&p).unwrap();
        let rate_dev = (t.two_click_rate().unwrap() - p2).abs();
        let rate_tol = 4.0 * (p2 * (1.0 - p2) / t.n_runs as f64).sqrt() + 2.0 * 0.05 * p2;
        ok &= z_q.abs() <= 4.0 && rate_dev <= rate_tol;
        parts.push(format!(
            "g2={g2}: z_Q = {z_q:+.2}, rate deviation {:.2} of tolerance",
            rate_dev / rate_tol
        ));
    }

    // The correction to Q is O(ηn̄) and only resolvable for the Poissonian
    // source; runs scale as 1/(ηn̄)² so every point sees about 2e5 pairs.
    let p_at = |eta: f64| device(eta, 1.0);
    let mut gaps = Vec::new();
    for (eta, seed) in [(0.1, 11u64), (0.05, 12), (0.02, 13)] {
        let runs = (1e7 * (0.1 / eta) * (0.1 / eta)) as u64;
        let t = simulate_batch(&p_at(eta), v, runs, seed).unwrap();
        let q = t.coincidence_fraction().unwrap();
        let q_model = coincidence_fraction(&p_at(eta), v);
        let se = (q_model * (1.0 - q_model) / t.n_two_click as f64).sqrt();
        gaps.push((eta, (q - q_model).abs(), se));
    }
    let (g_hi, se_hi) = (gaps[0].1, gaps[0].2);
    let (g_lo, se_lo) = (gaps[2].1, gaps[2].2);
    // require the drop to exceed three combined standard errors
    let shrinks = g_hi - g_lo > 3.0 * (se_hi * se_hi + se_lo * se_lo).sqrt();
    ok &= shrinks;
    parts.push(format!(
        "Q gap (g2=1) {}",
        gaps.iter()
            .map(|(e, g, s)| format!("eta {e}: {g:.5}±{s:.5}"))
            .collect::<Vec<_>>()
            .join(", ")
    ));
    verdict(ok, parts.join("; "))
}

// ---------------------------------------------------------------- 7

fn random_pairs(n: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let q_e = rng.gen_range(0.001..0.45);
            let q_d = rng.gen_range(q_e + 0.005..0.5);
            (q_d, q_e)
        })
        .collect()
}

/// `ln ½ Σ_k min(p_D(k), p_E(k))`, walking outward from the largest term.
///
/// Each term is unimodal in `k` (both pmfs are, and their ratio is
/// monotone), so once a term falls below `e^{-60}` of the peak every
/// remaining one on that side does too; their total is under
/// `N₂ e^{-60}` of the sum.
fn oracle_ln_error(n2: u64, q_d: f64, q_e: f64, truncate: bool) -> f64 {
    let term = |k: u64| ln_binom_pmf(k, n2, q_d).min(ln_binom_pmf(k, n2, q_e));
    if !truncate {
        let all: Vec<f64> = (0..=n2).map(term).collect();
        return ln_sum_exp(&all) - std::f64::consts::LN_2;
    }
    // the peak sits where the pmfs cross; bisect on which one is smaller
    let (mut lo, mut hi) = (0u64, n2);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if ln_binom_pmf(mid, n2, q_d) < ln_binom_pmf(mid, n2, q_e) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let peak = term(lo).max(term(hi));
    let mut terms = vec![term(lo)];
    if hi != lo {
        terms.push(term(hi));
    }
    let cut = peak - 60.0;
    let mut k = lo;
    while k > 0 {
        k -= 1;
        let t = term(k);
        terms.push(t);
        if t < cut {
            break;
        }
    }
    let mut k = hi;
    while k < n2 {
        k += 1;
        let t = term(k);
        terms.push(t);
        if t < cut {
            break;
        }
    }
    ln_sum_exp(&terms) - std::f64::consts::LN_2
}

fn decision_optimality() -> Verdict {
    let pairs = random_pairs(20, 7);
    let mut worst = 0.0f64;
    let mut truncation = 0.0f64;
    for &(q_d, q_e) in &pairs {
        for n2 in 1..=10_000u64 {
            let got = ln_exact_error_probability(n2, q_d, q_e).unwrap();
            let want = oracle_ln_error(n2, q_d, q_e, true);
            // relative error of P equals absolute error of ln P to first order
            worst = worst.max((got - want).abs());
            if n2 <= 200 || n2 % 2500 == 0 {
                truncation = truncation.max((want - oracle_ln_error(n2, q_d, q_e, false)).abs());
            }
        }
    }
    let equivalent = worst < 1e-12 && truncation < 1e-14;

    // every deterministic rule assigns a verdict to each count
    let mut beaten = 0usize;
    for &(q_d, q_e) in &pairs {
        let hp = HypothesisPair::new(q_d, q_e, 0.01).unwrap();
        for n2 in 1..=12u64 {
            let pd: Vec<f64> = (0..=n2).map(|k| ln_binom_pmf(k, n2, q_d).exp()).collect();
            let pe: Vec<f64> = (0..=n2).map(|k| ln_binom_pmf(k, n2, q_e).exp()).collect();
            let err_of = |says_d: &dyn Fn(usize) -> bool| -> f64 {
                0.5 * (0..=n2 as usize)
                    .map(|k| if says_d(k) { pe[k] } else { pd[k] })
                    .sum::<f64>()
            };
            let ours = err_of(&|k| {
                decide(k as u64, n2, &hp).unwrap().decision == Decision::Different
            });
            let best = (0u32..1 << (n2 + 1))
                .map(|rule| err_of(&|k| rule >> k & 1 == 1))
                .fold(f64::INFINITY, f64::min);
            if best < ours * (1.0 - 1e-12) {
                beaten += 1;
            }
        }
    }
    verdict(
        equivalent && beaten == 0,
        format!(
            "20 pairs x N2 <= 1e4: max |ln P - ln P_oracle| = {worst:.2e} \
             (truncation check {truncation:.1e}); rules beating decide at N2 <= 12: {beaten}"
        ),
    )
}

// ---------------------------------------------------------------- 8

fn chernoff_checks() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let p: f64 = rng.gen_range(0.001..0.999);
        let q: f64 = rng.gen_range(0.001..0.999);
        let got = chernoff_information(&[p, 1.0 - p], &[q, 1.0 - q]).unwrap().c;
        let grid = (0..=1_000_000u32)
            .map(|i| {
                let a = i as f64 / 1e6;
                -(p.powf(a) * q.powf(1.0 - a) + (1.0 - p).powf(a) * (1.0 - q).powf(1.0 - a)).ln()
            })
            .fold(f64::NEG_INFINITY, f64::max);
        worst = worst.max((got - grid).abs());
    }

    let mut runner = TestRunner::new(Config {
        cases: 500,
        failure_persistence: None,
        ..Config::default()
    });
    let strategy = (prop::collection::vec(0.01f64..1.0, 2..6), 0usize..6, 0.0f64..0.5);
    let zero_iff_equal = runner
        .run(&strategy, |(raw, at, shift)| {
            let total: f64 = raw.iter().sum();
            let p: Vec<f64> = raw.iter().map(|x| x / total).collect();
            prop_assert_eq!(chernoff_information(&p, &p).unwrap().c, 0.0);
            // move mass between two outcomes to get a different distribution
            let i = at % p.len();
            let j = (i + 1) % p.len();
            let moved = shift * p[i];
            prop_assume!(moved > 1e-6);
            let mut q = p.clone();
            q[i] -= moved;
            q[j] += moved;
            prop_assert!(chernoff_information(&p, &q).unwrap().c > 0.0);
            Ok(())
        })
        .is_ok();

    // |C − (ηn̄)²ζ| against (ηn̄)⁴: fit K on the grid, then check the bound
    let etas: Vec<f64> = (0..25).map(|i| 10f64.powf(-3.0 + 2.0 * i as f64 / 24.0)).collect();
    let mut fits = Vec::new();
    let mut scaling_holds = true;
    for (g2, delta) in [(0.0, 0.1), (1.0, 0.1), (0.0, 0.25), (1.0, 0.25)] {
        let pts: Vec<(f64, f64)> = etas
            .iter()
            .map(|&e| {
                let p = device(e, g2);
                let zeta = rescaled_chernoff_zeta(&p, delta).unwrap();
                let c = exact_rescaled_chernoff(&p, delta).unwrap() * e * e;
                (e.powi(4), (c - e * e * zeta).abs())
            })
            .collect();
        let k = pts.iter().map(|(x, y)| x * y).sum::<f64>() / pts.iter().map(|(x, _)| x * x).sum::<f64>();
        let spread = pts
            .iter()
            .map(|(x, y)| y / (k * x))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), r| (a.min(r), b.max(r)));
        scaling_holds &= pts.iter().all(|(x, y)| *y <= 1.05 * k * x) && spread.0 > 0.95;
        fits.push(format!("K={k:.3e} ({:.3}..{:.3})", spread.0, spread.1));
    }
    verdict(
        worst < 1e-9 && zero_iff_equal && scaling_holds,
        format!(
            "ternary vs 1e6-point grid max |dC| = {worst:.2e}; C = 0 iff equal: {zero_iff_equal}; \
             linearization fits {}",
            fits.join(", ")
        ),
    )
}

// ---------------------------------------------------------------- 9

fn brute_min_distance(code: &LinearCode) -> u32 {
    // row-wise GF(2) products, nothing shared with the library's Gray walk
    (1u64..1 << code.n())
        .map(|x| {
            code.generator()
                .iter()
                .map(|row| (row & x).count_ones() & 1)
                .sum::<u32>()
        })
        .min()
        .unwrap()
}

fn code_machinery() -> Verdict {
    let mut certified_ok = 0usize;
    let mut checked = 0usize;
    let mut sandwich_ok = true;
    let mut worst_margin = f64::INFINITY;
    for n in 2..=12usize {
        for m in [n + 3, 2 * n + 1, 3 * n + 2] {
            for seed in 0..3u64 {
                let code = generate_random_linear_code(n, m, seed).unwrap();
                checked += 1;
                if code.certified_min_distance() == Some(brute_min_distance(&code)) {
                    certified_ok += 1;
                }
                let d = code.certified_min_distance().unwrap() as f64 / m as f64;
                if !(d > 0.0 && d < 0.5) {
                    continue;
                }
                let big = DistanceProfile::from_base(d).unwrap().extended_delta_min;
                let ext: Vec<u128> = code
                    .codewords()
                    .map(|c| {
                        let e = extend_codeword(&c, d).unwrap();
                        e.bits().iter().fold(0u128, |acc, &b| acc << 1 | b as u128)
                    })
                    .collect();
                let big_m = (m + pad_length(m, d).unwrap()) as f64;
                let slack = 1.0 / big_m;
                for i in 0..ext.len() {
                    for j in i + 1..ext.len() {
                        let rel = (ext[i] ^ ext[j]).count_ones() as f64 / big_m;
                        let margin = (rel - (big - slack)).min((1.0 - big + slack) - rel);
                        worst_margin = worst_margin.min(margin);
                        sandwich_ok &= margin >= -1e-12;
                    }
                }
            }
        }
    }
    verdict(
        certified_ok == checked && sandwich_ok,
        format!(
            "certified = brute force on {certified_ok}/{checked} codes; \
             extended distances inside [Delta-1/M, 1-Delta+1/M], least margin {worst_margin:.4}"
        ),
    )
}

type Check = fn() -> Verdict;

fn main() -> ExitCode {
    let criteria: [(u32, Duration, Check); 9] = [
        (1, Duration::from_secs(1), overhead),
        (2, Duration::from_secs(1), distance_mapping),
        (3, Duration::from_secs(10), crossover),
        (4, Duration::from_secs(30), exact_vs_asymptotic),
        (5, Duration::from_secs(10), zeta_surfaces),
        (6, Duration::from_secs(120), monte_carlo),
        (7, Duration::from_secs(60), decision_optimality),
        (8, Duration::from_secs(60), chernoff_checks),
        (9, Duration::from_secs(60), code_machinery),
    ];
    let mut failed = 0;
    for (id, budget, check) in criteria {
        let start = Instant::now();
        let v = check();
        let took = start.elapsed();
        let pass = v.pass && took <= budget;
        failed += usize::from(!pass);
        println!(
            "criterion {id}: {} [{:.2}s of {}s] {}",
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            budget.as_secs(),
            v.detail
        );
    }
    println!("acceptance: {} of 9 criteria pass", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
