//! Log-space numerics for binomial distributions.
//!
//! Binomial probabilities use Loader's saddle-point form (Stirling-series
//! remainders plus the deviance `bd0`), which keeps full relative precision
//! far into the tails where a naive `lgamma` difference cancels. Tail sums
//! are accumulated in log space; above [`DIRECT_SUM_MAX`] trials they switch
//! to the regularized incomplete beta function, evaluated by a continued
//! fraction.

use std::f64::consts::LN_2;

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Largest trial count for which binomial tails are summed term by term.
pub const DIRECT_SUM_MAX: u64 = 10_000;

// Stirling remainder ln(n!) - [(n + 1/2) ln n - n + ln sqrt(2 pi)] at n = 0, 1/2, 1, ..., 15.
#[allow(clippy::excessive_precision)]
const SFERR_HALVES: [f64; 31] = [
    0.0, // n = 0: unused
    0.153_426_409_720_027_345_291_384_8,
    0.081_061_466_795_327_258_219_670_2,
    0.054_814_121_051_917_653_896_139_0,
    0.041_340_695_955_409_294_093_822_1,
    0.033_162_873_519_936_287_485_110_48,
    0.027_677_925_684_998_339_148_789_29,
    0.023_746_163_656_297_495_971_329_20,
    0.020_790_672_103_765_093_111_522_77,
    0.018_488_450_532_673_185_230_779_34,
    0.016_644_691_189_821_192_163_194_87,
    0.015_134_973_221_917_378_873_512_55,
    0.013_876_128_823_070_747_998_745_73,
    0.012_810_465_242_920_226_924_249_86,
    0.011_896_709_945_891_770_095_055_72,
    0.011_104_559_758_206_917_326_629_91,
    0.010_411_265_261_972_096_497_478_567,
    0.009_799_416_126_158_803_298_389_475,
    0.009_255_462_182_712_732_917_728_637,
    0.008_768_700_134_139_385_462_952_823,
    0.008_330_563_433_362_871_256_469_318,
    0.007_934_114_564_314_020_547_248_100,
    0.007_573_675_487_951_840_794_972_024,
    0.007_244_554_301_320_383_179_543_912,
    0.006_942_840_107_209_529_865_664_152,
    0.006_665_247_032_707_682_442_354_394,
    0.006_408_994_188_004_207_068_439_631,
    0.006_171_712_263_039_457_647_532_867,
    0.005_951_370_112_758_847_735_624_416,
    0.005_746_216_513_010_115_682_023_589,
    0.005_554_733_551_962_801_371_038_690,
];

/// Stirling-series remainder of `ln(n!)` for integer `n`.
pub fn stirlerr(n: u64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;

    if n <= 15 {
        return SFERR_HALVES[(2 * n) as usize];
    }
    let n = n as f64;
    let nn = n * n;
    if n > 500.0 {
        (S0 - S1 / nn) / n
    } else if n > 80.0 {
        (S0 - (S1 - S2 / nn) / nn) / n
    } else if n > 35.0 {
        (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / n
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n
    }
}

/// Deviance term `x ln(x/np) + np - x`, computed without cancellation.
pub fn bd0(x: f64, np: f64) -> f64 {
    if (x - np).abs() < 0.1 * (x + np) {
        let d = x - np;
        let mut v = d / (x + np);
        let mut s = d * v;
        let mut ej = 2.0 * x * v;
        v *= v;
        for j in 1..1000 {
            ej *= v;
            let s1 = s + ej / (2 * j + 1) as f64;
            if s1 == s {
                return s1;
            }
            s = s1;
        }
        return s;
    }
    x * (x / np).ln() + np - x
}

/// `ln P(X = x)` for `X ~ Binomial(n, p)`; `-inf` when the outcome is impossible.
///
/// Callers guarantee `x <= n` and `0 <= p <= 1`.
pub fn ln_binom_pmf(x: u64, n: u64, p: f64) -> f64 {
    debug_assert!(x <= n && (0.0..=1.0).contains(&p));
    let q = 1.0 - p;
    if p == 0.0 {
        return if x == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if q == 0.0 {
        return if x == n { 0.0 } else { f64::NEG_INFINITY };
    }
    let nf = n as f64;
    if x == 0 {
        if n == 0 {
            return 0.0;
        }
        return if p < 0.5 { nf * (-p).ln_1p() } else { nf * q.ln() };
    }
    if x == n {
        return if q < 0.5 { nf * (-q).ln_1p() } else { nf * p.ln() };
    }
    let xf = x as f64;
    let lc = stirlerr(n) - stirlerr(x) - stirlerr(n - x) - bd0(xf, nf * p) - bd0(nf - xf, nf * q);
    let lf = LN_2PI + xf.ln() + (-xf / nf).ln_1p();
    lc - 0.5 * lf
}

/// `ln C(n, k)` in natural log; exact identity, no large-term cancellation.
pub fn ln_choose(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    if k == 0 {
        return 0.0;
    }
    let nf = n as f64;
    let kf = k as f64;
    let frac = kf / nf;
    // C(n,k) = exp(n H(k/n)) * Stirling corrections / sqrt(2 pi k (n-k)/n)
    let entropy = -kf * (kf.ln() - nf.ln()) - (nf - kf) * (-frac).ln_1p();
    entropy + stirlerr(n) - stirlerr(k) - stirlerr(n - k) - 0.5 * (LN_2PI + kf.ln() + (-frac).ln_1p())
}

/// `log2 C(n, k)`.
pub fn log2_choose(n: u64, k: u64) -> f64 {
    ln_choose(n, k) / LN_2
}

/// Running `ln(sum exp(x_i))`.
#[derive(Debug, Clone, Copy)]
pub struct LogSum {
    max: f64,
    scaled: f64,
}

impl Default for LogSum {
    fn default() -> Self {
        Self {
            max: f64::NEG_INFINITY,
            scaled: 0.0,
        }
    }
}

impl LogSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, ln_x: f64) {
        if ln_x == f64::NEG_INFINITY {
            return;
        }
        if ln_x > self.max {
            self.scaled = self.scaled * (self.max - ln_x).exp() + 1.0;
            self.max = ln_x;
        } else {
            self.scaled += (ln_x - self.max).exp();
        }
    }

    pub fn ln(&self) -> f64 {
        if self.scaled == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.max + self.scaled.ln()
        }
    }
}

/// `ln(exp(a) + exp(b))`.
pub fn ln_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

// Terms smaller than exp(-TAIL_CUTOFF) times the running sum are dropped once
// the summation has passed the mode.
const TAIL_CUTOFF: f64 = 50.0;

/// `ln P(X <= k)` for `X ~ Binomial(n, p)`.
pub fn ln_binom_lower_tail(k: u64, n: u64, p: f64) -> f64 {
    if k >= n || p == 0.0 {
        return 0.0;
    }
    if p == 1.0 {
        return f64::NEG_INFINITY;
    }
    if n > DIRECT_SUM_MAX {
        return ln_beta_reg(n - k, k + 1, 1.0 - p);
    }
    let mode = ((n + 1) as f64 * p).floor() as u64;
    let mut sum = LogSum::new();
    for j in (0..=k).rev() {
        let t = ln_binom_pmf(j, n, p);
        sum.push(t);
        if j < mode && t < sum.ln() - TAIL_CUTOFF {
            break;
        }
    }
    sum.ln()
}

/// `ln P(X >= k)` for `X ~ Binomial(n, p)`.
pub fn ln_binom_upper_tail(k: u64, n: u64, p: f64) -> f64 {
    if k == 0 || p == 1.0 {
        return 0.0;
    }
    if k > n || p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if n > DIRECT_SUM_MAX {
        return ln_beta_reg(k, n - k + 1, p);
    }
    let mode = ((n + 1) as f64 * p).floor() as u64;
    let mut sum = LogSum::new();
    for j in k..=n {
        let t = ln_binom_pmf(j, n, p);
        sum.push(t);
        if j > mode && t < sum.ln() - TAIL_CUTOFF {
            break;
        }
    }
    sum.ln()
}

/// `ln I_x(a, b)` for integer `a, b >= 1`.
pub fn ln_beta_reg(a: u64, b: u64, x: f64) -> f64 {
    debug_assert!(a >= 1 && b >= 1);
    if x <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if x >= 1.0 {
        return 0.0;
    }
    let (af, bf) = (a as f64, b as f64);
    if x < (af + 1.0) / (af + bf + 2.0) {
        // x^a (1-x)^b / (a B(a,b)) = C(a+b-1, a) x^a (1-x)^(b-1) * (1-x)
        let ln_front = ln_binom_pmf(a, a + b - 1, x) + (-x).ln_1p();
        ln_front + betacf(af, bf, x).ln()
    } else {
        let other = ln_beta_reg(b, a, 1.0 - x);
        (-other.exp_m1()).ln()
    }
}

// Modified Lentz evaluation of the incomplete-beta continued fraction.
fn betacf(a: f64, b: f64, x: f64) -> f64 {
    const FPMIN: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    const MAX_ITER: u32 = 1_000_000;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < FPMIN {
        d = FPMIN;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}
