//! Password probability models behind one interface.
//!
//! Every model exposes ranked probabilities `p(t)` (most likely first) and
//! the cumulative mass `lambda(t) = p(1) + ... + p(t)`, with `lambda(0) = 0`.
//!
//! Zipf models need a finite support to be simulated:
//!
//! * CDF-Zipf `lambda(t) = min(1, y t^r)` stops at the first rank where the
//!   model reaches one; that final rank absorbs whatever mass is left.
//! * PDF-Zipf `p(t) = z / t^s` keeps the longest prefix whose mass stays at or
//!   below one. The leftover `1 - lambda(n_max)` is an "unguessable" atom: it
//!   is never on the attacker's list, and sampled users who land there get a
//!   fresh password of their own.

use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::{corpus::FrequencyCorpus, numeric::KahanSum, seeded_rng, Error, Result};

/// Serializable description of a distribution, e.g. `{"kind":"cdf_zipf","y":0.02,"r":0.2}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistSpec {
    Empirical {
        counts: Vec<u64>,
    },
    CdfZipf {
        y: f64,
        r: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n_max: Option<u64>,
    },
    PdfZipf {
        z: f64,
        s: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n_max: Option<u64>,
    },
}

/// Ranks summed exactly before switching to the Euler–Maclaurin tail.
const HARMONIC_TABLE: usize = 10_000;
/// Search cap for the PDF-Zipf support.
const PDF_SUPPORT_CAP: u64 = 1_000_000_000_000;

#[derive(Debug, Clone)]
enum Model {
    Empirical {
        prefix: Vec<u64>,
        n_users: u64,
    },
    CdfZipf {
        y: f64,
        r: f64,
        n_max: u64,
    },
    PdfZipf {
        z: f64,
        s: f64,
        n_max: u64,
        table: Vec<f64>,
    },
}

#[derive(Debug, Clone)]
pub struct PasswordDistribution {
    model: Model,
}

impl PasswordDistribution {
    pub fn new(spec: &DistSpec) -> Result<Self> {
        make_distribution(spec)
    }

    pub fn empirical(corpus: &FrequencyCorpus) -> Result<Self> {
        if corpus.is_empty() {
            return Err(Error::Domain(
                "empirical distribution needs a non-empty corpus".into(),
            ));
        }
        Ok(Self {
            model: Model::Empirical {
                prefix: corpus.prefix_sums(),
                n_users: corpus.n_users(),
            },
        })
    }

    pub fn cdf_zipf(y: f64, r: f64, n_max: Option<u64>) -> Result<Self> {
        if !(y > 0.0 && y.is_finite()) || !(r > 0.0 && r.is_finite()) {
            return Err(Error::Domain(format!(
                "CDF-Zipf needs y > 0 and r > 0, got y={y}, r={r}"
            )));
        }
        if y > 1.0 {
            return Err(Error::Domain(format!(
                "CDF-Zipf with y={y} > 1 has lambda(1) > 1"
            )));
        }
        let n_max = match n_max {
            Some(0) => return Err(Error::Domain("n_max must be at least 1".into())),
            Some(n) => n,
            None => cdf_zipf_saturation_rank(y, r),
        };
        Ok(Self {
            model: Model::CdfZipf { y, r, n_max },
        })
    }

    pub fn pdf_zipf(z: f64, s: f64, n_max: Option<u64>) -> Result<Self> {
        if !(z > 0.0 && z <= 1.0) || !(s > 0.0 && s.is_finite()) {
            return Err(Error::Domain(format!(
                "PDF-Zipf needs 0 < z <= 1 and s > 0, got z={z}, s={s}"
            )));
        }
        let table = harmonic_table(s);
        let mass = |n: u64| z * generalized_harmonic(n, s, &table);
        let n_max = match n_max {
            Some(0) => return Err(Error::Domain("n_max must be at least 1".into())),
            Some(n) => {
                if mass(n) > 1.0 + 1e-12 {
                    return Err(Error::Domain(format!(
                        "PDF-Zipf mass over {n} ranks is {} > 1",
                        mass(n)
                    )));
                }
                n
            }
            None => {
                if mass(PDF_SUPPORT_CAP) <= 1.0 {
                    return Err(Error::Unsupported(format!(
                        "PDF-Zipf(z={z}, s={s}) does not exhaust its mass within {PDF_SUPPORT_CAP} ranks; pass n_max"
                    )));
                }
                // Largest n with mass(n) <= 1.
                let (mut lo, mut hi) = (0u64, PDF_SUPPORT_CAP);
                while hi - lo > 1 {
                    let mid = lo + (hi - lo) / 2;
                    if mass(mid) <= 1.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                if lo == 0 {
                    return Err(Error::Domain(format!("PDF-Zipf with z={z} > 1")));
                }
                lo
            }
        };
        Ok(Self {
            model: Model::PdfZipf { z, s, n_max, table },
        })
    }

    /// Number of guessable ranks.
    pub fn support(&self) -> u64 {
        match &self.model {
            Model::Empirical { prefix, .. } => (prefix.len() - 1) as u64,
            Model::CdfZipf { n_max, .. } | Model::PdfZipf { n_max, .. } => *n_max,
        }
    }

    /// Cumulative mass of the `t` most likely passwords. `t` beyond the
    /// support returns the mass of the whole support.
    pub fn lambda(&self, t: u64) -> f64 {
        if t == 0 {
            return 0.0;
        }
        let t = t.min(self.support());
        match &self.model {
            Model::Empirical { prefix, n_users } => prefix[t as usize] as f64 / *n_users as f64,
            Model::CdfZipf { y, r, n_max } => {
                if t >= *n_max {
                    1.0
                } else {
                    (y * (t as f64).powf(*r)).min(1.0)
                }
            }
            Model::PdfZipf { z, s, table, .. } => (z * generalized_harmonic(t, *s, table)).min(1.0),
        }
    }

    /// Probability of the rank-`t` password; zero for `t == 0` or past the support.
    pub fn p(&self, t: u64) -> f64 {
        if t == 0 || t > self.support() {
            return 0.0;
        }
        match &self.model {
            Model::Empirical { prefix, n_users } => {
                (prefix[t as usize] - prefix[t as usize - 1]) as f64 / *n_users as f64
            }
            Model::CdfZipf { y, r, n_max } => {
                if t >= *n_max {
                    1.0 - self.lambda(t - 1)
                } else if t == 1 {
                    self.lambda(1)
                } else {
                    let hi = y * (t as f64).powf(*r);
                    if hi >= 1.0 {
                        return 1.0 - self.lambda(t - 1);
                    }
                    // y t^r (1 - (1 - 1/t)^r), without cancellation.
                    let ratio = -(r * (-1.0 / t as f64).ln_1p()).exp_m1();
                    hi * ratio
                }
            }
            Model::PdfZipf { z, s, .. } => z * (t as f64).powf(-*s),
        }
    }

    /// Mass the attacker can never reach by guessing (PDF-Zipf remainder).
    pub fn unguessable_mass(&self) -> f64 {
        match &self.model {
            Model::PdfZipf { .. } => (1.0 - self.lambda(self.support())).max(0.0),
            _ => 0.0,
        }
    }

    /// How the model's tail was closed off, for output metadata.
    pub fn tail_convention(&self) -> &'static str {
        match &self.model {
            Model::Empirical { .. } => "empirical",
            Model::CdfZipf { .. } => {
                "cdf_zipf: truncated at saturation rank, final atom absorbs remainder"
            }
            Model::PdfZipf { .. } => {
                "pdf_zipf: truncated where mass reaches 1, remainder is an unguessable atom"
            }
        }
    }

    /// Draw `n` users and return how many landed on each rank (index `t-1`)
    /// together with the number that landed on the unguessable remainder.
    ///
    /// Ranks are visited in order with binomial draws conditioned on the mass
    /// not yet visited (a sequential multinomial), so the cost is `O(support)`.
    pub fn sample_histogram(&self, n: u64, seed: u64) -> Result<(Vec<u64>, u64)> {
        let support = usize::try_from(self.support())
            .map_err(|_| Error::Unsupported("support too large to sample".into()))?;
        let mut rng = seeded_rng(seed);
        let mut hist = vec![0u64; support];
        let mut left = n;
        let mut tail = KahanSum::new();
        let residual = self.unguessable_mass();
        // Mass of ranks > t plus the residual, accumulated from the back so
        // that the conditional probabilities do not suffer from cancellation.
        let mut suffix = vec![0.0f64; support + 1];
        tail.add(residual);
        suffix[support] = residual;
        for t in (1..=support).rev() {
            tail.add(self.p(t as u64));
            suffix[t - 1] = tail.value();
        }
        for t in 1..=support {
            if left == 0 {
                break;
            }
            let rem = suffix[t - 1];
            let q = if t == support && residual == 0.0 {
                1.0
            } else if rem > 0.0 {
                (self.p(t as u64) / rem).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let drawn = if q >= 1.0 {
                left
            } else if q <= 0.0 {
                0
            } else {
                Binomial::new(left, q)
                    .map_err(|e| Error::Domain(e.to_string()))?
                    .sample(&mut rng)
            };
            hist[t - 1] = drawn;
            left -= drawn;
        }
        Ok((hist, left))
    }
}

pub fn make_distribution(spec: &DistSpec) -> Result<PasswordDistribution> {
    match spec {
        DistSpec::Empirical { counts } => {
            PasswordDistribution::empirical(&FrequencyCorpus::from_counts(counts.clone())?)
        }
        DistSpec::CdfZipf { y, r, n_max } => PasswordDistribution::cdf_zipf(*y, *r, *n_max),
        DistSpec::PdfZipf { z, s, n_max } => PasswordDistribution::pdf_zipf(*z, *s, *n_max),
    }
}

/// `n` i.i.d. users from `dist`, as a frequency corpus. Users drawn from the
/// unguessable remainder each contribute a distinct password of frequency 1.
pub fn sample_corpus(dist: &PasswordDistribution, n: u64, seed: u64) -> Result<FrequencyCorpus> {
    let (mut hist, residual) = dist.sample_histogram(n, seed)?;
    hist.retain(|&c| c > 0);
    hist.extend(std::iter::repeat_n(1, residual as usize));
    FrequencyCorpus::from_counts(hist)
}

/// First rank `n` with `y n^r >= 1`, i.e. `ceil((1/y)^(1/r))` made robust
/// against rounding in `powf`.
pub fn cdf_zipf_saturation_rank(y: f64, r: f64) -> u64 {
    let reaches = |n: u64| y * (n as f64).powf(r) >= 1.0;
    let guess = (1.0 / y).powf(1.0 / r).ceil();
    let mut n = if guess.is_finite() && guess < u64::MAX as f64 {
        (guess as u64).max(1)
    } else {
        u64::MAX
    };
    while n > 1 && reaches(n - 1) {
        n -= 1;
    }
    while !reaches(n) && n < u64::MAX {
        n += 1;
    }
    n
}

fn harmonic_table(s: f64) -> Vec<f64> {
    let mut acc = KahanSum::new();
    let mut out = Vec::with_capacity(HARMONIC_TABLE + 1);
    out.push(0.0);
    for j in 1..=HARMONIC_TABLE {
        acc.add((j as f64).powf(-s));
        out.push(acc.value());
    }
    out
}

/// `H(n, s) = sum_{j=1}^n j^{-s}`: exact prefix for small `n`, Euler–Maclaurin beyond.
fn generalized_harmonic(n: u64, s: f64, table: &[f64]) -> f64 {
    let k = (table.len() - 1) as u64;
    if n <= k {
        return table[n as usize];
    }
    let (a, b) = (k as f64, n as f64);
    let f = |x: f64| x.powf(-s);
    let integral = if (s - 1.0).abs() < 1e-12 {
        (b / a).ln()
    } else {
        (b.powf(1.0 - s) - a.powf(1.0 - s)) / (1.0 - s)
    };
    // d/dx x^{-s} and d^3/dx^3 x^{-s}
    let d1 = |x: f64| -s * x.powf(-s - 1.0);
    let d3 = |x: f64| -s * (s + 1.0) * (s + 2.0) * x.powf(-s - 3.0);
    // sum_{j=a}^{b} f(j) by Euler–Maclaurin; subtract f(a) already in the table.
    let em = integral + (f(a) + f(b)) / 2.0 + (d1(b) - d1(a)) / 12.0 - (d3(b) - d3(a)) / 720.0;
    table[k as usize] + em - f(a)
}
