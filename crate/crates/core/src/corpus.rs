//! Password frequency corpora.
//!
//! A corpus only records how many users picked each distinct password, never
//! the passwords themselves. Counts are kept as `u64` so that corpora with
//! around a billion users do not overflow; probabilities are derived on
//! demand in `f64`.

use std::io::{BufRead, Write};

use rand_distr::{Distribution, Hypergeometric};
use serde::{Deserialize, Serialize};

use crate::{seeded_rng, Error, Result};

/// On-disk corpus representations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorpusFormat {
    /// One positive integer per line: the frequency of one distinct password.
    RawCounts,
    /// `frequency multiplicity` per line: `multiplicity` distinct passwords
    /// each chosen by `frequency` users.
    RunlengthPairs,
}

/// Sorted password frequency list `f_1 >= f_2 >= ... >= f_M >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FrequencyCorpus {
    counts: Vec<u64>,
    n_users: u64,
}

/// Cumulative empirical mass `lambda_hat[t-1] = (f_1 + ... + f_t) / N`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    pub lambda_hat: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub n_users: u64,
    pub n_distinct: usize,
    pub max_frequency: u64,
}

impl FrequencyCorpus {
    /// Build a corpus from counts in any order. Zero counts are rejected.
    pub fn from_counts(mut counts: Vec<u64>) -> Result<Self> {
        if let Some(pos) = counts.iter().position(|&c| c == 0) {
            return Err(Error::Range(format!("count at index {pos} is zero")));
        }
        let n_users = checked_total(&counts)?;
        counts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Self { counts, n_users })
    }

    /// Like [`from_counts`](Self::from_counts) but silently drops zero entries.
    pub fn from_counts_dropping_zeros(mut counts: Vec<u64>) -> Result<Self> {
        counts.retain(|&c| c > 0);
        Self::from_counts(counts)
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// `N`, the number of users.
    pub fn n_users(&self) -> u64 {
        self.n_users
    }

    /// `M`, the number of distinct passwords.
    pub fn n_distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Empirical probability of the rank-`i` password (1-based).
    pub fn p_hat(&self, rank: usize) -> f64 {
        if rank == 0 || rank > self.counts.len() {
            return 0.0;
        }
        self.counts[rank - 1] as f64 / self.n_users as f64
    }

    /// Integer prefix sums `S_t = f_1 + ... + f_t`, with `S_0 = 0` at index 0.
    pub fn prefix_sums(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.counts.len() + 1);
        let mut acc = 0u64;
        out.push(0);
        for &c in &self.counts {
            acc += c;
            out.push(acc);
        }
        out
    }

    /// Sum of counts of the `t` most frequent passwords.
    pub fn head_mass(&self, t: usize) -> u64 {
        self.counts.iter().take(t).sum()
    }

    pub fn empirical_cdf(&self) -> EmpiricalCdf {
        let n = self.n_users as f64;
        // Integer prefix sums keep lambda_hat exact up to a single rounding.
        let mut acc = 0u64;
        let lambda_hat = self
            .counts
            .iter()
            .map(|&c| {
                acc += c;
                acc as f64 / n
            })
            .collect();
        EmpiricalCdf { lambda_hat }
    }

    pub fn summary(&self) -> CorpusSummary {
        CorpusSummary {
            n_users: self.n_users,
            n_distinct: self.counts.len(),
            max_frequency: self.counts.first().copied().unwrap_or(0),
        }
    }

    /// Read a corpus in the given format. Blank lines and lines starting
    /// with `#` are skipped; `\r\n` endings are accepted.
    pub fn load<R: BufRead>(source: R, format: CorpusFormat) -> Result<Self> {
        let mut counts = Vec::new();
        let mut last_line = 0usize;
        for (idx, line) in source.lines().enumerate() {
            let line_no = idx + 1;
            last_line = line_no;
            let line = line.map_err(|e| Error::Parse {
                line: line_no,
                msg: e.to_string(),
            })?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut tokens = line.split_whitespace();
            match format {
                CorpusFormat::RawCounts => {
                    let f = parse_count(tokens.next(), line_no, "frequency")?;
                    if let Some(extra) = tokens.next() {
                        return Err(Error::Parse {
                            line: line_no,
                            msg: format!("unexpected token {extra:?}"),
                        });
                    }
                    counts.push(f);
                }
                CorpusFormat::RunlengthPairs => {
                    let f = parse_count(tokens.next(), line_no, "frequency")?;
                    let mult = parse_count(tokens.next(), line_no, "multiplicity")?;
                    if let Some(extra) = tokens.next() {
                        return Err(Error::Parse {
                            line: line_no,
                            msg: format!("unexpected token {extra:?}"),
                        });
                    }
                    let mult = usize::try_from(mult).map_err(|_| Error::Parse {
                        line: line_no,
                        msg: "multiplicity too large".into(),
                    })?;
                    counts.extend(std::iter::repeat_n(f, mult));
                }
            }
        }
        if counts.is_empty() {
            return Err(Error::Parse {
                line: last_line,
                msg: "no counts in input".into(),
            });
        }
        Self::from_counts(counts)
    }

    pub fn load_path(path: &std::path::Path, format: CorpusFormat) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::load(std::io::BufReader::new(file), format)
    }

    /// Write `frequency multiplicity` lines in descending frequency order.
    pub fn write_runlength<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (freq, mult) in self.runs() {
            writeln!(out, "{freq} {mult}")?;
        }
        Ok(())
    }

    pub fn to_runlength_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_runlength(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("ASCII output")
    }

    /// `(frequency, multiplicity)` runs, highest frequency first.
    pub fn runs(&self) -> Vec<(u64, u64)> {
        let mut runs: Vec<(u64, u64)> = Vec::new();
        for &c in &self.counts {
            match runs.last_mut() {
                Some((f, m)) if *f == c => *m += 1,
                _ => runs.push((c, 1)),
            }
        }
        runs
    }

    /// Draw `m` of the `N` users without replacement and return the number
    /// drawn from each class, aligned with [`counts`](Self::counts).
    ///
    /// Classes are visited in order and each one gets a hypergeometric draw
    /// conditioned on what is left, so memory stays `O(M)` regardless of `N`.
    pub fn subsample_classes(&self, m: u64, seed: u64) -> Result<Vec<u64>> {
        if m > self.n_users {
            return Err(Error::Range(format!(
                "subsample size {m} exceeds corpus size {}",
                self.n_users
            )));
        }
        let mut rng = seeded_rng(seed);
        let mut pop_left = self.n_users;
        let mut want = m;
        let mut out = vec![0u64; self.counts.len()];
        for (slot, &f) in out.iter_mut().zip(&self.counts) {
            if want == 0 {
                break;
            }
            let drawn = if want == pop_left {
                f
            } else {
                hypergeometric(pop_left, f, want, &mut rng)
            };
            *slot = drawn;
            pop_left -= f;
            want -= drawn;
        }
        debug_assert_eq!(want, 0);
        Ok(out)
    }

    /// Uniform random subsample of `m` users, without replacement.
    pub fn subsample(&self, m: u64, seed: u64) -> Result<Self> {
        Self::from_counts_dropping_zeros(self.subsample_classes(m, seed)?)
    }
}

/// Number of marked items among `draws` taken without replacement from a
/// population of `population` items, `marked` of which are marked.
fn hypergeometric<R: rand::Rng>(population: u64, marked: u64, draws: u64, rng: &mut R) -> u64 {
    match Hypergeometric::new(population, marked, draws) {
        Ok(h) => h.sample(rng),
        // The library's small-mode method underflows for huge populations.
        // The mode is small there, so walking the shorter side is cheap.
        Err(_) => {
            let (short, long) = if marked <= draws {
                (marked, draws)
            } else {
                (draws, marked)
            };
            let mut hits = 0u64;
            for i in 0..short {
                let p = (long - hits) as f64 / (population - i) as f64;
                if rng.random::<f64>() < p {
                    hits += 1;
                }
            }
            hits
        }
    }
}

/// Summary statistics and empirical CDF in one call.
pub fn empirical_stats(corpus: &FrequencyCorpus) -> (EmpiricalCdf, CorpusSummary) {
    (corpus.empirical_cdf(), corpus.summary())
}

fn checked_total(counts: &[u64]) -> Result<u64> {
    counts
        .iter()
        .try_fold(0u64, |acc, &c| acc.checked_add(c))
        .ok_or_else(|| Error::Range("total number of users overflows 64 bits".into()))
}

fn parse_count(token: Option<&str>, line: usize, what: &str) -> Result<u64> {
    let token = token.ok_or_else(|| Error::Parse {
        line,
        msg: format!("missing {what}"),
    })?;
    if token.starts_with('-') {
        return Err(Error::Parse {
            line,
            msg: format!("negative {what} {token:?}"),
        });
    }
    let value: u64 = token.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("{what} {token:?} is not an integer"),
    })?;
    if value == 0 {
        return Err(Error::Parse {
            line,
            msg: format!("{what} must be positive"),
        });
    }
    Ok(value)
}
