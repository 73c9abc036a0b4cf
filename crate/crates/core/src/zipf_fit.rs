//! Zipf-law fits of frequency corpora.
//!
//! * PDF-Zipf: `f_i ~ C / i^s`, fitted by least squares of `log10 f_i` on
//!   `log10 i` over the ranks whose frequency reaches a cutoff.
//! * CDF-Zipf: `lambda_t ~ y t^r`, fitted either by least squares of
//!   `log10 lambda_hat_t` on `log10 t` over every rank, or by minimising the
//!   Kolmogorov-Smirnov distance with a nested golden-section search (outer
//!   on `r`, inner on `ln y`).
//!
//! Model CDF values are clamped at one everywhere.

use serde::{Deserialize, Serialize};

use crate::{
    corpus::FrequencyCorpus,
    numeric::{least_squares, r_squared_of_line},
    search::golden_section_min,
    Error, Result,
};

pub const DEFAULT_PDF_CUTOFF: u64 = 5;
pub const DEFAULT_R_RANGE: (f64, f64) = (0.01, 0.99);
pub const DEFAULT_GSS_TOL: f64 = 1e-6;
const Y_RANGE: (f64, f64) = (1e-6, 1.0);
const INNER_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CdfFitMethod {
    #[serde(rename = "CDF-LLS")]
    Lls,
    #[serde(rename = "CDF-GSS-nested")]
    GssNested,
}

impl CdfFitMethod {
    pub fn label(self) -> &'static str {
        match self {
            CdfFitMethod::Lls => "CDF-LLS",
            CdfFitMethod::GssNested => "CDF-GSS-nested",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdfZipfFit {
    pub s: f64,
    /// Intercept in log10 space.
    pub log_c: f64,
    /// `C / N`.
    pub z: f64,
    pub r_squared: f64,
    pub cutoff: u64,
}

impl PdfZipfFit {
    /// Whether `0 < s < 1`, the range the threshold analysis needs.
    pub fn in_model_domain(&self) -> bool {
        self.s > 0.0 && self.s < 1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CdfZipfFit {
    pub y: f64,
    pub r: f64,
    pub r_squared: f64,
    pub ks: f64,
    pub method: CdfFitMethod,
}

impl CdfZipfFit {
    pub fn in_model_domain(&self) -> bool {
        self.y > 0.0 && self.r > 0.0 && self.r < 1.0
    }
}

/// Flat JSON record shared by every fit kind. Keys that do not apply to a
/// method are `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitRecord {
    pub method: String,
    pub y: Option<f64>,
    pub r: Option<f64>,
    pub s: Option<f64>,
    #[serde(rename = "C")]
    pub c: Option<f64>,
    pub z: Option<f64>,
    pub r_squared: f64,
    pub ks: Option<f64>,
    pub cutoff: Option<u64>,
}

impl From<&PdfZipfFit> for FitRecord {
    fn from(f: &PdfZipfFit) -> Self {
        FitRecord {
            method: "PDF-LLS".into(),
            y: None,
            r: None,
            s: Some(f.s),
            c: Some(10f64.powf(f.log_c)),
            z: Some(f.z),
            r_squared: f.r_squared,
            ks: None,
            cutoff: Some(f.cutoff),
        }
    }
}

impl From<&CdfZipfFit> for FitRecord {
    fn from(f: &CdfZipfFit) -> Self {
        FitRecord {
            method: f.method.label().into(),
            y: Some(f.y),
            r: Some(f.r),
            s: None,
            c: None,
            z: None,
            r_squared: f.r_squared,
            ks: Some(f.ks),
            cutoff: None,
        }
    }
}

pub fn fit_pdf_zipf_lls(corpus: &FrequencyCorpus, cutoff: u64) -> Result<PdfZipfFit> {
    let used = corpus.counts().iter().take_while(|&&f| f >= cutoff).count();
    if used < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: used,
        });
    }
    let counts = &corpus.counts()[..used];
    let points = counts
        .iter()
        .enumerate()
        .map(|(i, &f)| (((i + 1) as f64).log10(), (f as f64).log10()));
    let line = least_squares(points).ok_or(Error::InsufficientData {
        needed: 2,
        got: used,
    })?;
    Ok(PdfZipfFit {
        s: -line.slope,
        log_c: line.intercept,
        z: 10f64.powf(line.intercept) / corpus.n_users() as f64,
        r_squared: line.r_squared,
        cutoff,
    })
}

fn log_cdf_points(lambda_hat: &[f64]) -> impl Iterator<Item = (f64, f64)> + Clone + '_ {
    lambda_hat
        .iter()
        .enumerate()
        .map(|(i, &l)| (((i + 1) as f64).log10(), l.log10()))
}

fn require_ranks(corpus: &FrequencyCorpus) -> Result<()> {
    if corpus.n_distinct() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: corpus.n_distinct(),
        });
    }
    Ok(())
}

pub fn fit_cdf_zipf_lls(corpus: &FrequencyCorpus) -> Result<CdfZipfFit> {
    require_ranks(corpus)?;
    let cdf = corpus.empirical_cdf();
    let line = least_squares(log_cdf_points(&cdf.lambda_hat)).ok_or(Error::InsufficientData {
        needed: 2,
        got: corpus.n_distinct(),
    })?;
    let y = 10f64.powf(line.intercept);
    let r = line.slope;
    Ok(CdfZipfFit {
        y,
        r,
        r_squared: line.r_squared,
        ks: KsTable::new(corpus).distance(y, r),
        method: CdfFitMethod::Lls,
    })
}

pub fn fit_cdf_zipf_gss(
    corpus: &FrequencyCorpus,
    r_range: (f64, f64),
    tol: f64,
) -> Result<CdfZipfFit> {
    require_ranks(corpus)?;
    let (r_lo, r_hi) = r_range;
    if !(0.0 < r_lo && r_lo <= r_hi && r_hi < 1.0) || !(tol > 0.0) {
        return Err(Error::Domain(format!(
            "bad search range [{r_lo}, {r_hi}] or tolerance {tol}"
        )));
    }
    let table = KsTable::new(corpus);
    let mut best = (f64::INFINITY, 0.0, 0.0);
    golden_section_min(
        |r| {
            let inner = golden_section_min(
                |ln_y| table.distance(ln_y.exp(), r),
                Y_RANGE.0.ln(),
                Y_RANGE.1.ln(),
                INNER_TOL,
            );
            if inner.fx < best.0 {
                best = (inner.fx, inner.x.exp(), r);
            }
            inner.fx
        },
        r_lo,
        r_hi,
        tol,
    );
    let (ks, y, r) = best;
    let cdf = corpus.empirical_cdf();
    let r_squared = r_squared_of_line(log_cdf_points(&cdf.lambda_hat), r, y.log10());
    Ok(CdfZipfFit {
        y,
        r,
        r_squared,
        ks,
        method: CdfFitMethod::GssNested,
    })
}

/// `max_t |lambda_hat_t - min(1, y t^r)|` over the corpus ranks.
pub fn ks_distance(corpus: &FrequencyCorpus, y: f64, r: f64) -> f64 {
    KsTable::new(corpus).distance(y, r)
}

/// Run-length view of a corpus for fast KS distances.
///
/// Inside a run of equal frequencies the empirical CDF is linear in the
/// rank, while the model CDF is concave for `0 < r <= 1`. The model minus
/// the data is therefore concave on the run, so its minimum sits at an end
/// of the run and its maximum at an end, at the stationary point, or at the
/// saturation kink. Only those ranks are evaluated.
pub struct KsTable {
    n: u64,
    /// `(first rank, run length, frequency, users before the run)`.
    runs: Vec<(u64, u64, u64, u64)>,
}

impl KsTable {
    pub fn new(corpus: &FrequencyCorpus) -> Self {
        let mut runs = Vec::new();
        let (mut rank, mut before) = (1u64, 0u64);
        for (f, m) in corpus.runs() {
            runs.push((rank, m, f, before));
            rank += m;
            before += f * m;
        }
        Self {
            n: corpus.n_users(),
            runs,
        }
    }

    pub fn distance(&self, y: f64, r: f64) -> f64 {
        let n = self.n as f64;
        let model = |t: u64| (y * (t as f64).powf(r)).min(1.0);
        let mut worst = 0.0f64;
        let exhaustive = !(r > 0.0 && r <= 1.0);
        let t_sat = (1.0 / y).powf(1.0 / r);
        for &(t0, m, f, before) in &self.runs {
            let t1 = t0 + m - 1;
            let gap = |t: u64| {
                let hat = (before + (t - t0 + 1) * f) as f64 / n;
                (hat - model(t)).abs()
            };
            if exhaustive {
                for t in t0..=t1 {
                    worst = worst.max(gap(t));
                }
                continue;
            }
            worst = worst.max(gap(t0)).max(gap(t1));
            if m > 2 {
                let stationary = if r < 1.0 {
                    (y * r * n / f as f64).powf(1.0 / (1.0 - r))
                } else {
                    t0 as f64
                };
                for c in [stationary, t_sat] {
                    if !c.is_finite() {
                        continue;
                    }
                    let c = c.clamp(t0 as f64, t1 as f64);
                    worst = worst.max(gap(c.floor() as u64)).max(gap(c.ceil() as u64));
                }
            }
        }
        worst.min(1.0)
    }
}
