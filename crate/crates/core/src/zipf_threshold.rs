//! Crack-everything thresholds for Zipf-distributed passwords.
//!
//! For CDF-Zipf `lambda(t) = min(1, y t^r)` the attacker never stops before
//! the saturation rank once `v/k >= T`, where `T` is the maximum over
//! `t in [1, Z]` of
//!
//! ```text
//! f(t) = (1 - y (t-1)^r) / (y^a * r a * t^(r a - 1))
//! ```
//!
//! and `Z = ceil((1/y)^(1/r)) + 1`. `f` is maximised by golden-section search
//! over `ln t`, then evaluated exactly at the integer neighbours.
//!
//! For PDF-Zipf `p(t) = z / t^s` the corresponding threshold has a closed
//! form, and the optimal threshold and fraction cracked at a given `v/k` are
//! bracketed by simple expressions.

use serde::{Deserialize, Serialize};

use crate::{distributions::cdf_zipf_saturation_rank, search::golden_section_max, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    /// Critical `v/k` ratio.
    #[serde(rename = "T")]
    pub t_crit: f64,
    /// Cutoff rank.
    #[serde(rename = "Z")]
    pub z_cutoff: u64,
    /// Integer rank attaining the maximum.
    pub t_peak: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdfThresholdResult {
    /// Critical `v/k` for cracking everything.
    pub t_all: f64,
    /// Maximiser of the all-crack objective.
    pub t_peak: f64,
    /// `(lower, upper)` bracket on the optimal threshold at a given `v/k`.
    pub bracket: Option<(f64, f64)>,
    /// `(lower, upper)` bounds on the fraction cracked, clamped to `[0, 1]`.
    pub fraction_bounds: Option<(f64, f64)>,
}

fn check_cdf_params(y: f64, r: f64, a: f64) -> Result<()> {
    if !(y > 0.0 && y <= 1.0) {
        return Err(Error::Domain(format!("y must lie in (0, 1], got {y}")));
    }
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!("r must lie in (0, 1), got {r}")));
    }
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::Domain(format!("a must lie in (0, 1], got {a}")));
    }
    if r * a > 1.0 {
        return Err(Error::Domain(format!("r*a must be <= 1, got {}", r * a)));
    }
    Ok(())
}

/// `Z = ceil((1/y)^(1/r)) + 1`.
pub fn cdf_zipf_cutoff(y: f64, r: f64) -> Result<u64> {
    if !(y > 0.0 && y <= 1.0 && r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!(
            "cutoff needs 0 < y <= 1 and 0 < r < 1, got y={y}, r={r}"
        )));
    }
    let base = (-(y.ln()) / r).exp();
    if !base.is_finite() || base > 9.0e15 {
        return Err(Error::Unsupported(format!(
            "cutoff rank for y={y}, r={r} is too large"
        )));
    }
    Ok(cdf_zipf_saturation_rank(y, r) + 1)
}

/// The objective whose maximum over `[1, Z]` is the threshold.
pub fn cdf_threshold_objective(y: f64, r: f64, a: f64, t: f64) -> f64 {
    let ra = r * a;
    let head = if t <= 1.0 {
        0.0
    } else {
        ((t - 1.0).ln() * r).exp() * y
    };
    (1.0 - head) / (((a * y.ln()) + (ra - 1.0) * t.ln()).exp() * ra)
}

pub fn cdf_zipf_threshold(y: f64, r: f64, a: f64) -> Result<ThresholdResult> {
    check_cdf_params(y, r, a)?;
    let z_cutoff = cdf_zipf_cutoff(y, r)?;
    let f = |t: f64| cdf_threshold_objective(y, r, a, t);
    let hi = (z_cutoff as f64).ln();
    let gs = golden_section_max(|x| f(x.exp()), 0.0, hi, 1e-12);
    let centre = gs.x.exp();
    let mut best = (1u64, f(1.0));
    let candidates = [1.0, centre.floor(), centre.ceil(), z_cutoff as f64];
    for c in candidates {
        let t = c.clamp(1.0, z_cutoff as f64);
        let val = f(t);
        if val > best.1 {
            best = (t as u64, val);
        }
    }
    Ok(ThresholdResult {
        t_crit: best.1,
        z_cutoff,
        t_peak: best.0,
    })
}

/// True iff `v (lambda_t^a - lambda_{t-1}^a) >= k (1 - lambda_{t-1})` at every
/// integer `t` up to `min(t_max, support)` of the truncated CDF-Zipf model,
/// with `ratio = v/k`.
pub fn verify_cdf_threshold(y: f64, r: f64, a: f64, ratio: f64, t_max: u64) -> bool {
    if check_cdf_params(y, r, a).is_err() {
        return false;
    }
    let Ok(z) = cdf_zipf_cutoff(y, r) else {
        return false;
    };
    let support = z - 1;
    let lambda = |t: u64| -> f64 {
        if t == 0 {
            0.0
        } else if t >= support {
            1.0
        } else {
            (y * (t as f64).powf(r)).min(1.0)
        }
    };
    let mut prev = 0.0f64;
    for t in 1..=t_max.min(support) {
        let cur = lambda(t);
        if ratio * (cur.powf(a) - prev.powf(a)) < 1.0 - prev {
            return false;
        }
        prev = cur;
    }
    true
}

fn check_pdf_params(z: f64, s: f64) -> Result<()> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Domain(format!("s must lie in (0, 1), got {s}")));
    }
    if !(z > 0.0) {
        return Err(Error::Domain(format!("z must be > 0, got {z}")));
    }
    if 1.0 - s - z <= 0.0 {
        return Err(Error::Domain(format!(
            "need 1 - s - z > 0, got {}",
            1.0 - s - z
        )));
    }
    Ok(())
}

pub fn pdf_zipf_threshold(z: f64, s: f64) -> Result<PdfThresholdResult> {
    check_pdf_params(z, s)?;
    let t_peak = (z / (s * (1.0 - s))).powf(1.0 / (s - 1.0));
    let t_all = t_peak.powf(s) / z - t_peak / (1.0 - s);
    Ok(PdfThresholdResult {
        t_all,
        t_peak,
        bracket: None,
        fraction_bounds: None,
    })
}

pub fn pdf_zipf_crack_bounds(v: f64, k: f64, z: f64, s: f64) -> Result<PdfThresholdResult> {
    let mut out = pdf_zipf_threshold(z, s)?;
    if !(v >= 0.0 && k > 0.0) {
        return Err(Error::Domain(format!(
            "need v >= 0 and k > 0, got v={v}, k={k}"
        )));
    }
    let t_lo = v * z * (1.0 - s) / (k * (1.0 - s - z));
    // Below one guess the power flips the order; keep the bracket ordered.
    let t_hi = t_lo.powf(1.0 / s).max(t_lo);
    out.bracket = Some((t_lo, t_hi));
    out.fraction_bounds = Some(if v / k >= out.t_all {
        (1.0, 1.0)
    } else {
        let lo = z * ((t_lo + 1.0).powf(1.0 - s) - 1.0) / (1.0 - s);
        // For tiny ratios the upper expression can dip below the lower one.
        let hi = (z * t_lo.powf((1.0 - s) / s) / (1.0 - s)).max(lo);
        (lo.clamp(0.0, 1.0), hi.clamp(0.0, 1.0))
    });
    Ok(out)
}
