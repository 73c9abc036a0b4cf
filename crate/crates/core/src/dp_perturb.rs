//! Noisy perturbation of frequency corpora and the fit-robustness study.
//!
//! Each count receives independent two-sided geometric noise
//! `P[X = x] ~ exp(-eps |x|)`, drawn as the difference of two geometric
//! variables. Negative results are clamped to zero, zeros are dropped and
//! the list is re-sorted. No formal privacy guarantee is claimed.

use std::collections::BTreeMap;

use rand_distr::{Distribution, Geometric};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{
    corpus::FrequencyCorpus,
    numeric::mean_std,
    seeded_rng,
    zipf_fit::{fit_cdf_zipf_lls, fit_pdf_zipf_lls, DEFAULT_PDF_CUTOFF},
    Error, Result,
};

pub const MECHANISM: &str = "geometric-v1";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbParams {
    pub epsilon_dp: f64,
    pub n_trials: usize,
    pub seed: u64,
}

impl PerturbParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon_dp > 0.0) {
            return Err(Error::Domain(format!(
                "epsilon must be > 0, got {}",
                self.epsilon_dp
            )));
        }
        if self.n_trials < 1 {
            return Err(Error::Domain("n_trials must be >= 1".into()));
        }
        Ok(())
    }
}

/// Expected absolute value of the noise at `epsilon`.
pub fn expected_abs_noise(epsilon: f64) -> f64 {
    let alpha = (-epsilon).exp();
    2.0 * alpha / (1.0 - alpha * alpha)
}

/// Noise-added counts aligned with the corpus ranks, before clamping.
pub fn noisy_counts(corpus: &FrequencyCorpus, epsilon: f64, seed: u64) -> Result<Vec<i64>> {
    if !(epsilon > 0.0) {
        return Err(Error::Domain(format!("epsilon must be > 0, got {epsilon}")));
    }
    let success = -(-epsilon).exp_m1();
    let geo = Geometric::new(success).map_err(|e| Error::Domain(e.to_string()))?;
    let mut rng = seeded_rng(seed);
    Ok(corpus
        .counts()
        .iter()
        .map(|&c| c as i64 + geo.sample(&mut rng) as i64 - geo.sample(&mut rng) as i64)
        .collect())
}

pub fn perturb(corpus: &FrequencyCorpus, params: &PerturbParams) -> Result<FrequencyCorpus> {
    params.validate()?;
    let noisy = noisy_counts(corpus, params.epsilon_dp, params.seed)?;
    FrequencyCorpus::from_counts_dropping_zeros(
        noisy.into_iter().map(|c| c.max(0) as u64).collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FitKind {
    CdfLls,
    PdfLls,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyResult {
    pub mechanism: String,
    pub fit: FitKind,
    pub epsilon_dp: f64,
    pub n_trials: usize,
    pub seed: u64,
    pub params: BTreeMap<String, MeanStd>,
}

fn fit_stats(corpus: &FrequencyCorpus, fit: FitKind) -> Result<Vec<(&'static str, f64)>> {
    Ok(match fit {
        FitKind::CdfLls => {
            let f = fit_cdf_zipf_lls(corpus)?;
            vec![
                ("y", f.y),
                ("r", f.r),
                ("r_squared", f.r_squared),
                ("ks", f.ks),
            ]
        }
        FitKind::PdfLls => {
            let f = fit_pdf_zipf_lls(corpus, DEFAULT_PDF_CUTOFF)?;
            vec![("s", f.s), ("z", f.z), ("r_squared", f.r_squared)]
        }
    })
}

/// Perturb `n_trials` times (trial `i` uses seed `seed + i`), fit each copy
/// and summarise every fitted statistic.
pub fn fit_impact_study(
    corpus: &FrequencyCorpus,
    params: &PerturbParams,
    fit: FitKind,
) -> Result<StudyResult> {
    params.validate()?;
    if params.n_trials < 2 {
        return Err(Error::Domain("the study needs at least 2 trials".into()));
    }
    let trials: Vec<Vec<(&'static str, f64)>> = (0..params.n_trials)
        .into_par_iter()
        .map(|i| {
            let p = PerturbParams {
                seed: params.seed.wrapping_add(i as u64),
                ..*params
            };
            perturb(corpus, &p)
                .and_then(|c| fit_stats(&c, fit))
                .map_err(|e| Error::Trial {
                    index: i,
                    source: Box::new(e),
                })
        })
        .collect::<Result<_>>()?;
    let mut out = BTreeMap::new();
    for (col, &(name, _)) in trials[0].iter().enumerate() {
        let values: Vec<f64> = trials.iter().map(|row| row[col].1).collect();
        let (mean, std) = mean_std(&values);
        out.insert(name.to_string(), MeanStd { mean, std });
    }
    Ok(StudyResult {
        mechanism: MECHANISM.into(),
        fit,
        epsilon_dp: params.epsilon_dp,
        n_trials: params.n_trials,
        seed: params.seed,
        params: out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn zipfish(m: u64, scale: f64) -> FrequencyCorpus {
        FrequencyCorpus::from_counts(
            (1..=m)
                .map(|i| (scale / (i as f64).powf(0.8)).ceil() as u64)
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn huge_epsilon_is_identity() {
        let c = zipfish(500, 1e4);
        let p = PerturbParams {
            epsilon_dp: 1e6,
            n_trials: 1,
            seed: 3,
        };
        assert_eq!(perturb(&c, &p).unwrap(), c);
    }

    #[test]
    fn seeded_output_is_stable() {
        let c = zipfish(500, 1e4);
        let p = PerturbParams {
            epsilon_dp: 0.25,
            n_trials: 1,
            seed: 42,
        };
        assert_eq!(perturb(&c, &p).unwrap(), perturb(&c, &p).unwrap());
        let q = PerturbParams { seed: 43, ..p };
        assert_ne!(perturb(&c, &p).unwrap(), perturb(&c, &q).unwrap());
    }

    #[test]
    fn mean_noise_matches_law() {
        let c = zipfish(20_000, 1e3);
        for eps in [0.25, 0.5, 1.0] {
            let l1: Vec<f64> = (0..100)
                .map(|s| {
                    let noisy = noisy_counts(&c, eps, s).unwrap();
                    noisy
                        .iter()
                        .zip(c.counts())
                        .map(|(&x, &f)| (x - f as i64).unsigned_abs() as f64)
                        .sum()
                })
                .collect();
            let (mean, sd) = mean_std(&l1);
            let expected = c.n_distinct() as f64 * expected_abs_noise(eps);
            assert!(
                (mean - expected).abs() <= 3.0 * sd / 10.0 + 1e-9,
                "eps {eps}: {mean} vs {expected}"
            );
        }
    }

    #[test]
    fn zero_noise_study_has_zero_spread() {
        let c = zipfish(300, 1e4);
        let p = PerturbParams {
            epsilon_dp: 1e6,
            n_trials: 2,
            seed: 0,
        };
        for fit in [FitKind::CdfLls, FitKind::PdfLls] {
            let study = fit_impact_study(&c, &p, fit).unwrap();
            assert!(study.params.values().all(|s| s.std == 0.0));
            assert_eq!(study.n_trials, 2);
            assert_eq!(study.mechanism, MECHANISM);
        }
        let one = PerturbParams { n_trials: 1, ..p };
        assert!(fit_impact_study(&c, &one, FitKind::CdfLls).is_err());
    }

    #[test]
    fn failing_trial_is_named() {
        let c = FrequencyCorpus::from_counts(vec![4, 3]).unwrap();
        let p = PerturbParams {
            epsilon_dp: 1e6,
            n_trials: 3,
            seed: 0,
        };
        let err = fit_impact_study(&c, &p, FitKind::PdfLls).unwrap_err();
        assert!(matches!(err, Error::Trial { .. }));
        assert!(err.to_string().starts_with("trial "));
    }

    proptest! {
        #[test]
        fn perturbed_corpus_is_valid(counts in prop::collection::vec(1u64..30, 1..200), eps in 0.05f64..5.0, seed in any::<u64>()) {
            let c = FrequencyCorpus::from_counts(counts).unwrap();
            let out = perturb(&c, &PerturbParams { epsilon_dp: eps, n_trials: 1, seed }).unwrap();
            prop_assert!(out.counts().windows(2).all(|w| w[0] >= w[1]));
            prop_assert!(out.counts().iter().all(|&f| f >= 1));
            prop_assert_eq!(out.n_users(), out.counts().iter().sum::<u64>());
        }
    }
}
