//! Model-independent bounds on how many users of a corpus a rational
//! attacker cracks (with `a = 1`), for value-to-cost ratios tied to `N * L`.
//!
//! * Lower bound, valid when `V/k >= N L`:
//!   `sum_{f_i >= j} f_i - N / ((j-1)! L^(j-1))`.
//! * Upper bound, valid when `V/k <= N L (1 - (1+eps) H / N)` with
//!   `H = sum_{i<=t} f_i`, except with probability
//!   `exp(-eps^2 H / (2 (1+eps)^2))`:
//!   `sum_{f_i > j} f_i + mu(N, L, j)`, where
//!   `mu = (sum_{0 < f_i <= j} f_i) * P[Binomial(N-1, 1/(N L)) < j]`.

use serde::{Deserialize, Serialize};

use crate::{corpus::FrequencyCorpus, Error, Result};

pub const DEFAULT_EPS: f64 = 0.001;
pub const DEFAULT_HEAD_MASS: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsParams {
    pub j: u64,
    #[serde(rename = "L")]
    pub l: f64,
    pub eps: f64,
    pub t: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsResult {
    /// Bound on the expected number of cracked users, clamped to `[0, N]`.
    pub bound_count: f64,
    /// The formula value before clamping.
    pub bound_count_raw: f64,
    pub bound_fraction: f64,
    pub mu: Option<f64>,
    /// Computed from the corpus head mass rather than true probabilities.
    pub failure_prob: Option<f64>,
    /// The `V/k` the bound is tied to: `N L` for the lower bound, the
    /// largest admissible ratio for the upper bound.
    pub v_over_k: f64,
}

fn check_l(l: f64) -> Result<()> {
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::Domain(format!("L must be finite and > 0, got {l}")));
    }
    Ok(())
}

pub fn lower_bound_cracked(corpus: &FrequencyCorpus, j: u64, l: f64) -> Result<BoundsResult> {
    if j < 1 {
        return Err(Error::Domain("j must be >= 1".into()));
    }
    check_l(l)?;
    let n = corpus.n_users() as f64;
    let heavy: u64 = corpus.counts().iter().take_while(|&&f| f >= j).sum();
    let mut penalty = n;
    for i in 1..j {
        penalty /= i as f64 * l;
        if penalty == 0.0 {
            break;
        }
    }
    let raw = heavy as f64 - penalty;
    let count = raw.clamp(0.0, n);
    Ok(BoundsResult {
        bound_count: count,
        bound_count_raw: raw,
        bound_fraction: if n > 0.0 { count / n } else { 0.0 },
        mu: None,
        failure_prob: None,
        v_over_k: n * l,
    })
}

/// `P[Binomial(N-1, 1/(N L)) < j]`, summed in log space.
pub fn binomial_tail_below(n: u64, l: f64, j: u64) -> Result<f64> {
    check_l(l)?;
    let nl = n as f64 * l;
    if nl <= 1.0 {
        return Err(Error::Domain(format!("N*L must exceed 1, got {nl}")));
    }
    if j == 0 || n == 0 {
        return Ok(0.0);
    }
    let trials = n - 1;
    let top = j.min(trials + 1);
    let mut ln_term = trials as f64 * (-1.0 / nl).ln_1p();
    let ln_denom = (nl - 1.0).ln();
    let mut logs = Vec::with_capacity(top as usize);
    for ell in 0..top {
        logs.push(ln_term);
        if ell + 1 < top {
            ln_term += ((trials - ell) as f64).ln() - ((ell + 1) as f64).ln() - ln_denom;
        }
    }
    let peak = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = logs.iter().map(|&x| (x - peak).exp()).sum();
    Ok((peak + sum.ln()).exp().min(1.0))
}

pub fn mu(corpus: &FrequencyCorpus, l: f64, j: u64) -> Result<f64> {
    let light: u64 = corpus.counts().iter().filter(|&&f| f <= j).sum();
    Ok(light as f64 * binomial_tail_below(corpus.n_users(), l, j)?)
}

/// Smallest rank whose head holds at least `mass` of the users.
pub fn default_head_rank(corpus: &FrequencyCorpus, mass: f64) -> usize {
    let target = mass * corpus.n_users() as f64;
    let mut acc = 0u64;
    for (i, &f) in corpus.counts().iter().enumerate() {
        acc += f;
        if acc as f64 >= target {
            return i + 1;
        }
    }
    corpus.n_distinct()
}

pub fn upper_bound_cracked(
    corpus: &FrequencyCorpus,
    j: u64,
    l: f64,
    eps: f64,
    t: usize,
) -> Result<BoundsResult> {
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("eps must be > 0, got {eps}")));
    }
    if t > corpus.n_distinct() {
        return Err(Error::Range(format!(
            "t = {t} exceeds {} distinct passwords",
            corpus.n_distinct()
        )));
    }
    let mu = mu(corpus, l, j)?;
    let n = corpus.n_users() as f64;
    let heavy: u64 = corpus.counts().iter().take_while(|&&f| f > j).sum();
    let head = corpus.head_mass(t) as f64;
    let failure_prob = (-eps * eps * head / (2.0 * (1.0 + eps) * (1.0 + eps))).exp();
    let raw = heavy as f64 + mu;
    let count = raw.clamp(0.0, n);
    Ok(BoundsResult {
        bound_count: count,
        bound_count_raw: raw,
        bound_fraction: if n > 0.0 { count / n } else { 0.0 },
        mu: Some(mu),
        failure_prob: Some(failure_prob),
        v_over_k: n * l * (1.0 - (1.0 + eps) * head / n),
    })
}

/// The `L` for which the upper bound's admissible ratio equals `v_over_k`.
pub fn l_for_upper_bound(
    corpus: &FrequencyCorpus,
    v_over_k: f64,
    eps: f64,
    t: usize,
) -> Result<f64> {
    let n = corpus.n_users() as f64;
    let shrink = 1.0 - (1.0 + eps) * corpus.head_mass(t) as f64 / n;
    if !(shrink > 0.0) {
        return Err(Error::Domain(format!(
            "(1+eps) * head mass must stay below N (factor {shrink})"
        )));
    }
    Ok(v_over_k / (n * shrink))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, ToPrimitive, Zero};
    use proptest::prelude::*;

    fn corpus(c: Vec<u64>) -> FrequencyCorpus {
        FrequencyCorpus::from_counts(c).unwrap()
    }

    /// Exact `P[Binomial(N-1, 1/(N L)) < j]` for rational `L = num / den`.
    fn exact_tail(n: u64, num: u64, den: u64, j: u64) -> f64 {
        let q = BigRational::new(BigInt::from(den), BigInt::from(n * num));
        let one_minus = BigRational::one() - &q;
        let mut total = BigRational::zero();
        let mut binom = BigInt::one();
        for ell in 0..j.min(n) {
            if ell > 0 {
                binom = binom * BigInt::from(n - ell) / BigInt::from(ell);
            }
            let mut term = BigRational::from_integer(binom.clone());
            for _ in 0..ell {
                term *= &q;
            }
            for _ in 0..(n - 1 - ell) {
                term *= &one_minus;
            }
            total += term;
        }
        total.to_f64().unwrap()
    }

    #[test]
    fn lower_bound_examples() {
        let c = corpus(vec![5, 1, 1, 1, 1, 1]);
        let b = lower_bound_cracked(&c, 2, 10.0).unwrap();
        assert!((b.bound_count_raw - 4.0).abs() < 1e-12);
        assert_eq!(b.v_over_k, 100.0);
        let b = lower_bound_cracked(&c, 1, 3.0).unwrap();
        assert_eq!(b.bound_count_raw, 0.0);
        let b = lower_bound_cracked(&c, 6, 0.1).unwrap();
        assert!(b.bound_count_raw < 0.0 && b.bound_count == 0.0);
    }

    #[test]
    fn upper_bound_examples() {
        let c = corpus(vec![1, 1]);
        let b = upper_bound_cracked(&c, 1, 1.0, 0.1, 1).unwrap();
        assert!((b.mu.unwrap() - 1.0).abs() < 1e-12);
        assert!((b.bound_count - 1.0).abs() < 1e-12);

        let c = corpus(vec![9, 3, 2, 1]);
        let b = upper_bound_cracked(&c, 0, 10.0, 0.1, 2).unwrap();
        assert_eq!(b.mu, Some(0.0));
        assert_eq!(b.bound_count, 15.0);

        let b = upper_bound_cracked(&c, 2, 10.0, 1e-12, 2).unwrap();
        assert!((b.failure_prob.unwrap() - 1.0).abs() < 1e-9);
        assert!(matches!(
            upper_bound_cracked(&c, 2, 1.0 / 15.0, 0.1, 1),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            upper_bound_cracked(&c, 2, 10.0, 0.1, 5),
            Err(Error::Range(_))
        ));
    }

    #[test]
    fn tail_matches_exact_arithmetic() {
        for &(n, num, den, j) in &[
            (2, 1, 1, 1),
            (10, 3, 2, 3),
            (100, 10, 1, 2),
            (500, 7, 3, 5),
            (500, 1, 100, 8),
            (37, 1, 20, 30),
        ] {
            let fast = binomial_tail_below(n, num as f64 / den as f64, j).unwrap();
            let exact = exact_tail(n, num, den, j);
            assert!(
                (fast - exact).abs() <= 1e-9 * exact,
                "n={n} L={num}/{den} j={j}: {fast} vs {exact}"
            );
        }
    }

    #[test]
    fn tail_survives_large_n() {
        let p = binomial_tail_below(70_000_000, 10.0, 3).unwrap();
        // Poisson(0.1) limit.
        let poisson = (-0.1f64).exp() * (1.0 + 0.1 + 0.005);
        assert!((p - poisson).abs() < 1e-6);
    }

    #[test]
    fn head_rank() {
        let c = corpus(vec![5, 3, 1, 1]);
        assert_eq!(default_head_rank(&c, 0.1), 1);
        assert_eq!(default_head_rank(&c, 0.6), 2);
        assert_eq!(default_head_rank(&c, 1.0), 4);
        let l = l_for_upper_bound(&c, 50.0, 0.001, 1).unwrap();
        let b = upper_bound_cracked(&c, 1, l, 0.001, 1).unwrap();
        assert!((b.v_over_k - 50.0).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn mu_monotone(counts in prop::collection::vec(1u64..20, 1..400), l in 0.5f64..50.0, j in 0u64..8) {
            let c = corpus(counts);
            prop_assume!(c.n_users() as f64 * l > 1.0);
            let base = mu(&c, l, j).unwrap();
            prop_assert!(mu(&c, l * 1.5, j).unwrap() >= base * (1.0 - 1e-12));
            prop_assert!(mu(&c, l, j + 1).unwrap() >= base * (1.0 - 1e-12));
        }

        #[test]
        fn lower_bound_grows_with_l(counts in prop::collection::vec(1u64..50, 1..200), l in 0.5f64..50.0, j in 1u64..6) {
            let c = corpus(counts);
            let a = lower_bound_cracked(&c, j, l).unwrap();
            let b = lower_bound_cracked(&c, j, l * 2.0).unwrap();
            prop_assert!(b.bound_count_raw >= a.bound_count_raw - 1e-9);
            prop_assert!((0.0..=1.0).contains(&a.bound_fraction));
        }
    }
}
