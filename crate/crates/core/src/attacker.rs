//! The rational attacker.
//!
//! An attacker with threshold `t` tries the `t` most likely passwords in
//! order and stops at the first hit. With value `v` per cracked password,
//! cost `k` per guess and diminishing-returns exponent `a`:
//!
//! ```text
//! C(t)  = k * ( t (1 - lambda_t) + sum_{j<=t} j p_j )
//! R(t)  = v * lambda_t^a
//! MC(t) = C(t) - C(t-1) = k (1 - lambda_{t-1})
//! MR(t) = R(t) - R(t-1) = v (lambda_t^a - lambda_{t-1}^a)
//! ```
//!
//! The attacker picks `t* = argmax_t R(t) - C(t)`.
//!
//! Two search modes are provided. `BruteForce` evaluates the utility at
//! every threshold and is authoritative. `MarginalScan` applies the local
//! stopping rule "keep guessing while `MR(t) >= MC(t)`". The two agree
//! whenever `MR - MC` changes sign at most once (from non-negative to
//! negative). They can disagree otherwise, for instance on flat stretches of
//! the distribution where the marginal cost keeps falling while the marginal
//! revenue stays constant; [`compare_modes`] reports such cases.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::{distributions::PasswordDistribution, numeric::KahanSum, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttackerParams {
    /// Value of one cracked password.
    pub v: f64,
    /// Cost of one guess (same unit as `v`).
    pub k: f64,
    /// Diminishing-returns exponent in `(0, 1]`.
    pub a: f64,
}

impl AttackerParams {
    pub fn new(v: f64, k: f64, a: f64) -> Result<Self> {
        let p = Self { v, k, a };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.v >= 0.0 && self.v.is_finite()) {
            return Err(Error::Domain(format!(
                "v must be finite and >= 0, got {}",
                self.v
            )));
        }
        if !(self.k > 0.0 && self.k.is_finite()) {
            return Err(Error::Domain(format!(
                "k must be finite and > 0, got {}",
                self.k
            )));
        }
        if !(self.a > 0.0 && self.a <= 1.0) {
            return Err(Error::Domain(format!(
                "a must lie in (0, 1], got {}",
                self.a
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AttackMode {
    MarginalScan,
    BruteForce,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttackOutcome {
    pub t_star: u64,
    pub fraction_cracked: f64,
    pub utility: f64,
    pub mode: AttackMode,
}

/// `R(t)`, `C(t)`, `MR(t)`, `MC(t)` at a single threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GuessingCurves {
    pub t: u64,
    pub revenue: f64,
    pub cost: f64,
    pub marginal_revenue: f64,
    pub marginal_cost: f64,
}

/// Walks thresholds `t = 0, 1, 2, ...` keeping `lambda_t` and the
/// compensated sum `sum_{j<=t} j p_j`.
struct Walker<'a> {
    dist: &'a PasswordDistribution,
    params: AttackerParams,
    t: u64,
    lambda: f64,
    weighted: KahanSum,
}

impl<'a> Walker<'a> {
    fn new(dist: &'a PasswordDistribution, params: AttackerParams) -> Self {
        Self {
            dist,
            params,
            t: 0,
            lambda: 0.0,
            weighted: KahanSum::new(),
        }
    }

    fn revenue(&self) -> f64 {
        revenue(self.params, self.lambda)
    }

    fn cost(&self) -> f64 {
        self.params.k * (self.t as f64 * (1.0 - self.lambda).max(0.0) + self.weighted.value())
    }

    fn utility(&self) -> f64 {
        self.revenue() - self.cost()
    }

    /// `(MR, MC)` of moving to `t + 1`, without moving.
    fn peek_marginals(&self) -> (f64, f64) {
        let next = self.dist.lambda(self.t + 1);
        let mr = self.params.v * (next.powf(self.params.a) - self.lambda.powf(self.params.a));
        let mc = self.params.k * (1.0 - self.lambda).max(0.0);
        (mr, mc)
    }

    fn step(&mut self) {
        self.t += 1;
        self.weighted.add(self.t as f64 * self.dist.p(self.t));
        self.lambda = self.dist.lambda(self.t);
    }
}

fn revenue(params: AttackerParams, lambda: f64) -> f64 {
    if lambda <= 0.0 {
        0.0
    } else {
        params.v * lambda.powf(params.a)
    }
}

pub fn guessing_curves(
    dist: &PasswordDistribution,
    t: u64,
    params: AttackerParams,
) -> Result<GuessingCurves> {
    params.validate()?;
    if t > dist.support() {
        return Err(Error::Range(format!(
            "threshold {t} exceeds support {}",
            dist.support()
        )));
    }
    let mut w = Walker::new(dist, params);
    while w.t < t {
        w.step();
    }
    let (marginal_revenue, marginal_cost) = if t == 0 {
        (0.0, 0.0)
    } else {
        let lam_prev = dist.lambda(t - 1);
        (
            params.v * (w.lambda.powf(params.a) - lam_prev.powf(params.a)),
            params.k * (1.0 - lam_prev),
        )
    };
    Ok(GuessingCurves {
        t,
        revenue: w.revenue(),
        cost: w.cost(),
        marginal_revenue,
        marginal_cost,
    })
}

/// Optimal threshold for `params` against `dist`.
pub fn optimal_threshold(
    dist: &PasswordDistribution,
    params: AttackerParams,
    mode: AttackMode,
) -> Result<AttackOutcome> {
    params.validate()?;
    let support = dist.support();
    if support == u64::MAX {
        return Err(Error::Unsupported(
            "distribution support is unbounded".into(),
        ));
    }
    let mut w = Walker::new(dist, params);
    match mode {
        AttackMode::BruteForce => {
            let mut best = (0u64, 0.0f64, 0.0f64);
            let slack = 1e-9 * params.v.max(1.0);
            while w.t < support {
                // Revenue never exceeds v and cost never falls, so no later
                // threshold can beat the best one once v - C(t) drops below it.
                if params.v - w.cost() < best.2 - slack {
                    break;
                }
                w.step();
                let u = w.utility();
                // Strict comparison: ties go to the smaller threshold.
                if u > best.2 {
                    best = (w.t, w.lambda, u);
                }
            }
            Ok(AttackOutcome {
                t_star: best.0,
                fraction_cracked: best.1,
                utility: best.2,
                mode,
            })
        }
        AttackMode::MarginalScan => {
            while w.t < support {
                let (mr, mc) = w.peek_marginals();
                if mr < mc {
                    break;
                }
                w.step();
            }
            Ok(AttackOutcome {
                t_star: w.t,
                fraction_cracked: w.lambda,
                utility: w.utility(),
                mode,
            })
        }
    }
}

/// Both search modes side by side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeComparison {
    pub brute_force: AttackOutcome,
    pub marginal_scan: AttackOutcome,
    /// Utilities differ by more than `1e-9` (relative to `max(1, |U|)`).
    pub diverged: bool,
    /// Some threshold past the scan's stopping point again has `MR >= MC`,
    /// so the stopping rule was only locally optimal.
    pub marginal_recrossing: bool,
}

impl ModeComparison {
    /// The outcome to act on: brute force is authoritative.
    pub fn authoritative(&self) -> AttackOutcome {
        self.brute_force
    }
}

pub fn compare_modes(
    dist: &PasswordDistribution,
    params: AttackerParams,
) -> Result<ModeComparison> {
    let brute_force = optimal_threshold(dist, params, AttackMode::BruteForce)?;
    let marginal_scan = optimal_threshold(dist, params, AttackMode::MarginalScan)?;
    let scale = brute_force.utility.abs().max(1.0);
    let diverged = (brute_force.utility - marginal_scan.utility).abs() > 1e-9 * scale;
    let mut marginal_recrossing = false;
    let mut prev = dist.lambda(marginal_scan.t_star);
    for t in marginal_scan.t_star + 2..=dist.support() {
        let lam = dist.lambda(t);
        let mr = params.v * (lam.powf(params.a) - prev.powf(params.a));
        let mc = params.k * (1.0 - prev);
        if mr >= mc {
            marginal_recrossing = true;
            break;
        }
        prev = lam;
    }
    Ok(ModeComparison {
        brute_force,
        marginal_scan,
        diverged,
        marginal_recrossing,
    })
}

/// Lower bound on the fraction cracked when attackers compete and only the
/// first to crack a password profits:
/// `min_{p in [0,1]} max{ crack_curve(p v), 1 - p }`.
///
/// `p` is scanned on a uniform grid of `grid` points, then once more on a
/// grid of the same size spanning the neighbours of the best grid point.
pub fn competition_lower_bound<F>(mut crack_curve: F, v: f64, grid: usize) -> f64
where
    F: FnMut(f64) -> f64,
{
    assert!(
        grid >= 2,
        "competition_lower_bound needs at least 2 grid points"
    );
    let mut objective = |p: f64| crack_curve(p * v).max(1.0 - p);
    let scan = |lo: f64, hi: f64, objective: &mut dyn FnMut(f64) -> f64| {
        let mut best = (lo, f64::INFINITY);
        for i in 0..grid {
            let p = lo + (hi - lo) * i as f64 / (grid - 1) as f64;
            let val = objective(p);
            if val < best.1 {
                best = (p, val);
            }
        }
        best
    };
    let coarse = scan(0.0, 1.0, &mut objective);
    let h = 1.0 / (grid - 1) as f64;
    let fine = scan(
        (coarse.0 - h).max(0.0),
        (coarse.0 + h).min(1.0),
        &mut objective,
    );
    coarse.1.min(fine.1)
}

/// Memoised `v' -> fraction cracked` for a fixed distribution and cost.
pub struct CrackCurve<'a> {
    dist: &'a PasswordDistribution,
    k: f64,
    a: f64,
    cache: HashMap<u64, f64>,
}

impl<'a> CrackCurve<'a> {
    pub fn new(dist: &'a PasswordDistribution, k: f64, a: f64) -> Self {
        Self {
            dist,
            k,
            a,
            cache: HashMap::new(),
        }
    }

    pub fn fraction(&mut self, v: f64) -> Result<f64> {
        if let Some(&f) = self.cache.get(&v.to_bits()) {
            return Ok(f);
        }
        let params = AttackerParams::new(v, self.k, self.a)?;
        let f = optimal_threshold(self.dist, params, AttackMode::BruteForce)?.fraction_cracked;
        self.cache.insert(v.to_bits(), f);
        Ok(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::DistSpec;
    use proptest::prelude::*;

    fn uniform(n: usize) -> PasswordDistribution {
        PasswordDistribution::new(&DistSpec::Empirical { counts: vec![1; n] }).unwrap()
    }

    #[test]
    fn empty_guess_list() {
        let d = uniform(4);
        let c = guessing_curves(&d, 0, AttackerParams::new(10.0, 1.0, 1.0).unwrap()).unwrap();
        assert_eq!((c.revenue, c.cost), (0.0, 0.0));
        let c = guessing_curves(&d, 1, AttackerParams::new(10.0, 2.5, 0.7).unwrap()).unwrap();
        assert_eq!(c.marginal_cost, 2.5);
    }

    #[test]
    fn uniform_four_curves() {
        let d = uniform(4);
        let c = guessing_curves(&d, 2, AttackerParams::new(10.0, 1.0, 1.0).unwrap()).unwrap();
        assert!((c.marginal_cost - 0.75).abs() < 1e-15);
        assert!((c.marginal_revenue - 2.5).abs() < 1e-15);
        assert!((c.cost - 1.75).abs() < 1e-15);
        assert!((c.revenue - 5.0).abs() < 1e-15);
        assert!(matches!(
            guessing_curves(&d, 5, AttackerParams::new(1.0, 1.0, 1.0).unwrap()),
            Err(Error::Range(_))
        ));
    }

    #[test]
    fn uniform_four_optimal() {
        let d = uniform(4);
        for mode in [AttackMode::BruteForce, AttackMode::MarginalScan] {
            let o =
                optimal_threshold(&d, AttackerParams::new(10.0, 1.0, 1.0).unwrap(), mode).unwrap();
            assert_eq!(o.t_star, 4);
            assert_eq!(o.fraction_cracked, 1.0);
            assert!((o.utility - 7.5).abs() < 1e-12);

            let o =
                optimal_threshold(&d, AttackerParams::new(1.0, 1.0, 1.0).unwrap(), mode).unwrap();
            assert_eq!(o.t_star, 0);
            assert_eq!(o.utility, 0.0);
        }
    }

    #[test]
    fn scan_stops_early_on_flat_distribution() {
        // v = 3: MR(1) = 0.75 < MC(1) = 1, yet cracking everything pays 3 - 2.5 = 0.5.
        let d = uniform(4);
        let params = AttackerParams::new(3.0, 1.0, 1.0).unwrap();
        let cmp = compare_modes(&d, params).unwrap();
        assert_eq!(cmp.marginal_scan.t_star, 0);
        assert_eq!(cmp.brute_force.t_star, 4);
        assert!((cmp.brute_force.utility - 0.5).abs() < 1e-12);
        assert!(cmp.diverged && cmp.marginal_recrossing);
        assert_eq!(cmp.authoritative(), cmp.brute_force);
    }

    #[test]
    fn competition_bound_extremes() {
        assert_eq!(competition_lower_bound(|_| 1.0, 10.0, 101), 1.0);
        assert_eq!(competition_lower_bound(|_| 0.0, 10.0, 101), 0.0);
    }

    #[test]
    fn competition_bound_step_curve() {
        // 0 below v/2, 0.6 from v/2 on. Independent fine-grid oracle.
        let v = 8.0;
        let step = |x: f64| -> f64 {
            if x < v / 2.0 {
                0.0
            } else {
                0.6
            }
        };
        let oracle = (0..=1_000_000)
            .map(|i| i as f64 / 1e6)
            .map(|p| step(p * v).max(1.0 - p))
            .fold(f64::INFINITY, f64::min);
        let bound = competition_lower_bound(step, v, 1001);
        assert!((oracle - 0.5).abs() < 2e-6);
        assert!(
            (bound - oracle).abs() < 2e-6,
            "bound {bound}, oracle {oracle}"
        );
    }

    #[test]
    fn crack_curve_is_memoised_and_monotone() {
        let d = PasswordDistribution::cdf_zipf(0.05, 0.4, None).unwrap();
        let mut curve = CrackCurve::new(&d, 1.0, 1.0);
        let mut prev = 0.0;
        for e in 0..8 {
            let f = curve.fraction(10f64.powi(e)).unwrap();
            assert!(f >= prev);
            prev = f;
        }
        assert_eq!(curve.fraction(1e3).unwrap(), curve.fraction(1e3).unwrap());
    }

    fn random_dist(weights: &[u64]) -> PasswordDistribution {
        PasswordDistribution::new(&DistSpec::Empirical {
            counts: weights.to_vec(),
        })
        .unwrap()
    }

    proptest! {
        #[test]
        fn marginals_are_differences(weights in prop::collection::vec(1u64..500, 1..40),
                                     v in 0.0f64..200.0, k in 0.1f64..5.0, a in 0.5f64..=1.0) {
            let d = random_dist(&weights);
            let params = AttackerParams::new(v, k, a).unwrap();
            let mut prev = guessing_curves(&d, 0, params).unwrap();
            let (mut r_acc, mut c_acc) = (0.0, 0.0);
            for t in 1..=d.support() {
                let cur = guessing_curves(&d, t, params).unwrap();
                let scale = cur.cost.abs().max(cur.revenue.abs()).max(1.0);
                prop_assert!((cur.marginal_cost - (cur.cost - prev.cost)).abs() <= 1e-9 * scale);
                prop_assert!((cur.marginal_revenue - (cur.revenue - prev.revenue)).abs() <= 1e-9 * scale);
                prop_assert!(cur.marginal_cost <= prev.marginal_cost || t == 1);
                prop_assert!(cur.marginal_cost >= 0.0 && cur.marginal_cost <= k);
                prop_assert!(cur.marginal_revenue >= 0.0);
                r_acc += cur.marginal_revenue;
                c_acc += cur.marginal_cost;
                prop_assert!((r_acc - cur.revenue).abs() <= 1e-9 * scale);
                prop_assert!((c_acc - cur.cost).abs() <= 1e-9 * scale);
                prev = cur;
            }
        }

        #[test]
        fn brute_force_matches_naive_argmax(weights in prop::collection::vec(1u64..500, 1..40),
                                            v in 0.0f64..500.0, k in 0.1f64..5.0, a in 0.5f64..=1.0) {
            let d = random_dist(&weights);
            let total: u64 = weights.iter().sum();
            let mut sorted = weights.clone();
            sorted.sort_unstable_by(|x, y| y.cmp(x));
            let p: Vec<f64> = sorted.iter().map(|&w| w as f64 / total as f64).collect();
            let mut best = (0usize, 0.0f64);
            for t in 1..=p.len() {
                let lam: f64 = p[..t].iter().sum();
                let weighted: f64 = p[..t].iter().enumerate().map(|(j, q)| (j + 1) as f64 * q).sum();
                let u = v * lam.powf(a) - k * (t as f64 * (1.0 - lam) + weighted);
                if u > best.1 + 1e-9 {
                    best = (t, u);
                }
            }
            let o = optimal_threshold(&d, AttackerParams::new(v, k, a).unwrap(), AttackMode::BruteForce).unwrap();
            prop_assert!((o.utility - best.1).abs() <= 1e-9 * v.max(1.0), "{} vs {}", o.utility, best.1);
        }

        #[test]
        fn fraction_monotone_in_v_and_k(weights in prop::collection::vec(1u64..500, 1..40), a in 0.5f64..=1.0) {
            let d = random_dist(&weights);
            let mut prev = 0.0;
            for i in 0..20 {
                let v = 0.5 * 1.6f64.powi(i);
                let o = optimal_threshold(&d, AttackerParams::new(v, 1.0, a).unwrap(), AttackMode::BruteForce).unwrap();
                prop_assert!(o.fraction_cracked >= prev);
                prop_assert!(o.utility >= 0.0);
                prop_assert!((o.fraction_cracked - d.lambda(o.t_star)).abs() <= 1e-12);
                prev = o.fraction_cracked;
            }
            let mut prev = 1.0;
            for i in 0..20 {
                let k = 0.01 * 1.6f64.powi(i);
                let o = optimal_threshold(&d, AttackerParams::new(50.0, k, a).unwrap(), AttackMode::BruteForce).unwrap();
                prop_assert!(o.fraction_cracked <= prev);
                prev = o.fraction_cracked;
            }
        }
    }
}
