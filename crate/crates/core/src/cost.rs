//! Defender cost models and dollar conversions.
//!
//! Guess costs are measured either in dollars or in units of one hash
//! evaluation `C_H`. An iterated hash with `tau` rounds costs `tau` units.
//! A memory-hard function filling memory for `tau` steps costs
//! `tau * C_H + tau^2 * C_mem` dollars.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{
    attacker::{optimal_threshold, AttackMode, AttackerParams},
    distributions::PasswordDistribution,
    Error, Result,
};

/// Dollars per hash evaluation.
pub const DEFAULT_C_HASH: f64 = 7e-15;
/// Dollars per block-timestep of memory.
pub const DEFAULT_C_MEM: f64 = DEFAULT_C_HASH / 3000.0;
/// Rounds that take roughly one second of defender time.
pub const TAU_ONE_SECOND: f64 = 1e7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CostKind {
    Iterated,
    Mhf,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    pub kind: CostKind,
    pub tau: f64,
    pub c_hash: f64,
    pub c_mem: f64,
}

impl CostModel {
    pub fn new(kind: CostKind, tau: f64) -> Self {
        Self {
            kind,
            tau,
            c_hash: DEFAULT_C_HASH,
            c_mem: DEFAULT_C_MEM,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau >= 0.0 && self.tau.is_finite()) {
            return Err(Error::Domain(format!(
                "tau must be finite and >= 0, got {}",
                self.tau
            )));
        }
        if !(self.c_hash > 0.0) {
            return Err(Error::Domain(format!(
                "c_hash must be > 0, got {}",
                self.c_hash
            )));
        }
        if !(self.c_mem >= 0.0) {
            return Err(Error::Domain(format!(
                "c_mem must be >= 0, got {}",
                self.c_mem
            )));
        }
        Ok(())
    }

    pub fn to_dollars(&self, units: f64) -> f64 {
        units * self.c_hash
    }

    pub fn to_units(&self, dollars: f64) -> f64 {
        dollars / self.c_hash
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HashCost {
    pub k_units: f64,
    pub k_dollars: f64,
}

pub fn hash_cost(model: &CostModel) -> Result<HashCost> {
    model.validate()?;
    Ok(match model.kind {
        CostKind::Iterated => HashCost {
            k_units: model.tau,
            k_dollars: model.tau * model.c_hash,
        },
        CostKind::Mhf => {
            let k_dollars = model.tau * model.c_hash + model.tau * model.tau * model.c_mem;
            HashCost {
                k_units: k_dollars / model.c_hash,
                k_dollars,
            }
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValueSpec {
    /// Market price of one password, in dollars.
    pub price_observed: f64,
    /// Fraction of the corpus sold at that price.
    pub q_observed: f64,
    pub a: f64,
}

/// Value of a cracked password when a fraction `q` sells for `price` each:
/// `price * q^(1 - a)`.
pub fn extrapolate_value(spec: &ValueSpec) -> Result<f64> {
    if !(spec.q_observed > 0.0 && spec.q_observed <= 1.0) {
        return Err(Error::Domain(format!(
            "q must lie in (0, 1], got {}",
            spec.q_observed
        )));
    }
    if !(spec.a > 0.0 && spec.a <= 1.0) {
        return Err(Error::Domain(format!(
            "a must lie in (0, 1], got {}",
            spec.a
        )));
    }
    if !(spec.price_observed >= 0.0) {
        return Err(Error::Domain(format!(
            "price must be >= 0, got {}",
            spec.price_observed
        )));
    }
    Ok(spec.price_observed * spec.q_observed.powf(1.0 - spec.a))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrackPoint {
    pub tau: f64,
    pub log2_tau: f64,
    pub k_units: f64,
    pub k_dollars: f64,
    pub pct_cracked: f64,
}

/// Fraction cracked (in percent) as a function of the hash cost parameter.
pub fn crack_curve_vs_tau(
    dist: &PasswordDistribution,
    v_dollars: f64,
    kind: CostKind,
    c_hash: f64,
    c_mem: f64,
    tau_grid: &[f64],
    a: f64,
) -> Result<Vec<CrackPoint>> {
    if !(v_dollars >= 0.0) {
        return Err(Error::Domain(format!("v must be >= 0, got {v_dollars}")));
    }
    tau_grid
        .par_iter()
        .map(|&tau| {
            let model = CostModel {
                kind,
                tau,
                c_hash,
                c_mem,
            };
            let cost = hash_cost(&model)?;
            let v_units = model.to_units(v_dollars);
            let fraction = if cost.k_units == 0.0 {
                // Free guesses: any positive value cracks everything.
                if v_units > 0.0 {
                    1.0 - dist.unguessable_mass()
                } else {
                    0.0
                }
            } else {
                let params = AttackerParams::new(v_units / cost.k_units, 1.0, a)?;
                optimal_threshold(dist, params, AttackMode::BruteForce)?.fraction_cracked
            };
            Ok(CrackPoint {
                tau,
                log2_tau: tau.log2(),
                k_units: cost.k_units,
                k_dollars: cost.k_dollars,
                pct_cracked: 100.0 * fraction,
            })
        })
        .collect()
}
