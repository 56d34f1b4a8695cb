//! Power iteration on T*T over exact finite supports.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::sparse::SparseFunction;
use super::ResolvedChain;
use crate::error::{Error, Result};
use crate::rng::substream;

/// Settings for [`estimate_norm`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormConfig {
    pub max_iter: usize,
    pub seed: u64,
    /// Number of random starting points; 1 means δ_e.
    pub start_support: usize,
    /// Starting points have coordinates in [−radius, radius].
    pub start_radius: i64,
    /// Cap on the predicted support of any intermediate function.
    pub budget: u128,
    /// Stop once the relative change of the bound falls below this.
    pub tol: f64,
}

impl Default for NormConfig {
    fn default() -> Self {
        NormConfig { max_iter: 30, seed: 0, start_support: 8, start_radius: 4, budget: super::DEFAULT_BUDGET, tol: 1e-9 }
    }
}

/// Why the iteration ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    Converged,
    IterationCap,
    /// The next iterate would exceed the support budget.
    Budget,
    /// T x = 0 for the current x.
    ZeroImage,
}

/// Certified lower bound for ‖T‖ and the vector attaining it.
#[derive(Debug, Clone)]
pub struct NormEstimate {
    pub lower_bound: f64,
    /// Completed T*T applications.
    pub iterations: usize,
    /// Relative change of the bound in the last iteration.
    pub residual: f64,
    /// Support of the last computed iterate.
    pub support_size: usize,
    pub stop: StopReason,
    /// Unit vector x with ‖Tx‖ or √‖T*Tx‖ equal to the bound.
    pub witness: SparseFunction<Complex64>,
}

fn start_vector(d: usize, cfg: &NormConfig) -> Result<SparseFunction<Complex64>> {
    if cfg.start_support <= 1 {
        return Ok(SparseFunction::delta_identity(d));
    }
    let mut rng = substream(cfg.seed, "norm-start");
    SparseFunction::random(&mut rng, d, cfg.start_support, cfg.start_radius)
}

/// Lower bound max(‖Tx‖, √‖T*Tx‖) for unit x, iterated x ← T*Tx/‖T*Tx‖.
///
/// Each application is exact in floating point on the full support; the
/// iteration stops early rather than truncate when the budget is reached.
pub fn estimate_norm(op: &ResolvedChain<Complex64>, d: usize, cfg: &NormConfig) -> Result<NormEstimate> {
    let adj = op.adjoint();
    let mut x = start_vector(d, cfg)?;
    let nx = x.norm();
    x = x.scale(&Complex64::new(1.0 / nx, 0.0));
    let mut best = 0.0f64;
    let mut witness = x.clone();
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    let mut support = x.len();
    let mut stop = StopReason::IterationCap;
    if op.factors.is_empty() {
        return Ok(NormEstimate { lower_bound: 1.0, iterations: 0, residual: 0.0, support_size: support, stop: StopReason::Converged, witness: x });
    }
    while iterations < cfg.max_iter {
        let predicted = adj.support_bound(op.support_bound(x.len()).min(u128::from(u64::MAX)) as usize);
        if predicted > cfg.budget {
            if iterations == 0 {
                return Err(Error::Budget { what: "first power iteration".into(), cost: predicted, budget: cfg.budget });
            }
            stop = StopReason::Budget;
            break;
        }
        let y = op.apply(&x, cfg.budget)?;
        let ny = y.norm();
        if ny == 0.0 {
            stop = StopReason::ZeroImage;
            iterations += 1;
            break;
        }
        let z = adj.apply(&y, cfg.budget)?;
        let nz = z.norm();
        iterations += 1;
        support = z.len();
        let lb = ny.max(nz.sqrt());
        residual = if lb > 0.0 { (lb - best).abs() / lb } else { 0.0 };
        if lb > best {
            best = lb;
            witness = x.clone();
        }
        x = z.scale(&Complex64::new(1.0 / nz, 0.0));
        if residual < cfg.tol {
            stop = StopReason::Converged;
            break;
        }
    }
    Ok(NormEstimate { lower_bound: best, iterations, residual, support_size: support, stop, witness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::a0_sequence;
    use crate::transform::RadonOperator;

    fn chain(weights: &[(i64, f64)], d: usize) -> ResolvedChain<Complex64> {
        ResolvedChain::single(RadonOperator::from_real(&a0_sequence(d).unwrap(), weights).unwrap())
    }

    #[test]
    fn zero_operator() {
        let e = estimate_norm(&chain(&[], 1), 1, &NormConfig::default()).unwrap();
        assert_eq!(e.lower_bound, 0.0);
        assert_eq!(e.stop, StopReason::ZeroImage);
    }

    #[test]
    fn identity_operator() {
        let e = estimate_norm(&chain(&[(0, 1.0)], 2), 2, &NormConfig::default()).unwrap();
        assert!((e.lower_bound - 1.0).abs() < 1e-9);
        assert_eq!(e.stop, StopReason::Converged);
    }

    #[test]
    fn averaging_operator_approaches_its_norm() {
        // (f(·−1) + f(·+1))/2 on Z has norm 1, not attained.
        let e = estimate_norm(&chain(&[(-1, 0.5), (1, 0.5)], 1), 1, &NormConfig { max_iter: 30, ..Default::default() }).unwrap();
        assert!(e.lower_bound <= 1.0 + 1e-12);
        assert!(e.lower_bound > 0.95, "{}", e.lower_bound);
    }

    #[test]
    fn deterministic_given_seed() {
        let c = chain(&[(1, 0.3), (2, -0.7), (5, 0.1)], 2);
        let cfg = NormConfig { max_iter: 4, seed: 11, ..Default::default() };
        let a = estimate_norm(&c, 2, &cfg).unwrap();
        let b = estimate_norm(&c, 2, &cfg).unwrap();
        assert_eq!(a.lower_bound.to_bits(), b.lower_bound.to_bits());
    }

    #[test]
    fn budget_stop_is_graceful() {
        let w: Vec<(i64, f64)> = (1..=20).map(|n| (n, 1.0 / n as f64)).collect();
        let cfg = NormConfig { max_iter: 30, start_support: 1, budget: 20 * 20 * 20 * 20, ..Default::default() };
        let e = estimate_norm(&chain(&w, 2), 2, &cfg).unwrap();
        assert_eq!(e.stop, StopReason::Budget);
        assert!(e.iterations >= 1);
        let tight = NormConfig { budget: 10, ..cfg };
        assert!(estimate_norm(&chain(&w, 2), 2, &tight).is_err());
    }
}
