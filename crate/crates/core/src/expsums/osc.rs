//! I(β) = ∫ Φ(x,y) e^{-2πi D(x,y)·β} dx dy over R^r × R^r by tensor Gauss–Legendre.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::dpoly::{d_from_powers, Variant};
use crate::error::{Error, Result};
use crate::group::{index_len, position};
use crate::quad::{gauss_legendre, simpson, ComplexSum};

/// Product windows Φ(x, y) = ∏_j b(x_j) b(y_j).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Window {
    /// b(t) = c(1 − r t²)² on |t| ≤ 1/√r with c = min(1, 3/(8√(r/3))), so that
    /// |b| ≤ 1, |b'| ≤ 1 and Φ is supported in the product of unit balls.
    Bump,
    Zero,
}

impl Window {
    /// Half-width of the support of b.
    pub fn half_width(&self, r: usize) -> f64 {
        1.0 / (r as f64).sqrt()
    }

    pub fn amplitude(&self, r: usize) -> f64 {
        match self {
            Window::Bump => (3.0 / (8.0 * (r as f64 / 3.0).sqrt())).min(1.0),
            Window::Zero => 0.0,
        }
    }

    /// One-dimensional factor b(t).
    pub fn factor(&self, r: usize, t: f64) -> f64 {
        let s = self.half_width(r);
        if t.abs() > s {
            return 0.0;
        }
        let u = 1.0 - r as f64 * t * t;
        self.amplitude(r) * u * u
    }
}

/// Converged value and the sequence of approximations by order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscResult {
    pub value: Complex64,
    /// Gauss–Legendre points per dimension of the accepted value.
    pub order: usize,
    /// (order, value) for every order tried.
    pub trace: Vec<(usize, Complex64)>,
}

impl OscResult {
    /// |I_{k+2} − I_{k+1}| / |I_{k+1} − I_k| for consecutive doublings whose
    /// denominator exceeds `floor`.
    pub fn cauchy_ratios(&self, floor: f64) -> Vec<f64> {
        self.trace
            .windows(3)
            .filter_map(|w| {
                let den = (w[1].1 - w[0].1).norm();
                let num = (w[2].1 - w[1].1).norm();
                (den > floor).then_some(num / den)
            })
            .collect()
    }
}

/// Settings for [`osc_integral`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscConfig {
    /// First order tried; `None` picks [`resolving_order`].
    pub start_order: Option<usize>,
    pub max_order: usize,
    /// Accept once doubling changes the value by less than this.
    pub tol: f64,
    /// Extra doublings recorded after acceptance (for Cauchy ratios).
    pub extra: usize,
    /// Cap on total integrand evaluations.
    pub budget: u128,
}

impl Default for OscConfig {
    fn default() -> Self {
        OscConfig { start_order: None, max_order: 256, tol: 1e-8, extra: 0, budget: 2_000_000_000 }
    }
}

/// Tensor Gauss–Legendre with `n` points per dimension.
///
/// Each factor (x_j, y_j) contributes a weight, a phase from its one-factor D,
/// and first-layer increments u; with two factors the only coupling is the
/// cross term Σ_{l1>l2≥1} β_{l1l2} u¹_{l1} u²_{l2}.
/// Smallest power of two ≥ max(8, 2·Σ_k |β_k|): two nodes per unit frequency
/// of the full phase Σ β_k D_k, the order from which the doubling sequence is
/// in its geometric regime.
pub fn resolving_order(beta: &[f64]) -> usize {
    let m: f64 = beta.iter().map(|b| b.abs()).sum();
    ((2.0 * m).ceil() as usize).max(8).next_power_of_two()
}

fn tensor_rule(d: usize, r: usize, beta: &[f64], window: Window, variant: Variant, n: usize) -> Complex64 {
    let s = window.half_width(r);
    let (x, w) = gauss_legendre(n);
    let nodes: Vec<f64> = x.iter().map(|t| t * s).collect();
    let weights: Vec<f64> = w.iter().zip(&nodes).map(|(wi, t)| wi * s * window.factor(r, *t)).collect();
    let pows: Vec<Vec<f64>> = nodes
        .iter()
        .map(|t| {
            let mut p = vec![1.0; 2 * d + 1];
            for k in 1..=2 * d {
                p[k] = p[k - 1] * t;
            }
            p
        })
        .collect();
    let tau = 2.0 * std::f64::consts::PI;
    // Per (x-node, y-node): z = weight·e^{-2πi D₁·β} and the increments u_l.
    let mut pairs: Vec<(Complex64, Vec<f64>)> = Vec::with_capacity(n * n);
    for (i, xp) in pows.iter().enumerate() {
        for (k, yp) in pows.iter().enumerate() {
            let wt = weights[i] * weights[k];
            if wt == 0.0 {
                continue;
            }
            let h = d_from_powers(d, &[xp.as_slice()], &[yp.as_slice()], variant);
            let phase: f64 = h.iter().zip(beta).map(|(a, b)| a * b).sum();
            let inc: Vec<f64> = (1..=d).map(|l| h[position(l, 0)]).collect();
            pairs.push((Complex64::from_polar(wt, -tau * phase), inc));
        }
    }
    let mut sum = ComplexSum::default();
    for (z, _) in &pairs {
        sum.add(*z);
    }
    let single = sum.value();
    if r == 1 {
        return single;
    }
    let couplings: Vec<(usize, usize, f64)> = (2..=d)
        .flat_map(|l1| (1..l1).map(move |l2| (l1, l2)))
        .map(|(l1, l2)| (l1, l2, beta[position(l1, l2)]))
        .filter(|c| c.2 != 0.0)
        .collect();
    if couplings.is_empty() {
        return single * single;
    }
    let mut sum = ComplexSum::default();
    for (z1, u1) in &pairs {
        let mut inner = ComplexSum::default();
        for (z2, u2) in &pairs {
            let cross: f64 = couplings.iter().map(|&(l1, l2, b)| b * u1[l1 - 1] * u2[l2 - 1]).sum();
            if cross == 0.0 {
                inner.add(*z2);
            } else {
                inner.add(z2 * Complex64::from_polar(1.0, -tau * cross));
            }
        }
        sum.add(z1 * inner.value());
    }
    sum.value()
}

/// Doubles the order from `start_order` until successive values differ by less than `tol`.
pub fn osc_integral(
    beta: &[f64],
    r: usize,
    d: usize,
    window: Window,
    variant: Variant,
    cfg: &OscConfig,
) -> Result<OscResult> {
    if !(1..=2).contains(&r) {
        return Err(Error::Domain(format!("r = {r} outside 1..=2")));
    }
    if beta.len() != index_len(d) {
        return Err(Error::Dimension { expected: index_len(d), found: beta.len() });
    }
    let mut trace = Vec::new();
    let mut spent: u128 = 0;
    let mut n = cfg.start_order.unwrap_or_else(|| resolving_order(beta)).max(1);
    let mut accepted: Option<usize> = None;
    loop {
        let cost = (n as u128).pow(2 * r as u32);
        spent += cost;
        if spent > cfg.budget || n > cfg.max_order {
            break;
        }
        let v = tensor_rule(d, r, beta, window, variant, n);
        trace.push((n, v));
        if accepted.is_none() && trace.len() >= 2 {
            let k = trace.len();
            if (trace[k - 1].1 - trace[k - 2].1).norm() < cfg.tol {
                accepted = Some(k - 1);
            }
        }
        if let Some(a) = accepted {
            if trace.len() > a + cfg.extra {
                return Ok(OscResult { value: trace[a].1, order: trace[a].0, trace });
            }
        }
        n *= 2;
    }
    if let Some(a) = accepted {
        return Ok(OscResult { value: trace[a].1, order: trace[a].0, trace });
    }
    let orders: Vec<String> = trace.iter().map(|(n, v)| format!("{n}:{v}")).collect();
    Err(Error::Numeric(format!("oscillatory integral did not converge; trace {}", orders.join(", "))))
}

/// d = 1, r = 1: the integral factorizes as B(−β)·B(β) with B(ξ) = ∫ b(t)e^{-2πiξt} dt,
/// computed here by adaptive Simpson.
pub fn osc_integral_d1_oracle(beta: f64, window: Window) -> Result<Complex64> {
    let s = window.half_width(1);
    let tw = 2.0 * std::f64::consts::PI;
    let one_d = |xi: f64| -> Result<Complex64> {
        let re = simpson(&|t: f64| window.factor(1, t) * (tw * xi * t).cos(), -s, s, 1e-13)?;
        let im = simpson(&|t: f64| -window.factor(1, t) * (tw * xi * t).sin(), -s, s, 1e-13)?;
        Ok(Complex64::new(re, im))
    };
    // D(x, y) = y − x, so e^{-2πiβ(y−x)} = e^{-2πi(−β)x}·e^{-2πiβy}.
    Ok(one_d(-beta)? * one_d(beta)?)
}
