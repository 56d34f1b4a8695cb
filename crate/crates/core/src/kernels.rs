//! Calderón–Zygmund kernels, the dyadic bump partition η_j, and the
//! mean-zero dyadic pieces
//!
//! K_j = K·η_j + c_j 2^{-j} η_j − c_{j+1} 2^{-j-1} η_{j+1},
//! c_j = 2 (∫ K·η₀(2^{1-j}·)) / (∫ η₀).
//!
//! η₀ is the quintic smoothstep: 1 on [-1,1], 0 outside [-2,2], and
//! s(u) = 1 − u³(10 − 15u + 6u²), u = |t| − 1, in between. It is C² and
//! ∫η₀ = 3 exactly, hence ∫η_j = 3·2^{j-1} for j ≥ 1.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::group::position;
use crate::quad::{integrate_pieces, CompensatedSum};

/// ∫ η₀.
pub const ETA0_INTEGRAL: f64 = 3.0;
/// Per-interval quadrature tolerance.
pub const QUAD_TOL: f64 = 1e-14;

/// Normalization of the Hilbert-type kernel c₀·t/(1+t²).
/// The bound sup[(1+|t|)|K| + (1+|t|)²|K'|] equals 2.48711·c₀, attained near t = 3.359.
pub const HILBERT_C: f64 = 0.4;
/// Normalization of c₁·cos(½log(1+t²))/√(1+t²).
/// Pointwise bound 3.37289·c₁ (near t = 1.474); sup_N |∫_{-N}^{N}| = 3.27887·c₁ (near N = 4.705).
pub const LOG_OSC_C: f64 = 0.29;

#[inline]
fn pow2(k: i32) -> f64 {
    2f64.powi(k)
}

/// η₀(t).
pub fn eta0(t: f64) -> f64 {
    let a = t.abs();
    if a <= 1.0 {
        1.0
    } else if a >= 2.0 {
        0.0
    } else {
        let u = a - 1.0;
        1.0 - u * u * u * (10.0 - 15.0 * u + 6.0 * u * u)
    }
}

/// η₀'(t).
pub fn eta0_deriv(t: f64) -> f64 {
    let a = t.abs();
    if a <= 1.0 || a >= 2.0 {
        0.0
    } else {
        let u = a - 1.0;
        -30.0 * u * u * (1.0 - u) * (1.0 - u) * t.signum()
    }
}

/// η₀ on dyadic rationals, exactly.
pub fn eta0_exact(t: &Dyadic) -> Dyadic {
    let a = t.abs();
    let one = Dyadic::one();
    let two = Dyadic::from_int(2);
    if a <= one {
        one
    } else if a >= two {
        Dyadic::zero()
    } else {
        let u = a - one.clone();
        let inner = Dyadic::from_int(10) - Dyadic::from_int(15) * u.clone() + Dyadic::from_int(6) * u.clone() * u.clone();
        one - u.clone() * u.clone() * u * inner
    }
}

/// η_j(t) = η₀(2^{-j}t) − η₀(2^{1-j}t) for j ≥ 1, and η₀ for j = 0.
pub fn eta_j(j: u32, t: f64) -> f64 {
    if j == 0 {
        return eta0(t);
    }
    let j = j as i32;
    eta0(t * pow2(-j)) - eta0(t * pow2(1 - j))
}

pub fn eta_j_deriv(j: u32, t: f64) -> f64 {
    if j == 0 {
        return eta0_deriv(t);
    }
    let j = j as i32;
    pow2(-j) * eta0_deriv(t * pow2(-j)) - pow2(1 - j) * eta0_deriv(t * pow2(1 - j))
}

pub fn eta_j_exact(j: u32, t: &Dyadic) -> Dyadic {
    if j == 0 {
        return eta0_exact(t);
    }
    let j = i64::from(j);
    eta0_exact(&t.mul_pow2(-j)) - eta0_exact(&t.mul_pow2(1 - j))
}

/// η̃_{≤λ}(x) = ∏_{Y_d} η₀(x_{l1l2} / 2^{λ(l1+l2)}), with x in canonical Y_d order.
pub fn eta_leq(lambda: f64, x: &[f64], d: usize) -> Result<f64> {
    if lambda < 1.0 {
        return Err(Error::Domain("eta_leq needs lambda >= 1".into()));
    }
    if x.len() != crate::group::index_len(d) {
        return Err(Error::Dimension { expected: crate::group::index_len(d), found: x.len() });
    }
    let mut p = 1.0;
    for l1 in 1..=d {
        for l2 in 0..l1 {
            p *= eta0(x[position(l1, l2)] / 2f64.powf(lambda * (l1 + l2) as f64));
        }
    }
    Ok(p)
}

/// Library kernel families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelFamily {
    /// K ≡ 0.
    Zero,
    /// c·t/(1+t²).
    Hilbert,
    /// c·cos(½log(1+t²))/√(1+t²).
    LogOsc,
    /// c/(1+|t|); violates the cancellation condition for every c > 0.
    Reciprocal,
}

/// A kernel K on R with analytic derivative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CzKernel {
    pub family: KernelFamily,
    pub c: f64,
}

impl CzKernel {
    pub fn zero() -> Self {
        CzKernel { family: KernelFamily::Zero, c: 0.0 }
    }

    pub fn hilbert() -> Self {
        CzKernel { family: KernelFamily::Hilbert, c: HILBERT_C }
    }

    pub fn log_osc() -> Self {
        CzKernel { family: KernelFamily::LogOsc, c: LOG_OSC_C }
    }

    pub fn reciprocal(c: f64) -> Self {
        CzKernel { family: KernelFamily::Reciprocal, c }
    }

    /// Looks up a library kernel by CLI name; `scale` overrides the constant.
    pub fn from_name(name: &str, scale: Option<f64>) -> Result<Self> {
        let mut k = match name {
            "zero" => Self::zero(),
            "hilbert" => Self::hilbert(),
            "log-osc" => Self::log_osc(),
            "reciprocal" => Self::reciprocal(10.0),
            other => return Err(Error::Domain(format!("unknown kernel {other:?}"))),
        };
        if let Some(c) = scale {
            k.c = c;
        }
        Ok(k)
    }

    pub fn name(&self) -> &'static str {
        match self.family {
            KernelFamily::Zero => "zero",
            KernelFamily::Hilbert => "hilbert",
            KernelFamily::LogOsc => "log-osc",
            KernelFamily::Reciprocal => "reciprocal",
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self.family {
            KernelFamily::Zero => 0.0,
            KernelFamily::Hilbert => self.c * t / (1.0 + t * t),
            KernelFamily::LogOsc => {
                let s = 1.0 + t * t;
                self.c * (0.5 * s.ln()).cos() / s.sqrt()
            }
            KernelFamily::Reciprocal => self.c / (1.0 + t.abs()),
        }
    }

    pub fn deriv(&self, t: f64) -> f64 {
        match self.family {
            KernelFamily::Zero => 0.0,
            KernelFamily::Hilbert => {
                let s = 1.0 + t * t;
                self.c * (1.0 - t * t) / (s * s)
            }
            KernelFamily::LogOsc => {
                let s = 1.0 + t * t;
                let l = 0.5 * s.ln();
                -self.c * t * (l.sin() + l.cos()) / (s * s.sqrt())
            }
            KernelFamily::Reciprocal => {
                let s = 1.0 + t.abs();
                -self.c * t.signum() / (s * s)
            }
        }
    }

    /// K(t) + K(−t).
    fn even_part2(&self, t: f64) -> f64 {
        match self.family {
            KernelFamily::Zero | KernelFamily::Hilbert => 0.0,
            _ => self.eval(t) + self.eval(-t),
        }
    }
}

/// Result of checking the Calderón–Zygmund bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CzReport {
    /// sup_t (1+|t|)|K(t)| + (1+|t|)²|K'(t)|.
    pub pointwise_max: f64,
    pub pointwise_argmax: f64,
    /// sup_N |∫_{-N}^{N} K|.
    pub cancellation_max: f64,
    pub cancellation_argmax: f64,
    pub passed: bool,
}

fn cz_profile(k: &CzKernel, t: f64) -> f64 {
    let a = 1.0 + t.abs();
    a * k.eval(t).abs() + a * a * k.deriv(t).abs()
}

/// Dyadic-grid maximization of the size/derivative bound and a dyadic sweep of
/// truncated integrals; passes iff both are ≤ 1 + 1e-9.
pub fn verify_cz(k: &CzKernel) -> Result<CzReport> {
    const PER_OCTAVE: usize = 64;
    let mut best = (cz_profile(k, 0.0), 0.0);
    let mut grid = Vec::new();
    for oct in -20..46 {
        let lo = pow2(oct);
        for i in 0..PER_OCTAVE {
            grid.push(lo * pow2(1).powf(i as f64 / PER_OCTAVE as f64));
        }
    }
    for &t in &grid {
        for s in [t, -t] {
            let v = cz_profile(k, s);
            if v > best.0 {
                best = (v, s);
            }
        }
    }
    // Golden-section refinement around the best grid point.
    if best.1 != 0.0 {
        let step = pow2(1).powf(1.0 / PER_OCTAVE as f64);
        let (mut a, mut b) = (best.1.abs() / step, best.1.abs() * step);
        let sgn = best.1.signum();
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..80 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if cz_profile(k, sgn * c) > cz_profile(k, sgn * d) {
                b = d;
            } else {
                a = c;
            }
        }
        let t = sgn * 0.5 * (a + b);
        let v = cz_profile(k, t);
        if v > best.0 {
            best = (v, t);
        }
    }

    let mut canc = (0.0f64, 0.0);
    if k.family != KernelFamily::Hilbert && k.family != KernelFamily::Zero {
        let f = |t: f64| k.eval(t) + k.eval(-t);
        let mut acc = CompensatedSum::default();
        let mut prev = 0.0;
        for step in -320..=16 * 40 {
            let n = pow2(1).powf(step as f64 / 16.0);
            acc.add(integrate_pieces(&f, &[prev, n], QUAD_TOL)?);
            prev = n;
            let v = acc.value().abs();
            if v > canc.0 {
                canc = (v, n);
            }
        }
    }
    let passed = best.0 <= 1.0 + 1e-9 && canc.0 <= 1.0 + 1e-9;
    Ok(CzReport {
        pointwise_max: best.0,
        pointwise_argmax: best.1,
        cancellation_max: canc.0,
        cancellation_argmax: canc.1,
        passed,
    })
}

/// Breakpoints 0, 1, 2, 4, ..., 2^{top} plus the two knots of η₀ at that scale.
fn dyadic_breaks(top: i32) -> Vec<f64> {
    let mut v = vec![0.0];
    for k in 0..=top {
        v.push(pow2(k));
    }
    v
}

/// c_j = (2/3) ∫ K(t) η₀(2^{1-j}t) dt for j ≥ 1.
pub fn cj_coefficient(k: &CzKernel, j: u32) -> Result<f64> {
    if j == 0 {
        return Err(Error::Domain("c_j needs j >= 1".into()));
    }
    if matches!(k.family, KernelFamily::Zero | KernelFamily::Hilbert) {
        return Ok(0.0);
    }
    let s = pow2(1 - j as i32);
    let f = |t: f64| k.even_part2(t) * eta0(t * s);
    let integral = integrate_pieces(&f, &dyadic_breaks(j as i32), QUAD_TOL)?;
    Ok(2.0 * integral / ETA0_INTEGRAL)
}

/// A kernel with its cached coefficients c_1, ..., c_{jmax+1}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DyadicKernel {
    pub kernel: CzKernel,
    /// `c[j]` is c_j; `c[0]` is unused and zero.
    pub c: Vec<f64>,
}

impl DyadicKernel {
    pub fn new(kernel: CzKernel, jmax: u32) -> Result<Self> {
        let mut c = vec![0.0];
        for j in 1..=jmax + 1 {
            c.push(cj_coefficient(&kernel, j)?);
        }
        Ok(DyadicKernel { kernel, c })
    }

    pub fn jmax(&self) -> u32 {
        (self.c.len() - 2) as u32
    }

    pub fn piece(&self, j: u32) -> Result<DyadicPiece> {
        if j == 0 || j > self.jmax() {
            return Err(Error::Domain(format!("piece index {j} outside 1..={}", self.jmax())));
        }
        Ok(DyadicPiece { j, kernel: self.kernel, cj: self.c[j as usize], cj1: self.c[j as usize + 1] })
    }

    /// Σ_{j'≤j} K_{j'}(t) minus the closed form
    /// K η₀(2^{-j}t) − K η₀(t) + c₁2^{-1}η₁(t) − c_{j+1}2^{-j-1}η_{j+1}(t).
    pub fn telescoping_residual(&self, j: u32, t: f64) -> Result<f64> {
        let mut sum = 0.0;
        for jj in 1..=j {
            sum += self.piece(jj)?.eval(t);
        }
        let k = self.kernel.eval(t);
        let rhs = k * eta0(t * pow2(-(j as i32))) - k * eta0(t) + self.c[1] * 0.5 * eta_j(1, t)
            - self.c[j as usize + 1] * pow2(-(j as i32) - 1) * eta_j(j + 1, t);
        Ok(sum - rhs)
    }

    /// (j, c_j) rows as CSV text.
    pub fn cj_csv(&self) -> String {
        let mut s = String::from("j,c_j\n");
        for (j, c) in self.c.iter().enumerate().skip(1) {
            s.push_str(&format!("{j},{c:.16e}\n"));
        }
        s
    }
}

/// One dyadic piece K_j.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DyadicPiece {
    pub j: u32,
    pub kernel: CzKernel,
    pub cj: f64,
    pub cj1: f64,
}

impl DyadicPiece {
    /// K_j vanishes outside 2^{j-1} ≤ |t| ≤ 2^{j+2}.
    pub fn support(&self) -> (f64, f64) {
        (pow2(self.j as i32 - 1), pow2(self.j as i32 + 2))
    }

    pub fn eval(&self, t: f64) -> f64 {
        let (lo, hi) = self.support();
        let a = t.abs();
        if a <= lo || a >= hi {
            return 0.0;
        }
        let j = self.j;
        let ej = eta_j(j, t);
        let ej1 = eta_j(j + 1, t);
        self.kernel.eval(t) * ej + self.cj * pow2(-(j as i32)) * ej - self.cj1 * pow2(-(j as i32) - 1) * ej1
    }

    pub fn deriv(&self, t: f64) -> f64 {
        let (lo, hi) = self.support();
        let a = t.abs();
        if a <= lo || a >= hi {
            return 0.0;
        }
        let j = self.j;
        let k = &self.kernel;
        k.deriv(t) * eta_j(j, t)
            + k.eval(t) * eta_j_deriv(j, t)
            + self.cj * pow2(-(j as i32)) * eta_j_deriv(j, t)
            - self.cj1 * pow2(-(j as i32) - 1) * eta_j_deriv(j + 1, t)
    }

    /// ∫ K_j by adaptive quadrature over the support.
    pub fn integral(&self) -> Result<f64> {
        let (lo, _) = self.support();
        let mut pts = Vec::new();
        for oct in 0..3 {
            let a = lo * pow2(oct);
            for i in 0..8 {
                pts.push(a * (1.0 + i as f64 / 8.0));
            }
        }
        pts.push(lo * 8.0);
        let f = |t: f64| self.eval(t) + self.eval(-t);
        integrate_pieces(&f, &pts, QUAD_TOL)
    }

    /// (n, K_j(n)) for the integers n in the support with K_j(n) ≠ 0, sorted by n.
    pub fn lattice_weights(&self) -> Vec<(i64, f64)> {
        let (lo, hi) = self.support();
        let (lo, hi) = (lo as i64, hi as i64);
        let mut w = Vec::new();
        for n in (-hi..=-lo).chain(lo..=hi) {
            let v = self.eval(n as f64);
            if v != 0.0 {
                w.push((n, v));
            }
        }
        w
    }

    /// (sup 2^j|K_j|, sup 2^{2j}|K_j'|) over a grid of the support.
    pub fn scaled_bounds(&self) -> (f64, f64) {
        let (lo, hi) = self.support();
        let (mut a, mut b) = (0.0f64, 0.0f64);
        let n = 4096;
        for i in 0..=n {
            let t = lo + (hi - lo) * i as f64 / n as f64;
            for s in [t, -t] {
                a = a.max(self.eval(s).abs());
                b = b.max(self.deriv(s).abs());
            }
        }
        let s = pow2(self.j as i32);
        (s * a, s * s * b)
    }
}

pub fn dyadic_piece(k: &CzKernel, j: u32) -> Result<DyadicPiece> {
    DyadicKernel::new(*k, j)?.piece(j)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta0_plateau_and_support() {
        assert_eq!(eta0(0.5), 1.0);
        assert_eq!(eta0(-1.0), 1.0);
        assert_eq!(eta0(3.0), 0.0);
        assert_eq!(eta0(2.0), 0.0);
        assert!((eta0(1.5) - 0.5).abs() < 1e-15);
        assert_eq!(eta0(1.3), eta0(-1.3));
    }

    #[test]
    fn eta0_integral_is_three() {
        let v = integrate_pieces(&eta0, &[-2.0, -1.0, 1.0, 2.0], 1e-15).unwrap();
        assert!((v - ETA0_INTEGRAL).abs() < 1e-13);
    }

    #[test]
    fn eta0_derivative_matches_difference_quotient() {
        for &t in &[1.1, 1.5, 1.9, -1.25, -1.75] {
            let h = 1e-6;
            let fd = (eta0(t + h) - eta0(t - h)) / (2.0 * h);
            assert!((fd - eta0_deriv(t)).abs() < 1e-8, "{t}");
        }
    }

    #[test]
    fn eta1_support() {
        assert_eq!(eta_j(1, 0.9), 0.0);
        assert_eq!(eta_j(1, 4.0), 0.0);
        assert_eq!(eta_j(1, -4.5), 0.0);
        assert!(eta_j(1, 2.0) > 0.0);
        assert!(eta_j(1, -3.0) > 0.0);
    }

    #[test]
    fn exact_partition_of_unity() {
        for &t in &[0.3, 1.7, 5.25, 100.125, -77.5, 12345.0, 3.0e9] {
            let td = Dyadic::from_f64(t).unwrap();
            for jj in [0u32, 1, 5, 20, 40] {
                let mut s = Dyadic::zero();
                for j in 0..=jj {
                    s += &eta_j_exact(j, &td);
                }
                assert_eq!(s, eta0_exact(&td.mul_pow2(-i64::from(jj))), "t={t} J={jj}");
            }
        }
    }

    #[test]
    fn eta_leq_product() {
        let x = [1.0, 4.0, 40.0];
        assert_eq!(eta_leq(2.0, &x, 2).unwrap(), 1.0);
        assert!((eta_leq(2.0, &[1.0, 4.0, 100.0], 2).unwrap() - eta0(100.0 / 64.0)).abs() < 1e-15);
        assert_eq!(eta_leq(1.0, &[0.0, 0.0, 16.0], 2).unwrap(), 0.0);
        assert!(eta_leq(0.5, &x, 2).is_err());
    }

    #[test]
    fn kernel_derivatives_match_difference_quotients() {
        for k in [CzKernel::hilbert(), CzKernel::log_osc(), CzKernel::reciprocal(10.0)] {
            for &t in &[0.3f64, 1.0, 2.7, -4.1, 50.0, -1234.5] {
                let h = 1e-6 * (1.0 + t.abs());
                let fd = (k.eval(t + h) - k.eval(t - h)) / (2.0 * h);
                assert!((fd - k.deriv(t)).abs() < 1e-7, "{} at {t}", k.name());
            }
        }
    }

    #[test]
    fn cz_check_library_kernels() {
        let z = verify_cz(&CzKernel::zero()).unwrap();
        assert_eq!((z.pointwise_max, z.cancellation_max), (0.0, 0.0));
        let h = verify_cz(&CzKernel::hilbert()).unwrap();
        assert!(h.passed);
        assert!((h.pointwise_max - 0.4 * 2.487110462849306).abs() < 1e-9);
        let l = verify_cz(&CzKernel::log_osc()).unwrap();
        assert!(l.passed, "{l:?}");
        assert!((l.pointwise_max - 0.29 * 3.372887291945507).abs() < 1e-9, "{l:?}");
        assert!((l.cancellation_max - 0.29 * 3.278867257984527).abs() < 1e-3);
        let r = verify_cz(&CzKernel::reciprocal(10.0)).unwrap();
        assert!(!r.passed);
        assert!(r.cancellation_max > 1.0);
    }

    #[test]
    fn cj_for_odd_and_zero_kernels() {
        for j in 1..10 {
            assert_eq!(cj_coefficient(&CzKernel::hilbert(), j).unwrap(), 0.0);
            assert_eq!(cj_coefficient(&CzKernel::zero(), j).unwrap(), 0.0);
        }
        assert!(cj_coefficient(&CzKernel::hilbert(), 0).is_err());
    }

    #[test]
    fn pieces_vanish_outside_support() {
        let dk = DyadicKernel::new(CzKernel::log_osc(), 6).unwrap();
        for j in 1..=6 {
            let p = dk.piece(j).unwrap();
            let edge = pow2(j as i32 + 3);
            assert_eq!(p.eval(edge + 0.5), 0.0);
            assert_eq!(p.eval(-edge - 3.0), 0.0);
            assert_eq!(p.eval(pow2(j as i32 - 1) * 0.99), 0.0);
        }
        let z = DyadicKernel::new(CzKernel::zero(), 3).unwrap();
        assert!(z.piece(2).unwrap().lattice_weights().is_empty());
    }

    #[test]
    fn piece_derivative_matches_difference_quotient() {
        let dk = DyadicKernel::new(CzKernel::log_osc(), 5).unwrap();
        let p = dk.piece(4).unwrap();
        for &t in &[9.0, 13.3, -20.0, 40.1, -55.5] {
            let h = 1e-5;
            let fd = (p.eval(t + h) - p.eval(t - h)) / (2.0 * h);
            assert!((fd - p.deriv(t)).abs() < 1e-8, "{t}");
        }
    }
}
