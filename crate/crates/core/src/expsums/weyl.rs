//! Weyl sums S_{P,r}(θ) = Σ_{n,m ∈ Z^r} e^{-2πi D(n,m)·θ} ∏_j φ(n_j)ψ(m_j).
//!
//! The phase of D is built factor by factor. After j factors only the running
//! first-layer sums U_l (l ≥ 2) influence later phases, so the sum is a
//! transfer over the states U = (U_2, …, U_d) instead of (2P+1)^{2r} terms.

use num_complex::Complex64;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use super::dpoly::{d_from_powers, Variant};
use crate::error::{Error, Result};
use crate::group::{index_len, position};
use crate::kernels::{eta0, eta0_deriv};
use crate::quad::ComplexSum;

/// Default cap on the transfer work (states × pairs summed over factors) or brute-force terms.
pub const DEFAULT_WEYL_BUDGET: u128 = 20_000_000_000;

/// θ ∈ R^{|Y_d|}, coordinates reduced to [0, 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    d: usize,
    theta: Vec<f64>,
}

impl PhasePoint {
    pub fn new(d: usize, theta: Vec<f64>) -> Result<Self> {
        if theta.len() != index_len(d) {
            return Err(Error::Dimension { expected: index_len(d), found: theta.len() });
        }
        if theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::Domain("phase coordinates must be finite".into()));
        }
        Ok(PhasePoint { d, theta: theta.into_iter().map(|t| t.rem_euclid(1.0)).collect() })
    }

    pub fn zero(d: usize) -> Self {
        PhasePoint { d, theta: vec![0.0; index_len(d)] }
    }

    /// θ with a single non-zero coordinate at (l1, l2).
    pub fn single(d: usize, l1: usize, l2: usize, value: f64) -> Result<Self> {
        let mut t = vec![0.0; index_len(d)];
        t[position(l1, l2)] = value;
        Self::new(d, t)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }
}

/// Shape of a cutoff function on [−P, P].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CutoffShape {
    /// amplitude·η₀(2t/P): C², supported in (−P, P).
    Plateau { amplitude: f64 },
    /// amplitude·1_{[−P,P]}: not C¹, so never admissible.
    Sharp { amplitude: f64 },
}

impl CutoffShape {
    pub fn eval(&self, p: f64, t: f64) -> f64 {
        match *self {
            CutoffShape::Plateau { amplitude } => amplitude * eta0(2.0 * t / p),
            CutoffShape::Sharp { amplitude } => {
                if t.abs() <= p {
                    amplitude
                } else {
                    0.0
                }
            }
        }
    }

    /// ∫|f'|, or ∞ when f is not C¹.
    pub fn total_variation(&self) -> f64 {
        match *self {
            // η₀ rises once and falls once, each by 1.
            CutoffShape::Plateau { amplitude } => 2.0 * amplitude.abs(),
            CutoffShape::Sharp { .. } => f64::INFINITY,
        }
    }

    pub fn sup(&self) -> f64 {
        match *self {
            CutoffShape::Plateau { amplitude } | CutoffShape::Sharp { amplitude } => amplitude.abs(),
        }
    }

    fn deriv(&self, p: f64, t: f64) -> f64 {
        match *self {
            CutoffShape::Plateau { amplitude } => amplitude * 2.0 / p * eta0_deriv(2.0 * t / p),
            CutoffShape::Sharp { .. } => 0.0,
        }
    }
}

/// Cutoffs φ^{(j)}, ψ^{(j)}, j = 1..r, at scale P.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutoffPair {
    pub p: u64,
    pub phi: Vec<CutoffShape>,
    pub psi: Vec<CutoffShape>,
}

impl CutoffPair {
    /// φ = ψ = ¼·η₀(2t/P): |φ| + |ψ| ≤ 1 and ∫|φ'| + |ψ'| = 1.
    pub fn default_admissible(p: u64, r: usize) -> Self {
        Self::uniform(p, r, CutoffShape::Plateau { amplitude: 0.25 })
    }

    /// φ = ψ = η₀(2t/P), the unit plateau (sup and variation exceed the admissible range).
    pub fn unit_plateau(p: u64, r: usize) -> Self {
        Self::uniform(p, r, CutoffShape::Plateau { amplitude: 1.0 })
    }

    pub fn uniform(p: u64, r: usize, shape: CutoffShape) -> Self {
        CutoffPair { p, phi: vec![shape; r], psi: vec![shape; r] }
    }

    pub fn r(&self) -> usize {
        self.phi.len()
    }

    /// sup_j [sup|φ_j| + sup|ψ_j|] ≤ 1 and sup_j [∫|φ_j'| + ∫|ψ_j'|] ≤ 1.
    pub fn is_admissible(&self) -> bool {
        self.phi.iter().zip(&self.psi).all(|(a, b)| {
            a.sup() + b.sup() <= 1.0 + 1e-15 && a.total_variation() + b.total_variation() <= 1.0 + 1e-15
        })
    }

    /// Numerical ∫|f'| for a plateau shape, by the midpoint rule on a fine grid.
    pub fn numeric_total_variation(shape: &CutoffShape, p: u64) -> f64 {
        let p = p as f64;
        let n = 200_000;
        let h = 2.0 * p / n as f64;
        (0..n).map(|i| shape.deriv(p, -p + (i as f64 + 0.5) * h).abs() * h).sum()
    }

    /// (n, φ_j(n)) and (m, ψ_j(m)) over the integers of [−P, P], zeros dropped.
    fn lattice(&self, j: usize) -> (Vec<(i64, f64)>, Vec<(i64, f64)>) {
        let p = self.p as i64;
        let pf = self.p as f64;
        let mk = |s: &CutoffShape| -> Vec<(i64, f64)> {
            (-p..=p).map(|n| (n, s.eval(pf, n as f64))).filter(|(_, v)| *v != 0.0).collect()
        };
        (mk(&self.phi[j]), mk(&self.psi[j]))
    }
}

fn cis_neg(x: f64) -> Complex64 {
    // e^{-2πi x} after reducing x mod 1.
    let t = x.rem_euclid(1.0);
    let (s, c) = (2.0 * std::f64::consts::PI * t).sin_cos();
    Complex64::new(c, -s)
}

/// Σ θ_k·c_k mod 1 for integer coordinates, with each product reduced separately.
fn phase_dot(theta: &[f64], coords: &[i128]) -> f64 {
    let mut s = 0.0;
    for (t, &c) in theta.iter().zip(coords) {
        if *t != 0.0 && c != 0 {
            s += (*t * c as f64).rem_euclid(1.0);
        }
    }
    s
}

fn power_table(n: i64, d: usize) -> Vec<i128> {
    let mut p = vec![1i128; 2 * d + 1];
    for k in 1..=2 * d {
        p[k] = p[k - 1] * i128::from(n);
    }
    p
}

/// S_{P,r}(θ) (or S̃) by transfer over first-layer partial sums.
pub fn weyl_sum(theta: &PhasePoint, cutoffs: &CutoffPair, variant: Variant, budget: u128) -> Result<Complex64> {
    let d = theta.d;
    let r = cutoffs.r();
    if r == 0 {
        return Err(Error::Domain("r must be positive".into()));
    }
    if cutoffs.psi.len() != r {
        return Err(Error::Dimension { expected: r, found: cutoffs.psi.len() });
    }
    let th = &theta.theta;
    // Per factor: the first-layer increments u_l (l = 1..d), and the
    // state-independent part of the phase together with its weight.
    type Inc = SmallVec<[i128; 4]>;
    let mut factors: Vec<Vec<(Inc, Complex64)>> = Vec::with_capacity(r);
    for j in 0..r {
        let (phi, psi) = cutoffs.lattice(j);
        let mut agg: FxHashMap<Inc, ComplexSum> = FxHashMap::default();
        let mut order: Vec<Inc> = Vec::new();
        for &(n, wn) in &phi {
            let xp = power_table(n, d);
            for &(m, wm) in &psi {
                let yp = power_table(m, d);
                // One-factor D carries the first-layer increment and the diagonal terms.
                let single = d_from_powers(d, &[xp.as_slice()], &[yp.as_slice()], variant);
                let inc: Inc = (1..=d).map(|l| single[position(l, 0)]).collect();
                let z = cis_neg(phase_dot(th, &single)) * (wn * wm);
                agg.entry(inc.clone())
                    .or_insert_with(|| {
                        order.push(inc);
                        ComplexSum::default()
                    })
                    .add(z);
            }
        }
        factors.push(order.into_iter().map(|k| { let v = agg[&k].value(); (k, v) }).collect());
    }
    // States: U = (U_2, …, U_d). The cross term of factor j contributes
    // Σ_{l1>l2≥1} θ_{l1 l2} U_{l1} u_{l2}.
    type State = SmallVec<[i128; 4]>;
    let mut states: Vec<(State, Complex64)> = vec![(SmallVec::from_elem(0, d.saturating_sub(1)), Complex64::new(1.0, 0.0))];
    let mut work: u128 = 0;
    for f in &factors {
        work = work.saturating_add(states.len() as u128 * f.len() as u128);
        if work > budget {
            return Err(Error::Budget { what: "Weyl sum transfer".into(), cost: work, budget });
        }
        let mut next: FxHashMap<State, ComplexSum> = FxHashMap::default();
        let mut order: Vec<State> = Vec::new();
        for (u_state, amp) in &states {
            for (inc, w) in f {
                let mut cross = 0.0;
                for l1 in 2..=d {
                    for l2 in 1..l1 {
                        let t = th[position(l1, l2)];
                        if t != 0.0 {
                            cross += (t * (u_state[l1 - 2] * inc[l2 - 1]) as f64).rem_euclid(1.0);
                        }
                    }
                }
                let z = amp * w * cis_neg(cross);
                let ns: State = (2..=d).map(|l| u_state[l - 2] + inc[l - 1]).collect();
                next.entry(ns.clone())
                    .or_insert_with(|| {
                        order.push(ns);
                        ComplexSum::default()
                    })
                    .add(z);
            }
        }
        states = order.into_iter().map(|k| { let v = next[&k].value(); (k, v) }).collect();
    }
    let mut total = ComplexSum::default();
    for (_, a) in &states {
        total.add(*a);
    }
    Ok(total.value())
}

/// S_{P,r}(θ) by direct enumeration of all (n, m); the oracle for [`weyl_sum`].
pub fn weyl_sum_brute(theta: &PhasePoint, cutoffs: &CutoffPair, variant: Variant, budget: u128) -> Result<Complex64> {
    let d = theta.d;
    let r = cutoffs.r();
    let lat: Vec<(Vec<(i64, f64)>, Vec<(i64, f64)>)> = (0..r).map(|j| cutoffs.lattice(j)).collect();
    // Slots n_1..n_r, m_1..m_r.
    let slots: Vec<&Vec<(i64, f64)>> = lat.iter().map(|l| &l.0).chain(lat.iter().map(|l| &l.1)).collect();
    let cost = slots.iter().fold(1u128, |a, s| a.saturating_mul(s.len() as u128));
    if cost > budget {
        return Err(Error::Budget { what: "Weyl sum enumeration".into(), cost, budget });
    }
    if slots.iter().any(|s| s.is_empty()) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let tables: Vec<Vec<Vec<i128>>> = slots.iter().map(|s| s.iter().map(|(n, _)| power_table(*n, d)).collect()).collect();
    let mut idx = vec![0usize; 2 * r];
    let mut total = ComplexSum::default();
    loop {
        let xs: Vec<&[i128]> = (0..r).map(|i| tables[i][idx[i]].as_slice()).collect();
        let ys: Vec<&[i128]> = (0..r).map(|i| tables[r + i][idx[r + i]].as_slice()).collect();
        let h = d_from_powers(d, &xs, &ys, variant);
        let w: f64 = idx.iter().enumerate().map(|(s, &i)| slots[s][i].1).product();
        total.add(cis_neg(phase_dot(&theta.theta, &h)) * w);
        let mut s = 2 * r;
        loop {
            if s == 0 {
                return Ok(total.value());
            }
            s -= 1;
            idx[s] += 1;
            if idx[s] < slots[s].len() {
                break;
            }
            idx[s] = 0;
        }
    }
}

/// Smallest prime ≥ n.
pub fn next_prime(n: u64) -> u64 {
    let is_prime = |k: u64| k >= 2 && (2..).take_while(|p| p * p <= k).all(|p| k % p != 0);
    (n.max(2)..).find(|&k| is_prime(k)).expect("primes are unbounded")
}

/// Ratios |S|/(2P+1)^{2r} at θ = 0, a major arc and a minor arc.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinorArcReport {
    pub d: usize,
    pub r: usize,
    pub p: u64,
    pub epsilon: f64,
    /// Coordinate (l1, l2) carrying the test phases.
    pub coordinate: (usize, usize),
    pub major_q: u64,
    pub minor_q: u64,
    pub minor_a: u64,
    pub ratio_zero: f64,
    pub ratio_major: f64,
    pub ratio_minor: f64,
}

impl MinorArcReport {
    /// Rows (theta_desc, P, r, ratio).
    pub fn to_csv(&self) -> String {
        let (l1, l2) = self.coordinate;
        format!(
            "theta_desc,P,r,ratio\nzero,{p},{r},{:.16e}\nmajor:{l1}{l2}=1/{},{p},{r},{:.16e}\nminor:{l1}{l2}={}/{},{p},{r},{:.16e}\n",
            self.ratio_zero,
            self.major_q,
            self.ratio_major,
            self.minor_a,
            self.minor_q,
            self.ratio_minor,
            p = self.p,
            r = self.r
        )
    }
}

/// Evaluates the three test phases on the top coordinate (d, d−1), or (1, 0) when d = 1.
///
/// The minor-arc denominator is the least prime ≥ P^{l1+l2−ε}; its numerator is
/// the integer nearest q·(√5−1)/2, a badly approximable choice.
pub fn minor_arc_scan(d: usize, r: usize, p: u64, epsilon: f64, cutoffs: &CutoffPair, budget: u128) -> Result<MinorArcReport> {
    if !(epsilon > 0.0 && epsilon <= 0.5) {
        return Err(Error::Domain(format!("epsilon {epsilon} outside (0, 1/2]")));
    }
    if cutoffs.r() != r {
        return Err(Error::Dimension { expected: r, found: cutoffs.r() });
    }
    let (l1, l2) = if d >= 2 { (d, d - 1) } else { (1, 0) };
    let norm = ((2 * p + 1) as f64).powi(2 * r as i32);
    let eval = |value: f64| -> Result<f64> {
        Ok(weyl_sum(&PhasePoint::single(d, l1, l2, value)?, cutoffs, Variant::D, budget)?.norm() / norm)
    };
    let major_q = 2;
    let minor_q = next_prime((p as f64).powf((l1 + l2) as f64 - epsilon).round() as u64);
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let mut minor_a = (minor_q as f64 * golden).round() as u64;
    if minor_a % minor_q == 0 {
        minor_a = 1;
    }
    Ok(MinorArcReport {
        d,
        r,
        p,
        epsilon,
        coordinate: (l1, l2),
        major_q,
        minor_q,
        minor_a,
        ratio_zero: eval(0.0)?,
        ratio_major: eval(1.0 / major_q as f64)?,
        ratio_minor: eval(minor_a as f64 / minor_q as f64)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const B: u128 = DEFAULT_WEYL_BUDGET;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn transfer_matches_brute_force() {
        for d in 1..=3 {
            for r in 1..=2 {
                let cut = CutoffPair::default_admissible(4, r);
                let theta = PhasePoint::new(d, (0..index_len(d)).map(|i| 0.1234 + 0.377 * i as f64).collect()).unwrap();
                for v in [Variant::D, Variant::DTilde] {
                    let a = weyl_sum(&theta, &cut, v, B).unwrap();
                    let b = weyl_sum_brute(&theta, &cut, v, B).unwrap();
                    assert!(close(a, b, 1e-12), "d={d} r={r} {a} {b}");
                }
            }
        }
    }

    #[test]
    fn theta_zero_is_product_of_masses() {
        let cut = CutoffPair::unit_plateau(6, 2);
        let s = weyl_sum(&PhasePoint::zero(2), &cut, Variant::D, B).unwrap();
        let mass: f64 = (-6..=6).map(|n| eta0(2.0 * n as f64 / 6.0)).sum();
        assert!((s.re - mass.powi(4)).abs() < 1e-9 * mass.powi(4));
        assert!(s.im.abs() < 1e-9);
    }

    #[test]
    fn p_zero_single_term() {
        // With P = 0 only n = m = 0 survives: φ(0)^r ψ(0)^r.
        let cut = CutoffPair::uniform(0, 2, CutoffShape::Sharp { amplitude: 0.5 });
        let s = weyl_sum(&PhasePoint::new(2, vec![0.3, 0.1, 0.7]).unwrap(), &cut, Variant::D, B).unwrap();
        assert!((s - Complex64::new(0.0625, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn d1_factorizes() {
        let p = 10u64;
        let cut = CutoffPair::default_admissible(p, 1);
        let th = 0.0731;
        let s = weyl_sum(&PhasePoint::new(1, vec![th]).unwrap(), &cut, Variant::D, B).unwrap();
        let shape = cut.phi[0];
        let f = |sign: f64| -> Complex64 {
            (-(p as i64)..=p as i64)
                .map(|n| Complex64::from_polar(shape.eval(p as f64, n as f64), sign * 2.0 * std::f64::consts::PI * n as f64 * th))
                .sum()
        };
        // D = m − n: e^{-2πi(m−n)θ} splits into e^{2πinθ} and e^{-2πimθ}.
        assert!((s.norm() - f(1.0).norm() * f(-1.0).norm()).abs() < 1e-12);
    }

    #[test]
    fn default_cutoffs_are_admissible() {
        let c = CutoffPair::default_admissible(32, 3);
        assert!(c.is_admissible());
        assert!(!CutoffPair::unit_plateau(32, 1).is_admissible());
        assert!(!CutoffPair::uniform(32, 1, CutoffShape::Sharp { amplitude: 0.5 }).is_admissible());
        let tv = CutoffPair::numeric_total_variation(&c.phi[0], 32);
        assert!((tv - 0.5).abs() < 1e-6, "{tv}");
    }

    #[test]
    fn trivial_bound_and_scan_shape() {
        let cut = CutoffPair::unit_plateau(8, 1);
        let rep = minor_arc_scan(2, 1, 8, 0.25, &cut, B).unwrap();
        assert!(rep.ratio_zero > 0.1);
        for x in [rep.ratio_zero, rep.ratio_major, rep.ratio_minor] {
            assert!(x <= 1.0);
        }
        assert_eq!(rep.minor_q, next_prime((8f64).powf(2.75).round() as u64));
        assert!(rep.to_csv().starts_with("theta_desc,P,r,ratio\nzero,8,1,"));
    }

    #[test]
    fn primes() {
        assert_eq!(next_prime(0), 2);
        assert_eq!(next_prime(14), 17);
        assert_eq!(next_prime(13), 13);
    }

    #[test]
    fn budget_refusal() {
        let cut = CutoffPair::default_admissible(8, 2);
        assert!(weyl_sum_brute(&PhasePoint::zero(2), &cut, Variant::D, 100).is_err());
        assert!(weyl_sum(&PhasePoint::zero(2), &cut, Variant::D, 100).is_err());
    }
}
