//! Exact application of the discrete Radon transforms
//!
//! (Hf)(g) = Σ_n w(n)·f(A(n)⁻¹·g),   (H*f)(g) = Σ_n conj(w(n))·f(A(n)·g)
//!
//! to finitely supported functions, operator chains, kernel extraction for
//! compositions, and power-iteration norm estimates.

mod norm;
mod sparse;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::dyadic::Coefficient;
use crate::error::{Error, Result};
use crate::expsums::{d_from_powers, Variant};
use crate::kernels::{CzKernel, DyadicKernel};
use crate::seq::GroupPolySequence;

pub use norm::{estimate_norm, NormConfig, NormEstimate, StopReason};
pub use sparse::{key_from_element, key_identity, key_inv, key_mul, key_to_element, Key, SparseFunction};

/// Default cap on |supp f|·|supp w| per application.
pub const DEFAULT_BUDGET: u128 = 10_000_000;

/// (n, K_j(n)) for the lattice points of the support of K_j.
pub fn hj_weights(kernel: &DyadicKernel, j: u32) -> Result<Vec<(i64, f64)>> {
    Ok(kernel.piece(j)?.lattice_weights())
}

/// (n, K(n)) for 0 ≤ |n| ≤ R with K(n) ≠ 0.
pub fn hr_weights(kernel: &CzKernel, r: u64) -> Vec<(i64, f64)> {
    let r = r as i64;
    (-r..=r).map(|n| (n, kernel.eval(n as f64))).filter(|(_, v)| *v != 0.0).collect()
}

/// Weights of Σ_{j=jlo}^{jhi} H_j, merged by n and summed in increasing j.
pub fn block_weights(kernel: &DyadicKernel, jlo: u32, jhi: u32) -> Result<Vec<(i64, f64)>> {
    let mut acc: BTreeMap<i64, f64> = BTreeMap::new();
    for j in jlo..=jhi {
        for (n, v) in hj_weights(kernel, j)? {
            *acc.entry(n).or_insert(0.0) += v;
        }
    }
    Ok(acc.into_iter().filter(|(_, v)| *v != 0.0).collect())
}

/// Integer block [⌈J(1−κ)⌉, J], clamped below at 1.
pub fn block_range(j: u32, kappa: f64) -> (u32, u32) {
    let lo = (f64::from(j) * (1.0 - kappa)).ceil().max(1.0) as u32;
    (lo.min(j), j)
}

/// Σ|w(n)|, an upper bound for the operator norm.
pub fn l1_norm(weights: &[(i64, f64)]) -> f64 {
    weights.iter().map(|(_, v)| v.abs()).sum()
}

/// One convolution operator along a polynomial orbit, or its adjoint.
#[derive(Debug, Clone)]
pub struct RadonOperator<V> {
    d: usize,
    /// (A(n), A(n)⁻¹, w(n)).
    orbit: Vec<(Key, Key, V)>,
    adjoint: bool,
}

impl<V: Coefficient> RadonOperator<V> {
    pub fn new(seq: &GroupPolySequence, weights: &[(i64, V)]) -> Result<Self> {
        let d = seq.d();
        let mut orbit = Vec::with_capacity(weights.len());
        for (n, w) in weights {
            if w.is_zero() {
                continue;
            }
            let a = key_from_element(&seq.eval(&BigInt::from(*n)))?;
            let ainv = key_inv(d, &a)?;
            orbit.push((a, ainv, w.clone()));
        }
        Ok(RadonOperator { d, orbit, adjoint: false })
    }

    /// Real weights embedded exactly.
    pub fn from_real(seq: &GroupPolySequence, weights: &[(i64, f64)]) -> Result<Self> {
        let w: Vec<(i64, V)> = weights.iter().map(|(n, v)| (*n, V::from_f64(*v))).collect();
        Self::new(seq, &w)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn is_adjoint(&self) -> bool {
        self.adjoint
    }

    /// Number of non-zero weights.
    pub fn weight_count(&self) -> usize {
        self.orbit.len()
    }

    pub fn adjoint(&self) -> Self {
        RadonOperator { d: self.d, orbit: self.orbit.clone(), adjoint: !self.adjoint }
    }

    /// Exact image of `f`; refuses when |supp f|·|supp w| exceeds `budget`.
    pub fn apply(&self, f: &SparseFunction<V>, budget: u128) -> Result<SparseFunction<V>> {
        if f.d() != self.d {
            return Err(Error::Dimension { expected: self.d, found: f.d() });
        }
        let cost = f.len() as u128 * self.orbit.len() as u128;
        if cost > budget {
            return Err(Error::Budget { what: "operator application".into(), cost, budget });
        }
        let mut out = SparseFunction::zero(self.d);
        for (s, fs) in f.sorted_entries() {
            for (a, ainv, w) in &self.orbit {
                if self.adjoint {
                    // (H*f)(A(n)⁻¹s) collects conj(w(n)) f(s).
                    out.add_at(key_mul(self.d, ainv, s)?, &w.conj().times(fs));
                } else {
                    out.add_at(key_mul(self.d, a, s)?, &w.times(fs));
                }
            }
        }
        out.prune();
        Ok(out)
    }
}

/// Kind of one factor in an operator chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FactorKind {
    /// H_j.
    H(u32),
    /// H_j*.
    HAdj(u32),
    /// H^R.
    HR(u64),
    /// (H^R)*.
    HRAdj(u64),
    /// S = Σ_{j=lo}^{hi} H_j.
    S(u32, u32),
    /// S*.
    SAdj(u32, u32),
}

impl FactorKind {
    pub fn adjoint(self) -> Self {
        match self {
            FactorKind::H(j) => FactorKind::HAdj(j),
            FactorKind::HAdj(j) => FactorKind::H(j),
            FactorKind::HR(r) => FactorKind::HRAdj(r),
            FactorKind::HRAdj(r) => FactorKind::HR(r),
            FactorKind::S(a, b) => FactorKind::SAdj(a, b),
            FactorKind::SAdj(a, b) => FactorKind::S(a, b),
        }
    }

    fn is_adjoint(self) -> bool {
        matches!(self, FactorKind::HAdj(_) | FactorKind::HRAdj(_) | FactorKind::SAdj(..))
    }
}

impl fmt::Display for FactorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorKind::H(j) => write!(f, "H:{j}"),
            FactorKind::HAdj(j) => write!(f, "H*:{j}"),
            FactorKind::HR(r) => write!(f, "HR:{r}"),
            FactorKind::HRAdj(r) => write!(f, "HR*:{r}"),
            FactorKind::S(a, b) => write!(f, "S:{a}-{b}"),
            FactorKind::SAdj(a, b) => write!(f, "S*:{a}-{b}"),
        }
    }
}

impl FromStr for FactorKind {
    type Err = Error;

    /// Parses `H:5`, `H*:5`, `HR:64`, `HR*:64`, `S:3-6`, `S*:3-6`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad factor {s:?} (expected H:j, H*:j, HR:R, HR*:R, S:lo-hi, S*:lo-hi)"));
        let (head, arg) = s.split_once(':').ok_or_else(bad)?;
        let range = |a: &str| -> Result<(u32, u32)> {
            let (lo, hi) = a.split_once('-').ok_or_else(bad)?;
            let lo: u32 = lo.parse().map_err(|_| bad())?;
            let hi: u32 = hi.parse().map_err(|_| bad())?;
            if lo == 0 || lo > hi {
                return Err(bad());
            }
            Ok((lo, hi))
        };
        let pos = |a: &str| -> Result<u32> {
            match a.parse::<u32>() {
                Ok(j) if j >= 1 => Ok(j),
                _ => Err(bad()),
            }
        };
        Ok(match head {
            "H" => FactorKind::H(pos(arg)?),
            "H*" => FactorKind::HAdj(pos(arg)?),
            "HR" => FactorKind::HR(arg.parse().map_err(|_| bad())?),
            "HR*" => FactorKind::HRAdj(arg.parse().map_err(|_| bad())?),
            "S" => {
                let (a, b) = range(arg)?;
                FactorKind::S(a, b)
            }
            "S*" => {
                let (a, b) = range(arg)?;
                FactorKind::SAdj(a, b)
            }
            _ => return Err(bad()),
        })
    }
}

/// A factor with the names of its registered kernel and sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factor {
    pub kind: FactorKind,
    pub kernel: String,
    pub sequence: String,
}

/// A product of factors. The last factor acts first, as in operator notation:
/// `[H_j*, H_k]` applied to f is H_j*(H_k f).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorChain {
    pub factors: Vec<Factor>,
}

impl OperatorChain {
    /// Chain of `kinds` all using the same kernel and sequence names.
    pub fn uniform(kinds: &[FactorKind], kernel: &str, sequence: &str) -> Self {
        OperatorChain {
            factors: kinds
                .iter()
                .map(|k| Factor { kind: *k, kernel: kernel.to_string(), sequence: sequence.to_string() })
                .collect(),
        }
    }

    /// Reversed chain of adjoint factors.
    pub fn adjoint(&self) -> Self {
        OperatorChain {
            factors: self
                .factors
                .iter()
                .rev()
                .map(|f| Factor { kind: f.kind.adjoint(), ..f.clone() })
                .collect(),
        }
    }

    /// The chain [H_{j1}*, H_{k1}, …, H_{jr}*, H_{kr}] whose kernel at δ_e is the D-kernel,
    /// or [H_{j1}, H_{k1}*, …] for D̃.
    pub fn composition(pairs: &[(u32, u32)], variant: Variant, kernel: &str, sequence: &str) -> Self {
        let mut kinds = Vec::new();
        for &(j, k) in pairs {
            match variant {
                Variant::D => kinds.extend([FactorKind::HAdj(j), FactorKind::H(k)]),
                Variant::DTilde => kinds.extend([FactorKind::H(j), FactorKind::HAdj(k)]),
            }
        }
        Self::uniform(&kinds, kernel, sequence)
    }
}

/// Named kernels (with cached dyadic coefficients) and sequences.
#[derive(Debug, Clone, Default)]
pub struct Registry {
    kernels: BTreeMap<String, DyadicKernel>,
    sequences: BTreeMap<String, GroupPolySequence>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers `kernel` with dyadic pieces available for j ≤ `jmax`.
    pub fn register_kernel(&mut self, name: &str, kernel: CzKernel, jmax: u32) -> Result<()> {
        self.kernels.insert(name.to_string(), DyadicKernel::new(kernel, jmax)?);
        Ok(())
    }

    pub fn register_sequence(&mut self, name: &str, seq: GroupPolySequence) {
        self.sequences.insert(name.to_string(), seq);
    }

    pub fn kernel(&self, name: &str) -> Result<&DyadicKernel> {
        self.kernels.get(name).ok_or_else(|| Error::Domain(format!("kernel {name:?} is not registered")))
    }

    pub fn sequence(&self, name: &str) -> Result<&GroupPolySequence> {
        self.sequences.get(name).ok_or_else(|| Error::Domain(format!("sequence {name:?} is not registered")))
    }

    /// Real weights of one factor, ignoring adjointness.
    pub fn factor_weights(&self, f: &Factor) -> Result<Vec<(i64, f64)>> {
        let k = self.kernel(&f.kernel)?;
        match f.kind {
            FactorKind::H(j) | FactorKind::HAdj(j) => hj_weights(k, j),
            FactorKind::HR(r) | FactorKind::HRAdj(r) => Ok(hr_weights(&k.kernel, r)),
            FactorKind::S(a, b) | FactorKind::SAdj(a, b) => block_weights(k, a, b),
        }
    }

    pub fn resolve<V: Coefficient>(&self, f: &Factor) -> Result<RadonOperator<V>> {
        let op = RadonOperator::from_real(self.sequence(&f.sequence)?, &self.factor_weights(f)?)?;
        Ok(if f.kind.is_adjoint() { op.adjoint() } else { op })
    }

    pub fn resolve_chain<V: Coefficient>(&self, chain: &OperatorChain) -> Result<ResolvedChain<V>> {
        let factors = chain.factors.iter().map(|f| self.resolve(f)).collect::<Result<Vec<_>>>()?;
        let d = factors.first().map(|f| f.d());
        if let Some(d) = d {
            if let Some(bad) = factors.iter().find(|f| f.d() != d) {
                return Err(Error::Dimension { expected: d, found: bad.d() });
            }
        }
        Ok(ResolvedChain { factors })
    }
}

/// A chain whose factors have been turned into operators.
#[derive(Debug, Clone)]
pub struct ResolvedChain<V> {
    pub factors: Vec<RadonOperator<V>>,
}

impl<V: Coefficient> ResolvedChain<V> {
    pub fn single(op: RadonOperator<V>) -> Self {
        ResolvedChain { factors: vec![op] }
    }

    pub fn adjoint(&self) -> Self {
        ResolvedChain { factors: self.factors.iter().rev().map(|f| f.adjoint()).collect() }
    }

    /// Applies the factors right to left.
    pub fn apply(&self, f: &SparseFunction<V>, budget: u128) -> Result<SparseFunction<V>> {
        let mut cur = f.clone();
        for op in self.factors.iter().rev() {
            cur = op.apply(&cur, budget)?;
        }
        Ok(cur)
    }

    /// Upper bound on the support of the image of a function with support `n`.
    pub fn support_bound(&self, n: usize) -> u128 {
        self.factors.iter().fold(n as u128, |acc, f| acc.saturating_mul(f.weight_count() as u128))
    }
}

/// Exact apply of a registered chain; an empty chain is the identity.
pub fn apply_chain<V: Coefficient>(
    registry: &Registry,
    chain: &OperatorChain,
    f: &SparseFunction<V>,
    budget: u128,
) -> Result<SparseFunction<V>> {
    registry.resolve_chain::<V>(chain)?.apply(f, budget)
}

/// h ↦ Σ_{D(n,m)=h} ∏_i K_{j_i}(n_i)K_{k_i}(m_i) for `pairs` = [(j₁,k₁),…,(j_r,k_r)], r ≤ 2,
/// computed from the closed form of D (or D̃) by enumerating all tuples.
pub fn exact_composition_kernel<V: Coefficient>(
    kernel: &DyadicKernel,
    d: usize,
    pairs: &[(u32, u32)],
    variant: Variant,
    budget: u128,
) -> Result<SparseFunction<V>> {
    let r = pairs.len();
    if r == 0 || r > 2 {
        return Err(Error::Domain(format!("composition length r = {r} outside 1..=2")));
    }
    if d == 0 {
        return Err(Error::Domain("d must be positive".into()));
    }
    // Slot order: n_1..n_r then m_1..m_r.
    let mut slots: Vec<Vec<(i64, f64)>> = Vec::with_capacity(2 * r);
    for &(j, _) in pairs {
        slots.push(hj_weights(kernel, j)?);
    }
    for &(_, k) in pairs {
        slots.push(hj_weights(kernel, k)?);
    }
    let cost = slots.iter().fold(1u128, |acc, s| acc.saturating_mul(s.len() as u128));
    if cost > budget {
        return Err(Error::Budget { what: "composition tuple enumeration".into(), cost, budget });
    }
    // Every coordinate of D is a sum of at most r² + r monomials of degree ≤ 2d.
    let max_abs = slots.iter().flat_map(|s| s.iter().map(|(n, _)| n.unsigned_abs())).max().unwrap_or(0);
    let log_bound = 2.0 * d as f64 * (max_abs.max(1) as f64).log2() + ((r * r + r) as f64).log2() + 1.0;
    if log_bound > 120.0 {
        return Err(Error::Overflow);
    }
    let pows: Vec<Vec<(Vec<i128>, V)>> = slots
        .iter()
        .map(|s| {
            s.iter()
                .map(|(n, w)| {
                    let mut p = vec![1i128; 2 * d + 1];
                    for k in 1..=2 * d {
                        p[k] = p[k - 1] * i128::from(*n);
                    }
                    (p, V::from_f64(*w))
                })
                .collect()
        })
        .collect();
    let mut out = SparseFunction::zero(d);
    let mut idx = vec![0usize; 2 * r];
    if pows.iter().any(|s| s.is_empty()) {
        return Ok(out);
    }
    loop {
        let xs: Vec<&[i128]> = (0..r).map(|i| pows[i][idx[i]].0.as_slice()).collect();
        let ys: Vec<&[i128]> = (0..r).map(|i| pows[r + i][idx[r + i]].0.as_slice()).collect();
        let h = d_from_powers(d, &xs, &ys, variant);
        let key: Key = h.iter().map(|&c| i64::try_from(c).map_err(|_| Error::Overflow)).collect::<Result<_>>()?;
        let mut w = pows[0][idx[0]].1.clone();
        for (s, &i) in idx.iter().enumerate().skip(1) {
            w = w.times(&pows[s][i].1);
        }
        out.add_at(key, &w);
        // Odometer over the 2r slots, last slot fastest.
        let mut s = 2 * r;
        loop {
            if s == 0 {
                out.prune();
                return Ok(out);
            }
            s -= 1;
            idx[s] += 1;
            if idx[s] < pows[s].len() {
                break;
            }
            idx[s] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::Dyadic;
    use crate::seq::a0_sequence;
    use num_complex::Complex64;
    use num_traits::Zero;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn identity_weight_is_identity() {
        let seq = a0_sequence(2).unwrap();
        let op = RadonOperator::<Complex64>::new(&seq, &[(0, c(1.0))]).unwrap();
        let f = SparseFunction::delta_identity(2);
        assert_eq!(op.apply(&f, DEFAULT_BUDGET).unwrap(), f);
    }

    #[test]
    fn shift_lands_on_orbit_point_and_adjoint_returns() {
        let seq = a0_sequence(2).unwrap();
        let op = RadonOperator::<Complex64>::new(&seq, &[(3, c(1.0))]).unwrap();
        let g = op.apply(&SparseFunction::delta_identity(2), DEFAULT_BUDGET).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.get(&[3, 9, 0]), c(1.0));
        let back = op.adjoint().apply(&g, DEFAULT_BUDGET).unwrap();
        assert_eq!(back, SparseFunction::delta_identity(2));
    }

    #[test]
    fn zero_weights_give_zero() {
        let seq = a0_sequence(1).unwrap();
        let op = RadonOperator::<Complex64>::new(&seq, &[(1, c(0.0))]).unwrap();
        assert!(op.apply(&SparseFunction::delta_identity(1), DEFAULT_BUDGET).unwrap().is_zero());
    }

    #[test]
    fn budget_refusal() {
        let seq = a0_sequence(1).unwrap();
        let w: Vec<(i64, f64)> = (1..=10).map(|n| (n, 1.0)).collect();
        let op = RadonOperator::<Complex64>::from_real(&seq, &w).unwrap();
        let err = op.apply(&SparseFunction::delta_identity(1), 5).unwrap_err();
        assert!(matches!(err, Error::Budget { cost: 10, budget: 5, .. }));
    }

    #[test]
    fn factor_parsing_round_trips() {
        for s in ["H:5", "H*:3", "HR:64", "HR*:16", "S:3-6", "S*:2-2"] {
            let k: FactorKind = s.parse().unwrap();
            assert_eq!(k.to_string(), s);
        }
        assert!("H:0".parse::<FactorKind>().is_err());
        assert!("S:5-3".parse::<FactorKind>().is_err());
        assert!("Q:1".parse::<FactorKind>().is_err());
    }

    #[test]
    fn block_range_defaults() {
        assert_eq!(block_range(8, 0.25), (6, 8));
        assert_eq!(block_range(1, 0.25), (1, 1));
        assert_eq!(block_range(4, 1.0), (1, 4));
    }

    #[test]
    fn hh_star_value_at_identity_is_sum_of_squares() {
        let mut reg = Registry::new();
        reg.register_kernel("k", CzKernel::log_osc(), 4).unwrap();
        reg.register_sequence("a", a0_sequence(2).unwrap());
        let chain = OperatorChain::uniform(&[FactorKind::H(3), FactorKind::HAdj(3)], "k", "a");
        let out = apply_chain::<Dyadic>(&reg, &chain, &SparseFunction::delta_identity(2), DEFAULT_BUDGET).unwrap();
        let mut expect = Dyadic::zero();
        for (_, w) in hj_weights(reg.kernel("k").unwrap(), 3).unwrap() {
            let w = Dyadic::from_f64(w).unwrap();
            expect += &(&w * &w);
        }
        assert_eq!(out.get(&key_identity(2)), expect);
    }

    #[test]
    fn empty_chain_is_identity() {
        let reg = Registry::new();
        let f = SparseFunction::<Complex64>::delta(1, Key::from_slice(&[4])).unwrap();
        assert_eq!(apply_chain(&reg, &OperatorChain::default(), &f, DEFAULT_BUDGET).unwrap(), f);
    }

    #[test]
    fn unregistered_names_are_rejected() {
        let reg = Registry::new();
        let chain = OperatorChain::uniform(&[FactorKind::H(1)], "nope", "nope");
        assert!(apply_chain::<Complex64>(&reg, &chain, &SparseFunction::delta_identity(1), 10).is_err());
    }

    #[test]
    fn composition_kernel_matches_chain_small() {
        let mut reg = Registry::new();
        reg.register_kernel("k", CzKernel::log_osc(), 4).unwrap();
        for d in 1..=2 {
            reg.register_sequence("a", a0_sequence(d).unwrap());
            for variant in [Variant::D, Variant::DTilde] {
                let pairs = [(2, 3)];
                let kernel = exact_composition_kernel::<Dyadic>(reg.kernel("k").unwrap(), d, &pairs, variant, DEFAULT_BUDGET).unwrap();
                let chain = OperatorChain::composition(&pairs, variant, "k", "a");
                let direct = apply_chain::<Dyadic>(&reg, &chain, &SparseFunction::delta_identity(d), DEFAULT_BUDGET).unwrap();
                assert_eq!(kernel, direct, "d={d} {variant:?}");
            }
        }
    }

    #[test]
    fn composition_kernel_r2_matches_chain() {
        let mut reg = Registry::new();
        reg.register_kernel("k", CzKernel::hilbert(), 3).unwrap();
        reg.register_sequence("a", a0_sequence(2).unwrap());
        let pairs = [(1, 2), (2, 1)];
        for variant in [Variant::D, Variant::DTilde] {
            let kernel = exact_composition_kernel::<Dyadic>(reg.kernel("k").unwrap(), 2, &pairs, variant, DEFAULT_BUDGET).unwrap();
            let chain = OperatorChain::composition(&pairs, variant, "k", "a");
            let direct = apply_chain::<Dyadic>(&reg, &chain, &SparseFunction::delta_identity(2), DEFAULT_BUDGET).unwrap();
            assert_eq!(kernel, direct);
        }
    }

    #[test]
    fn composition_total_mass_factorizes() {
        let dk = DyadicKernel::new(CzKernel::log_osc(), 4).unwrap();
        let pairs = [(2, 3)];
        let kern = exact_composition_kernel::<Dyadic>(&dk, 2, &pairs, Variant::D, DEFAULT_BUDGET).unwrap();
        let mut total = Dyadic::zero();
        for (_, v) in kern.iter() {
            total += v;
        }
        let sum = |j| {
            let mut s = Dyadic::zero();
            for (_, w) in hj_weights(&dk, j).unwrap() {
                s += &Dyadic::from_f64(w).unwrap();
            }
            s
        };
        assert_eq!(total, sum(2) * sum(3));
    }

    #[test]
    fn composition_budget_and_length_checks() {
        let dk = DyadicKernel::new(CzKernel::hilbert(), 4).unwrap();
        assert!(matches!(
            exact_composition_kernel::<Complex64>(&dk, 2, &[(4, 4)], Variant::D, 10),
            Err(Error::Budget { .. })
        ));
        assert!(exact_composition_kernel::<Complex64>(&dk, 2, &[], Variant::D, 10).is_err());
        assert!(exact_composition_kernel::<Complex64>(&dk, 2, &[(1, 1); 3], Variant::D, 10).is_err());
    }
}
