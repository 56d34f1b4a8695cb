//! Finitely supported functions on G₀(d) with checked i64 coordinates.

use std::collections::hash_map::Entry;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::dyadic::Coefficient;
use crate::error::{Error, Result};
use crate::group::{index_len, position, GroupElement};

/// Coordinates of a lattice point of G₀(d), in Y_d order.
pub type Key = SmallVec<[i64; 6]>;

/// Identity element of G₀(d).
pub fn key_identity(d: usize) -> Key {
    SmallVec::from_elem(0, index_len(d))
}

/// x·y with overflow detection.
pub fn key_mul(d: usize, x: &[i64], y: &[i64]) -> Result<Key> {
    let mut out = Key::with_capacity(index_len(d));
    for l1 in 1..=d {
        for l2 in 0..l1 {
            let p = position(l1, l2);
            let mut v = x[p].checked_add(y[p]).ok_or(Error::Overflow)?;
            if l2 >= 1 {
                let c = x[position(l1, 0)].checked_mul(y[position(l2, 0)]).ok_or(Error::Overflow)?;
                v = v.checked_add(c).ok_or(Error::Overflow)?;
            }
            out.push(v);
        }
    }
    Ok(out)
}

/// x⁻¹ with overflow detection.
pub fn key_inv(d: usize, x: &[i64]) -> Result<Key> {
    let mut out = Key::with_capacity(index_len(d));
    for l1 in 1..=d {
        for l2 in 0..l1 {
            let p = position(l1, l2);
            let mut v = x[p].checked_neg().ok_or(Error::Overflow)?;
            if l2 >= 1 {
                let c = x[position(l1, 0)].checked_mul(x[position(l2, 0)]).ok_or(Error::Overflow)?;
                v = v.checked_add(c).ok_or(Error::Overflow)?;
            }
            out.push(v);
        }
    }
    Ok(out)
}

/// Converts an exact group element to a key; fails if a coordinate exceeds i64.
pub fn key_from_element(g: &GroupElement<BigInt>) -> Result<Key> {
    g.coords().iter().map(|c| c.to_i64().ok_or(Error::Overflow)).collect()
}

pub fn key_to_element(d: usize, k: &[i64]) -> Result<GroupElement<BigInt>> {
    GroupElement::new(d, k.iter().map(|&c| BigInt::from(c)).collect())
}

/// A finitely supported function G₀(d) → V with no stored zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseFunction<V> {
    d: usize,
    entries: FxHashMap<Key, V>,
}

impl SparseFunction<Complex64> {
    /// `size` distinct random points with coordinates in [−radius, radius]
    /// and values uniform in the square [−1, 1)².
    pub fn random<R: rand::Rng>(rng: &mut R, d: usize, size: usize, radius: i64) -> Result<Self> {
        let cells = (2 * radius as u128 + 1).checked_pow(index_len(d) as u32).unwrap_or(u128::MAX);
        if radius < 0 || (size as u128) > cells {
            return Err(Error::Domain(format!("{size} points do not fit in the box of radius {radius}")));
        }
        let mut f = SparseFunction::zero(d);
        while f.len() < size {
            let k: Key = (0..index_len(d)).map(|_| rng.random_range(-radius..=radius)).collect();
            let v = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            f.insert(k, v)?;
        }
        Ok(f)
    }
}

#[derive(Serialize, Deserialize)]
struct JsonEntry {
    coords: Vec<i64>,
    re: f64,
    im: f64,
}

impl<V: Coefficient> SparseFunction<V> {
    pub fn zero(d: usize) -> Self {
        SparseFunction { d, entries: FxHashMap::default() }
    }

    /// δ_g.
    pub fn delta(d: usize, g: Key) -> Result<Self> {
        let mut f = Self::zero(d);
        f.insert(g, V::from_f64(1.0))?;
        Ok(f)
    }

    /// δ_e.
    pub fn delta_identity(d: usize) -> Self {
        let mut f = Self::zero(d);
        f.entries.insert(key_identity(d), V::from_f64(1.0));
        f
    }

    pub fn d(&self) -> usize {
        self.d
    }

    fn check_key(&self, k: &[i64]) -> Result<()> {
        if k.len() != index_len(self.d) {
            return Err(Error::Dimension { expected: index_len(self.d), found: k.len() });
        }
        Ok(())
    }

    /// Sets f(g) = v, removing the entry when v = 0.
    pub fn insert(&mut self, g: Key, v: V) -> Result<()> {
        self.check_key(&g)?;
        if v.is_zero() {
            self.entries.remove(&g);
        } else {
            self.entries.insert(g, v);
        }
        Ok(())
    }

    /// f(g) += v. Zeros produced by cancellation are kept until [`Self::prune`].
    pub(crate) fn add_at(&mut self, g: Key, v: &V) {
        match self.entries.entry(g) {
            Entry::Occupied(mut e) => e.get_mut().accumulate(v),
            Entry::Vacant(e) => {
                e.insert(v.clone());
            }
        }
    }

    pub(crate) fn prune(&mut self) {
        self.entries.retain(|_, v| !v.is_zero());
    }

    pub fn get(&self, g: &[i64]) -> V {
        self.entries.get(g).cloned().unwrap_or_else(V::zero)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Key, &V)> {
        self.entries.iter()
    }

    /// Entries in lexicographic key order.
    pub fn sorted_entries(&self) -> Vec<(&Key, &V)> {
        let mut v: Vec<_> = self.entries.iter().collect();
        v.sort_by(|a, b| a.0.cmp(b.0));
        v
    }

    /// ⟨f, g⟩ = Σ f(x)·conj(g(x)), summed in key order.
    pub fn inner(&self, other: &Self) -> V {
        let (small, large, swap) =
            if self.len() <= other.len() { (self, other, false) } else { (other, self, true) };
        let mut acc = V::zero();
        for (k, a) in small.sorted_entries() {
            if let Some(b) = large.entries.get(k) {
                let t = if swap { b.times(&a.conj()) } else { a.times(&b.conj()) };
                acc.accumulate(&t);
            }
        }
        acc
    }

    /// Σ |f|², exact for exact scalars.
    pub fn norm_sq(&self) -> V {
        self.inner(self)
    }

    /// ℓ² norm as a float.
    pub fn norm(&self) -> f64 {
        self.norm_sq().to_complex().re.max(0.0).sqrt()
    }

    pub fn scale(&self, c: &V) -> Self {
        let mut out = Self::zero(self.d);
        for (k, v) in &self.entries {
            let t = v.times(c);
            if !t.is_zero() {
                out.entries.insert(k.clone(), t);
            }
        }
        out
    }

    /// α·f + β·g.
    pub fn combine(&self, alpha: &V, other: &Self, beta: &V) -> Result<Self> {
        if self.d != other.d {
            return Err(Error::Dimension { expected: self.d, found: other.d });
        }
        let mut out = self.scale(alpha);
        for (k, v) in &other.entries {
            out.add_at(k.clone(), &v.times(beta));
        }
        out.prune();
        Ok(out)
    }

    /// g ↦ f(g·a).
    pub fn right_translate(&self, a: &[i64]) -> Result<Self> {
        self.check_key(a)?;
        let ainv = key_inv(self.d, a)?;
        let mut out = Self::zero(self.d);
        for (k, v) in &self.entries {
            out.entries.insert(key_mul(self.d, k, &ainv)?, v.clone());
        }
        Ok(out)
    }

    pub fn to_complex(&self) -> SparseFunction<Complex64> {
        SparseFunction {
            d: self.d,
            entries: self.entries.iter().map(|(k, v)| (k.clone(), v.to_complex())).collect(),
        }
    }

    /// One JSON object {coords, re, im} per line, in key order.
    pub fn to_json_lines(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.sorted_entries() {
            let z = v.to_complex();
            let line = JsonEntry { coords: k.to_vec(), re: z.re, im: z.im };
            s.push_str(&serde_json::to_string(&line).expect("serializable"));
            s.push('\n');
        }
        s
    }

    /// Largest absolute coordinate over the support.
    pub fn max_abs_coord(&self) -> i64 {
        self.entries.keys().flat_map(|k| k.iter().map(|c| c.saturating_abs())).max().unwrap_or(0)
    }

    /// Largest pointwise difference |f − g|.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut m = 0.0f64;
        for (k, v) in &self.entries {
            m = m.max((v.to_complex() - other.get(k).to_complex()).norm());
        }
        for (k, v) in &other.entries {
            if !self.entries.contains_key(k) {
                m = m.max(v.to_complex().norm());
            }
        }
        m
    }
}

impl SparseFunction<Complex64> {
    pub fn from_json_lines(d: usize, s: &str) -> Result<Self> {
        let mut f = Self::zero(d);
        for (i, line) in s.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let e: JsonEntry =
                serde_json::from_str(line).map_err(|e| Error::Parse(format!("line {}: {e}", i + 1)))?;
            f.insert(e.coords.into_iter().collect(), Complex64::new(e.re, e.im))?;
        }
        Ok(f)
    }
}

impl<V: Coefficient> Zero for SparseFunction<V> {
    fn zero() -> Self {
        SparseFunction::zero(1)
    }

    fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }
}

impl<V: Coefficient> std::ops::Add for SparseFunction<V> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        let one = V::from_f64(1.0);
        self.combine(&one, &rhs, &one).expect("matching dimensions")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupElement;

    #[test]
    fn key_law_matches_group_law() {
        let x = [3i64, -2, 5];
        let y = [-1i64, 4, 7];
        let gx = key_to_element(2, &x).unwrap();
        let gy = key_to_element(2, &y).unwrap();
        assert_eq!(key_from_element(&gx.multiply(&gy).unwrap()).unwrap().as_slice(), key_mul(2, &x, &y).unwrap().as_slice());
        assert_eq!(key_from_element(&gx.inverse()).unwrap().as_slice(), key_inv(2, &x).unwrap().as_slice());
    }

    #[test]
    fn overflow_is_detected() {
        let x = [i64::MAX, 0, 0];
        assert!(matches!(key_mul(2, &x, &x), Err(Error::Overflow)));
        let big = GroupElement::<BigInt>::new(1, vec![BigInt::from(u64::MAX)]).unwrap();
        assert!(key_from_element(&big).is_err());
    }

    #[test]
    fn no_stored_zeros() {
        let mut f = SparseFunction::<Complex64>::zero(1);
        f.insert(Key::from_slice(&[2]), Complex64::new(0.0, 0.0)).unwrap();
        assert!(f.is_empty());
        f.insert(Key::from_slice(&[2]), Complex64::new(1.0, 0.0)).unwrap();
        let g = f.combine(&Complex64::new(1.0, 0.0), &f, &Complex64::new(-1.0, 0.0)).unwrap();
        assert!(g.is_empty());
    }

    #[test]
    fn json_round_trip() {
        let mut f = SparseFunction::<Complex64>::zero(2);
        f.insert(Key::from_slice(&[1, -2, 3]), Complex64::new(0.5, -0.25)).unwrap();
        f.insert(Key::from_slice(&[0, 0, 0]), Complex64::new(1.0, 0.0)).unwrap();
        let s = f.to_json_lines();
        assert!(s.starts_with("{\"coords\":[0,0,0],\"re\":1.0,\"im\":0.0}"));
        assert_eq!(SparseFunction::from_json_lines(2, &s).unwrap(), f);
    }

    #[test]
    fn right_translation_moves_support() {
        let f = SparseFunction::<Complex64>::delta_identity(2);
        let a = [1i64, 2, 3];
        let g = f.right_translate(&a).unwrap();
        // g(x) = f(x·a) is supported at a⁻¹.
        let ainv = key_inv(2, &a).unwrap();
        assert_eq!(g.get(&ainv), Complex64::new(1.0, 0.0));
        assert_eq!(g.len(), 1);
    }
}
