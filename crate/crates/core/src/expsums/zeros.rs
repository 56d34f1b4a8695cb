//! Zero counts of polynomials on product sets A^s against the bound deg·|A|^{s−1}.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integer polynomial in `nvars` variables, keyed by exponent vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, i64>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly { nvars, terms: BTreeMap::new() }
    }

    /// Sums like terms and drops zero coefficients.
    pub fn from_terms(nvars: usize, terms: &[(Vec<u32>, i64)]) -> Result<Self> {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::Dimension { expected: nvars, found: e.len() });
            }
            *p.terms.entry(e.clone()).or_insert(0) += c;
        }
        p.terms.retain(|_, c| *c != 0);
        Ok(p)
    }

    /// x_i − c.
    pub fn linear(nvars: usize, i: usize, c: i64) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::from_terms(nvars, &[(e, 1), (vec![0; nvars], -c)]).expect("lengths match")
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; 0 for constants and for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.nvars != other.nvars {
            return Err(Error::Dimension { expected: self.nvars, found: other.nvars });
        }
        let mut t = Vec::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                t.push((e, c1.checked_mul(*c2).ok_or(Error::Overflow)?));
            }
        }
        Self::from_terms(self.nvars, &t)
    }

    /// Exact value at an integer point.
    pub fn eval(&self, x: &[i64]) -> Result<i128> {
        if x.len() != self.nvars {
            return Err(Error::Dimension { expected: self.nvars, found: x.len() });
        }
        let mut acc: i128 = 0;
        for (e, c) in &self.terms {
            let mut t = i128::from(*c);
            for (xi, &k) in x.iter().zip(e) {
                t = t.checked_mul(i128::from(*xi).checked_pow(k).ok_or(Error::Overflow)?).ok_or(Error::Overflow)?;
            }
            acc = acc.checked_add(t).ok_or(Error::Overflow)?;
        }
        Ok(acc)
    }
}

/// Zero count of a polynomial on A^s and the bound deg·|A|^{s−1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroCount {
    pub count: u64,
    pub bound: u64,
    pub pass: bool,
}

/// Brute-force count over A^s, s = number of variables. Requires s ≤ 4,
/// |A| ≤ 8, degree ≤ 6, distinct elements of A, and a non-zero polynomial.
pub fn count_zeros_bound(poly: &MultiPoly, set: &[i64]) -> Result<ZeroCount> {
    if poly.is_zero() {
        return Err(Error::Domain("polynomial is identically zero".into()));
    }
    let s = poly.nvars();
    if s == 0 || s > 4 || set.is_empty() || set.len() > 8 || poly.degree() > 6 {
        return Err(Error::Domain(format!(
            "outside the exhaustive range: s = {s}, |A| = {}, degree = {}",
            set.len(),
            poly.degree()
        )));
    }
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != set.len() {
        return Err(Error::Domain("A has repeated elements".into()));
    }
    let a = set.len();
    let mut idx = vec![0usize; s];
    let mut point = vec![0i64; s];
    let mut count = 0u64;
    loop {
        for (p, &i) in point.iter_mut().zip(&idx) {
            *p = set[i];
        }
        if poly.eval(&point)? == 0 {
            count += 1;
        }
        let mut k = s;
        loop {
            if k == 0 {
                let bound = u64::from(poly.degree()) * (a as u64).pow(s as u32 - 1);
                return Ok(ZeroCount { count, bound, pass: count <= bound });
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < a {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// A random non-zero polynomial with `s` variables and degree ≤ `deg`.
/// Half the draws are products of linear factors x_i − c with c ∈ `set`,
/// which have many zeros on A^s; the rest have random sparse coefficients.
pub fn random_poly<R: Rng>(rng: &mut R, s: usize, deg: u32, set: &[i64]) -> MultiPoly {
    loop {
        let p = if rng.random_bool(0.5) && !set.is_empty() && deg >= 1 {
            let k = rng.random_range(1..=deg);
            let mut p = MultiPoly::from_terms(s, &[(vec![0; s], rng.random_range(1..=3))]).expect("constant");
            for _ in 0..k {
                let f = MultiPoly::linear(s, rng.random_range(0..s), set[rng.random_range(0..set.len())]);
                p = p.mul(&f).expect("small coefficients");
            }
            p
        } else {
            let nterms = rng.random_range(1..=6);
            let terms: Vec<(Vec<u32>, i64)> = (0..nterms)
                .map(|_| {
                    let mut e = vec![0u32; s];
                    let total = rng.random_range(0..=deg);
                    for _ in 0..total {
                        e[rng.random_range(0..s)] += 1;
                    }
                    (e, rng.random_range(-3..=3))
                })
                .collect();
            MultiPoly::from_terms(s, &terms).expect("lengths match")
        };
        if !p.is_zero() {
            return p;
        }
    }
}

/// A random set of `size` distinct integers from [−5, 5].
pub fn random_set<R: Rng>(rng: &mut R, size: usize) -> Vec<i64> {
    let mut pool: Vec<i64> = (-5..=5).collect();
    let mut out = Vec::with_capacity(size);
    for _ in 0..size.min(pool.len()) {
        let i = rng.random_range(0..pool.len());
        out.push(pool.swap_remove(i));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(v: &[u32]) -> Vec<u32> {
        v.to_vec()
    }

    #[test]
    fn worked_examples() {
        let p = MultiPoly::from_terms(2, &[(e(&[1, 1]), 1), (e(&[0, 0]), -1)]).unwrap();
        assert_eq!(count_zeros_bound(&p, &[-1, 0, 1]).unwrap(), ZeroCount { count: 2, bound: 6, pass: true });
        let p = MultiPoly::from_terms(1, &[(e(&[1]), 1)]).unwrap();
        assert_eq!(count_zeros_bound(&p, &[1, 2]).unwrap().count, 0);
        let p = MultiPoly::from_terms(2, &[(e(&[1, 0]), 1), (e(&[0, 1]), -1)]).unwrap();
        assert_eq!(count_zeros_bound(&p, &[0, 1, 2]).unwrap(), ZeroCount { count: 3, bound: 3, pass: true });
    }

    #[test]
    fn zero_polynomial_rejected() {
        let p = MultiPoly::from_terms(2, &[(e(&[1, 0]), 1), (e(&[1, 0]), -1)]).unwrap();
        assert!(p.is_zero());
        assert!(count_zeros_bound(&p, &[0, 1]).is_err());
    }

    #[test]
    fn limits_enforced() {
        let p = MultiPoly::linear(5, 0, 0);
        assert!(count_zeros_bound(&p, &[0, 1]).is_err());
        let p = MultiPoly::linear(2, 0, 0);
        assert!(count_zeros_bound(&p, &[0, 0]).is_err());
    }

    #[test]
    fn products_of_linear_factors() {
        // (x − 1)(y − 2) on {0,1,2}²: zeros where x = 1 or y = 2.
        let p = MultiPoly::linear(2, 0, 1).mul(&MultiPoly::linear(2, 1, 2)).unwrap();
        assert_eq!(p.degree(), 2);
        let z = count_zeros_bound(&p, &[0, 1, 2]).unwrap();
        assert_eq!(z.count, 5);
        assert_eq!(z.bound, 6);
    }
}
