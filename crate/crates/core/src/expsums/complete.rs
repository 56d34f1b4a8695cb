//! Complete sums S(a/q) = q^{-2r} Σ_{v,w ∈ Z_q^r} e^{-2πi D(v,w)·a/q}.
//!
//! Phases are reduced exactly mod q. The sum is accumulated as integer counts
//! per residue k, then combined with one table of roots of unity.

use num_complex::Complex64;
use num_integer::Integer;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use super::dpoly::{d_from_powers, Variant};
use crate::error::{Error, Result};
use crate::group::index_len;

/// Default cap on q^{2r} enumerated tuples.
pub const DEFAULT_SUM_BUDGET: u128 = 1_000_000_000;

/// a/q = (a_{l1l2}/q) with representatives a_{l1l2} ∈ {1, …, q} and joint gcd(a, q) = 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiFraction {
    q: u64,
    a: Vec<u64>,
}

impl MultiFraction {
    pub fn new(d: usize, q: u64, a: Vec<u64>) -> Result<Self> {
        if q == 0 {
            return Err(Error::Domain("q must be positive".into()));
        }
        if a.len() != index_len(d) {
            return Err(Error::Dimension { expected: index_len(d), found: a.len() });
        }
        if let Some(bad) = a.iter().find(|&&x| x == 0 || x > q) {
            return Err(Error::Domain(format!("numerator {bad} outside 1..={q}")));
        }
        let g = a.iter().fold(q, |g, &x| g.gcd(&x));
        if g != 1 {
            return Err(Error::Domain(format!("gcd(a, q) = {g}, not 1")));
        }
        Ok(MultiFraction { q, a })
    }

    /// Reduces arbitrary integer numerators into {1, …, q}.
    pub fn from_residues(d: usize, q: u64, a: &[i64]) -> Result<Self> {
        let qi = q as i64;
        let reps = a
            .iter()
            .map(|&x| match x.rem_euclid(qi) as u64 {
                0 => q,
                v => v,
            })
            .collect();
        Self::new(d, q, reps)
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn a(&self) -> &[u64] {
        &self.a
    }

    /// Membership in S_R.
    pub fn in_set(&self, r: u64) -> bool {
        self.q <= r
    }

    /// −a/q, again with representatives in {1, …, q}.
    pub fn neg(&self) -> Self {
        let a = self.a.iter().map(|&x| if x == self.q { self.q } else { self.q - x }).collect();
        MultiFraction { q: self.q, a }
    }
}

/// Counts of D(v, w) mod q over v, w ∈ (offset + Z_q)^r.
#[derive(Debug, Clone)]
pub struct PhaseHistogram {
    q: u64,
    r: usize,
    dims: usize,
    /// (residue vector, multiplicity), sorted by residue vector.
    cells: Vec<(Vec<u64>, u64)>,
}

impl PhaseHistogram {
    pub fn build(d: usize, q: u64, r: usize, variant: Variant, offset: i64, budget: u128) -> Result<Self> {
        if q == 0 || r == 0 {
            return Err(Error::Domain("q and r must be positive".into()));
        }
        let cost = u128::from(q).checked_pow(2 * r as u32).unwrap_or(u128::MAX);
        if cost > budget {
            return Err(Error::Budget { what: "complete sum enumeration".into(), cost, budget });
        }
        let qi = i128::from(q);
        // Powers reduced mod q keep every intermediate small.
        let pows: Vec<Vec<i128>> = (0..q as i64)
            .map(|v| {
                let x = i128::from(v + offset).rem_euclid(qi);
                let mut p = vec![1i128 % qi; 2 * d + 1];
                for k in 1..=2 * d {
                    p[k] = (p[k - 1] * x) % qi;
                }
                p
            })
            .collect();
        let mut counts: FxHashMap<Vec<u64>, u64> = FxHashMap::default();
        let mut idx = vec![0usize; 2 * r];
        loop {
            let xs: Vec<&[i128]> = idx[..r].iter().map(|&i| pows[i].as_slice()).collect();
            let ys: Vec<&[i128]> = idx[r..].iter().map(|&i| pows[i].as_slice()).collect();
            let h: Vec<u64> = d_from_powers(d, &xs, &ys, variant).into_iter().map(|c| c.rem_euclid(qi) as u64).collect();
            *counts.entry(h).or_insert(0) += 1;
            let mut s = 2 * r;
            loop {
                if s == 0 {
                    let mut cells: Vec<_> = counts.into_iter().collect();
                    cells.sort();
                    return Ok(PhaseHistogram { q, r, dims: index_len(d), cells });
                }
                s -= 1;
                idx[s] += 1;
                if (idx[s] as u64) < q {
                    break;
                }
                idx[s] = 0;
            }
        }
    }

    /// Number of distinct residue vectors attained.
    pub fn cells(&self) -> usize {
        self.cells.len()
    }

    /// c_k = #{(v, w) : D(v,w)·a ≡ k mod q}.
    pub fn phase_counts(&self, a: &[u64]) -> Result<Vec<u64>> {
        if a.len() != self.dims {
            return Err(Error::Dimension { expected: self.dims, found: a.len() });
        }
        let q = self.q;
        let mut c = vec![0u64; q as usize];
        for (h, n) in &self.cells {
            let k = h.iter().zip(a).fold(0u64, |acc, (&hi, &ai)| (acc + hi * (ai % q)) % q);
            c[k as usize] += n;
        }
        Ok(c)
    }

    pub fn sum(&self, frac: &MultiFraction) -> Result<Complex64> {
        if frac.q != self.q {
            return Err(Error::Domain(format!("fraction denominator {} does not match histogram {}", frac.q, self.q)));
        }
        let counts = self.phase_counts(&frac.a)?;
        Ok(sum_from_counts(&counts, (self.q as f64).powi(2 * self.r as i32)))
    }
}

/// (1/total)·Σ_k c_k e^{-2πik/q}.
///
/// Σ_k e^{-2πik/q} = 0, so the minimum count is subtracted first; equidistributed
/// phases give exactly 0. Residues k and q−k are combined before rounding, which
/// makes conjugation symmetry exact.
pub fn sum_from_counts(counts: &[u64], total: f64) -> Complex64 {
    let q = counts.len();
    if q == 1 {
        return Complex64::new(counts[0] as f64 / total, 0.0);
    }
    let base = *counts.iter().min().expect("q >= 1");
    let c: Vec<u64> = counts.iter().map(|&x| x - base).collect();
    let mut re = c[0] as f64;
    let mut im = 0.0;
    let tau = 2.0 * std::f64::consts::PI / q as f64;
    for k in 1..q.div_ceil(2) {
        let (s, co) = (tau * k as f64).sin_cos();
        re += (c[k] + c[q - k]) as f64 * co;
        im += (c[q - k] as f64 - c[k] as f64) * s;
    }
    if q % 2 == 0 {
        re -= c[q / 2] as f64;
    }
    Complex64::new(re / total, im / total)
}

/// S(a/q) (or S̃(a/q)) with representatives {1, …, q}.
pub fn s_aq(d: usize, frac: &MultiFraction, r: usize, variant: Variant, budget: u128) -> Result<Complex64> {
    s_aq_with_offset(d, frac, r, variant, 1, budget)
}

/// S(a/q) summed over representatives {offset, …, offset + q − 1}.
pub fn s_aq_with_offset(
    d: usize,
    frac: &MultiFraction,
    r: usize,
    variant: Variant,
    offset: i64,
    budget: u128,
) -> Result<Complex64> {
    if frac.a.len() != index_len(d) {
        return Err(Error::Dimension { expected: index_len(d), found: frac.a.len() });
    }
    PhaseHistogram::build(d, frac.q, r, variant, offset, budget)?.sum(frac)
}

/// Every a ∈ {1..q}^{|Y_d|} with joint gcd(a, q) = 1, in lexicographic order.
pub fn irreducible_numerators(d: usize, q: u64) -> Vec<Vec<u64>> {
    let n = index_len(d);
    let mut out = Vec::new();
    let mut a = vec![1u64; n];
    loop {
        if a.iter().fold(q, |g, &x| g.gcd(&x)) == 1 {
            out.push(a.clone());
        }
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            a[i] += 1;
            if a[i] <= q {
                break;
            }
            a[i] = 1;
        }
    }
}

/// One row of the decay table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub q: u64,
    pub max_abs_s: f64,
    pub max_abs_stilde: f64,
    /// First numerator (lexicographically) attaining `max_abs_s`.
    pub argmax_a: Vec<u64>,
    /// Number of irreducible numerators enumerated.
    pub fractions: usize,
}

/// max_a |S(a/q)| and max_a |S̃(a/q)| for q = 1..=qmax.
pub fn saq_decay_table(d: usize, r: usize, qmax: u64, budget: u128) -> Result<Vec<DecayRow>> {
    let mut rows = Vec::new();
    for q in 1..=qmax {
        let hs = PhaseHistogram::build(d, q, r, Variant::D, 1, budget)?;
        let ht = PhaseHistogram::build(d, q, r, Variant::DTilde, 1, budget)?;
        let total = (q as f64).powi(2 * r as i32);
        let mut row = DecayRow { q, max_abs_s: -1.0, max_abs_stilde: -1.0, argmax_a: Vec::new(), fractions: 0 };
        for a in irreducible_numerators(d, q) {
            let s = sum_from_counts(&hs.phase_counts(&a)?, total).norm();
            let t = sum_from_counts(&ht.phase_counts(&a)?, total).norm();
            if s > row.max_abs_s {
                row.max_abs_s = s;
                row.argmax_a = a.clone();
            }
            row.max_abs_stilde = row.max_abs_stilde.max(t);
            row.fractions += 1;
        }
        rows.push(row);
    }
    Ok(rows)
}

/// CSV with header `q,max_abs_S,max_abs_Stilde,argmax_a`; numerators joined by `;`.
pub fn decay_table_csv(rows: &[DecayRow]) -> String {
    let mut s = String::from("q,max_abs_S,max_abs_Stilde,argmax_a\n");
    for r in rows {
        let a: Vec<String> = r.argmax_a.iter().map(|x| x.to_string()).collect();
        s.push_str(&format!("{},{:.16e},{:.16e},{}\n", r.q, r.max_abs_s, r.max_abs_stilde, a.join(";")));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const B: u128 = DEFAULT_SUM_BUDGET;

    #[test]
    fn q_one_is_one() {
        for d in 1..=3 {
            let f = MultiFraction::new(d, 1, vec![1; index_len(d)]).unwrap();
            for r in 1..=2 {
                assert_eq!(s_aq(d, &f, r, Variant::D, B).unwrap(), Complex64::new(1.0, 0.0));
            }
        }
    }

    #[test]
    fn d1_vanishes_exactly() {
        let f = MultiFraction::new(1, 5, vec![2]).unwrap();
        assert_eq!(s_aq(1, &f, 1, Variant::D, B).unwrap(), Complex64::new(0.0, 0.0));
        for q in 2..=12 {
            for a in irreducible_numerators(1, q) {
                let f = MultiFraction::new(1, q, a).unwrap();
                for r in 1..=3 {
                    assert_eq!(s_aq(1, &f, r, Variant::DTilde, B).unwrap().norm(), 0.0);
                }
            }
        }
    }

    #[test]
    fn fraction_validation() {
        assert!(MultiFraction::new(2, 4, vec![2, 2, 4]).is_err());
        assert!(MultiFraction::new(2, 4, vec![2, 3, 4]).is_ok());
        assert!(MultiFraction::new(2, 4, vec![0, 3, 4]).is_err());
        assert!(MultiFraction::new(2, 4, vec![1, 3]).is_err());
        let f = MultiFraction::from_residues(2, 5, &[-1, 0, 7]).unwrap();
        assert_eq!(f.a(), &[4, 5, 2]);
        assert_eq!(f.neg().a(), &[1, 5, 3]);
        assert!(f.in_set(5) && !f.in_set(4));
    }

    #[test]
    fn conjugation_symmetry_is_exact() {
        for q in [3u64, 4, 7, 9] {
            for a in irreducible_numerators(2, q).into_iter().step_by(5) {
                let f = MultiFraction::new(2, q, a).unwrap();
                let s = s_aq(2, &f, 1, Variant::D, B).unwrap();
                let t = s_aq(2, &f.neg(), 1, Variant::D, B).unwrap();
                assert_eq!(s.conj(), t);
            }
        }
    }

    #[test]
    fn representatives_do_not_matter() {
        let f = MultiFraction::new(2, 7, vec![3, 1, 5]).unwrap();
        let a = s_aq_with_offset(2, &f, 2, Variant::D, 1, B).unwrap();
        let b = s_aq_with_offset(2, &f, 2, Variant::D, 0, B).unwrap();
        let c = s_aq_with_offset(2, &f, 2, Variant::D, -40, B).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn budget_refusal() {
        let f = MultiFraction::new(2, 10, vec![1, 1, 1]).unwrap();
        assert!(matches!(s_aq(2, &f, 2, Variant::D, 1000), Err(Error::Budget { cost: 10000, .. })));
    }

    #[test]
    fn odd_prime_rows_below_one_for_r1() {
        let rows = saq_decay_table(2, 1, 7, B).unwrap();
        assert_eq!((rows[0].max_abs_s, rows[0].max_abs_stilde), (1.0, 1.0));
        for row in &rows[1..] {
            assert!(row.max_abs_s <= 1.0 + 1e-12);
            if [3, 5, 7].contains(&row.q) {
                assert!(row.max_abs_s < 1.0, "q={}", row.q);
            }
        }
    }

    #[test]
    fn q2_has_a_full_modulus_fraction() {
        // n² ≡ n mod 2 makes D_{20} ≡ D_{10}, so a = (1, 1, 0) sees phase 2·D_{10} ≡ 0.
        let f = MultiFraction::new(2, 2, vec![1, 1, 2]).unwrap();
        for r in 1..=2 {
            assert_eq!(s_aq(2, &f, r, Variant::D, B).unwrap(), Complex64::new(1.0, 0.0));
            assert_eq!(s_aq(2, &f, r, Variant::DTilde, B).unwrap(), Complex64::new(1.0, 0.0));
        }
        let rows = saq_decay_table(2, 1, 2, B).unwrap();
        assert_eq!(rows[1].max_abs_s, 1.0);
        assert_eq!(rows[1].argmax_a, vec![1, 1, 2]);
    }

    #[test]
    fn counts_with_uniform_residues_give_zero() {
        assert_eq!(sum_from_counts(&[3, 3, 3, 3, 3], 15.0), Complex64::new(0.0, 0.0));
        assert_eq!(sum_from_counts(&[4, 0], 4.0), Complex64::new(1.0, 0.0));
    }
}
