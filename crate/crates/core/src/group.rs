//! Exact arithmetic in the universal step-2 group G₀(d) and in general
//! step-2 groups given by a bilinear form.
//!
//! Coordinates of G₀(d) are indexed by Y_d = {(l1, l2) : 0 ≤ l2 < l1 ≤ d}
//! in lexicographic order: (1,0), (2,0), (2,1), (3,0), (3,1), (3,2), ...
//! The pair (l1, l2) sits at position l1(l1-1)/2 + l2.

use std::fmt::{Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Commutative ring with identity; the coordinate type of every group element.
pub trait Ring:
    Clone
    + PartialEq
    + Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
}

impl<T> Ring for T where
    T: Clone
        + PartialEq
        + Debug
        + Zero
        + One
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Neg<Output = T>
{
}

/// |Y_d| = d(d+1)/2.
pub fn index_len(d: usize) -> usize {
    d * (d + 1) / 2
}

/// Position of (l1, l2) in the canonical order. Requires 0 ≤ l2 < l1.
#[inline]
pub fn position(l1: usize, l2: usize) -> usize {
    debug_assert!(l2 < l1);
    l1 * (l1 - 1) / 2 + l2
}

/// The index set Y_d with its canonical ordering.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IndexSet {
    d: usize,
    pairs: Vec<(usize, usize)>,
}

impl IndexSet {
    pub fn new(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Domain("d must be positive".into()));
        }
        let mut pairs = Vec::with_capacity(index_len(d));
        for l1 in 1..=d {
            for l2 in 0..l1 {
                pairs.push((l1, l2));
            }
        }
        Ok(IndexSet { d, pairs })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn position(&self, l1: usize, l2: usize) -> Option<usize> {
        (l2 < l1 && l1 <= self.d).then(|| position(l1, l2))
    }
}

/// A point of G₀(d) (or of its real form when `T` is rational).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupElement<T> {
    d: usize,
    coords: Vec<T>,
}

impl<T: Ring> GroupElement<T> {
    pub fn identity(d: usize) -> Self {
        GroupElement { d, coords: vec![T::zero(); index_len(d)] }
    }

    pub fn new(d: usize, coords: Vec<T>) -> Result<Self> {
        if d == 0 {
            return Err(Error::Domain("d must be positive".into()));
        }
        if coords.len() != index_len(d) {
            return Err(Error::Dimension { expected: index_len(d), found: coords.len() });
        }
        Ok(GroupElement { d, coords })
    }

    /// Element with first-layer coordinates `xs[l1-1]` at (l1, 0) and zero second layer.
    pub fn from_first_layer(xs: Vec<T>) -> Self {
        let d = xs.len();
        let mut e = Self::identity(d);
        for (i, x) in xs.into_iter().enumerate() {
            e.coords[position(i + 1, 0)] = x;
        }
        e
    }

    /// Generator g_l: the unit vector at (l, 0).
    pub fn generator(d: usize, l: usize) -> Self {
        let mut e = Self::identity(d);
        e.coords[position(l, 0)] = T::one();
        e
    }

    /// Unit vector at an arbitrary (l1, l2).
    pub fn unit(d: usize, l1: usize, l2: usize) -> Self {
        let mut e = Self::identity(d);
        e.coords[position(l1, l2)] = T::one();
        e
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<T> {
        self.coords
    }

    pub fn coord(&self, l1: usize, l2: usize) -> &T {
        &self.coords[position(l1, l2)]
    }

    pub fn is_identity(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    /// True when every first-layer coordinate vanishes.
    pub fn is_central(&self) -> bool {
        (1..=self.d).all(|l1| self.coord(l1, 0).is_zero())
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.d != other.d {
            return Err(Error::Dimension { expected: self.d, found: other.d });
        }
        Ok(())
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = Vec::with_capacity(self.coords.len());
        for l1 in 1..=self.d {
            for l2 in 0..l1 {
                let p = position(l1, l2);
                let mut v = self.coords[p].clone() + other.coords[p].clone();
                if l2 >= 1 {
                    v = v + self.coords[position(l1, 0)].clone()
                        * other.coords[position(l2, 0)].clone();
                }
                out.push(v);
            }
        }
        Ok(GroupElement { d: self.d, coords: out })
    }

    pub fn inverse(&self) -> Self {
        let mut out = Vec::with_capacity(self.coords.len());
        for l1 in 1..=self.d {
            for l2 in 0..l1 {
                let p = position(l1, l2);
                let mut v = -self.coords[p].clone();
                if l2 >= 1 {
                    v = v + self.coords[position(l1, 0)].clone()
                        * self.coords[position(l2, 0)].clone();
                }
                out.push(v);
            }
        }
        GroupElement { d: self.d, coords: out }
    }

    /// x·y·x⁻¹·y⁻¹.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.multiply(other)?
            .multiply(&self.inverse())?
            .multiply(&other.inverse())
    }

    pub fn map<U, F: Fn(&T) -> U>(&self, f: F) -> GroupElement<U> {
        GroupElement { d: self.d, coords: self.coords.iter().map(f).collect() }
    }
}

impl<T: Ring + Signed> GroupElement<T> {
    /// Λ∘x = (Λ^{l1+l2} x_{l1l2}).
    pub fn dilate(&self, lam: &T) -> Result<Self> {
        if !lam.is_positive() {
            return Err(Error::Domain("dilation parameter must be positive".into()));
        }
        let mut powers = vec![T::one()];
        for k in 1..=2 * self.d {
            powers.push(powers[k - 1].clone() * lam.clone());
        }
        let mut out = self.coords.clone();
        for l1 in 1..=self.d {
            for l2 in 0..l1 {
                let p = position(l1, l2);
                out[p] = out[p].clone() * powers[l1 + l2].clone();
            }
        }
        Ok(GroupElement { d: self.d, coords: out })
    }

    /// |x| = Σ |x_{l1l2}|.
    pub fn homogeneous_norm(&self) -> T {
        self.coords.iter().fold(T::zero(), |acc, c| acc + c.abs())
    }
}

impl GroupElement<BigInt> {
    pub fn to_rational(&self) -> GroupElement<BigRational> {
        self.map(|c| BigRational::from_integer(c.clone()))
    }
}

impl GroupElement<BigRational> {
    /// Membership in the ball D_Λ: |(1/Λ)∘x| < 1.
    pub fn in_ball(&self, lam: &BigRational) -> Result<bool> {
        if !lam.is_positive() {
            return Err(Error::Domain("ball radius must be positive".into()));
        }
        let scaled = self.dilate(&lam.recip())?;
        Ok(scaled.homogeneous_norm() < BigRational::one())
    }
}

#[derive(Serialize, Deserialize)]
struct ElementJson {
    d: usize,
    coords: Vec<String>,
}

impl<T: Ring + Display + FromStr> GroupElement<T> {
    /// `{"d":2,"coords":["1","2","3"]}`.
    pub fn to_json(&self) -> String {
        let j = ElementJson { d: self.d, coords: self.coords.iter().map(|c| c.to_string()).collect() };
        serde_json::to_string(&j).expect("plain struct serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: ElementJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let coords = j
            .coords
            .iter()
            .map(|c| c.parse::<T>().map_err(|_| Error::Parse(format!("bad coordinate {c:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(j.d, coords)
    }
}

/// Free-function forms of the group operations.
pub fn multiply<T: Ring>(x: &GroupElement<T>, y: &GroupElement<T>) -> Result<GroupElement<T>> {
    x.multiply(y)
}

pub fn inverse<T: Ring>(x: &GroupElement<T>) -> GroupElement<T> {
    x.inverse()
}

pub fn commutator<T: Ring>(x: &GroupElement<T>, y: &GroupElement<T>) -> Result<GroupElement<T>> {
    x.commutator(y)
}

/// A dilation Λ > 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Dilation<T> {
    lambda: T,
}

impl<T: Ring + Signed> Dilation<T> {
    pub fn new(lambda: T) -> Result<Self> {
        if !lambda.is_positive() {
            return Err(Error::Domain("dilation parameter must be positive".into()));
        }
        Ok(Dilation { lambda })
    }

    pub fn lambda(&self) -> &T {
        &self.lambda
    }

    pub fn apply(&self, x: &GroupElement<T>) -> GroupElement<T> {
        x.dilate(&self.lambda).expect("lambda checked positive")
    }
}

/// A step-2 group on R^{d1} × R^{d2} with law (x,y)(x',y') = (x+x', y+y'+R(x,x')),
/// where R_k(x,x') = xᵀ M_k x'.
#[derive(Debug, Clone, PartialEq)]
pub struct Step2Group {
    dim1: usize,
    dim2: usize,
    bilinear: Vec<Vec<Vec<BigRational>>>,
}

/// Element of a [`Step2Group`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Step2Element<T> {
    pub x: Vec<T>,
    pub y: Vec<T>,
}

impl<T: Ring> Step2Element<T> {
    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(self.y.iter()).all(Zero::is_zero)
    }
}

impl Step2Group {
    pub fn new(dim1: usize, dim2: usize, bilinear: Vec<Vec<Vec<BigRational>>>) -> Result<Self> {
        if bilinear.len() != dim2 {
            return Err(Error::Dimension { expected: dim2, found: bilinear.len() });
        }
        for m in &bilinear {
            if m.len() != dim1 {
                return Err(Error::Dimension { expected: dim1, found: m.len() });
            }
            for row in m {
                if row.len() != dim1 {
                    return Err(Error::Dimension { expected: dim1, found: row.len() });
                }
            }
        }
        Ok(Step2Group { dim1, dim2, bilinear })
    }

    /// R ≡ 0.
    pub fn abelian(dim1: usize, dim2: usize) -> Self {
        let zero = vec![vec![vec![BigRational::zero(); dim1]; dim1]; dim2];
        Step2Group { dim1, dim2, bilinear: zero }
    }

    /// d1 = 2, d2 = 1, R(x, x') = x₁x'₂.
    pub fn heisenberg() -> Self {
        let mut m = vec![vec![BigRational::zero(); 2]; 2];
        m[0][1] = BigRational::one();
        Step2Group { dim1: 2, dim2: 1, bilinear: vec![m] }
    }

    pub fn dim1(&self) -> usize {
        self.dim1
    }

    pub fn dim2(&self) -> usize {
        self.dim2
    }

    pub fn bilinear(&self) -> &[Vec<Vec<BigRational>>] {
        &self.bilinear
    }

    pub fn is_abelian(&self) -> bool {
        self.bilinear.iter().flatten().flatten().all(Zero::is_zero)
    }

    pub fn identity<T: Ring>(&self) -> Step2Element<T> {
        Step2Element { x: vec![T::zero(); self.dim1], y: vec![T::zero(); self.dim2] }
    }

    fn check<T>(&self, e: &Step2Element<T>) -> Result<()> {
        if e.x.len() != self.dim1 {
            return Err(Error::Dimension { expected: self.dim1, found: e.x.len() });
        }
        if e.y.len() != self.dim2 {
            return Err(Error::Dimension { expected: self.dim2, found: e.y.len() });
        }
        Ok(())
    }

    /// R(x, x').
    pub fn form<T: Ring + From<BigRational>>(&self, x: &[T], xp: &[T]) -> Vec<T> {
        self.bilinear
            .iter()
            .map(|m| {
                let mut acc = T::zero();
                for (a, row) in m.iter().enumerate() {
                    for (b, c) in row.iter().enumerate() {
                        if !c.is_zero() {
                            acc = acc + T::from(c.clone()) * x[a].clone() * xp[b].clone();
                        }
                    }
                }
                acc
            })
            .collect()
    }

    pub fn multiply<T: Ring + From<BigRational>>(
        &self,
        a: &Step2Element<T>,
        b: &Step2Element<T>,
    ) -> Result<Step2Element<T>> {
        self.check(a)?;
        self.check(b)?;
        let r = self.form(&a.x, &b.x);
        let x = a.x.iter().zip(&b.x).map(|(u, v)| u.clone() + v.clone()).collect();
        let y = a
            .y
            .iter()
            .zip(&b.y)
            .zip(r)
            .map(|((u, v), w)| u.clone() + v.clone() + w)
            .collect();
        Ok(Step2Element { x, y })
    }

    /// (x,y)⁻¹ = (−x, −y + R(x,x)).
    pub fn inverse<T: Ring + From<BigRational>>(&self, a: &Step2Element<T>) -> Step2Element<T> {
        let r = self.form(&a.x, &a.x);
        Step2Element {
            x: a.x.iter().map(|u| -u.clone()).collect(),
            y: a.y.iter().zip(r).map(|(u, w)| w - u.clone()).collect(),
        }
    }

    /// (x,y)^n = (n x, n y + n(n−1)/2 · R(x,x)) for any integer n.
    pub fn power<T: Ring + From<BigRational>>(&self, a: &Step2Element<T>, n: &BigInt) -> Step2Element<T> {
        let nq = T::from(BigRational::from_integer(n.clone()));
        let half = T::from(BigRational::new(n * (n - BigInt::one()), BigInt::from(2)));
        let r = self.form(&a.x, &a.x);
        Step2Element {
            x: a.x.iter().map(|u| nq.clone() * u.clone()).collect(),
            y: a.y.iter().zip(r).map(|(u, w)| nq.clone() * u.clone() + half.clone() * w).collect(),
        }
    }

    pub fn commutator<T: Ring + From<BigRational>>(
        &self,
        a: &Step2Element<T>,
        b: &Step2Element<T>,
    ) -> Result<Step2Element<T>> {
        let ab = self.multiply(a, b)?;
        let abai = self.multiply(&ab, &self.inverse(a))?;
        self.multiply(&abai, &self.inverse(b))
    }
}

/// Free-function form of the step-2 law.
pub fn step2_multiply(
    g: &Step2Group,
    a: &Step2Element<BigRational>,
    b: &Step2Element<BigRational>,
) -> Result<Step2Element<BigRational>> {
    g.multiply(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&c| BigInt::from(c)).collect()
    }

    fn el(d: usize, v: &[i64]) -> GroupElement<BigInt> {
        GroupElement::new(d, z(v)).unwrap()
    }

    fn q(n: i64, m: i64) -> BigRational {
        BigRational::new(n.into(), m.into())
    }

    #[test]
    fn index_order_is_lexicographic() {
        let y = IndexSet::new(3).unwrap();
        assert_eq!(y.pairs(), &[(1, 0), (2, 0), (2, 1), (3, 0), (3, 1), (3, 2)]);
        for (i, &(l1, l2)) in y.pairs().iter().enumerate() {
            assert_eq!(y.position(l1, l2), Some(i));
        }
        assert!(IndexSet::new(0).is_err());
    }

    #[test]
    fn multiply_examples() {
        let a = el(2, &[0, 1, 0]);
        let b = el(2, &[1, 0, 0]);
        assert_eq!(a.multiply(&b).unwrap(), el(2, &[1, 1, 1]));
        assert_eq!(b.multiply(&a).unwrap(), el(2, &[1, 1, 0]));
        assert_eq!(b.multiply(&GroupElement::identity(2)).unwrap(), b);
        assert!(a.multiply(&el(1, &[1])).is_err());
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(el(2, &[2, 4, 0]).inverse(), el(2, &[-2, -4, 8]));
        assert!(GroupElement::<BigInt>::identity(3).inverse().is_identity());
        assert_eq!(el(2, &[0, 0, 5]).inverse(), el(2, &[0, 0, -5]));
    }

    #[test]
    fn commutator_examples() {
        let g1 = GroupElement::<BigInt>::generator(2, 1);
        let g2 = GroupElement::<BigInt>::generator(2, 2);
        assert_eq!(g2.commutator(&g1).unwrap(), el(2, &[0, 0, 1]));
        let x = el(2, &[3, -1, 7]);
        assert!(x.commutator(&x).unwrap().is_identity());
        assert!(x.commutator(&el(2, &[0, 0, 9])).unwrap().is_identity());
    }

    #[test]
    fn dilation_examples() {
        let x = el(2, &[1, 1, 1]);
        assert_eq!(x.dilate(&BigInt::from(2)).unwrap(), el(2, &[2, 4, 8]));
        assert_eq!(x.dilate(&BigInt::one()).unwrap(), x);
        assert!(x.dilate(&BigInt::zero()).is_err());
        assert!(Dilation::new(q(-1, 2)).is_err());
    }

    #[test]
    fn norm_and_ball() {
        assert_eq!(el(2, &[1, -2, 3]).homogeneous_norm(), BigInt::from(6));
        let e = GroupElement::<BigInt>::identity(2).to_rational();
        assert!(e.in_ball(&q(1, 7)).unwrap());
        assert!(!el(1, &[3]).to_rational().in_ball(&q(2, 1)).unwrap());
        assert!(el(1, &[3]).to_rational().in_ball(&q(4, 1)).unwrap());
        assert!(e.in_ball(&q(0, 1)).is_err());
    }

    #[test]
    fn json_round_trip() {
        let x = el(2, &[1, -2, 3]);
        let s = x.to_json();
        assert_eq!(s, r#"{"d":2,"coords":["1","-2","3"]}"#);
        assert_eq!(GroupElement::<BigInt>::from_json(&s).unwrap(), x);
        assert!(GroupElement::<BigInt>::from_json(r#"{"d":2,"coords":["1"]}"#).is_err());
    }

    #[test]
    fn step2_examples() {
        let h = Step2Group::heisenberg();
        let a = Step2Element { x: vec![q(1, 1), q(0, 1)], y: vec![q(0, 1)] };
        let b = Step2Element { x: vec![q(0, 1), q(1, 1)], y: vec![q(0, 1)] };
        let ab = step2_multiply(&h, &a, &b).unwrap();
        assert_eq!(ab, Step2Element { x: vec![q(1, 1), q(1, 1)], y: vec![q(1, 1)] });

        let ab_group = Step2Group::abelian(2, 1);
        let s = ab_group.multiply(&a, &b).unwrap();
        assert_eq!(s, Step2Element { x: vec![q(1, 1), q(1, 1)], y: vec![q(0, 1)] });
    }

    #[test]
    fn step2_power_matches_repeated_product() {
        let h = Step2Group::heisenberg();
        let a = Step2Element { x: vec![q(2, 3), q(-1, 2)], y: vec![q(5, 7)] };
        let mut acc = h.identity::<BigRational>();
        for n in 0..6i64 {
            assert_eq!(h.power(&a, &BigInt::from(n)), acc);
            acc = h.multiply(&acc, &a).unwrap();
        }
        let inv = h.inverse(&a);
        assert_eq!(h.power(&a, &BigInt::from(-1)), inv);
        let mut acc = h.identity::<BigRational>();
        for n in 0..5i64 {
            assert_eq!(h.power(&a, &BigInt::from(-n)), acc);
            acc = h.multiply(&acc, &inv).unwrap();
        }
    }
}
