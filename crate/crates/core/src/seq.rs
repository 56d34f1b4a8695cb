//! Polynomial sequences n ↦ A(n) in step-2 groups, symbolic differencing,
//! the universal sequence A₀, and the morphism G₀(d) → G that carries A₀ onto
//! a prescribed polynomial sequence of a general step-2 group.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{index_len, position, GroupElement, Step2Element, Step2Group};
use crate::poly::{IntPolynomial, Polynomial, RatPolynomial};

/// n ↦ A(n) in G₀(d) with exact integer polynomial coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupPolySequence {
    polys: GroupElement<IntPolynomial>,
}

impl GroupPolySequence {
    /// Coordinates in canonical Y_d order. A(0) = 1 is not enforced here since
    /// differenced sequences need not satisfy it; see [`Self::is_normalized`].
    pub fn new(d: usize, coord_polys: Vec<IntPolynomial>) -> Result<Self> {
        Ok(GroupPolySequence { polys: GroupElement::new(d, coord_polys)? })
    }

    /// A₀(n) = (n^{l1} at (l1,0), zero elsewhere).
    pub fn a0(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Domain("d must be positive".into()));
        }
        let first = (1..=d).map(|l| IntPolynomial::monomial(BigInt::one(), l)).collect();
        Ok(GroupPolySequence { polys: GroupElement::from_first_layer(first) })
    }

    pub fn identity(d: usize) -> Self {
        GroupPolySequence { polys: GroupElement::identity(d) }
    }

    pub fn d(&self) -> usize {
        self.polys.d()
    }

    pub fn coord_polys(&self) -> &[IntPolynomial] {
        self.polys.coords()
    }

    /// A(0) = identity.
    pub fn is_normalized(&self) -> bool {
        self.polys.coords().iter().all(|p| p.coeff(0).is_zero())
    }

    /// Every coordinate polynomial is zero.
    pub fn is_identity(&self) -> bool {
        self.polys.is_identity()
    }

    pub fn eval(&self, n: &BigInt) -> GroupElement<BigInt> {
        self.polys.map(|p| p.eval(n))
    }

    pub fn eval_i64(&self, n: i64) -> GroupElement<BigInt> {
        self.eval(&BigInt::from(n))
    }

    /// n ↦ A(n)⁻¹·A(n+1), computed symbolically.
    pub fn difference(&self) -> Self {
        let shifted = self.polys.map(|p| p.shift());
        let polys = self.polys.inverse().multiply(&shifted).expect("same dimension");
        GroupPolySequence { polys }
    }

    /// Smallest k ≤ kmax with D^k A ≡ 1 as a polynomial identity (D⁰A = A).
    pub fn nilpotency_degree(&self, kmax: usize) -> Option<usize> {
        let mut cur = self.clone();
        for k in 0..=kmax {
            if cur.is_identity() {
                return Some(k);
            }
            if k < kmax {
                cur = cur.difference();
            }
        }
        None
    }

    /// `{"d":2,"coords":[["0","1"],["0","0","1"],[]]}`.
    pub fn to_json(&self) -> String {
        let j = SequenceJson {
            d: self.d(),
            coords: self
                .coord_polys()
                .iter()
                .map(|p| p.coeffs().iter().map(|c| c.to_string()).collect())
                .collect(),
        };
        serde_json::to_string(&j).expect("plain struct serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: SequenceJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let polys = j
            .coords
            .iter()
            .map(|cs| {
                cs.iter()
                    .map(|c| c.parse::<BigInt>().map_err(|_| Error::Parse(format!("bad coefficient {c:?}"))))
                    .collect::<Result<Vec<_>>>()
                    .map(Polynomial::new)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(j.d, polys)
    }
}

#[derive(Serialize, Deserialize)]
struct SequenceJson {
    d: usize,
    coords: Vec<Vec<String>>,
}

pub fn a0_sequence(d: usize) -> Result<GroupPolySequence> {
    GroupPolySequence::a0(d)
}

pub fn difference(a: &GroupPolySequence) -> GroupPolySequence {
    a.difference()
}

pub fn nilpotency_degree(a: &GroupPolySequence, kmax: usize) -> Option<usize> {
    a.nilpotency_degree(kmax)
}

/// n ↦ (x(n), y(n)) in a [`Step2Group`] with rational polynomial coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Step2PolySequence {
    pub x: Vec<RatPolynomial>,
    pub y: Vec<RatPolynomial>,
}

impl Step2PolySequence {
    pub fn eval(&self, n: &BigInt) -> Step2Element<BigRational> {
        let nq = BigRational::from_integer(n.clone());
        Step2Element {
            x: self.x.iter().map(|p| p.eval(&nq)).collect(),
            y: self.y.iter().map(|p| p.eval(&nq)).collect(),
        }
    }

    pub fn max_degree(&self) -> usize {
        self.x.iter().chain(&self.y).filter_map(|p| p.degree()).max().unwrap_or(0)
    }

    pub fn is_normalized(&self) -> bool {
        self.x.iter().chain(&self.y).all(|p| p.coeff(0).is_zero())
    }
}

/// The morphism T: G₀(d) → G fixed by generator images h_l = T(g_l), d = 2·d3.
#[derive(Debug, Clone, PartialEq)]
pub struct MorphismSpec {
    pub target: Step2Group,
    pub d3: usize,
    pub d: usize,
    /// h_1, ..., h_d.
    pub generator_images: Vec<Step2Element<BigRational>>,
    /// Image of the unit vector at each Y_d position; only l2 ≥ 1 positions are used.
    pub commutator_images: Vec<Step2Element<BigRational>>,
    /// Coefficient vectors indexed by degree l = 1..d (entry l-1).
    pub alpha: Vec<Vec<BigRational>>,
    pub beta: Vec<Vec<BigRational>>,
    pub gamma: Vec<Vec<BigRational>>,
    pub rho: Vec<Vec<BigRational>>,
}

impl MorphismSpec {
    /// T(x) = h_1^{x_{10}}···h_d^{x_{d0}} · ∏ [h_{l1}, h_{l2}]^{x_{l1l2}}.
    pub fn apply(&self, x: &GroupElement<BigInt>) -> Result<Step2Element<BigRational>> {
        if x.d() != self.d {
            return Err(Error::Dimension { expected: self.d, found: x.d() });
        }
        let g = &self.target;
        let mut acc = g.identity::<BigRational>();
        for l in 1..=self.d {
            let e = x.coord(l, 0);
            if !e.is_zero() {
                acc = g.multiply(&acc, &g.power(&self.generator_images[l - 1], e))?;
            }
        }
        for l1 in 2..=self.d {
            for l2 in 1..l1 {
                let e = x.coord(l1, l2);
                if !e.is_zero() {
                    acc = g.multiply(&acc, &g.power(&self.commutator_images[position(l1, l2)], e))?;
                }
            }
        }
        Ok(acc)
    }

    /// Replaces h_l while keeping the stored commutator images; used as a negative control.
    pub fn with_generator_image(&self, l: usize, h: Step2Element<BigRational>) -> Self {
        let mut m = self.clone();
        m.generator_images[l - 1] = h;
        m
    }

    /// T(A₀(n)) as a symbolic polynomial sequence.
    pub fn image_of_a0(&self) -> Step2PolySequence {
        let images: Vec<Step2Element<RatPolynomial>> =
            self.generator_images.iter().map(lift_constant).collect();
        let e = product_of_powers(&self.target, &images);
        Step2PolySequence { x: e.x, y: e.y }
    }
}

fn lift_constant(e: &Step2Element<BigRational>) -> Step2Element<RatPolynomial> {
    Step2Element {
        x: e.x.iter().cloned().map(RatPolynomial::constant).collect(),
        y: e.y.iter().cloned().map(RatPolynomial::constant).collect(),
    }
}

/// ∏_l h_l^{n^l} with symbolic exponent n^l.
fn product_of_powers(g: &Step2Group, images: &[Step2Element<RatPolynomial>]) -> Step2Element<RatPolynomial> {
    let half = RatPolynomial::constant(BigRational::new(1.into(), 2.into()));
    let mut acc = g.identity::<RatPolynomial>();
    for (i, h) in images.iter().enumerate() {
        let n = RatPolynomial::monomial(BigRational::one(), i + 1);
        let tri = n.clone() * (n.clone() - RatPolynomial::one()) * half.clone();
        let r = g.form(&h.x, &h.x);
        let p = Step2Element {
            x: h.x.iter().map(|c| n.clone() * c.clone()).collect(),
            y: h.y.iter().zip(r).map(|(c, w)| n.clone() * c.clone() + tri.clone() * w).collect(),
        };
        acc = g.multiply(&acc, &p).expect("dimensions fixed by the group");
    }
    acc
}

/// Builds T with T(A₀(n)) = A_target(n) as a polynomial identity.
pub fn build_morphism(target: &Step2Group, a_target: &Step2PolySequence) -> Result<MorphismSpec> {
    if a_target.x.len() != target.dim1() {
        return Err(Error::Dimension { expected: target.dim1(), found: a_target.x.len() });
    }
    if a_target.y.len() != target.dim2() {
        return Err(Error::Dimension { expected: target.dim2(), found: a_target.y.len() });
    }
    if !a_target.is_normalized() {
        return Err(Error::Construction("target sequence must satisfy A(0) = 1".into()));
    }
    let xdeg = a_target.x.iter().filter_map(|p| p.degree()).max().unwrap_or(0);
    let ydeg = a_target.y.iter().filter_map(|p| p.degree()).max().unwrap_or(0);
    let d3 = xdeg.max(ydeg.div_ceil(2)).max(1);
    let d = 2 * d3;
    let (d1, d2) = (target.dim1(), target.dim2());

    let alpha: Vec<Vec<BigRational>> = (1..=d)
        .map(|l| (0..d1).map(|a| if l <= d3 { a_target.x[a].coeff(l) } else { BigRational::zero() }).collect())
        .collect();
    let beta: Vec<Vec<BigRational>> =
        (1..=d).map(|l| (0..d2).map(|b| a_target.y[b].coeff(l)).collect()).collect();

    // ρ(n) is the second-layer part of ∏ (α_l, 0)^{n^l}.
    let bare: Vec<Step2Element<RatPolynomial>> = alpha
        .iter()
        .map(|a| Step2Element {
            x: a.iter().cloned().map(RatPolynomial::constant).collect(),
            y: vec![RatPolynomial::zero(); d2],
        })
        .collect();
    let rho_poly = product_of_powers(target, &bare).y;
    for p in &rho_poly {
        if !p.coeff(0).is_zero() || p.degree().is_some_and(|k| k > d) {
            return Err(Error::Construction(format!("unexpected correction polynomial {p}")));
        }
    }
    let rho: Vec<Vec<BigRational>> = (1..=d).map(|l| rho_poly.iter().map(|p| p.coeff(l)).collect()).collect();
    // Central parts enter linearly: Σ γ_l n^l + ρ(n) = β(n), one equation per degree.
    let gamma: Vec<Vec<BigRational>> = beta
        .iter()
        .zip(&rho)
        .map(|(b, r)| b.iter().zip(r).map(|(u, v)| u - v).collect())
        .collect();

    let generator_images: Vec<Step2Element<BigRational>> = alpha
        .iter()
        .zip(&gamma)
        .map(|(a, c)| Step2Element { x: a.clone(), y: c.clone() })
        .collect();
    let mut commutator_images = vec![target.identity::<BigRational>(); index_len(d)];
    for l1 in 2..=d {
        for l2 in 1..l1 {
            commutator_images[position(l1, l2)] =
                target.commutator(&generator_images[l1 - 1], &generator_images[l2 - 1])?;
        }
    }
    let spec = MorphismSpec {
        target: target.clone(),
        d3,
        d,
        generator_images,
        commutator_images,
        alpha,
        beta,
        gamma,
        rho,
    };
    let image = spec.image_of_a0();
    let want_x: Vec<RatPolynomial> = a_target.x.clone();
    if image.x != want_x || image.y != a_target.y {
        return Err(Error::Construction("T(A0(n)) differs from the target sequence".into()));
    }
    Ok(spec)
}

/// Outcome of a sampled homomorphism check.
#[derive(Debug, Clone, PartialEq)]
pub struct HomomorphismReport {
    pub checked: usize,
    pub passed: bool,
    pub counterexample: Option<(GroupElement<BigInt>, GroupElement<BigInt>)>,
}

/// Checks T(x·y) = T(x)·T(y) on each pair; stops at the first failure.
pub fn verify_homomorphism(
    t: &MorphismSpec,
    samples: &[(GroupElement<BigInt>, GroupElement<BigInt>)],
) -> Result<HomomorphismReport> {
    for (i, (x, y)) in samples.iter().enumerate() {
        let lhs = t.apply(&x.multiply(y)?)?;
        let rhs = t.target.multiply(&t.apply(x)?, &t.apply(y)?)?;
        if lhs != rhs {
            return Ok(HomomorphismReport {
                checked: i + 1,
                passed: false,
                counterexample: Some((x.clone(), y.clone())),
            });
        }
    }
    Ok(HomomorphismReport { checked: samples.len(), passed: true, counterexample: None })
}

/// T(A₀(n)) = A_target(n) for every n in `range`, evaluated numerically.
pub fn verify_intertwining(
    t: &MorphismSpec,
    a_target: &Step2PolySequence,
    range: std::ops::RangeInclusive<i64>,
) -> Result<bool> {
    let a0 = GroupPolySequence::a0(t.d)?;
    for n in range {
        let n = BigInt::from(n);
        if t.apply(&a0.eval(&n))? != a_target.eval(&n) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Compares Σ_n K(n) f(A(n)⁻¹γ) with the same sum taken along T(A₀(n)), at each point γ.
pub fn verify_transference(
    t: &MorphismSpec,
    a_target: &Step2PolySequence,
    weights: &[(i64, BigRational)],
    f: &HashMap<Step2Element<BigRational>, BigRational>,
    points: &[Step2Element<BigRational>],
) -> Result<bool> {
    let g = &t.target;
    let a0 = GroupPolySequence::a0(t.d)?;
    let lookup = |e: &Step2Element<BigRational>| f.get(e).cloned().unwrap_or_else(BigRational::zero);
    for p in points {
        let mut direct = BigRational::zero();
        let mut through = BigRational::zero();
        for (n, w) in weights {
            let n = BigInt::from(*n);
            let a = a_target.eval(&n);
            let ta = t.apply(&a0.eval(&n))?;
            direct += w * lookup(&g.multiply(&g.inverse(&a), p)?);
            through += w * lookup(&g.multiply(&g.inverse(&ta), p)?);
        }
        if direct != through {
            return Ok(false);
        }
    }
    Ok(true)
}

fn random_rational<R: Rng>(rng: &mut R, num: i64, den: i64) -> BigRational {
    let n = rng.random_range(-num..=num);
    let m = rng.random_range(1..=den);
    BigRational::new(n.into(), m.into())
}

/// A random rational step-2 group (d1 ≤ 3, d2 ≤ 2) with a random normalized
/// polynomial sequence of degree d3 ≤ 3.
pub fn random_step2_target<R: Rng>(rng: &mut R) -> (Step2Group, Step2PolySequence) {
    let d1 = rng.random_range(1..=3usize);
    let d2 = rng.random_range(1..=2usize);
    let bilinear = (0..d2)
        .map(|_| {
            (0..d1)
                .map(|_| {
                    (0..d1)
                        .map(|_| if rng.random_bool(0.3) { BigRational::zero() } else { random_rational(rng, 3, 3) })
                        .collect()
                })
                .collect()
        })
        .collect();
    let group = Step2Group::new(d1, d2, bilinear).expect("shapes built to match");
    let d3 = rng.random_range(1..=3usize);
    let poly = |rng: &mut R, force_top: bool| {
        let mut c: Vec<BigRational> = vec![BigRational::zero()];
        for k in 1..=d3 {
            let mut v = random_rational(rng, 4, 3);
            if force_top && k == d3 && v.is_zero() {
                v = BigRational::one();
            }
            c.push(v);
        }
        Polynomial::new(c)
    };
    let x = (0..d1).map(|a| poly(rng, a == 0)).collect();
    let y = (0..d2).map(|_| poly(rng, false)).collect();
    (group, Step2PolySequence { x, y })
}

/// A random element of G₀(d) with integer coordinates in [-bound, bound].
pub fn random_element<R: Rng>(rng: &mut R, d: usize, bound: i64) -> GroupElement<BigInt> {
    let coords = (0..index_len(d)).map(|_| BigInt::from(rng.random_range(-bound..=bound))).collect();
    GroupElement::new(d, coords).expect("length matches")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    fn ip(v: &[i64]) -> IntPolynomial {
        Polynomial::new(v.iter().map(|&c| BigInt::from(c)).collect())
    }

    fn rp(v: &[(i64, i64)]) -> RatPolynomial {
        Polynomial::new(v.iter().map(|&(n, m)| BigRational::new(n.into(), m.into())).collect())
    }

    #[test]
    fn a0_values() {
        let a = GroupPolySequence::a0(2).unwrap();
        let v = a.eval_i64(3);
        assert_eq!(v.coords(), &[BigInt::from(3), BigInt::from(9), BigInt::zero()]);
        assert!(a.eval_i64(0).is_identity());
        assert!(a.is_normalized());
    }

    #[test]
    fn difference_of_a0_d2() {
        let da = GroupPolySequence::a0(2).unwrap().difference();
        assert_eq!(da.coord_polys(), &[ip(&[1]), ip(&[1, 2]), ip(&[0, 0, -1])]);
        assert!(!da.is_normalized());
    }

    #[test]
    fn difference_of_a0_d1() {
        let a = GroupPolySequence::a0(1).unwrap();
        assert_eq!(a.difference().coord_polys(), &[ip(&[1])]);
        assert!(a.difference().difference().is_identity());
        assert!(GroupPolySequence::identity(3).difference().is_identity());
    }

    #[test]
    fn nilpotency_small_cases() {
        assert_eq!(GroupPolySequence::a0(1).unwrap().nilpotency_degree(4), Some(2));
        assert_eq!(GroupPolySequence::identity(2).nilpotency_degree(1), Some(0));
        assert_eq!(GroupPolySequence::a0(2).unwrap().nilpotency_degree(2), None);
    }

    #[test]
    fn json_round_trip() {
        let a = GroupPolySequence::a0(2).unwrap();
        let s = a.to_json();
        assert_eq!(s, r#"{"d":2,"coords":[["0","1"],["0","0","1"],[]]}"#);
        assert_eq!(GroupPolySequence::from_json(&s).unwrap(), a);
    }

    #[test]
    fn abelian_target_square() {
        let g = Step2Group::abelian(1, 1);
        let a = Step2PolySequence { x: vec![rp(&[(0, 1), (0, 1), (1, 1)])], y: vec![rp(&[])] };
        let t = build_morphism(&g, &a).unwrap();
        assert_eq!(t.d3, 2);
        // g₂ ↦ ((1), 0): the n² coefficient sits on the second generator.
        assert_eq!(t.generator_images[1].x, vec![BigRational::one()]);
        assert!(t.generator_images[0].is_identity());
        assert!(verify_intertwining(&t, &a, -20..=20).unwrap());
    }

    #[test]
    fn trivial_target_gives_trivial_images() {
        let g = Step2Group::heisenberg();
        let a = Step2PolySequence { x: vec![rp(&[]), rp(&[])], y: vec![rp(&[])] };
        let t = build_morphism(&g, &a).unwrap();
        assert!(t.generator_images.iter().all(|h| h.is_identity()));
        let mut rng = substream(1, "seq-test");
        let pairs: Vec<_> = (0..50).map(|_| (random_element(&mut rng, t.d, 9), random_element(&mut rng, t.d, 9))).collect();
        assert!(verify_homomorphism(&t, &pairs).unwrap().passed);
    }

    #[test]
    fn heisenberg_target() {
        let g = Step2Group::heisenberg();
        let a = Step2PolySequence {
            x: vec![rp(&[(0, 1), (1, 1)]), rp(&[(0, 1), (0, 1), (1, 1)])],
            y: vec![rp(&[(0, 1), (0, 1), (0, 1), (1, 1)])],
        };
        let t = build_morphism(&g, &a).unwrap();
        assert_eq!(t.d, 4);
        assert!(verify_intertwining(&t, &a, -20..=20).unwrap());
        assert_eq!(t.image_of_a0(), a);

        let mut rng = substream(2, "seq-test");
        let pairs: Vec<_> = (0..200).map(|_| (random_element(&mut rng, 4, 20), random_element(&mut rng, 4, 20))).collect();
        assert!(verify_homomorphism(&t, &pairs).unwrap().passed);

        let mut h1 = t.generator_images[0].clone();
        h1.x[0] += BigRational::one();
        let bad = t.with_generator_image(1, h1);
        let rep = verify_homomorphism(&bad, &pairs).unwrap();
        assert!(!rep.passed);
        assert!(rep.counterexample.is_some());
    }

    #[test]
    fn transference_on_heisenberg() {
        let g = Step2Group::heisenberg();
        let a = Step2PolySequence {
            x: vec![rp(&[(0, 1), (1, 1)]), rp(&[(0, 1), (1, 2), (1, 1)])],
            y: vec![rp(&[(0, 1), (2, 3)])],
        };
        let t = build_morphism(&g, &a).unwrap();
        let weights: Vec<(i64, BigRational)> = (-4..=4).filter(|&n| n != 0).map(|n| (n, BigRational::new(1.into(), n.into()))).collect();
        let mut f = HashMap::new();
        let mut pts = Vec::new();
        for n in -4..=4 {
            let e = a.eval(&BigInt::from(n));
            f.insert(e.clone(), BigRational::from_integer((n * n + 1).into()));
            pts.push(e);
        }
        pts.push(g.identity());
        assert!(verify_transference(&t, &a, &weights, &f, &pts).unwrap());
    }
}
