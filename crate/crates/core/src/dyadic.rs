//! Exact dyadic rationals m·2^e and the coefficient abstraction used by the
//! sparse operators.
//!
//! Every finite f64 is a dyadic rational, so products and sums of kernel
//! weights can be carried out without rounding. That makes two different
//! summation orders produce bit-identical results.

use std::cmp::Ordering;
use std::fmt::{self, Debug};
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Odd mantissa, kept in an i128 whenever it fits so the common case never allocates.
#[derive(Clone, PartialEq, Eq, Hash)]
enum Mant {
    Small(i128),
    Big(BigInt),
}

impl Mant {
    fn to_big(&self) -> BigInt {
        match self {
            Mant::Small(m) => BigInt::from(*m),
            Mant::Big(m) => m.clone(),
        }
    }
}

/// m·2^e with m odd, or zero (stored as m = 0, e = 0).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mant: Mant,
    exp: i64,
}

impl Dyadic {
    pub fn new(mant: BigInt, exp: i64) -> Self {
        if mant.is_zero() {
            return Self::zero();
        }
        let tz = mant.trailing_zeros().unwrap_or(0);
        let m = mant >> tz;
        let exp = exp + tz as i64;
        match m.to_i128() {
            Some(v) => Dyadic { mant: Mant::Small(v), exp },
            None => Dyadic { mant: Mant::Big(m), exp },
        }
    }

    fn small(m: i128, exp: i64) -> Self {
        if m == 0 {
            return Self::zero();
        }
        let tz = m.trailing_zeros();
        Dyadic { mant: Mant::Small(m >> tz), exp: exp + i64::from(tz) }
    }

    pub fn from_int(n: i64) -> Self {
        Self::small(i128::from(n), 0)
    }

    /// Exact conversion; `None` for NaN or infinities.
    pub fn from_f64(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        if x == 0.0 {
            return Some(Self::zero());
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1i128 } else { 1 };
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if raw_exp == 0 { (frac, -1074) } else { (frac | (1u64 << 52), raw_exp - 1075) };
        Some(Self::small(i128::from(m) * sign, e))
    }

    pub fn mantissa(&self) -> BigInt {
        self.mant.to_big()
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    /// Nearest f64 (correct to within one ulp).
    pub fn to_f64(&self) -> f64 {
        let (top, shift) = match &self.mant {
            Mant::Small(0) => return 0.0,
            Mant::Small(m) => {
                let bits = 128 - m.unsigned_abs().leading_zeros() as i64;
                let shift = (bits - 60).max(0);
                ((m >> shift) as f64, shift)
            }
            Mant::Big(m) => {
                let bits = m.bits() as i64;
                let shift = (bits - 60).max(0);
                ((m >> shift).to_f64().unwrap_or(f64::NAN), shift)
            }
        };
        let e = self.exp + shift;
        // Split the scaling so very small or large exponents do not overflow powi.
        let half = (e / 2) as i32;
        top * 2f64.powi(half) * 2f64.powi(e as i32 - half)
    }

    pub fn abs(&self) -> Self {
        match &self.mant {
            Mant::Small(m) => match m.checked_abs() {
                Some(a) => Dyadic { mant: Mant::Small(a), exp: self.exp },
                None => Dyadic::new(BigInt::from(*m).abs(), self.exp),
            },
            Mant::Big(m) => Dyadic { mant: Mant::Big(m.abs()), exp: self.exp },
        }
    }

    pub fn is_negative(&self) -> bool {
        match &self.mant {
            Mant::Small(m) => *m < 0,
            Mant::Big(m) => m.sign() == Sign::Minus,
        }
    }

    /// Multiplies by 2^k exactly.
    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Dyadic { mant: self.mant.clone(), exp: self.exp + k }
    }

    fn aligned_big(a: &Self, b: &Self) -> (BigInt, BigInt, i64) {
        let e = a.exp.min(b.exp);
        let am = a.mant.to_big() << (a.exp - e) as usize;
        let bm = b.mant.to_big() << (b.exp - e) as usize;
        (am, bm, e)
    }

    /// m·2^k in i128 if it fits.
    fn shifted(m: i128, k: i64) -> Option<i128> {
        if k == 0 {
            return Some(m);
        }
        if k >= 127 {
            return None;
        }
        m.checked_mul(1i128 << k)
    }
}

impl Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}·2^{}", self.mant.to_big(), self.exp)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64())
    }
}

impl Zero for Dyadic {
    fn zero() -> Self {
        Dyadic { mant: Mant::Small(0), exp: 0 }
    }

    fn is_zero(&self) -> bool {
        matches!(self.mant, Mant::Small(0))
    }
}

impl One for Dyadic {
    fn one() -> Self {
        Dyadic { mant: Mant::Small(1), exp: 0 }
    }
}

impl Add for Dyadic {
    type Output = Dyadic;

    fn add(self, rhs: Dyadic) -> Dyadic {
        &self + &rhs
    }
}

impl<'a> Add<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;

    fn add(self, rhs: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if let (Mant::Small(a), Mant::Small(b)) = (&self.mant, &rhs.mant) {
            let e = self.exp.min(rhs.exp);
            if let (Some(a), Some(b)) = (Dyadic::shifted(*a, self.exp - e), Dyadic::shifted(*b, rhs.exp - e)) {
                if let Some(s) = a.checked_add(b) {
                    return Dyadic::small(s, e);
                }
            }
        }
        let (a, b, e) = Dyadic::aligned_big(self, rhs);
        Dyadic::new(a + b, e)
    }
}

impl AddAssign<&Dyadic> for Dyadic {
    fn add_assign(&mut self, rhs: &Dyadic) {
        *self = &*self + rhs;
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;

    fn sub(self, rhs: Dyadic) -> Dyadic {
        &self + &(-rhs)
    }
}

impl<'a> Sub<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;

    fn sub(self, rhs: &Dyadic) -> Dyadic {
        self + &(-rhs.clone())
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;

    fn neg(self) -> Dyadic {
        match self.mant {
            Mant::Small(m) => match m.checked_neg() {
                Some(n) => Dyadic { mant: Mant::Small(n), exp: self.exp },
                None => Dyadic::new(-BigInt::from(m), self.exp),
            },
            Mant::Big(m) => Dyadic::new(-m, self.exp),
        }
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;

    fn mul(self, rhs: Dyadic) -> Dyadic {
        &self * &rhs
    }
}

impl<'a> Mul<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;

    fn mul(self, rhs: &Dyadic) -> Dyadic {
        if self.is_zero() || rhs.is_zero() {
            return Dyadic::zero();
        }
        // Product of odd mantissas is odd: already normalized.
        if let (Mant::Small(a), Mant::Small(b)) = (&self.mant, &rhs.mant) {
            if let Some(p) = a.checked_mul(*b) {
                return Dyadic { mant: Mant::Small(p), exp: self.exp + rhs.exp };
            }
        }
        Dyadic::new(self.mant.to_big() * rhs.mant.to_big(), self.exp + rhs.exp)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        if let (Mant::Small(a), Mant::Small(b)) = (&self.mant, &other.mant) {
            let e = self.exp.min(other.exp);
            if let (Some(a), Some(b)) = (Dyadic::shifted(*a, self.exp - e), Dyadic::shifted(*b, other.exp - e)) {
                return a.cmp(&b);
            }
        }
        let (a, b, _) = Dyadic::aligned_big(self, other);
        a.cmp(&b)
    }
}

/// Scalar type stored in sparse functions and used as operator weights.
pub trait Coefficient: Clone + PartialEq + Debug + Zero + Add<Output = Self> + Mul<Output = Self> + Neg<Output = Self> {
    fn conj(&self) -> Self;
    /// Exact embedding of a real weight.
    fn from_f64(x: f64) -> Self;
    fn to_complex(&self) -> Complex64;
    /// In-place accumulation; exact types override to avoid clones.
    fn accumulate(&mut self, rhs: &Self) {
        *self = self.clone() + rhs.clone();
    }
    fn times(&self, rhs: &Self) -> Self {
        self.clone() * rhs.clone()
    }
}

impl Coefficient for Complex64 {
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }

    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }

    fn to_complex(&self) -> Complex64 {
        *self
    }

    fn accumulate(&mut self, rhs: &Self) {
        *self += rhs;
    }

    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
}

impl Coefficient for Dyadic {
    fn conj(&self) -> Self {
        self.clone()
    }

    fn from_f64(x: f64) -> Self {
        Dyadic::from_f64(x).expect("finite weight")
    }

    fn to_complex(&self) -> Complex64 {
        Complex64::new(self.to_f64(), 0.0)
    }

    fn accumulate(&mut self, rhs: &Self) {
        *self += rhs;
    }

    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f64_round_trip() {
        for &x in &[0.0, 1.0, -1.5, 0.1, 1e-300, 5e-324, 1.7976931348623157e308, -3.25e-7] {
            let d = Dyadic::from_f64(x).unwrap();
            assert_eq!(d.to_f64(), x, "{x}");
        }
        assert!(Dyadic::from_f64(f64::NAN).is_none());
    }

    #[test]
    fn normalization_makes_equality_structural() {
        assert_eq!(Dyadic::new(BigInt::from(8), -3), Dyadic::one());
        assert_eq!(Dyadic::from_f64(0.5).unwrap() + Dyadic::from_f64(0.5).unwrap(), Dyadic::one());
        assert_eq!(Dyadic::from_int(3) - Dyadic::from_int(3), Dyadic::zero());
    }

    #[test]
    fn exact_where_floats_round() {
        let a = Dyadic::from_f64(0.1).unwrap();
        let b = Dyadic::from_f64(0.2).unwrap();
        let c = Dyadic::from_f64(0.3).unwrap();
        assert_ne!(a.clone() + b.clone(), c);
        assert_eq!((a.clone() + b.clone()) + c.clone(), a + (b + c));
    }

    #[test]
    fn large_mantissas_fall_back_to_bigint() {
        let a = Dyadic::from_f64(1.0 + f64::EPSILON).unwrap();
        let mut p = Dyadic::one();
        for _ in 0..6 {
            p = &p * &a;
        }
        // (1 + 2^-52)^6 needs a 313-bit mantissa.
        assert_eq!(p.mantissa().bits(), 313);
        assert_eq!(&(&p - &p.clone()) + &Dyadic::one(), Dyadic::one());
        let tiny = Dyadic::from_f64(5e-324).unwrap();
        let sum = &Dyadic::one() + &tiny;
        assert_eq!(&sum - &tiny, Dyadic::one());
        assert!(sum > Dyadic::one());
        assert_eq!(Dyadic::new(BigInt::from(6), 0), Dyadic::from_int(6));
    }

    #[test]
    fn ordering() {
        let a = Dyadic::from_f64(-0.75).unwrap();
        let b = Dyadic::from_f64(0.25).unwrap();
        assert!(a < b);
        assert!(b.mul_pow2(2) == Dyadic::one());
    }
}
