//! The multilinear maps D and D̃ and their group-product oracle.
//!
//! D(x, y) = ∏_j A₀(x_j)⁻¹A₀(y_j) and D̃(x, y) = ∏_j A₀(x_j)A₀(y_j)⁻¹,
//! with the product taken left to right over j = 1..r.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{index_len, position, GroupElement, Ring};

/// Which of the two composition maps to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    /// Kernel of H*H, phase D.
    D,
    /// Kernel of HH*, phase D̃.
    DTilde,
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::D => "D",
            Variant::DTilde => "Dtilde",
        }
    }

    pub fn from_name(s: &str) -> Result<Self> {
        match s {
            "D" | "d" => Ok(Variant::D),
            "Dtilde" | "dtilde" | "D~" => Ok(Variant::DTilde),
            other => Err(Error::Parse(format!("unknown variant {other:?} (expected D or Dtilde)"))),
        }
    }
}

/// `pows[k] = x^k` for k = 0..=n.
fn powers<T: Ring>(x: &T, n: usize) -> Vec<T> {
    let mut p = Vec::with_capacity(n + 1);
    p.push(T::one());
    for k in 1..=n {
        let v = p[k - 1].clone() * x.clone();
        p.push(v);
    }
    p
}

fn check_lengths<T>(x: &[T], y: &[T]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::Dimension { expected: x.len(), found: y.len() });
    }
    Ok(())
}

/// Closed form of D (or D̃) in coordinates indexed by Y_d.
pub fn d_map<T: Ring>(d: usize, x: &[T], y: &[T], variant: Variant) -> Result<GroupElement<T>> {
    check_lengths(x, y)?;
    let xp: Vec<Vec<T>> = x.iter().map(|v| powers(v, 2 * d)).collect();
    let yp: Vec<Vec<T>> = y.iter().map(|v| powers(v, 2 * d)).collect();
    let xs: Vec<&[T]> = xp.iter().map(|v| v.as_slice()).collect();
    let ys: Vec<&[T]> = yp.iter().map(|v| v.as_slice()).collect();
    GroupElement::new(d, d_from_powers(d, &xs, &ys, variant))
}

/// Closed form from precomputed power tables: `xp[j][k] = x_j^k` for k ≤ 2d.
pub fn d_from_powers<T: Ring>(d: usize, xp: &[&[T]], yp: &[&[T]], variant: Variant) -> Vec<T> {
    // First-layer increments per factor: y^l − x^l for D, x^l − y^l for D̃.
    let inc = |j: usize, l: usize| -> T {
        match variant {
            Variant::D => yp[j][l].clone() - xp[j][l].clone(),
            Variant::DTilde => xp[j][l].clone() - yp[j][l].clone(),
        }
    };
    let r = xp.len();
    let mut coords = vec![T::zero(); index_len(d)];
    for l1 in 1..=d {
        let mut s = T::zero();
        for j in 0..r {
            s = s + inc(j, l1);
        }
        coords[position(l1, 0)] = s;
        for l2 in 1..l1 {
            let mut s = T::zero();
            // Running first-layer sum of the factors before j2.
            let mut prefix = T::zero();
            for j2 in 0..r {
                s = s + prefix.clone() * inc(j2, l2);
                prefix = prefix + inc(j2, l1);
            }
            for j in 0..r {
                let diag = match variant {
                    Variant::D => xp[j][l1 + l2].clone() - xp[j][l1].clone() * yp[j][l2].clone(),
                    Variant::DTilde => yp[j][l1 + l2].clone() - xp[j][l1].clone() * yp[j][l2].clone(),
                };
                s = s + diag;
            }
            coords[position(l1, l2)] = s;
        }
    }
    coords
}

/// D via explicit group products of A₀ values.
pub fn d_map_oracle<T: Ring>(d: usize, x: &[T], y: &[T], variant: Variant) -> Result<GroupElement<T>> {
    check_lengths(x, y)?;
    let a0 = |t: &T| GroupElement::from_first_layer(powers(t, d)[1..].to_vec());
    let mut acc = GroupElement::identity(d);
    for (xj, yj) in x.iter().zip(y) {
        let (ax, ay) = (a0(xj), a0(yj));
        let factor = match variant {
            Variant::D => ax.inverse().multiply(&ay)?,
            Variant::DTilde => ax.multiply(&ay.inverse())?,
        };
        acc = acc.multiply(&factor)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example() {
        let v = d_map(2, &[2i64], &[3], Variant::D).unwrap();
        assert_eq!(v.coords(), &[1, 5, -4]);
        assert_eq!(d_map_oracle(2, &[2i64], &[3], Variant::D).unwrap(), v);
    }

    #[test]
    fn diagonal_is_identity() {
        for d in 1..=3 {
            for var in [Variant::D, Variant::DTilde] {
                let x = [3i64, -2, 5];
                assert!(d_map(d, &x, &x, var).unwrap().is_identity());
            }
        }
    }

    #[test]
    fn telescoping_pair() {
        let v = d_map(2, &[1i64, 0], &[0, 1], Variant::D).unwrap();
        assert!(v.is_identity());
    }

    #[test]
    fn closed_form_matches_products_small_grid() {
        let vals = [-2i64, 0, 1, 3];
        for d in 1..=3 {
            for &a in &vals {
                for &b in &vals {
                    for &c in &vals {
                        for &e in &vals {
                            for var in [Variant::D, Variant::DTilde] {
                                let x = [a, b];
                                let y = [c, e];
                                assert_eq!(d_map(d, &x, &y, var).unwrap(), d_map_oracle(d, &x, &y, var).unwrap());
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn length_mismatch_is_rejected() {
        assert!(d_map(2, &[1i64], &[1, 2], Variant::D).is_err());
    }
}
