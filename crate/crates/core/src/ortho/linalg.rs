//! Dense operator norms.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::substream;

/// Dense complex matrix.
pub type CMat = DMatrix<Complex64>;

/// Largest dimension handled by a full decomposition; above it the norm comes
/// from power iteration on M*M.
pub const DENSE_LIMIT: usize = 512;

/// True when every entry has zero imaginary part.
pub fn is_real(m: &CMat) -> bool {
    m.iter().all(|z| z.im == 0.0)
}

pub fn real_part(m: &CMat) -> DMatrix<f64> {
    m.map(|z| z.re)
}

pub fn from_real(m: &DMatrix<f64>) -> CMat {
    m.map(|x| Complex64::new(x, 0.0))
}

/// ‖M − M*‖_max.
pub fn hermitian_defect(m: &CMat) -> f64 {
    if m.nrows() != m.ncols() {
        return f64::INFINITY;
    }
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..=i {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Spectral norm ‖M‖₂ (largest singular value).
pub fn spectral_norm(m: &CMat) -> Result<f64> {
    check_finite(m)?;
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(0.0);
    }
    if m.nrows().max(m.ncols()) > DENSE_LIMIT {
        return power_norm(m);
    }
    if is_real(m) {
        Ok(real_spectral_norm(&real_part(m)))
    } else {
        Ok(max_of(m.clone().singular_values().iter().copied()))
    }
}

/// Spectral norm of a real matrix by full SVD.
pub fn real_spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    max_of(m.clone().singular_values().iter().copied())
}

/// Spectral norm of a Hermitian matrix as its largest |eigenvalue|.
pub fn hermitian_norm(m: &CMat) -> Result<f64> {
    check_finite(m)?;
    if m.nrows() == 0 {
        return Ok(0.0);
    }
    if m.nrows() > DENSE_LIMIT {
        return power_norm(m);
    }
    if is_real(m) {
        Ok(real_symmetric_norm(&real_part(m)))
    } else {
        Ok(max_of(m.clone().symmetric_eigenvalues().iter().map(|x| x.abs())))
    }
}

pub fn real_symmetric_norm(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    max_of(m.clone().symmetric_eigenvalues().iter().map(|x| x.abs()))
}

fn max_of(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, f64::max)
}

fn check_finite(m: &CMat) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::Numeric("matrix has non-finite entries".into()))
    }
}

/// Power iteration on M*M from a seeded random start.
fn power_norm(m: &CMat) -> Result<f64> {
    let mut rng = substream(0x5eed, "power-norm");
    let n = m.ncols();
    let mut x = nalgebra::DVector::from_fn(n, |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    let mut last = 0.0;
    let adj = m.adjoint();
    for _ in 0..10_000 {
        let nx = x.norm();
        if nx == 0.0 {
            return Ok(0.0);
        }
        x /= Complex64::new(nx, 0.0);
        let y = &adj * (m * &x);
        let est = y.norm().sqrt();
        if (est - last).abs() <= 1e-14 * est {
            return Ok(est);
        }
        last = est;
        x = y;
    }
    Err(Error::Numeric("power iteration did not converge".into()))
}

/// Seeded Haar-distributed orthogonal n×n matrix (QR of a Gaussian matrix).
pub fn random_orthogonal(n: usize, seed: u64, name: &str) -> DMatrix<f64> {
    let mut rng = substream(seed, name);
    let g = DMatrix::from_fn(n, n, |_, _| gaussian(&mut rng));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    // Fix column signs so the factorization is unique.
    let mut q = q;
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Standard normal draw by Box–Muller.
pub fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rank_one_norm_is_product_of_lengths() {
        let u = [1.0, 2.0, -2.0];
        let v = [3.0, 0.0, 4.0, 0.0];
        let m = CMat::from_fn(3, 4, |i, j| c(u[i] * v[j], 0.0));
        assert!((spectral_norm(&m).unwrap() - 15.0).abs() < 1e-12);
        let mi = CMat::from_fn(3, 4, |i, j| c(0.0, u[i] * v[j]));
        assert!((spectral_norm(&mi).unwrap() - 15.0).abs() < 1e-12);
    }

    #[test]
    fn hermitian_and_general_norms_agree() {
        let m = CMat::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(-3.0, 0.0)]);
        assert!(hermitian_defect(&m) == 0.0);
        let a = spectral_norm(&m).unwrap();
        let b = hermitian_norm(&m).unwrap();
        assert!((a - b).abs() < 1e-12);
        let exact = 0.5 + (6.25f64 + 1.0).sqrt();
        assert!((a - exact).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_matrices_have_unit_norm() {
        let q = random_orthogonal(16, 3, "t");
        let qtq = q.transpose() * &q;
        assert!((qtq - DMatrix::<f64>::identity(16, 16)).amax() < 1e-12);
        assert!((real_spectral_norm(&q) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn power_iteration_matches_svd() {
        let q = random_orthogonal(8, 5, "p");
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 1.0, 0.5, 0.2, 0.1, 0.0, 0.0, 0.0]));
        let m = from_real(&(&q * d * q.transpose()));
        assert!((power_norm(&m).unwrap() - 3.0).abs() < 1e-10);
    }

    #[test]
    fn non_finite_is_rejected() {
        let m = CMat::from_element(2, 2, c(f64::NAN, 0.0));
        assert!(spectral_norm(&m).is_err());
    }
}
