//! Nested operator families for the experiments.
//!
//! Every generator is nested: the family of size K is the prefix of the
//! family of any larger size with the same configuration.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::linalg::{gaussian, random_orthogonal, real_spectral_norm};
use super::OperatorFamily;
use crate::error::{Error, Result};
use crate::kernels::{CzKernel, DyadicKernel};
use crate::rng::substream;

/// The shipped family generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Generator {
    /// S_m = orthogonal projection onto coordinate block m.
    Projections,
    /// S_m = 2^{−m} U for one fixed orthogonal U.
    DecayingUnitary,
    /// S_m = the dyadic Hilbert piece H_m on Z/nZ, scaled to norm ≤ 1.
    Radon,
    /// S_m = (1 − τ_m) B_m + τ_m E_m with τ_m = 2^{−m}/4, B_m an orthogonal
    /// block on coordinate block m and E_m a dense contraction.
    NearOrthogonal,
}

impl Generator {
    pub const ALL: [Generator; 4] = [Generator::Projections, Generator::DecayingUnitary, Generator::Radon, Generator::NearOrthogonal];

    pub fn name(&self) -> &'static str {
        match self {
            Generator::Projections => "projections",
            Generator::DecayingUnitary => "decaying-unitary",
            Generator::Radon => "radon",
            Generator::NearOrthogonal => "near-orthogonal",
        }
    }

    pub fn from_name(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown generator '{s}' (expected projections, decaying-unitary, radon, near-orthogonal)")))
    }
}

/// Size, block width and seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub n: usize,
    pub block: usize,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig { n: 64, block: 4, seed: 0 }
    }
}

/// The first `k` operators of `gen`.
pub fn generate(gen: Generator, k: usize, cfg: &GeneratorConfig) -> Result<OperatorFamily> {
    if cfg.n == 0 {
        return Err(Error::Domain("matrix size must be positive".into()));
    }
    let needs_blocks = matches!(gen, Generator::Projections | Generator::NearOrthogonal);
    if needs_blocks && (cfg.block == 0 || k * cfg.block > cfg.n) {
        return Err(Error::Domain(format!("{k} blocks of width {} do not fit in n = {}", cfg.block, cfg.n)));
    }
    let ops = match gen {
        Generator::Projections => (1..=k).map(|m| block_embed(cfg, m, &DMatrix::identity(cfg.block, cfg.block))).collect(),
        Generator::DecayingUnitary => {
            let u = random_orthogonal(cfg.n, cfg.seed, "decaying-unitary");
            (1..=k).map(|m| &u * (-(m as f64)).exp2()).collect()
        }
        Generator::Radon => radon_pieces(k, cfg.n)?,
        Generator::NearOrthogonal => (1..=k).map(|m| near_orthogonal(cfg, m)).collect(),
    };
    OperatorFamily::from_real(&ops)
}

/// `b` placed on coordinate block m (1-based), zero elsewhere.
fn block_embed(cfg: &GeneratorConfig, m: usize, b: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(cfg.n, cfg.n);
    let lo = (m - 1) * cfg.block;
    out.view_mut((lo, lo), (cfg.block, cfg.block)).copy_from(b);
    out
}

fn near_orthogonal(cfg: &GeneratorConfig, m: usize) -> DMatrix<f64> {
    let tau = (-(m as f64)).exp2() / 4.0;
    let b = block_embed(cfg, m, &random_orthogonal(cfg.block, cfg.seed, &format!("near-orthogonal-block-{m}")));
    let mut rng = substream(cfg.seed, &format!("near-orthogonal-noise-{m}"));
    let e = DMatrix::from_fn(cfg.n, cfg.n, |_, _| gaussian(&mut rng));
    let e = &e / real_spectral_norm(&e);
    let s = b * (1.0 - tau) + e * tau;
    // Triangle inequality gives ‖S_m‖ ≤ 1 up to rounding; clip that rounding.
    let nrm = real_spectral_norm(&s);
    if nrm > 1.0 {
        s / nrm
    } else {
        s
    }
}

/// Circulant matrices of the Hilbert pieces K_m on Z/nZ.
///
/// Periodizing the kernel makes each piece an honest convolution on the
/// cyclic group, but it is not the operator on Z: pieces longer than the
/// window wrap around. The family serves only as structured test matrices.
fn radon_pieces(k: usize, n: usize) -> Result<Vec<DMatrix<f64>>> {
    if k == 0 {
        return Ok(Vec::new());
    }
    let dk = DyadicKernel::new(CzKernel::hilbert(), k as u32)?;
    let mut out = Vec::with_capacity(k);
    for m in 1..=k {
        let mut c = vec![0.0; n];
        for (t, w) in dk.piece(m as u32)?.lattice_weights() {
            c[t.rem_euclid(n as i64) as usize] += w;
        }
        let mat = DMatrix::from_fn(n, n, |i, j| c[(i + n - j) % n]);
        let nrm = real_spectral_norm(&mat);
        out.push(if nrm > 1.0 { mat / nrm } else { mat });
    }
    Ok(out)
}
