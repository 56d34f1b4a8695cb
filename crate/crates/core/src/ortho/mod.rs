//! Almost orthogonality on finite-dimensional operator families.
//!
//! A family S₁, …, S_K of contractions on Cⁿ together with the zeroed
//! variants S_{m,1} = 0, S_{m,0} = S_m. Every quantity is a supremum over
//! i-patterns of the spectral norm of an explicitly formed matrix:
//!
//! - B_p = sup ‖Σ_m S_{m,i_m}^p‖, γ_{m,p} = sup ‖S_{m,i_m} Σ_{m'>m} S_{m',i_{m'}}^p‖;
//! - D_p, μ_{m,p} are B_p, γ_{m,p} of the family T_m = S_m S_m*, and D̃_p, μ̃_{m,p}
//!   those of T̃_m = S_m* S_m;
//! - ν_m = sup ‖S_m* Σ_{m'>m} T_{m'}‖, ν̃_m = sup ‖S_m Σ_{m'>m} T̃_{m'}‖;
//! - q_m = sup ‖S_m Σ_{m'>m} S_{m'}*‖, q̃_m = sup ‖S_m* Σ_{m'>m} S_{m'}‖.
//!
//! A pattern with i_m = 1 zeroes a term that carries a leading factor S_m, so
//! such suprema range over the tail patterns only.

mod generators;
mod linalg;

pub use generators::{generate, Generator, GeneratorConfig};
pub use linalg::{hermitian_defect, hermitian_norm, is_real, random_orthogonal, spectral_norm, CMat, DENSE_LIMIT};

use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::substream;
use linalg::{from_real, real_part, real_spectral_norm, real_symmetric_norm};

/// Slack allowed in ‖S_m‖ ≤ 1 for rounding in the generators.
pub const CONTRACTION_SLACK: f64 = 1e-12;
/// Largest number of pattern terms enumerated exhaustively.
pub const EXACT_PATTERN_LIMIT: usize = 16;
/// Restarts of the heuristic ascent.
pub const HEURISTIC_RESTARTS: usize = 50;
/// Tolerance for the internal inequalities.
pub const INEQUALITY_TOL: f64 = 1e-8;

/// A family of n×n contractions.
#[derive(Debug, Clone)]
pub struct OperatorFamily {
    ops: Vec<CMat>,
    n: usize,
    selfadjoint: bool,
    norms: Vec<f64>,
}

impl OperatorFamily {
    /// Validates squareness, a common size and ‖S_m‖ ≤ 1.
    pub fn new(ops: Vec<CMat>) -> Result<Self> {
        let n = ops.first().map_or(0, |m| m.nrows());
        let mut norms = Vec::with_capacity(ops.len());
        for (i, m) in ops.iter().enumerate() {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::Dimension { expected: n, found: m.nrows().max(m.ncols()) });
            }
            let s = spectral_norm(m)?;
            if s > 1.0 + CONTRACTION_SLACK {
                return Err(Error::Construction(format!("operator S_{} has norm {s} > 1", i + 1)));
            }
            norms.push(s);
        }
        let selfadjoint = ops.iter().all(|m| hermitian_defect(m) <= 1e-14 * n.max(1) as f64);
        Ok(OperatorFamily { ops, n, selfadjoint, norms })
    }

    /// Family from real matrices.
    pub fn from_real(ops: &[DMatrix<f64>]) -> Result<Self> {
        Self::new(ops.iter().map(from_real).collect())
    }

    pub fn k(&self) -> usize {
        self.ops.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ops(&self) -> &[CMat] {
        &self.ops
    }

    /// S_m for 1 ≤ m ≤ K.
    pub fn op(&self, m: usize) -> &CMat {
        &self.ops[m - 1]
    }

    pub fn is_selfadjoint(&self) -> bool {
        self.selfadjoint
    }

    /// ‖S_m‖ in order.
    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    /// The first k operators.
    pub fn prefix(&self, k: usize) -> OperatorFamily {
        let k = k.min(self.k());
        OperatorFamily {
            ops: self.ops[..k].to_vec(),
            n: self.n,
            selfadjoint: self.selfadjoint,
            norms: self.norms[..k].to_vec(),
        }
    }

    /// T_m = S_m S_m*.
    pub fn gram(&self) -> OperatorFamily {
        self.derived(|s| s * s.adjoint())
    }

    /// T̃_m = S_m* S_m.
    pub fn cogram(&self) -> OperatorFamily {
        self.derived(|s| s.adjoint() * s)
    }

    fn derived(&self, f: impl Fn(&CMat) -> CMat) -> OperatorFamily {
        let ops: Vec<CMat> = self.ops.iter().map(|s| hermitize(f(s))).collect();
        OperatorFamily { norms: self.norms.iter().map(|x| x * x).collect(), ops, n: self.n, selfadjoint: true }
    }

    /// S_m^p for every m.
    pub fn powers(&self, p: u64) -> Result<Vec<CMat>> {
        check_dyadic(p)?;
        Ok(self.ops.iter().map(|s| matrix_power(s, p, self.selfadjoint)).collect())
    }

    /// ‖S₁ + … + S_K‖.
    pub fn sum_norm(&self) -> Result<f64> {
        spectral_norm(&self.sum())
    }

    pub fn sum(&self) -> CMat {
        let mut acc = CMat::zeros(self.n, self.n);
        for s in &self.ops {
            acc += s;
        }
        acc
    }

    /// Σ_m ‖S_m‖.
    pub fn sum_of_norms(&self) -> f64 {
        self.norms.iter().sum()
    }

    fn check_index(&self, m: usize) -> Result<()> {
        if m == 0 || m > self.k() {
            return Err(Error::Domain(format!("block index {m} outside 1..={}", self.k())));
        }
        Ok(())
    }
}

/// Averages M with M* to remove rounding asymmetry from products like S S*.
fn hermitize(m: CMat) -> CMat {
    let a = m.adjoint();
    (m + a).map(|z| z * 0.5)
}

fn check_dyadic(p: u64) -> Result<()> {
    if p == 0 || !p.is_power_of_two() {
        return Err(Error::Domain(format!("exponent {p} is not a dyadic integer")));
    }
    Ok(())
}

fn matrix_power(s: &CMat, p: u64, hermitian: bool) -> CMat {
    let mut acc = s.clone();
    let mut e = 1;
    while e < p {
        acc = &acc * &acc;
        if hermitian {
            acc = hermitize(acc);
        }
        e *= 2;
    }
    acc
}

/// How pattern suprema are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PatternMode {
    /// Exhaustive when the term count is at most [`EXACT_PATTERN_LIMIT`], heuristic otherwise.
    Auto,
    /// Exhaustive; refuses larger term counts.
    Exact,
    /// Steepest bit-flip ascent with restarts; a lower bound only.
    Heuristic { restarts: usize, seed: u64 },
}

/// A pattern supremum with the pattern attaining it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatternSup {
    pub value: f64,
    /// `included[i]` is true when term i is present (i = 0 in the pattern).
    pub included: Vec<bool>,
    /// False when the value is only a lower bound.
    pub exact: bool,
    pub evaluations: usize,
}

/// Terms prepared for repeated masked sums, in real arithmetic when possible.
enum TermSet {
    Real(Vec<DMatrix<f64>>),
    Complex(Vec<CMat>),
}

struct PatternEval {
    terms: TermSet,
    hermitian: bool,
    n: usize,
}

impl PatternEval {
    fn new(terms: &[CMat], hermitian: bool) -> Self {
        let n = terms.first().map_or(0, |t| t.nrows());
        let terms = if terms.iter().all(is_real) {
            TermSet::Real(terms.iter().map(real_part).collect())
        } else {
            TermSet::Complex(terms.to_vec())
        };
        PatternEval { terms, hermitian, n }
    }

    fn len(&self) -> usize {
        match &self.terms {
            TermSet::Real(t) => t.len(),
            TermSet::Complex(t) => t.len(),
        }
    }

    /// Norm of the sum of included terms, added in ascending index order.
    fn eval(&self, included: &[bool]) -> Result<f64> {
        if !included.iter().any(|&b| b) {
            return Ok(0.0);
        }
        match &self.terms {
            TermSet::Real(t) => {
                let mut acc = DMatrix::<f64>::zeros(self.n, self.n);
                for (m, _) in t.iter().zip(included).filter(|(_, &b)| b) {
                    acc += m;
                }
                if !acc.iter().all(|x| x.is_finite()) {
                    return Err(Error::Numeric("non-finite pattern sum".into()));
                }
                if self.n > DENSE_LIMIT {
                    return spectral_norm(&from_real(&acc));
                }
                Ok(if self.hermitian { real_symmetric_norm(&acc) } else { real_spectral_norm(&acc) })
            }
            TermSet::Complex(t) => {
                let mut acc = CMat::zeros(self.n, self.n);
                for (m, _) in t.iter().zip(included).filter(|(_, &b)| b) {
                    acc += m;
                }
                if self.hermitian {
                    hermitian_norm(&acc)
                } else {
                    spectral_norm(&acc)
                }
            }
        }
    }
}

/// sup over patterns of ‖Σ_{i included} terms[i]‖.
///
/// `hermitian` selects the eigenvalue path; it must only be set when every
/// partial sum is Hermitian.
pub fn pattern_sup(terms: &[CMat], hermitian: bool, mode: PatternMode) -> Result<PatternSup> {
    let ev = PatternEval::new(terms, hermitian);
    let t = ev.len();
    match mode {
        PatternMode::Exact if t > EXACT_PATTERN_LIMIT => Err(Error::Budget {
            what: "exact pattern supremum".into(),
            cost: 1u128 << t.min(127),
            budget: 1u128 << EXACT_PATTERN_LIMIT,
        }),
        PatternMode::Exact => exhaustive(&ev),
        PatternMode::Auto if t <= EXACT_PATTERN_LIMIT => exhaustive(&ev),
        PatternMode::Auto => heuristic(&ev, HEURISTIC_RESTARTS, 0),
        PatternMode::Heuristic { restarts, seed } => heuristic(&ev, restarts.max(1), seed),
    }
}

fn mask_to_pattern(mask: u64, t: usize) -> Vec<bool> {
    (0..t).map(|i| mask >> i & 1 == 1).collect()
}

fn exhaustive(ev: &PatternEval) -> Result<PatternSup> {
    let t = ev.len();
    let mut best = PatternSup { value: 0.0, included: vec![false; t], exact: true, evaluations: 0 };
    for mask in 1u64..(1u64 << t) {
        let pat = mask_to_pattern(mask, t);
        let v = ev.eval(&pat)?;
        best.evaluations += 1;
        if v > best.value {
            best.value = v;
            best.included = pat;
        }
    }
    Ok(best)
}

fn heuristic(ev: &PatternEval, restarts: usize, seed: u64) -> Result<PatternSup> {
    let t = ev.len();
    let mut cache: HashMap<Vec<bool>, f64> = HashMap::new();
    let eval = |p: &Vec<bool>, cache: &mut HashMap<Vec<bool>, f64>| -> Result<f64> {
        if let Some(v) = cache.get(p) {
            return Ok(*v);
        }
        let v = ev.eval(p)?;
        cache.insert(p.clone(), v);
        Ok(v)
    };
    let mut rng = substream(seed, "pattern-heuristic");
    let mut best = PatternSup { value: 0.0, included: vec![false; t], exact: false, evaluations: 0 };
    for r in 0..restarts {
        // The first start is the all-zeros i-pattern: every term present.
        let mut cur: Vec<bool> = if r == 0 { vec![true; t] } else { (0..t).map(|_| rng.random::<bool>()).collect() };
        let mut val = eval(&cur, &mut cache)?;
        loop {
            let mut step: Option<(usize, f64)> = None;
            for i in 0..t {
                cur[i] = !cur[i];
                let v = eval(&cur, &mut cache)?;
                cur[i] = !cur[i];
                if v > step.map_or(val, |s| s.1) {
                    step = Some((i, v));
                }
            }
            match step {
                Some((i, v)) => {
                    cur[i] = !cur[i];
                    val = v;
                }
                None => break,
            }
        }
        if val > best.value {
            best.value = val;
            best.included = cur;
        }
    }
    best.evaluations = cache.len();
    if t == 0 {
        best.exact = true;
    }
    Ok(best)
}

/// sup ‖lead · Σ_{i included} tail[i]‖ over tail patterns.
pub fn lead_tail_sup(lead: &CMat, tail: &[CMat], mode: PatternMode) -> Result<PatternSup> {
    let terms: Vec<CMat> = tail.iter().map(|x| lead * x).collect();
    pattern_sup(&terms, false, mode)
}

/// B_p.
pub fn quantity_bp(fam: &OperatorFamily, p: u64, mode: PatternMode) -> Result<PatternSup> {
    let pw = fam.powers(p)?;
    pattern_sup(&pw, fam.is_selfadjoint(), mode)
}

/// γ_{m,p} for 1 ≤ m ≤ K (zero when m = K).
pub fn quantity_gamma(fam: &OperatorFamily, m: usize, p: u64, mode: PatternMode) -> Result<PatternSup> {
    fam.check_index(m)?;
    let pw = fam.powers(p)?;
    lead_tail_sup(fam.op(m), &pw[m..], mode)
}

/// γ_{m,p} for m = 1..K, computing the powers once.
pub fn gamma_table(fam: &OperatorFamily, p: u64, mode: PatternMode) -> Result<Vec<PatternSup>> {
    let pw = fam.powers(p)?;
    (1..=fam.k()).map(|m| lead_tail_sup(fam.op(m), &pw[m..], mode)).collect()
}

/// D_p.
pub fn quantity_dp(fam: &OperatorFamily, p: u64, mode: PatternMode) -> Result<PatternSup> {
    quantity_bp(&fam.gram(), p, mode)
}

/// D̃_p.
pub fn quantity_dtilde_p(fam: &OperatorFamily, p: u64, mode: PatternMode) -> Result<PatternSup> {
    quantity_bp(&fam.cogram(), p, mode)
}

/// μ_{m,p}.
pub fn quantity_mu(fam: &OperatorFamily, m: usize, p: u64, mode: PatternMode) -> Result<PatternSup> {
    quantity_gamma(&fam.gram(), m, p, mode)
}

/// μ̃_{m,p}.
pub fn quantity_mutilde(fam: &OperatorFamily, m: usize, p: u64, mode: PatternMode) -> Result<PatternSup> {
    quantity_gamma(&fam.cogram(), m, p, mode)
}

/// ν_m for m = 1..K.
pub fn nu_table(fam: &OperatorFamily, mode: PatternMode) -> Result<Vec<PatternSup>> {
    let t = fam.gram();
    (1..=fam.k()).map(|m| lead_tail_sup(&fam.op(m).adjoint(), &t.ops[m..], mode)).collect()
}

/// ν̃_m for m = 1..K.
pub fn nutilde_table(fam: &OperatorFamily, mode: PatternMode) -> Result<Vec<PatternSup>> {
    let t = fam.cogram();
    (1..=fam.k()).map(|m| lead_tail_sup(fam.op(m), &t.ops[m..], mode)).collect()
}

/// q_m = sup ‖S_m Σ_{m'>m} S_{m'}*‖ for m = 1..K.
pub fn q_table(fam: &OperatorFamily, mode: PatternMode) -> Result<Vec<PatternSup>> {
    let adj: Vec<CMat> = fam.ops.iter().map(|s| s.adjoint()).collect();
    (1..=fam.k()).map(|m| lead_tail_sup(fam.op(m), &adj[m..], mode)).collect()
}

/// q̃_m = sup ‖S_m* Σ_{m'>m} S_{m'}‖ for m = 1..K.
pub fn qtilde_table(fam: &OperatorFamily, mode: PatternMode) -> Result<Vec<PatternSup>> {
    (1..=fam.k()).map(|m| lead_tail_sup(&fam.op(m).adjoint(), &fam.ops[m..], mode)).collect()
}

/// Second hypothesis line: sup ‖S_m* Σ_{m'>m} (S_{m'}S_{m'}*)^{p0}‖ for m = 1..K.
pub fn line2_table(fam: &OperatorFamily, p0: u64, mode: PatternMode) -> Result<Vec<PatternSup>> {
    let tp = fam.gram().powers(p0)?;
    (1..=fam.k()).map(|m| lead_tail_sup(&fam.op(m).adjoint(), &tp[m..], mode)).collect()
}

/// Third hypothesis line: sup ‖S_m Σ_{m'>m} (S_{m'}*S_{m'})^{p0}‖ for m = 1..K.
pub fn line3_table(fam: &OperatorFamily, p0: u64, mode: PatternMode) -> Result<Vec<PatternSup>> {
    let tp = fam.cogram().powers(p0)?;
    (1..=fam.k()).map(|m| lead_tail_sup(fam.op(m), &tp[m..], mode)).collect()
}

fn values(t: &[PatternSup]) -> Vec<f64> {
    t.iter().map(|s| s.value).collect()
}

/// Parameters of the simplified hypotheses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HypothesisParams {
    pub p0: u64,
    pub a: f64,
    pub delta0: f64,
}

impl HypothesisParams {
    /// A·2^{−δ0·m}.
    pub fn decay_bound(&self, m: usize) -> f64 {
        self.a * (-self.delta0 * m as f64).exp2()
    }
}

/// Per-m values of one hypothesis line against A·2^{−δ0 m}.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LineCheck {
    pub values: Vec<f64>,
    pub bounds: Vec<f64>,
    /// bound − value per m.
    pub margins: Vec<f64>,
    /// Smallest margin (+∞ when K = 0).
    pub worst_margin: f64,
    /// Largest value / bound.
    pub worst_ratio: f64,
    pub pass: bool,
}

impl LineCheck {
    fn new(values: Vec<f64>, params: &HypothesisParams) -> Self {
        let bounds: Vec<f64> = (1..=values.len()).map(|m| params.decay_bound(m)).collect();
        let margins: Vec<f64> = values.iter().zip(&bounds).map(|(v, b)| b - v).collect();
        let worst_margin = margins.iter().copied().fold(f64::INFINITY, f64::min);
        let worst_ratio = values.iter().zip(&bounds).map(|(v, b)| v / b).fold(0.0, f64::max);
        let pass = margins.iter().zip(&bounds).all(|(g, b)| *g >= -INEQUALITY_TOL * b.max(1.0));
        LineCheck { values, bounds, margins, worst_margin, worst_ratio, pass }
    }
}

/// Tables of every pattern quantity at exponents 1 and p0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantityTables {
    /// B_p; present for self-adjoint families.
    pub b: Option<BTreeMap<u64, f64>>,
    /// γ_{m,p}, m = 1..K; present for self-adjoint families.
    pub gamma: Option<BTreeMap<u64, Vec<f64>>>,
    pub d: BTreeMap<u64, f64>,
    pub dtilde: BTreeMap<u64, f64>,
    pub mu: BTreeMap<u64, Vec<f64>>,
    pub mutilde: BTreeMap<u64, Vec<f64>>,
    pub nu: Vec<f64>,
    pub nutilde: Vec<f64>,
    /// q_m = sup ‖S_m Σ_{m'>m} S_{m'}*‖.
    pub q_raw: Vec<f64>,
    pub qtilde_raw: Vec<f64>,
    /// sup_m 2^{δ0 m/8} q_m, using δ0 for the unspecified exponent.
    pub q: f64,
    pub qtilde: f64,
}

/// Outcome of checking the simplified three-line hypotheses.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub k: usize,
    pub n: usize,
    pub params: HypothesisParams,
    pub selfadjoint: bool,
    /// False when some supremum is only a heuristic lower bound.
    pub exact: bool,
    pub norms: Vec<f64>,
    pub line1_pass: bool,
    pub line2: LineCheck,
    pub line3: LineCheck,
    /// γ_{m,p0} ≤ A2^{−δ0 m}(B_{p0}+1) for every m; self-adjoint families only.
    pub gamma_bound_holds: Option<bool>,
    /// μ_{m,p0} ≤ A2^{−δ0 m}(D_{p0}+1) and the mirror for μ̃, for every m.
    pub mu_bound_holds: bool,
    pub tables: Option<QuantityTables>,
    pub passed: bool,
}

/// Checks the three lines ‖S_m‖ ≤ 1, line 2 and line 3, and with `tables`
/// also every pattern quantity at exponents 1 and p0.
pub fn check_hypotheses(
    fam: &OperatorFamily,
    params: HypothesisParams,
    mode: PatternMode,
    tables: bool,
) -> Result<HypothesisReport> {
    check_dyadic(params.p0)?;
    if !(params.a > 0.0 && params.a.is_finite() && params.delta0 > 0.0 && params.delta0.is_finite()) {
        return Err(Error::Domain("A and δ0 must be positive and finite".into()));
    }
    let l2 = line2_table(fam, params.p0, mode)?;
    let l3 = line3_table(fam, params.p0, mode)?;
    let mut exact = l2.iter().chain(&l3).all(|s| s.exact);
    let line1_pass = fam.norms.iter().all(|s| *s <= 1.0 + CONTRACTION_SLACK);
    let line2 = LineCheck::new(values(&l2), &params);
    let line3 = LineCheck::new(values(&l3), &params);

    let gram = fam.gram();
    let cogram = fam.cogram();
    let d_p0 = quantity_bp(&gram, params.p0, mode)?;
    let dt_p0 = quantity_bp(&cogram, params.p0, mode)?;
    let mu_p0 = gamma_table(&gram, params.p0, mode)?;
    let mut_p0 = gamma_table(&cogram, params.p0, mode)?;
    exact &= d_p0.exact && dt_p0.exact && mu_p0.iter().chain(&mut_p0).all(|s| s.exact);
    let bound_ok = |v: f64, m: usize, c: f64| v <= params.decay_bound(m) * (c + 1.0) * (1.0 + INEQUALITY_TOL);
    let mu_bound_holds = mu_p0.iter().enumerate().all(|(i, s)| bound_ok(s.value, i + 1, d_p0.value))
        && mut_p0.iter().enumerate().all(|(i, s)| bound_ok(s.value, i + 1, dt_p0.value));

    let mut gamma_bound_holds = None;
    let mut b_map = None;
    let mut g_map = None;
    if fam.is_selfadjoint() {
        let b = quantity_bp(fam, params.p0, mode)?;
        let g = gamma_table(fam, params.p0, mode)?;
        exact &= b.exact && g.iter().all(|s| s.exact);
        gamma_bound_holds = Some(g.iter().enumerate().all(|(i, s)| bound_ok(s.value, i + 1, b.value)));
        if tables {
            let mut bm = BTreeMap::from([(params.p0, b.value)]);
            let mut gm = BTreeMap::from([(params.p0, values(&g))]);
            if params.p0 != 1 {
                bm.insert(1, quantity_bp(fam, 1, mode)?.value);
                gm.insert(1, values(&gamma_table(fam, 1, mode)?));
            }
            b_map = Some(bm);
            g_map = Some(gm);
        }
    }

    let tables = if tables {
        let mut d = BTreeMap::from([(params.p0, d_p0.value)]);
        let mut dtilde = BTreeMap::from([(params.p0, dt_p0.value)]);
        let mut mu = BTreeMap::from([(params.p0, values(&mu_p0))]);
        let mut mutilde = BTreeMap::from([(params.p0, values(&mut_p0))]);
        if params.p0 != 1 {
            d.insert(1, quantity_bp(&gram, 1, mode)?.value);
            dtilde.insert(1, quantity_bp(&cogram, 1, mode)?.value);
            mu.insert(1, values(&gamma_table(&gram, 1, mode)?));
            mutilde.insert(1, values(&gamma_table(&cogram, 1, mode)?));
        }
        let nu = nu_table(fam, mode)?;
        let nut = nutilde_table(fam, mode)?;
        let q = q_table(fam, mode)?;
        let qt = qtilde_table(fam, mode)?;
        exact &= [&nu, &nut, &q, &qt].iter().all(|t| t.iter().all(|s| s.exact));
        let weighted = |t: &[PatternSup]| {
            t.iter().enumerate().map(|(i, s)| (params.delta0 * (i + 1) as f64 / 8.0).exp2() * s.value).fold(0.0, f64::max)
        };
        Some(QuantityTables {
            b: b_map,
            gamma: g_map,
            d,
            dtilde,
            mu,
            mutilde,
            nu: values(&nu),
            nutilde: values(&nut),
            q: weighted(&q),
            qtilde: weighted(&qt),
            q_raw: values(&q),
            qtilde_raw: values(&qt),
        })
    } else {
        None
    };

    let passed = line1_pass && line2.pass && line3.pass;
    Ok(HypothesisReport {
        k: fam.k(),
        n: fam.n(),
        params,
        selfadjoint: fam.is_selfadjoint(),
        exact,
        norms: fam.norms.clone(),
        line1_pass,
        line2,
        line3,
        gamma_bound_holds,
        mu_bound_holds,
        tables,
        passed,
    })
}

/// One evaluated inequality lhs ≤ rhs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl InequalityCheck {
    fn new(name: String, lhs: f64, rhs: f64) -> Self {
        let holds = lhs <= rhs + INEQUALITY_TOL * rhs.abs().max(1.0);
        InequalityCheck { name, lhs, rhs, holds }
    }
}

/// For a self-adjoint family V and dyadic p:
/// B_p² ≤ B_{2p} + 2Σ_m γ_{m,p} and γ_{m,2p} ≤ B_pγ_{m,p} + 2Σ_{m'=m+1}^{K−1}γ_{m',p}.
fn squaring_checks(v: &OperatorFamily, label: &str, ps: &[u64], mode: PatternMode) -> Result<Vec<InequalityCheck>> {
    let k = v.k();
    let mut bs: BTreeMap<u64, f64> = BTreeMap::new();
    let mut gs: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
    for &p in ps {
        for e in [p, 2 * p] {
            if let std::collections::btree_map::Entry::Vacant(slot) = bs.entry(e) {
                slot.insert(quantity_bp(v, e, mode)?.value);
                gs.insert(e, values(&gamma_table(v, e, mode)?));
            }
        }
    }
    let mut out = Vec::new();
    for &p in ps {
        let (b, b2) = (bs[&p], bs[&(2 * p)]);
        let (g, g2) = (&gs[&p], &gs[&(2 * p)]);
        let gsum: f64 = g[..k.saturating_sub(1)].iter().sum();
        out.push(InequalityCheck::new(format!("{label}: B_{p}^2 <= B_{} + 2 sum gamma", 2 * p), b * b, b2 + 2.0 * gsum));
        for m in 1..k {
            let tail: f64 = g[m..k - 1].iter().sum();
            out.push(InequalityCheck::new(
                format!("{label}: gamma_{{{m},{}}} <= B_{p} gamma_{{{m},{p}}} + 2 tail", 2 * p),
                g2[m - 1],
                b * g[m - 1] + 2.0 * tail,
            ));
        }
    }
    Ok(out)
}

/// Every internal inequality of the almost-orthogonality argument that holds
/// for the exact quantities: the squaring inequalities for T = SS*, T̃ = S*S
/// (and S itself when self-adjoint), ν_m² ≤ D₁μ_{m,1}, ν̃_m² ≤ D̃₁μ̃_{m,1},
/// and for self-adjoint families D_p = B_{2p}.
pub fn internal_inequalities(fam: &OperatorFamily, ps: &[u64], mode: PatternMode) -> Result<Vec<InequalityCheck>> {
    for &p in ps {
        check_dyadic(p)?;
    }
    let gram = fam.gram();
    let cogram = fam.cogram();
    let mut out = Vec::new();
    if fam.is_selfadjoint() {
        out.extend(squaring_checks(fam, "S", ps, mode)?);
    }
    out.extend(squaring_checks(&gram, "SS*", ps, mode)?);
    out.extend(squaring_checks(&cogram, "S*S", ps, mode)?);

    let d1 = quantity_bp(&gram, 1, mode)?.value;
    let dt1 = quantity_bp(&cogram, 1, mode)?.value;
    let mu1 = values(&gamma_table(&gram, 1, mode)?);
    let mut1 = values(&gamma_table(&cogram, 1, mode)?);
    let nu = values(&nu_table(fam, mode)?);
    let nut = values(&nutilde_table(fam, mode)?);
    for m in 1..=fam.k() {
        out.push(InequalityCheck::new(format!("nu_{m}^2 <= D_1 mu_{{{m},1}}"), nu[m - 1].powi(2), d1 * mu1[m - 1]));
        out.push(InequalityCheck::new(format!("nutilde_{m}^2 <= Dtilde_1 mutilde_{{{m},1}}"), nut[m - 1].powi(2), dt1 * mut1[m - 1]));
    }
    if fam.is_selfadjoint() {
        for &p in ps {
            let dp = quantity_bp(&gram, p, mode)?.value;
            let b2p = quantity_bp(fam, 2 * p, mode)?.value;
            let diff = (dp - b2p).abs();
            out.push(InequalityCheck::new(format!("|D_{p} - B_{}|", 2 * p), diff, 0.0));
        }
    }
    Ok(out)
}

/// Classical Cotlar–Stein certificate √(A·B) with
/// A = sup_j Σ_k √‖S_j* S_k‖ and B = sup_j Σ_k √‖S_j S_k*‖.
pub fn cotlar_stein_bound(fam: &OperatorFamily) -> Result<f64> {
    let k = fam.k();
    let adj: Vec<CMat> = fam.ops.iter().map(|s| s.adjoint()).collect();
    let (mut a, mut b) = (0.0f64, 0.0f64);
    for j in 0..k {
        let (mut ra, mut rb) = (0.0, 0.0);
        for l in 0..k {
            ra += spectral_norm(&(&adj[j] * &fam.ops[l]))?.sqrt();
            rb += spectral_norm(&(&fam.ops[j] * &adj[l]))?.sqrt();
        }
        a = a.max(ra);
        b = b.max(rb);
    }
    Ok((a * b).sqrt())
}

/// One row of the growth experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthRow {
    pub k: usize,
    pub sum_norm: f64,
    pub sum_of_norms: f64,
    pub cotlar_stein: f64,
    pub worst_margin_line2: f64,
    pub worst_margin_line3: f64,
    pub worst_ratio_line2: f64,
    pub worst_ratio_line3: f64,
    pub hypotheses_pass: bool,
    pub exact: bool,
}

/// ‖ΣS_m‖, Σ‖S_m‖, the Cotlar–Stein bound and the hypothesis margins for each
/// K in `ks`, from one family of the largest size (the generator is nested).
pub fn sum_norm_growth(
    generator: &dyn Fn(usize) -> Result<OperatorFamily>,
    ks: &[usize],
    params: HypothesisParams,
    mode: PatternMode,
) -> Result<Vec<GrowthRow>> {
    let kmax = ks.iter().copied().max().unwrap_or(0);
    let full = generator(kmax)?;
    let mut rows = Vec::new();
    for &k in ks {
        let fam = full.prefix(k);
        let l2 = line2_table(&fam, params.p0, mode)?;
        let l3 = line3_table(&fam, params.p0, mode)?;
        let exact = l2.iter().chain(&l3).all(|s| s.exact);
        let line2 = LineCheck::new(values(&l2), &params);
        let line3 = LineCheck::new(values(&l3), &params);
        rows.push(GrowthRow {
            k,
            sum_norm: fam.sum_norm()?,
            sum_of_norms: fam.sum_of_norms(),
            cotlar_stein: cotlar_stein_bound(&fam)?,
            worst_margin_line2: line2.worst_margin,
            worst_margin_line3: line3.worst_margin,
            worst_ratio_line2: line2.worst_ratio,
            worst_ratio_line3: line3.worst_ratio,
            hypotheses_pass: line2.pass && line3.pass,
            exact,
        });
    }
    Ok(rows)
}

/// Growth rows as CSV.
pub fn growth_csv(rows: &[GrowthRow]) -> String {
    let mut s = String::from("K,sum_norm,sum_of_norms,cotlar_stein,worst_margin_line2,worst_margin_line3,worst_ratio_line2,worst_ratio_line3,hypotheses_pass,exact\n");
    for r in rows {
        s.push_str(&format!(
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{}\n",
            r.k,
            r.sum_norm,
            r.sum_of_norms,
            r.cotlar_stein,
            r.worst_margin_line2,
            r.worst_margin_line3,
            r.worst_ratio_line2,
            r.worst_ratio_line3,
            r.hypotheses_pass,
            r.exact
        ));
    }
    s
}
