//! The subcommands. Each takes its resolved arguments and returns a [`Report`].

use std::time::Instant;

use clap::Args;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use nilradon::dyadic::Dyadic;
use nilradon::expsums::{
    decay_table_csv, minor_arc_scan, osc_integral, saq_decay_table, CutoffPair, OscConfig, Variant, Window,
    DEFAULT_SUM_BUDGET, DEFAULT_WEYL_BUDGET,
};
use nilradon::group::{index_len, GroupElement};
use nilradon::kernels::{verify_cz, CzKernel, DyadicKernel};
use nilradon::ortho::{
    check_hypotheses, generate, growth_csv, internal_inequalities, sum_norm_growth, Generator, GeneratorConfig,
    HypothesisParams, PatternMode, HEURISTIC_RESTARTS,
};
use nilradon::rng::substream;
use nilradon::seq::{a0_sequence, build_morphism, random_element, random_step2_target, verify_homomorphism, verify_intertwining};
use nilradon::transform::{
    apply_chain, block_range, block_weights, estimate_norm, exact_composition_kernel, hr_weights, l1_norm,
    NormConfig, OperatorChain, RadonOperator, Registry, ResolvedChain, SparseFunction, DEFAULT_BUDGET,
};

use crate::config::RegimeParams;
use crate::error::CliError;
use crate::output::{num, Artifact, Report};

/// Relative slack for floating-point comparisons against exact bounds.
const SLACK: f64 = 1e-12;

fn usage(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("field '{field}': {msg}"))
}

fn check_d(field: &str, d: usize, max: usize) -> Result<(), CliError> {
    if (1..=max).contains(&d) {
        Ok(())
    } else {
        Err(usage(field, format!("d = {d} outside 1..={max}")))
    }
}

fn parse_variants(s: &str) -> Result<Vec<Variant>, CliError> {
    match s {
        "both" => Ok(vec![Variant::D, Variant::DTilde]),
        other => Ok(vec![Variant::from_name(other).map_err(|e| usage("variant", e))?]),
    }
}

fn pass_word(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

// ---------------------------------------------------------------- group-check

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct GroupCheckArgs {
    /// Dimensions to test (comma separated).
    #[arg(long, value_delimiter = ',', default_values_t = vec![1usize, 2, 3])]
    pub d: Vec<usize>,
    /// Random triples per dimension.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    /// Coordinates are drawn from [−bound, bound].
    #[arg(long, default_value_t = 1000)]
    pub bound: i64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// CSV `d,samples,associativity_failures,identity_failures,inverse_failures,centrality_failures,dilation_failures`.
pub fn group_check(a: &GroupCheckArgs) -> Result<Report, CliError> {
    if a.bound < 0 {
        return Err(usage("bound", "must be non-negative"));
    }
    let mut csv = String::from(
        "d,samples,associativity_failures,identity_failures,inverse_failures,centrality_failures,dilation_failures\n",
    );
    let mut total = 0usize;
    let mut points = Vec::new();
    for &d in &a.d {
        check_d("d", d, 8)?;
        let t = Instant::now();
        let mut rng = substream(a.seed, &format!("group-check-{d}"));
        let mut fails = [0usize; 5];
        for _ in 0..a.samples {
            let mut el = || GroupElement::new(d, (0..index_len(d)).map(|_| rng.random_range(-a.bound..=a.bound)).collect());
            let (x, y, z) = (el()?, el()?, el()?);
            let lam: i64 = rng.random_range(1..=5);
            let e = GroupElement::identity(d);
            if x.multiply(&y)?.multiply(&z)? != x.multiply(&y.multiply(&z)?)? {
                fails[0] += 1;
            }
            if x.multiply(&e)? != x || e.multiply(&x)? != x {
                fails[1] += 1;
            }
            if !x.multiply(&x.inverse())?.is_identity() || !x.inverse().multiply(&x)?.is_identity() {
                fails[2] += 1;
            }
            let c = x.commutator(&y)?;
            if !c.is_central() || c.multiply(&z)? != z.multiply(&c)? {
                fails[3] += 1;
            }
            if x.multiply(&y)?.dilate(&lam)? != x.dilate(&lam)?.multiply(&y.dilate(&lam)?)? {
                fails[4] += 1;
            }
        }
        total += fails.iter().sum::<usize>();
        csv.push_str(&format!("{d},{},{},{},{},{},{}\n", a.samples, fails[0], fails[1], fails[2], fails[3], fails[4]));
        points.push((format!("d={d}"), t.elapsed().as_secs_f64()));
    }
    let pass = total == 0;
    let summary = format!("{} triples per dimension, d in {:?}: {total} counterexamples", a.samples, a.d);
    let mut r = Report::new(pass, summary, vec![Artifact::csv("group_check.csv", csv)]);
    r.points = points;
    Ok(r)
}

// ------------------------------------------------------------------ seq-check

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SeqCheckArgs {
    /// Dimensions for the nilpotency degree of A₀ (comma separated).
    #[arg(long, value_delimiter = ',', default_values_t = vec![1usize, 2, 3, 4])]
    pub d: Vec<usize>,
    /// Random step-2 targets for the transference morphism.
    #[arg(long, default_value_t = 20)]
    pub targets: usize,
    /// Random pairs per target for the homomorphism check.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Intertwining is checked for n in [−range, range].
    #[arg(long, default_value_t = 20)]
    pub range: i64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// `nilpotency.csv`: `d,kmax,nilpotency_degree`; `morphisms.csv`:
/// `target,dim1,dim2,d,intertwining,homomorphism_checked,homomorphism`.
pub fn seq_check(a: &SeqCheckArgs) -> Result<Report, CliError> {
    let mut nil = String::from("d,kmax,nilpotency_degree\n");
    let mut pass = true;
    let mut points = Vec::new();
    for &d in &a.d {
        check_d("d", d, 8)?;
        let t = Instant::now();
        let kmax = 4 * d + 4;
        let deg = a0_sequence(d)?.nilpotency_degree(kmax);
        pass &= deg.is_some();
        nil.push_str(&format!("{d},{kmax},{}\n", deg.map_or("none".to_string(), |k| k.to_string())));
        points.push((format!("nilpotency d={d}"), t.elapsed().as_secs_f64()));
    }
    let mut mor = String::from("target,dim1,dim2,d,intertwining,homomorphism_checked,homomorphism\n");
    let mut rng = substream(a.seed, "seq-check-targets");
    let mut bad = 0usize;
    for i in 0..a.targets {
        let t = Instant::now();
        let (group, seq) = random_step2_target(&mut rng);
        let spec = build_morphism(&group, &seq)?;
        let inter = verify_intertwining(&spec, &seq, -a.range..=a.range)?;
        let pairs: Vec<_> =
            (0..a.samples).map(|_| (random_element(&mut rng, spec.d, 10), random_element(&mut rng, spec.d, 10))).collect();
        let hom = verify_homomorphism(&spec, &pairs)?;
        if !(inter && hom.passed) {
            bad += 1;
        }
        mor.push_str(&format!("{i},{},{},{},{inter},{},{}\n", group.dim1(), group.dim2(), spec.d, hom.checked, hom.passed));
        points.push((format!("target {i}"), t.elapsed().as_secs_f64()));
    }
    pass &= bad == 0;
    let summary = format!("nilpotency degrees finite for d in {:?}; {bad} of {} random targets fail", a.d, a.targets);
    let mut r = Report::new(pass, summary, vec![Artifact::csv("nilpotency.csv", nil), Artifact::csv("morphisms.csv", mor)]);
    r.points = points;
    Ok(r)
}

// --------------------------------------------------------------- kernel-check

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct KernelCheckArgs {
    /// hilbert, log-osc, reciprocal or zero.
    #[arg(long, default_value = "hilbert")]
    pub kernel: String,
    /// Overrides the kernel's normalizing constant.
    #[arg(long)]
    pub scale: Option<f64>,
    /// Largest dyadic scale j.
    #[arg(long, default_value_t = 20)]
    pub jmax: u32,
    /// Random points for the telescoping identity.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// `cj.csv`: `j,c_j`; `pieces.csv`: `j,integral,support_lo,support_hi`; `cz_report.json`.
pub fn kernel_check(a: &KernelCheckArgs) -> Result<Report, CliError> {
    if a.jmax == 0 {
        return Err(usage("jmax", "must be positive"));
    }
    let k = CzKernel::from_name(&a.kernel, a.scale).map_err(|e| usage("kernel", e))?;
    let dk = DyadicKernel::new(k, a.jmax)?;
    let mut pieces = String::from("j,integral,support_lo,support_hi\n");
    let mut worst_mean = 0.0f64;
    for j in 1..=a.jmax {
        let p = dk.piece(j)?;
        let m = p.integral()?;
        worst_mean = worst_mean.max(m.abs());
        let (lo, hi) = p.support();
        pieces.push_str(&format!("{j},{},{},{}\n", num(m), num(lo), num(hi)));
    }
    let mut rng = substream(a.seed, "kernel-check-telescoping");
    let mut worst_tele = 0.0f64;
    for _ in 0..a.samples {
        let j = rng.random_range(1..=a.jmax);
        let mag = rng.random_range(-2.0..(a.jmax as f64 + 3.0)).exp2();
        let s = if rng.random_bool(0.5) { mag } else { -mag };
        worst_tele = worst_tele.max(dk.telescoping_residual(j, s)?.abs());
    }
    let cz = verify_cz(&k)?;
    let pass = cz.passed && worst_mean <= 1e-10 && worst_tele <= 1e-12;
    let report = json!({
        "kernel": k.name(),
        "constant": k.c,
        "cz": cz,
        "max_abs_piece_integral": worst_mean,
        "max_telescoping_residual": worst_tele,
        "mean_zero_tolerance": 1e-10,
        "telescoping_tolerance": 1e-12,
    });
    let summary = format!(
        "{}: CZ bounds {}, max |∫K_j| = {worst_mean:.3e}, max telescoping residual = {worst_tele:.3e}",
        k.name(),
        pass_word(cz.passed)
    );
    Ok(Report::new(
        pass,
        summary,
        vec![Artifact::csv("cj.csv", dk.cj_csv()), Artifact::csv("pieces.csv", pieces), Artifact::json("cz_report.json", &report)?],
    ))
}

// ----------------------------------------------------------------- norm-sweep

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct NormSweepArgs {
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    #[arg(long, default_value = "hilbert")]
    pub kernel: String,
    #[arg(long)]
    pub scale: Option<f64>,
    /// Truncation radii for H^R (comma separated); the default sweep when neither R nor J is set.
    #[arg(long = "R", value_delimiter = ',')]
    pub R: Option<Vec<u64>>,
    /// Block tops J for S_J = Σ_{J(1−κ) ≤ j ≤ J} H_j (comma separated).
    #[arg(long = "J", value_delimiter = ',')]
    pub J: Option<Vec<u32>>,
    /// Block width fraction κ for the J sweep.
    #[arg(long, default_value_t = 0.25)]
    pub kappa: f64,
    #[arg(long, default_value_t = 30)]
    pub max_iter: usize,
    /// Random starting points; 1 starts from δ_e.
    #[arg(long, default_value_t = 1)]
    pub start_support: usize,
    #[arg(long, default_value_t = 4)]
    pub start_radius: i64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Cap on the support of any intermediate function.
    #[arg(long, default_value_t = DEFAULT_BUDGET as u64)]
    pub budget: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// `norms.csv`: `param,value,lower_bound,l1_bound,iterations,residual,support_size,stop,ratio`.
///
/// The property checked is lower_bound ≤ l1_bound = Σ|K|, the trivial upper bound.
pub fn norm_sweep(a: &NormSweepArgs) -> Result<Report, CliError> {
    check_d("d", a.d, 4)?;
    if !(a.kappa > 0.0 && a.kappa <= 1.0) {
        return Err(usage("kappa", format!("{} outside (0, 1]", a.kappa)));
    }
    let kernel = CzKernel::from_name(&a.kernel, a.scale).map_err(|e| usage("kernel", e))?;
    let seq = a0_sequence(a.d)?;
    let cfg = NormConfig {
        max_iter: a.max_iter,
        seed: a.seed,
        start_support: a.start_support,
        start_radius: a.start_radius,
        budget: u128::from(a.budget),
        tol: a.tol,
    };
    // (label, value, weights)
    let sweep: Vec<(&str, u64, Vec<(i64, f64)>)> = match (&a.R, &a.J) {
        (Some(_), Some(_)) => return Err(usage("R", "give either R or J, not both")),
        (None, Some(js)) => {
            let jmax = js.iter().copied().max().unwrap_or(0);
            if js.contains(&0) {
                return Err(usage("J", "block tops must be positive"));
            }
            let dk = DyadicKernel::new(kernel, jmax)?;
            js.iter()
                .map(|&j| {
                    let (lo, hi) = block_range(j, a.kappa);
                    Ok(("J", u64::from(j), block_weights(&dk, lo, hi)?))
                })
                .collect::<Result<_, CliError>>()?
        }
        (r, None) => {
            let rs = r.clone().unwrap_or_else(|| vec![16, 64, 256, 1024]);
            if rs.contains(&0) {
                return Err(usage("R", "radii must be positive"));
            }
            rs.iter().map(|&x| ("R", x, hr_weights(&kernel, x))).collect()
        }
    };
    let mut csv = String::from("param,value,lower_bound,l1_bound,iterations,residual,support_size,stop,ratio\n");
    let mut pass = true;
    let mut prev: Option<f64> = None;
    let mut points = Vec::new();
    for (label, value, w) in &sweep {
        let t = Instant::now();
        let op = ResolvedChain::single(RadonOperator::<Complex64>::from_real(&seq, w)?);
        let est = estimate_norm(&op, a.d, &cfg)?;
        let l1 = l1_norm(w);
        pass &= est.lower_bound <= l1 * (1.0 + SLACK);
        let ratio = prev.map_or(String::new(), |p| if p > 0.0 { num(est.lower_bound / p) } else { String::new() });
        let stop = serde_json::to_value(est.stop).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        csv.push_str(&format!(
            "{label},{value},{},{},{},{},{},{stop},{ratio}\n",
            num(est.lower_bound),
            num(l1),
            est.iterations,
            num(est.residual),
            est.support_size
        ));
        prev = Some(est.lower_bound);
        points.push((format!("{label}={value}"), t.elapsed().as_secs_f64()));
    }
    let summary = format!("{} operators on G0({}): lower bounds within the l1 bound: {}", sweep.len(), a.d, pass);
    let mut r = Report::new(pass, summary, vec![Artifact::csv("norms.csv", csv)]);
    r.points = points;
    if a.J.is_some() {
        r.params = RegimeParams { d: Some(a.d), kappa: Some(a.kappa), ..Default::default() };
    }
    Ok(r)
}

// --------------------------------------------------------------- expsum-table

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ExpsumTableArgs {
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    #[arg(long, default_value_t = 1)]
    pub r: usize,
    #[arg(long, default_value_t = 30)]
    pub qmax: u64,
    /// Cap on residue tuples enumerated per modulus.
    #[arg(long, default_value_t = DEFAULT_SUM_BUDGET as u64)]
    pub budget: u64,
}

/// `decay.csv`: `q,max_abs_S,max_abs_Stilde,argmax_a`.
///
/// Checked: the q = 1 row equals 1 and every |S| ≤ 1.
pub fn expsum_table(a: &ExpsumTableArgs) -> Result<Report, CliError> {
    check_d("d", a.d, 4)?;
    if a.r == 0 {
        return Err(usage("r", "must be positive"));
    }
    if a.qmax == 0 {
        return Err(usage("qmax", "must be positive"));
    }
    let rows = saq_decay_table(a.d, a.r, a.qmax, u128::from(a.budget))?;
    let anchor = (rows[0].max_abs_s - 1.0).abs() <= SLACK && (rows[0].max_abs_stilde - 1.0).abs() <= SLACK;
    let bounded = rows.iter().all(|r| r.max_abs_s <= 1.0 + SLACK && r.max_abs_stilde <= 1.0 + SLACK);
    let tail = rows.last().map_or(String::new(), |r| format!(", max |S(a/{})| = {:.4}", r.q, r.max_abs_s));
    let summary = format!("q = 1..{}: q = 1 row {}{tail}", a.qmax, if anchor { "equals 1" } else { "differs from 1" });
    let mut r = Report::new(anchor && bounded, summary, vec![Artifact::csv("decay.csv", decay_table_csv(&rows))]);
    r.params = RegimeParams { d: Some(a.d), r: Some(a.r), ..Default::default() };
    Ok(r)
}

// ------------------------------------------------------------------ weyl-scan

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct WeylScanArgs {
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, default_value_t = 2)]
    pub r: usize,
    /// Scale P of the cutoffs.
    #[arg(long = "P", default_value_t = 16)]
    pub P: u64,
    #[arg(long, default_value_t = 0.25)]
    pub epsilon: f64,
    /// Cap on transfer-table work.
    #[arg(long, default_value_t = DEFAULT_WEYL_BUDGET as u64)]
    pub budget: u64,
}

/// `weyl.csv`: `theta_desc,P,r,ratio`.
///
/// Checked: the nonnegative cutoffs make |S(θ)| ≤ S(0) for every θ.
pub fn weyl_scan(a: &WeylScanArgs) -> Result<Report, CliError> {
    check_d("d", a.d, 4)?;
    if a.r == 0 {
        return Err(usage("r", "must be positive"));
    }
    if a.P < 2 {
        return Err(usage("P", "must be at least 2"));
    }
    let cut = CutoffPair::default_admissible(a.P, a.r);
    let rep = minor_arc_scan(a.d, a.r, a.P, a.epsilon, &cut, u128::from(a.budget)).map_err(|e| match e {
        nilradon::Error::Domain(m) => usage("epsilon", m),
        other => other.into(),
    })?;
    let pass = rep.ratio_major <= rep.ratio_zero * (1.0 + SLACK) && rep.ratio_minor <= rep.ratio_zero * (1.0 + SLACK);
    let summary = format!(
        "P = {}, r = {}: |S(minor)|/|S(0)| = {:.4e} at {}/{}",
        a.P,
        a.r,
        rep.ratio_minor / rep.ratio_zero,
        rep.minor_a,
        rep.minor_q
    );
    let mut r = Report::new(pass, summary, vec![Artifact::csv("weyl.csv", rep.to_csv())]);
    r.params = RegimeParams { d: Some(a.d), epsilon: Some(a.epsilon), r: Some(a.r), kappa: None };
    Ok(r)
}

// ------------------------------------------------------------------- osc-scan

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct OscScanArgs {
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    /// Factors in the product, 1 or 2.
    #[arg(long, default_value_t = 1)]
    pub r: usize,
    /// Magnitudes |β| to scan (comma separated).
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.0, 2.5, 5.0, 10.0])]
    pub beta: Vec<f64>,
    /// Direction of β (comma separated, one entry per coordinate); default all ones.
    #[arg(long, value_delimiter = ',')]
    pub direction: Option<Vec<f64>>,
    /// D, Dtilde or both.
    #[arg(long, default_value = "both")]
    pub variant: String,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 256)]
    pub max_order: usize,
    /// Extra doublings after convergence, for the Cauchy ratios.
    #[arg(long, default_value_t = 1)]
    pub extra: usize,
}

/// `osc.csv`: `variant,beta_norm,order,re,im,abs,ratio_to_zero,max_cauchy_ratio`.
///
/// Checked: every integral converges and |I(β)| ≤ I(0) (the window is nonnegative).
pub fn osc_scan(a: &OscScanArgs) -> Result<Report, CliError> {
    check_d("d", a.d, 3)?;
    if !(1..=2).contains(&a.r) {
        return Err(usage("r", format!("{} outside 1..=2", a.r)));
    }
    let n = index_len(a.d);
    let dir = a.direction.clone().unwrap_or_else(|| vec![1.0; n]);
    if dir.len() != n {
        return Err(usage("direction", format!("expected {n} entries for d = {}, found {}", a.d, dir.len())));
    }
    let len = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(len > 0.0 && len.is_finite()) {
        return Err(usage("direction", "must be a nonzero finite vector"));
    }
    let cfg = OscConfig { tol: a.tol, max_order: a.max_order, extra: a.extra, ..Default::default() };
    let mut csv = String::from("variant,beta_norm,order,re,im,abs,ratio_to_zero,max_cauchy_ratio\n");
    let mut pass = true;
    let mut points = Vec::new();
    let mut worst = 0.0f64;
    for v in parse_variants(&a.variant)? {
        let zero = osc_integral(&vec![0.0; n], a.r, a.d, Window::Bump, v, &OscConfig::default())?.value.norm();
        for &b in &a.beta {
            let t = Instant::now();
            let beta: Vec<f64> = dir.iter().map(|x| x * b / len).collect();
            let res = osc_integral(&beta, a.r, a.d, Window::Bump, v, &cfg)?;
            let ratio = res.value.norm() / zero;
            pass &= ratio <= 1.0 + 1e-9;
            worst = worst.max(ratio * f64::from(u8::from(b > 0.0)));
            let cauchy = res.cauchy_ratios(1e-12).into_iter().fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.max(x))));
            csv.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                v.name(),
                num(b),
                res.order,
                num(res.value.re),
                num(res.value.im),
                num(res.value.norm()),
                num(ratio),
                cauchy.map_or(String::new(), num)
            ));
            points.push((format!("{} |beta|={b}", v.name()), t.elapsed().as_secs_f64()));
        }
    }
    let summary = format!("{} integrals, d = {}, r = {}: max |I(β)|/|I(0)| over β ≠ 0 = {worst:.4}", points.len(), a.d, a.r);
    let mut r = Report::new(pass, summary, vec![Artifact::csv("osc.csv", csv)]);
    r.points = points;
    r.params = RegimeParams { d: Some(a.d), r: Some(a.r), ..Default::default() };
    Ok(r)
}

// ----------------------------------------------------------------- ortho-demo

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct OrthoDemoArgs {
    /// projections, decaying-unitary, radon or near-orthogonal.
    #[arg(long, default_value = "near-orthogonal")]
    pub generator: String,
    /// Family sizes K (comma separated).
    #[arg(long, value_delimiter = ',', default_values_t = vec![2usize, 4, 8])]
    pub k: Vec<usize>,
    /// Matrix size.
    #[arg(long, default_value_t = 64)]
    pub n: usize,
    /// Coordinate block width.
    #[arg(long, default_value_t = 4)]
    pub block: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Dyadic exponent p0.
    #[arg(long, default_value_t = 2)]
    pub p0: u64,
    /// Decay constant A.
    #[arg(long, default_value_t = 2.0)]
    pub a: f64,
    /// Decay rate δ0.
    #[arg(long, default_value_t = 0.5)]
    pub delta0: f64,
    /// auto, exact or heuristic.
    #[arg(long, default_value = "auto")]
    pub mode: String,
}

/// `growth.csv` (see [`growth_csv`]), `inequalities.csv`: `name,lhs,rhs,holds`,
/// and `hypotheses.json` for the largest K.
///
/// Checked: the hypotheses hold at every K and every internal inequality holds.
pub fn ortho_demo(a: &OrthoDemoArgs) -> Result<Report, CliError> {
    let gen = Generator::from_name(&a.generator).map_err(|e| usage("generator", e))?;
    let mode = match a.mode.as_str() {
        "auto" => PatternMode::Auto,
        "exact" => PatternMode::Exact,
        "heuristic" => PatternMode::Heuristic { restarts: HEURISTIC_RESTARTS, seed: a.seed },
        other => return Err(usage("mode", format!("unknown mode {other:?} (expected auto, exact, heuristic)"))),
    };
    if a.k.is_empty() || a.k.contains(&0) {
        return Err(usage("k", "sizes must be positive"));
    }
    if !(a.a > 0.0 && a.delta0 > 0.0) {
        return Err(usage("a", "A and delta0 must be positive"));
    }
    let cfg = GeneratorConfig { n: a.n, block: a.block, seed: a.seed };
    let params = HypothesisParams { p0: a.p0, a: a.a, delta0: a.delta0 };
    let t = Instant::now();
    let rows = sum_norm_growth(&|k| generate(gen, k, &cfg), &a.k, params, mode).map_err(|e| match e {
        nilradon::Error::Domain(m) => usage("k", m),
        other => other.into(),
    })?;
    let growth_time = t.elapsed().as_secs_f64();
    let kmax = a.k.iter().copied().max().unwrap_or(0);
    let fam = generate(gen, kmax, &cfg)?;
    let t = Instant::now();
    let hyp = check_hypotheses(&fam, params, mode, true)?;
    let ineq = internal_inequalities(&fam, &[1, a.p0], mode)?;
    let check_time = t.elapsed().as_secs_f64();
    let mut icsv = String::from("name,lhs,rhs,holds\n");
    for c in &ineq {
        icsv.push_str(&format!("{},{},{},{}\n", c.name, num(c.lhs), num(c.rhs), c.holds));
    }
    let ineq_ok = ineq.iter().all(|c| c.holds);
    let hyp_ok = rows.iter().all(|r| r.hypotheses_pass);
    let largest = rows.iter().find(|r| r.k == kmax).expect("kmax row");
    let summary = format!(
        "{} K = {:?}: hypotheses {}, {} internal inequalities {}, ‖ΣS‖ = {:.4} at K = {kmax} (Σ‖S‖ = {:.3})",
        gen.name(),
        a.k,
        if hyp_ok { "hold" } else { "fail" },
        ineq.len(),
        if ineq_ok { "hold" } else { "fail" },
        largest.sum_norm,
        largest.sum_of_norms
    );
    let mut r = Report::new(
        hyp_ok && ineq_ok,
        summary,
        vec![
            Artifact::csv("growth.csv", growth_csv(&rows)),
            Artifact::csv("inequalities.csv", icsv),
            Artifact::json("hypotheses.json", &hyp)?,
        ],
    );
    r.points = vec![("growth sweep".into(), growth_time), (format!("hypotheses K={kmax}"), check_time)];
    Ok(r)
}

// ------------------------------------------------------------- compose-kernel

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ComposeKernelArgs {
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, default_value = "hilbert")]
    pub kernel: String,
    #[arg(long)]
    pub scale: Option<f64>,
    /// Scale pairs j:k (comma separated), at most two.
    #[arg(long, value_delimiter = ',', default_values_t = vec!["1:2".to_string()])]
    pub pairs: Vec<String>,
    /// D or Dtilde.
    #[arg(long, default_value = "D")]
    pub variant: String,
    /// Cap on tuples enumerated and on intermediate supports.
    #[arg(long, default_value_t = DEFAULT_BUDGET as u64)]
    pub budget: u64,
}

fn parse_pair(s: &str) -> Result<(u32, u32), CliError> {
    let err = || usage("pairs", format!("{s:?} is not of the form j:k with positive integers"));
    let (j, k) = s.split_once(':').ok_or_else(err)?;
    let (j, k): (u32, u32) = (j.trim().parse().map_err(|_| err())?, k.trim().parse().map_err(|_| err())?);
    if j == 0 || k == 0 {
        return Err(err());
    }
    Ok((j, k))
}

/// `kernel.jsonl`: one `{coords, re, im}` object per support point, from the
/// closed form of D; checked exactly against the operator chain applied to δ_e.
pub fn compose_kernel(a: &ComposeKernelArgs) -> Result<Report, CliError> {
    check_d("d", a.d, 4)?;
    let pairs = a.pairs.iter().map(|s| parse_pair(s)).collect::<Result<Vec<_>, _>>()?;
    if pairs.is_empty() || pairs.len() > 2 {
        return Err(usage("pairs", format!("{} pairs given, expected 1 or 2", pairs.len())));
    }
    let variant = Variant::from_name(&a.variant).map_err(|e| usage("variant", e))?;
    let kernel = CzKernel::from_name(&a.kernel, a.scale).map_err(|e| usage("kernel", e))?;
    let jmax = pairs.iter().map(|&(j, k)| j.max(k)).max().unwrap_or(1);
    let mut reg = Registry::new();
    reg.register_kernel("k", kernel, jmax)?;
    reg.register_sequence("a", a0_sequence(a.d)?);
    let budget = u128::from(a.budget);
    let closed = exact_composition_kernel::<Dyadic>(reg.kernel("k")?, a.d, &pairs, variant, budget)?;
    let chain = OperatorChain::composition(&pairs, variant, "k", "a");
    let direct = apply_chain::<Dyadic>(&reg, &chain, &SparseFunction::delta_identity(a.d), budget)?;
    let pass = closed == direct;
    let summary = format!(
        "{} kernel for pairs {:?} on G0({}): {} support points, closed form {} the operator chain",
        variant.name(),
        pairs,
        a.d,
        closed.len(),
        if pass { "equals" } else { "differs from" }
    );
    Ok(Report::new(pass, summary, vec![Artifact::json_lines("kernel.jsonl", closed.to_json_lines())]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_syntax() {
        assert_eq!(parse_pair("3:5").unwrap(), (3, 5));
        assert!(parse_pair("3").is_err());
        assert!(parse_pair("0:1").is_err());
        assert!(parse_pair("a:1").is_err());
    }

    #[test]
    fn group_check_small_run_passes() {
        let a = GroupCheckArgs { d: vec![1, 2], samples: 50, bound: 100, seed: 1 };
        let r = group_check(&a).unwrap();
        assert!(r.pass);
        assert!(r.artifacts[0].body.contains("\n1,50,0,0,0,0,0\n"));
    }

    #[test]
    fn expsum_anchor_row() {
        let a = ExpsumTableArgs { d: 1, r: 1, qmax: 3, budget: DEFAULT_SUM_BUDGET as u64 };
        let r = expsum_table(&a).unwrap();
        assert!(r.pass);
        let first = r.artifacts[0].body.lines().nth(1).unwrap();
        assert!(first.starts_with("1,1.0000000000000000e0,1.0000000000000000e0"), "{first}");
    }

    #[test]
    fn norm_sweep_rejects_both_sweeps() {
        let a = NormSweepArgs {
            d: 1,
            kernel: "hilbert".into(),
            scale: None,
            R: Some(vec![4]),
            J: Some(vec![2]),
            kappa: 0.25,
            max_iter: 2,
            start_support: 1,
            start_radius: 1,
            tol: 1e-9,
            budget: 1000,
            seed: 0,
        };
        assert!(matches!(norm_sweep(&a), Err(CliError::Usage(_))));
    }
}
