//! `nilradon`: experiment runner for the nilradon library.
//!
//! Every subcommand reads its arguments from flags, a JSON config file, or
//! both (flags win), writes CSV/JSON artifacts with the config hash embedded,
//! and exits 0 on PASS, 1 when a checked property fails, 2 on usage or
//! budget errors.

mod commands;
mod config;
mod error;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{ArgMatches, CommandFactory, FromArgMatches, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;

use commands::*;
use error::{CliError, EXIT_FAIL, EXIT_PASS, EXIT_USAGE};
use output::Report;

#[derive(Debug, Parser)]
#[command(name = "nilradon", version, about = "Exact and numerical experiments on step-2 nilpotent lattice groups")]
struct Cli {
    /// JSON config file with the subcommand's arguments as keys; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for artifacts and manifest.json; without it the first artifact goes to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Group axioms, commutator centrality and dilations on random triples.
    ///
    /// group_check.csv: d,samples,associativity_failures,identity_failures,
    /// inverse_failures,centrality_failures,dilation_failures
    #[command(verbatim_doc_comment)]
    GroupCheck(GroupCheckArgs),
    /// Nilpotency degree of A₀ and the transference morphism on random step-2 targets.
    ///
    /// nilpotency.csv: d,kmax,nilpotency_degree
    /// morphisms.csv: target,dim1,dim2,d,intertwining,homomorphism_checked,homomorphism
    #[command(verbatim_doc_comment)]
    SeqCheck(SeqCheckArgs),
    /// Calderón–Zygmund bounds, mean-zero pieces and telescoping of a kernel.
    ///
    /// cj.csv: j,c_j
    /// pieces.csv: j,integral,support_lo,support_hi
    /// cz_report.json: bounds, maximizers and worst residuals
    #[command(verbatim_doc_comment)]
    KernelCheck(KernelCheckArgs),
    /// Power-iteration lower bounds for ‖H^R‖ or for dyadic blocks S_J.
    ///
    /// norms.csv: param,value,lower_bound,l1_bound,iterations,residual,support_size,stop,ratio
    /// (ratio = lower bound over the previous row's; param is R or J)
    #[command(verbatim_doc_comment)]
    NormSweep(NormSweepArgs),
    /// max_a |S(a/q)| and max_a |S̃(a/q)| over irreducible a, for q ≤ qmax.
    ///
    /// decay.csv: q,max_abs_S,max_abs_Stilde,argmax_a (numerators joined by ';')
    #[command(verbatim_doc_comment)]
    ExpsumTable(ExpsumTableArgs),
    /// Weyl sums at θ = 0, on a major arc and on a minor arc.
    ///
    /// weyl.csv: theta_desc,P,r,ratio (ratio = |S|/(2P+1)^{2r})
    #[command(verbatim_doc_comment)]
    WeylScan(WeylScanArgs),
    /// Oscillatory integrals I(β) along a ray, with convergence diagnostics.
    ///
    /// osc.csv: variant,beta_norm,order,re,im,abs,ratio_to_zero,max_cauchy_ratio
    #[command(verbatim_doc_comment)]
    OscScan(OscScanArgs),
    /// Almost-orthogonality quantities and ‖Σ S_m‖ growth for a generated family.
    ///
    /// growth.csv: K,sum_norm,sum_of_norms,cotlar_stein,worst_margin_line2,
    /// worst_margin_line3,worst_ratio_line2,worst_ratio_line3,hypotheses_pass,exact
    /// inequalities.csv: name,lhs,rhs,holds
    /// hypotheses.json: full report for the largest K
    #[command(verbatim_doc_comment)]
    OrthoDemo(OrthoDemoArgs),
    /// Exact kernel of H_{j1}*H_{k1}⋯ at δ_e from the closed form of D, checked against the chain.
    ///
    /// kernel.jsonl: header line, then one {coords, re, im} object per support point
    #[command(verbatim_doc_comment)]
    ComposeKernel(ComposeKernelArgs),
}

/// Resolves the arguments, runs the command and reports; returns the exit code.
fn execute<T: Serialize + DeserializeOwned>(
    name: &str,
    parsed: &T,
    sub: &ArgMatches,
    cli: &Cli,
    run: fn(&T) -> Result<Report, CliError>,
) -> Result<u8, CliError> {
    let cfg = config::resolve(name, parsed, sub, cli.config.as_deref())?;
    let echo = config::echo(name, &cfg);
    let hash = config::config_hash(&echo);
    let start = Instant::now();
    let report = run(&cfg)?;
    let seconds = start.elapsed().as_secs_f64();
    let manifest = output::manifest(name, &echo, &hash, &report, seconds);
    let line = format!("{} {name}: {}", if report.pass { "PASS" } else { "FAIL" }, report.summary);
    match &cli.out {
        Some(dir) => {
            output::write_all(dir, name, &hash, &report, &manifest)?;
            println!("{line}");
        }
        None => {
            if let Some(a) = report.artifacts.first() {
                let text = output::render(a, name, &hash, &report.params);
                let mut out = std::io::stdout().lock();
                match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
                    Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(e.into()),
                    _ => {}
                }
            }
            eprintln!("{line}");
        }
    }
    Ok(if report.pass { EXIT_PASS } else { EXIT_FAIL })
}

fn dispatch(cli: &Cli, matches: &ArgMatches) -> Result<u8, CliError> {
    let (name, sub) = matches.subcommand().expect("a subcommand is required");
    match &cli.command {
        Command::GroupCheck(a) => execute(name, a, sub, cli, group_check),
        Command::SeqCheck(a) => execute(name, a, sub, cli, seq_check),
        Command::KernelCheck(a) => execute(name, a, sub, cli, kernel_check),
        Command::NormSweep(a) => execute(name, a, sub, cli, norm_sweep),
        Command::ExpsumTable(a) => execute(name, a, sub, cli, expsum_table),
        Command::WeylScan(a) => execute(name, a, sub, cli, weyl_scan),
        Command::OscScan(a) => execute(name, a, sub, cli, osc_scan),
        Command::OrthoDemo(a) => execute(name, a, sub, cli, ortho_demo),
        Command::ComposeKernel(a) => execute(name, a, sub, cli, compose_kernel),
    }
}

fn main() -> ExitCode {
    let matches = Cli::command().get_matches();
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    match dispatch(&cli, &matches) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
