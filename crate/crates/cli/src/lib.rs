//! The `ultracon` command line.
//!
//! [`run`] executes one parsed [`RunConfig`] and returns the process exit
//! code: 0 on success or a passing verification, 1 when a verification
//! fails or two algebras are not isomorphic, 2 on any input error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ultracon_core::format::{
    algebra_from_json, algebra_to_json, ultraproduct_provenance, AlgebraFile,
};
use ultracon_core::report::VerificationReport;
use ultracon_core::sweep::{self, SweepConfig, SweepReport};
use ultracon_core::theorems::{self, VerifyOptions};
use ultracon_core::{
    con_lattice_with, corpus, enumerate_ultrafilters, find_isomorphism_with, quotient,
    ultraproduct_with, Algebra, Congruence, CongruenceFamily, Limits, Partition, ProductAlgebra,
    UltrafilterSpec,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

const LONG_ABOUT: &str = "\
Finite algebras, congruence lattices, ultrafilters and ultraproducts.

ALGEBRA FILES
  {\"name\": string, \"size\": int,
   \"signature\": [{\"name\": string, \"arity\": int}],
   \"tables\": {symbol: [int, ...]}}

  Elements are 0..n-1. Operation tables are flat arrays in row-major
  mixed-radix order, most significant argument first: the value of
  f(a1,...,ak) on an n-element carrier sits at index
  a1*n^(k-1) + a2*n^(k-2) + ... + ak*n^0, so a table has n^k entries.
  Constants (arity 0) are tables of length 1.

PARTITIONS
  Partition text form: sorted blocks of sorted elements, e.g. \"[[0,1],[2]]\".
  Accepted anywhere a congruence is expected.

ULTRAFILTERS
  \"principal:<i0>\", or an explicit JSON list of subsets of the index set,
  e.g. [[1],[0,1],[1,2],[0,1,2]], checked against the ultrafilter axioms
  when loaded.

EXIT CODES
  0 success or verification passed, 1 verification failed or not
  isomorphic, 2 input error.";

#[derive(Debug, Parser)]
#[command(name = "ultracon", version, about, long_about = LONG_ABOUT)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Largest carrier any construction may produce.
    #[arg(long, global = true, default_value_t = Limits::default().max_carrier)]
    pub max_carrier: usize,
    /// Largest carrier the isomorphism search accepts.
    #[arg(long, global = true, default_value_t = Limits::default().max_iso)]
    pub max_iso: usize,
}

impl RunConfig {
    fn limits(&self) -> Limits {
        Limits {
            max_carrier: self.max_carrier,
            max_iso: self.max_iso,
            ..Limits::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Congruence lattice in canonical order (Δ first, ∇ last).
    Con {
        algebra: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Direct product of similar algebras.
    Product {
        #[arg(required = true)]
        algebras: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Quotient by a congruence given in partition text form.
    Quotient {
        algebra: PathBuf,
        #[arg(long)]
        partition: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ultraproduct of the factors over an ultrafilter on their index set.
    Ultraproduct {
        #[arg(long, num_args = 1.., required = true)]
        factors: Vec<PathBuf>,
        #[arg(long)]
        ultrafilter: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// All ultrafilters on {0,...,n-1} (n at most 4).
    Ultrafilters {
        n: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Search for an isomorphism; prints the witness as the image list.
    Iso { left: PathBuf, right: PathBuf },
    /// Check one of the congruence correspondences on a concrete instance.
    Verify(VerifyArgs),
    /// Run theorem checks over every instance drawn from a corpus.
    Sweep(SweepArgs),
    /// List the built-in corpus, or print one of its algebras as JSON.
    Corpus { name: Option<String> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Theorem {
    /// Φ embeds Π_𝒟 Con(Aᵢ) into Con(Π_𝒟 Aᵢ) as a meet-semilattice.
    Thm1,
    /// Δ induces Π_𝒟(Aᵢ)/Π_𝒟(σ(i)) ≅ Π_𝒟(Aᵢ/σ(i)).
    Thm2,
    /// On an ultrapower, the restriction is the union and the join of meets.
    Thm3,
    /// A principal ultraproduct is isomorphic to the selected factor.
    Collapse,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub theorem: Theorem,
    /// Factor algebras (thm1, thm2, collapse).
    #[arg(long, num_args = 1..)]
    pub factors: Vec<PathBuf>,
    /// The single algebra of an ultrapower (thm3).
    #[arg(long)]
    pub algebra: Option<PathBuf>,
    #[arg(long)]
    pub ultrafilter: String,
    /// One partition per factor (thm2) or per index (thm3). Without it,
    /// every family is checked.
    #[arg(long)]
    pub sigma: Vec<String>,
    /// Index set size for a thm3 sweep without --sigma.
    #[arg(long)]
    pub index_size: Option<usize>,
    /// Seed for family sampling when a sweep is too large to be exhaustive.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = VerifyOptions::default().max_exhaustive)]
    pub max_exhaustive: usize,
    #[arg(long, default_value_t = VerifyOptions::default().samples)]
    pub samples: usize,
    /// Write the JSON report here.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepTheorem {
    Thm1,
    Thm2,
    Thm3,
    Collapse,
    All,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(value_enum, default_value_t = SweepTheorem::All)]
    pub theorem: SweepTheorem,
    /// Algebra files to use instead of the built-in corpus.
    #[arg(long, num_args = 1..)]
    pub corpus: Vec<PathBuf>,
    #[arg(long, default_value_t = SweepConfig::default().max_product)]
    pub max_product: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write every instance report as JSON here.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

enum Outcome {
    Passed,
    Failed,
}

/// Runs one command, writing results to `out` and diagnostics to `err`.
pub fn run(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match execute(config, out) {
        Ok(Outcome::Passed) => EXIT_OK,
        Ok(Outcome::Failed) => EXIT_FAILED,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_INPUT
        }
    }
}

fn load(path: &Path) -> anyhow::Result<Algebra> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    algebra_from_json(&text).with_context(|| format!("invalid algebra file {}", path.display()))
}

fn load_all(paths: &[PathBuf]) -> anyhow::Result<Vec<Algebra>> {
    paths.iter().map(|p| load(p)).collect()
}

fn congruence(a: &Algebra, text: &str) -> anyhow::Result<Congruence> {
    let p: Partition = text
        .parse()
        .with_context(|| format!("invalid partition {text:?}"))?;
    Congruence::new(a, p).with_context(|| format!("{text:?} on {}", a.name()))
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, format!("{text}\n"))
            .with_context(|| format!("cannot write {}", p.display())),
        None => Ok(writeln!(out, "{text}")?),
    }
}

fn execute(config: &RunConfig, out: &mut dyn Write) -> anyhow::Result<Outcome> {
    let limits = config.limits();
    match &config.command {
        Command::Con { algebra, format } => {
            let a = load(algebra)?;
            let lattice = con_lattice_with(&a, &limits)?;
            match format {
                Format::Text => {
                    for c in lattice.congruences() {
                        writeln!(out, "{c}")?;
                    }
                }
                Format::Json => {
                    let blocks: Vec<_> = lattice.congruences().iter().map(|c| c.blocks()).collect();
                    writeln!(out, "{}", serde_json::to_string(&blocks)?)?;
                }
                Format::Dot => write!(out, "{}", lattice.to_dot())?,
            }
        }
        Command::Product {
            algebras,
            out: path,
        } => {
            let factors = load_all(algebras)?;
            let p = ProductAlgebra::new(factors, &limits)?;
            emit(out, path.as_deref(), &algebra_to_json(p.algebra()))?;
        }
        Command::Quotient {
            algebra,
            partition,
            out: path,
        } => {
            let a = load(algebra)?;
            let theta = congruence(&a, partition)?;
            let q = quotient(&a, &theta)?;
            emit(out, path.as_deref(), &algebra_to_json(q.algebra()))?;
        }
        Command::Ultraproduct {
            factors,
            ultrafilter,
            out: path,
        } => {
            let factors = load_all(factors)?;
            let d = resolve_ultrafilter(ultrafilter, factors.len())?;
            let up = ultraproduct_with(&factors, &d, &limits)?;
            let file = AlgebraFile::from_algebra(up.algebra())
                .with_provenance(ultraproduct_provenance(&up));
            emit(out, path.as_deref(), &file.to_json())?;
        }
        Command::Ultrafilters { n, format } => {
            let all = enumerate_ultrafilters(*n)?;
            let rows: Vec<(String, Vec<Vec<usize>>)> = all
                .iter()
                .map(|d| {
                    (
                        d.label(),
                        d.members().iter().map(|m| m.elements()).collect(),
                    )
                })
                .collect();
            match format {
                Format::Json => {
                    let json: Vec<_> = rows
                        .iter()
                        .map(|(label, members)| serde_json::json!({"label": label, "members": members}))
                        .collect();
                    writeln!(out, "{}", serde_json::to_string_pretty(&json)?)?;
                }
                Format::Text => {
                    for (label, members) in rows {
                        writeln!(out, "{label} {}", serde_json::to_string(&members)?)?;
                    }
                }
                Format::Dot => bail!("ultrafilters has no dot output"),
            }
        }
        Command::Iso { left, right } => {
            let (a, b) = (load(left)?, load(right)?);
            let r = find_isomorphism_with(&a, &b, limits.max_iso)?;
            return Ok(match r.witness {
                Some(w) => {
                    writeln!(out, "isomorphic: {}", serde_json::to_string(w.image())?)?;
                    Outcome::Passed
                }
                None => {
                    writeln!(out, "not isomorphic")?;
                    Outcome::Failed
                }
            });
        }
        Command::Verify(args) => return verify(args, &limits, out),
        Command::Sweep(args) => return run_sweep(args, &limits, out),
        Command::Corpus { name } => match name {
            None => {
                for a in corpus::all() {
                    let sig: Vec<String> = a
                        .signature()
                        .symbols()
                        .iter()
                        .map(|s| format!("{}/{}", s.name, s.arity))
                        .collect();
                    writeln!(out, "{} size={} {}", a.name(), a.size(), sig.join(" "))?;
                }
            }
            Some(name) => {
                let a =
                    corpus::by_name(name).ok_or_else(|| anyhow!("no corpus algebra {name:?}"))?;
                writeln!(out, "{}", algebra_to_json(&a))?;
            }
        },
    }
    Ok(Outcome::Passed)
}

fn resolve_ultrafilter(text: &str, n: usize) -> anyhow::Result<ultracon_core::Ultrafilter> {
    let spec: UltrafilterSpec = text
        .parse()
        .with_context(|| format!("invalid ultrafilter {text:?}"))?;
    spec.resolve(n)
        .with_context(|| format!("ultrafilter {text:?} on an index set of size {n}"))
}

fn verify(args: &VerifyArgs, limits: &Limits, out: &mut dyn Write) -> anyhow::Result<Outcome> {
    let opts = VerifyOptions {
        seed: args.seed,
        max_exhaustive: args.max_exhaustive,
        samples: args.samples,
        limits: *limits,
    };
    let needs_factors = || -> anyhow::Result<Vec<Algebra>> {
        if args.factors.is_empty() {
            bail!("{:?} needs --factors", args.theorem);
        }
        load_all(&args.factors)
    };
    let report = match args.theorem {
        Theorem::Thm1 => {
            let factors = needs_factors()?;
            let d = resolve_ultrafilter(&args.ultrafilter, factors.len())?;
            theorems::verify_thm1(&factors, &d, &opts)?
        }
        Theorem::Thm2 => {
            let factors = needs_factors()?;
            let d = resolve_ultrafilter(&args.ultrafilter, factors.len())?;
            if args.sigma.is_empty() {
                theorems::verify_thm2_sweep(&factors, &d, &opts)?
            } else {
                if args.sigma.len() != factors.len() {
                    bail!(
                        "thm2 takes one --sigma per factor: {} factors, {} partitions",
                        factors.len(),
                        args.sigma.len()
                    );
                }
                let choice = factors
                    .iter()
                    .zip(&args.sigma)
                    .map(|(a, s)| congruence(a, s))
                    .collect::<anyhow::Result<Vec<_>>>()?;
                let fam = CongruenceFamily::from_congruences(&factors, choice)?;
                theorems::verify_thm2(&factors, &fam, &d, &opts)?
            }
        }
        Theorem::Thm3 => {
            let path = args
                .algebra
                .as_ref()
                .ok_or_else(|| anyhow!("thm3 needs --algebra"))?;
            let a = load(path)?;
            if args.sigma.is_empty() {
                let n = args
                    .index_size
                    .ok_or_else(|| anyhow!("thm3 needs --sigma (one per index) or --index-size"))?;
                let d = resolve_ultrafilter(&args.ultrafilter, n)?;
                theorems::verify_thm3_sweep(&a, &d, &opts)?
            } else {
                if args.index_size.is_some_and(|n| n != args.sigma.len()) {
                    bail!("--index-size disagrees with the number of --sigma values");
                }
                let sigma = args
                    .sigma
                    .iter()
                    .map(|s| congruence(&a, s))
                    .collect::<anyhow::Result<Vec<_>>>()?;
                let d = resolve_ultrafilter(&args.ultrafilter, sigma.len())?;
                theorems::verify_thm3(&a, &sigma, &d, &opts)?
            }
        }
        Theorem::Collapse => {
            let factors = needs_factors()?;
            let d = resolve_ultrafilter(&args.ultrafilter, factors.len())?;
            theorems::verify_collapse(&factors, &d, &opts)?
        }
    };
    if let Some(path) = &args.report {
        emit(out, Some(path), &report.to_json())?;
    }
    match args.format {
        Format::Json => writeln!(out, "{}", report.to_json())?,
        _ => write_summary(out, &report)?,
    }
    Ok(if report.passed {
        Outcome::Passed
    } else {
        Outcome::Failed
    })
}

fn verdict(passed: bool) -> &'static str {
    if passed {
        "PASS"
    } else {
        "FAIL"
    }
}

fn write_summary(out: &mut dyn Write, report: &VerificationReport) -> anyhow::Result<()> {
    let inst = &report.instance;
    writeln!(
        out,
        "{} [{}] over {}: {}",
        report.theorem,
        inst.factors.join(", "),
        inst.ultrafilter,
        verdict(report.passed)
    )?;
    writeln!(
        out,
        "  families: {} of {}{}",
        inst.families,
        inst.family_space,
        if inst.exhaustive { "" } else { " (sampled)" }
    )?;
    for c in &report.checks {
        writeln!(
            out,
            "  {} {} ({} cases)",
            verdict(c.passed),
            c.name,
            c.cases
        )?;
        if let Some(w) = &c.witness {
            writeln!(out, "    witness: {}", serde_json::to_string(w)?)?;
        }
    }
    for (k, v) in &report.info {
        writeln!(out, "  {k}: {v}")?;
    }
    Ok(())
}

fn run_sweep(args: &SweepArgs, limits: &Limits, out: &mut dyn Write) -> anyhow::Result<Outcome> {
    let algebras = if args.corpus.is_empty() {
        corpus::all()
    } else {
        load_all(&args.corpus)?
    };
    let cfg = SweepConfig {
        max_product: args.max_product,
        verify: VerifyOptions {
            seed: args.seed,
            limits: *limits,
            ..VerifyOptions::default()
        },
        ..SweepConfig::default()
    };
    type SweepFn = fn(&[Algebra], &SweepConfig) -> ultracon_core::Result<SweepReport>;
    let all: [(SweepTheorem, SweepFn); 4] = [
        (SweepTheorem::Thm1, sweep::sweep_thm1),
        (SweepTheorem::Thm2, sweep::sweep_thm2),
        (SweepTheorem::Thm3, sweep::sweep_thm3),
        (SweepTheorem::Collapse, sweep::sweep_collapse),
    ];
    let mut reports = Vec::new();
    for (which, f) in all {
        if args.theorem != SweepTheorem::All && args.theorem != which {
            continue;
        }
        let start = Instant::now();
        let r = f(&algebras, &cfg)?;
        writeln!(
            out,
            "{}: {} instances, {} failures, {:.2}s: {}",
            r.theorem,
            r.instances,
            r.failures,
            start.elapsed().as_secs_f64(),
            verdict(r.passed)
        )?;
        for failed in r.failed() {
            write_summary(out, failed)?;
        }
        reports.push(r);
    }
    if let Some(path) = &args.report {
        emit(out, Some(path), &serde_json::to_string_pretty(&reports)?)?;
    }
    Ok(if reports.iter().all(|r| r.passed) {
        Outcome::Passed
    } else {
        Outcome::Failed
    })
}
