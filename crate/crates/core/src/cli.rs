//! Command-line front end. `main.rs` only forwards to [`run`].
//!
//! Exit codes: 0 success, 1 domain error (bad input data, failed run),
//! 2 usage error.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::certify::{self, LemmaVariant};
use crate::configs::{self, LowerBoundParams};
use crate::dynamics::{self, OpinionProfile};
use crate::error::{HkError, Result};
use crate::graphs;
use crate::milp::{self, BlpOptions};
use crate::rational::{self, Rational};
use crate::solver::{self, SearchConfig};

#[derive(Debug, Parser)]
#[command(name = "hk-exact", version, about = "Exact Hegselmann-Krause dynamics and consensus-time bounds")]
pub struct RunConfig {
    /// Output format where a command supports several.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Human,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate the dynamics and print the trajectory as CSV.
    Simulate {
        #[command(flatten)]
        input: ProfileInput,
        /// Step cap (default n^3 + 100).
        #[arg(long)]
        cap: Option<usize>,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Add a decimal approximation column (plotting only).
        #[arg(long)]
        approx: bool,
    },
    /// Earliest time of consensus or of a gap larger than 1.
    FOf {
        #[command(flatten)]
        input: ProfileInput,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// List the connected ordered unit interval graphs on n vertices.
    EnumerateGraphs {
        #[arg(long)]
        n: usize,
        /// Print only the number of graphs.
        #[arg(long)]
        count_only: bool,
        /// Largest n accepted.
        #[arg(long, default_value_t = graphs::DEFAULT_ENUMERATION_LIMIT)]
        limit: usize,
    },
    /// Check the lower-bound construction's inequality chains step by step.
    VerifyLemma {
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = VariantArg::Both)]
        variant: VariantArg,
        /// Write the per-check CSV here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare simulated equidistant convergence times with the closed form.
    EquidistantReport {
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the binary program and write it as an LP file plus JSON sidecar.
    BuildMilp {
        #[arg(long)]
        n: usize,
        #[arg(long = "T")]
        horizon: usize,
        /// ε as an exact rational, e.g. -1/1000.
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        eps: String,
        #[arg(long, value_enum, default_value_t = Toggle::On)]
        ordering: Toggle,
        /// Use the literal x_i^{t-1} self-term in the dynamics rows.
        #[arg(long)]
        printed_dynamics: bool,
        /// Add x_1^0 = 0.
        #[arg(long)]
        fix_origin: bool,
        /// LP file to write; the sidecar goes next to it with extension .json.
        #[arg(long)]
        out: PathBuf,
    },
    /// Bracket or determine f(n) with the exact graph-sequence search.
    SolveF {
        #[arg(long)]
        n: usize,
        /// Largest horizon T to try.
        #[arg(long, default_value_t = 16)]
        tmax: usize,
        /// Strict ε for lower-bound certificates.
        #[arg(long, default_value = "-1/1000", allow_hyphen_values = true)]
        eps: String,
        /// LP-call budget per search (default 10^7, or HK_EXACT_BUDGET).
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Certificate JSON path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct ProfileInput {
    /// JSON array of exact rationals, e.g. ["0", "3/2"].
    #[arg(long)]
    profile: Option<PathBuf>,
    /// x_i = i for i = 1..N.
    #[arg(long, value_name = "N")]
    equidistant: Option<usize>,
    /// Lower-bound construction with parameter K >= 4.
    #[arg(long, value_name = "K")]
    lower_bound: Option<usize>,
}

impl ProfileInput {
    fn load(&self) -> Result<OpinionProfile> {
        if let Some(path) = &self.profile {
            configs::load_profile(path)
        } else if let Some(n) = self.equidistant {
            configs::equidistant(n)
        } else if let Some(k) = self.lower_bound {
            Ok(configs::lower_bound_config(LowerBoundParams::new(k)?))
        } else {
            unreachable!("clap enforces one input")
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    AsPrinted,
    Shifted,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Toggle {
    On,
    Off,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(cfg) => cfg,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match execute(&cfg, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn write_or_print(path: Option<&PathBuf>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn execute(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    match &cfg.command {
        Command::Simulate { input, cap, out: path, approx } => {
            let p = input.load()?;
            let cap = cap.unwrap_or_else(|| dynamics::default_cap(p.len()));
            let traj = dynamics::simulate(&p, cap)?;
            let csv = dynamics::trajectory_csv(&traj, *approx);
            write_or_print(path.as_ref(), &csv, out)?;
            if path.is_some() {
                writeln!(out, "termination: {}", traj.termination())?;
                writeln!(out, "final clusters: {}", traj.final_profile().cluster_count())?;
            }
        }
        Command::FOf { input, cap } => {
            let p = input.load()?;
            let cap = cap.unwrap_or_else(|| dynamics::default_cap(p.len()));
            writeln!(out, "f = {}", dynamics::f_of(&p, cap)?)?;
        }
        Command::EnumerateGraphs { n, count_only, limit } => {
            let all = graphs::enumerate_connected_with_limit(*n, *limit)?;
            if *count_only {
                writeln!(out, "{}", all.len())?;
            } else if cfg.format == Some(Format::Human) {
                for g in &all {
                    writeln!(out, "{:?} edges={}", g.rightmost_one_based(), g.edge_count())?;
                }
            } else {
                writeln!(out, "{}", serde_json::to_string(&all)?)?;
            }
        }
        Command::VerifyLemma { k, variant, out: path } => {
            let variants: &[LemmaVariant] = match variant {
                VariantArg::AsPrinted => &[LemmaVariant::AsPrinted],
                VariantArg::Shifted => &[LemmaVariant::Shifted],
                VariantArg::Both => &[LemmaVariant::Shifted, LemmaVariant::AsPrinted],
            };
            let reports = variants.iter().map(|v| certify::verify_lemma(*k, *v)).collect::<Result<Vec<_>>>()?;
            let mut csv = String::new();
            for (i, r) in reports.iter().enumerate() {
                let body = r.to_csv();
                csv.push_str(if i == 0 { &body } else { body.split_once('\n').map_or("", |x| x.1) });
            }
            if cfg.format == Some(Format::Csv) && path.is_none() {
                out.write_all(csv.as_bytes())?;
            } else {
                if let Some(p) = path {
                    fs::write(p, &csv)?;
                }
                for r in &reports {
                    writeln!(out, "{r}")?;
                    for c in r.failures() {
                        writeln!(out, "  FAIL t={} {}", c.t, c.name)?;
                    }
                }
            }
        }
        Command::EquidistantReport { from, to, out: path } => {
            let rows = certify::equidistant_report(*from, *to)?;
            let csv = certify::equidistant_csv(&rows);
            write_or_print(path.as_ref(), &csv, out)?;
            if path.is_some() {
                let matched = rows.iter().filter(|r| r.matches()).count();
                writeln!(out, "{} rows, {} match the closed form", rows.len(), matched)?;
            }
        }
        Command::BuildMilp { n, horizon, eps, ordering, printed_dynamics, fix_origin, out: path } => {
            let eps = rational::parse(eps)?;
            let options = BlpOptions {
                ordering: *ordering == Toggle::On,
                printed_dynamics: *printed_dynamics,
                fix_origin: *fix_origin,
                ..Default::default()
            };
            let model = milp::build_blp(*n, *horizon, &eps, &options)?;
            milp::emit_lp(&model, path)?;
            let stats = milp::model_stats(&model);
            writeln!(out, "wrote {} and {}", path.display(), milp::sidecar_path(path).display())?;
            writeln!(out, "variables: x={} u={} z={} (binary {})", stats.x, stats.u, stats.z, stats.binaries)?;
            for (family, count) in &stats.by_family {
                writeln!(out, "rows {family:?}: {count}")?;
            }
        }
        Command::SolveF { n, tmax, eps, budget, jobs, out: path } => {
            let eps: Rational = rational::parse(eps)?;
            let mut search = SearchConfig::from_env();
            if let Some(b) = budget {
                search.budget = *b;
            }
            search.jobs = (*jobs).max(1);
            let bounds = solver::f_bounds(*n, *tmax, &eps, &search)?;
            if cfg.format == Some(Format::Json) {
                let json = serde_json::json!({
                    "n": n,
                    "lower": bounds.lower,
                    "upper": bounds.upper,
                    "exact": bounds.exact(),
                    "certificate": bounds.certificate,
                });
                writeln!(out, "{}", serde_json::to_string_pretty(&json)?)?;
            } else {
                for rec in &bounds.log {
                    writeln!(out, "T={} {:?} lp_calls={}", rec.horizon, rec.verdict, rec.stats.lp_calls)?;
                }
                match (bounds.exact(), bounds.upper) {
                    (Some(f), _) => writeln!(out, "f({n}) = {f}")?,
                    (None, Some(u)) => writeln!(out, "{} <= f({n}) <= {u}", bounds.lower)?,
                    (None, None) => writeln!(out, "f({n}) >= {}", bounds.lower)?,
                }
            }
            if let Some(cert) = &bounds.certificate {
                solver::replay_certificate(cert).map_err(HkError::Format)?;
                let path = path.clone().unwrap_or_else(|| PathBuf::from(format!("certificate_n{n}.json")));
                fs::write(&path, cert.to_json() + "\n")?;
                if cfg.format != Some(Format::Json) {
                    writeln!(out, "certificate: {}", path.display())?;
                }
            } else if cfg.format != Some(Format::Json) {
                writeln!(out, "lower bound witnessed by {}", bounds.lower_witness)?;
            }
        }
    }
    Ok(())
}
