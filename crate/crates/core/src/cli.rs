//! Command-line front end.
//!
//! Exit codes: 0 success, 2 usage or input error, 3 violated invariant.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;

use crate::cache::ClassCache;
use crate::error::{Error, Result};
use crate::field::PrimeModulus;
use crate::json::{self, ClassSetJson, ComponentJson, HeckeJson, PhiJson, SplitJson};
use crate::lattice::SmithForm;
use crate::modpoly::ModPolyDb;
use crate::pipeline::{validate_ell, Pipeline, DEFAULT_ELLS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "ssgraph", version, about = "Supersingular isogeny graphs and component groups of J0(p)")]
pub struct Cli {
    /// Directory of modular polynomial files phi_<l>.txt
    #[arg(long, global = true, env = "SSGRAPH_MODPOLY_DIR", value_name = "DIR")]
    pub modpoly_dir: Option<PathBuf>,

    /// Cache enumerated class sets here
    #[arg(long, global = true, value_name = "DIR")]
    pub cache_dir: Option<PathBuf>,

    /// Print JSON instead of text
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the supersingular classes and their weights
    Enumerate(LevelArgs),
    /// Print the Hecke operator T_l on the class basis
    Hecke {
        #[command(flatten)]
        level: LevelArgs,
        #[arg(short = 'l', value_name = "L")]
        ell: u64,
    },
    /// Rational eigenforms on the degree-zero lattice
    Eigenforms(SplitArgs),
    /// Structure of the component group Φ
    Phi(LevelArgs),
    /// Ψ, coker(Φ → Ψ) and the modular degree for each rational eigenform
    Component(SplitArgs),
    /// Check every invariant over a range of primes
    Sweep {
        #[arg(long, default_value_t = 5)]
        pmin: u64,
        #[arg(long)]
        pmax: u64,
        /// Hecke operators to build and check
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_ELLS)]
        ells: Vec<u64>,
    },
}

#[derive(Debug, Args)]
pub struct LevelArgs {
    #[arg(short = 'p', value_name = "P")]
    pub p: u64,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[command(flatten)]
    pub level: LevelArgs,
    /// Hecke operators used to split the lattice
    #[arg(long, value_delimiter = ',', default_values_t = [2u64])]
    pub ells: Vec<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Json,
}

/// Validated settings shared by every subcommand.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub modpoly_dir: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    pub format: OutputFormat,
}

impl RunConfig {
    pub fn pipeline(&self) -> Pipeline {
        let db = match &self.modpoly_dir {
            Some(dir) => ModPolyDb::with_dir(dir),
            None => ModPolyDb::embedded(),
        };
        Pipeline::new(db, self.cache_dir.as_ref().map(ClassCache::new))
    }
}

/// Run the CLI on `args` (including the program name); returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let cfg = RunConfig {
        modpoly_dir: cli.modpoly_dir,
        cache_dir: cli.cache_dir,
        format: if cli.json { OutputFormat::Json } else { OutputFormat::Text },
    };
    match execute(&cfg, &cli.command) {
        Ok(Outcome { stdout, failures }) => {
            let _ = out.write_all(stdout.as_bytes());
            if failures.is_empty() {
                EXIT_OK
            } else {
                for (p, check, detail) in failures {
                    let _ = writeln!(err, "FAILED p = {p}: {check}: {detail}");
                }
                EXIT_INVARIANT
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_mathematical() {
        EXIT_INVARIANT
    } else {
        EXIT_USAGE
    }
}

struct Outcome {
    stdout: String,
    failures: Vec<(u64, &'static str, String)>,
}

impl From<String> for Outcome {
    fn from(stdout: String) -> Self {
        Outcome {
            stdout,
            failures: Vec::new(),
        }
    }
}

fn execute(cfg: &RunConfig, cmd: &Command) -> Result<Outcome> {
    let pipe = cfg.pipeline();
    let json = cfg.format == OutputFormat::Json;
    let mut s = String::new();
    match cmd {
        Command::Enumerate(level) => {
            let cs = pipe.classes(PrimeModulus::new(level.p)?)?;
            if json {
                s = json::to_string(&ClassSetJson::from(&cs)) + "\n";
            } else {
                let _ = writeln!(s, "p = {}, GF(p²) = GF(p)[t]/(t² − {})", cs.p(), cs.d());
                for c in cs.classes() {
                    let _ = writeln!(s, "j = {:<12} w_C = {}", c.j.to_string(), c.weight);
                }
                let _ = writeln!(s, "{} classes, Σ 1/w_C = {}", cs.len(), cs.mass());
            }
        }
        Command::Hecke { level, ell } => {
            let p = PrimeModulus::new(level.p)?;
            validate_ell(*ell, p)?;
            let cs = pipe.classes(p)?;
            let m = pipe.hecke(&cs, *ell)?;
            if json {
                s = json::to_string(&HeckeJson::new(&cs, &m)) + "\n";
            } else {
                let _ = writeln!(s, "T_{ell} at p = {p}");
                s.push_str(&m.to_string());
            }
        }
        Command::Eigenforms(args) => {
            let a = pipe.analyze(level_with_ells(args)?, &args.ells)?;
            if json {
                s = json::to_string(&SplitJson::new(&a.classes, &a.split)) + "\n";
            } else {
                let _ = writeln!(s, "p = {}, rank X = {}", a.classes.p(), a.classes.rank_x());
                for f in &a.split.eigenforms {
                    let _ = writeln!(s, "λ_C = {}  {}", tuple(&f.lambda), eigenvalues_text(&f.eigenvalues));
                }
                let _ = writeln!(s, "unsplit: {:?}", a.split.residual_dimensions);
            }
        }
        Command::Phi(level) => {
            let cs = pipe.classes(PrimeModulus::new(level.p)?)?;
            let phi = crate::formulas::phi_group(&cs);
            if json {
                s = json::to_string(&PhiJson::new(&cs, &phi)) + "\n";
            } else {
                let _ = writeln!(s, "Φ ≅ {}  (order {})", group_text(&phi), phi.torsion_order());
            }
        }
        Command::Component(args) => {
            let a = pipe.analyze(level_with_ells(args)?, &args.ells)?;
            let reports: Vec<ComponentJson> = a.reports.iter().map(ComponentJson::from).collect();
            if json {
                s = json::to_string(&reports) + "\n";
                if !a.split.residual_dimensions.is_empty() {
                    let unsplit = serde_json::json!({ "unsplit": a.split.residual_dimensions });
                    s += &(unsplit.to_string() + "\n");
                }
            } else {
                let w = a.classes.weights();
                let _ = writeln!(s, "p = {}, Φ ≅ {}", a.classes.p(), group_text(&a.phi));
                let _ = writeln!(s, "w_C = {}", tuple(&w));
                for r in &a.reports {
                    let _ = writeln!(s, "{}", eigenvalues_text(&r.eigenvalues));
                    let _ = writeln!(s, "  λ_C = {}", tuple(&r.lambda));
                    let _ = writeln!(s, "  card Ψ = {}", r.psi_order);
                    let _ = writeln!(s, "  coker(Φ → Ψ) = {}", r.coker_order);
                    let _ = writeln!(s, "  n = {}  (n·card Ψ = Σ λ_C² w_C = {})", r.modular_degree, r.self_pairing);
                }
                if a.reports.is_empty() {
                    let _ = writeln!(s, "no rational eigenforms");
                }
                if !a.split.residual_dimensions.is_empty() {
                    let _ = writeln!(s, "unsplit: {:?}", a.split.residual_dimensions);
                }
            }
        }
        Command::Sweep { pmin, pmax, ells } => {
            let summary = pipe.sweep(*pmin, *pmax, ells)?;
            let totals = summary.totals();
            if json {
                let checks: serde_json::Map<String, serde_json::Value> = totals
                    .iter()
                    .map(|(k, (ok, n))| (k.to_string(), serde_json::json!({ "passed": ok, "total": n })))
                    .collect();
                let failures: Vec<_> = summary
                    .failures()
                    .into_iter()
                    .map(|(p, check, detail)| serde_json::json!({ "p": p, "check": check, "detail": detail }))
                    .collect();
                let primes: Vec<u64> = summary.levels.iter().map(|l| l.p).collect();
                s = serde_json::json!({ "primes": primes, "checks": checks, "failures": failures }).to_string() + "\n";
            } else {
                let _ = writeln!(s, "{} primes in [{}, {}]", summary.levels.len(), pmin.max(&5), pmax);
                for (check, (ok, n)) in &totals {
                    let _ = writeln!(s, "{check:<24} {ok}/{n}");
                }
            }
            return Ok(Outcome {
                stdout: s,
                failures: summary.failures(),
            });
        }
    }
    Ok(s.into())
}

fn level_with_ells(args: &SplitArgs) -> Result<PrimeModulus> {
    let p = PrimeModulus::new(args.level.p)?;
    if args.ells.is_empty() {
        return Err(Error::Usage("at least one ℓ is required".into()));
    }
    for &l in &args.ells {
        validate_ell(l, p)?;
    }
    Ok(p)
}

fn tuple<T: ToString>(v: &[T]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(", "))
}

fn eigenvalues_text(e: &std::collections::BTreeMap<u64, i64>) -> String {
    let parts: Vec<String> = e.iter().map(|(l, a)| format!("a_{l} = {a}")).collect();
    parts.join(", ")
}

fn group_text(phi: &SmithForm) -> String {
    let parts: Vec<String> = phi
        .nontrivial()
        .iter()
        .map(|d: &BigInt| format!("Z/{d}"))
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" × ")
    }
}
