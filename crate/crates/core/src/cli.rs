//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for invalid input (including usage errors),
//! 2 when a numerical procedure fails (truncation budget, accuracy target,
//! too few records to fit).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::bench::{self, CbcParams, RuleVariant, TestFamily, TestFunction};
use crate::cbc::cbc_construct;
use crate::error::{Error, Result};
use crate::kernels::{Family, SpaceSpec, TruncationPolicy};
use crate::points::{fmt_sig17, lattice_points, symmetrize, tent_transform, LatticeRule, WeightedPointSet};
use crate::wce::{self, WceResult};

#[derive(Debug, Parser)]
#[command(name = "latticeqmc", version, about = "Rank-1 lattice rules with tent transformation and symmetrization")]
pub struct Cli {
    /// Worker threads for data-parallel kernels (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Construct a generating vector component by component.
    Cbc(CbcArgs),
    /// Write the nodes of a lattice rule variant as a points file.
    Points(PointsArgs),
    /// Squared worst-case error of a lattice rule or point set.
    Wce(WceArgs),
    /// Integrate a test function with a lattice rule variant.
    Integrate(IntegrateArgs),
    /// Convergence study over N = 2^nmin .. 2^nmax with CBC vectors.
    Converge(ConvergeArgs),
    /// Print the CBC error-bound constant C.
    Bound(BoundArgs),
}

#[derive(Debug, Args)]
pub struct CbcArgs {
    #[arg(long = "n")]
    pub n: u64,
    #[arg(long)]
    pub s: usize,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Weights: a constant "c", "1/j^p", or a comma-separated list.
    #[arg(long, default_value = "1")]
    pub gamma: String,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PointsArgs {
    #[arg(long)]
    pub vector_file: PathBuf,
    #[arg(long, default_value = "plain")]
    pub variant: String,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct WceArgs {
    /// korobov | cosine-tent | korcos-sym | cosine-sym | double-sum
    #[arg(long)]
    pub space: String,
    #[arg(long)]
    pub vector_file: Option<PathBuf>,
    /// Points file (double-sum only).
    #[arg(long)]
    pub points_file: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value = "1")]
    pub gamma: String,
    /// Dimension, needed when it cannot be taken from a vector file or a weight list.
    #[arg(long)]
    pub s: Option<usize>,
    /// Kernel for double-sum: sobolev | korobov | cosine | korcos.
    #[arg(long)]
    pub kernel: Option<String>,
    /// Node set for double-sum with a vector file: plain | tent | sym.
    #[arg(long, default_value = "plain")]
    pub variant: String,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 10_000_000)]
    pub max_terms: u64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct IntegrateArgs {
    #[arg(long)]
    pub vector_file: PathBuf,
    #[arg(long, default_value = "plain")]
    pub variant: String,
    /// Test function family: g | h.
    #[arg(long)]
    pub family: String,
    #[arg(long)]
    pub w: f64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    #[arg(long)]
    pub family: String,
    #[arg(long)]
    pub s: usize,
    #[arg(long)]
    pub w: f64,
    #[arg(long, default_value = "plain,tent,sym")]
    pub variants: String,
    #[arg(long, default_value_t = 6)]
    pub nmin: u32,
    #[arg(long, default_value_t = 14)]
    pub nmax: u32,
    /// Smoothness targeted by the CBC search (1, 2 or 3).
    #[arg(long, default_value_t = 1.0)]
    pub cbc_alpha: f64,
    /// CBC weights; defaults to gamma_j = w^j, the product weights of the test functions.
    #[arg(long)]
    pub cbc_gamma: Option<String>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value = "1")]
    pub gamma: String,
    #[arg(long)]
    pub s: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
}

/// Parses a weight specification into `s` product weights.
///
/// Accepted forms: a constant `"c"`, `"1/j^p"` for `gamma_j = j^{-p}`, or an
/// explicit comma-separated list whose length fixes the dimension.
pub fn parse_gammas(text: &str, s: Option<usize>) -> Result<Vec<f64>> {
    let text = text.trim();
    if text.contains(',') {
        let list = text
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad weight {t:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(s) = s {
            if s != list.len() {
                return Err(Error::InvalidParameter(format!(
                    "{} weights given for dimension {s}",
                    list.len()
                )));
            }
        }
        return Ok(list);
    }
    let s = s.ok_or_else(|| {
        Error::InvalidParameter(format!("weight form {text:?} needs the dimension (--s or a vector file)"))
    })?;
    if let Some(p) = text.strip_prefix("1/j^") {
        let p: f64 = p.parse().map_err(|_| Error::Parse(format!("bad exponent in {text:?}")))?;
        return Ok((1..=s).map(|j| (j as f64).powf(-p)).collect());
    }
    if text == "1/j" {
        return Ok((1..=s).map(|j| 1.0 / j as f64).collect());
    }
    let c: f64 = text.parse().map_err(|_| Error::Parse(format!("bad weight specification {text:?}")))?;
    Ok(vec![c; s])
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", path.display())))
}

fn read_rule(path: &Path) -> Result<LatticeRule> {
    read_file(path)?.parse()
}

fn emit(out: &mut dyn Write, target: Option<&Path>, text: &str) -> Result<()> {
    match target {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| Error::InvalidParameter(format!("cannot write {}: {e}", p.display()))),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Error::InvalidParameter(format!("cannot write output: {e}"))),
    }
}

fn variant_points(rule: &LatticeRule, variant: RuleVariant) -> WeightedPointSet {
    match variant {
        RuleVariant::Plain => lattice_points(rule),
        RuleVariant::Tent => tent_transform(&lattice_points(rule)),
        RuleVariant::Symmetrized => symmetrize(rule, true),
    }
}

fn wce_line(r: &WceResult) -> String {
    format!("e2={} tail={} method={}\n", fmt_sig17(r.e2), fmt_sig17(r.tail_bound), r.method)
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("--{name} must be positive, got {v}")))
    }
}

fn cmd_cbc(a: &CbcArgs, out: &mut dyn Write) -> Result<()> {
    let gammas = parse_gammas(&a.gamma, Some(a.s))?;
    let res = cbc_construct(a.n, a.s, a.alpha, &gammas)?;
    emit(out, a.output.as_deref(), &res.rule.to_vector_file())
}

fn cmd_points(a: &PointsArgs, out: &mut dyn Write) -> Result<()> {
    let variant: RuleVariant = a.variant.parse()?;
    let rule = read_rule(&a.vector_file)?;
    emit(out, a.output.as_deref(), &variant_points(&rule, variant).to_points_file())
}

fn cmd_wce(a: &WceArgs, out: &mut dyn Write) -> Result<()> {
    let policy = TruncationPolicy::new(a.tol, a.max_terms)?;
    let result = if a.space == "double-sum" {
        let kernel: Family = a
            .kernel
            .as_deref()
            .ok_or_else(|| Error::InvalidParameter("double-sum needs --kernel".into()))?
            .parse()?;
        let ps = match (&a.vector_file, &a.points_file) {
            (Some(v), None) => {
                let rule = read_rule(v)?;
                variant_points(&rule, a.variant.parse()?)
            }
            (None, Some(p)) => {
                let dim = match (a.s, a.gamma.contains(',')) {
                    (Some(s), _) => s,
                    (None, true) => a.gamma.split(',').count(),
                    (None, false) => {
                        return Err(Error::InvalidParameter(
                            "points file input needs --s or an explicit weight list".into(),
                        ))
                    }
                };
                WeightedPointSet::from_points_file(&read_file(p)?, dim)?
            }
            _ => {
                return Err(Error::InvalidParameter(
                    "double-sum needs exactly one of --vector-file and --points-file".into(),
                ))
            }
        };
        let gammas = parse_gammas(&a.gamma, Some(ps.dim()))?;
        let spec = SpaceSpec::new(kernel, a.alpha, gammas)?;
        wce::wce_double_sum(&spec, &ps, &policy)?
    } else {
        if a.points_file.is_some() {
            return Err(Error::InvalidParameter(format!(
                "--points-file is only valid with --space double-sum, not {}",
                a.space
            )));
        }
        let path = a
            .vector_file
            .as_deref()
            .ok_or_else(|| Error::InvalidParameter(format!("--space {} needs --vector-file", a.space)))?;
        let rule = read_rule(path)?;
        let gammas = parse_gammas(&a.gamma, Some(rule.dim()))?;
        match a.space.as_str() {
            "korobov" => wce::wce_korobov_lattice(&rule, a.alpha, &gammas, &policy)?,
            "cosine-tent" => wce::wce_cosine_tent(&rule, a.alpha, &gammas, &policy)?,
            "korcos-sym" => wce::wce_korcos_sym(&rule, a.alpha, &gammas, &policy)?,
            "cosine-sym" => wce::wce_cosine_sym(&rule, a.alpha, &gammas, &policy)?,
            other => return Err(Error::InvalidParameter(format!("unknown space {other:?}"))),
        }
    };
    emit(out, a.output.as_deref(), &wce_line(&result))
}

fn cmd_integrate(a: &IntegrateArgs, out: &mut dyn Write) -> Result<()> {
    let variant: RuleVariant = a.variant.parse()?;
    let family: TestFamily = a.family.parse()?;
    let rule = read_rule(&a.vector_file)?;
    let f = TestFunction::new(family, rule.dim(), a.w)?;
    let est = bench::integrate_counted(&rule, variant, |x| f.eval(x));
    let line = format!(
        "estimate={} abs_error={} nodes={}\n",
        fmt_sig17(est.value),
        fmt_sig17((est.value - f.exact_integral()).abs()),
        est.nodes
    );
    emit(out, a.output.as_deref(), &line)
}

fn cmd_converge(a: &ConvergeArgs, out: &mut dyn Write) -> Result<()> {
    let family: TestFamily = a.family.parse()?;
    let f = TestFunction::new(family, a.s, a.w)?;
    let variants = a
        .variants
        .split(',')
        .map(|v| v.trim().parse::<RuleVariant>())
        .collect::<Result<Vec<_>>>()?;
    let n_list = bench::powers_of_two(a.nmin, a.nmax)?;
    let gammas = match &a.cbc_gamma {
        Some(text) => parse_gammas(text, Some(a.s))?,
        None => bench::default_cbc_weights(a.s, a.w),
    };
    let records = bench::converge_study(&f, &variants, &n_list, &CbcParams { alpha: a.cbc_alpha, gammas })?;
    emit(out, a.output.as_deref(), &bench::to_csv(&records))
}

fn cmd_bound(a: &BoundArgs, out: &mut dyn Write) -> Result<()> {
    let gammas = parse_gammas(&a.gamma, a.s)?;
    let c = wce::cbc_bound_constant(a.alpha, &gammas, a.tau)?;
    emit(out, None, &format!("C={}\n", fmt_sig17(c)))
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Cbc(a) => cmd_cbc(a, out),
        Command::Points(a) => cmd_points(a, out),
        Command::Wce(a) => cmd_wce(a, out),
        Command::Integrate(a) => cmd_integrate(a, out),
        Command::Converge(a) => {
            check_positive("w", a.w)?;
            cmd_converge(a, out)
        }
        Command::Bound(a) => cmd_bound(a, out),
    }
}

/// Runs the command line `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    1
                }
            };
        }
    };
    if cli.threads == Some(0) {
        let _ = writeln!(err, "error: --threads must be at least 1");
        return 1;
    }
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start thread pool: {e}");
            return 2;
        }
    };
    let mut buf: Vec<u8> = Vec::new();
    let result = pool.install(|| execute(&cli, &mut buf));
    if out.write_all(&buf).is_err() {
        let _ = writeln!(err, "error: cannot write output");
        return 1;
    }
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_computation() {
                2
            } else {
                1
            }
        }
    }
}
