//! Command-line front end: rule generation, integration, Bernstein-Szegő
//! roots and verification suites.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use symcubature::bernstein_szego::{BsParams, CONJUGATE_TOL};
use symcubature::json::f17;
use symcubature::verify::{self, ReferenceKind};
use symcubature::{build_rule, CubatureRule, IntegrandSpec, OracleConfig, OrthoFamily};

#[derive(Debug, Parser)]
#[command(name = "symcub", version, about = "Gaussian cubature for symmetric functions")]
pub struct Cli {
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Machine-readable output on stdout.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rule files.
    Rule {
        #[command(subcommand)]
        action: RuleAction,
    },
    /// Apply a rule file to an integrand spec.
    Integrate {
        #[arg(long)]
        rule: PathBuf,
        #[arg(long)]
        spec: PathBuf,
    },
    /// Bernstein-Szegő roots with their brackets.
    Roots {
        #[command(flatten)]
        family: BsArgs,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        degree: u64,
    },
    /// Orthogonality and exactness suites for a rule file or the default sweep.
    Verify {
        #[arg(long)]
        rule: Option<PathBuf>,
        #[arg(long, default_value_t = 200)]
        points_per_axis: usize,
        #[arg(long, value_enum, default_value_t = RefKind::Tensor)]
        reference: RefKind,
        #[arg(long, default_value_t = 200_000)]
        mc_samples: usize,
        /// Write the JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum RuleAction {
    /// Build a rule and write it as JSON.
    Gen {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        /// Output path; stdout when absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyName {
    Hermite,
    Laguerre,
    Jacobi,
    Chebyshev1,
    Chebyshev2,
    Chebyshev3,
    Chebyshev4,
    Bs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BsFamilyName {
    Chebyshev1,
    Chebyshev2,
    Chebyshev3,
    Chebyshev4,
    Bs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RefKind {
    Tensor,
    Adaptive,
    MonteCarlo,
}

impl From<RefKind> for ReferenceKind {
    fn from(k: RefKind) -> Self {
        match k {
            RefKind::Tensor => ReferenceKind::TensorGaussLegendre,
            RefKind::Adaptive => ReferenceKind::AdaptiveUnivariate,
            RefKind::MonteCarlo => ReferenceKind::MonteCarlo,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct PoleArgs {
    /// `ε+ ε-`, each 0 or 1.
    #[arg(long, num_args = 2, value_names = ["E+", "E-"])]
    pub eps: Option<Vec<u8>>,
    /// Poles as `re`, `re+imi` or `re-imi`.
    #[arg(long, num_args = 1..)]
    pub poles: Vec<String>,
    /// Add missing complex conjugates.
    #[arg(long)]
    pub auto_conjugate: bool,
}

#[derive(Debug, Clone, Args)]
pub struct FamilyArgs {
    #[arg(long, value_enum)]
    pub family: FamilyName,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    #[command(flatten)]
    pub bs: PoleArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BsArgs {
    #[arg(long, value_enum)]
    pub family: BsFamilyName,
    #[command(flatten)]
    pub bs: PoleArgs,
}

/// Rewrites each pole following `--poles` as `--poles=<pole>` so that poles
/// with a leading minus sign are not taken for flags.
pub fn normalize_args<I, T>(args: I) -> Vec<OsString>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let mut out = Vec::new();
    let mut in_poles = false;
    for arg in args {
        let arg: OsString = arg.into();
        let text = arg.to_str();
        if text == Some("--poles") {
            in_poles = true;
            continue;
        }
        if in_poles {
            if let Some(t) = text.filter(|t| !t.starts_with("--") && parse_pole(t).is_ok()) {
                out.push(OsString::from(format!("--poles={t}")));
                continue;
            }
            in_poles = false;
        }
        out.push(arg);
    }
    out
}

impl Cli {
    /// Parses `std::env::args_os` after [`normalize_args`].
    pub fn parse_args() -> Self {
        Cli::parse_from(normalize_args(std::env::args_os()))
    }
}

/// Parses `re`, `imi`, `re+imi` or `re-imi`.
pub fn parse_pole(text: &str) -> Result<Complex64> {
    let s = text.trim();
    let Some(body) = s.strip_suffix('i') else {
        let re: f64 = s.parse().with_context(|| format!("bad pole `{text}`"))?;
        return Ok(Complex64::new(re, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        other => other,
    };
    let re: f64 = re.parse().with_context(|| format!("bad real part in pole `{text}`"))?;
    let im: f64 = im
        .trim_start_matches('+')
        .parse()
        .with_context(|| format!("bad imaginary part in pole `{text}`"))?;
    Ok(Complex64::new(re, im))
}

impl PoleArgs {
    fn poles(&self) -> Result<Vec<Complex64>> {
        let mut poles = self.poles.iter().map(|s| parse_pole(s)).collect::<Result<Vec<_>>>()?;
        if self.auto_conjugate {
            let mut extra = Vec::new();
            for (i, a) in poles.iter().enumerate() {
                if a.im.abs() <= CONJUGATE_TOL {
                    continue;
                }
                let needed = poles.iter().filter(|b| (*b - a).norm() <= CONJUGATE_TOL).count();
                let present = poles.iter().filter(|b| (*b - a.conj()).norm() <= CONJUGATE_TOL).count()
                    + extra.iter().filter(|b: &&Complex64| (*b - a.conj()).norm() <= CONJUGATE_TOL).count();
                let first = poles.iter().position(|b| (b - a).norm() <= CONJUGATE_TOL) == Some(i);
                if first && present < needed {
                    extra.extend(std::iter::repeat_n(a.conj(), needed - present));
                }
            }
            poles.extend(extra);
        }
        Ok(poles)
    }

    fn params(&self, kind: BsFamilyName) -> Result<BsParams> {
        let fixed = match kind {
            BsFamilyName::Chebyshev1 => Some((0, 0)),
            BsFamilyName::Chebyshev2 => Some((1, 1)),
            BsFamilyName::Chebyshev3 => Some((0, 1)),
            BsFamilyName::Chebyshev4 => Some((1, 0)),
            BsFamilyName::Bs => None,
        };
        match fixed {
            Some((ep, em)) => {
                if self.eps.is_some() || !self.poles.is_empty() {
                    bail!("--eps and --poles only apply to --family bs");
                }
                Ok(BsParams::chebyshev(ep, em)?)
            }
            None => {
                let (ep, em) = match self.eps.as_deref() {
                    Some([ep, em]) => (*ep, *em),
                    Some(_) => bail!("--eps takes two values"),
                    None => (0, 0),
                };
                Ok(BsParams::new(ep, em, self.poles()?)?)
            }
        }
    }
}

impl FamilyArgs {
    pub fn family(&self) -> Result<OrthoFamily> {
        let bs_kind = match self.family {
            FamilyName::Hermite | FamilyName::Laguerre | FamilyName::Jacobi => None,
            FamilyName::Chebyshev1 => Some(BsFamilyName::Chebyshev1),
            FamilyName::Chebyshev2 => Some(BsFamilyName::Chebyshev2),
            FamilyName::Chebyshev3 => Some(BsFamilyName::Chebyshev3),
            FamilyName::Chebyshev4 => Some(BsFamilyName::Chebyshev4),
            FamilyName::Bs => Some(BsFamilyName::Bs),
        };
        if let Some(kind) = bs_kind {
            if self.alpha.is_some() || self.beta.is_some() {
                bail!("--alpha and --beta do not apply to {:?}", self.family);
            }
            return Ok(OrthoFamily::bernstein_szego(self.bs.params(kind)?));
        }
        if self.bs.eps.is_some() || !self.bs.poles.is_empty() || self.bs.auto_conjugate {
            bail!("--eps and --poles only apply to --family bs");
        }
        Ok(match self.family {
            FamilyName::Hermite => {
                if self.alpha.is_some() || self.beta.is_some() {
                    bail!("hermite takes no parameters");
                }
                OrthoFamily::hermite()
            }
            FamilyName::Laguerre => {
                if self.beta.is_some() {
                    bail!("laguerre takes only --alpha");
                }
                OrthoFamily::laguerre(self.alpha.unwrap_or(0.0))?
            }
            _ => OrthoFamily::jacobi(self.alpha.unwrap_or(0.0), self.beta.unwrap_or(0.0))?,
        })
    }
}

#[derive(Serialize)]
struct GenSummary<'a> {
    nodes: usize,
    output: Option<&'a Path>,
    #[serde(with = "f17")]
    seconds: f64,
}

#[derive(Serialize)]
struct IntegrateSummary {
    #[serde(with = "f17")]
    value: f64,
}

#[derive(Serialize)]
struct RootRow {
    k: usize,
    #[serde(with = "f17")]
    xi: f64,
    #[serde(with = "f17")]
    x: f64,
    #[serde(with = "f17")]
    lower: f64,
    #[serde(with = "f17")]
    upper: f64,
    #[serde(with = "f17")]
    residual: f64,
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: &Cli) -> Result<i32> {
    if cli.threads > 0 {
        // A second call in the same process keeps the existing pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    }
    let mut out = std::io::stdout().lock();
    match &cli.command {
        Command::Rule {
            action: RuleAction::Gen { family, m, n, output },
        } => {
            let family = family.family()?;
            let start = Instant::now();
            let rule = build_rule(&family, *m, *n)?;
            let seconds = start.elapsed().as_secs_f64();
            let text = rule.to_json()? + "\n";
            match output {
                Some(path) => fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?,
                None => out.write_all(text.as_bytes())?,
            }
            let summary = GenSummary {
                nodes: rule.len(),
                output: output.as_deref(),
                seconds,
            };
            if cli.json && output.is_some() {
                writeln!(out, "{}", serde_json::to_string(&summary)?)?;
            } else {
                eprintln!("{} nodes built in {:.3} ms", summary.nodes, 1e3 * seconds);
            }
            Ok(0)
        }
        Command::Integrate { rule, spec } => {
            let rule = read_rule(rule)?;
            let text = fs::read_to_string(spec).with_context(|| format!("reading {}", spec.display()))?;
            let spec = IntegrandSpec::from_json(&text)?;
            let value = spec.integrate(&rule)?;
            if cli.json {
                writeln!(out, "{}", serde_json::to_string(&IntegrateSummary { value })?)?;
            } else {
                writeln!(out, "{value:.16e}")?;
            }
            Ok(0)
        }
        Command::Roots { family, degree } => {
            let params = family.bs.params(family.family)?;
            let degree = *degree as usize;
            let roots = params.roots(degree)?;
            let rows: Vec<RootRow> = roots
                .xi
                .iter()
                .enumerate()
                .map(|(k, &xi)| {
                    let (lower, upper) = params.root_bracket(degree, k);
                    RootRow {
                        k,
                        xi,
                        x: xi.cos(),
                        lower,
                        upper,
                        residual: params.root_equation(degree, k, xi).abs(),
                    }
                })
                .collect();
            if cli.json {
                writeln!(out, "{}", serde_json::to_string_pretty(&rows)?)?;
            } else {
                writeln!(
                    out,
                    "{:>3}  {:>23}  {:>23}  {:>23}  {:>23}  {:>9}",
                    "k", "xi", "cos(xi)", "lower", "upper", "residual"
                )?;
                for r in &rows {
                    writeln!(
                        out,
                        "{:>3}  {:>23.16e}  {:>23.16e}  {:>23.16e}  {:>23.16e}  {:>9.2e}",
                        r.k, r.xi, r.x, r.lower, r.upper, r.residual
                    )?;
                }
            }
            Ok(0)
        }
        Command::Verify {
            rule,
            points_per_axis,
            reference,
            mc_samples,
            report,
        } => {
            let cfg = OracleConfig {
                points_per_axis: *points_per_axis,
                reference_kind: (*reference).into(),
                mc_samples: *mc_samples,
                seed: cli.seed,
            };
            let result = match rule {
                Some(path) => {
                    let rule = read_rule(path)?;
                    let mut result = verify::VerificationReport::new(Some(cfg.clone()));
                    result.merge(verify::run_rule_suites(&rule, &cfg));
                    result
                }
                None => verify::run_sweep(&cfg),
            };
            let text = result.to_json() + "\n";
            if let Some(path) = report {
                fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
            }
            if cli.json {
                out.write_all(text.as_bytes())?;
            } else {
                for check in &result.checks {
                    let error = check.max_abs_error.map_or("-".to_string(), |e| format!("{e:.3e}"));
                    writeln!(
                        out,
                        "{:<10} {:<60} error {:>10}  tol {:.0e}",
                        format!("{:?}", check.status).to_uppercase(),
                        check.name,
                        error,
                        check.tolerance
                    )?;
                }
                writeln!(out, "overall: {:?}", result.overall)?;
            }
            Ok(result.exit_code())
        }
    }
}

/// Reads and validates a rule file.
pub fn read_rule(path: &Path) -> Result<CubatureRule> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    CubatureRule::from_json(&text).with_context(|| format!("loading rule {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pole_syntax() {
        assert_eq!(parse_pole("0.5").unwrap(), Complex64::new(0.5, 0.0));
        assert_eq!(parse_pole("-0.5").unwrap(), Complex64::new(-0.5, 0.0));
        assert_eq!(parse_pole("0.3+0.4i").unwrap(), Complex64::new(0.3, 0.4));
        assert_eq!(parse_pole("0.3-0.4i").unwrap(), Complex64::new(0.3, -0.4));
        assert_eq!(parse_pole("-0.3-0.4i").unwrap(), Complex64::new(-0.3, -0.4));
        assert_eq!(parse_pole("0.4i").unwrap(), Complex64::new(0.0, 0.4));
        assert_eq!(parse_pole("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_pole("1e-1+2.5e-1i").unwrap(), Complex64::new(0.1, 0.25));
        assert!(parse_pole("abc").is_err());
        assert!(parse_pole("0.3+xi").is_err());
    }

    #[test]
    fn auto_conjugate() {
        let args = PoleArgs {
            eps: None,
            poles: vec!["0.3+0.4i".into(), "0.5".into()],
            auto_conjugate: true,
        };
        let poles = args.poles().unwrap();
        assert_eq!(poles.len(), 3);
        assert_eq!(poles[2], Complex64::new(0.3, -0.4));
        let args = PoleArgs {
            eps: None,
            poles: vec!["0.3+0.4i".into(), "0.3-0.4i".into()],
            auto_conjugate: true,
        };
        assert_eq!(args.poles().unwrap().len(), 2);
    }

    #[test]
    fn parses_commands() {
        let cli = Cli::try_parse_from(normalize_args([
            "symcub", "rule", "gen", "--family", "bs", "--eps", "0", "0", "--poles", "0.3+0.4i", "-0.3-0.4i",
            "--m", "3", "--n", "2",
        ]))
        .unwrap();
        let Command::Rule {
            action: RuleAction::Gen { family, m, n, .. },
        } = cli.command
        else {
            panic!("wrong command");
        };
        assert_eq!((m, n), (3, 2));
        assert_eq!(family.bs.poles, vec!["0.3+0.4i", "-0.3-0.4i"]);
        assert!(Cli::try_parse_from(["symcub", "roots", "--family", "chebyshev1", "--degree", "0"]).is_err());
    }
}
