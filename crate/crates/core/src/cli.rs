//! The `rootcert` command line.
//!
//! Exit codes: 0 when every requested check passes, 1 when a check reports a
//! violation or a certificate is refused, 2 on usage or parameter errors.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::rational::to_fraction_string;
use crate::root_maps::{map_series, weights_for, MapKind, Method, RootParameter, SeriesRoute};
use crate::series::DEFAULT_ORDER;
use crate::theorem::{certify, PositivityCertificate, TheoremError};
use crate::verification::{
    binomial_root_series, check_map_contraction, check_prefix_agreement, check_residual_bounds,
    estimate_convergence_order, iterate_series, write_csv, BoundReport, DiskSamplingPlan,
    PrefixAgreement,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "rootcert",
    version,
    about = "Positivity certificates and residual-bound checks for pth-root iterations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Newton,
    Halley,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Newton => Method::Newton,
            MethodArg::Halley => Method::Halley,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MapArg {
    F,
    G,
}

impl From<MapArg> for MapKind {
    fn from(m: MapArg) -> Self {
        match m {
            MapArg::F => MapKind::F,
            MapArg::G => MapKind::G,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SeriesKind {
    /// Taylor series of f_p
    F,
    /// Taylor series of g_p
    G,
    /// (1 - z)^{1/p}
    Binomial,
    /// The Newton iterate U_k
    Newton,
    /// The Halley iterate V_k
    Halley,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RouteArg {
    ClosedForm,
    Weights,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct PlanArgs {
    #[arg(long, default_value_t = 64)]
    pub radii: usize,
    #[arg(long, default_value_t = 128)]
    pub angles: usize,
    #[arg(long = "random-count", default_value_t = 4096)]
    pub random_count: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-3)]
    pub exclusion: f64,
}

impl PlanArgs {
    fn plan(&self) -> DiskSamplingPlan {
        DiskSamplingPlan {
            radii_count: self.radii,
            angle_count: self.angles,
            random_count: self.random_count,
            seed: self.seed,
            exclusion_radius: self.exclusion,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact positivity certificate for the Newton or Halley weights.
    Certify {
        #[arg(long, value_enum)]
        method: MethodArg,
        /// Integer or "num/den".
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        #[arg(long, default_value_t = DEFAULT_ORDER)]
        order: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Check |f_p(z)| < |z|^2 or |g_p(z)| < |z|^3 on the sampled disk.
    ContractCheck {
        #[arg(long, value_enum)]
        map: MapArg,
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        #[command(flatten)]
        plan: PlanArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Check the residual bounds |N_k| < |z|^{2^k} or |H_k| < |z|^{3^k}.
    ResidualCheck {
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        #[arg(long = "k-max", default_value_t = 3)]
        k_max: usize,
        #[command(flatten)]
        plan: PlanArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Exact Taylor coefficients.
    Series {
        #[arg(long, value_enum)]
        of: SeriesKind,
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        #[arg(long, default_value_t = DEFAULT_ORDER)]
        order: usize,
        /// Iteration count for newton/halley.
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Expansion route for f/g.
        #[arg(long, value_enum, default_value = "weights")]
        route: RouteArg,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Exact agreement of the iterate's Taylor prefix with (1 - z)^{1/p}.
    PrefixCheck {
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = DEFAULT_ORDER)]
        order: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Ratios log|r_{k+1}| / log|r_k| of consecutive residuals at one point.
    OrderEstimate {
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        /// "re" or "re,im".
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long = "k-max", default_value_t = 3)]
        k_max: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Certificates, contraction, residual and prefix checks for one p.
    VerifyAll {
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        #[arg(long, default_value_t = DEFAULT_ORDER)]
        order: usize,
        #[arg(long = "k-max", default_value_t = 3)]
        k_max: usize,
        #[command(flatten)]
        plan: PlanArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
}

/// A failure that maps to exit code 2.
#[derive(Debug)]
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

struct Outcome {
    text: String,
    passed: bool,
}

fn parse_p(text: &str) -> Result<RootParameter, Usage> {
    RootParameter::parse(text).map_err(|e| Usage(e.to_string()))
}

fn parse_integer_p(text: &str) -> Result<RootParameter, Usage> {
    let p = parse_p(text)?;
    p.require_integer()?;
    Ok(p)
}

fn parse_point(text: &str) -> Result<Complex64, Usage> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let num = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| Usage(format!("invalid z component {s:?}")))
    };
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(Usage(format!(
            "z must be \"re\" or \"re,im\", got {text:?}"
        ))),
    }
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn csv_reports(reports: &[BoundReport]) -> String {
    let mut buf = Vec::new();
    write_csv(reports, &mut buf).expect("in-memory csv");
    String::from_utf8(buf).expect("csv is utf-8")
}

fn weights(p: &RootParameter, method: Method) -> crate::theorem::WeightSequence {
    weights_for(p, method.residual_map())
}

fn run_certify(method: Method, p: &str, order: usize, format: Format) -> Result<Outcome, Usage> {
    let p = parse_p(p)?;
    let a = weights(&p, method);
    match certify(&a, order) {
        Ok(cert) => {
            let text = match format {
                Format::Json => pretty(&cert),
                Format::Csv => {
                    let mut s = String::from("n,b,c\n");
                    for (n, (b, c)) in cert.b.iter().zip(&cert.c).enumerate() {
                        let _ =
                            writeln!(s, "{n},{},{}", to_fraction_string(b), to_fraction_string(c));
                    }
                    s
                }
            };
            Ok(Outcome {
                passed: cert.all_passed(),
                text,
            })
        }
        Err(e @ TheoremError::OrderBelowEll { .. }) => Err(Usage(e.to_string())),
        Err(e) => Ok(Outcome {
            text: pretty(&json!({ "label": a.label(), "refused": e.to_string() })),
            passed: false,
        }),
    }
}

fn run_series(
    of: SeriesKind,
    p: &str,
    order: usize,
    k: usize,
    route: RouteArg,
    format: Format,
) -> Result<Outcome, Usage> {
    let route = match route {
        RouteArg::ClosedForm => SeriesRoute::ClosedForm,
        RouteArg::Weights => SeriesRoute::Weights,
    };
    let series = match of {
        SeriesKind::F => map_series(&parse_p(p)?, MapKind::F, order, route)?,
        SeriesKind::G => map_series(&parse_p(p)?, MapKind::G, order, route)?,
        SeriesKind::Binomial => binomial_root_series(&parse_integer_p(p)?, order)?,
        SeriesKind::Newton => iterate_series(&parse_integer_p(p)?, Method::Newton, k, order)?,
        SeriesKind::Halley => iterate_series(&parse_integer_p(p)?, Method::Halley, k, order)?,
    };
    let coeffs: Vec<String> = series.coeffs().iter().map(to_fraction_string).collect();
    let text = match format {
        Format::Json => pretty(
            &json!({ "of": format!("{of:?}").to_lowercase(), "p": p, "order": order, "k": k, "coefficients": coeffs }),
        ),
        Format::Csv => {
            let mut s = String::from("n,coefficient\n");
            for (n, c) in coeffs.iter().enumerate() {
                let _ = writeln!(s, "{n},{c}");
            }
            s
        }
    };
    Ok(Outcome { text, passed: true })
}

fn prefix_csv(results: &[PrefixAgreement]) -> String {
    let mut s = String::from("method,p,k,order,prefix_len,required,holds\n");
    for r in results {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.method,
            r.p,
            r.k,
            r.order,
            r.prefix_len,
            r.required,
            r.holds()
        );
    }
    s
}

#[derive(Serialize)]
struct CertificateSummary {
    label: String,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    ell: Option<usize>,
    order: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    refused: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    checks: Option<std::collections::BTreeMap<String, bool>>,
}

impl CertificateSummary {
    fn from_result(
        label: &str,
        order: usize,
        result: Result<PositivityCertificate, TheoremError>,
    ) -> Self {
        match result {
            Ok(c) => Self {
                label: c.label.clone(),
                passed: c.all_passed(),
                ell: Some(c.ell),
                order,
                refused: None,
                checks: Some(c.checks),
            },
            Err(e) => Self {
                label: label.to_string(),
                passed: false,
                ell: None,
                order,
                refused: Some(e.to_string()),
                checks: None,
            },
        }
    }
}

fn run_verify_all(
    p: &str,
    order: usize,
    k_max: usize,
    plan: &DiskSamplingPlan,
    format: Format,
) -> Result<Outcome, Usage> {
    if format == Format::Csv {
        return Err(Usage("verify-all only writes json".into()));
    }
    let p = parse_integer_p(p)?;
    if k_max == 0 {
        return Err(Usage("k-max must be at least 1".into()));
    }
    plan.validate()?;
    let methods = [Method::Newton, Method::Halley];

    let certificates: Vec<CertificateSummary> = methods
        .iter()
        .map(|&m| {
            let a = weights(&p, m);
            CertificateSummary::from_result(a.label(), order, certify(&a, order))
        })
        .collect();
    let contraction = [MapKind::F, MapKind::G]
        .iter()
        .map(|&w| check_map_contraction(&p, w, plan))
        .collect::<Result<Vec<_>, _>>()?;
    let mut residual = Vec::new();
    for m in methods {
        residual.extend(check_residual_bounds(&p, m, k_max, plan)?);
    }
    let prefix_order = order.max(3usize.pow(k_max as u32));
    let prefix = methods
        .iter()
        .map(|&m| check_prefix_agreement(&p, m, k_max, prefix_order))
        .collect::<Result<Vec<_>, _>>()?;

    let passed = certificates.iter().all(|c| c.passed)
        && contraction.iter().all(BoundReport::holds)
        && residual.iter().all(BoundReport::holds)
        && prefix.iter().all(PrefixAgreement::holds);
    let text = pretty(&json!({
        "p": p.to_string(),
        "seed": plan.seed,
        "passed": passed,
        "certificates": certificates,
        "contraction": contraction,
        "residual": residual,
        "prefix": prefix,
    }));
    Ok(Outcome { text, passed })
}

fn execute(command: Command) -> Result<(Outcome, Option<PathBuf>), Usage> {
    let (outcome, output) = match command {
        Command::Certify {
            method,
            p,
            order,
            out,
        } => (
            run_certify(method.into(), &p, order, out.format)?,
            out.output,
        ),
        Command::ContractCheck { map, p, plan, out } => {
            let report = check_map_contraction(&parse_p(&p)?, map.into(), &plan.plan())?;
            let text = match out.format {
                Format::Json => pretty(&report),
                Format::Csv => csv_reports(std::slice::from_ref(&report)),
            };
            (
                Outcome {
                    passed: report.holds(),
                    text,
                },
                out.output,
            )
        }
        Command::ResidualCheck {
            method,
            p,
            k_max,
            plan,
            out,
        } => {
            let p = parse_integer_p(&p)?;
            let plan = plan.plan();
            let reports = check_residual_bounds(&p, method.into(), k_max, &plan)?;
            let passed = reports.iter().all(BoundReport::holds);
            let text = match out.format {
                Format::Json => pretty(&json!({
                    "p": p.to_string(),
                    "method": Method::from(method),
                    "seed": plan.seed,
                    "passed": passed,
                    "reports": reports,
                })),
                Format::Csv => csv_reports(&reports),
            };
            (Outcome { passed, text }, out.output)
        }
        Command::Series {
            of,
            p,
            order,
            k,
            route,
            out,
        } => (run_series(of, &p, order, k, route, out.format)?, out.output),
        Command::PrefixCheck {
            method,
            p,
            k,
            order,
            out,
        } => {
            let r = check_prefix_agreement(&parse_integer_p(&p)?, method.into(), k, order)?;
            let text = match out.format {
                Format::Json => pretty(&r),
                Format::Csv => prefix_csv(std::slice::from_ref(&r)),
            };
            (
                Outcome {
                    passed: r.holds(),
                    text,
                },
                out.output,
            )
        }
        Command::OrderEstimate {
            method,
            p,
            z,
            k_max,
            out,
        } => {
            let est = estimate_convergence_order(
                &parse_integer_p(&p)?,
                method.into(),
                parse_point(&z)?,
                k_max,
            )?;
            let text = match out.format {
                Format::Json => pretty(&est),
                Format::Csv => {
                    let mut s = String::from("k,ratio\n");
                    for r in &est.ratios {
                        let _ = writeln!(s, "{},{}", r.k, r.ratio);
                    }
                    s
                }
            };
            (Outcome { passed: true, text }, out.output)
        }
        Command::VerifyAll {
            p,
            order,
            k_max,
            plan,
            out,
        } => (
            run_verify_all(&p, order, k_max, &plan.plan(), out.format)?,
            out.output,
        ),
    };
    Ok((outcome, output))
}

/// Parses `argv` (including the program name) and runs the command.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok((outcome, output)) => {
            if let Some(path) = output {
                if let Err(e) = fs::write(&path, &outcome.text) {
                    eprintln!("rootcert: cannot write {}: {e}", path.display());
                    return EXIT_USAGE;
                }
            } else {
                let mut stdout = std::io::stdout().lock();
                if let Err(e) = stdout
                    .write_all(outcome.text.as_bytes())
                    .and_then(|_| stdout.flush())
                {
                    if e.kind() != std::io::ErrorKind::BrokenPipe {
                        eprintln!("rootcert: cannot write output: {e}");
                        return EXIT_USAGE;
                    }
                }
            }
            if outcome.passed {
                EXIT_OK
            } else {
                EXIT_FAILED
            }
        }
        Err(Usage(msg)) => {
            eprintln!("rootcert: {msg}");
            EXIT_USAGE
        }
    }
}
