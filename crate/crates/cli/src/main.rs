//! Command-line front end: every computation of the library with
//! reproducible, machine-readable output.
//!
//! Exit status: 0 on success, 1 when a result is inadmissible or infeasible,
//! 2 on input errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use bourgain::bound::{certify, BoundCertificate, EtaParam, ParameterTuple};
use bourgain::estimate::{alpha3, alpha4, alpha_general, EstimateConfig};
use bourgain::net::{frostman, net_content, parse_ratio, verify_frostman, DigitalSet};
use bourgain::rigor::{Decimal, DirectedValue};
use bourgain::search::{
    large_n_preset, min_feasible_d, optimize_eta_h, reproduce_table, table_csv, HPolicy,
    PresetOutcome, SearchSpec, TableRow,
};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "bourgain", version, about = "Certified dimension-gap bounds for harmonic measure, with exact m-adic net-content tools")]
struct Cli {
    /// Output format (default depends on the command)
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the artifact to a file instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Worker threads for the search (default: all cores, or BOURGAIN_JOBS)
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// The estimate constant alpha (closed forms for n = 3, 4; the general
    /// minimization otherwise or when --s is given)
    Alpha(AlphaArgs),
    /// Certify one parameter tuple and print its certificate
    Bound(BoundArgs),
    /// Recompute and verify the reference table rows, emitting CSV
    Table(TableArgs),
    /// Automated search for the best certified bound at one (n, m)
    Search(SearchArgs),
    /// The closed-form large-n parameter choice (m = n, h = 1, d = 2n-3)
    LargeN(LargeNArgs),
    /// Net content of a digital set read from a JSON file
    Netcontent(NetArgs),
    /// Constant-1 mass construction on a digital set
    Frostman(FrostmanArgs),
}

#[derive(Args)]
struct AlphaArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    m: u32,
    /// Dimension parameter for the general estimate (default n - 1/2)
    #[arg(long)]
    s: Option<f64>,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    m: u32,
    #[arg(long)]
    eta: String,
    #[arg(long)]
    h: u32,
    #[arg(long)]
    d: u32,
    #[arg(long, default_value = "0.000001")]
    epsilon: String,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long)]
    n: u32,
    #[arg(long = "m-from")]
    m_from: u32,
    #[arg(long = "m-to")]
    m_to: u32,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    m: u32,
    #[arg(long = "d-max", default_value_t = 12)]
    d_max: u32,
    /// Grid resolution for eta (default: 4 decimals for n = 3, 5 for n = 4)
    #[arg(long = "eta-decimals")]
    eta_decimals: Option<u32>,
}

#[derive(Args)]
struct LargeNArgs {
    #[arg(long)]
    n: u32,
}

#[derive(Args)]
struct NetArgs {
    #[arg(long)]
    input: PathBuf,
    /// Exponent as P/Q (or an integer)
    #[arg(long)]
    s: String,
    #[arg(long = "delta-depth", default_value_t = 0)]
    delta_depth: i32,
}

#[derive(Args)]
struct FrostmanArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    s: String,
    /// Re-check every cube constraint and the total-vs-content inequality
    #[arg(long)]
    verify: bool,
}

enum Failure {
    /// Result computed but inadmissible/infeasible (exit 1).
    Outcome(String),
    /// Bad input (exit 2).
    Input(String),
}

impl From<bourgain::Error> for Failure {
    fn from(e: bourgain::Error) -> Failure {
        use bourgain::Error::*;
        match e {
            Config(_) | Parse(_) | Resolution { .. } | EmptySet | Domain(_) => {
                Failure::Input(e.to_string())
            }
            TableMismatch(_) => Failure::Outcome(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs.or_else(|| {
        std::env::var("BOURGAIN_JOBS").ok().and_then(|v| v.parse().ok())
    }) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    let format = cli.format;
    let result = match &cli.cmd {
        Cmd::Alpha(a) => run_alpha(a, format),
        Cmd::Bound(a) => run_bound(a, format),
        Cmd::Table(a) => run_table(a, format),
        Cmd::Search(a) => run_search(a, format),
        Cmd::LargeN(a) => run_large_n(a, format),
        Cmd::Netcontent(a) => run_netcontent(a, format),
        Cmd::Frostman(a) => run_frostman(a),
    };
    match result {
        Ok(artifact) => match emit(&cli.output, &artifact) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
        Err(Failure::Outcome(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn emit(path: &Option<PathBuf>, artifact: &str) -> std::io::Result<()> {
    match path {
        Some(p) => fs::write(p, artifact),
        None => {
            print!("{artifact}");
            Ok(())
        }
    }
}

fn cert_text(cert: &BoundCertificate) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "n = {}, m = {}, eta = {}, h = {}, d = {}, epsilon = {}\n",
        cert.params.n, cert.params.m, cert.params.eta, cert.params.h, cert.params.d,
        cert.params.epsilon
    ));
    out.push_str(&format!("alpha  = [{:e}, {:e}]\n", cert.alpha.lo(), cert.alpha.hi()));
    out.push_str(&format!("V      = [{:e}, {:e}]\n", cert.v.lo(), cert.v.hi()));
    out.push_str(&format!("Pi     = [{:e}, {:e}]\n", cert.pi.lo(), cert.pi.hi()));
    out.push_str(&format!(
        "gamma  = [{:e}, {:e}]   (certified upper endpoint {:e})\n",
        cert.gamma.lo(),
        cert.gamma.hi(),
        cert.gamma.hi()
    ));
    out.push_str(&format!("lambda = [{:e}, {:e}]\n", cert.lambda.lo(), cert.lambda.hi()));
    out.push_str(&format!("rho    = [{:e}, {:e}]\n", cert.rho.lo(), cert.rho.hi()));
    out.push_str(&format!(
        "bound  = [{:e}, {:e}]   (certified lower endpoint {:e})\n",
        cert.bound.lo(),
        cert.bound.hi(),
        cert.bound.lo()
    ));
    out.push_str(&format!(
        "eta_admissible = {}, gamma_below_one = {}, prelemma_verified = {}, admissible = {}\n",
        cert.eta_admissible, cert.gamma_below_one, cert.prelemma_verified, cert.admissible
    ));
    out
}

fn json_line(v: serde_json::Value) -> String {
    let mut s = serde_json::to_string(&v).expect("serializable");
    s.push('\n');
    s
}

fn run_alpha(a: &AlphaArgs, format: Option<Format>) -> Result<String, Failure> {
    let use_general = a.s.is_some() || !(a.n == 3 || a.n == 4);
    if !use_general {
        let alpha = if a.n == 3 { alpha3(a.m)? } else { alpha4(a.m)? };
        return Ok(match format.unwrap_or(Format::Text) {
            Format::Json => json_line(serde_json::json!({
                "version": VERSION,
                "n": a.n,
                "m": a.m,
                "alpha": alpha.display_sig6(),
                "alpha_exact": alpha.display_exact(),
                "alpha_lo": alpha.dv().lo(),
                "alpha_hi": alpha.dv().hi(),
            })),
            _ => format!(
                "alpha = {} (exact {}, enclosure [{:e}, {:e}])\n",
                alpha.display_sig6(),
                alpha.display_exact(),
                alpha.dv().lo(),
                alpha.dv().hi()
            ),
        });
    }
    let s_value = a.s.unwrap_or(a.n as f64 - 0.5);
    let cfg = EstimateConfig::new(a.n, a.m, DirectedValue::point(s_value))?;
    let g = alpha_general(&cfg)?;
    Ok(match format.unwrap_or(Format::Text) {
        Format::Json => json_line(serde_json::json!({
            "version": VERSION,
            "n": a.n,
            "m": a.m,
            "s": s_value,
            "alpha_lo": g.value.lo(),
            "alpha_hi": g.value.hi(),
            "k_argmin": g.k_argmin,
        })),
        _ => format!(
            "alpha = [{:e}, {:e}] at s = {} (argmin k = {})\n",
            g.value.lo(),
            g.value.hi(),
            s_value,
            g.k_argmin
        ),
    })
}

fn params_from(a: &BoundArgs) -> Result<(ParameterTuple, DirectedValue), Failure> {
    let eta = Decimal::parse(&a.eta)?;
    let epsilon = Decimal::parse(&a.epsilon)?;
    let alpha = match a.n {
        3 => alpha3(a.m)?.dv(),
        4 => alpha4(a.m)?.dv(),
        _ => {
            let s = DirectedValue::from_int(a.n as i64)
                - DirectedValue::from_ratio(1, 2).expect("const");
            alpha_general(&EstimateConfig::new(a.n, a.m, s)?)?.value
        }
    };
    let p = ParameterTuple {
        n: a.n,
        m: a.m,
        eta: EtaParam::Decimal(eta),
        h: a.h,
        d: a.d,
        epsilon,
    };
    Ok((p, alpha))
}

fn run_bound(a: &BoundArgs, format: Option<Format>) -> Result<String, Failure> {
    let (p, alpha) = params_from(a)?;
    let cert = certify(&p, &alpha)?;
    let artifact = match format.unwrap_or(Format::Text) {
        Format::Json => json_line(cert.to_json(VERSION)),
        _ => cert_text(&cert),
    };
    if !cert.admissible {
        // still print the certificate, then signal via the exit status
        print!("{artifact}");
        return Err(Failure::Outcome(format!(
            "inadmissible: {}",
            cert.failure_reason().unwrap_or("unknown")
        )));
    }
    Ok(artifact)
}

fn rows_artifact(rows: &[TableRow], format: Format) -> String {
    match format {
        Format::Json => {
            let items: Vec<serde_json::Value> =
                rows.iter().map(|r| r.to_json(VERSION)).collect();
            json_line(serde_json::Value::Array(items))
        }
        _ => table_csv(rows),
    }
}

fn run_table(a: &TableArgs, format: Option<Format>) -> Result<String, Failure> {
    let mut spec = SearchSpec::reference(a.n)?;
    if a.m_from > a.m_to {
        return Err(Failure::Input(format!("empty m range {}..{}", a.m_from, a.m_to)));
    }
    spec.m_list = (a.m_from..=a.m_to).collect();
    let rows = reproduce_table(&spec)?;
    Ok(rows_artifact(&rows, format.unwrap_or(Format::Csv)))
}

fn run_search(a: &SearchArgs, format: Option<Format>) -> Result<String, Failure> {
    let spec = match a.n {
        3 | 4 => SearchSpec::reference(a.n)?,
        _ => SearchSpec {
            n: a.n,
            m_list: vec![a.m],
            d_max: a.d_max,
            eta_decimals: 0, // resolved below
            h_policy: HPolicy::ScanAll,
            alpha_source: bourgain::search::AlphaSource::General,
        },
    };
    let alpha = spec.alpha_for(a.m)?;
    let decimals = a.eta_decimals.unwrap_or_else(|| {
        if matches!(a.n, 3 | 4) {
            spec.eta_decimals
        } else {
            // enough grid room below eta_max for roughly 1000 points
            let em = bourgain::bound::eta_max(a.n, a.m, &alpha.dv())
                .map(|e| e.lo())
                .unwrap_or(1e-4);
            (3.0 - em.log10().floor()).max(4.0) as u32
        }
    });
    let Some(d) = min_feasible_d(a.n, a.m, &alpha.dv(), a.d_max)? else {
        return Err(Failure::Outcome(format!(
            "infeasible: no d <= {} makes gamma < 1 at m = {}",
            a.d_max, a.m
        )));
    };
    let Some(hit) = optimize_eta_h(a.n, a.m, &alpha.dv(), d, decimals, &HPolicy::ScanAll)?
    else {
        return Err(Failure::Outcome("infeasible: no admissible eta grid point".into()));
    };
    let row = TableRow {
        n: a.n,
        m: a.m,
        eta: hit.eta,
        h: hit.h,
        d,
        alpha,
        cert: hit.cert,
    };
    Ok(match format.unwrap_or(Format::Text) {
        Format::Json => json_line(row.to_json(VERSION)),
        Format::Csv => rows_artifact(&[row], Format::Csv),
        Format::Text => format!(
            "best: eta = {}, h = {}, d = {}\n{}",
            row.eta,
            row.h,
            row.d,
            cert_text(&row.cert)
        ),
    })
}

fn run_large_n(a: &LargeNArgs, format: Option<Format>) -> Result<String, Failure> {
    match large_n_preset(a.n)? {
        PresetOutcome::InvalidConfig { n, reason } => Err(Failure::Outcome(format!(
            "inadmissible at n = {n}: {reason}"
        ))),
        PresetOutcome::Evaluated { n, alpha, cert, rate_claim } => {
            let artifact = match format.unwrap_or(Format::Text) {
                Format::Json => {
                    let mut j = cert.to_json(VERSION);
                    j["alpha_k_argmin"] = serde_json::json!(alpha.k_argmin);
                    j["rate_claim"] = serde_json::json!(rate_claim);
                    json_line(j)
                }
                _ => {
                    let mut t = cert_text(&cert);
                    t.push_str(&format!(
                        "rate_claim (bound >= 0.6 n^(-2n(n-1)) / ln n): {rate_claim:?}\n"
                    ));
                    t
                }
            };
            if !cert.admissible {
                print!("{artifact}");
                return Err(Failure::Outcome(format!(
                    "inadmissible at n = {n}: {}",
                    cert.failure_reason().unwrap_or("unknown")
                )));
            }
            Ok(artifact)
        }
    }
}

fn load_set(path: &PathBuf) -> Result<DigitalSet, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok(DigitalSet::from_json_str(&text)?)
}

fn run_netcontent(a: &NetArgs, format: Option<Format>) -> Result<String, Failure> {
    let set = load_set(&a.input)?;
    let s = parse_ratio(&a.s)?;
    let value = net_content(&set, s, a.delta_depth)?;
    Ok(match format.unwrap_or(Format::Text) {
        Format::Json => json_line(serde_json::json!({
            "version": VERSION,
            "n": set.n,
            "m": set.m,
            "depth": set.depth,
            "s": s.to_string(),
            "delta_depth": a.delta_depth,
            "content": value.to_string(),
            "content_approx": value.to_f64(),
        })),
        _ => format!("content = {value}\n        ~= {:e}\n", value.to_f64()),
    })
}

fn run_frostman(a: &FrostmanArgs) -> Result<String, Failure> {
    let set = load_set(&a.input)?;
    let s = parse_ratio(&a.s)?;
    let mu = frostman(&set, s)?;
    if a.verify {
        let report = verify_frostman(&mu)?;
        eprintln!(
            "verify: {} violations, {} tight cubes, total {} >= content {}: {}, within hypothesis (s > n-1): {}",
            report.violations.len(),
            report.tight_cubes.len(),
            report.total_mass,
            report.content,
            report.total_ge_content,
            report.within_hypothesis
        );
        if !report.passed() {
            return Err(Failure::Outcome("mass verification failed".into()));
        }
    }
    Ok(json_line(mu.to_json()))
}
