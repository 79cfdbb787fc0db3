use clap::{Parser, Subcommand};
use isoprof::bounds::{self, SmallRegime};
use isoprof::config::ExperimentConfig;
use isoprof::potential::Potential;
use isoprof::profile::{ProfileFn, ProfileKind};
use isoprof::radial::RadialMeasure;
use isoprof::sweep::{self, fmt_g};
use isoprof::witness;
use isoprof::{Error, QuadraturePlan};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "isoprof",
    version,
    about = "Lower bounds, witnesses, and diagnostics for isoperimetric profiles of spherically symmetric measures"
)]
struct Cli {
    /// Experiment config file (TOML) for sweep and verify-paper.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (sweep, verify-paper) or output file (sample).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Suppress informational output.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Summarize the radial measure: mode, truncation radius, normalizer,
    /// and optionally the density/cdf/tail at a point.
    Radial {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long)]
        r: Option<f64>,
    },
    /// Evaluate a comparison profile at a point.
    Profile {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        a: f64,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        /// One of iphi, lphi, lalpha, gauss, cheeger.
        #[arg(long, default_value = "iphi")]
        kind: String,
    },
    /// Print a lower-bound certificate as a JSON line.
    Bound {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        a: f64,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        /// One of auto, bobkov, big, small, tensor.
        #[arg(long, default_value = "auto")]
        route: String,
    },
    /// Print witness perimeters as CSV: family,parameter,perimeter.
    Witness {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        a: f64,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
    },
    /// Draw points of the full measure and write plain-text coordinate rows.
    Sample {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the configured (n, a, route) sweep and write CSV outputs.
    Sweep,
    /// Re-verify the analytic statements behind the bounds; write report.csv.
    VerifyPaper,
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Domain(_) | Error::Io(_) => 2,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn load_config(cli_config: &Option<PathBuf>) -> isoprof::Result<ExperimentConfig> {
    match cli_config {
        Some(path) => ExperimentConfig::from_path(path),
        None => ExperimentConfig::from_toml("alpha = 2.0\nn_list = [1, 2, 10, 50]\n"),
    }
}

fn run(cli: Cli) -> isoprof::Result<u8> {
    let plan = QuadraturePlan::default();
    match cli.cmd {
        Cmd::Radial { n, alpha, lambda, r } => {
            let p = Potential::power_scaled(alpha, lambda);
            let m = RadialMeasure::normalize(n, p, plan)?;
            let mut out = format!(
                "{{\"n\":{},\"alpha\":{},\"lambda\":{},\"mode\":{},\"r_max\":{},\"log_z_rad\":{}",
                n,
                fmt_g(alpha),
                fmt_g(lambda),
                fmt_g(m.mode()),
                fmt_g(m.r_max()),
                fmt_g(m.log_z_rad())
            );
            if let Some(r) = r {
                out.push_str(&format!(
                    ",\"r\":{},\"density\":{},\"cdf\":{},\"tail\":{}",
                    fmt_g(r),
                    fmt_g(m.log_density(r)?.exp()),
                    fmt_g(m.cdf(r)?),
                    fmt_g(m.tail(r)?)
                ));
            }
            out.push('}');
            println!("{out}");
        }
        Cmd::Profile { alpha, a, lambda, kind } => {
            let p = Potential::power_scaled(alpha, lambda);
            let profile_kind = match kind.as_str() {
                "iphi" => ProfileKind::IPhi(p),
                "lphi" => ProfileKind::LPhi(p),
                "lalpha" => ProfileKind::LAlpha(alpha),
                "gauss" => ProfileKind::GaussianIsoperimetric,
                "cheeger" => ProfileKind::CheegerLinear,
                other => {
                    return Err(Error::Domain(format!(
                        "unknown profile kind '{other}'; expected iphi, lphi, lalpha, gauss, or cheeger"
                    )))
                }
            };
            let f = ProfileFn::new(profile_kind, plan)?;
            println!("{}", fmt_g(f.eval(a)?));
        }
        Cmd::Bound { n, alpha, a, lambda, route } => {
            let p = Potential::power_scaled(alpha, lambda);
            let ledger = isoprof::ConstantsLedger::default();
            let cert = match route.as_str() {
                "auto" => bounds::theorem_muphi(n, &p, a, &ledger, plan)?,
                "bobkov" => {
                    let nu = RadialMeasure::normalize(n, p, plan)?;
                    bounds::bobkov_optimize(&nu, a.min(1.0 - a))?
                }
                "big" => {
                    let nu = RadialMeasure::normalize(n, p, plan)?;
                    bounds::prop_nu_big(&nu, a.min(1.0 - a), &ledger)?
                }
                "small" => {
                    let regime = if p.check_hypotheses(64, 16.0)?.h2.holds() {
                        SmallRegime::H2
                    } else {
                        SmallRegime::H0
                    };
                    let c = ledger.value("split_c")?;
                    bounds::prop_small(n, &p, a.min(1.0 - a), c, regime, &ledger)?
                }
                "tensor" => bounds::tensor_route(n, &p, a, &ledger, plan)?,
                other => {
                    return Err(Error::Domain(format!(
                        "unknown route '{other}'; expected auto, bobkov, big, small, or tensor"
                    )))
                }
            };
            println!("{}", cert.to_json());
        }
        Cmd::Witness { n, alpha, a, lambda } => {
            let p = Potential::power_scaled(alpha, lambda);
            let m = RadialMeasure::normalize(n, p.clone(), plan)?;
            let ball = witness::ball_witness(&m, a)?;
            let half = witness::halfspace_witness(n, &p, a, plan)?;
            println!("family,parameter,perimeter");
            println!("{},{},{}", ball.family, fmt_g(ball.parameter), fmt_g(ball.perimeter));
            println!("{},{},{}", half.family, fmt_g(half.parameter), fmt_g(half.perimeter));
        }
        Cmd::Sample { n, alpha, lambda, count, seed } => {
            let out_path = cli.out.ok_or_else(|| {
                Error::Config("sample requires --out FILE for the coordinate rows".into())
            })?;
            let p = Potential::power_scaled(alpha, lambda);
            let m = RadialMeasure::normalize(n, p, plan)?;
            let pts = witness::sample(&m, count, seed)?;
            let mut text = String::new();
            for pt in &pts {
                let row: Vec<String> = pt.iter().map(|&x| fmt_g(x)).collect();
                text.push_str(&row.join(" "));
                text.push('\n');
            }
            std::fs::write(&out_path, text)?;
            if !cli.quiet {
                eprintln!("wrote {} points to {}", pts.len(), out_path.display());
            }
        }
        Cmd::Sweep => {
            let cfg = load_config(&cli.config)?;
            let out_dir = cli.out.unwrap_or_else(|| PathBuf::from("out"));
            let outcome = sweep::run_sweep(&cfg, &out_dir)?;
            if !cli.quiet {
                eprintln!(
                    "wrote {} rows to {}; checks {}",
                    outcome.rows,
                    out_dir.display(),
                    if outcome.all_checks_pass { "pass" } else { "FAIL" }
                );
            }
            if !outcome.all_checks_pass {
                return Ok(1);
            }
        }
        Cmd::VerifyPaper => {
            let cfg = load_config(&cli.config)?;
            let report = sweep::verify_paper(&cfg)?;
            if let Some(out_dir) = &cli.out {
                std::fs::create_dir_all(out_dir)?;
                std::fs::write(out_dir.join("report.csv"), report.to_csv())?;
            }
            if !cli.quiet {
                for r in &report.rows {
                    println!("{}\t{}\t{}", r.id, r.status, r.detail);
                }
            }
            if report.any_failure() {
                return Ok(1);
            }
        }
    }
    Ok(0)
}
