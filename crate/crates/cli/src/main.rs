//! `cshift`: bound-pair scattering from the command line.

mod config;

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use coherent_shift::dynamics::{run_experiment_with, Backend, ExperimentResult, ExperimentSpec};
use coherent_shift::effective::PairKind;
use coherent_shift::model::{ModelParams, Boundary};
use coherent_shift::output::{fmt_g15, write_branch_csv, write_time_series_csv, write_transmission_csv};
use coherent_shift::spectrum::{extract_branch, linspace, BranchType};
use coherent_shift::transport::{resonance_v, transmission_grid};
use coherent_shift::Error;
use serde_json::json;

use config::ExperimentConfig;

#[derive(Parser)]
#[command(name = "cshift", version, about = "Bound-pair scattering in Bose- and Fermi-Hubbard chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bound-state branches of the two-boson problem.
    Spectrum {
        #[arg(long, default_value_t = 1.0)]
        kappa: f64,
        #[arg(long)]
        u: f64,
        #[arg(long, default_value_t = 0.0)]
        v: f64,
        /// Momentum grid `start:stop:count`.
        #[arg(long, allow_hyphen_values = true, default_value = "-3.14159265358979:3.14159265358979:101")]
        k_grid: String,
        /// Relative-coordinate cutoff.
        #[arg(long, default_value_t = 200)]
        n0: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Impurity-chain transmission by closed form, Green's function and plane-wave matching.
    Transmission {
        #[arg(long, value_parser = parse_kind)]
        kind: PairKind,
        #[arg(long, default_value_t = 1.0)]
        kappa: f64,
        /// Contact coupling `V`, a value or a grid `start:stop:count`.
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        v: String,
        #[arg(long, allow_hyphen_values = true)]
        k_grid: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Resonant couplings `V_R±` at one momentum or over a grid.
    Resonance {
        #[arg(long, default_value_t = 1.0)]
        kappa: f64,
        #[arg(long, allow_hyphen_values = true, conflicts_with = "k_grid", required_unless_present = "k_grid")]
        k: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        k_grid: Option<String>,
        /// Print JSON instead of CSV.
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact wavepacket scattering run from a JSON config.
    Scatter {
        #[arg(long)]
        config: PathBuf,
    },
    /// The same experiment on the full model, the effective model and the impurity chain.
    CompareEffective {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_kind(s: &str) -> Result<PairKind, String> {
    serde_json::from_value(json!(s)).map_err(|_| format!("unknown kind `{s}` (onsite-bose, nn-bose, fermi-singlet)"))
}

/// Failure classes mapped to exit codes.
enum Failure {
    Validation(String),
    Io(String),
    InvalidRun(String),
    Other(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Io(_) => 3,
            Failure::InvalidRun(_) => 4,
            Failure::Other(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Io(m) | Failure::InvalidRun(m) | Failure::Other(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NonConvergence { .. } | Error::Singular(_) | Error::BranchNotFound { .. } => Failure::Other(e.to_string()),
            _ => Failure::Validation(e.to_string()),
        }
    }
}

fn io_err(path: &Path) -> impl Fn(io::Error) -> Failure + '_ {
    move |e| Failure::Io(format!("{}: {e}", path.display()))
}

fn parse_grid(field: &str, s: &str) -> Result<Vec<f64>, Failure> {
    let bad = || Failure::Validation(format!("{field}: expected `start:stop:count` or a number, got `{s}`"));
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [x] => Ok(vec![x.trim().parse().map_err(|_| bad())?]),
        [a, b, n] => {
            let (a, b): (f64, f64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
            let n: usize = n.trim().parse().map_err(|_| bad())?;
            if n == 0 || !a.is_finite() || !b.is_finite() {
                return Err(bad());
            }
            Ok(linspace(a, b, n))
        }
        _ => Err(bad()),
    }
}

/// Writes to `path`, or stdout when absent.
fn emit(path: Option<&Path>, body: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<(), Failure> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p).map_err(io_err(p))?);
            body(&mut w).and_then(|_| w.flush()).map_err(io_err(p))
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            body(&mut lock).map_err(|e| Failure::Io(format!("stdout: {e}")))
        }
    }
}

fn spectrum(kappa: f64, u: f64, v: f64, k_grid: &str, n0: usize, out: Option<&Path>) -> Result<(), Failure> {
    let ks = parse_grid("k-grid", k_grid)?;
    let params = ModelParams::bose(kappa, u, v, 2 * n0 + 1, Boundary::Open)?;
    let types: &[BranchType] = if u == v {
        &[BranchType::Bonding, BranchType::AntiBonding]
    } else {
        &[BranchType::OnSite, BranchType::NearestNeighbor]
    };
    let mut branches = Vec::new();
    for &t in types {
        match extract_branch(&params, t, &ks, n0) {
            Ok(b) => branches.push(b),
            Err(Error::BranchNotFound { reason, .. }) => log::info!("{t} branch absent: {reason}"),
            Err(e) => return Err(e.into()),
        }
    }
    emit(out, |w| write_branch_csv(w, &branches))?;
    if out.is_some() {
        let summary: Vec<_> = branches
            .iter()
            .map(|b| {
                let (c0, c1) = b.cosine_fit();
                json!({"branch": b.branch_type.to_string(), "bandwidth": b.bandwidth(), "fit_offset": c0, "fit_hopping": c1})
            })
            .collect();
        println!("{}", serde_json::to_string_pretty(&summary).unwrap());
    }
    Ok(())
}

fn transmission(kind: PairKind, kappa: f64, v: &str, k_grid: &str, out: Option<&Path>) -> Result<(), Failure> {
    let ks = parse_grid("k-grid", k_grid)?;
    let vs = parse_grid("v", v)?;
    let rows = transmission_grid(kind, kappa, &ks, &vs)?;
    emit(out, |w| write_transmission_csv(w, &rows))
}

fn resonance(kappa: f64, k: Option<f64>, k_grid: Option<&str>, as_json: bool, out: Option<&Path>) -> Result<(), Failure> {
    if !(kappa.is_finite() && kappa != 0.0) {
        return Err(Failure::Validation("kappa: must be finite and nonzero".into()));
    }
    let ks = match (k, k_grid) {
        (Some(k), _) => vec![k],
        (None, Some(g)) => parse_grid("k-grid", g)?,
        (None, None) => unreachable!("clap requires one of --k, --k-grid"),
    };
    let roots: Vec<(f64, f64, f64)> = ks.iter().map(|&k| {
        let (p, m) = resonance_v(kappa, k);
        (k, p, m)
    }).collect();
    emit(out, |w| {
        if as_json {
            let value = if k.is_some() {
                json!({"v_plus": roots[0].1, "v_minus": roots[0].2})
            } else {
                roots.iter().map(|&(k, p, m)| json!({"k": k, "v_plus": p, "v_minus": m})).collect()
            };
            writeln!(w, "{}", serde_json::to_string_pretty(&value).unwrap())
        } else {
            writeln!(w, "k,V_R_plus,V_R_minus")?;
            for &(k, p, m) in &roots {
                writeln!(w, "{},{},{}", fmt_g15(k), fmt_g15(p), fmt_g15(m))?;
            }
            Ok(())
        }
    })
}

fn load_config(path: &Path) -> Result<ExperimentConfig, Failure> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    ExperimentConfig::parse(&text).map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))
}

const P_SHIFTED_NOTE: &str = "p_shifted: probability that the particle is beyond the pair and the pair \
     is displaced toward the source (operational coherent-shift measure)";

fn run(spec: &ExperimentSpec) -> Result<ExperimentResult, Failure> {
    Ok(run_experiment_with(spec, |o| {
        log::debug!("t = {}: p_shifted = {}", o.time, o.p_shifted)
    })?)
}

fn scatter(path: &Path) -> Result<(), Failure> {
    let cfg = load_config(path)?;
    let spec = cfg.to_spec();
    spec.validate()?;
    let base = path.parent().unwrap_or(Path::new("."));
    let series_path = cfg.output.series_csv.as_ref().map(|p| base.join(p));
    let summary_path = cfg.output.summary_json.as_ref().map(|p| base.join(p));
    let result = run(&spec)?;
    if let Some(p) = &series_path {
        emit(Some(p), |w| write_time_series_csv(w, &result.series))?;
    }
    let summary = json!({
        "summary": result.summary,
        "p_shifted": result.summary.final_observables.p_shifted,
        "note": P_SHIFTED_NOTE,
    });
    let text = serde_json::to_string_pretty(&summary).unwrap();
    if let Some(p) = &summary_path {
        fs::write(p, format!("{text}\n")).map_err(io_err(p))?;
    }
    println!("{text}");
    if !result.summary.valid {
        return Err(Failure::InvalidRun(format!(
            "edge occupancy {:e} exceeds the guard; outputs are flagged invalid",
            result.summary.max_edge_occupancy
        )));
    }
    Ok(())
}

fn compare_effective(path: &Path, out: Option<&Path>) -> Result<(), Failure> {
    let cfg = load_config(path)?;
    let base = cfg.to_spec();
    base.validate()?;
    let mut rows = Vec::new();
    let mut valid = true;
    for backend in [Backend::Full, Backend::Effective, Backend::ImpurityChain] {
        let spec = ExperimentSpec { backend, ..base.clone() };
        let r = run(&spec)?;
        valid &= r.summary.valid;
        rows.push(r.summary);
    }
    let value = json!({
        "full": rows[0],
        "effective": rows[1],
        "impurity_chain": rows[2],
        "p_shifted": {
            "full": rows[0].final_observables.p_shifted,
            "effective": rows[1].final_observables.p_shifted,
            "impurity_chain": rows[2].final_observables.p_shifted,
            "analytic_t12": rows[0].analytic_t12,
            "packet_averaged_t12": rows[0].packet_averaged_t12,
        },
        "note": P_SHIFTED_NOTE,
    });
    let text = serde_json::to_string_pretty(&value).unwrap();
    emit(out, |w| writeln!(w, "{text}"))?;
    if !valid {
        return Err(Failure::InvalidRun("a run tripped the edge guard".into()));
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Spectrum { kappa, u, v, k_grid, n0, out } => spectrum(kappa, u, v, &k_grid, n0, out.as_deref()),
        Command::Transmission { kind, kappa, v, k_grid, out } => transmission(kind, kappa, &v, &k_grid, out.as_deref()),
        Command::Resonance { kappa, k, k_grid, json, out } => resonance(kappa, k, k_grid.as_deref(), json, out.as_deref()),
        Command::Scatter { config } => scatter(&config),
        Command::CompareEffective { config, out } => compare_effective(&config, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
