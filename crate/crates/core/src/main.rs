use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::json;

use hitchin_nerve::contour::PunctureConfig;
use hitchin_nerve::nerve::winding_number;
use hitchin_nerve::periods::{half_periods, period_triangle};
use hitchin_nerve::pipeline::{
    trajectory_csv, trajectory_svg, write_file, Experiment, ExperimentConfig,
};
use hitchin_nerve::rotation::arc_decomposition;
use hitchin_nerve::{Error, Result};

#[derive(Parser)]
#[command(
    version,
    about = "Period triangles, trace asymptotics and nerve winding for Painleve VI"
)]
struct Cli {
    /// JSON experiment configuration; command-line flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct TArg {
    /// Fourth puncture as RE,IM.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    t: Option<Complex64>,
}

#[derive(Args)]
struct MuArg {
    /// zero | const:MU0,MU1,MUT | random:SEED
    #[arg(long)]
    mu: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Half-periods and the period triangle.
    Periods {
        #[command(flatten)]
        t: TArg,
        /// Basepoint of the loops as RE,IM.
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z0: Option<Complex64>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Critical angles and the arcs between them.
    Angles {
        #[command(flatten)]
        t: TArg,
    },
    /// Sample one loop and report its winding.
    Trajectory {
        #[command(flatten)]
        t: TArg,
        #[arg(long = "R")]
        r: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
        #[command(flatten)]
        mu: MuArg,
        /// CSV output; printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Run a sweep over R and certify the winding and arc-edge checks.
    Verify {
        #[command(flatten)]
        t: TArg,
        #[arg(long = "R-list", value_delimiter = ',')]
        r_list: Option<Vec<f64>>,
        #[command(flatten)]
        mu: MuArg,
        /// Report output; printed to stdout when omitted.
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        guard_band: Option<f64>,
        /// Record wall-clock times in the report.
        #[arg(long)]
        timing: bool,
    },
    /// Transition widths around the three critical angles.
    Widths {
        #[command(flatten)]
        t: TArg,
        #[arg(long = "R")]
        r: Option<f64>,
        #[arg(long)]
        threshold: Option<f64>,
    },
}

fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').collect();
    let [re, im] = parts[..] else {
        return Err(format!("expected RE,IM, got {s:?}"));
    };
    let re: f64 = re.trim().parse().map_err(|e| format!("{re:?}: {e}"))?;
    let im: f64 = im.trim().parse().map_err(|e| format!("{im:?}: {e}"))?;
    Ok(Complex64::new(re, im))
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn print_json(value: &serde_json::Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("json value serializes")
    );
}

fn base_config(path: &Option<PathBuf>) -> Result<ExperimentConfig> {
    match path {
        Some(p) => ExperimentConfig::from_json_file(p),
        None => Ok(ExperimentConfig::default()),
    }
}

fn single_r(cfg: &ExperimentConfig, r: Option<f64>) -> Result<f64> {
    match (r, cfg.r_values.as_slice()) {
        (Some(r), _) => Ok(r),
        (None, [r]) => Ok(*r),
        _ => Err(Error::Config("pass a single --R value".into())),
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = base_config(&cli.config)?;
    match cli.command {
        Command::Periods { t, z0, tol } => {
            cfg.t = t.t.unwrap_or(cfg.t);
            let z0 = z0.unwrap_or(cfg.basepoint);
            let tol = tol.unwrap_or(cfg.quadrature_tol);
            let punctures = PunctureConfig::new(cfg.t).map_err(|e| e.with_t(cfg.t))?;
            let hp = half_periods(&punctures, z0, tol).map_err(|e| e.with_t(cfg.t))?;
            let tri = period_triangle(&hp).map_err(|e| e.with_t(cfg.t))?;
            print_json(&json!({
                "t": pair(cfg.t),
                "basepoint": pair(z0),
                "pi0": pair(hp.pi0),
                "pi1": pair(hp.pi1),
                "pit": pair(hp.pit),
                "a": pair(tri.a),
                "b": pair(tri.b),
                "c": pair(tri.c),
                "tol": tol,
                "max_error_estimate": hp.max_error_estimate,
            }));
        }
        Command::Angles { t } => {
            cfg.t = t.t.unwrap_or(cfg.t);
            let punctures = PunctureConfig::new(cfg.t).map_err(|e| e.with_t(cfg.t))?;
            let hp = half_periods(&punctures, cfg.basepoint, cfg.quadrature_tol)
                .map_err(|e| e.with_t(cfg.t))?;
            let tri = period_triangle(&hp).map_err(|e| e.with_t(cfg.t))?;
            let (angles, arcs) = arc_decomposition(&tri).map_err(|e| e.with_t(cfg.t))?;
            print_json(&json!({
                "t": pair(cfg.t),
                "critical_angles": angles.as_array(),
                "arcs": arcs.arcs.iter().enumerate().map(|(k, a)| json!({
                    "arc": format!("I{}", k + 1),
                    "start": a.start,
                    "end": a.end,
                    "length": a.length(),
                })).collect::<Vec<_>>(),
            }));
        }
        Command::Trajectory {
            t,
            r,
            samples,
            mu,
            out,
            svg,
        } => {
            cfg.t = t.t.unwrap_or(cfg.t);
            cfg.samples = samples.unwrap_or(cfg.samples);
            cfg.mu = mu.mu.unwrap_or(cfg.mu);
            let r = single_r(&cfg, r)?;
            let out = out.or(cfg.csv.clone());
            let svg = svg.or(cfg.svg.clone());
            let exp = Experiment::new(cfg)?;
            let traj = exp.run_trajectory(r)?;
            let winding = winding_number(&traj)?;
            let csv = trajectory_csv(&traj);
            match &out {
                Some(path) => write_file(path, &csv)?,
                None => print!("{csv}"),
            }
            if let Some(path) = &svg {
                write_file(path, &trajectory_svg(&traj))?;
            }
            if out.is_some() {
                println!("R = {r}: {} samples, winding {winding}", traj.samples.len());
            }
        }
        Command::Verify {
            t,
            r_list,
            mu,
            json,
            guard_band,
            timing,
        } => {
            cfg.t = t.t.unwrap_or(cfg.t);
            cfg.r_values = r_list.unwrap_or(cfg.r_values);
            cfg.mu = mu.mu.unwrap_or(cfg.mu);
            cfg.guard_band = guard_band.or(cfg.guard_band);
            cfg.timing |= timing;
            let json = json.or(cfg.json.clone());
            let exp = Experiment::new(cfg)?;
            let report = exp.report()?;
            match &json {
                Some(path) => write_file(path, &report.to_json())?,
                None => print!("{}", report.to_json()),
            }
            report.certify()?;
            if json.is_some() {
                let windings: Vec<i64> = report.runs.iter().map(|r| r.winding).collect();
                println!("verified: windings {windings:?}");
            }
        }
        Command::Widths { t, r, threshold } => {
            cfg.t = t.t.unwrap_or(cfg.t);
            let threshold = threshold.unwrap_or(cfg.vertex_threshold);
            let r = single_r(&cfg, r)?;
            let exp = Experiment::new(cfg)?;
            let widths = exp.transition_widths(r, threshold)?;
            print_json(&json!({
                "t": pair(exp.config.t),
                "R": r,
                "threshold": threshold,
                "critical_angles": exp.angles.as_array(),
                "transition_widths": widths,
            }));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
