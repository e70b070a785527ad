use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cubic_splitting_cli::config::AnalysisConfig;
use cubic_splitting_cli::pipeline::{run_stages, PipelineError};
use cubic_splitting_cli::report;
use cubic_splitting_cli::verify;

/// Resonances of complex-type cubic frequency vectors and the exponentially
/// small maximal-splitting estimate built from them.
#[derive(Parser)]
#[command(name = "cubic-splitting", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// Configuration file (.toml or .json).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Named preset: cubic-golden | cubic-golden-delta0.
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Working precision in decimal digits (17..=31).
    #[arg(long, global = true)]
    precision: Option<u32>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Emit JSON instead of text where applicable.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Principal matrix T, U, eigenvalue, rotation number and convergents.
    Koch,
    /// Primitive table with the oscillation bounds.
    Primitives {
        #[arg(long)]
        gamma_cut: Option<f64>,
    },
    /// Brute-force quasi-resonance scan with sequence classification.
    Scan {
        #[arg(long)]
        kmax: Option<u64>,
        /// Scatter CSV output path.
        #[arg(long)]
        scatter: Option<PathBuf>,
    },
    /// Envelope profile h1/h2 over a zeta range.
    Profile {
        #[arg(long)]
        zeta_min: Option<f64>,
        #[arg(long)]
        zeta_max: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
        /// Profile CSV output path.
        #[arg(long = "out-file")]
        out_file: Option<PathBuf>,
    },
    /// Torus interpolant on a grid, with its extrema.
    Torus {
        #[arg(long)]
        res: Option<usize>,
        #[arg(long = "out-file")]
        out_file: Option<PathBuf>,
    },
    /// Maximal-splitting estimate at one (eps, mu).
    Estimate {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        mu: f64,
    },
    /// Full pipeline: every table and figure file into the output directory.
    Analyze,
    /// Acceptance suite for a preset (one pass/fail line per criterion).
    Verify,
}

fn load_config(common: &Common) -> Result<AnalysisConfig, PipelineError> {
    let mut cfg = if let Some(path) = &common.config {
        AnalysisConfig::load(path)?
    } else if let Some(preset) = &common.preset {
        AnalysisConfig::preset(preset)?
    } else {
        AnalysisConfig::default()
    };
    if let Some(p) = common.precision {
        if !(17..=31).contains(&p) {
            return Err(PipelineError::Config(
                cubic_splitting_cli::config::ConfigError::BadPrecision(p),
            ));
        }
        cfg.precision_digits = p;
    }
    if let Some(out) = &common.out {
        cfg.out_dir = out.clone();
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<i32, PipelineError> {
    let mut cfg = load_config(&cli.common)?;
    match cli.cmd {
        Cmd::Koch => {
            let a = run_stages(&cfg)?;
            let s = report::koch_summary(&a);
            if cli.common.json {
                println!("{}", serde_json::to_string_pretty(&s).unwrap());
            } else {
                print!("{}", report::koch_text(&s));
            }
        }
        Cmd::Primitives { gamma_cut } => {
            if let Some(g) = gamma_cut {
                cfg.gamma_cut = g;
            }
            let a = run_stages(&cfg)?;
            print!("{}", report::primitives_csv(&a));
        }
        Cmd::Scan { kmax, scatter } => {
            if let Some(k) = kmax {
                cfg.kmax = k;
            }
            let a = run_stages(&cfg)?;
            let scan = cubic_splitting::resonances::brute_scan(
                &a.koch,
                &a.classified.constants,
                cfg.kmax,
            )
            .map_err(PipelineError::Resonance)?;
            if let Some(path) = scatter {
                report::write_string(&path, &report::scatter_csv(&scan))?;
            }
            println!(
                "{}",
                serde_json::to_string_pretty(&report::scan_summary_json(&scan)).unwrap()
            );
        }
        Cmd::Profile {
            zeta_min,
            zeta_max,
            step,
            out_file,
        } => {
            if let Some(z) = zeta_min {
                cfg.zeta_min = z;
            }
            if let Some(z) = zeta_max {
                cfg.zeta_max = z;
            }
            if let Some(s) = step {
                cfg.zeta_step = s;
            }
            let a = run_stages(&cfg)?;
            let prof = cubic_splitting::splitting::h_profiles(
                &a.koch,
                &a.params,
                cfg.zeta_min,
                cfg.zeta_max,
                cfg.zeta_step,
            )?;
            let csv = report::profile_csv(&prof);
            match out_file {
                Some(path) => report::write_string(&path, &csv)?,
                None => print!("{csv}"),
            }
            eprintln!(
                "{} corners in [{}, {}]; strong separation: {}",
                prof.corners.len(),
                cfg.zeta_min,
                cfg.zeta_max,
                prof.strong_sep_holds
            );
        }
        Cmd::Torus { res, out_file } => {
            if let Some(n) = res {
                cfg.torus_resolution = n;
            }
            let a = run_stages(&cfg)?;
            let grid = cubic_splitting::splitting::torus_grid(&a.params, cfg.torus_resolution);
            if let Some(path) = out_file {
                report::write_string(&path, &report::torus_csv(&grid))?;
            }
            println!(
                "{}",
                serde_json::json!({
                    "resolution": grid.resolution,
                    "j1_star": grid.j1_star,
                    "j1_location": grid.j1_location,
                    "j0_minus_observed": grid.j0_minus_observed,
                    "j0_location": grid.j0_location,
                    "confluence": grid.confluence,
                })
            );
        }
        Cmd::Estimate { eps, mu } => {
            let a = run_stages(&cfg)?;
            let rep = cubic_splitting::splitting::max_splitting_estimate(&a.params, eps, mu)?;
            println!("{}", serde_json::to_string_pretty(&rep).unwrap());
        }
        Cmd::Analyze => {
            let a = run_stages(&cfg)?;
            let bundle = report::run_analyze(&a)?;
            eprintln!(
                "wrote {} files to {}",
                bundle.files.len(),
                bundle.out_dir.display()
            );
            for f in &bundle.files {
                println!("{}", f.display());
            }
        }
        Cmd::Verify => {
            let preset = cfg
                .preset
                .clone()
                .or(cli.common.preset.clone())
                .unwrap_or_else(|| "cubic-golden".into());
            let results = verify::run_verify(&preset)?;
            let mut all_pass = true;
            for r in &results {
                println!("{}", r.line());
                for n in &r.notes {
                    println!("      note: {n}");
                }
                all_pass &= r.passed;
            }
            if cli.common.json {
                eprintln!("{}", serde_json::to_string_pretty(&results).unwrap());
            }
            return Ok(if all_pass { 0 } else { 1 });
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
