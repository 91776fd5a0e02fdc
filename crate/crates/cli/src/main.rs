use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use cvbell::emit::{emit, Format};
use cvbell::error::{CliError, Result};
use cvbell::presets::preset;
use cvbell::spec::{parse_config, split_pair, AngleChoice, SweepSpec};
use cvbell::sweep::{backend_label, evaluate_point};
use cvbell::run_sweeps;

#[derive(Parser)]
#[command(name = "cvbell", version, about = "Bell functional sweeps for four-mode optical states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a preset or a config file over its sweep range.
    Sweep(SweepArgs),
    /// Find the angles of largest violation at one parameter point.
    Optimize(OptimizeArgs),
}

#[derive(Args)]
struct SweepArgs {
    /// Built-in preset.
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    preset: Option<String>,
    /// Flat `key = value` spec file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a spec key; repeatable, applied in order.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to the available cores.
    #[arg(long)]
    jobs: Option<usize>,
    /// Exit with status 4 if any row failed numerically.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct OptimizeArgs {
    #[arg(long)]
    family: String,
    /// Spec key or `value=<x>` for the parameter point; repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
}

fn writer(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn sweep(args: SweepArgs) -> Result<()> {
    let mut specs = match (&args.preset, &args.config) {
        (Some(name), _) => preset(name)?,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            vec![parse_config(&text)?]
        }
        (None, None) => return Err(CliError::spec("need --preset or --config")),
    };
    for s in &mut specs {
        s.apply_overrides(&args.set)?;
        s.validate()?;
    }
    let jobs = args
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if jobs == 0 {
        return Err(CliError::spec("--jobs must be at least 1"));
    }
    let rows = run_sweeps(&specs, jobs)?;
    for r in rows.iter().filter(|r| r.is_failure()) {
        eprintln!(
            "warning: {} at {}: {}",
            r.sweep_name,
            r.sweep_value,
            r.error.as_deref().unwrap_or("")
        );
    }
    emit(&specs, &rows, args.format, writer(&args.out)?)?;
    let failed = rows.iter().filter(|r| r.is_failure()).count();
    if args.strict && failed > 0 {
        return Err(CliError::Numerical(failed));
    }
    Ok(())
}

fn optimize(args: OptimizeArgs) -> Result<()> {
    let mut pairs = vec![("family", args.family.as_str())];
    let mut value = None;
    for p in &args.params {
        let (k, v) = split_pair(p)?;
        if k == "value" {
            value = Some(
                v.parse::<f64>()
                    .map_err(|_| CliError::spec(format!("value: {v:?} is not a number")))?,
            );
        } else {
            pairs.push((k, v));
        }
    }
    let mut spec = SweepSpec::from_pairs(pairs)?;
    spec.angles = AngleChoice::Optimize;
    let value = value.unwrap_or(spec.start);
    spec.start = value;
    spec.stop = value;
    spec.validate()?;
    let point = evaluate_point(&spec, value).map_err(|e| {
        eprintln!("error: {e}");
        CliError::Numerical(1)
    })?;
    let [t1, t2, t1p, t2p] = point.angles.as_array();
    let r = point.report;
    let doc = json!({
        "family": spec.family.as_str(),
        "value": value,
        "backend": backend_label(&spec),
        "tail": point.tail,
        "angles": { "theta1": t1, "theta2": t2, "theta1p": t1p, "theta2p": t2p },
        "report": {
            "p_t1t2": r.p_t1t2,
            "p_t1t2p": r.p_t1t2p,
            "p_t1pt2": r.p_t1pt2,
            "p_t1pt2p": r.p_t1pt2p,
            "p_t1p_x": r.p_t1p_x,
            "p_x_t2": r.p_x_t2,
            "p_xx": r.p_xx,
            "f": r.f,
            "lower_margin": r.lower_margin,
            "upper_margin": r.upper_margin,
            "violated": r.violated,
        },
        "grid_violation": point.grid_violation,
    });
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, &doc)?;
    writeln!(out)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sweep(a) => sweep(a),
        Command::Optimize(a) => optimize(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
