use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use casimir_core::error::{Error, Result};
use casimir_core::report::{
    evaluate, record_table, run_sweep, scan_table, summary, sweep_table, to_json, Mode, RunConfig, SweepParam,
    SweepSpec, Table,
};

#[derive(Parser)]
#[command(name = "casimir", version, about = "Classical and vacuum pseudo-momentum of a charged oscillator in crossed fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Directory for results.json, results.csv and schema.txt.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Machine-readable format printed to stdout when --out is absent.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Relative tolerance for the numeric engine.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Suppress the human-readable summary.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a named preset (hydrogen, equal-mass, positronium-like).
    Preset {
        name: String,
        #[arg(long, value_parser = parse_mode)]
        mode: Option<Mode>,
    },
    /// Evaluate a config file in the mode it declares.
    Run { config: PathBuf },
    /// Cutoff-independence scan over the config's scan_cutoffs_me.
    Scan { config: PathBuf },
    /// Sweep one parameter over a linear grid.
    Sweep {
        config: PathBuf,
        #[arg(long, value_parser = parse_param)]
        param: SweepParam,
        #[arg(long, allow_negative_numbers = true)]
        min: f64,
        #[arg(long, allow_negative_numbers = true)]
        max: f64,
        #[arg(long)]
        steps: usize,
    },
}

fn parse_mode(s: &str) -> std::result::Result<Mode, String> {
    Mode::parse(s).map_err(|e| e.to_string())
}

fn parse_param(s: &str) -> std::result::Result<SweepParam, String> {
    SweepParam::parse(s).map_err(|e| e.to_string())
}

struct Output {
    json: String,
    table: Table,
    title: String,
    summary: String,
}

#[derive(Serialize)]
struct SweepRecord<'a> {
    sweep: &'a SweepSpec,
    points: &'a [casimir_core::report::ResultRecord],
}

fn load(path: &Path, tol: Option<f64>) -> Result<RunConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut c = RunConfig::parse(&text)?;
    if let Some(t) = tol {
        c.rel_tol = t;
    }
    Ok(c)
}

fn single(config: &RunConfig) -> Result<Output> {
    let r = evaluate(config)?;
    let (table, title) = match &r.scan {
        Some(s) => (scan_table(s), "cutoff scan (results.csv)"),
        None => (record_table(&r), "result quantities (results.csv)"),
    };
    Ok(Output { json: to_json(&r)?, table, title: title.into(), summary: summary(&r) })
}

fn sweep(config: &RunConfig, spec: &SweepSpec) -> Result<Output> {
    let points = run_sweep(config, spec)?;
    let table = sweep_table(spec, &points);
    let warned = points.iter().filter(|p| !p.warnings.is_empty()).count();
    let summary = format!(
        "{} sweep over {} in {} steps from {} to {} {} ({warned} points with warnings)\n",
        config.name,
        spec.param.name(),
        spec.steps,
        spec.min,
        spec.max,
        spec.param.unit()
    );
    Ok(Output {
        json: to_json(&SweepRecord { sweep: spec, points: &points })?,
        table,
        title: "parameter sweep (results.csv)".into(),
        summary,
    })
}

fn execute(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Preset { name, mode } => {
            let mut c = RunConfig::preset(name)?;
            if let Some(m) = mode {
                c.mode = *m;
            }
            if let Some(t) = cli.tol {
                c.rel_tol = t;
            }
            single(&c)
        }
        Command::Run { config } => {
            let c = load(config, cli.tol)?;
            match (&c.mode, &c.sweep) {
                (Mode::Sweep, Some(s)) => sweep(&c, &s.clone()),
                _ => single(&c),
            }
        }
        Command::Scan { config } => {
            let mut c = load(config, cli.tol)?;
            c.mode = Mode::Scan;
            single(&c)
        }
        Command::Sweep { config, param, min, max, steps } => {
            let mut c = load(config, cli.tol)?;
            let spec = SweepSpec { param: *param, min: *min, max: *max, steps: *steps };
            c.sweep = Some(spec.clone());
            c.validate()?;
            sweep(&c, &spec)
        }
    }
}

fn write(dir: &Path, out: &Output) -> Result<()> {
    let io = |e: std::io::Error| Error::Io(format!("{}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io)?;
    fs::write(dir.join("results.json"), &out.json).map_err(io)?;
    fs::write(dir.join("results.csv"), out.table.to_csv()).map_err(io)?;
    fs::write(dir.join("schema.txt"), out.table.schema(&out.title)).map_err(io)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = execute(&cli).and_then(|out| {
        match &cli.out {
            Some(dir) => {
                write(dir, &out)?;
                if !cli.quiet {
                    print!("{}", out.summary);
                    println!("wrote {}", dir.display());
                }
            }
            None => {
                if !cli.quiet {
                    eprint!("{}", out.summary);
                }
                match cli.format {
                    Format::Json => print!("{}", out.json),
                    Format::Csv => print!("{}", out.table.to_csv()),
                }
            }
        }
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
