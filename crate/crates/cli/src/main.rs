use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cdsvar::cds::{cds_report, fmt_amount, parse_contract};
use cdsvar::report::{run_study, write_atomic, StudyConfig};
use cdsvar::simulator::{generate_dataset, SimulationRequest};
use cdsvar::Error;
use chrono::NaiveDate;
use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "cdsvar",
    version,
    about = "Share, CDS and bond market interdependence study"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the full study and write tables, plots and a manifest.
    Study(StudyArgs),
    /// Print the premium schedule, payout and P&L of one CDS contract.
    Cds {
        #[arg(long)]
        contract: PathBuf,
        /// Print the report as JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Generate a market-data dataset from a simulation spec.
    Simulate {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Override the seed of a paper-shaped spec.
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Debug, clap::Args)]
struct StudyArgs {
    /// JSON config; relative paths in it resolve against its directory.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    observations: Option<PathBuf>,
    #[arg(long)]
    entities: Option<PathBuf>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    lag_order: Option<usize>,
    /// Comma-separated YYYY-MM-DD dates; pass an empty string for none.
    #[arg(long)]
    breakpoints: Option<String>,
    #[arg(long)]
    significance: Option<f64>,
    #[arg(long)]
    irf_horizon: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    var1_end: Option<NaiveDate>,
    #[arg(long)]
    var2_end: Option<NaiveDate>,
    /// Skip the SVG plots.
    #[arg(long)]
    no_plots: bool,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } | Error::Json(_) | Error::Csv(_) => 2,
        Error::Io(_) => 1,
        _ => 3,
    }
}

fn study_config(args: StudyArgs) -> Result<StudyConfig, Error> {
    let mut cfg = match &args.config {
        Some(p) => StudyConfig::from_path(p)?,
        None => StudyConfig::default(),
    };
    if let Some(p) = args.observations {
        cfg.observations = p;
    }
    if let Some(p) = args.entities {
        cfg.entities = p;
    }
    if let Some(p) = args.output_dir {
        cfg.output_dir = p;
    }
    if let Some(x) = args.lag_order {
        cfg.lag_order = x;
    }
    if let Some(list) = args.breakpoints {
        cfg.breakpoints = list
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse()
                    .map_err(|e| Error::parse(0, "--breakpoints", format!("{s:?}: {e}")))
            })
            .collect::<Result<_, _>>()?;
    }
    if let Some(x) = args.significance {
        cfg.significance = x;
    }
    if let Some(x) = args.irf_horizon {
        cfg.irf_horizon = x;
    }
    if let Some(x) = args.seed {
        cfg.seed = x;
    }
    if let Some(d) = args.var1_end {
        cfg.var1_end = d;
    }
    if let Some(d) = args.var2_end {
        cfg.var2_end = d;
    }
    if args.no_plots {
        cfg.plots = false;
    }
    Ok(cfg)
}

fn study(args: StudyArgs) -> Result<(), Error> {
    let cfg = study_config(args)?;
    let outcome = run_study(&cfg)?;
    for run in &outcome.runs {
        let totals = run
            .causality
            .as_ref()
            .map(|t| {
                t.directions
                    .iter()
                    .zip(&t.totals)
                    .map(|(&d, n)| {
                        format!(
                            "{}={n}",
                            cdsvar::causality::CausalityTable::<f64>::direction_label(d)
                        )
                    })
                    .collect::<Vec<_>>()
                    .join(", ")
            })
            .unwrap_or_default();
        println!(
            "{} {:<5} entities={:<2} skipped={:<2} {}",
            run.model.name(),
            run.period.label,
            run.entities.len(),
            run.skipped.len(),
            totals
        );
    }
    println!(
        "wrote {} files to {}",
        outcome.files.len(),
        cfg.output_dir.display()
    );
    Ok(())
}

fn cds(contract: &Path, as_json: bool) -> Result<(), Error> {
    let contract = parse_contract(&fs::read_to_string(contract)?)?;
    let (report, schedule) = cds_report(&contract)?;
    if as_json {
        println!(
            "{}",
            serde_json::to_string_pretty(
                &serde_json::json!({ "report": report, "schedule": schedule })
            )?
        );
        return Ok(());
    }
    println!("reference entity: {}", contract.reference_entity);
    println!("premium per period: {}", fmt_amount(&report.period_payment));
    println!("periods: {}", report.periods);
    println!("total premium: {}", fmt_amount(&report.total_premium));
    println!("default payout: {}", fmt_amount(&report.default_payout));
    println!(
        "no credit event, {} periods paid: buyer {}, seller {}",
        report.periods,
        fmt_amount(&report.no_event.buyer),
        fmt_amount(&report.no_event.seller)
    );
    println!(
        "credit event before the first payment: buyer {}, seller {}",
        fmt_amount(&report.immediate_event.buyer),
        fmt_amount(&report.immediate_event.seller)
    );
    println!();
    schedule.write_csv(std::io::stdout().lock())?;
    Ok(())
}

fn simulate(spec: &Path, out: &Path, seed: Option<u64>) -> Result<(), Error> {
    let text = fs::read_to_string(spec)?;
    let mut request: SimulationRequest = serde_json::from_str(&text)
        .map_err(|e| Error::parse(e.line() as u64, e.column().to_string(), e.to_string()))?;
    if let (Some(s), SimulationRequest::PaperShaped(cfg)) = (seed, &mut request) {
        cfg.seed = s;
    }
    let batch = generate_dataset(&request)?;
    let mut obs = Vec::new();
    let mut ents = Vec::new();
    batch.write_csv(&mut obs, &mut ents)?;
    write_atomic(&out.join("observations.csv"), &obs)?;
    write_atomic(&out.join("entities.csv"), &ents)?;
    println!(
        "wrote {} entities, {} observation rows to {}",
        batch.records.len(),
        batch.observation_rows().len(),
        out.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Study(args) => study(args),
        Command::Cds { contract, json } => cds(&contract, json),
        Command::Simulate { spec, out, seed } => simulate(&spec, &out, seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
