use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hoelder_sr::cli::{
    emit_report, run_experiment, ExperimentConfig, ExperimentKind, OutputFormat,
};
use hoelder_sr::kv::Record;
use hoelder_sr::verify::{run_all, run_criterion, VerifyOptions};

#[derive(Parser)]
#[command(
    name = "hsr",
    version,
    about = "Hoelder subriemannian distance experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Common {
    /// Key-value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; defaults to the config's `out`, then `out/<kind>`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a Weierstrass field and estimate its norm.
    Synth(Common),
    /// Hoelder norm estimates under grid refinement.
    Norm(Common),
    /// Upper estimate of the horizontal distance between two points.
    Dist(Common),
    /// Reachability probe with short horizontal paths.
    Probe(Common),
    /// Empirical Stokes constant over random disks.
    Stokes(Common),
    /// Fill loops with disks.
    Fill(Common),
    /// Vertical scaling of the distance, with the pointwise lower bound.
    Scaling(Common),
    /// C(theta) as theta tends to 1.
    Limits(Common),
    /// Run a config, taking the kind from the file.
    Run(Common),
    /// Run the acceptance criteria.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Run only these criteria.
        #[arg(long = "only")]
        only: Vec<u8>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(common: Common, kind: Option<ExperimentKind>) -> Result<i32, hoelder_sr::Error> {
    let mut record = match &common.config {
        Some(p) => Record::parse(&fs::read_to_string(p)?)?,
        None => Record::new(),
    };
    if let Some(seed) = common.seed {
        record.set("seed", seed);
    }
    let cfg = ExperimentConfig::from_record(&record, kind)?;
    let format = match common.format {
        Some(Format::Csv) => OutputFormat::Csv,
        Some(Format::Json) => OutputFormat::Json,
        None => cfg.format,
    };
    let out = common
        .out
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("out").join(cfg.kind.name()));
    let report = run_experiment(&cfg)?;
    let files = emit_report(&report, format, &out)?;
    for a in &report.assertions {
        println!(
            "{} {}  {}",
            if a.passed { "PASS" } else { "FAIL" },
            a.name,
            a.detail
        );
    }
    if report.unconverged > 0 {
        println!("{} estimate(s) unconverged", report.unconverged);
    }
    println!(
        "{} in {:.2?}: {} file(s) in {}",
        cfg.kind,
        report.elapsed,
        files.len(),
        out.display()
    );
    Ok(report.exit_code())
}

fn verify(seed: u64, only: Vec<u8>, out: Option<PathBuf>) -> Result<i32, hoelder_sr::Error> {
    let opts = VerifyOptions {
        seed,
        ..VerifyOptions::default()
    };
    let outcomes = if only.is_empty() {
        run_all(&opts)
    } else {
        only.iter()
            .map(|&id| run_criterion(id, &opts))
            .collect::<Result<Vec<_>, _>>()?
    };
    for o in &outcomes {
        println!("{o}");
    }
    if let Some(dir) = out {
        fs::create_dir_all(&dir)?;
        fs::write(
            dir.join("verify.json"),
            serde_json::to_string_pretty(&outcomes)?,
        )?;
    }
    Ok(if outcomes.iter().all(|o| o.passed) {
        0
    } else {
        1
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Synth(c) => run(c, Some(ExperimentKind::Synth)),
        Command::Norm(c) => run(c, Some(ExperimentKind::Norm)),
        Command::Dist(c) => run(c, Some(ExperimentKind::Dist)),
        Command::Probe(c) => run(c, Some(ExperimentKind::Probe)),
        Command::Stokes(c) => run(c, Some(ExperimentKind::Stokes)),
        Command::Fill(c) => run(c, Some(ExperimentKind::Fill)),
        Command::Scaling(c) => run(c, Some(ExperimentKind::Scaling)),
        Command::Limits(c) => run(c, Some(ExperimentKind::Limits)),
        Command::Run(c) => run(c, None),
        Command::Verify { seed, only, out } => verify(seed, only, out),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
