//! Drive an experiment from a key-value config, as the `hsr` binary does.
use hoelder_sr::cli::{emit_report, run_experiment, ExperimentConfig, OutputFormat};

const CONFIG: &str = "
kind = scaling
seed = 1
model.kind = heisenberg
scaling.epsilons = 0.1, 0.05, 0.02, 0.01
optimizer.restarts = 4
";

fn main() -> hoelder_sr::Result<()> {
    let cfg = ExperimentConfig::parse(CONFIG, None)?;
    let report = run_experiment(&cfg)?;
    for a in &report.assertions {
        println!("{} {}", if a.passed { "PASS" } else { "FAIL" }, a.name);
    }
    println!("slope {}", report.outputs["fitted_slope"]);
    for path in emit_report(&report, OutputFormat::Csv, "out/run_config".as_ref())? {
        println!("wrote {}", path.display());
    }
    std::process::exit(report.exit_code());
}
