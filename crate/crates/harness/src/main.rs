use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use mugatu_core::model::check_design_rules;
use mugatu_harness::sweep::write_csv;
use mugatu_harness::{
    gait_search, run_speed_sweep, run_trial, run_turn_sweep, stability_boundary, ExperimentConfig,
    HarnessError, Objective, SweepResult,
};

#[derive(Parser)]
#[command(name = "mugatu", version, about = "Simulate and analyse the mugatu single-motor biped")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the five passive-stability design rules for a walker file.
    CheckRules {
        walker: PathBuf,
        /// Print the full report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Run the single trial described by the config's gait section.
    Simulate(RunArgs),
    /// Frequency x amplitude sweep with symmetric leg swing.
    SpeedSweep(RunArgs),
    /// Frequency x amplitude-difference sweep.
    TurnSweep(RunArgs),
    /// Speed sweep followed by a ranking of the stable cells.
    Search {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum)]
        objective: Objective,
    },
}

#[derive(Args)]
struct RunArgs {
    config: PathBuf,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Integration step, s.
    #[arg(long)]
    dt: Option<f64>,
    /// Trial length, s.
    #[arg(long)]
    duration: Option<f64>,
    #[arg(long)]
    parallelism: Option<usize>,
}

impl RunArgs {
    fn load(&self) -> Result<ExperimentConfig, HarnessError> {
        let mut cfg = ExperimentConfig::load(&self.config)?;
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        if let Some(dt) = self.dt {
            cfg.dt = dt;
        }
        if let Some(d) = self.duration {
            cfg.duration = d;
        }
        if let Some(p) = self.parallelism {
            cfg.parallelism = p;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::CheckRules { walker, json } => check_rules(walker, json),
        Command::Simulate(args) => simulate(&args.load()?),
        Command::SpeedSweep(args) => {
            let result = run_speed_sweep(&args.load()?)?;
            summarize(&result);
            Ok(())
        }
        Command::TurnSweep(args) => {
            let result = run_turn_sweep(&args.load()?)?;
            summarize(&result);
            Ok(())
        }
        Command::Search { run, objective } => search(&run.load()?, objective),
    }
}

fn check_rules(walker: PathBuf, json: bool) -> Result<(), HarnessError> {
    let params = mugatu_core::model::WalkerParams::load(&walker)
        .map_err(|e| HarnessError::from_model(e).in_file(&walker))?;
    let report = check_design_rules(&params);
    if json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serialises"));
        return Ok(());
    }
    for r in &report.rules {
        let verdict = match (r.passed, r.advisory) {
            (true, _) => "pass",
            (false, true) => "advisory",
            (false, false) => "FAIL",
        };
        println!(
            "rule {}: {:<8} measured {:>10.4}  threshold {:>10.4}  {}",
            r.rule, verdict, r.measured, r.threshold, r.explanation
        );
    }
    println!("yaw inertia ratio: {:.3}", report.yaw_inertia_ratio);
    Ok(())
}

fn simulate(cfg: &ExperimentConfig) -> Result<(), HarnessError> {
    let params = cfg.load_walker()?;
    let cmd = cfg.gait.command()?;
    let record = run_trial(cfg, &params, &cmd, "trial", &cfg.output_dir)?;
    println!("{}", serde_json::to_string_pretty(&record).expect("record serialises"));
    match record.diverged_at {
        Some(time) => Err(HarnessError::Diverged { label: "trial".into(), time }),
        None => Ok(()),
    }
}

fn summarize(result: &SweepResult) {
    let stable = result.cells.iter().filter(|c| c.record.stable).count();
    println!(
        "{} cells ({} stable) written to {}",
        result.cells.len(),
        stable,
        result.output_dir.display()
    );
    for c in &result.cells {
        let speed = c.record.speed().map_or("-".to_string(), |v| format!("{v:.3} m/s"));
        let status = if c.record.stable { "stable" } else { "unstable" };
        println!("  {:<18} {:<9} {}", c.cell.label(), status, speed);
    }
}

fn search(cfg: &ExperimentConfig, objective: Objective) -> Result<(), HarnessError> {
    let result = run_speed_sweep(cfg)?;
    summarize(&result);
    for b in stability_boundary(&result.cells) {
        let hz = |v: Option<f64>| v.map_or("none".to_string(), |f| format!("{f:.2} Hz"));
        println!(
            "amplitude {:.1} deg: lowest stable {}, fastest {}{}",
            b.amplitude_deg,
            hz(b.lowest_stable_hz),
            hz(b.fastest_hz),
            if b.fastest_at_boundary { " (at boundary)" } else { "" }
        );
    }
    let ranked = gait_search(&result.cells, objective)?;
    write_csv(&result.output_dir.join("ranking.csv"), &ranked)?;
    println!("rank  freq_hz  amp_deg  speed    cot_total");
    for r in &ranked {
        let cot = r.cot_total.map_or("-".to_string(), |c| format!("{c:.2}"));
        println!("{:>4}  {:>7.2}  {:>7.1}  {:.3}    {}", r.rank, r.frequency_hz, r.amplitude_deg, r.speed, cot);
    }
    Ok(())
}
