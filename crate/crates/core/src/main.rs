use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use bellsim::harness::{
    self, run_relativity_example, run_series_demo, run_stage, run_sweep, theta_grid,
    ExperimentConfig, HarnessError, RelativityScenario, SeriesDemoConfig, SeriesDemoMode,
    SignalScenario, Stage, SweepOptions,
};
use bellsim::{BellVerdict, Model, OutcomeSeries, PhiPolicy, SpacetimeEvent, C_EXACT, C_SI};

#[derive(Parser)]
#[command(
    name = "bellsim",
    version,
    about = "Bell-experiment Monte Carlo and frame-dependent causality"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one stage of the four-stage polarizer experiment.
    Stage(StageArgs),
    /// Sweep the polarizer angle and tabulate E(θ) (CSV via --out).
    Sweep(SweepArgs),
    /// Mismatch distribution of two k-flip copies of a base series.
    SeriesDemo(SeriesArgs),
    /// Detection events in two frames and their causal classification.
    Relativity(RelativityArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Qm,
    #[value(name = "lhv_threshold", alias = "lhv-threshold")]
    LhvThreshold,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Model {
        match m {
            ModelArg::Qm => Model::Qm,
            ModelArg::LhvThreshold => Model::LhvThreshold,
        }
    }
}

/// Experiment settings shared by `stage` and `sweep`; flags override the
/// JSON config file.
#[derive(Args)]
struct ExperimentArgs {
    #[arg(long, value_enum)]
    model: Option<ModelArg>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// `uniform` or `fixed:<degrees>`.
    #[arg(long)]
    phi: Option<String>,
    /// Let detector B register first.
    #[arg(long)]
    measure_b_first: bool,
    /// JSON file with ExperimentConfig fields.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl ExperimentArgs {
    fn resolve(&self) -> Result<ExperimentConfig, HarnessError> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_json(
                &std::fs::read_to_string(path)
                    .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?,
            )?,
            None => ExperimentConfig::default(),
        };
        if let Some(m) = self.model {
            cfg.model = m.into();
        }
        if let Some(t) = self.trials {
            cfg.trials = t;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(phi) = &self.phi {
            cfg.phi_policy = phi.parse::<PhiPolicy<f64>>()?;
        }
        if self.measure_b_first {
            cfg.measure_a_first = false;
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct StageArgs {
    #[command(flatten)]
    experiment: ExperimentArgs,
    /// Stage 1-4; all four when omitted.
    #[arg(long)]
    stage: Option<u8>,
    #[arg(long)]
    theta_deg: Option<f64>,
    /// Write the results as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    experiment: ExperimentArgs,
    #[arg(long, default_value_t = 0.0)]
    theta_start: f64,
    /// Defaults to 90, or 45 with --gap-mode.
    #[arg(long)]
    theta_end: Option<f64>,
    #[arg(long, default_value_t = 5.0)]
    theta_step: f64,
    /// Also run stage 4 and test E(2θ) ≤ 2E(θ) at each angle.
    #[arg(long)]
    gap_mode: bool,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// CSV output path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SeriesModeArg {
    Sampled,
    Exhaustive,
}

#[derive(Args)]
struct SeriesArgs {
    #[arg(long, default_value_t = 12)]
    n: usize,
    #[arg(long, default_value_t = 4)]
    k: usize,
    #[arg(long, value_enum, default_value = "exhaustive")]
    mode: SeriesModeArg,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = harness::DEFAULT_SEED)]
    seed: u64,
    /// Base series such as `0,0,1,0`; defaults to the 12-digit reference
    /// series for n = 12.
    #[arg(long)]
    base: Option<String>,
    /// Write the report as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioArg {
    Paper,
    Custom,
}

#[derive(Args)]
struct RelativityArgs {
    #[arg(long, value_enum, default_value = "paper")]
    scenario: ScenarioArg,
    /// Position of event 1 in meters.
    #[arg(long, allow_hyphen_values = true)]
    x1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t1_ns: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    x2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t2_ns: Option<f64>,
    /// Velocity of the second observer as a fraction of c.
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    /// Speed of an explicit signal, in units of c.
    #[arg(long)]
    u_over_c: Option<f64>,
    /// Distance covered by the signal in meters (default: one light-second).
    #[arg(long, allow_hyphen_values = true)]
    signal_dx: Option<f64>,
    /// Use c = 3e8 m/s exactly (default).
    #[arg(long, conflicts_with = "c_si")]
    c_exact: bool,
    /// Use the SI value c = 299792458 m/s.
    #[arg(long)]
    c_si: bool,
    /// Treat the two events as uncorrelated.
    #[arg(long)]
    not_entangled: bool,
    /// Write the report as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), HarnessError> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| HarnessError::Io(e.into()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn cmd_stage(args: StageArgs) -> Result<(), HarnessError> {
    let mut cfg = args.experiment.resolve()?;
    if let Some(theta) = args.theta_deg {
        cfg.theta = theta;
    }
    let stages = match args.stage {
        Some(n) => vec![Stage::try_from(n)?],
        None => Stage::ALL.to_vec(),
    };
    println!(
        "model = {}, theta = {}°, trials = {}, seed = {}, phi = {}, first = {}",
        cfg.model,
        cfg.theta,
        cfg.trials,
        cfg.seed,
        cfg.phi_policy,
        if cfg.measure_a_first { "A" } else { "B" }
    );
    let mut results = Vec::new();
    for stage in stages {
        let r = run_stage(&cfg, stage)?;
        let rel = r.axis_a.relative_to(r.axis_b);
        println!(
            "{}: axes A = {}°, B = {}° (apart {}°)  E = {:.6} ± {:.6}  F = {:.6}  [expected {:.6}]",
            r.stage,
            r.axis_a.degrees(),
            r.axis_b.degrees(),
            rel,
            r.stats.e(),
            r.stats.ci_half_width(),
            r.stats.f(),
            cfg.model
                .analytic_mismatch(bellsim::Angle::from_degrees(rel)),
        );
        results.push(r);
    }
    if let Some(path) = args.out {
        write_json(&path, &results)?;
    }
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<(), HarnessError> {
    let cfg = args.experiment.resolve()?;
    let end = args
        .theta_end
        .unwrap_or(if args.gap_mode { 45.0 } else { 90.0 });
    let grid = theta_grid(args.theta_start, end, args.theta_step)?;
    let options = SweepOptions {
        gap_mode: args.gap_mode,
        workers: args.threads,
    };
    let table = match &args.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            run_sweep(&cfg, &grid, options, &mut w)?
        }
        None => run_sweep(&cfg, &grid, options, &mut std::io::sink())?,
    };
    println!(
        "model = {}, trials per angle = {}, seed = {}",
        cfg.model, cfg.trials, cfg.seed
    );
    println!(
        "{:>8} {:>10} {:>10} {:>10} {:>10}",
        "theta", "E_mc", "±3σ", "sin²θ", "θ/90°"
    );
    for row in &table.rows {
        print!(
            "{:>8.3} {:>10.6} {:>10.6} {:>10.6} {:>10.6}",
            row.theta_deg, row.e_mc, row.ci3, row.e_qm_analytic, row.e_line_analytic
        );
        if let Some(gap) = &row.gap {
            print!(
                "  E(2θ) = {:.6}  gap = {:+.6}  {}",
                gap.e_2theta.e(),
                gap.gap,
                gap.verdict
            );
        }
        println!();
    }
    if table.gap_mode {
        let violations = table
            .rows
            .iter()
            .filter(|r| {
                r.gap
                    .is_some_and(|g| g.verdict == BellVerdict::ViolatesBell)
            })
            .count();
        println!(
            "{violations} of {} angles violate E(2θ) ≤ 2E(θ)",
            table.rows.len()
        );
    }
    if let Some(path) = &args.out {
        println!("CSV written to {}", path.display());
    }
    Ok(())
}

fn cmd_series(args: SeriesArgs) -> Result<(), HarnessError> {
    let base = args
        .base
        .as_deref()
        .map(str::parse::<OutcomeSeries>)
        .transpose()?;
    let cfg = SeriesDemoConfig {
        n: base.as_ref().map_or(args.n, OutcomeSeries::len),
        k: args.k,
        seed: args.seed,
        mode: match args.mode {
            SeriesModeArg::Exhaustive => SeriesDemoMode::Exhaustive,
            SeriesModeArg::Sampled => SeriesDemoMode::Sampled {
                samples: args.samples,
            },
        },
        base,
    };
    let report = run_series_demo(&cfg)?;
    println!("{report}");
    if let Some(path) = args.out {
        write_json(&path, &report)?;
    }
    Ok(())
}

fn cmd_relativity(args: RelativityArgs) -> Result<(), HarnessError> {
    let mut scenario = RelativityScenario::paper_default();
    let c = if args.c_si { C_SI } else { C_EXACT };
    scenario.c = c;
    if args.not_entangled {
        scenario.entangled = false;
    }
    if let ScenarioArg::Custom = args.scenario {
        let label1 = scenario.event1.label.clone();
        let label2 = scenario.event2.label.clone();
        scenario.event1 = SpacetimeEvent::new(
            args.x1.unwrap_or(scenario.event1.x),
            args.t1_ns.map_or(scenario.event1.t, |t| t * 1e-9),
            label1,
        )?;
        scenario.event2 = SpacetimeEvent::new(
            args.x2.unwrap_or(scenario.event2.x),
            args.t2_ns.map_or(scenario.event2.t, |t| t * 1e-9),
            label2,
        )?;
        if let Some(beta) = args.beta {
            scenario.frame_beta = beta;
        }
        scenario.signal = args.u_over_c.map(|u| SignalScenario {
            u_over_c: u,
            delta_x: args.signal_dx.unwrap_or(c),
            beta: scenario.frame_beta,
        });
    } else if let Some(signal) = scenario.signal.as_mut() {
        signal.delta_x = c;
    }
    let report = run_relativity_example(&scenario)?;
    println!("{report}");
    if let Some(path) = args.out {
        write_json(&path, &report)?;
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
    let result = match cli.command {
        Command::Stage(args) => cmd_stage(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::SeriesDemo(args) => cmd_series(args),
        Command::Relativity(args) => cmd_relativity(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
