use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hororatio::harness::{
    create, run_audit_suite, run_counterexample_j, run_ratio_convergence, write_audit_reports, write_j_csv,
    write_ratio_csv, ExperimentConfig,
};
use hororatio::Result;

#[derive(Parser)]
#[command(version, about = "Horospherical ratio averages on free groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ratio trajectories along skew-extended horoballs.
    RatioConverge(Common),
    /// Property checks and maximal-inequality audits.
    Audit(Common),
    /// J-window invariance under relation moves.
    CounterexampleJ(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    threads: Option<usize>,
    /// Overrides the seed in the config file.
    #[arg(long)]
    seed: Option<u64>,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::load(&self.config)?;
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if self.threads.is_some() {
            cfg.threads = self.threads;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::RatioConverge(c) => {
            let cfg = c.load()?;
            let run = run_ratio_convergence(&cfg)?;
            write_ratio_csv(&run, create(&c.out)?)?;
            for (id, e) in run.failures() {
                eprintln!("sample {id}: {e}");
            }
            let ok = run.samples.len() - run.failures().count();
            println!("{ok}/{} samples written to {}", run.samples.len(), c.out.display());
        }
        Command::Audit(c) => {
            let cfg = c.load()?;
            let run = run_audit_suite(&cfg)?;
            let paths = write_audit_reports(&run, &c.out)?;
            for s in &run.properties {
                for r in &s.report.rows {
                    println!("{} {}: {}", s.subject, r.property, r.outcome);
                }
            }
            for (id, e) in run.model_errors() {
                eprintln!("model {id}: {e}");
            }
            let (stated, doob) = run.lp_violations(&cfg.p_values);
            println!("weak-type violations: {}", run.weak_violations());
            println!("Lp violations, stated constant p/(p-1): {stated:?} for p = {:?}", cfg.p_values);
            println!("Lp violations, constant (p/(p-1))^p: {doob:?}");
            for p in paths {
                println!("wrote {}", p.display());
            }
        }
        Command::CounterexampleJ(c) => {
            let cfg = c.load()?;
            let run = run_counterexample_j(&cfg)?;
            write_j_csv(&run, create(&c.out)?)?;
            let equal = run.rows.iter().filter(|r| r.equal).count();
            println!("{equal}/{} moves preserve the window", run.rows.len());
            println!("distinct windows across pairs: {}", run.distinct_windows);
            println!("degenerate pairs resampled: {}", run.resampled);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
