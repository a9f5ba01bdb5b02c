//! Experiment runner behind the CLI: ratio convergence along skew-extended
//! horoballs, property and maximal-inequality audits, and the J-window
//! invariance experiment. Every report is a deterministic CSV.

mod audit;
mod config;
mod counterexample;
mod functions;
mod ratio;

pub use audit::{audit_model, run_audit_suite, write_audit_reports, AuditRun, ModelAudit, PropertySection};
pub use config::{ExperimentConfig, FunctionSpec, Mode, XFunction};
pub use counterexample::{random_horosphere_word, run_counterexample_j, write_j_csv, JRun, JRow};
pub use functions::{boundary_integral, fiber_integral, PointFunction};
pub use ratio::{reference_limit, run_ratio_convergence, write_ratio_csv, RatioRun, RatioSample};

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Independent seeds for task `id`: stream `id` of the master ChaCha8 key.
/// Scheduling order never changes which seeds a task receives.
pub fn task_seeds<const K: usize>(master: u64, id: u64) -> [u64; K] {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(id);
    std::array::from_fn(|_| rng.next_u64())
}

/// Runs `f` on a dedicated pool with `threads` workers (all cores if `None`).
pub fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Seventeen significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub(crate) fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

/// Buffered writer on a fresh file.
pub fn create(path: &Path) -> Result<BufWriter<File>> {
    let file = File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(BufWriter::new(file))
}

pub(crate) fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out)
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_depend_only_on_master_and_id() {
        let a: [u64; 2] = task_seeds(7, 3);
        let b: [u64; 2] = task_seeds(7, 3);
        let c: [u64; 2] = task_seeds(7, 4);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a[0], a[1]);
    }

    #[test]
    fn floats_have_seventeen_digits() {
        assert_eq!(fmt_float(0.25), "2.5000000000000000e-1");
        assert_eq!(fmt_float(1.0 / 3.0).split('e').next().unwrap().len(), 18);
    }
}
