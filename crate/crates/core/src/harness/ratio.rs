use std::io::Write;

use num_traits::ToPrimitive;
use rayon::prelude::*;

use super::config::{ExperimentConfig, Mode};
use super::functions::{boundary_integral, fiber_integral, PointFunction};
use super::{csv_err, csv_writer, fmt_float, fmt_opt, task_seeds, with_pool};
use crate::actions::{registry_get, XPoint};
use crate::boundary::BoundaryPrefix;
use crate::error::Result;
use crate::relation_engine::{ratio_series, skew_extend, HoroballSequence, RatioSeries, TailCocycle};

/// How many leading samples seed the cocycle audit of the skew product.
const AUDIT_SAMPLES: usize = 4;

#[derive(Debug, Clone)]
pub struct RatioSample {
    pub sample_id: usize,
    pub point: String,
    /// Per-sample failures (vanishing denominators, domain errors) are kept
    /// here so the rest of the run goes on.
    pub series: std::result::Result<RatioSeries, String>,
}

#[derive(Debug, Clone)]
pub struct RatioRun {
    /// Known limit of the ratio, if the configured case identifies one.
    pub reference: Option<f64>,
    pub samples: Vec<RatioSample>,
    pub exploratory: bool,
}

impl RatioRun {
    pub fn failures(&self) -> impl Iterator<Item = (usize, &str)> {
        self.samples
            .iter()
            .filter_map(|s| s.series.as_ref().err().map(|e| (s.sample_id, e.as_str())))
    }

    /// Ratios at the last index, one per successful sample.
    pub fn final_ratios(&self) -> Vec<f64> {
        self.samples
            .iter()
            .filter_map(|s| s.series.as_ref().ok())
            .filter_map(|s| s.last().map(|r| r.ratio.to_f64()))
            .collect()
    }
}

/// `∫u/∫v` when the limit is identified: the boundary-only case (trivial
/// fiber) and the measure-preserving probability fiber `so3_sphere`.
pub fn reference_limit(cfg: &ExperimentConfig) -> Result<Option<f64>> {
    if cfg.mode == Mode::ExploratorySphere || !matches!(cfg.action.as_str(), "trivial" | "so3_sphere") {
        return Ok(None);
    }
    let (Some(fu), Some(fv)) = (fiber_integral(&cfg.u.x, &cfg.action), fiber_integral(&cfg.v.x, &cfg.action)) else {
        return Ok(None);
    };
    let bu = boundary_integral(&cfg.u, cfg.rank)?.to_f64().unwrap_or(f64::NAN);
    let bv = boundary_integral(&cfg.v, cfg.rank)?.to_f64().unwrap_or(f64::NAN);
    Ok(Some(bu * fu / (bv * fv)))
}

/// Ratio trajectories along the skew-extended horoball sequence at
/// `cfg.samples` random points `(ξ, x)`.
pub fn run_ratio_convergence(cfg: &ExperimentConfig) -> Result<RatioRun> {
    cfg.validate()?;
    let action = registry_get(&cfg.action, cfg.rank)?;
    let u = PointFunction::new(&cfg.u)?;
    let v = PointFunction::new(&cfg.v)?;
    let mut base = HoroballSequence::new(cfg.rank);
    if cfg.mode == Mode::ExploratorySphere {
        base = base.sphere_only();
    }
    let depth = cfg.n_max + 2;
    let draw = |id: usize| -> Result<(BoundaryPrefix, XPoint)> {
        let [s_xi, s_x] = task_seeds::<2>(cfg.seed, id as u64);
        let xi = BoundaryPrefix::sample(cfg.rank, s_xi, depth);
        let (x, _) = action.sample_point(s_x)?;
        Ok((xi, x))
    };
    let audit: Vec<BoundaryPrefix> = (0..cfg.samples.min(AUDIT_SAMPLES))
        .map(|id| draw(id).map(|p| p.0))
        .collect::<Result<_>>()?;
    let skew = skew_extend(base, TailCocycle, action.clone(), &audit, cfg.n_max.min(3))?;
    let reference = reference_limit(cfg)?;
    let samples = with_pool(cfg.threads, || {
        (0..cfg.samples)
            .into_par_iter()
            .map(|id| {
                let (point, series) = match draw(id) {
                    Ok(p) => {
                        let label = format!("{}|seed={}|x={}", p.0, p.0.seed(), p.1);
                        let s = ratio_series(&skew, &|q| u.eval(q), &|q| v.eval(q), &p, cfg.n_max);
                        (label, s.map_err(|e| e.to_string()))
                    }
                    Err(e) => (String::new(), Err(e.to_string())),
                };
                RatioSample {
                    sample_id: id,
                    point,
                    series,
                }
            })
            .collect::<Vec<_>>()
    })?;
    Ok(RatioRun {
        reference,
        samples,
        exploratory: cfg.mode == Mode::ExploratorySphere,
    })
}

/// Columns `sample_id, n, sum_u, sum_v, ratio, running_max, reference,
/// abs_deviation`; failed samples contribute no rows.
pub fn write_ratio_csv<W: Write>(run: &RatioRun, mut out: W) -> Result<()> {
    if run.exploratory {
        writeln!(out, "# no-claim: exploratory sphere mode, |g| = 2n only")?;
    }
    let mut w = csv_writer(out);
    w.write_record(["sample_id", "n", "sum_u", "sum_v", "ratio", "running_max", "reference", "abs_deviation"])
        .map_err(csv_err)?;
    for s in &run.samples {
        let Ok(series) = &s.series else { continue };
        for r in &series.records {
            let ratio = r.ratio.to_f64();
            let dev = run.reference.map(|t| (ratio - t).abs());
            w.write_record([
                s.sample_id.to_string(),
                r.n.to_string(),
                fmt_float(r.sum_u.to_f64()),
                fmt_float(r.sum_v.to_f64()),
                fmt_float(ratio),
                fmt_float(r.running_max.to_f64()),
                fmt_opt(run.reference),
                fmt_opt(dev),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}
