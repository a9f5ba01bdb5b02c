use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::ExperimentConfig;
use super::{create, csv_err, csv_writer, fmt_float, task_seeds, with_pool};
use crate::actions::{registry_get, XPoint};
use crate::boundary::BoundaryPrefix;
use crate::error::Result;
use crate::relation_engine::{
    audit_maximal, check_properties, default_epsilon_grid, random_skew_model, skew_extend, FiniteModel,
    HoroballSequence, InnerAutomorphism, MaximalAudit, PrefixAutomorphism, PropertyOutcome, PropertyReport,
    PropertyRow, Scalar, SubsetFunctionSeq, TailCocycle, ANCHORED, BESICOVICH, INVARIANCE,
};

const PROPERTY_POINTS: usize = 4;
const PAIR_INDEX: usize = 3;
const SURROGATE_SIZE: usize = 12;

/// Stream ids reserved for the property checks; model `k` uses stream `k`.
const PROPERTY_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone)]
pub struct PropertySection {
    pub subject: String,
    pub report: PropertyReport,
}

#[derive(Debug, Clone)]
pub struct ModelAudit {
    pub model_id: usize,
    pub points: usize,
    pub audit: std::result::Result<MaximalAudit, String>,
}

#[derive(Debug, Clone)]
pub struct AuditRun {
    pub properties: Vec<PropertySection>,
    pub models: Vec<ModelAudit>,
}

impl AuditRun {
    pub fn weak_violations(&self) -> usize {
        self.audits().map(|a| a.weak.iter().filter(|r| !r.pass).count()).sum()
    }

    /// Violations of `‖M‖ₚᵖ ≤ (p/(p−1))‖u/v‖ₚᵖ` and of the Doob form
    /// `(p/(p−1))ᵖ`, per entry of `p_values`.
    pub fn lp_violations(&self, p_values: &[f64]) -> (Vec<usize>, Vec<usize>) {
        let mut stated = vec![0; p_values.len()];
        let mut doob = vec![0; p_values.len()];
        for a in self.audits() {
            for (i, row) in a.lp.iter().enumerate() {
                stated[i] += usize::from(!row.stated_pass);
                doob[i] += usize::from(!row.doob_pass);
            }
        }
        (stated, doob)
    }

    pub fn model_errors(&self) -> impl Iterator<Item = (usize, &str)> {
        self.models
            .iter()
            .filter_map(|m| m.audit.as_ref().err().map(|e| (m.model_id, e.as_str())))
    }

    fn audits(&self) -> impl Iterator<Item = &MaximalAudit> {
        self.models.iter().filter_map(|m| m.audit.as_ref().ok())
    }

    pub fn section(&self, subject: &str) -> Option<&PropertyReport> {
        self.properties.iter().find(|s| s.subject == subject).map(|s| &s.report)
    }
}

/// Cyclic shift on the points of a finite model; never fixes an interval
/// window, so it serves as the contrast automorphism for the surrogate.
#[derive(Debug)]
struct Rotation(usize);

impl InnerAutomorphism<usize> for Rotation {
    fn apply(&self, p: &usize) -> Result<usize> {
        Ok((p + 1) % self.0)
    }

    fn order(&self) -> usize {
        1
    }

    fn describe(&self) -> String {
        format!("rotation mod {}", self.0)
    }
}

fn skipped(reason: &str) -> PropertyReport {
    let rows = [ANCHORED, BESICOVICH, INVARIANCE]
        .into_iter()
        .map(|property| PropertyRow {
            property,
            outcome: PropertyOutcome::Skipped(reason.to_string()),
            checks: 0,
        })
        .collect();
    PropertyReport { rows }
}

fn pairs_from<F: SubsetFunctionSeq>(seq: &F, points: &[F::Point], n: usize) -> Result<Vec<(F::Point, F::Point)>> {
    let mut pairs = Vec::new();
    for p in points {
        let members = seq.members(p, n)?;
        let step = (members.len() / 8).max(1);
        pairs.extend(members.iter().step_by(step).map(|m| (p.clone(), m.point.clone())));
    }
    // points from different classes exercise the disjoint branch
    for w in points.windows(2) {
        pairs.push((w[0].clone(), w[1].clone()));
    }
    Ok(pairs)
}

fn property_sections(cfg: &ExperimentConfig) -> Result<Vec<PropertySection>> {
    let [seed] = task_seeds::<1>(cfg.seed, PROPERTY_STREAM);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_max = cfg.n_max;
    let xis: Vec<BoundaryPrefix> = (0..PROPERTY_POINTS)
        .map(|_| BoundaryPrefix::sample(cfg.rank, rng.random(), n_max + 2))
        .collect();
    let phis: Vec<PrefixAutomorphism> = (1..=3).map(|m| PrefixAutomorphism::random(cfg.rank, m, &mut rng)).collect();

    let base = HoroballSequence::new(cfg.rank);
    let dyn_phis: Vec<&dyn InnerAutomorphism<BoundaryPrefix>> =
        phis.iter().map(|p| p as &dyn InnerAutomorphism<_>).collect();
    let pairs = pairs_from(&base, &xis, PAIR_INDEX.min(n_max))?;
    let mut sections = vec![PropertySection {
        subject: "horoball".into(),
        report: check_properties(&base, &xis, &pairs, &dyn_phis, n_max)?,
    }];

    let action = registry_get(&cfg.action, cfg.rank)?;
    let subject = format!("horoball x {}", cfg.action);
    let report = if action.is_exact() {
        let skew = skew_extend(base, TailCocycle, action.clone(), &xis, n_max.min(3))?;
        let points: Vec<(BoundaryPrefix, XPoint)> = xis
            .iter()
            .map(|xi| Ok((xi.clone(), action.sample_point(rng.random())?.0)))
            .collect::<Result<_>>()?;
        let pairs = pairs_from(&skew, &points, PAIR_INDEX.min(n_max))?;
        let lifts: Vec<_> = phis.iter().map(|p| skew.lift(p)).collect();
        let dyn_lifts: Vec<&dyn InnerAutomorphism<(BoundaryPrefix, XPoint)>> =
            lifts.iter().map(|l| l as &dyn InnerAutomorphism<_>).collect();
        check_properties(&skew, &points, &pairs, &dyn_lifts, n_max)?
    } else {
        skipped(&format!(
            "{} is inexact (tolerance {:e}); set comparisons need exact points",
            cfg.action,
            action.tolerance()
        ))
    };
    sections.push(PropertySection { subject, report });

    let surrogate = FiniteModel::interval_surrogate(SURROGATE_SIZE);
    let rotation = Rotation(SURROGATE_SIZE);
    let points: Vec<usize> = (0..SURROGATE_SIZE).step_by(3).collect();
    let pairs: Vec<(usize, usize)> = points.iter().map(|&b| (b, (b + 1) % SURROGATE_SIZE)).collect();
    sections.push(PropertySection {
        subject: "interval_surrogate".into(),
        report: check_properties(&surrogate, &points, &pairs, &[&rotation], SURROGATE_SIZE - 1)?,
    });
    Ok(sections)
}

/// Random `u` with signed values and `v ≥ 0` vanishing on roughly a quarter of
/// the points, never identically zero.
fn random_functions<R: Rng + ?Sized>(rng: &mut R, len: usize) -> (Vec<Scalar>, Vec<Scalar>) {
    let u = (0..len)
        .map(|_| Scalar::ratio(rng.random_range(-8..=8), rng.random_range(1..=4)))
        .collect();
    let mut v: Vec<Scalar> = (0..len)
        .map(|_| {
            if rng.random_bool(0.25) {
                Scalar::zero()
            } else {
                Scalar::ratio(rng.random_range(1..=8), rng.random_range(1..=4))
            }
        })
        .collect();
    if v.iter().all(Scalar::is_zero) {
        let k = rng.random_range(0..len);
        v[k] = Scalar::one();
    }
    (u, v)
}

pub fn audit_model(seed: u64, id: usize, p_values: &[f64]) -> ModelAudit {
    let [s] = task_seeds::<1>(seed, id as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(s);
    let (points, audit) = match random_skew_model(&mut rng) {
        Ok(model) => {
            let (u, v) = random_functions(&mut rng, model.len());
            let a = audit_maximal(&model, &u, &v, &default_epsilon_grid(), model.max_level(), p_values);
            (model.len(), a.map_err(|e| e.to_string()))
        }
        Err(e) => (0, Err(e.to_string())),
    };
    ModelAudit {
        model_id: id,
        points,
        audit,
    }
}

/// Property checks on the horoball sequence, its skew extension by the
/// configured action and the interval surrogate, then the maximal-inequality
/// audits on `cfg.models` random finite skew models.
pub fn run_audit_suite(cfg: &ExperimentConfig) -> Result<AuditRun> {
    cfg.validate()?;
    let properties = property_sections(cfg)?;
    let models = with_pool(cfg.threads, || {
        (0..cfg.models)
            .into_par_iter()
            .map(|id| audit_model(cfg.seed, id, &cfg.p_values))
            .collect::<Vec<_>>()
    })?;
    Ok(AuditRun { properties, models })
}

fn sidecar(out: &Path, kind: &str) -> PathBuf {
    out.with_extension(format!("{kind}.csv"))
}

/// Writes the weak-type rows to `out` and the property and `Lᵖ` rows to
/// `<stem>.properties.csv` and `<stem>.lp.csv` beside it.
pub fn write_audit_reports(run: &AuditRun, out: &Path) -> Result<Vec<PathBuf>> {
    let mut w = csv_writer(create(out)?);
    w.write_record(["model_id", "epsilon", "lhs_mass", "mid_bound", "l1_bound", "pass"])
        .map_err(csv_err)?;
    for m in &run.models {
        let Ok(a) = &m.audit else { continue };
        for r in &a.weak {
            w.write_record([
                m.model_id.to_string(),
                fmt_float(r.epsilon),
                fmt_float(r.lhs_mass.to_f64()),
                fmt_float(r.mid_bound.to_f64()),
                fmt_float(r.l1_bound.to_f64()),
                r.pass.to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush()?;

    let lp_path = sidecar(out, "lp");
    let mut w = csv_writer(create(&lp_path)?);
    w.write_record([
        "model_id",
        "p",
        "lhs",
        "norm_p",
        "stated_bound",
        "stated_pass",
        "doob_bound",
        "doob_pass",
    ])
    .map_err(csv_err)?;
    for m in &run.models {
        let Ok(a) = &m.audit else { continue };
        for r in &a.lp {
            w.write_record([
                m.model_id.to_string(),
                fmt_float(r.p),
                fmt_float(r.lhs),
                fmt_float(r.norm_p),
                fmt_float(r.stated_bound),
                r.stated_pass.to_string(),
                fmt_float(r.doob_bound),
                r.doob_pass.to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush()?;

    let prop_path = sidecar(out, "properties");
    let mut w = csv_writer(create(&prop_path)?);
    w.write_record(["subject", "property", "outcome", "checks", "detail"])
        .map_err(csv_err)?;
    for s in &run.properties {
        for r in &s.report.rows {
            let (outcome, detail) = match &r.outcome {
                PropertyOutcome::Pass => ("pass", ""),
                PropertyOutcome::Fail(w) => ("fail", w.as_str()),
                PropertyOutcome::Skipped(w) => ("skipped", w.as_str()),
            };
            w.write_record([s.subject.as_str(), r.property, outcome, &r.checks.to_string(), detail])
                .map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(vec![out.to_path_buf(), prop_path, lp_path])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite() {
        let cfg = ExperimentConfig::parse("n_max = 4\nmodels = 40\nseed = 9").unwrap();
        let run = run_audit_suite(&cfg).unwrap();
        assert!(run.section("horoball").unwrap().all_pass());
        assert!(run.section("horoball x trivial").unwrap().all_pass());
        let surrogate = run.section("interval_surrogate").unwrap();
        assert!(matches!(surrogate.get(BESICOVICH).unwrap().outcome, PropertyOutcome::Fail(_)));
        assert_eq!(run.weak_violations(), 0);
        assert_eq!(run.model_errors().count(), 0);
        assert_eq!(run.lp_violations(&cfg.p_values).1, vec![0, 0, 0]);
    }

    #[test]
    fn inexact_fiber_is_skipped() {
        let cfg = ExperimentConfig::parse("n_max = 3\nmodels = 1\naction = so3_sphere").unwrap();
        let run = run_audit_suite(&cfg).unwrap();
        let r = run.section("horoball x so3_sphere").unwrap();
        assert!(r.rows.iter().all(|row| matches!(row.outcome, PropertyOutcome::Skipped(_))));
    }

    #[test]
    fn sidecar_names() {
        assert_eq!(sidecar(Path::new("/tmp/a.csv"), "lp"), PathBuf::from("/tmp/a.lp.csv"));
    }
}
