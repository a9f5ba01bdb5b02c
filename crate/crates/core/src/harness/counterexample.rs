use std::collections::BTreeSet;
use std::io::Write;

use rand::seq::IteratorRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::ExperimentConfig;
use super::{csv_err, csv_writer, task_seeds, with_pool};
use crate::boundary::{act, geodesic_j, BoundaryPrefix, JWindow};
use crate::error::{invalid, Error, Result};
use crate::free_group::{format_letters, Letter, ReducedWord};

/// Gives up on a pair after this many degenerate draws.
const MAX_RESAMPLES: usize = 64;

/// A uniform-length random element of the horosphere `H_c` with `|g| ≤ bound`:
/// `g = c₁⋯c_j·w` where `|w| = j` and `w` leaves the ray to `c` immediately.
pub fn random_horosphere_word<R: Rng + ?Sized>(c: &BoundaryPrefix, bound: usize, rng: &mut R) -> Result<ReducedWord> {
    let rank = c.rank();
    if rank < 2 {
        return Err(invalid("horosphere moves need rank at least 2"));
    }
    let j = rng.random_range(0..=bound / 2);
    if j == 0 {
        return Ok(ReducedWord::identity(rank));
    }
    let ray = c.prefix(j + 1);
    let mut letters = ray[..j].to_vec();
    let first = Letter::successors(rank, ray[j - 1])
        .filter(|&l| l != ray[j])
        .choose(rng)
        .expect("rank >= 2 leaves a branch");
    letters.push(first);
    for _ in 1..j {
        let prev = *letters.last().expect("nonempty");
        letters.push(Letter::successors(rank, prev).choose(rng).expect("successor"));
    }
    ReducedWord::from_letters(rank, letters)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JRow {
    pub pair_id: usize,
    pub move_id: usize,
    pub mv: String,
    pub window_before: String,
    pub window_after: String,
    pub equal: bool,
}

#[derive(Debug, Clone)]
pub struct JRun {
    pub rows: Vec<JRow>,
    /// Distinct `J` windows across pairs, before any move.
    pub distinct_windows: usize,
    /// Degenerate pairs drawn and replaced.
    pub resampled: usize,
}

impl JRun {
    pub fn all_equal(&self) -> bool {
        self.rows.iter().all(|r| r.equal)
    }
}

fn window_string(w: &JWindow) -> String {
    format_letters(&w.values().copied().collect::<Vec<_>>())
}

fn draw_pair(rng: &mut ChaCha8Rng, rank: usize, window: i64) -> Result<(BoundaryPrefix, BoundaryPrefix, JWindow, usize)> {
    let depth = 2 * window as usize + 2;
    for resampled in 0..MAX_RESAMPLES {
        let b = BoundaryPrefix::sample(rank, rng.random(), depth);
        let c = BoundaryPrefix::sample(rank, rng.random(), depth);
        match geodesic_j(&b, &c, window) {
            Ok(j) => return Ok((b, c, j, resampled)),
            Err(Error::DegeneratePair(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::DegeneratePair(format!("{MAX_RESAMPLES} degenerate draws in a row")))
}

fn run_pair(cfg: &ExperimentConfig, id: usize) -> Result<(Vec<JRow>, String, usize)> {
    let [seed] = task_seeds::<1>(cfg.seed, id as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (b, c, before, resampled) = draw_pair(&mut rng, cfg.rank, cfg.window)?;
    let before_s = window_string(&before);
    let mut rows = Vec::with_capacity(cfg.moves);
    for move_id in 0..cfg.moves {
        let g = if move_id == 0 {
            ReducedWord::identity(cfg.rank)
        } else {
            random_horosphere_word(&c, cfg.move_bound, &mut rng)?
        };
        let gi = g.inverse();
        let after = geodesic_j(&act(&gi, &b)?.point, &act(&gi, &c)?.point, cfg.window)?;
        rows.push(JRow {
            pair_id: id,
            move_id,
            mv: if g.is_identity() { "e".into() } else { g.to_string() },
            window_after: window_string(&after),
            window_before: before_s.clone(),
            equal: after == before,
        });
    }
    Ok((rows, before_s, resampled))
}

/// Samples `cfg.samples` pairs `(b, c)`, applies `cfg.moves` relation moves
/// `(b, c) ↦ (g⁻¹b, g⁻¹c)` with `g ∈ H_c`, `|g| ≤ move_bound`, and compares
/// the `J` windows of half-width `cfg.window`. Move 0 is the identity.
pub fn run_counterexample_j(cfg: &ExperimentConfig) -> Result<JRun> {
    cfg.validate()?;
    if cfg.rank < 2 {
        return Err(Error::Config("counterexample-j needs rank at least 2".into()));
    }
    if cfg.window < 1 {
        return Err(Error::Config("counterexample-j needs window at least 1".into()));
    }
    let results = with_pool(cfg.threads, || {
        (0..cfg.samples)
            .into_par_iter()
            .map(|id| run_pair(cfg, id))
            .collect::<Result<Vec<_>>>()
    })??;
    let mut rows = Vec::new();
    let mut windows = BTreeSet::new();
    let mut resampled = 0;
    for (r, w, k) in results {
        rows.extend(r);
        windows.insert(w);
        resampled += k;
    }
    Ok(JRun {
        rows,
        distinct_windows: windows.len(),
        resampled,
    })
}

/// Columns `pair_id, move_id, move, window_before, window_after, equal`.
pub fn write_j_csv<W: Write>(run: &JRun, out: W) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(["pair_id", "move_id", "move", "window_before", "window_after", "equal"])
        .map_err(csv_err)?;
    for r in &run.rows {
        w.write_record([
            r.pair_id.to_string(),
            r.move_id.to_string(),
            r.mv.clone(),
            r.window_before.clone(),
            r.window_after.clone(),
            r.equal.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}
