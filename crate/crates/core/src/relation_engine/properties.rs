use std::collections::HashSet;
use std::fmt;

use super::{InnerAutomorphism, Scalar, SubsetFunctionSeq};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PropertyOutcome {
    Pass,
    /// A concrete violation: the offending point(s), automorphism and index.
    Fail(String),
    Skipped(String),
}

impl PropertyOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, PropertyOutcome::Pass)
    }
}

impl fmt::Display for PropertyOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropertyOutcome::Pass => f.write_str("pass"),
            PropertyOutcome::Fail(w) => write!(f, "fail: {w}"),
            PropertyOutcome::Skipped(r) => write!(f, "skipped: {r}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PropertyRow {
    pub property: &'static str,
    pub outcome: PropertyOutcome,
    /// Number of elementary comparisons performed.
    pub checks: usize,
}

#[derive(Debug, Clone)]
pub struct PropertyReport {
    pub rows: Vec<PropertyRow>,
}

impl PropertyReport {
    pub fn get(&self, property: &str) -> Option<&PropertyRow> {
        self.rows.iter().find(|r| r.property == property)
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.outcome.passed())
    }
}

pub const ANCHORED: &str = "anchored";
pub const BESICOVICH: &str = "extreme_besicovich";
pub const INVARIANCE: &str = "asymptotic_invariance";

/// Checks the three structural properties on the supplied samples.
///
/// * anchored: `b ∈ 𝓕ₙ(b)` with weight 1 for every sample point and `n ≤ n_max`;
/// * extreme Besicovich: for each pair, `𝓕ₙ(b)` and `𝓕ₙ(b′)` are equal or
///   disjoint, and once `b′ ∈ 𝓕ₘ(b)` they coincide for all `m ≤ n ≤ n_max`;
/// * asymptotic invariance: each automorphism fixes `𝓕ₙ(b)` setwise for
///   `order < n ≤ n_max`, and `|𝓕ₙ(b)|` never shrinks.
pub fn check_properties<F>(
    seq: &F,
    points: &[F::Point],
    pairs: &[(F::Point, F::Point)],
    automorphisms: &[&dyn InnerAutomorphism<F::Point>],
    n_max: usize,
) -> Result<PropertyReport>
where
    F: SubsetFunctionSeq,
{
    let set_of = |b: &F::Point, n: usize| -> Result<HashSet<F::Point>> {
        Ok(seq.members(b, n)?.into_iter().map(|m| m.point).collect())
    };

    let mut rows = Vec::new();

    // anchored
    let mut outcome = PropertyOutcome::Pass;
    let mut checks = 0;
    'anchor: for b in points {
        for n in 0..=n_max {
            checks += 1;
            let members = seq.members(b, n)?;
            match members.iter().find(|m| &m.point == b) {
                Some(m) if m.weight == Scalar::one() => {}
                Some(m) => {
                    outcome = PropertyOutcome::Fail(format!(
                        "point {} has self-weight {} at n={n}",
                        seq.describe_point(b),
                        m.weight
                    ));
                    break 'anchor;
                }
                None => {
                    outcome = PropertyOutcome::Fail(format!(
                        "point {} missing from its own set at n={n}",
                        seq.describe_point(b)
                    ));
                    break 'anchor;
                }
            }
        }
    }
    if points.is_empty() {
        outcome = PropertyOutcome::Skipped("no sample points".into());
    }
    rows.push(PropertyRow {
        property: ANCHORED,
        outcome,
        checks,
    });

    // extreme Besicovich
    let mut outcome = PropertyOutcome::Pass;
    let mut checks = 0;
    'pair: for (b, c) in pairs {
        let mut joined: Option<usize> = None;
        for n in 0..=n_max {
            checks += 1;
            let sb = set_of(b, n)?;
            let sc = set_of(c, n)?;
            let equal = sb == sc;
            if !equal && !sb.is_disjoint(&sc) {
                let shared = sb.intersection(&sc).next().expect("nonempty intersection");
                outcome = PropertyOutcome::Fail(format!(
                    "sets of {} and {} at n={n} overlap in {} without being equal",
                    seq.describe_point(b),
                    seq.describe_point(c),
                    seq.describe_point(shared)
                ));
                break 'pair;
            }
            if let Some(m) = joined {
                if !equal {
                    outcome = PropertyOutcome::Fail(format!(
                        "sets of {} and {} agreed at n={m} but differ at n={n}",
                        seq.describe_point(b),
                        seq.describe_point(c)
                    ));
                    break 'pair;
                }
            } else if sb.contains(c) {
                if !equal {
                    outcome = PropertyOutcome::Fail(format!(
                        "{} lies in the set of {} at n={n} but the sets differ",
                        seq.describe_point(c),
                        seq.describe_point(b)
                    ));
                    break 'pair;
                }
                joined = Some(n);
            }
        }
    }
    if pairs.is_empty() {
        outcome = PropertyOutcome::Skipped("no sample pairs".into());
    }
    rows.push(PropertyRow {
        property: BESICOVICH,
        outcome,
        checks,
    });

    // asymptotic invariance against the supplied family
    let mut outcome = PropertyOutcome::Pass;
    let mut checks = 0;
    'inv: for b in points {
        let mut prev_len = 0;
        for n in 0..=n_max {
            let set = set_of(b, n)?;
            if set.len() < prev_len {
                outcome = PropertyOutcome::Fail(format!(
                    "set of {} shrinks from {prev_len} to {} at n={n}",
                    seq.describe_point(b),
                    set.len()
                ));
                break 'inv;
            }
            prev_len = set.len();
            for phi in automorphisms {
                if n <= phi.order() {
                    continue;
                }
                checks += 1;
                for p in &set {
                    let image = phi.apply(p)?;
                    if !set.contains(&image) {
                        outcome = PropertyOutcome::Fail(format!(
                            "{} moves {} out of the set of {} at n={n}",
                            phi.describe(),
                            seq.describe_point(p),
                            seq.describe_point(b)
                        ));
                        break 'inv;
                    }
                }
            }
        }
    }
    if points.is_empty() {
        outcome = PropertyOutcome::Skipped("no sample points".into());
    } else if automorphisms.is_empty() {
        outcome = PropertyOutcome::Skipped("no automorphisms supplied".into());
    }
    rows.push(PropertyRow {
        property: INVARIANCE,
        outcome,
        checks,
    });

    Ok(PropertyReport { rows })
}
