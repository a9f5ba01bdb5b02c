use super::{Capabilities, Cocycle, Member, Scalar, SubsetFunctionSeq};
use crate::boundary::{horoball, tail_agreement_depth, tail_cocycle, BoundaryPrefix};
use crate::error::{invalid, Error, Result};
use crate::free_group::ReducedWord;

/// How far past the materialized prefixes to look for tail agreement.
const AGREEMENT_CAP: usize = 4096;

/// The horoball sequence `𝓑ₙ` on the tail relation. The relation preserves `ν`,
/// so every weight is exactly 1.
#[derive(Debug, Clone)]
pub struct HoroballSequence {
    rank: usize,
    max_index: Option<usize>,
    sphere_only: bool,
}

impl HoroballSequence {
    pub fn new(rank: usize) -> Self {
        HoroballSequence {
            rank,
            max_index: None,
            sphere_only: false,
        }
    }

    /// Refuse indices above `max` with a capability error.
    pub fn with_max_index(mut self, max: usize) -> Self {
        self.max_index = Some(max);
        self
    }

    /// Keep only members carried by words of length exactly `2n`. Exploratory;
    /// this variant is not covered by the ratio theorem.
    pub fn sphere_only(mut self) -> Self {
        self.sphere_only = true;
        self
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Members paired with the word `g` carrying each of them to `b`.
    pub fn members_with_words(
        &self,
        b: &BoundaryPrefix,
        n: usize,
    ) -> Result<Vec<(BoundaryPrefix, ReducedWord)>> {
        if b.rank() != self.rank {
            return Err(Error::RankMismatch {
                left: self.rank,
                right: b.rank(),
            });
        }
        if let Some(max) = self.max_index {
            if n > max {
                return Err(Error::Capability(format!(
                    "horoball index {n} exceeds the configured maximum {max}"
                )));
            }
        }
        let ball = horoball(b, n as i64)?;
        let mut members = ball.members;
        if self.sphere_only && n > 0 {
            let pivot = ball.center.materialized()[n - 1];
            members.retain(|(eta, _)| eta.materialized()[n - 1] != pivot);
        }
        Ok(members)
    }
}

impl SubsetFunctionSeq for HoroballSequence {
    type Point = BoundaryPrefix;

    fn members(&self, b: &BoundaryPrefix, n: usize) -> Result<Vec<Member<BoundaryPrefix>>> {
        Ok(self
            .members_with_words(b, n)?
            .into_iter()
            .map(|(point, _)| Member {
                point,
                weight: Scalar::one(),
            })
            .collect())
    }

    fn cocycle_d(&self, to: &BoundaryPrefix, from: &BoundaryPrefix) -> Result<Scalar> {
        tail_agreement_depth(to, from, AGREEMENT_CAP)
            .map(|_| Scalar::one())
            .ok_or_else(|| invalid(format!("{to} and {from} are not tail-equivalent")))
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            exact_weights: true,
            enumerable_classes: true,
            anchored: !self.sphere_only,
            max_index: self.max_index,
        }
    }

    fn describe_point(&self, b: &BoundaryPrefix) -> String {
        format!("{}|seed={}", b, b.seed())
    }
}

/// `α(ξ, η)`: the word carrying `η` to `ξ`.
#[derive(Debug, Clone, Copy, Default)]
pub struct TailCocycle;

impl Cocycle<BoundaryPrefix> for TailCocycle {
    fn alpha(&self, to: &BoundaryPrefix, from: &BoundaryPrefix) -> Result<ReducedWord> {
        let depth = tail_agreement_depth(to, from, AGREEMENT_CAP)
            .ok_or_else(|| invalid(format!("{to} and {from} are not tail-equivalent")))?;
        tail_cocycle(to, from, depth)
    }
}
