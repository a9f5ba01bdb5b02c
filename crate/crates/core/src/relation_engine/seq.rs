use std::fmt::Debug;
use std::hash::Hash;

use super::Scalar;
use crate::error::Result;
use crate::free_group::ReducedWord;

/// One element `b′` of `𝓕ₙ(b)` with its weight `D(b′, b)`.
#[derive(Debug, Clone)]
pub struct Member<P> {
    pub point: P,
    pub weight: Scalar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Capabilities {
    /// Every weight is an exact rational.
    pub exact_weights: bool,
    /// `𝓕ₙ(b)` can be listed for every `n` up to `max_index`.
    pub enumerable_classes: bool,
    /// Claims `b ∈ 𝓕ₙ(b)` with weight 1.
    pub anchored: bool,
    pub max_index: Option<usize>,
}

/// A sequence of finite subset functions `𝓕ₙ` on an equivalence relation,
/// together with its Radon–Nikodym cocycle `D`.
pub trait SubsetFunctionSeq: Sync {
    type Point: Clone + Eq + Hash + Debug + Send + Sync;

    /// `𝓕ₙ(b)` with weights `D(b′, b)`.
    fn members(&self, b: &Self::Point, n: usize) -> Result<Vec<Member<Self::Point>>>;

    /// `D(to, from)` for related points.
    fn cocycle_d(&self, to: &Self::Point, from: &Self::Point) -> Result<Scalar>;

    fn capabilities(&self) -> Capabilities;

    fn describe_point(&self, b: &Self::Point) -> String {
        format!("{b:?}")
    }
}

/// A group-valued cocycle `α(b′, b)` on the relation, with `α(b′, b)·b = b′`.
pub trait Cocycle<P>: Sync {
    fn alpha(&self, to: &P, from: &P) -> Result<ReducedWord>;
}

/// An inner automorphism of the relation, paired with an index past which it
/// is expected to fix every `𝓕ₙ(b)` setwise.
pub trait InnerAutomorphism<P>: Sync {
    fn apply(&self, p: &P) -> Result<P>;

    /// `N(φ, b)`; for prefix rewrites this is the rewrite depth.
    fn order(&self) -> usize;

    fn describe(&self) -> String;
}
