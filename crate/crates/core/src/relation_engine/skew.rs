//! Skew-product extensions `𝓕^α` of a subset-function sequence by a
//! non-singular action through a group-valued cocycle.

use num_rational::BigRational;
use rand::Rng;

use super::{
    Capabilities, Cocycle, FiniteModel, InnerAutomorphism, Member, Scalar, SubsetFunctionSeq,
};
use crate::actions::{FiniteAction, SharedAction, XPoint};
use crate::error::{Error, Result};
use crate::free_group::{Letter, ReducedWord};

/// `𝓕^αₙ(b, x) = {(b′, α(b′, b)x) : b′ ∈ 𝓕ₙ(b)}` with weight
/// `D(b′, b)·rn(α(b′, b), x)`, where `rn(g, x) = dλ∘T^g/dλ(x)`.
///
/// This orientation makes each weight the ratio of product masses
/// `μ(b′)λ(x′) / μ(b)λ(x)` on atoms, so measure-preserving fibers leave the
/// base weights untouched.
#[derive(Debug, Clone)]
pub struct SkewProduct<F, C> {
    base: F,
    cocycle: C,
    action: SharedAction,
}

impl<F, C> SkewProduct<F, C>
where
    F: SubsetFunctionSeq,
    C: Cocycle<F::Point>,
{
    pub fn base(&self) -> &F {
        &self.base
    }

    pub fn cocycle(&self) -> &C {
        &self.cocycle
    }

    pub fn action(&self) -> &SharedAction {
        &self.action
    }

    /// `α(φb, b)`-lift of an inner automorphism of the base.
    pub fn lift<'a>(&'a self, phi: &'a dyn InnerAutomorphism<F::Point>) -> SkewAutomorphism<'a, F, C> {
        SkewAutomorphism { skew: self, phi }
    }
}

/// Builds `𝓕^α` after spot-auditing the cocycle equation
/// `α(b″, b′)·α(b′, b) = α(b″, b)` and the cocycle identity for `D` on the
/// classes of `audit_points` up to index `audit_n`.
pub fn skew_extend<F, C>(
    base: F,
    cocycle: C,
    action: SharedAction,
    audit_points: &[F::Point],
    audit_n: usize,
) -> Result<SkewProduct<F, C>>
where
    F: SubsetFunctionSeq,
    C: Cocycle<F::Point>,
{
    const PAIRS_PER_SET: usize = 16;
    for b in audit_points {
        for n in 0..=audit_n {
            let members = base.members(b, n)?;
            let step = (members.len() / PAIRS_PER_SET).max(1);
            let picks: Vec<&Member<F::Point>> = members.iter().step_by(step).collect();
            for m1 in &picks {
                let a1 = cocycle.alpha(&m1.point, b)?;
                if a1.rank() != action.rank() {
                    return Err(Error::RankMismatch {
                        left: action.rank(),
                        right: a1.rank(),
                    });
                }
                for m2 in picks.iter().take(4) {
                    let a21 = cocycle.alpha(&m2.point, &m1.point)?;
                    let a2 = cocycle.alpha(&m2.point, b)?;
                    if a21.multiply(&a1)? != a2 {
                        return Err(Error::CocycleAudit(format!(
                            "alpha({0}, {1})·alpha({1}, {2}) = {3} but alpha({0}, {2}) = {4}",
                            base.describe_point(&m2.point),
                            base.describe_point(&m1.point),
                            base.describe_point(b),
                            a21.multiply(&a1)?,
                            a2
                        )));
                    }
                    let d = &base.cocycle_d(&m2.point, &m1.point)? * &base.cocycle_d(&m1.point, b)?;
                    if d != base.cocycle_d(&m2.point, b)? {
                        return Err(Error::CocycleAudit(format!(
                            "D fails the cocycle identity at {}",
                            base.describe_point(b)
                        )));
                    }
                }
            }
            if !cocycle.alpha(b, b)?.is_identity() {
                return Err(Error::CocycleAudit(format!(
                    "alpha(b, b) is not trivial at {}",
                    base.describe_point(b)
                )));
            }
        }
    }
    Ok(SkewProduct {
        base,
        cocycle,
        action,
    })
}

impl<F, C> SubsetFunctionSeq for SkewProduct<F, C>
where
    F: SubsetFunctionSeq,
    C: Cocycle<F::Point>,
{
    type Point = (F::Point, XPoint);

    fn members(&self, p: &Self::Point, n: usize) -> Result<Vec<Member<Self::Point>>> {
        let (b, x) = p;
        self.base
            .members(b, n)?
            .into_iter()
            .map(|m| {
                let g = self.cocycle.alpha(&m.point, b)?;
                let y = self.action.apply_word(&g, x)?;
                let weight = &m.weight * &self.action.rn(&g, x)?;
                Ok(Member {
                    point: (m.point, y),
                    weight,
                })
            })
            .collect()
    }

    fn cocycle_d(&self, to: &Self::Point, from: &Self::Point) -> Result<Scalar> {
        let g = self.cocycle.alpha(&to.0, &from.0)?;
        if self.action.is_exact() && self.action.apply_word(&g, &from.1)? != to.1 {
            return Err(Error::InvalidArgument("points are not related in the skew product".into()));
        }
        Ok(&self.base.cocycle_d(&to.0, &from.0)? * &self.action.rn(&g, &from.1)?)
    }

    fn capabilities(&self) -> Capabilities {
        let base = self.base.capabilities();
        Capabilities {
            exact_weights: base.exact_weights && self.action.is_exact(),
            ..base
        }
    }

    fn describe_point(&self, p: &Self::Point) -> String {
        format!("({}, {})", self.base.describe_point(&p.0), p.1)
    }
}

/// `φ_α(b, x) = (φb, α(φb, b)x)`.
pub struct SkewAutomorphism<'a, F: SubsetFunctionSeq, C> {
    skew: &'a SkewProduct<F, C>,
    phi: &'a dyn InnerAutomorphism<F::Point>,
}

impl<F, C> InnerAutomorphism<(F::Point, XPoint)> for SkewAutomorphism<'_, F, C>
where
    F: SubsetFunctionSeq,
    C: Cocycle<F::Point>,
{
    fn apply(&self, p: &(F::Point, XPoint)) -> Result<(F::Point, XPoint)> {
        let image = self.phi.apply(&p.0)?;
        let g = self.skew.cocycle.alpha(&image, &p.0)?;
        let y = self.skew.action.apply_word(&g, &p.1)?;
        Ok((image, y))
    }

    fn order(&self) -> usize {
        self.phi.order()
    }

    fn describe(&self) -> String {
        format!("lift of {}", self.phi.describe())
    }
}

/// `α(b′, b) = ℓ(b′)·ℓ(b)⁻¹` from a labelling of points by group elements.
#[derive(Debug, Clone)]
pub struct CoboundaryCocycle {
    labels: Vec<ReducedWord>,
}

impl CoboundaryCocycle {
    pub fn new(labels: Vec<ReducedWord>) -> Self {
        CoboundaryCocycle { labels }
    }

    pub fn random<R: Rng + ?Sized>(rank: usize, points: usize, max_len: usize, rng: &mut R) -> Self {
        let labels = (0..points)
            .map(|_| {
                let len = rng.random_range(0..=max_len);
                let letters: Vec<Letter> =
                    (0..len).map(|_| Letter::from_code(rng.random_range(0..2 * rank as u8))).collect();
                ReducedWord::reduce(rank, letters).expect("letters fit rank")
            })
            .collect();
        CoboundaryCocycle { labels }
    }
}

impl Cocycle<usize> for CoboundaryCocycle {
    fn alpha(&self, to: &usize, from: &usize) -> Result<ReducedWord> {
        let (a, b) = (self.labels.get(*to), self.labels.get(*from));
        match (a, b) {
            (Some(a), Some(b)) => a.multiply(&b.inverse()),
            _ => Err(Error::InvalidArgument(format!("no label for {to} or {from}"))),
        }
    }
}

/// A random finite skew model with at most 64 points: a nested base model of
/// at most 16 points extended through a random coboundary by a random weighted
/// permutation action on at most 4 points, materialized with product masses.
pub fn random_skew_model<R: Rng + ?Sized>(rng: &mut R) -> Result<FiniteModel> {
    let base_points = rng.random_range(2..=16);
    let levels = rng.random_range(1..=4);
    let fiber_points = rng.random_range(1..=4);
    let base = FiniteModel::random_nested(rng, base_points, levels);
    let cocycle = CoboundaryCocycle::random(2, base_points, 3, rng);
    let fiber = FiniteAction::random(2, fiber_points, rng);
    let fiber_weights: Vec<BigRational> = (0..fiber_points).map(|x| fiber.weight(x).clone()).collect();
    let masses: Vec<BigRational> = base.weights().to_vec();
    let skew = skew_extend(base, cocycle, std::sync::Arc::new(fiber), &[0], levels)?;
    let universe: Vec<((usize, XPoint), BigRational)> = (0..base_points)
        .flat_map(|b| {
            let masses = &masses;
            fiber_weights
                .iter()
                .enumerate()
                .map(move |(x, lw)| ((b, XPoint::Index(x)), &masses[b] * lw))
        })
        .collect();
    let (model, _) = FiniteModel::materialize(&skew, &universe, levels)?;
    Ok(model)
}
