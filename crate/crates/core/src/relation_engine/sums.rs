//! Weighted sums `SUMₙ[u](b) = Σ_{b′∈𝓕ₙ(b)} u(b′) D(b′, b)` and their ratios.

use super::{Accumulator, Scalar, SubsetFunctionSeq};
use crate::error::{Error, Result};

/// `SUMₙ[u](b)`.
pub fn weighted_sum<F, U>(seq: &F, u: &U, b: &F::Point, n: usize) -> Result<Scalar>
where
    F: SubsetFunctionSeq,
    U: Fn(&F::Point) -> Result<Scalar> + ?Sized,
{
    let members = seq.members(b, n)?;
    let mut acc = Accumulator::new();
    for m in &members {
        acc.add_product(&u(&m.point)?, &m.weight);
    }
    Ok(acc.value())
}

/// `SUMₙ[u](b)` and `SUMₙ[v](b)` from a single enumeration of `𝓕ₙ(b)`.
pub fn weighted_sum_pair<F, U, V>(
    seq: &F,
    u: &U,
    v: &V,
    b: &F::Point,
    n: usize,
) -> Result<(Scalar, Scalar)>
where
    F: SubsetFunctionSeq,
    U: Fn(&F::Point) -> Result<Scalar> + ?Sized,
    V: Fn(&F::Point) -> Result<Scalar> + ?Sized,
{
    let members = seq.members(b, n)?;
    let mut acc_u = Accumulator::new();
    let mut acc_v = Accumulator::new();
    for m in &members {
        acc_u.add_product(&u(&m.point)?, &m.weight);
        acc_v.add_product(&v(&m.point)?, &m.weight);
    }
    Ok((acc_u.value(), acc_v.value()))
}

#[derive(Debug, Clone)]
pub struct RatioRecord {
    pub n: usize,
    pub sum_u: Scalar,
    pub sum_v: Scalar,
    pub ratio: Scalar,
    /// `max_{k ≤ n} |RATIO_k|`.
    pub running_max: Scalar,
}

/// The trajectory `n ↦ (SUMₙ[u], SUMₙ[v], RATIOₙ, running max)` at one point.
#[derive(Debug, Clone)]
pub struct RatioSeries {
    pub point: String,
    pub records: Vec<RatioRecord>,
}

impl RatioSeries {
    pub fn last(&self) -> Option<&RatioRecord> {
        self.records.last()
    }

    /// `M^𝓕_T` with `T` the last index computed.
    pub fn maximal(&self) -> Option<&Scalar> {
        self.records.last().map(|r| &r.running_max)
    }
}

/// Computes `RATIOₙ[u, v](b)` for `n = 0..=n_max`.
pub fn ratio_series<F, U, V>(seq: &F, u: &U, v: &V, b: &F::Point, n_max: usize) -> Result<RatioSeries>
where
    F: SubsetFunctionSeq,
    U: Fn(&F::Point) -> Result<Scalar> + ?Sized,
    V: Fn(&F::Point) -> Result<Scalar> + ?Sized,
{
    let mut records: Vec<RatioRecord> = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let (sum_u, sum_v) = weighted_sum_pair(seq, u, v, b, n)?;
        let ratio = sum_u
            .checked_div(&sum_v)
            .ok_or_else(|| Error::DivisionDegeneracy {
                point: seq.describe_point(b),
                n,
            })?;
        let running_max = match records.last() {
            Some(prev) => prev.running_max.clone().max(ratio.abs()),
            None => ratio.abs(),
        };
        records.push(RatioRecord {
            n,
            sum_u,
            sum_v,
            ratio,
            running_max,
        });
    }
    Ok(RatioSeries {
        point: seq.describe_point(b),
        records,
    })
}

/// `u_φ(b) = u(b) − u(φ(b)) D(φ(b), b)`.
pub fn u_phi<'a, F, U, A>(
    seq: &'a F,
    u: &'a U,
    phi: &'a A,
) -> impl Fn(&F::Point) -> Result<Scalar> + 'a
where
    F: SubsetFunctionSeq,
    U: Fn(&F::Point) -> Result<Scalar> + ?Sized,
    A: super::InnerAutomorphism<F::Point> + ?Sized,
{
    move |b| {
        let image = phi.apply(b)?;
        let d = seq.cocycle_d(&image, b)?;
        Ok(&u(b)? - &(&u(&image)? * &d))
    }
}
