use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::{BoundaryPrefix, TailStream};
use crate::error::{Error, Result};
use crate::free_group::ReducedWord;

/// Outcome of `g·ξ`.
#[derive(Debug, Clone)]
pub struct ActResult {
    pub point: BoundaryPrefix,
    /// Number of letters of `g` cancelled against the start of `ξ`.
    pub cancelled: usize,
    /// `dν∘g/dν(ξ) = (2r−1)^rn_exponent`.
    pub rn_exponent: i64,
}

impl ActResult {
    pub fn rn_value(&self) -> BigRational {
        power_of_base(self.point.rank(), self.rn_exponent)
    }
}

/// `(2r−1)^exponent` as an exact rational.
pub fn power_of_base(rank: usize, exponent: i64) -> BigRational {
    let base = BigInt::from(2 * rank as u64 - 1);
    let mag = base.pow(exponent.unsigned_abs() as u32);
    if exponent >= 0 {
        BigRational::from_integer(mag)
    } else {
        BigRational::new(BigInt::one(), mag)
    }
}

/// Concatenate-and-cancel action `(t₁⋯tₙ)ξ = (t₁,…,t_{n−k}, ξ_{k+1}, …)`.
pub fn act(g: &ReducedWord, xi: &BoundaryPrefix) -> Result<ActResult> {
    if g.rank() != xi.rank() {
        return Err(Error::RankMismatch {
            left: g.rank(),
            right: xi.rank(),
        });
    }
    let t = g.letters();
    let n = t.len();
    if n == 0 {
        return Ok(ActResult {
            point: xi.clone(),
            cancelled: 0,
            rn_exponent: 0,
        });
    }
    let base = xi.extended(n + 1);
    let s = base.materialized();
    let mut k = 0;
    while k < n && s[k].inverse() == t[n - 1 - k] {
        k += 1;
    }
    let mut letters = Vec::with_capacity(n - k + s.len() - k);
    letters.extend_from_slice(&t[..n - k]);
    letters.extend_from_slice(&s[k..]);
    let delta = 2 * k as i64 - n as i64;
    let tail = TailStream {
        seed: base.tail().seed,
        shift: base.tail().shift + delta,
    };
    Ok(ActResult {
        point: BoundaryPrefix::from_parts(xi.rank(), letters, tail),
        cancelled: k,
        rn_exponent: delta,
    })
}

/// Busemann level `|g| − 2·lcp(g, ξ)`; zero exactly on the horosphere `H_ξ` through `e`.
pub fn busemann_level(g: &ReducedWord, xi: &BoundaryPrefix) -> i64 {
    let seq = xi.prefix(g.len());
    g.len() as i64 - 2 * g.common_prefix_len(&seq) as i64
}

/// Membership `g ∈ H_ξ`.
pub fn horosphere_contains(g: &ReducedWord, xi: &BoundaryPrefix) -> bool {
    busemann_level(g, xi) == 0
}
