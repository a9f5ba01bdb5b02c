use super::BoundaryPrefix;
use crate::error::{invalid, Error, Result};
use crate::free_group::{for_each_nonbacktracking, ReducedWord};

/// `𝓑ₙ(ξ)`: points agreeing with the center beyond coordinate `n`, each paired
/// with the word `g` satisfying `g·η = ξ`. Every such `g` lies on `H_ξ`.
#[derive(Debug, Clone)]
pub struct HorosphericalBall {
    pub center: BoundaryPrefix,
    pub n: usize,
    pub members: Vec<(BoundaryPrefix, ReducedWord)>,
}

impl HorosphericalBall {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = &BoundaryPrefix> {
        self.members.iter().map(|(p, _)| p)
    }
}

/// Enumerates `𝓑ₙ(ξ)` in lexicographic order of the rewritten prefix.
pub fn horoball(xi: &BoundaryPrefix, n: i64) -> Result<HorosphericalBall> {
    if n < 0 {
        return Err(invalid(format!("horoball index must be nonnegative, got {n}")));
    }
    let n = n as usize;
    let rank = xi.rank();
    let center = xi.extended(n + 1);
    let c = center.materialized();
    let excluded = c[n].inverse();
    let head = &c[..n];
    let tail = &c[n..];
    let mut members = Vec::with_capacity((2 * rank - 1).pow(n as u32));
    for_each_nonbacktracking(rank, n, Some(excluded), |w| {
        let mut letters = Vec::with_capacity(w.len() + tail.len());
        letters.extend_from_slice(w);
        letters.extend_from_slice(tail);
        let eta = BoundaryPrefix::from_parts(rank, letters, center.tail());
        let g = ReducedWord::reduce(
            rank,
            head.iter().copied().chain(w.iter().rev().map(|l| l.inverse())),
        )
        .expect("letters fit rank");
        members.push((eta, g));
    });
    Ok(HorosphericalBall { center, n, members })
}

/// Smallest `N` with `ξ_i = η_i` for all `i > N`, when the two points share a
/// tail stream and their tails merge within `cap` extra letters.
pub fn tail_agreement_depth(xi: &BoundaryPrefix, eta: &BoundaryPrefix, cap: usize) -> Option<usize> {
    if xi.rank() != eta.rank() || xi.tail() != eta.tail() {
        return None;
    }
    let base = xi.depth().max(eta.depth()).max(1);
    let mut len = base;
    while len <= base + cap {
        let a = xi.prefix(len);
        let b = eta.prefix(len);
        if a[len - 1] == b[len - 1] {
            // same stream and same letter: identical from here on
            let last_diff = (0..len).rev().find(|&i| a[i] != b[i]);
            return Some(last_diff.map_or(0, |i| i + 1));
        }
        len += 1;
    }
    None
}

/// `α(ξ, η) = (ξ₁⋯ξ_N)(η₁⋯η_N)⁻¹`, the element carrying `η` to `ξ`.
pub fn tail_cocycle(
    xi: &BoundaryPrefix,
    eta: &BoundaryPrefix,
    agreement_depth: usize,
) -> Result<ReducedWord> {
    if xi.rank() != eta.rank() {
        return Err(Error::RankMismatch {
            left: xi.rank(),
            right: eta.rank(),
        });
    }
    if xi.tail() != eta.tail() {
        return Err(invalid("points do not share a tail stream"));
    }
    let len = xi.depth().max(eta.depth()).max(agreement_depth + 1);
    let a = xi.prefix(len);
    let b = eta.prefix(len);
    if a[agreement_depth..] != b[agreement_depth..] {
        return Err(invalid(format!(
            "points are not tail-equivalent beyond depth {agreement_depth}"
        )));
    }
    let n = agreement_depth;
    ReducedWord::reduce(
        xi.rank(),
        a[..n]
            .iter()
            .copied()
            .chain(b[..n].iter().rev().map(|l| l.inverse())),
    )
}
