use std::collections::BTreeMap;

use super::BoundaryPrefix;
use crate::error::{invalid, Error, Result};
use crate::free_group::Letter;

/// Step letters `J(n) = γ(n)⁻¹γ(n+1)` indexed by `n`.
pub type JWindow = BTreeMap<i64, Letter>;

const CONFLUENCE_CAP: usize = 4096;

/// Step letters along the geodesic from `b` to `c`, parametrized so that
/// `γ(0)` lies on the horosphere centered at `c` through the identity.
///
/// With `m` the length of the common prefix of `b` and `c`, the normalized
/// geodesic has `J(n) = c_{n+1}` for `n ≥ m` and `J(n) = b_{2m−n}⁻¹` for `n < m`.
pub fn geodesic_j(b: &BoundaryPrefix, c: &BoundaryPrefix, window: i64) -> Result<JWindow> {
    if b.rank() != c.rank() {
        return Err(Error::RankMismatch {
            left: b.rank(),
            right: c.rank(),
        });
    }
    if window < 0 {
        return Err(invalid("window must be nonnegative"));
    }
    if b == c {
        return Err(Error::DegeneratePair("b = c".into()));
    }
    let m = b.common_prefix_len(c, CONFLUENCE_CAP);
    if m >= CONFLUENCE_CAP {
        return Err(Error::DegeneratePair(format!(
            "no disagreement within {CONFLUENCE_CAP} letters"
        )));
    }
    let mut out = JWindow::new();
    if window == 0 {
        return Ok(out);
    }
    let m = m as i64;
    let c_letters = c.prefix((m + window).max(window) as usize + 1);
    let b_letters = b.prefix((2 * m + window) as usize + 1);
    for n in -window..window {
        let letter = if n >= m {
            c_letters[n as usize]
        } else {
            b_letters[(2 * m - n - 1) as usize].inverse()
        };
        out.insert(n, letter);
    }
    Ok(out)
}
