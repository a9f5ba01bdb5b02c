use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::error::{invalid, Error, Result};
use crate::free_group::{format_letters, is_nonbacktracking, parse_letters, Letter};

/// The set of boundary points whose first letters equal `prefix`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cylinder {
    rank: usize,
    prefix: Vec<Letter>,
}

impl Cylinder {
    pub fn new(rank: usize, prefix: Vec<Letter>) -> Result<Self> {
        if rank < 1 {
            return Err(invalid("rank must be positive"));
        }
        if prefix.iter().any(|l| !l.fits_rank(rank)) {
            return Err(invalid("cylinder letter exceeds rank"));
        }
        if !is_nonbacktracking(&prefix) {
            return Err(invalid(format!(
                "cylinder prefix `{}` backtracks",
                format_letters(&prefix)
            )));
        }
        Ok(Cylinder { rank, prefix })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn prefix(&self) -> &[Letter] {
        &self.prefix
    }

    pub fn depth(&self) -> usize {
        self.prefix.len()
    }

    pub fn contains(&self, letters: &[Letter]) -> bool {
        letters.len() >= self.prefix.len() && letters[..self.prefix.len()] == self.prefix[..]
    }

    /// Admissible one-letter refinements.
    pub fn children(&self) -> Vec<Cylinder> {
        let next: Vec<Letter> = match self.prefix.last() {
            None => Letter::all(self.rank).collect(),
            Some(&l) => Letter::successors(self.rank, l).collect(),
        };
        next.into_iter()
            .map(|l| {
                let mut p = self.prefix.clone();
                p.push(l);
                Cylinder {
                    rank: self.rank,
                    prefix: p,
                }
            })
            .collect()
    }

    pub fn measure(&self) -> BigRational {
        cylinder_measure(self)
    }

    pub fn measure_f64(&self) -> f64 {
        self.measure().to_f64().unwrap_or(f64::NAN)
    }
}

/// `ν(C) = (2r)⁻¹ (2r−1)^{−(n−1)}` for depth `n ≥ 1`; the whole space has mass 1.
pub fn cylinder_measure(c: &Cylinder) -> BigRational {
    let n = c.depth();
    if n == 0 {
        return BigRational::one();
    }
    let r = c.rank as u64;
    let denom = BigInt::from(2 * r) * BigInt::from(2 * r - 1).pow((n - 1) as u32);
    BigRational::new(BigInt::one(), denom)
}

impl fmt::Display for Cylinder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", format_letters(&self.prefix), self.rank)
    }
}

impl FromStr for Cylinder {
    type Err = Error;

    /// Parses `prefix@rank`, e.g. `a1.A2@2`.
    fn from_str(s: &str) -> Result<Self> {
        let (prefix, rank) = s
            .rsplit_once('@')
            .ok_or_else(|| Error::Parse(format!("cylinder `{s}` lacks @rank")))?;
        let rank: usize = rank
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad rank in `{s}`")))?;
        Cylinder::new(rank, parse_letters(prefix)?)
    }
}
