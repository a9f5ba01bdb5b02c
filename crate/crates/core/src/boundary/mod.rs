//! The boundary of the free group: infinite non-backtracking sequences,
//! virtualized as a materialized prefix plus a seeded lawful tail.

mod action;
mod cylinder;
mod geodesic;
mod horoball;

pub use action::{act, busemann_level, horosphere_contains, power_of_base, ActResult};
pub use cylinder::{cylinder_measure, Cylinder};
pub use geodesic::{geodesic_j, JWindow};
pub use horoball::{horoball, tail_agreement_depth, tail_cocycle, HorosphericalBall};

use std::fmt;
use std::hash::{Hash, Hasher};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::free_group::{format_letters, is_nonbacktracking, Letter};

/// Seeded source of tail letters. Letter `i` of a point with shift `s` is
/// drawn from the 64-bit word at stream index `i + s`, so extension order
/// never changes the letters produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TailStream {
    pub seed: u64,
    pub shift: i64,
}

impl TailStream {
    fn rng_at(&self, position: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let index = (position as i64).wrapping_add(self.shift) as u64;
        rng.set_word_pos(2 * index as u128);
        rng
    }

    /// Markov kernel: uniform over all `2r` letters at the root, otherwise
    /// uniform over the `2r - 1` non-backtracking continuations.
    fn draw(rank: usize, prev: Option<Letter>, word: u64) -> Letter {
        let choices = if prev.is_some() { 2 * rank - 1 } else { 2 * rank };
        let idx = ((word as u128 * choices as u128) >> 64) as usize;
        match prev {
            None => Letter::from_code(idx as u8),
            Some(p) => Letter::successors(rank, p).nth(idx).expect("index in range"),
        }
    }

    fn letter(&self, rank: usize, position: usize, prev: Option<Letter>) -> Letter {
        let word = self.rng_at(position).next_u64();
        Self::draw(rank, prev, word)
    }

    fn extend(&self, rank: usize, letters: &mut Vec<Letter>, depth: usize) {
        if letters.len() >= depth {
            return;
        }
        let mut rng = self.rng_at(letters.len());
        while letters.len() < depth {
            let next = Self::draw(rank, letters.last().copied(), rng.next_u64());
            letters.push(next);
        }
    }
}

/// A boundary point `ξ = (ξ₁, ξ₂, …)`.
///
/// Equality and hashing compare the represented infinite sequence for points
/// sharing a tail stream: trailing letters that the stream would generate
/// anyway are ignored. Points with different streams compare unequal.
#[derive(Debug, Clone)]
pub struct BoundaryPrefix {
    rank: usize,
    letters: Vec<Letter>,
    tail: TailStream,
    canonical_len: usize,
}

impl BoundaryPrefix {
    /// Samples `ν` lazily; `depth` letters are materialized up front.
    pub fn sample(rank: usize, seed: u64, depth: usize) -> Self {
        let mut p = BoundaryPrefix {
            rank,
            letters: Vec::new(),
            tail: TailStream { seed, shift: 0 },
            canonical_len: 0,
        };
        p.extend_to(depth);
        p
    }

    pub fn from_letters(rank: usize, letters: Vec<Letter>, seed: u64, shift: i64) -> Result<Self> {
        if rank < 1 {
            return Err(invalid("rank must be positive"));
        }
        if let Some(l) = letters.iter().find(|l| !l.fits_rank(rank)) {
            return Err(invalid(format!("letter {l} exceeds rank {rank}")));
        }
        if !is_nonbacktracking(&letters) {
            return Err(invalid(format!(
                "boundary prefix `{}` backtracks",
                format_letters(&letters)
            )));
        }
        Ok(Self::from_parts(rank, letters, TailStream { seed, shift }))
    }

    pub(crate) fn from_parts(rank: usize, letters: Vec<Letter>, tail: TailStream) -> Self {
        debug_assert!(is_nonbacktracking(&letters));
        let mut len = letters.len();
        while len > 0 {
            let prev = if len >= 2 { Some(letters[len - 2]) } else { None };
            if tail.letter(rank, len - 1, prev) != letters[len - 1] {
                break;
            }
            len -= 1;
        }
        BoundaryPrefix {
            rank,
            letters,
            tail,
            canonical_len: len,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn tail(&self) -> TailStream {
        self.tail
    }

    pub fn seed(&self) -> u64 {
        self.tail.seed
    }

    /// Letters materialized so far.
    pub fn materialized(&self) -> &[Letter] {
        &self.letters
    }

    pub fn depth(&self) -> usize {
        self.letters.len()
    }

    pub fn extend_to(&mut self, depth: usize) {
        self.tail.extend(self.rank, &mut self.letters, depth);
    }

    pub fn extended(&self, depth: usize) -> Self {
        let mut p = self.clone();
        p.extend_to(depth);
        p
    }

    /// Letter at 0-based position `i`, computed without materializing.
    pub fn letter_at(&self, i: usize) -> Letter {
        if i < self.letters.len() {
            return self.letters[i];
        }
        let mut tmp = self.letters.clone();
        self.tail.extend(self.rank, &mut tmp, i + 1);
        tmp[i]
    }

    /// The first `len` letters.
    pub fn prefix(&self, len: usize) -> Vec<Letter> {
        if len <= self.letters.len() {
            return self.letters[..len].to_vec();
        }
        let mut tmp = self.letters.clone();
        self.tail.extend(self.rank, &mut tmp, len);
        tmp
    }

    fn canonical(&self) -> &[Letter] {
        &self.letters[..self.canonical_len]
    }

    /// Length of the common prefix with `other`, searching at most `cap` letters.
    pub fn common_prefix_len(&self, other: &Self, cap: usize) -> usize {
        let mut a = self.clone();
        let mut b = other.clone();
        let mut i = 0;
        while i < cap {
            if i >= a.depth() {
                a.extend_to((2 * i).max(8).min(cap));
            }
            if i >= b.depth() {
                b.extend_to((2 * i).max(8).min(cap));
            }
            if a.letters[i] != b.letters[i] {
                return i;
            }
            i += 1;
        }
        cap
    }
}

impl PartialEq for BoundaryPrefix {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.tail == other.tail && self.canonical() == other.canonical()
    }
}

impl Eq for BoundaryPrefix {}

impl Hash for BoundaryPrefix {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rank.hash(state);
        self.tail.hash(state);
        self.canonical().hash(state);
    }
}

impl fmt::Display for BoundaryPrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_letters(&self.letters))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampled_prefixes_do_not_backtrack() {
        for seed in 0..200 {
            let p = BoundaryPrefix::sample(2, seed, 30);
            assert!(is_nonbacktracking(p.materialized()));
            assert_eq!(p.depth(), 30);
        }
    }

    #[test]
    fn extension_is_deterministic_and_order_free() {
        let a = BoundaryPrefix::sample(3, 99, 40);
        let mut b = BoundaryPrefix::sample(3, 99, 5);
        b.extend_to(17);
        b.extend_to(40);
        assert_eq!(a.materialized(), b.materialized());
        let c = BoundaryPrefix::sample(3, 99, 0);
        assert_eq!(c.letter_at(39), a.materialized()[39]);
        assert_eq!(c.prefix(40), a.materialized());
    }

    #[test]
    fn equality_ignores_materialization_depth() {
        let a = BoundaryPrefix::sample(2, 7, 3);
        let b = BoundaryPrefix::sample(2, 7, 25);
        assert_eq!(a, b);
        let mut hs = std::collections::HashSet::new();
        hs.insert(a);
        assert!(hs.contains(&b));
        let c = BoundaryPrefix::sample(2, 8, 25);
        assert_ne!(b, c);
    }

    #[test]
    fn explicit_prefix_validation() {
        let bad = vec![Letter::generator(1, false), Letter::generator(1, true)];
        assert!(BoundaryPrefix::from_letters(2, bad, 0, 0).is_err());
        let ok = vec![Letter::generator(1, false), Letter::generator(2, true)];
        let p = BoundaryPrefix::from_letters(2, ok.clone(), 0, 0).unwrap();
        assert_eq!(&p.prefix(2), &ok);
        assert!(is_nonbacktracking(&p.prefix(50)));
    }

    #[test]
    fn common_prefix_of_distinct_samples() {
        let a = BoundaryPrefix::sample(2, 1, 4);
        let b = BoundaryPrefix::from_letters(2, a.prefix(6), 55, 0).unwrap();
        assert!(a.common_prefix_len(&b, 1000) >= 6);
        assert_eq!(a.common_prefix_len(&a, 100), 100);
    }
}
