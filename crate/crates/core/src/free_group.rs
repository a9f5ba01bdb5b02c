//! Reduced-word arithmetic for the free group of rank `r`.
//!
//! Generator `a_i` (1-based) has code `2(i-1)` and its inverse `2(i-1)+1`, so
//! inversion flips the low bit. Words are immutable once built.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};

/// One element of the symmetric generating set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(u8);

impl Letter {
    pub fn from_code(code: u8) -> Self {
        Letter(code)
    }

    /// Generator `a_index` (1-based), or its inverse.
    pub fn generator(index: usize, inverted: bool) -> Self {
        assert!((1..=128).contains(&index), "generator index out of range");
        Letter((2 * (index - 1) + inverted as usize) as u8)
    }

    pub fn code(self) -> u8 {
        self.0
    }

    #[inline]
    pub fn inverse(self) -> Self {
        Letter(self.0 ^ 1)
    }

    pub fn is_inverse_generator(self) -> bool {
        self.0 & 1 == 1
    }

    /// 1-based generator index.
    pub fn index(self) -> usize {
        (self.0 >> 1) as usize + 1
    }

    pub fn fits_rank(self, rank: usize) -> bool {
        (self.0 as usize) < 2 * rank
    }

    /// All `2r` letters in code order.
    pub fn all(rank: usize) -> impl Iterator<Item = Letter> + Clone {
        (0..2 * rank as u8).map(Letter)
    }

    /// Letters that may follow `prev` without backtracking, in code order.
    pub fn successors(rank: usize, prev: Letter) -> impl Iterator<Item = Letter> + Clone {
        let banned = prev.inverse();
        Letter::all(rank).filter(move |&l| l != banned)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = if self.is_inverse_generator() { 'A' } else { 'a' };
        write!(f, "{}{}", c, self.index())
    }
}

impl FromStr for Letter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut chars = s.chars();
        let inverted = match chars.next() {
            Some('a') => false,
            Some('A') => true,
            _ => return Err(Error::Parse(format!("bad letter token `{s}`"))),
        };
        let index: usize = chars
            .as_str()
            .parse()
            .map_err(|_| Error::Parse(format!("bad letter token `{s}`")))?;
        if index == 0 || index > 128 {
            return Err(Error::Parse(format!("generator index out of range in `{s}`")));
        }
        Ok(Letter::generator(index, inverted))
    }
}

/// True iff no letter is immediately followed by its inverse.
pub fn is_nonbacktracking(letters: &[Letter]) -> bool {
    letters.windows(2).all(|w| w[1] != w[0].inverse())
}

/// Serializes letters as dot-separated tokens, `e` when empty.
pub fn format_letters(letters: &[Letter]) -> String {
    if letters.is_empty() {
        return "e".to_string();
    }
    let tokens: Vec<String> = letters.iter().map(|l| l.to_string()).collect();
    tokens.join(".")
}

/// Parses the dot-separated token format. `e` (or an empty string) is the empty sequence.
pub fn parse_letters(s: &str) -> Result<Vec<Letter>> {
    let s = s.trim();
    if s.is_empty() || s == "e" {
        return Ok(Vec::new());
    }
    s.split('.').map(|t| t.trim().parse()).collect()
}

/// A free-group element in reduced form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReducedWord {
    rank: usize,
    letters: Vec<Letter>,
}

impl ReducedWord {
    pub fn identity(rank: usize) -> Self {
        ReducedWord {
            rank,
            letters: Vec::new(),
        }
    }

    pub fn letter(rank: usize, l: Letter) -> Self {
        ReducedWord {
            rank,
            letters: vec![l],
        }
    }

    /// Wraps letters that are already reduced; rejects backtracking input.
    pub fn from_letters(rank: usize, letters: Vec<Letter>) -> Result<Self> {
        if rank == 0 {
            return Err(invalid("rank must be positive"));
        }
        if let Some(l) = letters.iter().find(|l| !l.fits_rank(rank)) {
            return Err(invalid(format!("letter {l} exceeds rank {rank}")));
        }
        if !is_nonbacktracking(&letters) {
            return Err(invalid(format!(
                "`{}` is not reduced",
                format_letters(&letters)
            )));
        }
        Ok(ReducedWord { rank, letters })
    }

    /// Freely reduces an arbitrary letter sequence.
    pub fn reduce(rank: usize, letters: impl IntoIterator<Item = Letter>) -> Result<Self> {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if !l.fits_rank(rank) {
                return Err(invalid(format!("letter {l} exceeds rank {rank}")));
            }
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Ok(ReducedWord { rank, letters: out })
    }

    pub fn parse(rank: usize, s: &str) -> Result<Self> {
        Self::from_letters(rank, parse_letters(s)?)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// Word length `|g|`.
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_identity()
    }

    pub fn first(&self) -> Option<Letter> {
        self.letters.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.letters.last().copied()
    }

    fn check_rank(&self, other: &Self) -> Result<()> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch {
                left: self.rank,
                right: other.rank,
            });
        }
        Ok(())
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_rank(other)?;
        let mut cancel = 0;
        let (a, b) = (&self.letters, &other.letters);
        while cancel < a.len() && cancel < b.len() && a[a.len() - 1 - cancel] == b[cancel].inverse()
        {
            cancel += 1;
        }
        let mut letters = Vec::with_capacity(a.len() + b.len() - 2 * cancel);
        letters.extend_from_slice(&a[..a.len() - cancel]);
        letters.extend_from_slice(&b[cancel..]);
        Ok(ReducedWord {
            rank: self.rank,
            letters,
        })
    }

    pub fn inverse(&self) -> Self {
        ReducedWord {
            rank: self.rank,
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// Word metric `d(g, h) = |g⁻¹h|`.
    pub fn distance(&self, other: &Self) -> Result<usize> {
        Ok(self.inverse().multiply(other)?.len())
    }

    /// Length of the longest common prefix with a letter sequence.
    pub fn common_prefix_len(&self, seq: &[Letter]) -> usize {
        self.letters
            .iter()
            .zip(seq)
            .take_while(|(a, b)| a == b)
            .count()
    }
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_letters(&self.letters))
    }
}

/// Every reduced word of length exactly `n`, lexicographic on letter codes,
/// optionally dropping words whose final letter is `last_letter_excluded`.
pub fn enumerate_nonbacktracking(
    rank: usize,
    n: usize,
    last_letter_excluded: Option<Letter>,
) -> Vec<ReducedWord> {
    let mut out = Vec::new();
    for_each_nonbacktracking(rank, n, last_letter_excluded, |letters| {
        out.push(ReducedWord {
            rank,
            letters: letters.to_vec(),
        })
    });
    out
}

/// Visits the same sequence as [`enumerate_nonbacktracking`] without allocating words.
pub fn for_each_nonbacktracking(
    rank: usize,
    n: usize,
    last_letter_excluded: Option<Letter>,
    mut visit: impl FnMut(&[Letter]),
) {
    let mut buf = Vec::with_capacity(n);
    fn rec(
        rank: usize,
        n: usize,
        excluded: Option<Letter>,
        buf: &mut Vec<Letter>,
        visit: &mut dyn FnMut(&[Letter]),
    ) {
        if buf.len() == n {
            visit(buf);
            return;
        }
        let last_slot = buf.len() + 1 == n;
        for l in Letter::all(rank) {
            if let Some(&prev) = buf.last() {
                if l == prev.inverse() {
                    continue;
                }
            }
            if last_slot && Some(l) == excluded {
                continue;
            }
            buf.push(l);
            rec(rank, n, excluded, buf, visit);
            buf.pop();
        }
    }
    rec(rank, n, last_letter_excluded, &mut buf, &mut visit);
}

/// All reduced words with `|g| <= max_len`, shortest first.
pub fn ball(rank: usize, max_len: usize) -> Vec<ReducedWord> {
    (0..=max_len)
        .flat_map(|n| enumerate_nonbacktracking(rank, n, None))
        .collect()
}
