use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::Rng;

use super::InnerAutomorphism;
use crate::boundary::BoundaryPrefix;
use crate::error::{invalid, Result};
use crate::free_group::{enumerate_nonbacktracking, format_letters, Letter};

/// An inner automorphism of the tail relation that rewrites the first `m`
/// letters of a boundary point by a fixed bijection keeping the `m`-th letter.
#[derive(Debug, Clone)]
pub struct PrefixAutomorphism {
    rank: usize,
    order: usize,
    table: HashMap<Vec<Letter>, Vec<Letter>>,
}

impl PrefixAutomorphism {
    /// Builds from an explicit table over all non-backtracking words of length `order`.
    pub fn new(rank: usize, order: usize, table: HashMap<Vec<Letter>, Vec<Letter>>) -> Result<Self> {
        if order == 0 {
            return Err(invalid("automorphism order must be positive"));
        }
        let domain = enumerate_nonbacktracking(rank, order, None);
        if table.len() != domain.len() {
            return Err(invalid(format!(
                "table has {} entries, expected {}",
                table.len(),
                domain.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for w in &domain {
            let image = table
                .get(w.letters())
                .ok_or_else(|| invalid(format!("no image for {}", format_letters(w.letters()))))?;
            if image.len() != order
                || image.last() != w.letters().last()
                || !crate::free_group::is_nonbacktracking(image)
                || image.iter().any(|l| !l.fits_rank(rank))
            {
                return Err(invalid(format!(
                    "image {} of {} is not an admissible rewrite",
                    format_letters(image),
                    format_letters(w.letters())
                )));
            }
            if !seen.insert(image.clone()) {
                return Err(invalid(format!("image {} repeated", format_letters(image))));
            }
        }
        Ok(PrefixAutomorphism { rank, order, table })
    }

    /// Uniformly random bijection within each last-letter group.
    pub fn random<R: Rng + ?Sized>(rank: usize, order: usize, rng: &mut R) -> Self {
        let mut groups: BTreeMap<Letter, Vec<Vec<Letter>>> = BTreeMap::new();
        for w in enumerate_nonbacktracking(rank, order, None) {
            groups
                .entry(w.last().expect("order positive"))
                .or_default()
                .push(w.letters().to_vec());
        }
        let mut table = HashMap::new();
        for (_, words) in groups {
            let mut images = words.clone();
            images.shuffle(rng);
            table.extend(words.into_iter().zip(images));
        }
        PrefixAutomorphism { rank, order, table }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn inverse(&self) -> Self {
        PrefixAutomorphism {
            rank: self.rank,
            order: self.order,
            table: self.table.iter().map(|(k, v)| (v.clone(), k.clone())).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.table.iter().all(|(k, v)| k == v)
    }
}

impl InnerAutomorphism<BoundaryPrefix> for PrefixAutomorphism {
    fn apply(&self, p: &BoundaryPrefix) -> Result<BoundaryPrefix> {
        if p.rank() != self.rank {
            return Err(invalid("rank mismatch between automorphism and point"));
        }
        let mut letters = p.prefix(p.depth().max(self.order));
        let image = &self.table[&letters[..self.order]];
        letters[..self.order].copy_from_slice(image);
        Ok(BoundaryPrefix::from_parts(self.rank, letters, p.tail()))
    }

    fn order(&self) -> usize {
        self.order
    }

    fn describe(&self) -> String {
        let moved = self.table.iter().filter(|(k, v)| k != v).count();
        format!("prefix rewrite of order {} moving {moved} prefixes", self.order)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::tail_agreement_depth;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_tables_validate_and_invert() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for m in 1..=4 {
            let phi = PrefixAutomorphism::random(2, m, &mut rng);
            PrefixAutomorphism::new(2, m, phi.table.clone()).unwrap();
            let inv = phi.inverse();
            for seed in 0..20 {
                let xi = BoundaryPrefix::sample(2, seed, 6);
                let y = phi.apply(&xi).unwrap();
                assert_eq!(inv.apply(&y).unwrap(), xi);
                let depth = tail_agreement_depth(&xi, &y, 64).unwrap();
                assert!(depth <= m);
            }
        }
    }

    #[test]
    fn rejects_last_letter_change() {
        let a = Letter::generator(1, false);
        let b = Letter::generator(2, false);
        let mut table: HashMap<_, _> = Letter::all(2).map(|l| (vec![l], vec![l])).collect();
        table.insert(vec![a], vec![b]);
        table.insert(vec![b], vec![a]);
        assert!(PrefixAutomorphism::new(2, 1, table).is_err());
    }
}
