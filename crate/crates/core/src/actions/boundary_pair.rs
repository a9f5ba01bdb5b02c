use super::{NonSingularAction, XPoint};
use crate::boundary::{act, BoundaryPrefix};
use crate::error::{Error, Result};
use crate::free_group::{Letter, ReducedWord};
use crate::relation_engine::Scalar;

/// `𝔽` acting on a second copy of its boundary, with `ν` as reference measure.
#[derive(Debug, Clone)]
pub struct BoundaryPairAction {
    rank: usize,
}

impl BoundaryPairAction {
    pub fn new(rank: usize) -> Self {
        BoundaryPairAction { rank }
    }

    fn point<'a>(&self, x: &'a XPoint) -> Result<&'a BoundaryPrefix> {
        match x {
            XPoint::Boundary(p) if p.rank() == self.rank => Ok(p),
            other => Err(Error::Domain(format!("{other} is not a rank-{} boundary point", self.rank))),
        }
    }
}

impl NonSingularAction for BoundaryPairAction {
    fn id(&self) -> &str {
        "boundary_pair"
    }

    fn rank(&self) -> usize {
        self.rank
    }

    fn apply_letter(&self, l: Letter, x: &XPoint) -> Result<XPoint> {
        let g = ReducedWord::letter(self.rank, l);
        Ok(XPoint::Boundary(act(&g, self.point(x)?)?.point))
    }

    fn rn_letter(&self, l: Letter, x: &XPoint) -> Result<Scalar> {
        let g = ReducedWord::letter(self.rank, l);
        Ok(Scalar::Exact(act(&g, self.point(x)?)?.rn_value()))
    }

    // whole words in one pass; same values as the letter-by-letter default
    fn apply_word(&self, g: &ReducedWord, x: &XPoint) -> Result<XPoint> {
        self.check_rank(g)?;
        Ok(XPoint::Boundary(act(g, self.point(x)?)?.point))
    }

    fn rn(&self, g: &ReducedWord, x: &XPoint) -> Result<Scalar> {
        self.check_rank(g)?;
        Ok(Scalar::Exact(act(g, self.point(x)?)?.rn_value()))
    }

    fn tolerance(&self) -> f64 {
        0.0
    }

    fn sample_point(&self, seed: u64) -> Result<(XPoint, f64)> {
        Ok((XPoint::Boundary(BoundaryPrefix::sample(self.rank, seed, 0)), 1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_group::ball;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn word_and_letter_paths_agree_with_boundary_formula() {
        let a = BoundaryPairAction::new(2);
        let words = ball(2, 8);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for i in 0..10_000u64 {
            let g = &words[rng.random_range(0..words.len())];
            let (x, _) = a.sample_point(i).unwrap();
            let XPoint::Boundary(xi) = &x else { unreachable!() };
            let direct = act(g, xi).unwrap();
            let expected = Scalar::power_of_base(2, direct.rn_exponent);
            assert_eq!(a.rn(g, &x).unwrap(), expected);
            if i % 50 == 0 {
                let slow = g.letters().iter().rev().try_fold((x.clone(), Scalar::one()), |(y, w), &l| {
                    let r = a.rn_letter(l, &y)?;
                    Ok::<_, Error>((a.apply_letter(l, &y)?, &w * &r))
                });
                let (y, w) = slow.unwrap();
                assert_eq!(w, expected);
                assert_eq!(y, XPoint::Boundary(direct.point.clone()));
            }
        }
    }
}
