use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{NonSingularAction, XPoint};
use crate::error::{Error, Result};
use crate::free_group::{Letter, ReducedWord};
use crate::relation_engine::Scalar;

type Mat2 = [[i64; 2]; 2];

const GENERATORS: [Mat2; 2] = [[[1, 2], [0, 1]], [[1, 0], [2, 1]]];

fn letter_matrix(l: Letter) -> Mat2 {
    let [[a, b], [c, d]] = GENERATORS[l.index() - 1];
    if l.is_inverse_generator() {
        [[d, -b], [-c, a]]
    } else {
        [[a, b], [c, d]]
    }
}

/// A plane point with dyadic rational coordinates `mant·2^exp`, so that
/// integer matrices act on it without rounding.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DyadicPoint {
    mant: [BigInt; 2],
    exp: i64,
}

impl DyadicPoint {
    /// Exact conversion of finite doubles.
    pub fn from_f64(p: [f64; 2]) -> Result<Self> {
        if p.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain(format!("non-finite plane point {p:?}")));
        }
        let parts: Vec<(BigInt, i64)> = p
            .iter()
            .map(|x| {
                let (m, e, sign) = x.integer_decode();
                (BigInt::from(m) * sign as i64, e as i64)
            })
            .collect();
        let exp = parts
            .iter()
            .filter(|(m, _)| !m.is_zero())
            .map(|(_, e)| *e)
            .min()
            .unwrap_or(0);
        let shift = |(m, e): &(BigInt, i64)| if m.is_zero() { BigInt::zero() } else { m << (e - exp) as usize };
        Ok(DyadicPoint {
            mant: [shift(&parts[0]), shift(&parts[1])],
            exp,
        }
        .normalized())
    }

    fn normalized(mut self) -> Self {
        let tz = self.mant.iter().filter_map(|m| m.trailing_zeros()).min();
        match tz {
            None => self.exp = 0,
            Some(tz) if tz > 0 => {
                for m in &mut self.mant {
                    *m = &*m >> tz as usize;
                }
                self.exp += tz as i64;
            }
            Some(_) => {}
        }
        self
    }

    pub fn is_origin(&self) -> bool {
        self.mant.iter().all(Zero::is_zero)
    }

    pub fn to_f64(&self) -> [f64; 2] {
        let scale = |m: &BigInt| {
            let q = if self.exp >= 0 {
                BigRational::from_integer(m << self.exp as usize)
            } else {
                BigRational::new(m.clone(), BigInt::from(1) << (-self.exp) as usize)
            };
            q.to_f64().unwrap_or(f64::NAN)
        };
        [scale(&self.mant[0]), scale(&self.mant[1])]
    }

    fn transform(&self, m: &Mat2) -> Self {
        let [x, y] = &self.mant;
        DyadicPoint {
            mant: [x * m[0][0] + y * m[0][1], x * m[1][0] + y * m[1][1]],
            exp: self.exp,
        }
        .normalized()
    }
}

/// The Sanov pair acting linearly on the punctured plane, preserving area.
/// Sampling uses a standard Gaussian reference with density weight
/// `2π·exp(|x|²/2)`. Coordinates are dyadic rationals, so the action is exact.
#[derive(Debug, Clone)]
pub struct SanovPlane;

impl SanovPlane {
    pub fn new(rank: usize) -> Result<Self> {
        if rank != 2 {
            return Err(Error::InvalidArgument(format!(
                "sanov_plane is defined for rank 2, not {rank}"
            )));
        }
        Ok(SanovPlane)
    }

    pub fn matrix(g: &ReducedWord) -> [[i128; 2]; 2] {
        let mut acc = [[1i128, 0], [0, 1]];
        for &l in g.letters() {
            acc = mul2(&acc, &letter_matrix(l));
        }
        acc
    }

    /// First reduced word of length `1..=max_len` whose matrix is the identity.
    pub fn find_relation(max_len: usize) -> Option<ReducedWord> {
        fn go(m: &[[i128; 2]; 2], left: usize, path: &mut Vec<Letter>) -> Option<ReducedWord> {
            if left == 0 {
                return None;
            }
            for l in Letter::all(2) {
                if path.last() == Some(&l.inverse()) {
                    continue;
                }
                let next = mul2(m, &letter_matrix(l));
                path.push(l);
                if next == [[1, 0], [0, 1]] {
                    return Some(ReducedWord::from_letters(2, path.clone()).expect("reduced"));
                }
                if let Some(w) = go(&next, left - 1, path) {
                    return Some(w);
                }
                path.pop();
            }
            None
        }
        go(&[[1, 0], [0, 1]], max_len, &mut Vec::new())
    }
}

fn mul2(a: &[[i128; 2]; 2], b: &Mat2) -> [[i128; 2]; 2] {
    let mut c = [[0i128; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] as i128 + a[i][1] * b[1][j] as i128;
        }
    }
    c
}

fn plane_point(x: &XPoint) -> Result<&DyadicPoint> {
    match x {
        XPoint::Plane(p) if p.is_origin() => {
            Err(Error::Domain("the origin is excluded from the punctured plane".into()))
        }
        XPoint::Plane(p) => Ok(p),
        other => Err(Error::Domain(format!("{other} is not a plane point"))),
    }
}

impl NonSingularAction for SanovPlane {
    fn id(&self) -> &str {
        "sanov_plane"
    }

    fn rank(&self) -> usize {
        2
    }

    fn apply_letter(&self, l: Letter, x: &XPoint) -> Result<XPoint> {
        Ok(XPoint::Plane(plane_point(x)?.transform(&letter_matrix(l))))
    }

    fn rn_letter(&self, _: Letter, x: &XPoint) -> Result<Scalar> {
        plane_point(x)?;
        Ok(Scalar::one())
    }

    fn tolerance(&self) -> f64 {
        0.0
    }

    fn sample_point(&self, seed: u64) -> Result<(XPoint, f64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: f64 = StandardNormal.sample(&mut rng);
        let y: f64 = StandardNormal.sample(&mut rng);
        let w = 2.0 * std::f64::consts::PI * ((x * x + y * y) / 2.0).exp();
        Ok((XPoint::Plane(DyadicPoint::from_f64([x, y])?), w))
    }
}
