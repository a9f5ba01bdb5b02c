use std::path::Path;

use num_rational::BigRational;
use num_traits::Signed;
use rand::seq::SliceRandom;
use rand::Rng;

use super::{NonSingularAction, XPoint};
use crate::error::{Error, Result};
use crate::free_group::Letter;
use crate::relation_engine::Scalar;

/// Generators permuting a finite weighted set; `rn(g, x) = λ(gx)/λ(x)`.
///
/// Spec files are line based:
///
/// ```text
/// # three points, one generator
/// points = 3
/// weights = 1, 2, 3/2
/// a1 = 1 2 0
/// ```
///
/// Line `aᵢ` lists the image of each point under generator `i`, and every
/// generator from `a1` to the rank must be present.
#[derive(Debug, Clone)]
pub struct FiniteAction {
    weights: Vec<BigRational>,
    forward: Vec<Vec<usize>>,
    backward: Vec<Vec<usize>>,
}

impl FiniteAction {
    pub fn new(weights: Vec<BigRational>, generators: Vec<Vec<usize>>) -> Result<Self> {
        let size = weights.len();
        if size == 0 {
            return Err(Error::Config("finite action needs at least one point".into()));
        }
        if generators.is_empty() {
            return Err(Error::Config("finite action needs at least one generator".into()));
        }
        if let Some(i) = weights.iter().position(|w| !w.is_positive()) {
            return Err(Error::Config(format!("weight of point {i} is not positive")));
        }
        let mut backward = Vec::with_capacity(generators.len());
        for (g, images) in generators.iter().enumerate() {
            if images.len() != size {
                return Err(Error::Config(format!(
                    "a{} lists {} images for {size} points",
                    g + 1,
                    images.len()
                )));
            }
            let mut inv = vec![usize::MAX; size];
            for (x, &y) in images.iter().enumerate() {
                if y >= size || inv[y] != usize::MAX {
                    return Err(Error::Config(format!("a{} is not a permutation", g + 1)));
                }
                inv[y] = x;
            }
            backward.push(inv);
        }
        Ok(FiniteAction {
            weights,
            forward: generators,
            backward,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut points: Option<usize> = None;
        let mut weights: Option<Vec<BigRational>> = None;
        let mut gens: Vec<(usize, Vec<usize>)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: &str| Error::Config(format!("line {}: {msg}", lineno + 1));
            let (key, value) = line.split_once('=').ok_or_else(|| bad("expected key = value"))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "points" => points = Some(value.parse().map_err(|_| bad("bad point count"))?),
                "weights" => {
                    weights = Some(
                        value
                            .split(',')
                            .map(|t| t.trim().parse::<BigRational>().map_err(|_| bad("bad weight")))
                            .collect::<Result<_>>()?,
                    )
                }
                k if k.starts_with('a') => {
                    let idx: usize = k[1..].parse().map_err(|_| bad("bad generator name"))?;
                    let images = value
                        .split_whitespace()
                        .map(|t| t.parse::<usize>().map_err(|_| bad("bad image")))
                        .collect::<Result<Vec<_>>>()?;
                    gens.push((idx, images));
                }
                _ => return Err(bad("unknown key")),
            }
        }
        let points = points.ok_or_else(|| Error::Config("missing `points`".into()))?;
        let weights = weights.unwrap_or_else(|| vec![BigRational::from_integer(1.into()); points]);
        if weights.len() != points {
            return Err(Error::Config(format!("{} weights for {points} points", weights.len())));
        }
        gens.sort_by_key(|(i, _)| *i);
        for (k, (i, _)) in gens.iter().enumerate() {
            if *i != k + 1 {
                return Err(Error::Config(format!("generator a{} missing or repeated", k + 1)));
            }
        }
        FiniteAction::new(weights, gens.into_iter().map(|(_, g)| g).collect())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Random permutations and weights with small numerators and denominators.
    pub fn random<R: Rng + ?Sized>(rank: usize, points: usize, rng: &mut R) -> Self {
        let weights = (0..points)
            .map(|_| {
                BigRational::new(
                    rng.random_range(1..=9i64).into(),
                    rng.random_range(1..=4i64).into(),
                )
            })
            .collect();
        let generators = (0..rank)
            .map(|_| {
                let mut p: Vec<usize> = (0..points).collect();
                p.shuffle(rng);
                p
            })
            .collect();
        FiniteAction::new(weights, generators).expect("random action is valid")
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight(&self, x: usize) -> &BigRational {
        &self.weights[x]
    }

    fn index(&self, x: &XPoint) -> Result<usize> {
        match x {
            XPoint::Index(i) if *i < self.len() => Ok(*i),
            other => Err(Error::Domain(format!("{other} is not a point of this finite action"))),
        }
    }

    fn image(&self, l: Letter, i: usize) -> usize {
        if l.is_inverse_generator() {
            self.backward[l.index() - 1][i]
        } else {
            self.forward[l.index() - 1][i]
        }
    }
}

impl NonSingularAction for FiniteAction {
    fn id(&self) -> &str {
        "finite_model"
    }

    fn rank(&self) -> usize {
        self.forward.len()
    }

    fn apply_letter(&self, l: Letter, x: &XPoint) -> Result<XPoint> {
        Ok(XPoint::Index(self.image(l, self.index(x)?)))
    }

    fn rn_letter(&self, l: Letter, x: &XPoint) -> Result<Scalar> {
        let i = self.index(x)?;
        Ok(Scalar::Exact(&self.weights[self.image(l, i)] / &self.weights[i]))
    }

    fn tolerance(&self) -> f64 {
        0.0
    }

    /// Uniform reference law; the density weight is `n·λ(x)`.
    fn sample_point(&self, seed: u64) -> Result<(XPoint, f64)> {
        use num_traits::ToPrimitive;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let i = rng.random_range(0..self.len());
        let w = self.weights[i].to_f64().unwrap_or(f64::NAN) * self.len() as f64;
        Ok((XPoint::Index(i), w))
    }
}
