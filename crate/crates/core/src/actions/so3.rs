use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, UnitSphere};

use super::{NonSingularAction, XPoint};
use crate::error::{Error, Result};
use crate::free_group::{Letter, ReducedWord};
use crate::relation_engine::Scalar;

type Mat3 = [[i64; 3]; 3];

/// `5·R` for the rotation by `arccos(3/5)` about the x axis (`a1`) and the
/// z axis (`a2`); inverses are transposes.
const SCALED: [Mat3; 2] = [
    [[5, 0, 0], [0, 3, -4], [0, 4, 3]],
    [[3, -4, 0], [4, 3, 0], [0, 0, 5]],
];

fn transpose(m: &Mat3) -> Mat3 {
    let mut t = [[0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = m[j][i];
        }
    }
    t
}

fn scaled_letter(l: Letter) -> Mat3 {
    let m = SCALED[l.index() - 1];
    if l.is_inverse_generator() {
        transpose(&m)
    } else {
        m
    }
}

/// Two rotations of the unit sphere generating a free subgroup of SO(3),
/// with normalized area as the invariant measure.
#[derive(Debug, Clone)]
pub struct So3Sphere;

impl So3Sphere {
    pub fn new(rank: usize) -> Result<Self> {
        if rank != 2 {
            return Err(Error::InvalidArgument(format!(
                "so3_sphere is defined for rank 2, not {rank}"
            )));
        }
        Ok(So3Sphere)
    }

    /// `5^|g|` times the rotation matrix of `g`, in exact integers.
    pub fn scaled_matrix(g: &ReducedWord) -> [[i128; 3]; 3] {
        let mut acc = [[0i128; 3]; 3];
        for (i, row) in acc.iter_mut().enumerate() {
            row[i] = 1;
        }
        for &l in g.letters() {
            acc = mul3(&acc, &scaled_letter(l));
        }
        acc
    }

    /// Searches all reduced words of length `1..=max_len` for one acting as the
    /// identity, using exact integer matrices.
    pub fn find_relation(max_len: usize) -> Option<ReducedWord> {
        let mut path = Vec::new();
        let id = Self::scaled_matrix(&ReducedWord::identity(2));
        search3(&id, 1, max_len, &mut path)
    }
}

fn mul3(a: &[[i128; 3]; 3], b: &Mat3) -> [[i128; 3]; 3] {
    let mut c = [[0i128; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|k| a[i][k] * b[k][j] as i128).sum();
        }
    }
    c
}

fn search3(m: &[[i128; 3]; 3], scale: i128, left: usize, path: &mut Vec<Letter>) -> Option<ReducedWord> {
    if left == 0 {
        return None;
    }
    for l in Letter::all(2) {
        if path.last() == Some(&l.inverse()) {
            continue;
        }
        let next = mul3(m, &scaled_letter(l));
        let s = scale * 5;
        path.push(l);
        let is_id = (0..3).all(|i| (0..3).all(|j| next[i][j] == if i == j { s } else { 0 }));
        if is_id {
            return Some(ReducedWord::from_letters(2, path.clone()).expect("reduced by construction"));
        }
        if let Some(w) = search3(&next, s, left - 1, path) {
            return Some(w);
        }
        path.pop();
    }
    None
}

impl NonSingularAction for So3Sphere {
    fn id(&self) -> &str {
        "so3_sphere"
    }

    fn rank(&self) -> usize {
        2
    }

    fn apply_letter(&self, l: Letter, x: &XPoint) -> Result<XPoint> {
        let XPoint::Sphere(p) = x else {
            return Err(Error::Domain(format!("{x} is not a sphere point")));
        };
        let m = scaled_letter(l);
        let mut y = [0.0; 3];
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = (0..3).map(|k| m[i][k] as f64 * p[k]).sum::<f64>() / 5.0;
        }
        Ok(XPoint::Sphere(y))
    }

    fn rn_letter(&self, _: Letter, x: &XPoint) -> Result<Scalar> {
        match x {
            XPoint::Sphere(_) => Ok(Scalar::one()),
            _ => Err(Error::Domain(format!("{x} is not a sphere point"))),
        }
    }

    fn tolerance(&self) -> f64 {
        1e-12
    }

    fn sample_point(&self, seed: u64) -> Result<(XPoint, f64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p: [f64; 3] = UnitSphere.sample(&mut rng);
        Ok((XPoint::Sphere(p), 1.0))
    }
}
