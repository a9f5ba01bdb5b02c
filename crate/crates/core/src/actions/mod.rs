//! Non-singular actions of the free group usable as skew-product fibers.

mod boundary_pair;
mod finite;
mod sanov;
mod so3;
mod trivial;

pub use boundary_pair::BoundaryPairAction;
pub use finite::FiniteAction;
pub use sanov::{DyadicPoint, SanovPlane};
pub use so3::So3Sphere;
pub use trivial::TrivialAction;

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::boundary::BoundaryPrefix;
use crate::error::{Error, Result};
use crate::free_group::{Letter, ReducedWord};
use crate::relation_engine::Scalar;

/// A point of an action's space `X`.
///
/// Sphere coordinates compare bitwise, which is what exact set comparisons of
/// skew-product members need.
#[derive(Debug, Clone)]
pub enum XPoint {
    Unit,
    Index(usize),
    Sphere([f64; 3]),
    Plane(DyadicPoint),
    Boundary(BoundaryPrefix),
}

impl PartialEq for XPoint {
    fn eq(&self, other: &Self) -> bool {
        use XPoint::*;
        match (self, other) {
            (Unit, Unit) => true,
            (Index(a), Index(b)) => a == b,
            (Sphere(a), Sphere(b)) => a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits()),
            (Plane(a), Plane(b)) => a == b,
            (Boundary(a), Boundary(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for XPoint {}

impl Hash for XPoint {
    fn hash<H: Hasher>(&self, state: &mut H) {
        std::mem::discriminant(self).hash(state);
        match self {
            XPoint::Unit => {}
            XPoint::Index(i) => i.hash(state),
            XPoint::Sphere(c) => c.iter().for_each(|x| x.to_bits().hash(state)),
            XPoint::Plane(p) => p.hash(state),
            XPoint::Boundary(p) => p.hash(state),
        }
    }
}

impl fmt::Display for XPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            XPoint::Unit => f.write_str("*"),
            XPoint::Index(i) => write!(f, "{i}"),
            XPoint::Sphere([x, y, z]) => write!(f, "({x:.6},{y:.6},{z:.6})"),
            XPoint::Plane(p) => {
                let [x, y] = p.to_f64();
                write!(f, "({x:.6},{y:.6})")
            }
            XPoint::Boundary(p) => write!(f, "{p}"),
        }
    }
}

/// `𝔽 ↷ (X, λ)` with Radon–Nikodym weights `rn(g, x) = dλ∘T^g/dλ(x)`.
///
/// Implementors supply generator maps; words are evaluated right to left and
/// weights accumulate through the cocycle rule.
pub trait NonSingularAction: Send + Sync + fmt::Debug {
    fn id(&self) -> &str;

    fn rank(&self) -> usize;

    fn apply_letter(&self, l: Letter, x: &XPoint) -> Result<XPoint>;

    fn rn_letter(&self, l: Letter, x: &XPoint) -> Result<Scalar>;

    /// Numeric tolerance of `apply` and `rn`; zero for exact instances.
    fn tolerance(&self) -> f64;

    /// A draw from the reference law and its density weight with respect to `λ`.
    fn sample_point(&self, seed: u64) -> Result<(XPoint, f64)>;

    fn is_exact(&self) -> bool {
        self.tolerance() == 0.0
    }

    fn apply_word(&self, g: &ReducedWord, x: &XPoint) -> Result<XPoint> {
        self.check_rank(g)?;
        let mut y = x.clone();
        for &l in g.letters().iter().rev() {
            y = self.apply_letter(l, &y)?;
        }
        Ok(y)
    }

    fn rn(&self, g: &ReducedWord, x: &XPoint) -> Result<Scalar> {
        self.check_rank(g)?;
        let mut y = x.clone();
        let mut w = Scalar::one();
        for &l in g.letters().iter().rev() {
            w = &w * &self.rn_letter(l, &y)?;
            y = self.apply_letter(l, &y)?;
        }
        Ok(w)
    }

    fn check_rank(&self, g: &ReducedWord) -> Result<()> {
        if g.rank() != self.rank() {
            return Err(Error::RankMismatch {
                left: self.rank(),
                right: g.rank(),
            });
        }
        Ok(())
    }
}

pub type SharedAction = Arc<dyn NonSingularAction>;

/// Registered identifiers; `finite_model` takes a spec path as `finite_model:PATH`.
pub const REGISTERED: [&str; 5] = ["trivial", "finite_model", "so3_sphere", "sanov_plane", "boundary_pair"];

/// Looks up an action by identifier for a group of the given rank.
pub fn registry_get(name: &str, rank: usize) -> Result<SharedAction> {
    let (head, arg) = match name.split_once(':') {
        Some((h, a)) => (h.trim(), Some(a.trim())),
        None => (name.trim(), None),
    };
    match (head, arg) {
        ("trivial", None) => Ok(Arc::new(TrivialAction::new(rank))),
        ("so3_sphere", None) => Ok(Arc::new(So3Sphere::new(rank)?)),
        ("sanov_plane", None) => Ok(Arc::new(SanovPlane::new(rank)?)),
        ("boundary_pair", None) => Ok(Arc::new(BoundaryPairAction::new(rank))),
        ("finite_model", Some(path)) => {
            let action = FiniteAction::load(std::path::Path::new(path))?;
            if action.rank() != rank {
                return Err(Error::RankMismatch {
                    left: rank,
                    right: action.rank(),
                });
            }
            Ok(Arc::new(action))
        }
        ("finite_model", None) => Err(Error::UnknownAction(
            "finite_model needs a spec path: finite_model:PATH".into(),
        )),
        _ => Err(Error::UnknownAction(format!(
            "`{name}` (registered: {})",
            REGISTERED.join(", ")
        ))),
    }
}
