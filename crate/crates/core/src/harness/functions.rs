use num_rational::BigRational;
use num_traits::Zero;

use super::config::{FunctionSpec, XFunction};
use crate::actions::XPoint;
use crate::boundary::{cylinder_measure, BoundaryPrefix, Cylinder};
use crate::error::{Error, Result};
use crate::free_group::for_each_nonbacktracking;
use crate::relation_engine::Scalar;

fn exact(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::Config(format!("non-finite value {x}")))
}

/// A configured test function evaluated on skew-product points. Boundary
/// factors and indicator fibers stay exact; the radial bump is a double.
#[derive(Debug, Clone)]
pub struct PointFunction {
    spec: FunctionSpec,
    cylinders: Vec<(Vec<crate::free_group::Letter>, BigRational)>,
    default: BigRational,
    depth: usize,
}

impl PointFunction {
    pub fn new(spec: &FunctionSpec) -> Result<Self> {
        let mut cylinders = spec
            .cylinders
            .iter()
            .map(|(c, v)| Ok((c.clone(), exact(*v)?)))
            .collect::<Result<Vec<_>>>()?;
        // longest match first
        cylinders.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.0.cmp(&b.0)));
        Ok(PointFunction {
            spec: spec.clone(),
            default: exact(spec.default)?,
            depth: spec.depth(),
            cylinders,
        })
    }

    pub fn boundary_factor(&self, xi: &BoundaryPrefix) -> BigRational {
        let prefix = xi.prefix(self.depth);
        self.cylinders
            .iter()
            .find(|(c, _)| prefix[..c.len()] == c[..])
            .map_or_else(|| self.default.clone(), |(_, v)| v.clone())
    }

    pub fn fiber_factor(&self, x: &XPoint) -> Result<Scalar> {
        match (&self.spec.x, x) {
            (XFunction::Const(c), _) => Ok(Scalar::Exact(exact(*c)?)),
            (XFunction::Cap { axis, height }, XPoint::Sphere(p)) => {
                let dot: f64 = (0..3).map(|i| axis[i] * p[i]).sum();
                Ok(if dot >= *height { Scalar::one() } else { Scalar::zero() })
            }
            (XFunction::Bump { radius }, XPoint::Plane(p)) => {
                let [a, b] = p.to_f64();
                Ok(Scalar::Real((1.0 - (a * a + b * b) / (radius * radius)).max(0.0)))
            }
            (f, x) => Err(Error::Domain(format!("fiber function {f:?} undefined at {x}"))),
        }
    }

    pub fn eval(&self, p: &(BoundaryPrefix, XPoint)) -> Result<Scalar> {
        let b = self.boundary_factor(&p.0);
        if b.is_zero() {
            return Ok(Scalar::zero());
        }
        Ok(&Scalar::Exact(b) * &self.fiber_factor(&p.1)?)
    }
}

/// `∫ c dν` for the boundary factor, exact.
pub fn boundary_integral(spec: &FunctionSpec, rank: usize) -> Result<BigRational> {
    let f = PointFunction::new(spec)?;
    let depth = spec.depth();
    if depth == 0 {
        return Ok(f.default);
    }
    let mut total = BigRational::zero();
    let mut failure = None;
    for_each_nonbacktracking(rank, depth, None, |w| {
        let value = f
            .cylinders
            .iter()
            .find(|(c, _)| w[..c.len()] == c[..])
            .map_or(&f.default, |(_, v)| v);
        match Cylinder::new(rank, w.to_vec()) {
            Ok(c) => total += value * cylinder_measure(&c),
            Err(e) => failure = Some(e),
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(total),
    }
}

/// `∫ h dλ` for a fiber factor when `λ` is a probability measure whose value
/// is known in closed form: constants anywhere, caps on the sphere (area
/// fraction `(1 − h)/2`).
pub fn fiber_integral(x: &XFunction, action: &str) -> Option<f64> {
    match (x, action) {
        (XFunction::Const(c), "trivial" | "so3_sphere" | "boundary_pair") => Some(*c),
        (XFunction::Cap { height, .. }, "so3_sphere") => Some((1.0 - height) / 2.0),
        _ => None,
    }
}
