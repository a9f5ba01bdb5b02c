use super::{NonSingularAction, XPoint};
use crate::error::Result;
use crate::free_group::Letter;
use crate::relation_engine::Scalar;

/// The one-point space.
#[derive(Debug, Clone)]
pub struct TrivialAction {
    rank: usize,
}

impl TrivialAction {
    pub fn new(rank: usize) -> Self {
        TrivialAction { rank }
    }
}

impl NonSingularAction for TrivialAction {
    fn id(&self) -> &str {
        "trivial"
    }

    fn rank(&self) -> usize {
        self.rank
    }

    fn apply_letter(&self, _: Letter, _: &XPoint) -> Result<XPoint> {
        Ok(XPoint::Unit)
    }

    fn rn_letter(&self, _: Letter, _: &XPoint) -> Result<Scalar> {
        Ok(Scalar::one())
    }

    fn tolerance(&self) -> f64 {
        0.0
    }

    fn sample_point(&self, _: u64) -> Result<(XPoint, f64)> {
        Ok((XPoint::Unit, 1.0))
    }
}
