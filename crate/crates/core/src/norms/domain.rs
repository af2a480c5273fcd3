use serde::Serialize;

use crate::corpus::{Point, TestFunction};
use crate::error::{Error, Result};

/// Integration domain for numerical norms.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ConcreteDomain {
    Whole { dim: u32 },
    Box { dim: u32, lo: Point, hi: Point },
    Ball { dim: u32, center: Point, radius: f64 },
}

impl ConcreteDomain {
    pub fn whole(dim: u32) -> Self {
        ConcreteDomain::Whole { dim }
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::boxed(1, [a, 0.0], [b, 0.0])
    }

    pub fn boxed(dim: u32, lo: Point, hi: Point) -> Result<Self> {
        for k in 0..dim as usize {
            if !(hi[k] > lo[k]) {
                return Err(Error::Precondition(format!("empty box along axis {k}")));
            }
        }
        Ok(ConcreteDomain::Box { dim, lo, hi })
    }

    pub fn ball(dim: u32, center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::Precondition("ball radius must be positive".into()));
        }
        Ok(ConcreteDomain::Ball { dim, center, radius })
    }

    pub fn dim(&self) -> u32 {
        match self {
            ConcreteDomain::Whole { dim } | ConcreteDomain::Box { dim, .. } | ConcreteDomain::Ball { dim, .. } => *dim,
        }
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(self, ConcreteDomain::Whole { .. })
    }

    pub fn contains(&self, x: &Point) -> bool {
        let n = self.dim() as usize;
        match self {
            ConcreteDomain::Whole { .. } => true,
            ConcreteDomain::Box { lo, hi, .. } => (0..n).all(|k| x[k] >= lo[k] && x[k] <= hi[k]),
            ConcreteDomain::Ball { center, radius, .. } => dist(x, center, n) <= *radius,
        }
    }

    /// Whether the closed ball B_r(c) lies in the closure of the domain.
    pub fn contains_ball(&self, c: &Point, r: f64) -> bool {
        let n = self.dim() as usize;
        match self {
            ConcreteDomain::Whole { .. } => true,
            ConcreteDomain::Box { lo, hi, .. } => (0..n).all(|k| c[k] - r >= lo[k] && c[k] + r <= hi[k]),
            ConcreteDomain::Ball { center, radius, .. } => dist(c, center, n) + r <= *radius,
        }
    }

    pub fn diameter(&self) -> f64 {
        let n = self.dim() as usize;
        match self {
            ConcreteDomain::Whole { .. } => f64::INFINITY,
            ConcreteDomain::Box { lo, hi, .. } => (0..n).map(|k| (hi[k] - lo[k]).powi(2)).sum::<f64>().sqrt(),
            ConcreteDomain::Ball { radius, .. } => 2.0 * radius,
        }
    }

    /// The domain as an interval, in dimension one.
    pub(crate) fn bounds_1d(&self) -> Option<(f64, f64)> {
        match self {
            ConcreteDomain::Whole { .. } => None,
            ConcreteDomain::Box { lo, hi, .. } => Some((lo[0], hi[0])),
            ConcreteDomain::Ball { center, radius, .. } => Some((center[0] - radius, center[0] + radius)),
        }
    }
}

pub(crate) fn dist(a: &Point, b: &Point, n: usize) -> f64 {
    (0..n).map(|k| (a[k] - b[k]).powi(2)).sum::<f64>().sqrt()
}

pub(crate) fn check_dims(u: &TestFunction, dom: &ConcreteDomain) -> Result<()> {
    if u.dim != dom.dim() {
        return Err(Error::DimensionMismatch(u.dim, dom.dim()));
    }
    if u.dim > 2 {
        return Err(Error::Unsupported("numerical norms support N in {1,2}".into()));
    }
    Ok(())
}
