//! Flat-spacetime worldlines and invariant intervals. Natural units, metric
//! signature (-, +, ..., +); motion is confined to the first spatial axis.

use crate::error::{Error, Result};
use crate::real::Real;

/// A timelike worldline parametrized by proper time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Worldline<R> {
    /// Constant-velocity line through `(0, x0)` with speed `|v| < 1`.
    Inertial { v: R, x0: R, dim: usize },
    /// Uniform proper acceleration `a > 0` along the first axis (the
    /// standard hyperbola with apex at `(0, 1/a)`).
    UniformlyAccelerated { a: R, dim: usize },
}

/// A spacetime point: coordinate time plus `dim` spatial coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Event<R> {
    pub t: R,
    pub x: Vec<R>,
}

impl<R: Real> Worldline<R> {
    pub fn inertial(v: R, x0: R, dim: usize) -> Result<Self> {
        if v.abs() >= R::one() {
            return Err(Error::InvalidParameter {
                name: "v",
                reason: format!("|v| must be < 1 (c = 1), got {}", v.as_f64()),
            });
        }
        if dim == 0 {
            return Err(Error::InvalidParameter {
                name: "dim",
                reason: "spatial dimension must be >= 1".into(),
            });
        }
        Ok(Worldline::Inertial { v, x0, dim })
    }

    pub fn uniformly_accelerated(a: R, dim: usize) -> Result<Self> {
        if !(a > R::zero()) {
            return Err(Error::InvalidParameter {
                name: "a",
                reason: format!("proper acceleration must be positive, got {}", a.as_f64()),
            });
        }
        if dim == 0 {
            return Err(Error::InvalidParameter {
                name: "dim",
                reason: "spatial dimension must be >= 1".into(),
            });
        }
        Ok(Worldline::UniformlyAccelerated { a, dim })
    }

    pub fn dim(&self) -> usize {
        match self {
            Worldline::Inertial { dim, .. } => *dim,
            Worldline::UniformlyAccelerated { dim, .. } => *dim,
        }
    }

    pub fn is_inertial(&self) -> bool {
        matches!(self, Worldline::Inertial { .. })
    }

    /// Spacetime position at proper time `tau`.
    pub fn position(&self, tau: R) -> Event<R> {
        match self {
            Worldline::Inertial { v, x0, dim } => {
                let gamma = (R::one() - *v * *v).sqrt().recip();
                let mut x = vec![R::zero(); *dim];
                x[0] = *x0 + gamma * *v * tau;
                Event { t: gamma * tau, x }
            }
            Worldline::UniformlyAccelerated { a, dim } => {
                let mut x = vec![R::zero(); *dim];
                x[0] = (*a * tau).cosh() / *a;
                Event {
                    t: (*a * tau).sinh() / *a,
                    x,
                }
            }
        }
    }
}

/// Signed invariant interval between two timelike- or null-separated events:
/// `sqrt((t1-t2)^2 - |x1-x2|^2) * sign(t1-t2)`.
pub fn interval<R: Real>(e1: &Event<R>, e2: &Event<R>) -> Result<R> {
    assert_eq!(e1.x.len(), e2.x.len(), "events of different dimension");
    let dt = e1.t - e2.t;
    let mut r2 = R::zero();
    for (a, b) in e1.x.iter().zip(&e2.x) {
        let d = *a - *b;
        r2 += d * d;
    }
    let q = dt * dt - r2;
    if q < R::zero() {
        return Err(Error::Domain(format!(
            "spacelike separated events: (t1-t2)^2 - |x1-x2|^2 = {}",
            q.as_f64()
        )));
    }
    let sign = if dt > R::zero() {
        R::one()
    } else if dt < R::zero() {
        -R::one()
    } else {
        R::zero()
    };
    Ok(q.sqrt() * sign)
}
