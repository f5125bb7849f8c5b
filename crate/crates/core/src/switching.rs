//! Switching profiles: unit-area tooth shapes, their width-parametrized
//! pulses, and combs of evenly spaced pulses.

use crate::error::{Error, Result, Warning};
use crate::quad::{integrate_1d, GaussLegendre, QuadConfig};
use crate::real::Real;
use crate::special::gaussian_tail_halfwidth;
use num_complex::Complex;

/// Mass level at which adjacent comb teeth are reported as overlapping.
const OVERLAP_REPORT_LEVEL: f64 = 1e-6;

/// Normalized, symmetric, non-negative pulse profile of unit width.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ToothShape {
    /// `phi(u) = exp(-u^2/2) / sqrt(2 pi)`; analytic, unbounded support.
    Gaussian,
    /// `phi(u) = C exp(-1/(1-u^2))` on `(-1, 1)`, zero outside; infinitely
    /// smooth at the boundary, compact support.
    SmoothBump,
}

/// `1 / integral_{-1}^{1} exp(-1/(1-u^2)) du`
const BUMP_NORM: f64 = 2.252283621043581;

impl ToothShape {
    /// Unit-shape profile value.
    pub fn profile<R: Real>(&self, u: R) -> R {
        match self {
            ToothShape::Gaussian => {
                (-u * u * R::lit(0.5)).exp() / (R::lit(2.0) * R::PI()).sqrt()
            }
            ToothShape::SmoothBump => {
                if u.abs() < R::one() {
                    R::lit(BUMP_NORM) * (-(R::one() - u * u).recip()).exp()
                } else {
                    R::zero()
                }
            }
        }
    }

    /// Half-width of the symmetric interval outside which the unit shape
    /// carries mass below `tail_tol`. Exact support for the bump.
    pub fn tail_halfwidth<R: Real>(&self, tail_tol: R) -> R {
        match self {
            ToothShape::Gaussian => gaussian_tail_halfwidth(tail_tol),
            ToothShape::SmoothBump => R::one(),
        }
    }

    /// Fourier transform of the unit shape, `int phi(u) e^{-i k u} du`.
    /// Real and even because the shape is symmetric.
    pub fn fourier<R: Real>(&self, k: R) -> R {
        match self {
            ToothShape::Gaussian => (-k * k * R::lit(0.5)).exp(),
            ToothShape::SmoothBump => {
                let rule = GaussLegendre::new(16);
                let cfg = QuadConfig::standard().with_rel_tol(R::lit(1e-12));
                let f = |u: R| Complex::new(self.profile(u) * (k * u).cos(), R::zero());
                let max_w = if k.abs() > R::one() {
                    Some(R::PI() / (R::lit(2.0) * k.abs()))
                } else {
                    None
                };
                let edges = crate::quad::panel_edges(-R::one(), R::one(), &[R::zero()], max_w);
                integrate_1d(&f, &edges, &cfg, &rule)
                    .map(|i| i.value.re)
                    .unwrap_or(R::zero())
            }
        }
    }

    /// Verify unit area by quadrature. Used at pulse construction.
    fn check_unit_area<R: Real>(&self) -> Result<()> {
        let rule = GaussLegendre::new(16);
        let cfg = QuadConfig::standard().with_rel_tol(R::lit(1e-12));
        let w = self.tail_halfwidth(R::lit(1e-15));
        let f = |u: R| Complex::new(self.profile(u), R::zero());
        let edges = crate::quad::panel_edges(-w, w, &[R::zero()], None);
        let area = integrate_1d(&f, &edges, &cfg, &rule)?.value.re;
        if (area - R::one()).abs() > R::lit(1e-10) {
            return Err(Error::InvalidParameter {
                name: "shape",
                reason: format!("unit-area check failed: area = {}", area.as_f64()),
            });
        }
        Ok(())
    }
}

/// A single pulse: the unit shape rescaled to width `eta` and recentred,
/// `phi_eta(tau) = phi((tau - center)/eta) / eta`. Unit area for every width.
#[derive(Debug, Clone, Copy)]
pub struct NascentDelta<R> {
    pub shape: ToothShape,
    pub eta: R,
    pub center: R,
}

impl<R: Real> NascentDelta<R> {
    pub fn new(shape: ToothShape, eta: R, center: R) -> Result<Self> {
        if !(eta > R::zero()) {
            return Err(Error::InvalidParameter {
                name: "eta",
                reason: format!("width must be positive, got {}", eta.as_f64()),
            });
        }
        shape.check_unit_area::<R>()?;
        Ok(NascentDelta { shape, eta, center })
    }

    pub fn shifted(&self, by: R) -> Self {
        NascentDelta {
            shape: self.shape,
            eta: self.eta,
            center: self.center + by,
        }
    }

    /// Pulse value at proper time `tau`.
    pub fn eval(&self, tau: R) -> R {
        self.shape.profile((tau - self.center) / self.eta) / self.eta
    }

    /// Smallest symmetric interval around the center outside which the
    /// integrated pulse mass is below `tail_tol`.
    pub fn support(&self, tail_tol: R) -> Result<(R, R)> {
        if !(tail_tol > R::zero() && tail_tol < R::one()) {
            return Err(Error::InvalidParameter {
                name: "tail_tol",
                reason: format!("need 0 < tail_tol < 1, got {}", tail_tol.as_f64()),
            });
        }
        let w = self.shape.tail_halfwidth(tail_tol) * self.eta;
        Ok((self.center - w, self.center + w))
    }
}

/// Evenly spaced train of identical pulses: tooth `l` sits at
/// `tau0 + l * zeta` for `l = 0..teeth-1`.
#[derive(Debug, Clone)]
pub struct Comb<R> {
    tooth: NascentDelta<R>,
    pub tau0: R,
    pub zeta: R,
    pub teeth: usize,
}

impl<R: Real> Comb<R> {
    pub fn new(shape: ToothShape, eta: R, tau0: R, zeta: R, teeth: usize) -> Result<Self> {
        if !(zeta > R::zero()) {
            return Err(Error::InvalidParameter {
                name: "zeta",
                reason: format!("lapse must be positive, got {}", zeta.as_f64()),
            });
        }
        if teeth == 0 {
            return Err(Error::InvalidParameter {
                name: "teeth",
                reason: "need at least one tooth".into(),
            });
        }
        let tooth = NascentDelta::new(shape, eta, tau0)?;
        Ok(Comb {
            tooth,
            tau0,
            zeta,
            teeth,
        })
    }

    /// The `l`-th tooth as a standalone pulse.
    pub fn tooth(&self, l: usize) -> NascentDelta<R> {
        debug_assert!(l < self.teeth);
        self.tooth.shifted(self.zeta * R::from_usize(l).unwrap())
    }

    pub fn shape(&self) -> ToothShape {
        self.tooth.shape
    }

    pub fn eta(&self) -> R {
        self.tooth.eta
    }

    /// Same comb with a different tooth width.
    pub fn with_eta(&self, eta: R) -> Result<Self> {
        Comb::new(self.shape(), eta, self.tau0, self.zeta, self.teeth)
    }

    /// Full switching value: sum of all teeth at `tau`.
    pub fn eval(&self, tau: R) -> R {
        (0..self.teeth).map(|l| self.tooth(l).eval(tau)).sum()
    }

    /// Mass two adjacent teeth share (the tooth mass beyond half a lapse
    /// from its center, doubled for both tails meeting).
    pub fn adjacent_overlap_mass(&self) -> R {
        if self.teeth < 2 {
            return R::zero();
        }
        let half_gap_units = self.zeta / (R::lit(2.0) * self.eta());
        match self.shape() {
            ToothShape::Gaussian => {
                crate::special::erfc(half_gap_units / R::lit(2.0).sqrt())
            }
            ToothShape::SmoothBump => {
                if half_gap_units >= R::one() {
                    R::zero()
                } else {
                    // integrated bump mass beyond half_gap_units
                    let rule = GaussLegendre::new(16);
                    let cfg = QuadConfig::standard();
                    let f = |u: R| Complex::new(self.shape().profile(u), R::zero());
                    let edges =
                        crate::quad::panel_edges(half_gap_units, R::one(), &[], None);
                    integrate_1d(&f, &edges, &cfg, &rule)
                        .map(|i| i.value.re * R::lit(2.0))
                        .unwrap_or(R::zero())
                }
            }
        }
    }

    /// Overlap warning, when adjacent teeth share more mass than the
    /// reporting level.
    pub fn overlap_warning(&self) -> Option<Warning> {
        let mass = self.adjacent_overlap_mass();
        if mass > R::lit(OVERLAP_REPORT_LEVEL) {
            log::warn!(
                "comb teeth overlap: adjacent teeth share mass {:.3e}",
                mass.as_f64()
            );
            Some(Warning::TeethOverlap {
                overlap_mass: mass.as_f64(),
            })
        } else {
            None
        }
    }
}

/// Anything usable as a switching function in the response functionals.
pub trait Switching<R: Real>: Sync {
    fn eval(&self, tau: R) -> R;
    /// Truncation window containing all but `tail_tol` of the mass.
    fn window(&self, tail_tol: R) -> (R, R);
    /// Interior panel boundaries worth respecting (tooth edges).
    fn interior_splits(&self, tail_tol: R) -> Vec<R>;
    /// Decomposition into pulses, for transform-side evaluation.
    fn pulses(&self) -> Vec<NascentDelta<R>>;
}

impl<R: Real> Switching<R> for NascentDelta<R> {
    fn eval(&self, tau: R) -> R {
        NascentDelta::eval(self, tau)
    }

    fn window(&self, tail_tol: R) -> (R, R) {
        self.support(tail_tol).expect("valid tail_tol")
    }

    fn interior_splits(&self, _tail_tol: R) -> Vec<R> {
        vec![self.center]
    }

    fn pulses(&self) -> Vec<NascentDelta<R>> {
        vec![*self]
    }
}

impl<R: Real> Switching<R> for Comb<R> {
    fn eval(&self, tau: R) -> R {
        Comb::eval(self, tau)
    }

    fn window(&self, tail_tol: R) -> (R, R) {
        let (lo, _) = self.tooth(0).support(tail_tol).expect("valid tail_tol");
        let (_, hi) = self
            .tooth(self.teeth - 1)
            .support(tail_tol)
            .expect("valid tail_tol");
        (lo, hi)
    }

    fn interior_splits(&self, tail_tol: R) -> Vec<R> {
        let mut splits = Vec::with_capacity(3 * self.teeth);
        for l in 0..self.teeth {
            let t = self.tooth(l);
            let (lo, hi) = t.support(tail_tol).expect("valid tail_tol");
            splits.push(lo);
            splits.push(t.center);
            splits.push(hi);
        }
        splits
    }

    fn pulses(&self) -> Vec<NascentDelta<R>> {
        (0..self.teeth).map(|l| self.tooth(l)).collect()
    }
}
