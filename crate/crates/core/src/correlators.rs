//! Stationary two-point correlators pulled back along detector worldlines:
//! closed forms, spectral (mode-integral) evaluation, toy single-mode
//! kernels, and the Fourier-side quantities built on them.
//!
//! Every kernel is regulated by shifting the lapse into the lower complex
//! half plane, `s -> s - i eps`; regulator-free values are quoted by
//! Richardson extrapolation in the regulator.

use crate::error::{Error, Result};
use crate::extrapolate::richardson_eps;
use crate::quad::{integrate_1d, panel_edges, GaussLegendre, QuadConfig};
use crate::real::{imag_unit, Cplx, Real};
use crate::special::trigamma;
use crate::trajectories::Worldline;
use num_complex::Complex;
use std::fmt;
use std::sync::Arc;

/// Default number of explicitly summed thermal images on each side; the
/// remainder of the image sum is restored by a trigamma tail, so the kernel
/// is exact to rounding at any cut.
pub const DEFAULT_THERMAL_IMAGES: usize = 64;

/// State of the field entering a correlator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldState<R> {
    Vacuum,
    Thermal { beta: R },
    SingleMode { omega: R, occupation: R },
}

/// Everything needed to pick a correlator: field, state, worldline,
/// regulator.
#[derive(Debug, Clone)]
pub struct CorrelatorSpec<R> {
    pub mass: R,
    pub dim: usize,
    pub state: FieldState<R>,
    pub trajectory: Worldline<R>,
    pub epsilon: R,
}

impl<R: Real> CorrelatorSpec<R> {
    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.dim) {
            return Err(Error::InvalidParameter {
                name: "dim",
                reason: format!("spatial dimension must be 1, 2, or 3, got {}", self.dim),
            });
        }
        if self.mass < R::zero() {
            return Err(Error::InvalidParameter {
                name: "mass",
                reason: "field mass must be non-negative".into(),
            });
        }
        if self.dim == 1 && self.mass == R::zero() {
            return Err(Error::InfraredDivergence);
        }
        if !(self.epsilon > R::zero()) {
            return Err(Error::InvalidParameter {
                name: "epsilon",
                reason: format!("regulator must be positive, got {}", self.epsilon.as_f64()),
            });
        }
        match self.state {
            FieldState::Thermal { beta } if !(beta > R::zero()) => {
                return Err(Error::InvalidParameter {
                    name: "beta",
                    reason: "inverse temperature must be positive".into(),
                })
            }
            FieldState::SingleMode { omega, occupation } => {
                if !(omega > R::zero()) {
                    return Err(Error::InvalidParameter {
                        name: "omega",
                        reason: "mode frequency must be positive".into(),
                    });
                }
                if occupation < R::zero() {
                    return Err(Error::InvalidParameter {
                        name: "n",
                        reason: "occupation must be non-negative".into(),
                    });
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// Large-lapse behavior of a kernel; drives window selection for the
/// Fourier-side integrals.
#[derive(Debug, Clone, Copy)]
pub enum Decay<R> {
    Exponential { rate: R },
    PowerLaw { amplitude: R, power: i32 },
    None,
}

type CustomEval<R> = Arc<dyn Fn(R, R) -> Result<Cplx<R>> + Send + Sync>;

#[derive(Clone)]
enum Kernel<R> {
    /// `-1/(4 pi^2 (s - i eps)^2)` — massless field in three spatial
    /// dimensions along any inertial line.
    InertialVacuum,
    /// `-a^2 / (16 pi^2 sinh^2(a (s - i eps)/2))`.
    AcceleratedVacuum { accel: R },
    /// Image sum `-(1/4pi^2) sum_n (s - i eps + i n beta)^{-2}`, with the
    /// images beyond `+-cut` restored exactly by a trigamma tail.
    InertialThermal { beta: R, cut: usize },
    /// `(n+1) e^{-i omega s} + n e^{i omega s}`; bounded, needs no regulator.
    SingleMode { omega: R, occupation: R },
    /// Spectral integral over the density of states (see
    /// [`spectral_weight`]); evaluated on the ray where the regulator damps
    /// monotonically, which is an exact contour rotation for these
    /// densities.
    ModeIntegral {
        dim: usize,
        mass: R,
        rule: GaussLegendre<R>,
    },
    /// `W(s) = c` for every lapse; test kernel.
    Constant { value: R },
    /// Caller-supplied evaluator `(s, eps) -> W`.
    Custom { eval: CustomEval<R> },
}

impl<R: fmt::Debug> fmt::Debug for Kernel<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kernel::InertialVacuum => write!(f, "InertialVacuum"),
            Kernel::AcceleratedVacuum { accel } => {
                write!(f, "AcceleratedVacuum {{ accel: {accel:?} }}")
            }
            Kernel::InertialThermal { beta, cut } => {
                write!(f, "InertialThermal {{ beta: {beta:?}, cut: {cut} }}")
            }
            Kernel::SingleMode { omega, occupation } => {
                write!(f, "SingleMode {{ omega: {omega:?}, n: {occupation:?} }}")
            }
            Kernel::ModeIntegral { dim, mass, .. } => {
                write!(f, "ModeIntegral {{ dim: {dim}, mass: {mass:?} }}")
            }
            Kernel::Constant { value } => write!(f, "Constant {{ value: {value:?} }}"),
            Kernel::Custom { .. } => write!(f, "Custom"),
        }
    }
}

/// A correlator of the lapse `s = tau - tau'` with its regulator and the
/// spec it came from.
#[derive(Debug, Clone)]
pub struct StationaryCorrelator<R> {
    kernel: Kernel<R>,
    pub stationary: bool,
    pub epsilon: R,
    pub spec: Option<CorrelatorSpec<R>>,
}

/// Closed-form pullbacks for the massless three-dimensional field:
/// inertial vacuum, uniformly accelerated vacuum, inertial thermal.
pub fn closed_form_pullback<R: Real>(spec: &CorrelatorSpec<R>) -> Result<StationaryCorrelator<R>> {
    const SUPPORTED: &str =
        "m=0, d=3, state in {vacuum, thermal} on inertial or uniformly accelerated lines \
         (single-mode states come from single_mode_correlator)";
    spec.validate()?;
    if spec.mass != R::zero() || spec.dim != 3 {
        return Err(Error::Unsupported {
            requested: format!("closed form with m={}, d={}", spec.mass.as_f64(), spec.dim),
            supported: SUPPORTED,
        });
    }
    let kernel = match (spec.state, spec.trajectory) {
        (FieldState::Vacuum, Worldline::Inertial { .. }) => Kernel::InertialVacuum,
        (FieldState::Vacuum, Worldline::UniformlyAccelerated { a, .. }) => {
            Kernel::AcceleratedVacuum { accel: a }
        }
        (FieldState::Thermal { beta }, Worldline::Inertial { .. }) => Kernel::InertialThermal {
            beta,
            cut: DEFAULT_THERMAL_IMAGES,
        },
        (state, trajectory) => {
            return Err(Error::Unsupported {
                requested: format!("state {state:?} on {trajectory:?}"),
                supported: SUPPORTED,
            })
        }
    };
    Ok(StationaryCorrelator {
        kernel,
        stationary: true,
        epsilon: spec.epsilon,
        spec: Some(spec.clone()),
    })
}

/// Spectral-route correlator along an inertial line, for any of the
/// supported dimensions and masses.
///
/// Uses the density-of-states normalization of [`spectral_weight`]; for
/// `d = 3, m = 0` this is `2^-d` times [`closed_form_pullback`]'s inertial
/// vacuum (the two conventions differ by the solid-angle factor; see the
/// cross-checks in the tests).
pub fn mode_integral_correlator<R: Real>(
    spec: &CorrelatorSpec<R>,
) -> Result<StationaryCorrelator<R>> {
    spec.validate()?;
    if !spec.trajectory.is_inertial() {
        return Err(Error::Unsupported {
            requested: format!("mode integral on {:?}", spec.trajectory),
            supported: "inertial trajectories (the pullback lapse equals the proper lapse)",
        });
    }
    if !matches!(spec.state, FieldState::Vacuum) {
        return Err(Error::Unsupported {
            requested: format!("mode integral in state {:?}", spec.state),
            supported: "vacuum state",
        });
    }
    Ok(StationaryCorrelator {
        kernel: Kernel::ModeIntegral {
            dim: spec.dim,
            mass: spec.mass,
            rule: GaussLegendre::new(16),
        },
        stationary: true,
        epsilon: spec.epsilon,
        spec: Some(spec.clone()),
    })
}

/// Bounded toy correlator of one field mode with `occupation` quanta:
/// `W(s) = (n+1) e^{-i omega s} + n e^{i omega s}`.
pub fn single_mode_correlator<R: Real>(omega: R, occupation: R) -> Result<StationaryCorrelator<R>> {
    if !(omega > R::zero()) {
        return Err(Error::InvalidParameter {
            name: "omega",
            reason: "mode frequency must be positive".into(),
        });
    }
    if occupation < R::zero() {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: "occupation must be non-negative".into(),
        });
    }
    Ok(StationaryCorrelator {
        kernel: Kernel::SingleMode { omega, occupation },
        stationary: true,
        epsilon: R::zero(),
        spec: None,
    })
}

/// `W(s) = c` for all lapses; handy in tests and calibration.
pub fn constant_correlator<R: Real>(value: R) -> StationaryCorrelator<R> {
    StationaryCorrelator {
        kernel: Kernel::Constant { value },
        stationary: true,
        epsilon: R::zero(),
        spec: None,
    }
}

/// Wrap a caller-supplied evaluator `(s, eps) -> W(s)`.
pub fn custom_correlator<R: Real, F>(
    eval: F,
    stationary: bool,
    epsilon: R,
) -> StationaryCorrelator<R>
where
    F: Fn(R, R) -> Result<Cplx<R>> + Send + Sync + 'static,
{
    StationaryCorrelator {
        kernel: Kernel::Custom {
            eval: Arc::new(eval),
        },
        stationary,
        epsilon,
        spec: None,
    }
}

impl<R: Real> StationaryCorrelator<R> {
    /// Kernel value at lapse `s`, using the correlator's own regulator.
    pub fn eval(&self, s: R) -> Result<Cplx<R>> {
        self.eval_at_eps(s, self.epsilon)
    }

    /// Kernel value at lapse `s` with an explicit regulator.
    pub fn eval_at_eps(&self, s: R, eps: R) -> Result<Cplx<R>> {
        let z = Complex::new(s, -eps);
        let four_pi2 = R::lit(4.0) * R::PI() * R::PI();
        let value = match &self.kernel {
            Kernel::InertialVacuum => -(z * z * four_pi2).inv(),
            Kernel::AcceleratedVacuum { accel } => {
                let a = *accel;
                let sh = (z * (a * R::lit(0.5))).sinh();
                let denom = sh * sh * (four_pi2 * R::lit(4.0) / (a * a));
                if denom.re.is_finite() && denom.im.is_finite() {
                    -denom.inv()
                } else {
                    // sinh overflow far outside the decay window
                    Complex::new(R::zero(), R::zero())
                }
            }
            Kernel::InertialThermal { beta, cut } => thermal_image_sum(z, *beta, *cut),
            Kernel::SingleMode { omega, occupation } => {
                let n = *occupation;
                let phase = imag_unit::<R>() * (-*omega * s);
                phase.exp() * (n + R::one()) + (-phase).exp() * n
            }
            Kernel::ModeIntegral { dim, mass, rule } => {
                mode_integral_rotated(*dim, *mass, eps, rule, s)?
            }
            Kernel::Constant { value } => Complex::new(*value, R::zero()),
            Kernel::Custom { eval } => eval(s, eps)?,
        };
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::Domain(format!(
                "correlator not finite at lapse {}",
                s.as_f64()
            )));
        }
        Ok(value)
    }

    /// Regulator-free value at lapse `s`: evaluated at regulators
    /// `{1e-2, 5e-3, 2.5e-3}` times the lapse and Richardson-extrapolated.
    pub fn eval_extrapolated(&self, s: R) -> Result<Cplx<R>> {
        let t_char = s.abs().max(R::lit(1e-6));
        let eps0 = R::lit(1e-2) * t_char;
        let mut failure = None;
        let value = richardson_eps(
            |e| match self.eval_at_eps(s, e) {
                Ok(v) => v,
                Err(err) => {
                    failure = Some(err);
                    Complex::new(R::nan(), R::nan())
                }
            },
            eps0,
        );
        match failure {
            Some(err) => Err(err),
            None => Ok(value),
        }
    }

    /// Large-lapse behavior, for Fourier window selection.
    pub fn decay(&self) -> Decay<R> {
        let four_pi2 = R::lit(4.0) * R::PI() * R::PI();
        match &self.kernel {
            Kernel::InertialVacuum => Decay::PowerLaw {
                amplitude: four_pi2.recip(),
                power: 2,
            },
            Kernel::AcceleratedVacuum { accel } => Decay::Exponential { rate: *accel },
            Kernel::InertialThermal { beta, .. } => Decay::Exponential {
                rate: R::lit(2.0) * R::PI() / *beta,
            },
            Kernel::ModeIntegral { dim, mass, .. } => {
                if *mass > R::zero() {
                    Decay::Exponential { rate: *mass }
                } else {
                    Decay::PowerLaw {
                        amplitude: spectral_power_amplitude::<R>(*dim),
                        power: (*dim as i32) - 1,
                    }
                }
            }
            Kernel::SingleMode { .. } | Kernel::Constant { .. } | Kernel::Custom { .. } => {
                Decay::None
            }
        }
    }

    /// An a-priori bound on `|W|`, when the kernel has one.
    pub fn bound(&self) -> Option<R> {
        match &self.kernel {
            Kernel::SingleMode { occupation, .. } => {
                Some(R::lit(2.0) * *occupation + R::one())
            }
            Kernel::Constant { value } => Some(value.abs()),
            _ => None,
        }
    }

    /// Spectral parameters when this is a mode-integral kernel.
    pub(crate) fn as_mode_integral(&self) -> Option<(usize, R)> {
        match &self.kernel {
            Kernel::ModeIntegral { dim, mass, .. } => Some((*dim, *mass)),
            _ => None,
        }
    }

    /// Width of the regulated coincidence structure, when the kernel has
    /// one; quadrature seeds panels on this scale around zero lapse.
    pub fn short_range_scale(&self) -> Option<R> {
        match &self.kernel {
            Kernel::SingleMode { .. } | Kernel::Constant { .. } => None,
            _ => Some(self.epsilon.max(R::lit(1e-12))),
        }
    }

    /// Intrinsic oscillation rate of the kernel in the lapse, used to size
    /// quadrature panels alongside the detector gap.
    pub fn osc_rate(&self) -> R {
        match &self.kernel {
            Kernel::SingleMode { omega, .. } => *omega,
            _ => R::zero(),
        }
    }
}

/// Image sum over thermal copies of the inertial vacuum kernel. The images
/// beyond the explicit cut are restored exactly through the trigamma
/// function, so the truncation level only trades explicit terms for
/// recurrence steps.
fn thermal_image_sum<R: Real>(z: Cplx<R>, beta: R, cut: usize) -> Cplx<R> {
    let i = imag_unit::<R>();
    let mut sum = Complex::new(R::zero(), R::zero());
    for n in 0..=cut {
        if n == 0 {
            sum += (z * z).inv();
        } else {
            let shift = i * (beta * R::from_usize(n).unwrap());
            let zp = z + shift;
            let zm = z - shift;
            sum += (zp * zp).inv() + (zm * zm).inv();
        }
    }
    let kp1 = R::from_usize(cut + 1).unwrap();
    let arg_m = Complex::new(kp1, R::zero()) - i * z / beta;
    let arg_p = Complex::new(kp1, R::zero()) + i * z / beta;
    sum -= (trigamma(arg_m) + trigamma(arg_p)) / (beta * beta);
    -sum / (R::lit(4.0) * R::PI() * R::PI())
}

/// Spectral weight `g_d(omega)`: the density of states per mode volume over
/// twice the mode energy, so that `W(s) = int_m^inf g_d(w) e^{-i w (s-i
/// eps)} dw` on inertial lines.
pub(crate) fn spectral_weight<R: Real>(dim: usize, mass: R, omega: R) -> R {
    debug_assert!((1..=3).contains(&dim));
    if omega < mass {
        return R::zero();
    }
    let pi = R::PI();
    match dim {
        1 => ((omega * omega - mass * mass).sqrt() * R::lit(4.0) * pi).recip(),
        2 => (R::lit(16.0) * pi).recip(),
        _ => (omega * omega - mass * mass).sqrt() / (R::lit(32.0) * pi * pi),
    }
}

fn spectral_power_amplitude<R: Real>(dim: usize) -> R {
    let pi = R::PI();
    match dim {
        2 => (R::lit(16.0) * pi).recip(),
        _ => (R::lit(32.0) * pi * pi).recip(),
    }
}

/// Rotated-contour evaluation of the spectral integral
/// `int_m^inf g_d(w) e^{-i w z} dw`, `z = s - i eps`.
///
/// The contour is turned from the real axis onto the ray where the phase
/// decays as `e^{-|z| t}`; the densities are analytic between the two
/// contours and vanish on the closing arc, so the value is unchanged while
/// the integrand stops oscillating. The substitution `t = u^2` removes the
/// square-root endpoint behavior of the odd dimensions.
fn mode_integral_rotated<R: Real>(
    dim: usize,
    mass: R,
    eps: R,
    rule: &GaussLegendre<R>,
    s: R,
) -> Result<Cplx<R>> {
    let flip = s < R::zero();
    let sa = s.abs();
    let z = Complex::new(sa, -eps);
    let zn = z.norm();
    let i = imag_unit::<R>();
    let dir = -i * z.conj() / zn;
    let sqrt_dir = dir.sqrt();
    let pi = R::PI();
    let coef = match dim {
        1 => (R::lit(4.0) * pi).recip(),
        2 => (R::lit(16.0) * pi).recip(),
        _ => (R::lit(32.0) * pi * pi).recip(),
    };
    let two_m = Complex::new(R::lit(2.0) * mass, R::zero());
    // integrand in u, after omega = m + u^2 * dir
    let f = |u: R| -> Cplx<R> {
        let u2dir = dir * (u * u);
        let damp = (-zn * u * u).exp();
        let shape = match dim {
            1 => (sqrt_dir * u * (u2dir + two_m).sqrt()).inv() * (u + u),
            2 => Complex::new(u + u, R::zero()),
            _ => sqrt_dir * u * (u2dir + two_m).sqrt() * (u + u),
        };
        shape * damp
    };
    let u_max = (R::lit(37.0) / zn).sqrt();
    let edges = panel_edges(R::zero(), u_max, &[], Some(u_max / R::lit(12.0)));
    let cfg = QuadConfig::standard().with_rel_tol(R::lit(1e-11));
    let integral = integrate_1d(&f, &edges, &cfg, rule)?;
    let mz = Complex::new(mass, R::zero()) * z;
    let value = integral.value * dir * (-(i * mz)).exp() * coef;
    Ok(if flip { value.conj() } else { value })
}

/// Fourier transform of the kernel at frequency `gap`:
/// `int ds e^{-i gap s} W(s)`, by windowed adaptive quadrature.
///
/// Decaying kernels are integrated over their own decay window, with an
/// integration-by-parts correction for the truncated power-law tails.
/// Kernels that do not decay are damped by `e^{-delta |s|}` (the regulator
/// acting on the Fourier side), which resolves their spectral lines at
/// width `delta`.
pub fn adiabatic_rate<R: Real>(corr: &StationaryCorrelator<R>, gap: R) -> Result<R> {
    if !corr.stationary {
        return Err(Error::ContractViolation(
            "adiabatic rate requires a stationary correlator".into(),
        ));
    }
    let target = R::lit(1e-9);
    let (window, damping) = fourier_window(corr, gap, target)?;
    let i = imag_unit::<R>();
    let f = |s: R| -> Cplx<R> {
        let w = corr.eval(s).unwrap_or_else(|_| Complex::new(R::nan(), R::nan()));
        let phase = (-(i * (gap * s))).exp();
        match damping {
            Some(delta) => w * phase * (-delta * s.abs()).exp(),
            None => w * phase,
        }
    };
    // panel seeds: the regulator peak at the origin, then oscillation slicing
    let eps = corr.epsilon.max(R::lit(1e-8) * window);
    let mut splits = vec![R::zero()];
    let mut step = eps;
    while step < window {
        splits.push(step);
        splits.push(-step);
        step = step * R::lit(2.0);
    }
    let max_w = if gap.abs() > R::lit(1e-8) {
        Some(R::PI() / (R::lit(4.0) * gap.abs()))
    } else {
        None
    };
    let edges = panel_edges(-window, window, &splits, max_w);
    let cfg = QuadConfig {
        rel_tol: R::lit(1e-10),
        abs_tol: R::lit(1e-11),
        max_depth: 12,
        max_panels: 60_000,
    };
    let rule = GaussLegendre::new(16);
    let integral = integrate_1d(&f, &edges, &cfg, &rule)?;
    let mut value = integral.value;
    // truncated-tail correction: boundary term of one integration by parts,
    // real because the kernel is hermitian
    if damping.is_none() && gap.abs() > R::lit(1e-8) {
        let w_hi = corr.eval(window)?;
        let phase = (-(i * (gap * window))).exp();
        let corr_term = (phase * w_hi).im * (R::lit(2.0) / gap);
        value += Complex::new(corr_term, R::zero());
    }
    let scale = value.norm().max(R::lit(1.0));
    if value.im.abs() > R::lit(1e-8) * scale + integral.err * R::lit(10.0) {
        log::warn!(
            "adiabatic rate imaginary residue {:.3e} at gap {}",
            value.im.as_f64(),
            gap.as_f64()
        );
    }
    Ok(value.re)
}

fn fourier_window<R: Real>(
    corr: &StationaryCorrelator<R>,
    gap: R,
    target: R,
) -> Result<(R, Option<R>)> {
    match corr.decay() {
        Decay::Exponential { rate } => {
            // amplitude at the window follows from the kernel itself
            let mut window = R::lit(40.0).max(R::lit(3.0)) / rate;
            for _ in 0..20 {
                let w = corr.eval(window)?.norm();
                if w < target {
                    break;
                }
                window = window * R::lit(1.5);
            }
            Ok((window, None))
        }
        Decay::PowerLaw { .. } => {
            let omega2 = (gap * gap).max(R::lit(1e-4));
            let mut window = R::lit(8.0);
            for _ in 0..24 {
                let w = corr.eval(window)?.norm();
                if w / (R::one() + omega2 * window) < target {
                    break;
                }
                window = window * R::lit(2.0);
            }
            Ok((window, None))
        }
        Decay::None => {
            let delta = corr.epsilon.max(R::lit(0.02));
            let window = R::lit(30.0) / delta;
            Ok((window, Some(delta)))
        }
    }
}

/// Antisymmetric part of the Fourier-transformed kernel,
/// `C(gap) = W~(gap) - W~(-gap)`; state-independent for canonical fields.
pub fn commutator_spectrum<R: Real>(corr: &StationaryCorrelator<R>, gap: R) -> Result<R> {
    if gap == R::zero() {
        return Ok(R::zero());
    }
    Ok(adiabatic_rate(corr, gap)? - adiabatic_rate(corr, -gap)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectories::Worldline;
    use num_complex::Complex64;

    fn inertial_spec(eps: f64) -> CorrelatorSpec<f64> {
        CorrelatorSpec {
            mass: 0.0,
            dim: 3,
            state: FieldState::Vacuum,
            trajectory: Worldline::inertial(0.0, 0.0, 3).unwrap(),
            epsilon: eps,
        }
    }

    fn accelerated_spec(a: f64, eps: f64) -> CorrelatorSpec<f64> {
        CorrelatorSpec {
            mass: 0.0,
            dim: 3,
            state: FieldState::Vacuum,
            trajectory: Worldline::uniformly_accelerated(a, 3).unwrap(),
            epsilon: eps,
        }
    }

    fn thermal_spec(beta: f64, eps: f64) -> CorrelatorSpec<f64> {
        CorrelatorSpec {
            mass: 0.0,
            dim: 3,
            state: FieldState::Thermal { beta },
            trajectory: Worldline::inertial(0.0, 0.0, 3).unwrap(),
            epsilon: eps,
        }
    }

    #[test]
    fn inertial_vacuum_value() {
        let corr = closed_form_pullback(&inertial_spec(1e-3)).unwrap();
        let w = corr.eval_extrapolated(1.0).unwrap();
        let want = -1.0 / (4.0 * std::f64::consts::PI.powi(2));
        // extrapolation residual is the cubic regulator term, ~1.3e-8
        assert!((w.re - want).abs() < 5e-8, "{} vs {want}", w.re);
        assert!(w.im.abs() < 5e-8);
        assert!((want + 0.0253303).abs() < 1e-7);
    }

    #[test]
    fn accelerated_vacuum_value() {
        let corr = closed_form_pullback(&accelerated_spec(1.0, 1e-3)).unwrap();
        let w = corr.eval_extrapolated(1.0).unwrap();
        let want = -1.0 / (16.0 * std::f64::consts::PI.powi(2) * 0.5f64.sinh().powi(2));
        assert!((w.re - want).abs() < 5e-8);
        assert!((want + 0.0233209345783447).abs() < 1e-12);
    }

    #[test]
    fn inertial_pullback_is_velocity_independent() {
        let mut spec = inertial_spec(1e-3);
        let w_rest = closed_form_pullback(&spec).unwrap().eval(0.7).unwrap();
        spec.trajectory = Worldline::inertial(0.9, -3.0, 3).unwrap();
        let w_boosted = closed_form_pullback(&spec).unwrap().eval(0.7).unwrap();
        assert_eq!(w_rest, w_boosted);
    }

    #[test]
    fn thermal_image_sum_matches_sinh_closed_form() {
        // the image sum with a trigamma tail equals
        // -1/(4 beta^2 sinh^2(pi z / beta)) to rounding, for any cut
        for (beta, cut) in [(2.0 * std::f64::consts::PI, 64usize), (2.0, 16), (0.7, 4)] {
            for s in [0.3, 1.0, 2.5] {
                let z = Complex64::new(s, -1e-3);
                let got = thermal_image_sum(z, beta, cut);
                let sh = (std::f64::consts::PI * z / beta).sinh();
                let want = -1.0 / (4.0 * beta * beta) / (sh * sh);
                // absolute floor: deep in the exponential tail the image
                // representation cancels digits it never had
                assert!(
                    (got - want).norm() < 1e-13 * want.norm() + 1e-18,
                    "beta={beta} cut={cut} s={s}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn unruh_equivalence_pointwise() {
        // accelerated vacuum at a equals inertial thermal at beta = 2 pi / a
        let acc = closed_form_pullback(&accelerated_spec(1.0, 1e-2)).unwrap();
        let th = closed_form_pullback(&thermal_spec(2.0 * std::f64::consts::PI, 1e-2)).unwrap();
        let mut s = 0.2;
        while s <= 3.0 {
            let wa = acc.eval_extrapolated(s).unwrap();
            let wt = th.eval_extrapolated(s).unwrap();
            assert!((wa - wt).norm() < 1e-10, "s={s}: {:?}", (wa - wt).norm());
            s += 0.2;
        }
    }

    #[test]
    fn kernel_hermiticity() {
        let kernels: Vec<StationaryCorrelator<f64>> = vec![
            closed_form_pullback(&inertial_spec(1e-3)).unwrap(),
            closed_form_pullback(&accelerated_spec(1.3, 1e-3)).unwrap(),
            closed_form_pullback(&thermal_spec(2.0, 1e-3)).unwrap(),
            single_mode_correlator(1.7, 2.0).unwrap(),
            mode_integral_correlator(&CorrelatorSpec {
                mass: 1.0,
                dim: 3,
                ..inertial_spec(1e-3)
            })
            .unwrap(),
        ];
        for corr in &kernels {
            for s in [0.1, 0.5, 1.0, 2.3] {
                let w = corr.eval(s).unwrap();
                let wm = corr.eval(-s).unwrap();
                assert!(
                    (wm - w.conj()).norm() < 1e-10 * w.norm().max(1.0),
                    "{:?} at s={s}",
                    corr.kernel
                );
            }
        }
    }

    #[test]
    fn single_mode_values() {
        let corr = single_mode_correlator(1.0, 1.0).unwrap();
        let w = corr.eval(std::f64::consts::FRAC_PI_2).unwrap();
        // (n+1) e^{-i pi/2} + n e^{i pi/2} = -2i + i = -i
        assert!((w - Complex64::new(0.0, -1.0)).norm() < 1e-14);

        let ground = single_mode_correlator(2.0, 0.0).unwrap();
        for s in [0.0_f64, 0.7, 4.0] {
            assert!((ground.eval(s).unwrap().norm() - 1.0).abs() < 1e-14);
        }
        // Im W = -sin(omega s) for every occupation
        for n in [0.0, 1.0, 2.0] {
            let c = single_mode_correlator(1.3, n).unwrap();
            for s in [0.3_f64, 1.1] {
                assert!((c.eval(s).unwrap().im + (1.3 * s).sin()).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn mode_integral_massive_bessel_fixtures() {
        // frozen from the Laplace-transform closed forms (independent route):
        // d=3: m K1(m p)/(32 pi^2 p); d=2: e^{-m p}/(16 pi p); d=1: K0(m p)/(4 pi)
        // at m=1, s=1, eps=1e-3, p = eps + i s
        let cases = [
            (3usize, Complex64::new(-0.0038859949272443146, 0.0021804224888075515)),
            (2, Complex64::new(-0.016713046229423501, -0.01075494228893989)),
            (1, Complex64::new(-0.010977168538812005, -0.095552079556892219)),
        ];
        for (dim, want) in cases {
            let spec = CorrelatorSpec {
                mass: 1.0,
                dim,
                ..inertial_spec(1e-3)
            };
            let corr = mode_integral_correlator(&spec).unwrap();
            let got = corr.eval(1.0).unwrap();
            assert!(
                (got - want).norm() < 1e-11,
                "d={dim}: {got} vs {want} (diff {:.2e})",
                (got - want).norm()
            );
        }
    }

    #[test]
    fn mode_integral_massless_tracks_closed_form_up_to_solid_angle() {
        // the spectral normalization is 2^-d of the closed-form pullback
        let spec = CorrelatorSpec {
            mass: 0.0,
            ..inertial_spec(2e-3)
        };
        let mode = mode_integral_correlator(&spec).unwrap();
        let closed = closed_form_pullback(&spec).unwrap();
        for s in [0.5, 1.0, 2.0] {
            let wm = mode.eval(s).unwrap() * 8.0;
            let wc = closed.eval(s).unwrap();
            assert!(
                (wm - wc).norm() < 1e-8 * wc.norm(),
                "s={s}: {wm} vs {wc}"
            );
        }
    }

    #[test]
    fn mode_integral_agrees_with_real_axis_route() {
        // independent oracle: damped quadrature straight along the real
        // frequency axis with the hard cutoff at e^{-eps w} = 1e-16
        let rule = GaussLegendre::<f64>::new(16);
        let cfg = QuadConfig::standard().with_rel_tol(1e-10);
        for (dim, mass, s, eps) in [
            (3usize, 0.0, 0.8, 2e-2),
            (3, 1.0, 1.3, 2e-2),
            (2, 0.5, 0.6, 2e-2),
        ] {
            let z = Complex64::new(s, -eps);
            let f = |w: f64| {
                let g = spectral_weight(dim, mass, w);
                (Complex64::new(0.0, -w) * z).exp() * g
            };
            let w_cut = mass + 37.0 / eps;
            let osc = std::f64::consts::PI / (4.0 * s.max(0.1));
            let edges = panel_edges(mass + 1e-12, w_cut, &[], Some(osc));
            let oracle = integrate_1d(&f, &edges, &cfg, &rule).unwrap().value;

            let spec = CorrelatorSpec {
                mass,
                dim,
                ..inertial_spec(eps)
            };
            let got = mode_integral_correlator(&spec).unwrap().eval(s).unwrap();
            assert!(
                (got - oracle).norm() < 1e-8 * oracle.norm().max(1e-3),
                "d={dim} m={mass} s={s}: {got} vs oracle {oracle}"
            );
        }
    }

    #[test]
    fn one_dimensional_massless_rejected() {
        let spec = CorrelatorSpec {
            mass: 0.0,
            dim: 1,
            ..inertial_spec(1e-3)
        };
        assert!(matches!(
            mode_integral_correlator(&spec),
            Err(Error::InfraredDivergence)
        ));
    }

    #[test]
    fn unsupported_closed_forms_name_the_valid_set() {
        let spec = CorrelatorSpec {
            state: FieldState::Thermal { beta: 1.0 },
            trajectory: Worldline::uniformly_accelerated(1.0, 3).unwrap(),
            ..inertial_spec(1e-3)
        };
        match closed_form_pullback(&spec) {
            Err(Error::Unsupported { supported, .. }) => {
                assert!(supported.contains("vacuum"));
            }
            other => panic!("expected Unsupported, got {other:?}"),
        }
    }

    #[test]
    fn adiabatic_rate_vacuum_baseline() {
        // no spontaneous excitation of an inertial detector
        let corr = closed_form_pullback(&inertial_spec(1e-3)).unwrap();
        let up = adiabatic_rate(&corr, 1.0).unwrap();
        assert!(up.abs() < 1e-6, "W~(+1) = {up}");
        // spontaneous emission rate: gap/(2 pi)
        let down = adiabatic_rate(&corr, -1.0).unwrap();
        let want = 1.0 / (2.0 * std::f64::consts::PI);
        assert!((down - want).abs() < 3e-3 * want, "W~(-1) = {down} vs {want}");
    }

    #[test]
    fn thermal_detailed_balance() {
        let beta = 2.0 * std::f64::consts::PI;
        let corr = closed_form_pullback(&thermal_spec(beta, 1e-3)).unwrap();
        for gap in [0.25, 0.5, 1.0] {
            let up = adiabatic_rate(&corr, gap).unwrap();
            let down = adiabatic_rate(&corr, -gap).unwrap();
            let ratio = down / up;
            let want = (beta * gap).exp();
            assert!(
                (ratio / want - 1.0).abs() < 0.01,
                "gap={gap}: ratio {ratio} vs {want}"
            );
        }
    }

    #[test]
    fn accelerated_detailed_balance_at_unruh_temperature() {
        let a = 1.0;
        let corr = closed_form_pullback(&accelerated_spec(a, 1e-3)).unwrap();
        let beta_eff = 2.0 * std::f64::consts::PI / a;
        for gap in [0.25, 0.5, 1.0] {
            let up = adiabatic_rate(&corr, gap).unwrap();
            let down = adiabatic_rate(&corr, -gap).unwrap();
            let want = (beta_eff * gap).exp();
            assert!(
                (down / up / want - 1.0).abs() < 0.01,
                "gap={gap}: {} vs {want}",
                down / up
            );
        }
    }

    #[test]
    fn commutator_spectrum_state_independent_for_single_mode() {
        let omega = 1.0;
        let gaps = [0.4, 1.0, 1.6];
        let reference: Vec<f64> = gaps
            .iter()
            .map(|&g| commutator_spectrum(&single_mode_correlator(omega, 0.0).unwrap(), g).unwrap())
            .collect();
        for n in [1.0, 2.0] {
            let corr = single_mode_correlator(omega, n).unwrap();
            for (i, &g) in gaps.iter().enumerate() {
                let c = commutator_spectrum(&corr, g).unwrap();
                assert!(
                    (c - reference[i]).abs() < 1e-9 * reference[i].abs().max(1e-3),
                    "n={n} gap={g}: {c} vs {}",
                    reference[i]
                );
            }
        }
    }

    #[test]
    fn commutator_spectrum_vanishes_at_zero_gap() {
        let corr = single_mode_correlator(1.0, 1.0).unwrap();
        assert_eq!(commutator_spectrum(&corr, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn commutator_vacuum_vs_thermal() {
        let vac = closed_form_pullback(&inertial_spec(1e-3)).unwrap();
        let th = closed_form_pullback(&thermal_spec(2.0 * std::f64::consts::PI, 1e-3)).unwrap();
        for gap in [0.5, 1.0] {
            let cv = commutator_spectrum(&vac, gap).unwrap();
            let ct = commutator_spectrum(&th, gap).unwrap();
            assert!(
                (cv - ct).abs() <= 1e-4 * cv.abs(),
                "gap={gap}: {cv} vs {ct}"
            );
        }
    }

    #[test]
    fn non_stationary_input_rejected() {
        let corr = custom_correlator(
            |_s: f64, _e: f64| Ok(Complex64::new(1.0, 0.0)),
            false,
            1e-3,
        );
        assert!(matches!(
            adiabatic_rate(&corr, 1.0),
            Err(Error::ContractViolation(_))
        ));
    }

    #[test]
    fn single_mode_boundedness() {
        for n in [0.0, 1.0, 3.5] {
            let corr = single_mode_correlator(2.0, n).unwrap();
            let bound = corr.bound().unwrap();
            assert_eq!(bound, 2.0 * n + 1.0);
            let mut s = -4.0;
            while s <= 4.0 {
                assert!(corr.eval(s).unwrap().norm() <= bound + 1e-12);
                s += 0.37;
            }
        }
    }
}
