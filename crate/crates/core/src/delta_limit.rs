//! Machinery for the fast-pulse limit: exact zero-width values of the
//! non-local terms, width sweeps with Richardson extrapolation, the density
//! of states behind the spectral kernels, and the single-kick scaling
//! experiment.

use crate::correlators::StationaryCorrelator;
use crate::error::{Error, Result, Warning};
use crate::extrapolate::{extrapolate_sequence, neville_to_zero_real};
use crate::quad::{integrate_1d, panel_edges, GaussLegendre, QuadConfig};
use crate::real::{imag_unit, Cplx, Real};
use crate::response::{functional_w, nonlocal_correlations};
use crate::switching::{Comb, NascentDelta, ToothShape};
use crate::trajectories::Worldline;
use num_complex::Complex;
use rayon::prelude::*;

/// Decreasing pulse widths plus the assumed convergence order of the
/// sweep's leading error (2 for symmetric pulses).
#[derive(Debug, Clone)]
pub struct EtaSchedule<R> {
    etas: Vec<R>,
    pub order: usize,
}

impl<R: Real> EtaSchedule<R> {
    pub fn new(etas: Vec<R>, order: usize) -> Result<Self> {
        if etas.len() < 3 {
            return Err(Error::InvalidParameter {
                name: "etas",
                reason: "need at least 3 widths for extrapolation".into(),
            });
        }
        if order == 0 {
            return Err(Error::InvalidParameter {
                name: "order",
                reason: "extrapolation order must be positive".into(),
            });
        }
        for w in etas.windows(2) {
            if !(w[1] > R::zero() && w[1] < w[0]) {
                return Err(Error::InvalidParameter {
                    name: "etas",
                    reason: "widths must be strictly decreasing and positive".into(),
                });
            }
        }
        Ok(EtaSchedule { etas, order })
    }

    /// `count` widths from `eta0` downward by the given ratio (> 1).
    pub fn geometric(eta0: R, ratio: R, count: usize) -> Result<Self> {
        if !(ratio > R::one()) {
            return Err(Error::InvalidParameter {
                name: "ratio",
                reason: "geometric ratio must exceed 1".into(),
            });
        }
        let mut etas = Vec::with_capacity(count);
        let mut e = eta0;
        for _ in 0..count {
            etas.push(e);
            e = e / ratio;
        }
        EtaSchedule::new(etas, 2)
    }

    pub fn etas(&self) -> &[R] {
        &self.etas
    }
}

/// Output of a width sweep of the non-local terms.
#[derive(Debug, Clone)]
pub struct EtaSweepResult<R> {
    /// `(eta, C(eta))` in the order of the schedule.
    pub points: Vec<(R, Cplx<R>)>,
    /// Polynomial extrapolation of the sequence to zero width.
    pub extrapolant: Cplx<R>,
    /// Convergence order estimated from the deepest differences.
    pub measured_order: Option<R>,
    /// Order actually used for extrapolation.
    pub used_order: usize,
    /// Accumulated quadrature error across the sweep.
    pub quadrature_error: R,
    pub warnings: Vec<Warning>,
}

/// Zero-width limit of the non-local terms of an `n_teeth` comb: the
/// correlator evaluated at the pulse times, phase-weighted,
/// `sum_{m=1}^{N-1} e^{-i gap zeta m} sum_{n=0}^{N-1-m} W(tau0+(n+m)zeta, tau0+n zeta)`.
pub fn nonlocal_delta_limit<R: Real>(
    n_teeth: usize,
    zeta: R,
    tau0: R,
    gap: R,
    corr: &StationaryCorrelator<R>,
) -> Result<Cplx<R>> {
    if n_teeth == 0 {
        return Err(Error::InvalidParameter {
            name: "n_teeth",
            reason: "need at least one tooth".into(),
        });
    }
    if !(zeta > R::zero()) {
        return Err(Error::InvalidParameter {
            name: "zeta",
            reason: "lapse must be positive".into(),
        });
    }
    let i = imag_unit::<R>();
    let mut acc = Complex::new(R::zero(), R::zero());
    for m in 1..n_teeth {
        let mf = R::from_usize(m).unwrap();
        let phase = (-(i * (gap * zeta * mf))).exp();
        for n in 0..=(n_teeth - 1 - m) {
            let nf = R::from_usize(n).unwrap();
            let late = tau0 + (nf + mf) * zeta;
            let early = tau0 + nf * zeta;
            let w = corr
                .eval(late - early)
                .map_err(|e| Error::PairEvaluation {
                    m,
                    n,
                    lapse: (late - early).as_f64(),
                    source: Box::new(e),
                })?;
            acc += phase * w;
        }
    }
    Ok(acc)
}

/// Evaluate the non-local terms across a width schedule and extrapolate to
/// zero width. The assumed convergence order is validated against the
/// measured one; a clear contradiction drops the order to one.
pub fn eta_sweep<R: Real>(
    comb_template: &Comb<R>,
    gap: R,
    corr: &StationaryCorrelator<R>,
    schedule: &EtaSchedule<R>,
    cfg: &QuadConfig<R>,
) -> Result<EtaSweepResult<R>> {
    let evaluations: Vec<Result<(R, Cplx<R>, R)>> = schedule
        .etas
        .par_iter()
        .map(|&eta| {
            let comb = comb_template.with_eta(eta)?;
            let c = nonlocal_correlations(&comb, gap, corr, cfg)?;
            Ok((eta, c.value, c.err))
        })
        .collect();
    let mut points = Vec::with_capacity(schedule.etas.len());
    let mut quad_err = R::zero();
    for r in evaluations {
        let (eta, value, err) = r?;
        points.push((eta, value));
        quad_err += err;
    }

    let etas: Vec<R> = points.iter().map(|p| p.0).collect();
    let values: Vec<Cplx<R>> = points.iter().map(|p| p.1).collect();
    let ext = extrapolate_sequence(&etas, &values, schedule.order);

    Ok(EtaSweepResult {
        points,
        extrapolant: ext.value,
        measured_order: ext.measured_order,
        used_order: ext.used_order,
        quadrature_error: quad_err,
        warnings: ext.warnings,
    })
}

/// Density of states of a free field of mass `m` in `dim` spatial
/// dimensions: `2^{1-d} pi^{d/2}/Gamma(d/2) * omega (omega^2-m^2)^{(d-2)/2}`
/// above threshold, zero below.
pub fn density_of_states<R: Real>(dim: usize, mass: R, omega: R) -> Result<R> {
    if !(1..=3).contains(&dim) {
        return Err(Error::InvalidParameter {
            name: "dim",
            reason: format!("spatial dimension must be 1, 2, or 3, got {dim}"),
        });
    }
    if omega < R::zero() || mass < R::zero() {
        return Err(Error::InvalidParameter {
            name: "omega/mass",
            reason: "frequency and mass must be non-negative".into(),
        });
    }
    if omega < mass {
        return Ok(R::zero());
    }
    if dim == 1 && omega == mass {
        return Err(Error::EndpointSingularity);
    }
    let pi = R::PI();
    let half_pi = pi * R::lit(0.5);
    let value = match dim {
        // 2^0 sqrt(pi)/Gamma(1/2) = 1
        1 => omega / (omega * omega - mass * mass).sqrt(),
        // 2^{-1} pi / Gamma(1) = pi/2
        2 => half_pi * omega,
        // 2^{-2} pi^{3/2} / Gamma(3/2) = pi/2
        _ => half_pi * omega * (omega * omega - mass * mass).sqrt(),
    };
    Ok(value)
}

/// Shape-dependent coefficient of the single-kick response divergence:
/// `int_0^inf domega/(2 pi)^d D_d(omega, 0)/(2 omega) |shape_ft(omega)|^2`.
pub fn single_kick_coefficient<R: Real>(dim: usize, shape: ToothShape) -> Result<R> {
    if !(2..=3).contains(&dim) {
        return Err(if dim == 1 {
            Error::InfraredDivergence
        } else {
            Error::InvalidParameter {
                name: "dim",
                reason: format!("supported dimensions are 2 and 3, got {dim}"),
            }
        });
    }
    let rule = GaussLegendre::new(16);
    let cfg = QuadConfig::standard().with_rel_tol(R::lit(1e-12));
    let f = |omega: R| -> Cplx<R> {
        let ft = shape.fourier(omega);
        let weight = crate::correlators::spectral_weight(dim, R::zero(), omega);
        Complex::new(weight * ft * ft, R::zero())
    };
    // geometric chunks until the tail stops contributing
    let mut acc = R::zero();
    let mut err = R::zero();
    let mut lo = R::zero();
    let mut hi = R::lit(2.0);
    let mut quiet = 0usize;
    for _ in 0..40 {
        let edges = panel_edges(lo, hi, &[], Some((hi - lo) / R::lit(4.0)));
        let chunk = integrate_1d(&f, &edges, &cfg, &rule)?;
        acc += chunk.value.re;
        err += chunk.err;
        if chunk.value.re.abs() < acc.abs() * R::lit(1e-14) + R::lit(1e-300) {
            quiet += 1;
            if quiet >= 2 {
                return Ok(acc);
            }
        } else {
            quiet = 0;
        }
        lo = hi;
        hi = hi * R::lit(2.0);
    }
    Err(Error::QuadratureNonConvergence {
        best_re: acc.as_f64(),
        best_im: 0.0,
        residual: err.as_f64(),
    })
}

/// Scaling study of the single-kick response.
#[derive(Debug, Clone)]
pub struct ScalingReport<R> {
    pub dim: usize,
    pub mass: R,
    pub gap: R,
    pub shape: ToothShape,
    pub etas: Vec<R>,
    /// `P/coupling^2` per width.
    pub probabilities: Vec<R>,
    /// Log-log slope extrapolated to zero width.
    pub fitted_slope: R,
    /// `1 - d`.
    pub theory_slope: R,
    /// Coefficient of `eta^{1-d}`, extrapolated to zero width.
    pub fitted_coefficient: R,
    /// [`single_kick_coefficient`] of the same shape.
    pub theory_coefficient: R,
    /// R^2 of the raw log-log line, reported as the fit residual.
    pub r_squared: R,
    pub warnings: Vec<Warning>,
}

/// Measure how the single-pulse excitation probability scales with the
/// pulse width on the spectral-route vacuum correlator.
///
/// The finite-width corrections enter at relative order `gap * eta`, so
/// both the slope and the prefactor are read off by extrapolating the
/// per-width local slopes and coefficients to zero width, not from the raw
/// two-parameter line fit (whose residual is still reported).
pub fn scaling_experiment<R: Real>(
    dim: usize,
    mass: R,
    shape: ToothShape,
    det: &crate::response::Detector<R>,
    schedule: &EtaSchedule<R>,
    cfg: &QuadConfig<R>,
) -> Result<ScalingReport<R>> {
    if dim == 1 {
        return Err(Error::InfraredDivergence);
    }
    if !(2..=3).contains(&dim) {
        return Err(Error::InvalidParameter {
            name: "dim",
            reason: format!("supported dimensions are 2 and 3, got {dim}"),
        });
    }
    let trajectory = Worldline::inertial(R::zero(), R::zero(), dim)?;
    let evaluations: Vec<Result<R>> = schedule
        .etas
        .par_iter()
        .map(|&eta| {
            let spec = crate::correlators::CorrelatorSpec {
                mass,
                dim,
                state: crate::correlators::FieldState::Vacuum,
                trajectory,
                epsilon: eta * R::lit(1e-6),
            };
            let corr = crate::correlators::mode_integral_correlator(&spec)?;
            let tooth = NascentDelta::new(shape, eta, R::zero())?;
            let w = functional_w(&tooth, &tooth, det.gap, &corr, cfg)?;
            Ok(w.value.re)
        })
        .collect();
    let mut probabilities = Vec::with_capacity(schedule.etas.len());
    for r in evaluations {
        probabilities.push(r?);
    }
    let etas = schedule.etas.clone();
    let n = etas.len();
    let d_minus = R::from_usize(dim).unwrap() - R::one();

    // raw log-log line, for the residual report
    let lx: Vec<R> = etas.iter().map(|e| e.ln()).collect();
    let ly: Vec<R> = probabilities.iter().map(|p| p.ln()).collect();
    let nf = R::from_usize(n).unwrap();
    let mx = lx.iter().copied().sum::<R>() / nf;
    let my = ly.iter().copied().sum::<R>() / nf;
    let sxy = lx
        .iter()
        .zip(&ly)
        .map(|(&x, &y)| (x - mx) * (y - my))
        .sum::<R>();
    let sxx = lx.iter().map(|&x| (x - mx) * (x - mx)).sum::<R>();
    let syy = ly.iter().map(|&y| (y - my) * (y - my)).sum::<R>();
    let line_slope = sxy / sxx;
    let r_squared = (sxy * sxy) / (sxx * syy);

    // local slopes at geometric midpoints, extrapolated to zero width
    let mut mid = Vec::with_capacity(n - 1);
    let mut local_slopes = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        mid.push((etas[i] * etas[i + 1]).sqrt());
        local_slopes.push((ly[i] - ly[i + 1]) / (lx[i] - lx[i + 1]));
    }
    let take = mid.len().min(3);
    let fitted_slope = neville_to_zero_real(
        &mid[mid.len() - take..],
        &local_slopes[local_slopes.len() - take..],
    );

    // per-width coefficients of eta^{1-d}, extrapolated to zero width
    let coeffs: Vec<R> = etas
        .iter()
        .zip(&probabilities)
        .map(|(&e, &p)| p * e.powf(d_minus))
        .collect();
    let take_c = etas.len().min(3);
    let fitted_coefficient = neville_to_zero_real(
        &etas[etas.len() - take_c..],
        &coeffs[coeffs.len() - take_c..],
    );

    let mut warnings = Vec::new();
    if r_squared < R::lit(0.99) {
        warnings.push(Warning::InconclusiveFit {
            r_squared: r_squared.as_f64(),
        });
    }
    log::debug!(
        "scaling d={dim}: line slope {:.4}, extrapolated slope {:.4}",
        line_slope.as_f64(),
        fitted_slope.as_f64()
    );

    Ok(ScalingReport {
        dim,
        mass,
        gap: det.gap,
        shape,
        etas,
        probabilities,
        fitted_slope,
        theory_slope: R::one() - R::from_usize(dim).unwrap(),
        fitted_coefficient,
        theory_coefficient: single_kick_coefficient(dim, shape)?,
        r_squared,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlators::{
        closed_form_pullback, constant_correlator, single_mode_correlator, CorrelatorSpec,
        FieldState,
    };
    use crate::response::Detector;
    use num_complex::Complex64;

    fn accelerated(eps: f64) -> StationaryCorrelator<f64> {
        closed_form_pullback(&CorrelatorSpec {
            mass: 0.0,
            dim: 3,
            state: FieldState::Vacuum,
            trajectory: Worldline::uniformly_accelerated(1.0, 3).unwrap(),
            epsilon: eps,
        })
        .unwrap()
    }

    #[test]
    fn delta_limit_two_teeth_single_mode() {
        let corr = single_mode_correlator(1.0, 0.0).unwrap();
        let (gap, zeta) = (0.7, 1.3);
        let got = nonlocal_delta_limit(2, zeta, 0.0, gap, &corr).unwrap();
        let want = (Complex64::new(0.0, -(gap + 1.0) * zeta)).exp();
        assert!((got - want).norm() < 1e-14);
    }

    #[test]
    fn delta_limit_accelerated_synchronized() {
        let corr = accelerated(1e-5);
        let gap = 2.0 * std::f64::consts::PI;
        let got = nonlocal_delta_limit(2, 1.0, 0.0, gap, &corr).unwrap();
        // e^{-2 pi i} W(1) = W(1)
        let want = corr.eval(1.0).unwrap();
        assert!((got - want).norm() < 1e-12);
        assert!((got.re + 0.0233209345783447).abs() < 1e-4);
    }

    #[test]
    fn delta_limit_regrouping_oracle() {
        // stationary: literal double sum equals sum_m (N-m) e^{-i gap zeta m} W(m zeta)
        let corr = accelerated(1e-3);
        let (n_teeth, zeta, tau0, gap) = (5usize, 0.8, 0.4, 1.9);
        let got = nonlocal_delta_limit(n_teeth, zeta, tau0, gap, &corr).unwrap();
        let mut want = Complex64::new(0.0, 0.0);
        for m in 1..n_teeth {
            let w = corr.eval(m as f64 * zeta).unwrap();
            let phase = Complex64::new(0.0, -gap * zeta * m as f64).exp();
            want += phase * w * (n_teeth - m) as f64;
        }
        assert!((got - want).norm() < 1e-13 * want.norm());
    }

    #[test]
    fn delta_limit_three_teeth_opposite_phase() {
        // (gap + omega) zeta = pi: the m=1 pairs cancel one m=2 pair to -1
        let omega = 1.0;
        let zeta = 1.0;
        let gap = std::f64::consts::PI / zeta - omega;
        let corr = single_mode_correlator(omega, 0.0).unwrap();
        let got = nonlocal_delta_limit(3, zeta, 0.0, gap, &corr).unwrap();
        assert!((got - Complex64::new(-1.0, 0.0)).norm() < 1e-12, "{got}");
    }

    #[test]
    fn sweep_converges_to_delta_limit_single_mode() {
        let corr = single_mode_correlator(1.0, 0.0).unwrap();
        let gap = 1.2;
        let comb = Comb::new(ToothShape::Gaussian, 0.1, 0.0, 1.0, 2).unwrap();
        let schedule = EtaSchedule::geometric(0.1, 2.0, 4).unwrap();
        let cfg = QuadConfig::standard().with_abs_tol(1e-14);
        let sweep = eta_sweep(&comb, gap, &corr, &schedule, &cfg).unwrap();
        let limit = nonlocal_delta_limit(2, 1.0, 0.0, gap, &corr).unwrap();

        // exact errors shrink by ~4 per halving
        let errs: Vec<f64> = sweep.points.iter().map(|p| (p.1 - limit).norm()).collect();
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!((3.4..4.6).contains(&ratio), "ratio {ratio}");
        }
        assert!(
            (sweep.extrapolant - limit).norm() < 1e-3 * limit.norm(),
            "extrapolant off by {:.2e}",
            (sweep.extrapolant - limit).norm() / limit.norm()
        );
        let p = sweep.measured_order.unwrap();
        assert!((p - 2.0).abs() < 0.3, "measured order {p}");
    }

    #[test]
    fn sweep_on_constant_kernel_is_flat() {
        let corr = constant_correlator(2.0);
        let comb = Comb::new(ToothShape::SmoothBump, 0.1, 0.0, 1.0, 2).unwrap();
        let schedule = EtaSchedule::geometric(0.1, 2.0, 3).unwrap();
        let cfg = QuadConfig::standard().with_abs_tol(1e-14);
        let sweep = eta_sweep(&comb, 0.0, &corr, &schedule, &cfg).unwrap();
        for (_, c) in &sweep.points {
            assert!((c - Complex64::new(2.0, 0.0)).norm() < 1e-9);
        }
        assert!((sweep.extrapolant - Complex64::new(2.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn schedule_validation() {
        assert!(EtaSchedule::new(vec![0.1, 0.05], 2).is_err());
        assert!(EtaSchedule::new(vec![0.1, 0.2, 0.05], 2).is_err());
        assert!(EtaSchedule::new(vec![0.1, 0.05, 0.025], 0).is_err());
        assert!(EtaSchedule::geometric(0.1, 0.5, 4).is_err());
        let s = EtaSchedule::<f64>::geometric(0.2, 2.0, 4).unwrap();
        assert_eq!(s.etas(), &[0.2, 0.1, 0.05, 0.025]);
    }

    #[test]
    fn density_of_states_values() {
        // d=3 massless at omega=2: pi/2 * 2 * 2 = 2 pi
        let got = density_of_states(3, 0.0, 2.0).unwrap();
        assert!((got - 2.0 * std::f64::consts::PI).abs() < 1e-14);
        // below threshold
        assert_eq!(density_of_states(3, 2.0, 1.0).unwrap(), 0.0);
        assert_eq!(density_of_states(2, 1.0, 0.5).unwrap(), 0.0);
        // d=1 endpoint flagged
        assert!(matches!(
            density_of_states(1, 1.0, 1.0),
            Err(Error::EndpointSingularity)
        ));
    }

    #[test]
    fn density_of_states_homogeneity() {
        // D(omega/eta, m) = eta^{1-d} D(omega, m eta)
        let (d, eta, omega, m) = (3usize, 0.5_f64, 1.0_f64, 0.3_f64);
        let lhs = density_of_states(d, m, omega / eta).unwrap();
        let rhs = eta.powi(1 - d as i32) * density_of_states(d, m * eta, omega).unwrap();
        assert!((lhs - rhs).abs() < 1e-12 * lhs.abs());
    }

    #[test]
    fn density_matches_spectral_weight() {
        for (d, m, w) in [(1usize, 0.5, 1.3), (2, 0.0, 2.0), (3, 1.0, 2.5)] {
            let dos = density_of_states(d, m, w).unwrap();
            let expected =
                dos / (2.0 * w) / (2.0 * std::f64::consts::PI).powi(d as i32);
            let got = crate::correlators::spectral_weight(d, m, w);
            assert!(
                (got - expected).abs() < 1e-14 * expected.abs(),
                "d={d}: {got} vs {expected}"
            );
        }
    }

    #[test]
    fn kick_coefficient_gaussian_closed_forms() {
        // d=3: int w e^{-w^2}/(32 pi^2) = 1/(64 pi^2)
        let got3 = single_kick_coefficient::<f64>(3, ToothShape::Gaussian).unwrap();
        let want3 = 1.0 / (64.0 * std::f64::consts::PI.powi(2));
        assert!((got3 - want3).abs() < 1e-12 * want3, "{got3} vs {want3}");
        assert!((want3 - 0.00158314349441153).abs() < 1e-15);
        // d=2: int e^{-w^2}/(16 pi) = 1/(32 sqrt(pi))
        let got2 = single_kick_coefficient::<f64>(2, ToothShape::Gaussian).unwrap();
        let want2 = 1.0 / (32.0 * std::f64::consts::PI.sqrt());
        assert!((got2 - want2).abs() < 1e-12 * want2, "{got2} vs {want2}");
    }

    #[test]
    fn kick_coefficient_bump_fixtures() {
        // frozen from a 22-digit quadrature of the same integrals
        let got3 = single_kick_coefficient::<f64>(3, ToothShape::SmoothBump).unwrap();
        assert!(
            (got3 - 0.00904788039978347).abs() < 1e-9,
            "d=3 bump: {got3}"
        );
        let got2 = single_kick_coefficient::<f64>(2, ToothShape::SmoothBump).unwrap();
        assert!(
            (got2 - 0.0421948008131061).abs() < 1e-9,
            "d=2 bump: {got2}"
        );
    }

    #[test]
    fn kick_coefficient_dimension_guard() {
        assert!(matches!(
            single_kick_coefficient::<f64>(1, ToothShape::Gaussian),
            Err(Error::InfraredDivergence)
        ));
    }

    #[test]
    fn scaling_slope_three_dimensions() {
        let det = Detector::<f64>::new(1.0, 0.01).unwrap();
        let schedule = EtaSchedule::geometric(0.1, 1.6681005372000588, 6).unwrap();
        let cfg = QuadConfig::standard();
        let report =
            scaling_experiment(3, 0.0, ToothShape::Gaussian, &det, &schedule, &cfg).unwrap();
        assert!(
            (report.fitted_slope + 2.0).abs() < 0.05,
            "slope {}",
            report.fitted_slope
        );
        assert!(
            (report.fitted_coefficient / report.theory_coefficient - 1.0).abs() < 0.01,
            "coefficient {} vs {}",
            report.fitted_coefficient,
            report.theory_coefficient
        );
        assert!(report.r_squared > 0.99);
    }

    #[test]
    fn sweep_extrapolant_is_shape_independent() {
        // the limit only sees the kernel at the kick times, so both shapes
        // must extrapolate to the same value
        let corr = accelerated(1e-5);
        let gap = 2.0 * std::f64::consts::PI;
        let cfg = QuadConfig::standard().with_abs_tol(1e-14);
        let schedule = EtaSchedule::new(vec![0.08, 0.04, 0.02, 0.01], 2).unwrap();
        let mut extrapolants = Vec::new();
        for shape in [ToothShape::Gaussian, ToothShape::SmoothBump] {
            let comb = Comb::new(shape, 0.08, 0.0, 1.0, 2).unwrap();
            let sweep = eta_sweep(&comb, gap, &corr, &schedule, &cfg).unwrap();
            extrapolants.push(sweep.extrapolant);
        }
        let rel = (extrapolants[0] - extrapolants[1]).norm() / extrapolants[1].norm();
        assert!(rel < 2e-3, "shapes disagree by {rel:.2e}");
        let limit = nonlocal_delta_limit(2, 1.0, 0.0, gap, &corr).unwrap();
        for e in &extrapolants {
            let off = (e - limit).norm() / limit.norm();
            assert!(off < 1e-3, "extrapolant off the limit by {off:.2e}");
        }
    }

    #[test]
    fn scaling_rejects_one_dimension() {
        let det = Detector::<f64>::new(1.0, 0.01).unwrap();
        let schedule = EtaSchedule::geometric(0.1, 2.0, 4).unwrap();
        let cfg = QuadConfig::standard();
        assert!(matches!(
            scaling_experiment(1, 0.0, ToothShape::Gaussian, &det, &schedule, &cfg),
            Err(Error::InfraredDivergence)
        ));
    }
}
