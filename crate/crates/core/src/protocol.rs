//! The two-kick measurement protocol: synchronized detector gaps, the
//! probability statistic, and the reconstruction of the correlator's real
//! and imaginary parts from excitation probabilities.

use crate::correlators::StationaryCorrelator;
use crate::error::{Error, Result, Warning};
use crate::extrapolate::extrapolate_sequence;
use crate::quad::QuadConfig;
use crate::real::{Cplx, Real};
use crate::response::{functional_w, nonlocal_correlations, Detector};
use crate::switching::{Comb, ToothShape};
use num_complex::Complex;
use rayon::prelude::*;

/// Gap synchronization mode: a whole number of detector cycles per lapse
/// selects the real part, an extra quarter cycle the imaginary part.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapMode {
    EvenCycles,
    QuarterCycle,
}

/// How the statistic is obtained per width: from three probability
/// quadratures (as an experiment would), or from the cross functional
/// alone (reference).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Measured,
    Direct,
}

/// Parameters of one reconstruction: a two-kick comb, the width schedule,
/// the cycle counts fixing both gaps, and the route.
#[derive(Debug, Clone)]
pub struct ProtocolConfig<R> {
    pub zeta: R,
    pub tau0: R,
    pub shape: ToothShape,
    pub schedule: crate::delta_limit::EtaSchedule<R>,
    /// Cycle count of the even run, `>= 1`.
    pub k_even: usize,
    /// Cycle count of the quarter run, `>= 0`.
    pub k_quarter: usize,
    pub coupling: R,
    pub route: Route,
}

/// `(P_total - P_first - P_second) / (2 coupling^2)`.
pub fn statistic_s<R: Real>(p_total: R, p_first: R, p_second: R, coupling: R) -> Result<R> {
    if !(coupling > R::zero()) {
        return Err(Error::InvalidParameter {
            name: "coupling",
            reason: "the statistic needs a positive coupling".into(),
        });
    }
    Ok((p_total - p_first - p_second) / (R::lit(2.0) * coupling * coupling))
}

/// Detector gap synchronized to the lapse: `2 pi k / zeta` for whole
/// cycles, `(2 pi k + pi/2) / zeta` for the quarter-cycle run.
pub fn synchronize_gap<R: Real>(zeta: R, k: usize, mode: GapMode) -> Result<R> {
    if !(zeta > R::zero()) {
        return Err(Error::InvalidParameter {
            name: "zeta",
            reason: format!("lapse must be positive, got {}", zeta.as_f64()),
        });
    }
    let two_pi = R::lit(2.0) * R::PI();
    let kf = R::from_usize(k).unwrap();
    match mode {
        GapMode::EvenCycles => {
            if k == 0 {
                return Err(Error::InvalidParameter {
                    name: "k",
                    reason: "even-cycle synchronization needs k >= 1".into(),
                });
            }
            Ok(two_pi * kf / zeta)
        }
        GapMode::QuarterCycle => Ok((two_pi * kf + R::FRAC_PI_2()) / zeta),
    }
}

/// One synchronized gap run: the statistic across the width schedule and
/// its zero-width extrapolation.
#[derive(Debug, Clone)]
pub struct GapRun<R> {
    pub mode: GapMode,
    pub gap: R,
    /// `(eta, S(eta))` per schedule entry.
    pub s_values: Vec<(R, R)>,
    pub extrapolant: R,
    pub measured_order: Option<R>,
    pub quadrature_error: R,
    pub warnings: Vec<Warning>,
}

/// A reconstructed correlator value at one lapse.
#[derive(Debug, Clone)]
pub struct Reconstruction<R> {
    pub value: Cplx<R>,
    pub even: GapRun<R>,
    pub quarter: GapRun<R>,
    pub route: Route,
}

fn statistic_at_width<R: Real>(
    zeta: R,
    tau0: R,
    shape: ToothShape,
    eta: R,
    gap: R,
    coupling: R,
    route: Route,
    corr: &StationaryCorrelator<R>,
    cfg: &QuadConfig<R>,
) -> Result<(R, R, Vec<Warning>)> {
    let comb = Comb::new(shape, eta, tau0, zeta, 2)?;
    let mut warnings = Vec::new();
    match route {
        Route::Measured => {
            let det = Detector::new(gap, coupling)?;
            let lambda2 = det.coupling * det.coupling;
            let first = comb.tooth(0);
            let second = comb.tooth(1);
            let total_w = functional_w(&comb, &comb, gap, corr, cfg)?;
            let first_w = functional_w(&first, &first, gap, corr, cfg)?;
            let second_w = functional_w(&second, &second, gap, corr, cfg)?;
            let p_total = total_w.value.re * lambda2;
            let p_first = first_w.value.re * lambda2;
            let p_second = second_w.value.re * lambda2;
            let s = statistic_s(p_total, p_first, p_second, det.coupling)?;
            let quad_err = (total_w.err + first_w.err + second_w.err) * lambda2;
            let difference = (p_total - p_first - p_second).abs();
            if difference < R::lit(1e3) * quad_err {
                warnings.push(Warning::PrecisionLimited {
                    value: difference.as_f64(),
                    error_estimate: quad_err.as_f64(),
                });
            }
            let s_err = quad_err / (R::lit(2.0) * lambda2);
            Ok((s, s_err, warnings))
        }
        Route::Direct => {
            let c = nonlocal_correlations(&comb, gap, corr, cfg)?;
            Ok((c.value.re, c.err, warnings))
        }
    }
}

fn run_gap<R: Real>(
    cfg: &ProtocolConfig<R>,
    mode: GapMode,
    k: usize,
    corr: &StationaryCorrelator<R>,
    quad: &QuadConfig<R>,
) -> Result<GapRun<R>> {
    let gap = synchronize_gap(cfg.zeta, k, mode)?;
    let evaluations: Vec<Result<(R, R, Vec<Warning>)>> = cfg
        .schedule
        .etas()
        .par_iter()
        .map(|&eta| {
            statistic_at_width(
                cfg.zeta, cfg.tau0, cfg.shape, eta, gap, cfg.coupling, cfg.route, corr, quad,
            )
        })
        .collect();
    let mut s_values = Vec::new();
    let mut quadrature_error = R::zero();
    let mut warnings = Vec::new();
    for (idx, r) in evaluations.into_iter().enumerate() {
        let (s, err, mut w) = r?;
        s_values.push((cfg.schedule.etas()[idx], s));
        quadrature_error += err;
        warnings.append(&mut w);
    }
    let hs: Vec<R> = s_values.iter().map(|p| p.0).collect();
    let ys: Vec<Cplx<R>> = s_values
        .iter()
        .map(|p| Complex::new(p.1, R::zero()))
        .collect();
    let ext = extrapolate_sequence(&hs, &ys, cfg.schedule.order);
    warnings.extend(ext.warnings);
    Ok(GapRun {
        mode,
        gap,
        s_values,
        extrapolant: ext.value.re,
        measured_order: ext.measured_order,
        quadrature_error,
        warnings,
    })
}

/// Reconstruct the complex correlator value at the configured lapse from
/// the two synchronized gap runs: the even-cycle extrapolant gives the
/// real part, the quarter-cycle one the imaginary part.
pub fn reconstruct_wightman<R: Real>(
    cfg: &ProtocolConfig<R>,
    corr: &StationaryCorrelator<R>,
    quad: &QuadConfig<R>,
) -> Result<Reconstruction<R>> {
    if !corr.stationary {
        return Err(Error::ContractViolation(
            "the protocol requires a stationary correlator".into(),
        ));
    }
    let even = run_gap(cfg, GapMode::EvenCycles, cfg.k_even, corr, quad)?;
    let quarter = run_gap(cfg, GapMode::QuarterCycle, cfg.k_quarter, corr, quad)?;
    let value = Complex::new(even.extrapolant, quarter.extrapolant);
    Ok(Reconstruction {
        value,
        even,
        quarter,
        route: cfg.route,
    })
}

/// One lapse of a reconstruction sweep. `value` is absent when that point
/// failed; the failure text is kept so a sweep can continue past it.
#[derive(Debug, Clone)]
pub struct ReconstructionPoint<R> {
    pub zeta: R,
    pub value: Option<Cplx<R>>,
    /// The kernel evaluated at the same lapse, regulator-extrapolated.
    pub reference: Option<Cplx<R>>,
    pub abs_err: Option<R>,
    pub rel_err: Option<R>,
    pub even: Option<GapRun<R>>,
    pub quarter: Option<GapRun<R>>,
    pub failure: Option<String>,
    pub warnings: Vec<Warning>,
}

#[derive(Debug, Clone)]
pub struct ReconstructionResult<R> {
    pub route: Route,
    pub points: Vec<ReconstructionPoint<R>>,
}

/// Run the reconstruction across a grid of lapses, attaching the kernel's
/// own value as reference. Per-point failures are recorded and the sweep
/// continues.
pub fn reconstruction_sweep<R: Real>(
    zetas: &[R],
    template: &ProtocolConfig<R>,
    corr: &StationaryCorrelator<R>,
    quad: &QuadConfig<R>,
) -> Result<ReconstructionResult<R>> {
    if zetas.is_empty() {
        return Err(Error::InvalidParameter {
            name: "zetas",
            reason: "the lapse grid must not be empty".into(),
        });
    }
    for w in zetas.windows(2) {
        if !(w[0] > R::zero() && w[1] > w[0]) {
            return Err(Error::InvalidParameter {
                name: "zetas",
                reason: "lapses must be positive and sorted ascending".into(),
            });
        }
    }
    if !(*zetas.first().unwrap() > R::zero()) {
        return Err(Error::InvalidParameter {
            name: "zetas",
            reason: "lapses must be positive".into(),
        });
    }

    let points: Vec<ReconstructionPoint<R>> = zetas
        .par_iter()
        .map(|&zeta| {
            // widths scale with the lapse so the kicks stay well separated
            let scale = zeta / template.zeta;
            let etas: Vec<R> = template
                .schedule
                .etas()
                .iter()
                .map(|&e| e * scale)
                .collect();
            let schedule =
                match crate::delta_limit::EtaSchedule::new(etas, template.schedule.order) {
                    Ok(s) => s,
                    Err(e) => {
                        return ReconstructionPoint {
                            zeta,
                            value: None,
                            reference: None,
                            abs_err: None,
                            rel_err: None,
                            even: None,
                            quarter: None,
                            failure: Some(e.to_string()),
                            warnings: Vec::new(),
                        }
                    }
                };
            let cfg = ProtocolConfig {
                zeta,
                schedule,
                ..template.clone()
            };
            let reference = corr.eval_extrapolated(zeta).ok();
            match reconstruct_wightman(&cfg, corr, quad) {
                Ok(rec) => {
                    let (abs_err, rel_err) = match reference {
                        Some(r) => {
                            let abs = (rec.value - r).norm();
                            let rel = if r.norm() > R::zero() {
                                Some(abs / r.norm())
                            } else {
                                None
                            };
                            (Some(abs), rel)
                        }
                        None => (None, None),
                    };
                    let mut warnings = rec.even.warnings.clone();
                    warnings.extend(rec.quarter.warnings.clone());
                    ReconstructionPoint {
                        zeta,
                        value: Some(rec.value),
                        reference,
                        abs_err,
                        rel_err,
                        even: Some(rec.even),
                        quarter: Some(rec.quarter),
                        failure: None,
                        warnings,
                    }
                }
                Err(e) => ReconstructionPoint {
                    zeta,
                    value: None,
                    reference,
                    abs_err: None,
                    rel_err: None,
                    even: None,
                    quarter: None,
                    failure: Some(e.to_string()),
                    warnings: Vec::new(),
                },
            }
        })
        .collect();

    Ok(ReconstructionResult {
        route: template.route,
        points,
    })
}
