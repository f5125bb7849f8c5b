//! Leading-order detector response: the two-pulse functional, excitation
//! probabilities for pulse trains, and their split into same-pulse (local)
//! and cross-pulse (non-local) contributions.

use crate::correlators::{spectral_weight, StationaryCorrelator};
use crate::error::{Error, Result, Warning};
use crate::quad::{integrate_1d, integrate_2d, panel_edges, GaussLegendre, Integral, QuadConfig};
use crate::real::{imag_unit, Cplx, Real};
use crate::switching::{Comb, Switching, ToothShape};
use num_complex::Complex;
use rayon::prelude::*;
use std::cell::RefCell;

/// Truncation mass level for switching windows.
pub const TAIL_TOL: f64 = 1e-12;

/// Two-level probe: energy gap and coupling strength. Negative gaps select
/// the deexcitation channel.
#[derive(Debug, Clone, Copy)]
pub struct Detector<R> {
    pub gap: R,
    pub coupling: R,
}

impl<R: Real> Detector<R> {
    pub fn new(gap: R, coupling: R) -> Result<Self> {
        if coupling < R::zero() {
            return Err(Error::InvalidParameter {
                name: "coupling",
                reason: format!("coupling must be non-negative, got {}", coupling.as_f64()),
            });
        }
        Ok(Detector { gap, coupling })
    }
}

/// Excitation probability of a comb, decomposed.
#[derive(Debug, Clone)]
pub struct ProbeOutcome<R> {
    /// Total excitation probability, assembled from the decomposition.
    pub total: R,
    /// Total divided by the squared coupling, for presentation at any
    /// coupling.
    pub total_per_coupling2: R,
    /// Same-pulse contributions, one per tooth.
    pub local_terms: Vec<R>,
    /// Sum of cross-pulse functionals (one triangle of the pair matrix).
    pub nonlocal: Cplx<R>,
    /// Independent evaluation of the full switching function in one
    /// quadrature.
    pub direct_total: R,
    /// Accumulated quadrature error plus the direct-vs-decomposed spread.
    pub error_estimate: R,
    pub warnings: Vec<Warning>,
}

/// The two-switching response functional:
/// `int int f(t) g(t') e^{-i gap (t - t')} W(t - t') dt dt'`.
///
/// Evaluated in rotated coordinates `u = t - t'`, `v = t + t'`, which align
/// the kernel's short-lapse structure with one tensor axis; panels are
/// seeded at pulse edges, at the oscillation wavelength, and on a geometric
/// ladder around zero lapse.
pub fn functional_w<R: Real>(
    f: &dyn Switching<R>,
    g: &dyn Switching<R>,
    gap: R,
    corr: &StationaryCorrelator<R>,
    cfg: &QuadConfig<R>,
) -> Result<Integral<R>> {
    if let Some((dim, mass)) = corr.as_mode_integral() {
        return functional_w_spectral(f, g, gap, corr, dim, mass, cfg);
    }
    let tail = R::lit(TAIL_TOL);
    let (flo, fhi) = f.window(tail);
    let (glo, ghi) = g.window(tail);

    let u_lo = flo - ghi;
    let u_hi = fhi - glo;
    let v_lo = flo + glo;
    let v_hi = fhi + ghi;

    let f_splits = f.interior_splits(tail);
    let g_splits = g.interior_splits(tail);
    let mut u_splits = Vec::new();
    let mut v_splits = Vec::new();
    for &a in &f_splits {
        for &b in &g_splits {
            u_splits.push(a - b);
            v_splits.push(a + b);
        }
    }
    // geometric ladder around zero lapse for the regulated coincidence peak
    if let Some(scale) = corr.short_range_scale() {
        if u_lo < R::zero() && u_hi > R::zero() {
            u_splits.push(R::zero());
            let span = u_hi.max(-u_lo);
            let mut step = scale.max(span * R::lit(1e-10));
            while step < span {
                u_splits.push(step);
                u_splits.push(-step);
                step = step * R::lit(2.0);
            }
        }
    }
    let osc = gap.abs() + corr.osc_rate();
    let u_cap = if osc > R::lit(1e-8) {
        Some(R::PI() / (R::lit(4.0) * osc))
    } else {
        None
    };
    // the pulse profiles vary along v on the scale of the narrower pulse
    let v_scale = (fhi - flo).min(ghi - glo);
    let v_cap = Some(v_scale * R::lit(0.5));

    let u_edges = panel_edges(u_lo, u_hi, &u_splits, u_cap);
    let v_edges = panel_edges(v_lo, v_hi, &v_splits, v_cap);

    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let i = imag_unit::<R>();
    let half = R::lit(0.5);
    let integrand = |u: R, v: R| -> Cplx<R> {
        let t1 = (v + u) * half;
        let t2 = (v - u) * half;
        let profile = f.eval(t1) * g.eval(t2);
        if profile == R::zero() {
            return Complex::new(R::zero(), R::zero());
        }
        let w = match corr.eval(u) {
            Ok(w) => w,
            Err(e) => {
                *failure.borrow_mut() = Some(e);
                return Complex::new(R::nan(), R::nan());
            }
        };
        let phase = (-(i * (gap * u))).exp();
        w * phase * (profile * half)
    };
    let rule = GaussLegendre::new(10);
    let result = integrate_2d(&integrand, &u_edges, &v_edges, cfg, &rule);
    if let Some(err) = failure.into_inner() {
        return Err(err);
    }
    result
}

/// Spectral route for mode-integral kernels: the lapse integrals are done
/// in closed form against the pulse transforms, leaving one frequency
/// integral. Exact reordering of the same triple integral.
fn functional_w_spectral<R: Real>(
    f: &dyn Switching<R>,
    g: &dyn Switching<R>,
    gap: R,
    corr: &StationaryCorrelator<R>,
    dim: usize,
    mass: R,
    cfg: &QuadConfig<R>,
) -> Result<Integral<R>> {
    let eps = corr.epsilon;
    let f_teeth = f.pulses();
    let g_teeth = g.pulses();
    let eta_min = f_teeth
        .iter()
        .chain(&g_teeth)
        .map(|t| t.eta)
        .fold(R::infinity(), |a, b| a.min(b));
    let shape_cut = |shape: ToothShape| -> R {
        match shape {
            ToothShape::Gaussian => R::lit(9.5),
            ToothShape::SmoothBump => R::lit(650.0),
        }
    };
    let k_cut = f_teeth
        .iter()
        .chain(&g_teeth)
        .map(|t| shape_cut(t.shape) / t.eta)
        .fold(R::zero(), |a, b| a.max(b));
    let omega_hi = (k_cut + gap.abs() + mass).min(mass + R::lit(37.0) / eps);
    let x_hi = (omega_hi - mass).sqrt();

    let i = imag_unit::<R>();
    let transform = |teeth: &[crate::switching::NascentDelta<R>], k: R| -> Cplx<R> {
        let mut acc = Complex::new(R::zero(), R::zero());
        for t in teeth {
            let amp = t.shape.fourier(t.eta * k);
            acc += (-(i * (k * t.center))).exp() * amp;
        }
        acc
    };
    let integrand = |x: R| -> Cplx<R> {
        let omega = mass + x * x;
        let k = gap + omega;
        let weight = spectral_weight(dim, mass, omega) * (x + x) * (-eps * omega).exp();
        transform(&f_teeth, k) * transform(&g_teeth, k).conj() * weight
    };

    // oscillation in x comes from the pulse-center separations
    let max_sep = f_teeth
        .iter()
        .flat_map(|a| g_teeth.iter().map(move |b| (a.center - b.center).abs()))
        .fold(R::zero(), |a, b| a.max(b));
    let x_cap = if max_sep > R::lit(1e-10) {
        Some((R::PI() / (R::lit(8.0) * x_hi * max_sep)).min(x_hi / R::lit(16.0)))
    } else {
        Some(x_hi / R::lit(16.0))
    };
    // the pulse transforms vary on the scale x ~ sqrt(1/eta)
    let x_cap = x_cap.map(|c| c.min((eta_min.recip().sqrt()) * R::lit(0.5)));
    let edges = panel_edges(R::zero(), x_hi, &[], x_cap);
    let rule = GaussLegendre::new(16);
    integrate_1d(&integrand, &edges, cfg, &rule)
}

/// Same-pulse contribution of tooth `index`:
/// `coupling^2 * functional_w(tooth, tooth)`.
pub fn local_term<R: Real>(
    index: usize,
    comb: &Comb<R>,
    det: &Detector<R>,
    corr: &StationaryCorrelator<R>,
    cfg: &QuadConfig<R>,
) -> Result<Integral<R>> {
    if index >= comb.teeth {
        return Err(Error::InvalidParameter {
            name: "index",
            reason: format!("tooth {index} of a {}-tooth comb", comb.teeth),
        });
    }
    let tooth = comb.tooth(index);
    let lambda2 = det.coupling * det.coupling;
    let w = functional_w(&tooth, &tooth, det.gap, corr, cfg)?;
    Ok(Integral {
        value: w.value * lambda2,
        err: w.err * lambda2,
    })
}

/// Sum of the cross-pulse functionals over the ordered pair triangle:
/// pairs `(n+m, n)` for `m = 1..N-1`, `n = 0..N-1-m`. Empty for a single
/// tooth.
pub fn nonlocal_correlations<R: Real>(
    comb: &Comb<R>,
    gap: R,
    corr: &StationaryCorrelator<R>,
    cfg: &QuadConfig<R>,
) -> Result<Integral<R>> {
    let n_teeth = comb.teeth;
    if n_teeth < 2 {
        return Ok(Integral::zero());
    }
    let mut pairs = Vec::new();
    for m in 1..n_teeth {
        for n in 0..=(n_teeth - 1 - m) {
            pairs.push((m, n));
        }
    }
    let results: Vec<Result<Integral<R>>> = pairs
        .par_iter()
        .map(|&(m, n)| {
            let late = comb.tooth(n + m);
            let early = comb.tooth(n);
            functional_w(&late, &early, gap, corr, cfg).map_err(|e| Error::PairEvaluation {
                m,
                n,
                lapse: (comb.zeta * R::from_usize(m).unwrap()).as_f64(),
                source: Box::new(e),
            })
        })
        .collect();
    let mut total = Integral::zero();
    for r in results {
        let i = r?;
        total.value += i.value;
        total.err += i.err;
    }
    Ok(total)
}

/// Full excitation probability of the comb, computed both directly (one
/// quadrature over the whole switching function) and through the
/// local/non-local decomposition. The decomposition is returned as the
/// value; the spread between the two routes is folded into the error
/// estimate.
pub fn excitation_probability<R: Real>(
    comb: &Comb<R>,
    det: &Detector<R>,
    corr: &StationaryCorrelator<R>,
    cfg: &QuadConfig<R>,
) -> Result<ProbeOutcome<R>> {
    let lambda2 = det.coupling * det.coupling;
    let mut warnings = Vec::new();
    if let Some(w) = comb.overlap_warning() {
        warnings.push(w);
    }

    // coupling-free functionals first; the coupling scales in at the end
    let raw_locals: Vec<Result<Integral<R>>> = (0..comb.teeth)
        .into_par_iter()
        .map(|l| {
            let tooth = comb.tooth(l);
            functional_w(&tooth, &tooth, det.gap, corr, cfg)
        })
        .collect();
    let mut raw_local_values = Vec::with_capacity(comb.teeth);
    let mut raw_local_sum = R::zero();
    let mut raw_err = R::zero();
    for r in raw_locals {
        let i = r?;
        raw_local_values.push(i.value.re);
        raw_local_sum += i.value.re;
        raw_err += i.err;
    }

    let nonlocal = nonlocal_correlations(comb, det.gap, corr, cfg)?;
    raw_err += nonlocal.err * R::lit(2.0);

    let per_coupling2 = raw_local_sum + R::lit(2.0) * nonlocal.value.re;

    let direct = functional_w(comb, comb, det.gap, corr, cfg)?;
    raw_err += direct.err + (direct.value.re - per_coupling2).abs();

    let total = per_coupling2 * lambda2;
    let direct_total = direct.value.re * lambda2;
    let err = raw_err * lambda2;

    let max_local = raw_local_values
        .iter()
        .fold(R::zero(), |a, &b| a.max(b.abs()))
        * lambda2;
    if max_local >= R::lit(0.1) {
        log::warn!(
            "perturbativity: largest single-tooth probability {:.3e}",
            max_local.as_f64()
        );
        warnings.push(Warning::Perturbativity {
            max_local_probability: max_local.as_f64(),
        });
    }

    Ok(ProbeOutcome {
        total,
        total_per_coupling2: per_coupling2,
        local_terms: raw_local_values.iter().map(|&v| v * lambda2).collect(),
        nonlocal: nonlocal.value,
        direct_total,
        error_estimate: err,
        warnings,
    })
}

/// Shortcut for stationary kernels: `N * P_single + 2 coupling^2 Re
/// sum_m (N - m) W[tooth_m, tooth_0]`. Needs `N` distinct quadratures
/// instead of the full pair triangle.
pub fn stationary_probability<R: Real>(
    comb: &Comb<R>,
    det: &Detector<R>,
    corr: &StationaryCorrelator<R>,
    cfg: &QuadConfig<R>,
) -> Result<ProbeOutcome<R>> {
    if !corr.stationary {
        return Err(Error::ContractViolation(
            "stationary probability requires a stationary correlator".into(),
        ));
    }
    let lambda2 = det.coupling * det.coupling;
    let mut warnings = Vec::new();
    if let Some(w) = comb.overlap_warning() {
        warnings.push(w);
    }
    let n_teeth = comb.teeth;

    let base = comb.tooth(0);
    let single = functional_w(&base, &base, det.gap, corr, cfg)?;
    let mut raw_err = single.err * R::from_usize(n_teeth).unwrap();
    let raw_local = single.value.re;
    let raw_local_sum = raw_local * R::from_usize(n_teeth).unwrap();

    let lags: Vec<usize> = (1..n_teeth).collect();
    let shifted: Vec<Result<Integral<R>>> = lags
        .par_iter()
        .map(|&m| {
            let late = comb.tooth(m);
            functional_w(&late, &base, det.gap, corr, cfg)
        })
        .collect();
    let mut nonlocal = Complex::new(R::zero(), R::zero());
    for (idx, r) in shifted.into_iter().enumerate() {
        let m = lags[idx];
        let i = r?;
        let multiplicity = R::from_usize(n_teeth - m).unwrap();
        nonlocal += i.value * multiplicity;
        raw_err += i.err * multiplicity * R::lit(2.0);
    }

    let per_coupling2 = raw_local_sum + R::lit(2.0) * nonlocal.re;
    let total = per_coupling2 * lambda2;
    let max_local = raw_local.abs() * lambda2;
    if max_local >= R::lit(0.1) {
        warnings.push(Warning::Perturbativity {
            max_local_probability: max_local.as_f64(),
        });
    }

    Ok(ProbeOutcome {
        total,
        total_per_coupling2: per_coupling2,
        local_terms: vec![raw_local * lambda2; n_teeth],
        nonlocal,
        direct_total: total,
        error_estimate: raw_err * lambda2,
        warnings,
    })
}
