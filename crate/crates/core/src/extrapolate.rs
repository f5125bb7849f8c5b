//! Polynomial extrapolation of convergent sequences to a zero parameter.

use crate::error::Warning;
use crate::real::{Cplx, Real};

/// Neville's algorithm: value at `x = 0` of the polynomial through
/// `(xs[i], ys[i])`. The `xs` must be distinct and positive.
pub fn neville_to_zero<R: Real>(xs: &[R], ys: &[Cplx<R>]) -> Cplx<R> {
    assert_eq!(xs.len(), ys.len());
    assert!(!xs.is_empty());
    let mut t = ys.to_vec();
    let n = xs.len();
    for k in 1..n {
        for i in 0..n - k {
            // P_{i..i+k}(0) = (x_{i+k} P_{i..i+k-1} - x_i P_{i+1..i+k}) / (x_{i+k} - x_i)
            let num = t[i] * xs[i + k] - t[i + 1] * xs[i];
            t[i] = num / (xs[i + k] - xs[i]);
        }
    }
    t[0]
}

/// Real-valued convenience wrapper around [`neville_to_zero`].
pub fn neville_to_zero_real<R: Real>(xs: &[R], ys: &[R]) -> R {
    let cys: Vec<Cplx<R>> = ys.iter().map(|&y| Cplx::new(y, R::zero())).collect();
    neville_to_zero(xs, &cys).re
}

/// Measured convergence order of a sequence `y_i -> L` sampled at strictly
/// decreasing parameters `h_i`: estimated from the last three entries via
/// the ratio of successive differences. Returns `None` when the differences
/// are too small to resolve (already converged).
pub fn measured_order<R: Real>(hs: &[R], ys: &[Cplx<R>]) -> Option<R> {
    let n = hs.len();
    if n < 3 {
        return None;
    }
    let d0 = (ys[n - 2] - ys[n - 3]).norm();
    let d1 = (ys[n - 1] - ys[n - 2]).norm();
    let scale = ys[n - 1].norm().max(R::lit(1e-300));
    if d0 <= scale * R::lit(1e-13) || d1 <= scale * R::lit(1e-13) {
        return None;
    }
    let r = hs[n - 2] / hs[n - 1];
    if r <= R::one() {
        return None;
    }
    Some((d0 / d1).ln() / r.ln())
}

/// Extrapolation of a parameter sweep with order validation.
#[derive(Debug, Clone)]
pub struct SequenceExtrapolation<R> {
    pub value: Cplx<R>,
    pub measured_order: Option<R>,
    pub used_order: usize,
    pub warnings: Vec<Warning>,
}

/// Extrapolate `ys -> L` as `hs -> 0`, assuming a leading error of
/// `h^assumed_order`. The assumption is checked against the measured order
/// from the deepest differences; a clear contradiction of second order
/// drops to first. Error sequences that do not shrink monotonically toward
/// the extrapolant are flagged, not rejected.
pub fn extrapolate_sequence<R: Real>(
    hs: &[R],
    ys: &[Cplx<R>],
    assumed_order: usize,
) -> SequenceExtrapolation<R> {
    assert!(hs.len() == ys.len() && !hs.is_empty());
    let last = ys[ys.len() - 1];
    let spread = ys
        .iter()
        .map(|v| (*v - last).norm())
        .fold(R::zero(), |a, b| a.max(b));
    if spread <= last.norm().max(R::lit(1e-300)) * R::lit(1e-12) {
        // already converged; nothing to extrapolate
        return SequenceExtrapolation {
            value: last,
            measured_order: None,
            used_order: assumed_order,
            warnings: Vec::new(),
        };
    }
    let mut warnings = Vec::new();
    let measured = measured_order(hs, ys);
    let mut used_order = assumed_order;
    if let Some(p) = measured {
        if assumed_order == 2 && p < R::lit(1.5) {
            used_order = 1;
            warnings.push(Warning::FirstOrderFallback {
                measured_order: p.as_f64(),
            });
        }
    }
    let xs: Vec<R> = hs.iter().map(|&h| h.powi(used_order as i32)).collect();
    let value = neville_to_zero(&xs, ys);
    let errs: Vec<R> = ys.iter().map(|y| (*y - value).norm()).collect();
    if errs.windows(2).any(|w| w[1] >= w[0]) {
        warnings.push(Warning::NonMonotoneSweep);
    }
    SequenceExtrapolation {
        value,
        measured_order: measured,
        used_order,
        warnings,
    }
}

/// Richardson extrapolation of a regulator-dependent quantity to zero
/// regulator, evaluated at `eps0`, `eps0/2`, `eps0/4` and assuming an
/// analytic dependence (leading error linear in the regulator).
pub fn richardson_eps<R, F>(mut f: F, eps0: R) -> Cplx<R>
where
    R: Real,
    F: FnMut(R) -> Cplx<R>,
{
    let half = R::lit(0.5);
    let xs = [eps0, eps0 * half, eps0 * half * half];
    let ys = [f(xs[0]), f(xs[1]), f(xs[2])];
    neville_to_zero(&xs, &ys)
}
