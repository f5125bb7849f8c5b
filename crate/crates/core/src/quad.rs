//! Adaptive Gauss-Legendre quadrature for complex-valued integrands, in one
//! and two dimensions.
//!
//! Panels are bisected greedily by local error estimate (coarse rule vs the
//! sum over sub-panels) until the accumulated estimate meets the requested
//! tolerance or the depth cap is reached. Callers pre-split panels at known
//! structure: tooth windows, oscillation wavelengths, regulator scales.

use crate::error::{Error, Result};
use crate::real::{Cplx, Real};
use num_complex::Complex;

/// Gauss-Legendre rule on `[-1, 1]`.
///
/// Nodes are found by Newton iteration on the Legendre polynomial, so the
/// rule is available at machine precision for any scalar type and order.
#[derive(Debug, Clone)]
pub struct GaussLegendre<R> {
    nodes: Vec<R>,
    weights: Vec<R>,
}

impl<R: Real> GaussLegendre<R> {
    pub fn new(order: usize) -> Self {
        assert!(order >= 2);
        let mut nodes = vec![R::zero(); order];
        let mut weights = vec![R::zero(); order];
        let n = R::from_usize(order).unwrap();
        for i in 0..order {
            // Tricomi initial guess
            let k = R::from_usize(i).unwrap();
            let mut x = (R::PI() * (k + R::lit(0.75)) / (n + R::lit(0.5))).cos();
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(order, x);
                let dx = p / d;
                x -= dx;
                if dx.abs() <= R::epsilon() * (R::one() + x.abs()) {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(order, x);
            nodes[i] = x;
            weights[i] = R::lit(2.0) / ((R::one() - x * x) * dp * dp);
        }
        GaussLegendre { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Integrate `f` over `[a, b]`.
    pub fn integrate<F>(&self, f: &F, a: R, b: R) -> Cplx<R>
    where
        F: Fn(R) -> Cplx<R>,
    {
        self.integrate_with_abs(f, a, b).0
    }

    /// Integral plus the integral of `|f|`, for rounding-floor estimates.
    pub fn integrate_with_abs<F>(&self, f: &F, a: R, b: R) -> (Cplx<R>, R)
    where
        F: Fn(R) -> Cplx<R>,
    {
        let half = (b - a) * R::lit(0.5);
        let mid = (a + b) * R::lit(0.5);
        let mut acc = Complex::new(R::zero(), R::zero());
        let mut mass = R::zero();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let v = f(mid + half * *x) * *w;
            mass += v.norm();
            acc += v;
        }
        (acc * half, mass * half.abs())
    }

    /// Tensor-product integral of `f` over the rectangle.
    pub fn integrate_rect<F>(&self, f: &F, ax: R, bx: R, ay: R, by: R) -> Cplx<R>
    where
        F: Fn(R, R) -> Cplx<R>,
    {
        self.integrate_rect_with_abs(f, ax, bx, ay, by).0
    }

    /// Rectangle integral plus the integral of `|f|`.
    pub fn integrate_rect_with_abs<F>(
        &self,
        f: &F,
        ax: R,
        bx: R,
        ay: R,
        by: R,
    ) -> (Cplx<R>, R)
    where
        F: Fn(R, R) -> Cplx<R>,
    {
        let hx = (bx - ax) * R::lit(0.5);
        let mx = (ax + bx) * R::lit(0.5);
        let hy = (by - ay) * R::lit(0.5);
        let my = (ay + by) * R::lit(0.5);
        let mut acc = Complex::new(R::zero(), R::zero());
        let mut mass = R::zero();
        for (x, wx) in self.nodes.iter().zip(&self.weights) {
            let tx = mx + hx * *x;
            let mut row = Complex::new(R::zero(), R::zero());
            let mut row_mass = R::zero();
            for (y, wy) in self.nodes.iter().zip(&self.weights) {
                let v = f(tx, my + hy * *y) * *wy;
                row_mass += v.norm();
                row += v;
            }
            acc += row * *wx;
            mass += row_mass * wx.abs();
        }
        (acc * (hx * hy), mass * (hx * hy).abs())
    }
}

fn legendre_with_derivative<R: Real>(order: usize, x: R) -> (R, R) {
    let mut p0 = R::one();
    let mut p1 = x;
    for k in 2..=order {
        let kf = R::from_usize(k).unwrap();
        let p2 = ((R::lit(2.0) * kf - R::one()) * x * p1 - (kf - R::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = R::from_usize(order).unwrap() * (x * p1 - p0) / (x * x - R::one());
    (p1, d)
}

/// Tolerances and budgets for the adaptive drivers.
#[derive(Debug, Clone)]
pub struct QuadConfig<R> {
    pub rel_tol: R,
    pub abs_tol: R,
    pub max_depth: usize,
    pub max_panels: usize,
}

impl<R: Real> QuadConfig<R> {
    pub fn standard() -> Self {
        QuadConfig {
            rel_tol: R::lit(1e-9),
            abs_tol: R::lit(1e-13),
            max_depth: 12,
            max_panels: 20_000,
        }
    }

    pub fn with_rel_tol(mut self, rel_tol: R) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: R) -> Self {
        self.abs_tol = abs_tol;
        self
    }
}

/// Value and accumulated error estimate of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Integral<R> {
    pub value: Cplx<R>,
    pub err: R,
}

impl<R: Real> Integral<R> {
    pub fn zero() -> Self {
        Integral {
            value: Complex::new(R::zero(), R::zero()),
            err: R::zero(),
        }
    }
}

/// Build sorted panel edges covering `[lo, hi]`, incorporating interior
/// split hints and an optional cap on panel width.
pub fn panel_edges<R: Real>(lo: R, hi: R, splits: &[R], max_width: Option<R>) -> Vec<R> {
    assert!(hi > lo);
    let mut edges = vec![lo, hi];
    for &s in splits {
        if s > lo && s < hi {
            edges.push(s);
        }
    }
    edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let span = hi - lo;
    edges.dedup_by(|a, b| (*a - *b).abs() < span * R::lit(1e-13));
    if let Some(w) = max_width {
        if w > R::zero() {
            let mut refined = Vec::with_capacity(edges.len());
            for pair in edges.windows(2) {
                let (a, b) = (pair[0], pair[1]);
                refined.push(a);
                let gap = b - a;
                if gap > w {
                    let n = (gap / w).ceil().to_usize().unwrap_or(1).max(1);
                    let step = gap / R::from_usize(n).unwrap();
                    for k in 1..n {
                        refined.push(a + step * R::from_usize(k).unwrap());
                    }
                }
            }
            refined.push(hi);
            edges = refined;
        }
    }
    edges
}

struct Panel<R> {
    a: R,
    b: R,
    fine: Cplx<R>,
    mass: R,
    err: R,
    depth: usize,
}

/// Adaptive integration of a complex integrand over the panels defined by
/// `edges` (must be sorted, ascending, length >= 2).
pub fn integrate_1d<R, F>(
    f: &F,
    edges: &[R],
    cfg: &QuadConfig<R>,
    rule: &GaussLegendre<R>,
) -> Result<Integral<R>>
where
    R: Real,
    F: Fn(R) -> Cplx<R>,
{
    assert!(edges.len() >= 2);
    let eval = |a: R, b: R| -> Result<(Cplx<R>, R, R)> {
        let coarse = rule.integrate(f, a, b);
        let m = (a + b) * R::lit(0.5);
        let (left, lmass) = rule.integrate_with_abs(f, a, m);
        let (right, rmass) = rule.integrate_with_abs(f, m, b);
        let fine = left + right;
        if !fine.re.is_finite() || !fine.im.is_finite() {
            return Err(Error::Domain(format!(
                "non-finite integrand on panel [{}, {}]",
                a.as_f64(),
                b.as_f64()
            )));
        }
        Ok((fine, lmass + rmass, (fine - coarse).norm()))
    };

    let mut panels: Vec<Panel<R>> = Vec::new();
    for pair in edges.windows(2) {
        let (fine, mass, err) = eval(pair[0], pair[1])?;
        panels.push(Panel {
            a: pair[0],
            b: pair[1],
            fine,
            mass,
            err,
            depth: 0,
        });
    }

    loop {
        let mut total = Complex::new(R::zero(), R::zero());
        let mut total_err = R::zero();
        let mut total_mass = R::zero();
        for p in &panels {
            total += p.fine;
            total_err += p.err;
            total_mass += p.mass;
        }
        // the rounding floor: cancellation noise the subdivision cannot beat
        let floor = R::epsilon() * R::lit(32.0) * total_mass;
        let tol = cfg.abs_tol.max(cfg.rel_tol * total.norm()).max(floor);
        if total_err <= tol {
            return Ok(Integral {
                value: total,
                err: total_err,
            });
        }
        // worst refinable panel; deterministic scan order
        let mut worst: Option<usize> = None;
        for (i, p) in panels.iter().enumerate() {
            if p.depth >= cfg.max_depth {
                continue;
            }
            match worst {
                None => worst = Some(i),
                Some(j) if p.err > panels[j].err => worst = Some(i),
                _ => {}
            }
        }
        let Some(i) = worst else {
            return Err(Error::QuadratureNonConvergence {
                best_re: total.re.as_f64(),
                best_im: total.im.as_f64(),
                residual: total_err.as_f64(),
            });
        };
        if panels.len() >= cfg.max_panels {
            return Err(Error::QuadratureNonConvergence {
                best_re: total.re.as_f64(),
                best_im: total.im.as_f64(),
                residual: total_err.as_f64(),
            });
        }
        let Panel { a, b, depth, .. } = panels[i];
        let m = (a + b) * R::lit(0.5);
        let (fl, ml, el) = eval(a, m)?;
        let (fr, mr, er) = eval(m, b)?;
        panels[i] = Panel {
            a,
            b: m,
            fine: fl,
            mass: ml,
            err: el,
            depth: depth + 1,
        };
        panels.push(Panel {
            a: m,
            b,
            fine: fr,
            mass: mr,
            err: er,
            depth: depth + 1,
        });
    }
}

struct Rect<R> {
    ax: R,
    bx: R,
    ay: R,
    by: R,
    quadrants: [Cplx<R>; 4],
    fine: Cplx<R>,
    mass: R,
    err: R,
    depth: usize,
}

/// Adaptive tensor-product integration over the grid of initial rectangles
/// spanned by `x_edges` x `y_edges`. Refinement splits the worst rectangle
/// into its four quadrants, reusing the quadrant estimates already computed.
pub fn integrate_2d<R, F>(
    f: &F,
    x_edges: &[R],
    y_edges: &[R],
    cfg: &QuadConfig<R>,
    rule: &GaussLegendre<R>,
) -> Result<Integral<R>>
where
    R: Real,
    F: Fn(R, R) -> Cplx<R>,
{
    assert!(x_edges.len() >= 2 && y_edges.len() >= 2);
    let make = |ax: R, bx: R, ay: R, by: R, coarse: Cplx<R>, depth: usize| -> Result<Rect<R>> {
        let mx = (ax + bx) * R::lit(0.5);
        let my = (ay + by) * R::lit(0.5);
        let q0 = rule.integrate_rect_with_abs(f, ax, mx, ay, my);
        let q1 = rule.integrate_rect_with_abs(f, mx, bx, ay, my);
        let q2 = rule.integrate_rect_with_abs(f, ax, mx, my, by);
        let q3 = rule.integrate_rect_with_abs(f, mx, bx, my, by);
        let q = [q0.0, q1.0, q2.0, q3.0];
        let fine = q[0] + q[1] + q[2] + q[3];
        if !fine.re.is_finite() || !fine.im.is_finite() {
            return Err(Error::Domain(format!(
                "non-finite integrand on rectangle [{},{}]x[{},{}]",
                ax.as_f64(),
                bx.as_f64(),
                ay.as_f64(),
                by.as_f64()
            )));
        }
        Ok(Rect {
            ax,
            bx,
            ay,
            by,
            quadrants: q,
            fine,
            mass: q0.1 + q1.1 + q2.1 + q3.1,
            err: (fine - coarse).norm(),
            depth,
        })
    };

    let mut rects: Vec<Rect<R>> = Vec::new();
    for xw in x_edges.windows(2) {
        for yw in y_edges.windows(2) {
            let coarse = rule.integrate_rect(f, xw[0], xw[1], yw[0], yw[1]);
            rects.push(make(xw[0], xw[1], yw[0], yw[1], coarse, 0)?);
        }
    }

    loop {
        let mut total = Complex::new(R::zero(), R::zero());
        let mut total_err = R::zero();
        let mut total_mass = R::zero();
        for r in &rects {
            total += r.fine;
            total_err += r.err;
            total_mass += r.mass;
        }
        let floor = R::epsilon() * R::lit(32.0) * total_mass;
        let tol = cfg.abs_tol.max(cfg.rel_tol * total.norm()).max(floor);
        if total_err <= tol {
            return Ok(Integral {
                value: total,
                err: total_err,
            });
        }
        let mut worst: Option<usize> = None;
        for (i, r) in rects.iter().enumerate() {
            if r.depth >= cfg.max_depth {
                continue;
            }
            match worst {
                None => worst = Some(i),
                Some(j) if r.err > rects[j].err => worst = Some(i),
                _ => {}
            }
        }
        let Some(i) = worst else {
            return Err(Error::QuadratureNonConvergence {
                best_re: total.re.as_f64(),
                best_im: total.im.as_f64(),
                residual: total_err.as_f64(),
            });
        };
        if rects.len() + 3 >= cfg.max_panels {
            return Err(Error::QuadratureNonConvergence {
                best_re: total.re.as_f64(),
                best_im: total.im.as_f64(),
                residual: total_err.as_f64(),
            });
        }
        let Rect {
            ax,
            bx,
            ay,
            by,
            quadrants,
            depth,
            ..
        } = rects[i];
        let mx = (ax + bx) * R::lit(0.5);
        let my = (ay + by) * R::lit(0.5);
        let children = [
            (ax, mx, ay, my, quadrants[0]),
            (mx, bx, ay, my, quadrants[1]),
            (ax, mx, my, by, quadrants[2]),
            (mx, bx, my, by, quadrants[3]),
        ];
        let mut first = true;
        for (cax, cbx, cay, cby, coarse) in children {
            let rect = make(cax, cbx, cay, cby, coarse, depth + 1)?;
            if first {
                rects[i] = rect;
                first = false;
            } else {
                rects.push(rect);
            }
        }
    }
}
