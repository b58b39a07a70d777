//! Numerical integration used by the CIR evaluators.

use std::f64::consts::PI;

use num_complex::Complex64;

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Nodes by Newton iteration on `P_n` from the Chebyshev initial guess.
pub fn gauss_legendre(n: usize) -> GaussLegendre {
    assert!(n >= 1, "Gauss-Legendre order must be >= 1");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    GaussLegendre { nodes, weights }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

impl GaussLegendre {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// `(node, weight)` pairs mapped to `[a, b]`.
    pub fn nodes_on(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.nodes_on(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    /// Order (or panel count) at which the estimate was accepted.
    pub order: usize,
    pub converged: bool,
}

/// Tensor-product Gauss-Legendre over `[ax, bx] x [ay, by]`, doubling the
/// order from `start` until successive estimates agree to `rel_tol`.
pub fn adaptive_gl_2d<F>(
    f: F,
    (ax, bx): (f64, f64),
    (ay, by): (f64, f64),
    start: usize,
    max_order: usize,
    rel_tol: f64,
) -> Estimate<f64>
where
    F: Fn(f64, f64) -> f64,
{
    let eval = |n: usize| {
        let rule = gauss_legendre(n);
        let mut acc = 0.0;
        for (x, wx) in rule.nodes_on(ax, bx) {
            for (y, wy) in rule.nodes_on(ay, by) {
                acc += wx * wy * f(x, y);
            }
        }
        acc
    };
    let mut n = start.max(1);
    let mut prev = eval(n);
    while n < max_order {
        n *= 2;
        let cur = eval(n);
        let scale = cur.abs().max(prev.abs());
        if scale == 0.0 || (cur - prev).abs() <= rel_tol * scale {
            return Estimate {
                value: cur,
                order: n,
                converged: true,
            };
        }
        prev = cur;
    }
    Estimate {
        value: prev,
        order: n,
        converged: false,
    }
}

/// Adaptive Simpson for complex integrands.
///
/// The interval is first split into `panels` equal pieces so oscillatory
/// integrands are resolved before the local error test kicks in. The error
/// threshold is `rel_tol` times the running `L1` norm of the integrand, which
/// avoids chasing cancellation in strongly oscillating integrals.
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, panels: usize, rel_tol: f64) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    if b <= a {
        return Complex64::new(0.0, 0.0);
    }
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;

    // Coarse pass for the L1 scale.
    let mut samples = Vec::with_capacity(2 * panels + 1);
    for i in 0..=2 * panels {
        let x = a + 0.5 * h * i as f64;
        samples.push(f(x));
    }
    let l1: f64 = samples
        .windows(3)
        .step_by(2)
        .map(|w| h / 6.0 * (w[0].norm() + 4.0 * w[1].norm() + w[2].norm()))
        .sum();
    if l1 == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let abs_tol = rel_tol * l1 / panels as f64;

    let mut total = Complex64::new(0.0, 0.0);
    for i in 0..panels {
        let x0 = a + h * i as f64;
        let (f0, fm, f1) = (samples[2 * i], samples[2 * i + 1], samples[2 * i + 2]);
        let whole = (f0 + fm * 4.0 + f1) * (h / 6.0);
        total += simpson_step(&f, x0, x0 + h, f0, fm, f1, whole, abs_tol, 40);
    }
    total
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: Complex64,
    fm: Complex64,
    fb: Complex64,
    whole: Complex64,
    tol: f64,
    depth: u32,
) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let h = b - a;
    let left = (fa + flm * 4.0 + fm) * (h / 12.0);
    let right = (fm + frm * 4.0 + fb) * (h / 12.0);
    let diff = left + right - whole;
    if depth == 0 || diff.norm() <= 15.0 * tol {
        return left + right + diff / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}
