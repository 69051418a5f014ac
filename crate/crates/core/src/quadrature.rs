//! Adaptive one-dimensional Gauss-Legendre quadrature.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Nodes and weights of the n-point Gauss-Legendre rule on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

const ORDER: usize = 20;
const MAX_DEPTH: u32 = 40;

fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(ORDER))
}

fn panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let (x, w) = rule();
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    half * x.iter().zip(w).map(|(xi, wi)| wi * f(mid + half * xi)).sum::<f64>()
}

/// Tolerances and starting subdivision for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Number of equal panels the interval is split into before refinement.
    pub initial_panels: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            initial_panels: 8,
        }
    }
}

/// ∫_a^b f(x) dx with 20-point panels, bisecting any panel whose estimate
/// disagrees with the sum of its halves by more than its share of the
/// tolerance.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: &QuadratureOptions) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Quadrature {
            lower: a,
            upper: b,
            error: f64::INFINITY,
        });
    }
    let n = opts.initial_panels.max(1);
    let h = (b - a) / n as f64;
    let coarse: Vec<f64> = (0..n)
        .map(|i| panel(&f, a + i as f64 * h, a + (i + 1) as f64 * h))
        .collect();
    let scale: f64 = coarse.iter().map(|v| v.abs()).sum();
    let tol = (opts.rel_tol * scale).max(opts.abs_tol);

    let mut total = 0.0;
    let mut worst = 0.0f64;
    let mut stack: Vec<(f64, f64, f64, u32)> = coarse
        .iter()
        .enumerate()
        .map(|(i, &v)| (a + i as f64 * h, a + (i + 1) as f64 * h, v, 0))
        .collect();
    while let Some((lo, hi, whole, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = panel(&f, lo, mid);
        let right = panel(&f, mid, hi);
        let err = (left + right - whole).abs();
        let share = tol * (hi - lo) / (b - a);
        if err <= share.max(f64::EPSILON * (left.abs() + right.abs())) {
            total += left + right;
        } else if depth >= MAX_DEPTH {
            worst = worst.max(err);
            total += left + right;
        } else {
            stack.push((lo, mid, left, depth + 1));
            stack.push((mid, hi, right, depth + 1));
        }
    }
    if !total.is_finite() || worst > tol {
        return Err(Error::Quadrature {
            lower: a,
            upper: b,
            error: if total.is_finite() { worst } else { f64::INFINITY },
        });
    }
    Ok(total)
}
