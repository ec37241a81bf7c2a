//! Gauss quadrature rules used by the kernel integrals.
//!
//! Gauss–Legendre nodes and weights are computed once per order by Newton
//! iteration on the Legendre recurrence and memoized process-wide; the
//! integrands downstream are smooth on each panel, so composite rules over
//! graded panels give near machine precision even when the integrand has a
//! sharp peak at a panel edge.

use once_cell::sync::Lazy;
use std::collections::HashMap;
use std::sync::RwLock;

/// Nodes and weights of the `order`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

static GL_CACHE: Lazy<RwLock<HashMap<usize, GaussLegendre>>> =
    Lazy::new(|| RwLock::new(HashMap::new()));

/// Legendre polynomial P_n and derivative P_n' at `x` via the three-term
/// recurrence.
fn legendre_and_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 2..=n {
        let kf = k as f64;
        let p_next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
        p_prev = p;
        p = p_next;
    }
    let dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

fn compute_gauss_legendre(order: usize) -> GaussLegendre {
    assert!(order >= 1, "Gauss-Legendre order must be at least 1");
    if order == 1 {
        return GaussLegendre { nodes: vec![0.0], weights: vec![2.0] };
    }
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess for the i-th root (descending), then Newton.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_and_deriv(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_and_deriv(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    GaussLegendre { nodes, weights }
}

/// The memoized `order`-point Gauss–Legendre rule.
pub fn gauss_legendre(order: usize) -> GaussLegendre {
    if let Some(rule) = GL_CACHE.read().expect("quadrature cache poisoned").get(&order) {
        return rule.clone();
    }
    let rule = compute_gauss_legendre(order);
    GL_CACHE
        .write()
        .expect("quadrature cache poisoned")
        .insert(order, rule.clone());
    rule
}

/// Integrate `f` over `[a, b]` with the `order`-point Gauss–Legendre rule.
pub fn integrate_gl(f: impl Fn(f64) -> f64, a: f64, b: f64, order: usize) -> f64 {
    let rule = gauss_legendre(order);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = 0.0;
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Integrate `f` over consecutive panels `[edges[k], edges[k+1]]` with the
/// `order`-point rule on each panel.
pub fn integrate_gl_panels(f: impl Fn(f64) -> f64, edges: &[f64], order: usize) -> f64 {
    let mut acc = 0.0;
    for pair in edges.windows(2) {
        acc += integrate_gl(&f, pair[0], pair[1], order);
    }
    acc
}

/// Panel edges on `[-1, 1]` graded dyadically toward the right endpoint:
/// `[-1, 0, 1 - 2^-1, ..., 1 - 2^-levels, 1]`.
///
/// Kernel integrands in the tau variable develop a sharp peak at `tau = 1`
/// as the source approaches the target ring; dyadic grading keeps each panel
/// resolvable at fixed order.
pub fn graded_edges_toward_one(levels: u32) -> Vec<f64> {
    let mut edges = Vec::with_capacity(levels as usize + 3);
    edges.push(-1.0);
    for k in 0..=levels {
        edges.push(1.0 - 2.0f64.powi(-(k as i32)));
    }
    edges.push(1.0);
    edges
}

/// Panel edges on `[0, pi]` graded dyadically toward `theta = 0`:
/// `[0, pi 2^-levels-ish, ..., pi/2, pi]` in increasing order.
pub fn graded_edges_toward_zero_on_pi(levels: u32) -> Vec<f64> {
    let mut edges = Vec::with_capacity(levels as usize + 2);
    edges.push(0.0);
    for k in (0..=levels).rev() {
        edges.push(std::f64::consts::PI * 2.0f64.powi(-(k as i32 + 1)));
    }
    edges.push(std::f64::consts::PI);
    edges
}

/// Gauss–Chebyshev (first kind) rule: integrates
/// `f(tau) / sqrt(1 - tau^2)` over `[-1, 1]` exactly for polynomial `f` of
/// degree `< 2 order`. Nodes `cos((2k - 1) pi / (2 n))`, uniform weight
/// `pi / n`.
pub fn integrate_gauss_chebyshev(f: impl Fn(f64) -> f64, order: usize) -> f64 {
    let n = order as f64;
    let w = std::f64::consts::PI / n;
    let mut acc = 0.0;
    for k in 1..=order {
        let tau = (std::f64::consts::PI * (2.0 * k as f64 - 1.0) / (2.0 * n)).cos();
        acc += f(tau);
    }
    acc * w
}
