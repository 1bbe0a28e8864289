//! Quadrature building blocks: Gauss-Legendre rules, panel integration and an
//! adaptive Gauss-Kronrod integrator used as the independent oracle in tests.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Gauss-Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussRule<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> GaussRule<T> {
    /// Builds the n-point rule by Newton iteration on the Legendre polynomial.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Chebyshev initial guess, then Newton in f64 for full accuracy.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_deriv(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = T::c(-x);
            nodes[n - 1 - i] = T::c(x);
            weights[i] = T::c(w);
            weights[n - 1 - i] = T::c(w);
        }
        GaussRule { nodes, weights }
    }

    /// Integrates `f` over [a, b] with this rule.
    pub fn integrate<F: FnMut(T) -> T>(&self, a: T, b: T, mut f: F) -> T {
        let half = (b - a) * T::c(0.5);
        let mid = (a + b) * T::c(0.5);
        let mut acc = T::zero();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc = acc + *w * f(mid + half * *x);
        }
        acc * half
    }

    /// Integrates `f` over consecutive panels given by `edges`.
    pub fn integrate_panels<F: FnMut(T) -> T>(&self, edges: &[T], mut f: F) -> T {
        let mut acc = KahanSum::new();
        for pair in edges.windows(2) {
            acc.add(self.integrate(pair[0], pair[1], &mut f));
        }
        acc.value()
    }
}

fn legendre_with_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Compensated (Kahan) accumulator for long alternating panel sums.
#[derive(Debug, Clone, Copy)]
pub struct KahanSum<T> {
    sum: T,
    carry: T,
}

impl<T: Real> KahanSum<T> {
    pub fn new() -> Self {
        KahanSum { sum: T::zero(), carry: T::zero() }
    }

    pub fn add(&mut self, x: T) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum
    }
}

impl<T: Real> Default for KahanSum<T> {
    fn default() -> Self {
        Self::new()
    }
}

use std::sync::LazyLock;

static G5: LazyLock<GaussRule<f64>> = LazyLock::new(|| GaussRule::new(5));
static G10: LazyLock<GaussRule<f64>> = LazyLock::new(|| GaussRule::new(10));
static G16: LazyLock<GaussRule<f64>> = LazyLock::new(|| GaussRule::new(16));

/// Cached 5-point Gauss rule.
pub fn g5() -> &'static GaussRule<f64> {
    &G5
}

/// Cached 10-point Gauss rule.
pub fn g10() -> &'static GaussRule<f64> {
    &G10
}

/// Cached 16-point Gauss rule.
pub fn g16() -> &'static GaussRule<f64> {
    &G16
}

/// Inserts refinement edges around `center` at the given scales, clipped to (lo, hi).
pub fn refine_around(edges: &mut Vec<f64>, center: f64, scales: &[f64], lo: f64, hi: f64) {
    for &sc in scales {
        for &e in &[center - sc, center + sc] {
            if e > lo && e < hi {
                edges.push(e);
            }
        }
    }
    if center > lo && center < hi {
        edges.push(center);
    }
}

/// Sorts and deduplicates an edge list in place (minimum gap 1e-13 relative).
pub fn normalize_edges(edges: &mut Vec<f64>) {
    edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
    edges.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * (a.abs() + b.abs() + 1.0));
}

/// Geometrically spaced edges from `a` to `b` (both positive), `n` panels.
pub fn geometric_edges(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(a > 0.0 && b > a && n >= 1);
    let ratio = (b / a).powf(1.0 / n as f64);
    let mut edges = Vec::with_capacity(n + 1);
    let mut x = a;
    edges.push(a);
    for _ in 0..n - 1 {
        x *= ratio;
        edges.push(x);
    }
    edges.push(b);
    edges
}

/// Uniformly spaced edges.
pub fn linear_edges(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
}

// QUADPACK 7-15 Gauss-Kronrod pair.
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

fn gk15<F: FnMut(f64) -> f64>(a: f64, b: f64, f: &mut F) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut res_k = WGK[7] * fc;
    let mut res_g = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(mid - dx);
        let f2 = f(mid + dx);
        res_k += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    (res_k * half, (res_k - res_g).abs() * half)
}

/// Adaptive Gauss-Kronrod integration of `f` over [a, b].
///
/// Bisects the interval with the largest error estimate until the global
/// estimate is below `abs_tol + rel_tol * |I|` or the subdivision budget runs
/// out. Used as the independent oracle against closed forms.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<f64> {
    let mut segments: Vec<(f64, f64, f64, f64)> = Vec::new();
    let (v, e) = gk15(a, b, &mut f);
    segments.push((a, b, v, e));
    for _ in 0..20_000 {
        let total: f64 = segments.iter().map(|s| s.2).sum();
        let err: f64 = segments.iter().map(|s| s.3).sum();
        if err <= abs_tol + rel_tol * total.abs() {
            return Ok(total);
        }
        let (idx, _) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap())
            .unwrap();
        let (sa, sb, _, _) = segments.swap_remove(idx);
        let sm = 0.5 * (sa + sb);
        if sm <= sa || sm >= sb {
            return Err(Error::Accuracy(format!(
                "adaptive quadrature stalled on [{sa}, {sb}]"
            )));
        }
        let left = gk15(sa, sm, &mut f);
        let right = gk15(sm, sb, &mut f);
        segments.push((sa, sm, left.0, left.1));
        segments.push((sm, sb, right.0, right.1));
    }
    Err(Error::Accuracy(
        "adaptive quadrature exhausted its subdivision budget".into(),
    ))
}
