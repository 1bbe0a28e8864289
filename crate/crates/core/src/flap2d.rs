//! Two-dimensional fractional Laplacian of recovery fields.
//!
//! For circle-centered (radial) fields the operator is evaluated as the 1D
//! profile operator along the normal plus a well-conditioned relative
//! integral: the kernel-reduction identity makes the flat comparison exact,
//! so the O(eps^{-2s}) singular parts never meet in floating point. A direct
//! polar second-difference path serves as the independent cross-check and
//! handles generic fields.

use crate::constants::{eta, EtaSpec};
use crate::error::{Error, Result};
use crate::field::RecoveryField;
use crate::geometry::{CurveKind, Vec2};
use crate::profile::flap_profile_any;
use crate::quad::{g10, g16, geometric_edges, normalize_edges, refine_around};
use crate::special::{gamma_ds, gamma_fn};

const PI: f64 = std::f64::consts::PI;

/// `Itilde(0) = sqrt(pi)/2 Gamma(s + 1/2) / Gamma(s + 1)`; satisfies
/// `gamma_{1,s} = 2 gamma_{2,s} Itilde(0)`.
fn itilde0(s: f64) -> f64 {
    0.5 * PI.sqrt() * gamma_fn(s + 0.5).expect("s > 0") / gamma_fn(s + 1.0).expect("s > 0")
}

/// `Itilde(m) - Itilde(0)` by a single quadrature of the difference, stable
/// down to m = 0.
fn itilde_delta(m: f64, s: f64) -> f64 {
    let m2 = m * m;
    let mm = m.max(1.0);
    let panels = 26 + (2.2 * mm.ln()) as usize;
    let mut edges = vec![0.0, PI / 2.0];
    edges.extend(geometric_edges(PI / (2.0 * 1e7 * mm), PI / 4.0, panels));
    // the integrand has a cos^{2s} endpoint at pi/2; grade toward it too
    for e in geometric_edges(PI * 1e-12, PI / 4.0, 26) {
        edges.push(PI / 2.0 - e);
    }
    normalize_edges(&mut edges);
    g16().integrate_panels(&edges, |psi| {
        let tn = psi.tan();
        let t2 = tn * tn;
        let sec2 = 1.0 + t2;
        let base = (1.0 + t2).powf(-1.0 - s);
        // pert/base = exp(s ln(1 + m^2 t^2) - (1+s) ln(1 + m^2 t^2/(1+t^2)));
        // the log-difference form stays fully accurate as m -> 0
        let g = s * (m2 * t2).ln_1p() - (1.0 + s) * (m2 * t2 / (1.0 + t2)).ln_1p();
        base * g.exp_m1() * sec2
    })
}

/// Interpolation table for `Delta Itilde(m) / (m^2 / (1 + m^2))` over a
/// uniform grid in `ln m`; the scaled ratio is smooth and O(1), so cubic
/// interpolation reproduces the kernel to ~1e-10 relative.
struct ItildeTable {
    x_lo: f64,
    step: f64,
    ratio: Vec<f64>,
}

const ITILDE_X_LO: f64 = -21.0;
const ITILDE_X_HI: f64 = 12.0;
const ITILDE_STEP: f64 = 0.01;

impl ItildeTable {
    fn build(s: f64) -> Self {
        let n = ((ITILDE_X_HI - ITILDE_X_LO) / ITILDE_STEP).round() as usize;
        let ratio = (0..=n)
            .map(|i| {
                let m = (ITILDE_X_LO + ITILDE_STEP * i as f64).exp();
                itilde_delta(m, s) / (m * m / (1.0 + m * m))
            })
            .collect();
        ItildeTable { x_lo: ITILDE_X_LO, step: ITILDE_STEP, ratio }
    }

    fn delta(&self, m: f64) -> f64 {
        let scale = m * m / (1.0 + m * m);
        let x = m.ln();
        let n = self.ratio.len() - 1;
        if x <= self.x_lo {
            return self.ratio[0] * scale;
        }
        let t = (x - self.x_lo) / self.step;
        let i = (t.floor() as usize).clamp(1, n - 2);
        let u = t - i as f64;
        let v = &self.ratio[i - 1..=i + 2];
        // 4-point Lagrange around the cell [i, i+1]
        let l0 = -u * (u - 1.0) * (u - 2.0) / 6.0;
        let l1 = (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0;
        let l2 = -(u + 1.0) * u * (u - 2.0) / 2.0;
        let l3 = (u + 1.0) * u * (u - 1.0) / 6.0;
        (v[0] * l0 + v[1] * l1 + v[2] * l2 + v[3] * l3) * scale
    }
}

static ITILDE_TABLES: std::sync::LazyLock<
    std::sync::Mutex<std::collections::HashMap<u64, std::sync::Arc<ItildeTable>>>,
> = std::sync::LazyLock::new(|| std::sync::Mutex::new(std::collections::HashMap::new()));

fn itilde_table(s: f64) -> std::sync::Arc<ItildeTable> {
    let key = s.to_bits();
    let mut map = ITILDE_TABLES.lock().unwrap();
    map.entry(key).or_insert_with(|| std::sync::Arc::new(ItildeTable::build(s))).clone()
}

#[cfg_attr(not(test), allow(dead_code))]
fn itilde(m: f64, s: f64) -> f64 {
    itilde0(s) + itilde_delta(m, s)
}

/// Radial angular kernel: `r' A(r0, r') = 2 sqrt(r'/r0) Itilde(m) t^{-1-2s}`
/// with `t = |r' - r0|` and `m = t / (2 sqrt(r0 r'))`.
pub(crate) struct RadialKernel {
    s: f64,
    gamma1: f64,
    gamma2: f64,
    i0: f64,
    table: std::sync::Arc<ItildeTable>,
    r0: f64,
}

impl RadialKernel {
    pub(crate) fn new(s: f64, r0: f64) -> Self {
        RadialKernel {
            s,
            gamma1: gamma_ds(1, s).expect("s in (0,1)"),
            gamma2: gamma_ds(2, s).expect("s in (0,1)"),
            i0: itilde0(s),
            table: itilde_table(s),
            r0,
        }
    }

    fn itilde_at(&self, m: f64) -> (f64, f64) {
        // (Itilde(m), Delta Itilde(m)); asymptotic branch for very large m
        if m.ln() > ITILDE_X_HI {
            let v = 0.5 * PI / m;
            (v, v - self.i0)
        } else {
            let d = self.table.delta(m);
            (self.i0 + d, d)
        }
    }

    /// `gamma_2 r' A(r0, r')` for r' > 0.
    pub(crate) fn rk(&self, rp: f64, t: f64) -> f64 {
        let m = t / (2.0 * (self.r0 * rp).sqrt());
        2.0 * self.gamma2 * (rp / self.r0).sqrt() * self.itilde_at(m).0
            * t.powf(-1.0 - 2.0 * self.s)
    }

    /// `r r' A(r, r')`: the symmetric pair kernel of the Gagliardo seminorm.
    pub(crate) fn pair(&self, rp: f64, t: f64) -> f64 {
        let m = t / (2.0 * (self.r0 * rp).sqrt());
        2.0 * (self.r0 * rp).sqrt() * self.itilde_at(m).0 * t.powf(-1.0 - 2.0 * self.s)
    }

    /// `gamma_2 r' A(r0, r') - gamma_1 t^{-1-2s}`, evaluated without
    /// cancellation: the bracket vanishes linearly as r' -> r0.
    fn kd(&self, rp: f64, t: f64) -> f64 {
        let m = t / (2.0 * (self.r0 * rp).sqrt());
        let ratio_m1 = (rp - self.r0) / (self.r0.sqrt() * (rp.sqrt() + self.r0.sqrt()));
        let (iv, di) = self.itilde_at(m);
        2.0 * self.gamma2 * (ratio_m1 * iv + di) * t.powf(-1.0 - 2.0 * self.s)
    }
}

/// Geometry of a radial evaluation: the circle parameters and the profile
/// comparison along the normal.
struct RadialEval<'a> {
    field: &'a RecoveryField,
    kernel: RadialKernel,
    radius: f64,
    r0: f64,
    z0: f64,
    eps: f64,
}

impl<'a> RadialEval<'a> {
    fn new(field: &'a RecoveryField, r0: f64) -> Self {
        let radius = match field.sd.curve.kind {
            CurveKind::Circle { radius } => radius,
            CurveKind::Ellipse { .. } => unreachable!("radial path requires a circle"),
        };
        RadialEval {
            field,
            kernel: RadialKernel::new(field.s(), r0),
            radius,
            r0,
            z0: radius - r0,
            eps: field.epsilon,
        }
    }

    /// Flat comparison `w_eps(z0 + zeta)`.
    fn w_flat(&self, zeta: f64) -> f64 {
        self.field.profile.value((self.z0 + zeta) / self.eps)
    }

    /// Deviation of the actual radial field from the flat comparison at r',
    /// zero wherever the smoothed distance equals the true distance.
    fn dev(&self, rp: f64) -> f64 {
        let d = self.radius - rp;
        if d.abs() <= 4.0 * self.field.sd.delta {
            0.0
        } else {
            self.field.value_of_distance(d) - self.field.profile.value(d / self.eps)
        }
    }

    /// Combined integrand of the relative integral at offset t > 0:
    /// both radial sides r' = r0 -+ t minus both flat sides z0 +- t.
    fn paired(&self, t: f64) -> f64 {
        let w0 = self.w_flat(0.0);
        let mut acc = 0.0;
        for (sign, zeta) in [(-1.0, t), (1.0, -t)] {
            let rp = self.r0 + sign * t;
            let wdiff = w0 - self.w_flat(zeta);
            if rp > 0.0 {
                acc += wdiff * self.kernel.kd(rp, t)
                    + (self.dev(self.r0) - self.dev(rp)) * self.kernel.rk(rp, t);
            } else {
                acc -= wdiff
                    * self.kernel.gamma1
                    * t.powf(-1.0 - 2.0 * self.s())
            }
        }
        acc
    }

    fn s(&self) -> f64 {
        self.field.s()
    }
}

/// Relative integral `(-Delta)^s u(x0) - (-d_zz)^s w_eps(z0)` for a radial
/// recovery field evaluated at radius r0.
fn b_rel_radial(field: &RecoveryField, r0: f64) -> f64 {
    let ev = RadialEval::new(field, r0);
    let s = ev.s();
    let eps = ev.eps;
    let delta = field.sd.delta;
    let z0a = ev.z0.abs();

    // analytic core: paired integrand behaves like t^{1-2s} (a + b t^2)
    let t_core = (eps / 8.0).min(ev.r0 / 4.0).min(1e-3 + z0a.max(1e-12) * 0.0 + eps);
    let t_core = t_core.min(if z0a > 1e-9 { 0.5 * z0a } else { f64::INFINITY });
    let q = |t: f64| ev.paired(t) * t.powf(2.0 * s - 1.0);
    let q1 = q(t_core / 2.0);
    let q2 = q(t_core);
    let a = (4.0 * q1 - q2) / 3.0;
    let b = 4.0 * (q2 - q1) / (3.0 * t_core * t_core);
    let core = a * t_core.powf(2.0 - 2.0 * s) / (2.0 - 2.0 * s)
        + b * t_core.powf(4.0 - 2.0 * s) / (4.0 - 2.0 * s);

    // paired panels out to t_fin, with splits at the interface crossing, the
    // ramp band edges and the opposite-radius kink
    let t_fin = 1e4;
    let mut edges = geometric_edges(t_core, t_fin, 64);
    for c in [
        z0a,
        (4.0 * delta - ev.z0).abs(),
        (4.0 * delta + ev.z0).abs(),
        (5.0 * delta - ev.z0).abs(),
        (5.0 * delta + ev.z0).abs(),
        ev.r0,
        2.0 * ev.radius - z0a,
        2.0 * ev.radius + z0a,
    ] {
        refine_around(
            &mut edges,
            c,
            &[eps / 4.0, eps, 4.0 * eps, 16.0 * eps, 64.0 * eps],
            t_core,
            t_fin,
        );
    }
    normalize_edges(&mut edges);
    let body = g16().integrate_panels(&edges, |t| ev.paired(t));

    // analytic remainders beyond t_fin
    let u_out = field.value_of_distance(-6.0 * delta);
    let u_r0 = field.value_of_distance(ev.z0);
    let w0 = ev.w_flat(0.0);
    let gamma1 = ev.kernel.gamma1;
    let gamma2 = ev.kernel.gamma2;
    let radial_rem = (u_r0 - u_out)
        * gamma2
        * 2.0
        * PI
        * (ev.r0 * t_fin.powf(-1.0 - 2.0 * s) / (1.0 + 2.0 * s) + t_fin.powf(-2.0 * s) / (2.0 * s));
    let flat_rem = -gamma1 * 2.0 * w0 * t_fin.powf(-2.0 * s) / (2.0 * s);

    core + body + radial_rem + flat_rem
}

/// `(-Delta)^s u` at a point, radial fast path (circles only).
pub fn flap2d(field: &RecoveryField, x: Vec2) -> Result<f64> {
    match field.sd.curve.kind {
        CurveKind::Circle { .. } => {
            let r0 = (x - field.sd.curve.center).norm();
            if r0 <= 1e-12 {
                return Err(Error::Range(
                    "radial evaluation at the exact center is degenerate".into(),
                ));
            }
            let z0 = field.sd.curve.signed_distance(x);
            let one_d = field.epsilon.powf(-2.0 * field.s())
                * flap_profile_any(&field.profile, z0 / field.epsilon)?;
            Ok(one_d + b_rel_radial(field, r0))
        }
        CurveKind::Ellipse { .. } => flap2d_direct(field, x),
    }
}

/// Direct polar second-difference evaluation of `(-Delta)^s u`; independent
/// of the kernel-reduction path and valid for any curve.
pub fn flap2d_direct(field: &RecoveryField, x: Vec2) -> Result<f64> {
    let s = field.s();
    let eps = field.epsilon;
    let outer = field.sd.curve.bounding_radius() + 5.0 * field.sd.delta;
    let far = (x - field.sd.curve.center).norm() + outer + 1.0;
    let u = |p: Vec2| field.value(p);
    let cross = |p: Vec2, e: Vec2| -> Vec<f64> {
        // radii where the ray p + rho e crosses the curve (circles only need
        // the quadratic; for ellipses sample-and-bisect on the implicit form)
        match field.sd.curve.kind {
            CurveKind::Circle { radius } => {
                let d = p - field.sd.curve.center;
                let b = d.dot(e);
                let c = d.norm_sq() - radius * radius;
                let disc = b * b - c;
                if disc <= 0.0 {
                    vec![]
                } else {
                    let sq = disc.sqrt();
                    [-b - sq, -b + sq].iter().copied().filter(|&r| r > 0.0).collect()
                }
            }
            CurveKind::Ellipse { .. } => {
                let f = |rho: f64| field.sd.curve.signed_distance(p + e * rho);
                let mut roots = Vec::new();
                let n = 400;
                let mut prev = f(0.0);
                for i in 1..=n {
                    let rho = far * i as f64 / n as f64;
                    let cur = f(rho);
                    if prev * cur < 0.0 {
                        let mut lo = far * (i - 1) as f64 / n as f64;
                        let mut hi = rho;
                        for _ in 0..60 {
                            let mid = 0.5 * (lo + hi);
                            if f(lo) * f(mid) <= 0.0 {
                                hi = mid;
                            } else {
                                lo = mid;
                            }
                        }
                        roots.push(0.5 * (lo + hi));
                    }
                    prev = cur;
                }
                roots
            }
        }
    };
    Ok(flap2d_of_function(
        &u,
        |p, e| cross(p, e),
        -1.0,
        far,
        x,
        s,
        eps,
    ))
}

/// Direct polar evaluation for a generic bounded field with constant far
/// value; `crossings` supplies per-ray refinement radii.
pub fn flap2d_of_function<F, C>(
    u: &F,
    crossings: C,
    far_value: f64,
    far_radius: f64,
    x: Vec2,
    s: f64,
    feature_scale: f64,
) -> f64
where
    F: Fn(Vec2) -> f64,
    C: Fn(Vec2, Vec2) -> Vec<f64>,
{
    let gamma2 = gamma_ds(2, s).expect("s in (0,1)");
    let ux = u(x);
    let n_theta = 48;
    let mut theta_acc = 0.0;
    for j in 0..n_theta {
        // midpoint rule in angle over [0, pi): the integrand is pi-periodic
        let theta = PI * (j as f64 + 0.5) / n_theta as f64;
        let e = Vec2::new(theta.cos(), theta.sin());
        let d2 = |rho: f64| 2.0 * ux - u(x + e * rho) - u(x - e * rho);
        // analytic core with the even fit a rho^2 + b rho^4
        let rc = feature_scale / 8.0;
        let d1v = d2(rc);
        let d2v = d2(2.0 * rc);
        let a = (16.0 * d1v - d2v) / (12.0 * rc * rc);
        let b = (d2v - 4.0 * d1v) / (12.0 * rc.powi(4));
        let yc = 2.0 * rc;
        let core = a * yc.powf(2.0 - 2.0 * s) / (2.0 - 2.0 * s)
            + b * yc.powf(4.0 - 2.0 * s) / (4.0 - 2.0 * s);
        let mut edges = geometric_edges(yc, far_radius, 48);
        for c in crossings(x, e).into_iter().chain(crossings(x, -e)) {
            refine_around(
                &mut edges,
                c,
                &[
                    feature_scale / 4.0,
                    feature_scale,
                    4.0 * feature_scale,
                    16.0 * feature_scale,
                ],
                yc,
                far_radius,
            );
        }
        normalize_edges(&mut edges);
        let body = g10().integrate_panels(&edges, |rho| d2(rho) * rho.powf(-1.0 - 2.0 * s));
        theta_acc += core + body;
    }
    let mean = theta_acc * PI / n_theta as f64;
    // far remainder: u -> far_value outside far_radius
    let rem = PI * (2.0 * ux - 2.0 * far_value) * far_radius.powf(-2.0 * s) / s * 0.5;
    gamma2 * (mean + rem)
}

/// The three pieces of the operator expansion at a tube point.
#[derive(Debug, Clone, Copy)]
pub struct ExpansionParts {
    pub full: f64,
    pub leading_1d: f64,
    pub curvature_term: f64,
}

impl ExpansionParts {
    pub fn residual(&self) -> f64 {
        (self.full - self.leading_1d - self.curvature_term).abs()
    }
}

/// Splits `(-Delta)^s u(x0)` into the 1D profile term, the curvature term
/// `gamma_{1,s}/(2(2s-1)) H eta_{eps, delta/Lambda}(z0)` and the remainder.
pub fn fermi_expansion_parts(
    field: &RecoveryField,
    x0: Vec2,
    lambda: f64,
) -> Result<ExpansionParts> {
    let s = field.s();
    if !(s > 0.5 && s < 1.0) {
        return Err(Error::Domain(format!("expansion requires s in (1/2, 1), got {s}")));
    }
    if !(lambda >= 1.0) {
        return Err(Error::Config("Lambda must be >= 1".into()));
    }
    let delta = field.sd.delta;
    let z0 = field.sd.curve.signed_distance(x0);
    if z0.abs() > delta / (10.0 * lambda) {
        return Err(Error::Range(format!(
            "x0 must lie within the thin tube |dist| <= {}",
            delta / (10.0 * lambda)
        )));
    }
    let proj = field.sd.curve.project_to_boundary(x0)?;
    let curv = field.sd.curve.curvature(proj)?;
    let full = flap2d(field, x0)?;
    let leading = field.epsilon.powf(-2.0 * s)
        * flap_profile_any(&field.profile, z0 / field.epsilon)?;
    let spec = EtaSpec::new(field.epsilon, delta / lambda, &field.profile)?;
    let gamma1 = gamma_ds(1, s)?;
    let curvature_term = gamma1 / (2.0 * (2.0 * s - 1.0)) * curv * eta(&spec, z0)?;
    Ok(ExpansionParts { full, leading_1d: leading, curvature_term })
}

/// Absolute remainder of the expansion at a tube point.
pub fn fermi_expansion_residual(field: &RecoveryField, x0: Vec2, lambda: f64) -> Result<f64> {
    Ok(fermi_expansion_parts(field, x0, lambda)?.residual())
}
