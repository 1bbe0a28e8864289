//! The fractional Allen-Cahn energy F, the squared-first-variation energy G
//! and the limsup experiment over an epsilon ladder, with radial reduction on
//! circles.

use crate::constants::kappa_star;
use crate::error::{Error, Result};
use crate::field::RecoveryField;
use crate::flap2d::{flap2d, RadialKernel};
use crate::geometry::{CurveKind, PlanarCurve, SmoothedDistance, Vec2};
use crate::potential::DoubleWell;
use crate::profile::SampledProfile;
use crate::quad::{g10, geometric_edges, normalize_edges, refine_around};
use crate::special::gamma_ds;
use rayon::prelude::*;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

const PI: f64 = std::f64::consts::PI;

// Deterministic work units standing in for wall time in the reports: counts
// of integrand evaluations at a nominal rate, so reruns are byte-identical.
static WORK: AtomicU64 = AtomicU64::new(0);
const SECONDS_PER_UNIT: f64 = 2e-8;

fn add_work(units: u64) {
    WORK.fetch_add(units, Ordering::Relaxed);
}

fn take_work() -> u64 {
    WORK.swap(0, Ordering::Relaxed)
}

/// Domain and ladder of an energy experiment: the energies integrate over a
/// centered disk of radius `omega_radius` containing the curve with margin.
#[derive(Debug, Clone)]
pub struct EnergyConfig {
    pub omega_radius: f64,
    pub epsilon_ladder: Vec<f64>,
}

impl EnergyConfig {
    pub fn new(omega_radius: f64, epsilon_ladder: Vec<f64>) -> Result<Self> {
        if epsilon_ladder.is_empty()
            || epsilon_ladder.iter().any(|&e| !(e > 0.0))
            || epsilon_ladder.windows(2).any(|w| w[1] >= w[0])
        {
            return Err(Error::Config(
                "epsilon ladder must be positive and strictly decreasing".into(),
            ));
        }
        if !(omega_radius > 0.0) {
            return Err(Error::Config("omega radius must be positive".into()));
        }
        Ok(EnergyConfig { omega_radius, epsilon_ladder })
    }

    /// Smallest admissible domain for a curve: bounding radius + 5 delta + 1.
    pub fn default_for(curve: &PlanarCurve, delta: f64, ladder: Vec<f64>) -> Result<Self> {
        Self::new(curve.bounding_radius() + 5.0 * delta + 1.0, ladder)
    }

    fn check_margin(&self, field: &RecoveryField) -> Result<()> {
        let need = field.sd.curve.bounding_radius() + 5.0 * field.sd.delta + 1.0;
        if self.omega_radius < need * (1.0 - 1e-12) {
            return Err(Error::Config(format!(
                "omega radius {} below the required margin {need}",
                self.omega_radius
            )));
        }
        Ok(())
    }
}

fn require_circle(field: &RecoveryField) -> Result<f64> {
    match field.sd.curve.kind {
        CurveKind::Circle { radius } => Ok(radius),
        CurveKind::Ellipse { .. } => Err(Error::Config(
            "the energy reductions require a circle; ellipses support only the operator and expansion paths".into(),
        )),
    }
}

/// Radial panel edges refined around the interface and the ramp band.
fn interface_edges(lo: f64, hi: f64, radius: f64, delta: f64, eps: f64) -> Vec<f64> {
    let mut edges = vec![lo, hi];
    for c in [
        radius - 5.0 * delta,
        radius - 4.0 * delta,
        radius - delta,
        radius,
        radius + delta,
        radius + 4.0 * delta,
        radius + 5.0 * delta,
    ] {
        if c > lo && c < hi {
            edges.push(c);
        }
    }
    let mut d = 0.25 * eps;
    while d < 5.0 * delta {
        for c in [radius - d, radius + d] {
            if c > lo && c < hi {
                edges.push(c);
            }
        }
        d *= 1.5;
    }
    // coarse fill of the constant regions
    let inner_end = (radius - 5.0 * delta).max(lo);
    for k in 1..6 {
        let c = lo + (inner_end - lo) * k as f64 / 6.0;
        if c > lo && c < hi {
            edges.push(c);
        }
    }
    let outer_start = (radius + 5.0 * delta).min(hi);
    for k in 1..6 {
        let c = outer_start + (hi - outer_start) * k as f64 / 6.0;
        if c > lo && c < hi {
            edges.push(c);
        }
    }
    normalize_edges(&mut edges);
    edges
}

/// The Gagliardo double integral reduced to radii: pairs within [0, r5] by
/// singular pair quadrature, pairs reaching beyond r5 through the analytic
/// outer kernel; `u` must be constant (= u_out) past r5.
fn radial_gagliardo<F: Fn(f64) -> f64 + Sync>(
    u: &F,
    u_out: f64,
    s: f64,
    radius: f64,
    delta: f64,
    eps: f64,
) -> f64 {
    let r5 = radius + 5.0 * delta;
    let outer = interface_edges(0.0, r5, radius, delta, eps);
    let rule = g10();
    let nodes: Vec<(f64, f64)> = outer
        .windows(2)
        .flat_map(|pair| {
            let half = 0.5 * (pair[1] - pair[0]);
            let mid = 0.5 * (pair[0] + pair[1]);
            rule.nodes
                .iter()
                .zip(&rule.weights)
                .map(move |(x, w)| (mid + half * x, w * half))
                .collect::<Vec<_>>()
        })
        .collect();

    let contributions: Vec<f64> = nodes
        .par_iter()
        .map(|&(r, wr)| {
            let kernel = RadialKernel::new(s, r);
            let ur = u(r);
            let mut inner = 0.0;
            // both sides in t with a per-side power-law core
            for sigma in [-1.0, 1.0] {
                let t_max = if sigma < 0.0 { r } else { r5 - r };
                if t_max <= 0.0 {
                    continue;
                }
                let g = |t: f64| {
                    add_work(1);
                    let rp = r + sigma * t;
                    let du = ur - u(rp);
                    du * du * kernel.pair(rp, t)
                };
                let t_c = (eps / 8.0).min(t_max / 4.0);
                let q = |t: f64| g(t) * t.powf(2.0 * s - 1.0);
                let q1 = q(t_c / 2.0);
                let q2 = q(t_c);
                let a = 2.0 * q1 - q2;
                let b = 2.0 * (q2 - q1) / t_c;
                inner += a * t_c.powf(2.0 - 2.0 * s) / (2.0 - 2.0 * s)
                    + b * t_c.powf(3.0 - 2.0 * s) / (3.0 - 2.0 * s);
                let mut edges = geometric_edges(t_c, t_max, 40);
                for c in [radius, radius - 4.0 * delta, radius + 4.0 * delta] {
                    let t_feat = sigma * (c - r);
                    refine_around(
                        &mut edges,
                        t_feat,
                        &[eps / 4.0, eps, 4.0 * eps, 16.0 * eps],
                        t_c,
                        t_max,
                    );
                }
                normalize_edges(&mut edges);
                inner += rule.integrate_panels(&edges, g);
            }
            // pairs with the partner beyond r5, where u is exactly u_out
            let du = ur - u_out;
            if du != 0.0 {
                let t_lo = r5 - r;
                let t_fin = 1e4;
                let edges = geometric_edges(t_lo.max(1e-8), t_fin, 40);
                let w_out = rule.integrate_panels(&edges, |t| {
                    add_work(1);
                    kernel.pair(r + t, t)
                }) + r
                    * 2.0
                    * PI
                    * (r * t_fin.powf(-1.0 - 2.0 * s) / (1.0 + 2.0 * s)
                        + t_fin.powf(-2.0 * s) / (2.0 * s));
                inner += 2.0 * du * du * w_out;
            }
            wr * inner
        })
        .collect();
    contributions.into_iter().sum()
}

/// The fractional Allen-Cahn energy of a circle recovery field.
pub fn energy_f(
    field: &RecoveryField,
    potential: &DoubleWell,
    config: &EnergyConfig,
) -> Result<f64> {
    let s = field.s();
    if !(s > 0.5 && s < 1.0) {
        return Err(Error::Domain(format!("energy_f requires s in (1/2, 1), got {s}")));
    }
    let radius = require_circle(field)?;
    config.check_margin(field)?;
    let eps = field.epsilon;
    let delta = field.sd.delta;
    let u = |r: f64| field.value_of_distance(radius - r);
    let u_out = field.value_of_distance(-6.0 * delta);
    let gamma2 = gamma_ds(2, s)?;
    let seminorm = radial_gagliardo(&u, u_out, s, radius, delta, eps);
    let w_edges = interface_edges(0.0, config.omega_radius, radius, delta, eps);
    let w_term = g10().integrate_panels(&w_edges, |r| {
        add_work(1);
        potential.w(u(r)) * r
    });
    let value =
        eps.powf(2.0 * s - 1.0) * 0.25 * gamma2 * 2.0 * PI * seminorm + 2.0 * PI / eps * w_term;
    if !value.is_finite() {
        return Err(Error::Accuracy("energy_f quadrature produced a non-finite value".into()));
    }
    Ok(value)
}

/// Weighted square integral `(1/eps) \int B(r)^2 2 pi r dr` split into the
/// tube `|r - radius| < delta` and the rest.
fn weighted_square_integral<B: Fn(f64) -> Result<f64> + Sync>(
    b: &B,
    radius: f64,
    delta: f64,
    eps: f64,
    omega_radius: f64,
) -> Result<(f64, f64)> {
    let edges = interface_edges(1e-4, omega_radius, radius, delta, eps);
    let rule = g10();
    let panel_results: Result<Vec<(f64, f64)>> = edges
        .par_windows(2)
        .map(|pair| {
            let half = 0.5 * (pair[1] - pair[0]);
            let mid = 0.5 * (pair[0] + pair[1]);
            let mut acc = 0.0;
            for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                let r = mid + half * x;
                let bb = b(r)?;
                acc += w * half * bb * bb * r;
            }
            let in_tube = (mid - radius).abs() < delta;
            Ok(if in_tube { (acc, acc) } else { (acc, 0.0) })
        })
        .collect();
    let mut total = 0.0;
    let mut tube = 0.0;
    for (a, t) in panel_results? {
        total += a;
        tube += t;
    }
    Ok((2.0 * PI / eps * total, 2.0 * PI / eps * tube))
}

/// The squared-first-variation energy of a circle recovery field, with the
/// extra `1/|log eps|` normalization at s = 3/4. Returns (total, tube part).
pub fn energy_g_parts(
    field: &RecoveryField,
    potential: &DoubleWell,
    config: &EnergyConfig,
) -> Result<(f64, f64)> {
    let s = field.s();
    if !(s >= 0.75 - 1e-12 && s < 1.0) {
        return Err(Error::Domain(format!("energy_g requires s in [3/4, 1), got {s}")));
    }
    let radius = require_circle(field)?;
    config.check_margin(field)?;
    let eps = field.epsilon;
    let delta = field.sd.delta;
    let center = field.sd.curve.center;
    let b = |r: f64| -> Result<f64> {
        add_work(4096);
        let fl = flap2d(field, center + Vec2::new(r, 0.0))?;
        let u = field.value_of_distance(radius - r);
        Ok(eps.powf(2.0 * s - 1.0) * fl + potential.dw(u) / eps)
    };
    let (mut total, mut tube) =
        weighted_square_integral(&b, radius, delta, eps, config.omega_radius)?;
    if (s - 0.75).abs() <= 1e-12 {
        let log_factor = eps.ln().abs();
        total /= log_factor;
        tube /= log_factor;
    }
    if !total.is_finite() {
        return Err(Error::Accuracy("energy_g quadrature produced a non-finite value".into()));
    }
    Ok((total, tube))
}

pub fn energy_g(
    field: &RecoveryField,
    potential: &DoubleWell,
    config: &EnergyConfig,
) -> Result<f64> {
    Ok(energy_g_parts(field, potential, config)?.0)
}

/// One row of the experiment report.
#[derive(Debug, Clone)]
pub struct ReportRow {
    pub epsilon: f64,
    pub f_value: f64,
    pub g_value: f64,
    pub f_per_ratio: f64,
    pub g_kappa_w_ratio: f64,
    pub tube_share: f64,
    pub runtime_s: f64,
}

#[derive(Debug, Clone)]
pub enum RowOutcome {
    Ok(ReportRow),
    Failed { epsilon: f64, message: String },
}

/// Energies along the epsilon ladder with the analytic reference quantities.
#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub rows: Vec<RowOutcome>,
    pub kappa_star: f64,
    pub perimeter: f64,
    pub willmore: f64,
    pub extrapolated_f: Option<f64>,
    pub extrapolated_g: Option<f64>,
}

impl ExperimentReport {
    /// Serializes the report; `config_line` is echoed as the reproducibility
    /// header. runtime_s is a deterministic work-based estimate.
    pub fn to_csv(&self, config_line: &str) -> String {
        let mut out = String::new();
        out.push_str(&format!("# config: {config_line}\n"));
        out.push_str(&format!(
            "# kappa_star={:.10e} perimeter={:.10e} willmore={:.10e}\n",
            self.kappa_star, self.perimeter, self.willmore
        ));
        out.push_str("epsilon,F,G,F_per_ratio,G_kappaW_ratio,tube_share,runtime_s\n");
        for row in &self.rows {
            match row {
                RowOutcome::Ok(r) => out.push_str(&format!(
                    "{:.10e},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e},{:.3}\n",
                    r.epsilon,
                    r.f_value,
                    r.g_value,
                    r.f_per_ratio,
                    r.g_kappa_w_ratio,
                    r.tube_share,
                    r.runtime_s
                )),
                RowOutcome::Failed { epsilon, message } => {
                    out.push_str(&format!("# error epsilon={epsilon:.10e} message=\"{message}\"\n"))
                }
            }
        }
        if let (Some(f), Some(g)) = (self.extrapolated_f, self.extrapolated_g) {
            out.push_str(&format!(
                "# extrapolated_F={f:.10e} extrapolated_G={g:.10e}\n"
            ));
        }
        out
    }

    pub fn ok_rows(&self) -> Vec<&ReportRow> {
        self.rows
            .iter()
            .filter_map(|r| match r {
                RowOutcome::Ok(row) => Some(row),
                _ => None,
            })
            .collect()
    }
}

/// Runs the limsup experiment: energies for every epsilon of the ladder,
/// ratios against the analytic perimeter and Willmore values, and linear
/// Richardson extrapolations in epsilon.
pub fn run_limsup_experiment(
    curve: PlanarCurve,
    profile: Arc<SampledProfile>,
    potential: &DoubleWell,
    config: &EnergyConfig,
) -> Result<ExperimentReport> {
    let sd = SmoothedDistance::default_for(curve)?;
    let s = profile.s;
    let kappa = kappa_star(s, &profile)?;
    let (perimeter, willmore) = curve.perimeter_and_willmore();
    let mut rows = Vec::new();
    for &eps in &config.epsilon_ladder {
        take_work();
        let outcome = (|| -> Result<ReportRow> {
            let field = RecoveryField::new(sd, profile.clone(), eps)?;
            let f_value = energy_f(&field, potential, config)?;
            let (g_value, tube) = energy_g_parts(&field, potential, config)?;
            Ok(ReportRow {
                epsilon: eps,
                f_value,
                g_value,
                f_per_ratio: f_value / perimeter,
                g_kappa_w_ratio: g_value / (kappa * willmore),
                tube_share: tube / g_value,
                runtime_s: take_work() as f64 * SECONDS_PER_UNIT,
            })
        })();
        rows.push(match outcome {
            Ok(row) => RowOutcome::Ok(row),
            Err(e) => RowOutcome::Failed { epsilon: eps, message: e.to_string() },
        });
    }
    let ok: Vec<&ReportRow> = rows
        .iter()
        .filter_map(|r| match r {
            RowOutcome::Ok(row) => Some(row),
            _ => None,
        })
        .collect();
    let extrapolate = |take: &dyn Fn(&ReportRow) -> f64| -> Option<f64> {
        if ok.len() < 2 {
            return None;
        }
        let a = ok[ok.len() - 2];
        let b = ok[ok.len() - 1];
        Some(take(b) + (take(b) - take(a)) * b.epsilon / (a.epsilon - b.epsilon))
    };
    Ok(ExperimentReport {
        extrapolated_f: extrapolate(&|r| r.f_value),
        extrapolated_g: extrapolate(&|r| r.g_value),
        rows,
        kappa_star: kappa,
        perimeter,
        willmore,
    })
}
