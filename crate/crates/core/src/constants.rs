//! Profile-derived constants of the Willmore-type limit: the weighted
//! derivative integral eta, its integration-by-parts identity, the limit
//! constant mu_w with its cutoff ladder, the s = 3/4 logarithmic rate, and
//! the prefactor kappa_star.

use crate::error::{Error, Result};
use crate::profile::SampledProfile;
use crate::quad::{g16, geometric_edges, normalize_edges};
use crate::special::gamma_ds;

/// Parameters of the eta integral: `eta_{eps, ell}(z0) = \int_{-ell}^{ell}
/// w_eps'(z0 + z) / |z|^{2s - 1} dz` with `w_eps(z) = w(z / eps)`.
#[derive(Debug, Clone, Copy)]
pub struct EtaSpec<'a> {
    pub epsilon: f64,
    pub ell: f64,
    pub profile: &'a SampledProfile,
}

impl<'a> EtaSpec<'a> {
    pub fn new(epsilon: f64, ell: f64, profile: &'a SampledProfile) -> Result<Self> {
        if !(profile.s > 0.5 && profile.s < 1.0) {
            return Err(Error::Domain(format!(
                "eta requires s in (1/2, 1), got {}",
                profile.s
            )));
        }
        if !(epsilon > 0.0) || !(ell > 0.0) {
            return Err(Error::Domain("epsilon and ell must be positive".into()));
        }
        Ok(EtaSpec { epsilon, ell, profile })
    }
}

/// Edges in the flattened variable `u = z^{2 - 2s}`: a geometric backbone,
/// refinement around the transition of the integrand, and alignment with the
/// profile grid nodes in the core (the interpolant has curvature kinks
/// there; aligned panels keep the Gauss rule on smooth pieces).
fn flattened_edges(
    spec: &EtaSpec,
    z0: f64,
    sign: f64,
    panels: usize,
    singular_scale: f64,
    align_nodes: bool,
) -> Vec<f64> {
    let s = spec.profile.s;
    let q = 2.0 - 2.0 * s;
    let ell = spec.ell;
    let eps = spec.epsilon;
    let u_max = ell.powf(q);
    let mut edges = vec![0.0];
    edges.extend(geometric_edges(u_max * singular_scale, u_max, panels));
    let z_star = -z0 * sign;
    let mut marks = vec![0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0];
    if z_star > 0.0 && z_star < ell {
        for k in [-16.0, -8.0, -4.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0] {
            marks.push(z_star / eps + k);
        }
    }
    for m in marks {
        let z = m * eps;
        if z > 0.0 && z < ell {
            edges.push(z.powf(q));
        }
    }
    if !align_nodes {
        normalize_edges(&mut edges);
        return edges;
    }
    // node alignment within the core |argument| <= 20
    let h = spec.profile.fun.step();
    let core = 20.0f64.min(spec.profile.fun.half_width());
    let k_lo = ((-core + spec.profile.fun.half_width()) / h).floor() as i64;
    let k_hi = ((core + spec.profile.fun.half_width()) / h).ceil() as i64;
    for k in k_lo..=k_hi {
        let node = -spec.profile.fun.half_width() + h * k as f64;
        let z = sign * (node * eps - z0);
        if z > 0.0 && z < ell {
            edges.push(z.powf(q));
        }
    }
    normalize_edges(&mut edges);
    edges
}

fn eta_one_side(
    spec: &EtaSpec,
    z0: f64,
    sign: f64,
    panels: usize,
    singular_scale: f64,
    align_nodes: bool,
) -> f64 {
    let s = spec.profile.s;
    let q = 2.0 - 2.0 * s;
    let eps = spec.epsilon;
    let fun = &spec.profile.fun;
    let edges = flattened_edges(spec, z0, sign, panels, singular_scale, align_nodes);
    g16().integrate_panels(&edges, |u| {
        let z = u.powf(1.0 / q);
        fun.derivative((z0 + sign * z) / eps) / eps
    }) / q
}

fn eta_with_panels(spec: &EtaSpec, z0: f64, panels: usize) -> f64 {
    eta_one_side(spec, z0, 1.0, panels, 1e-12, true)
        + eta_one_side(spec, z0, -1.0, panels, 1e-12, true)
}

/// Cheaper eta without node-aligned panels; plenty for the 1%-level ladder
/// integrals, where the kink noise of the interpolant is irrelevant.
pub(crate) fn eta_fast(spec: &EtaSpec, z0: f64) -> f64 {
    eta_one_side(spec, z0, 1.0, 24, 1e-12, false)
        + eta_one_side(spec, z0, -1.0, 24, 1e-12, false)
}

/// The eta integral; nonnegative and even in `z0`.
pub fn eta(spec: &EtaSpec, z0: f64) -> Result<f64> {
    Ok(eta_with_panels(spec, z0, 52))
}

/// Same integral with the singular panel at the kernel endpoint halved; used
/// to verify that the endpoint-singularity treatment is converged.
pub fn eta_refined(spec: &EtaSpec, z0: f64) -> Result<f64> {
    Ok(eta_one_side(spec, z0, 1.0, 52, 0.5e-12, true) + eta_one_side(spec, z0, -1.0, 52, 0.5e-12, true))
}

/// Residual of the integration-by-parts identity relating the odd-kernel
/// difference integral, the boundary term and eta.
pub fn ibp_identity_residual(spec: &EtaSpec, z0: f64) -> Result<f64> {
    let s = spec.profile.s;
    let q = 2.0 - 2.0 * s;
    let eps = spec.epsilon;
    let ell = spec.ell;
    let w = |z: f64| spec.profile.value(z / eps);
    let w_z0 = w(z0);

    // LHS = \int_{-ell}^{ell} (w_eps(z0 + z) - w_eps(z0)) z |z|^{-2s-1} dz,
    // written per side as \int_0^{ell} z^{1-2s} D(z) dz with the difference
    // quotient D; the substitution u = z^{2-2s} flattens the weight.
    let side = |sign: f64| -> f64 {
        let edges = flattened_edges(spec, z0, sign, 52, 1e-12, true);
        g16().integrate_panels(&edges, |u| {
            let z = u.powf(1.0 / q);
            if z < 1e-4 * eps {
                spec.profile.fun.derivative((z0 + sign * z) / eps) / eps
            } else {
                (w(z0 + sign * z) - w_z0) / (sign * z)
            }
        }) / q
    };
    let lhs = side(1.0) + side(-1.0);

    let boundary = ell.powf(1.0 - 2.0 * s) / (1.0 - 2.0 * s) * (w(ell + z0) - w(z0 - ell));
    let rhs = boundary + eta(spec, z0)? / (2.0 * s - 1.0);
    Ok((lhs - rhs).abs())
}

/// Result of the mu_w ladder: raw truncated integrals, the Richardson
/// accelerated sequence (using the known tail power 3 - 4s), and the limit.
#[derive(Debug, Clone)]
pub struct MuResult {
    pub value: f64,
    pub raw: Vec<f64>,
    pub accelerated: Vec<f64>,
}

/// Truncated squared-eta integral `\int_{-l'}^{l'} eta_{1, l}(z)^2 dz` with
/// `l = cutoff`, `l' = ell_prime_factor * cutoff`.
fn eta_square_integral(profile: &SampledProfile, cutoff: f64, ell_prime_factor: f64) -> Result<f64> {
    let spec = EtaSpec::new(1.0, cutoff, profile)?;
    let zp = ell_prime_factor * cutoff;
    let core = zp.min(8.0);
    let mut edges: Vec<f64> = (0..=32).map(|i| core * i as f64 / 32.0).collect();
    if zp > core {
        edges.extend(geometric_edges(core, zp, 28));
    }
    normalize_edges(&mut edges);
    // even integrand: twice the positive half
    let half = g16().integrate_panels(&edges, |z| {
        let e = eta_fast(&spec, z);
        e * e
    });
    Ok(2.0 * half)
}

const DEFAULT_LADDER: [f64; 5] = [25.0, 50.0, 100.0, 200.0, 400.0];

pub fn default_cutoff_ladder() -> Vec<f64> {
    DEFAULT_LADDER.to_vec()
}

/// Taller ladder for the s = 3/4 logarithmic rate, whose approach to the
/// limit is O(1/log cutoff) and needs larger windows to enter the band.
pub fn default_log_ladder() -> Vec<f64> {
    vec![25.0, 50.0, 100.0, 200.0, 400.0, 1600.0, 6400.0]
}

/// The limit constant `mu_w = \int eta^2`, extrapolated along the cutoff
/// ladder with the analytically known truncation power `3 - 4s`.
pub fn mu_w(profile: &SampledProfile, cutoff_ladder: &[f64]) -> Result<MuResult> {
    mu_w_with(profile, cutoff_ladder, 0.5)
}

pub fn mu_w_with(
    profile: &SampledProfile,
    cutoff_ladder: &[f64],
    ell_prime_factor: f64,
) -> Result<MuResult> {
    let s = profile.s;
    if !(s > 0.75) {
        return Err(Error::Domain(format!("mu_w requires s > 3/4, got {s}")));
    }
    if cutoff_ladder.len() < 3 || cutoff_ladder.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config(
            "cutoff ladder must be strictly increasing with at least 3 rungs".into(),
        ));
    }
    let raw: Result<Vec<f64>> = cutoff_ladder
        .iter()
        .map(|&z| eta_square_integral(profile, z, ell_prime_factor))
        .collect();
    let raw = raw?;
    let a = 4.0 * s - 3.0;
    let mut accelerated = Vec::with_capacity(raw.len() - 1);
    for k in 1..raw.len() {
        let rho = cutoff_ladder[k] / cutoff_ladder[k - 1];
        accelerated.push(raw[k] + (raw[k] - raw[k - 1]) / (rho.powf(a) - 1.0));
    }
    let m = accelerated.len();
    let value = accelerated[m - 1];
    let prev = accelerated[m - 2];
    if !(value.is_finite() && value > 0.0) || (value - prev).abs() > 0.01 * value.abs() {
        return Err(Error::Convergence {
            detail: format!(
                "mu_w ladder did not stabilize to 1%: raw {raw:?}, accelerated {accelerated:?}"
            ),
            last_residual: (value - prev).abs() / value.abs(),
        });
    }
    Ok(MuResult { value, raw, accelerated })
}

/// The s = 3/4 logarithmic rate: the sequence `(1/|log eps|) \int eta^2`
/// along the ladder with `eps = 1/cutoff`; tends to 8.
pub fn mu_log_rate(profile: &SampledProfile, cutoff_ladder: &[f64]) -> Result<Vec<f64>> {
    if (profile.s - 0.75).abs() > 1e-12 {
        return Err(Error::Domain(format!(
            "the logarithmic rate is defined at s = 3/4, got {}",
            profile.s
        )));
    }
    if cutoff_ladder.iter().any(|&z| z <= 1.0) {
        return Err(Error::Config("cutoffs must exceed 1".into()));
    }
    cutoff_ladder
        .iter()
        .map(|&z| Ok(eta_square_integral(profile, z, 0.5)? / z.ln()))
        .collect()
}

/// The Willmore prefactor: `gamma_{1,s}^2 / (4 (2s-1)^2) mu_w` for s > 3/4
/// and `8 gamma_{1,3/4}^2` at s = 3/4.
pub fn kappa_star(s: f64, profile: &SampledProfile) -> Result<f64> {
    if (profile.s - s).abs() > 1e-9 {
        return Err(Error::Config(format!(
            "profile was solved at s = {}, requested {s}",
            profile.s
        )));
    }
    let g1 = gamma_ds(1, s)?;
    if (s - 0.75).abs() <= 1e-12 {
        return Ok(8.0 * g1 * g1);
    }
    if s < 0.75 {
        return Err(Error::Domain(format!(
            "kappa_star is defined for s >= 3/4, got {s}"
        )));
    }
    let mu = mu_w(profile, &default_cutoff_ladder())?;
    Ok(g1 * g1 / (4.0 * (2.0 * s - 1.0).powi(2)) * mu.value)
}
