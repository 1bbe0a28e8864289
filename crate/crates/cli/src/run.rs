//! Subcommand runners: each produces the text of its report file.

use crate::config::{RunConfig, Subcommand};
use fracwill_core::constants::{
    default_cutoff_ladder, default_log_ladder, kappa_star, mu_log_rate, mu_w,
};
use fracwill_core::energy::{run_limsup_experiment, EnergyConfig, RowOutcome};
use fracwill_core::field::RecoveryField;
use fracwill_core::flap2d::fermi_expansion_parts;
use fracwill_core::geometry::SmoothedDistance;
use fracwill_core::heat::{
    fundamental_solution, heat_kernel, heat_kernel_deriv, heat_kernel_mass,
};
use fracwill_core::profile::{
    flap_profile_any, profile_to_table, solve_profile, SampledProfile,
};
use fracwill_core::special::gamma_ds;
use fracwill_core::{Error, Result};
use std::sync::Arc;

fn solve(config: &RunConfig) -> Result<Arc<SampledProfile>> {
    Ok(Arc::new(solve_profile(
        &config.potential,
        config.s,
        config.grid_half_width,
        config.grid_intervals,
    )?))
}

fn run_profile(config: &RunConfig) -> Result<String> {
    let profile = solve(config)?;
    let mut out = format!("# config: {}\n", config.header_line());
    out.push_str(&profile_to_table(&profile));
    Ok(out)
}

fn run_kernel(config: &RunConfig) -> Result<String> {
    let s = config.s;
    let lam = config.lambda;
    let mut out = format!("# config: {}\n", config.header_line());
    out.push_str(&format!(
        "# heat_mass={:.10e}\n",
        heat_kernel_mass(s)?
    ));
    out.push_str("x,heat_t1,heat_deriv1,fund_sol\n");
    for i in 0..=40 {
        let x = 0.25 * i as f64;
        let p = heat_kernel(1.0, x, s)?;
        let dp = heat_kernel_deriv(1, x, s)?;
        let g = if x == 0.0 {
            f64::NAN
        } else {
            fundamental_solution(lam, x, s)?
        };
        out.push_str(&format!("{x},{p:.10e},{dp:.10e},{g:.10e}\n"));
    }
    Ok(out)
}

fn run_constants(config: &RunConfig) -> Result<String> {
    let profile = solve(config)?;
    let s = config.s;
    let g1 = gamma_ds(1, s)?;
    let kappa = kappa_star(s, &profile)?;
    let (mu_text, ladder_json) = if (s - 0.75).abs() <= 1e-12 {
        let seq = mu_log_rate(&profile, &default_log_ladder())?;
        let entries: Vec<String> = seq.iter().map(|q| format!("{q:.10e}")).collect();
        ("na".to_string(), format!("[{}]", entries.join(",")))
    } else {
        let mu = mu_w(&profile, &default_cutoff_ladder())?;
        let entries: Vec<String> =
            mu.accelerated.iter().map(|q| format!("{q:.10e}")).collect();
        (format!("{:.10e}", mu.value), format!("[{}]", entries.join(",")))
    };
    let mut out = format!("# config: {}\n", config.header_line());
    out.push_str("s,gamma_1s,mu_w_or_na,kappa_star,ladder_json\n");
    out.push_str(&format!(
        "{s},{g1:.10e},{mu_text},{kappa:.10e},\"{ladder_json}\"\n"
    ));
    Ok(out)
}

fn run_expansion(config: &RunConfig) -> Result<String> {
    let profile = solve(config)?;
    let sd = SmoothedDistance::default_for(config.curve)?;
    let lambda = config.cap_lambda;
    let z0 = 0.4 * sd.delta / (10.0 * lambda);
    let t0 = 0.0;
    let x0 = config.curve.point_at(t0) + config.curve.normal_in(t0) * z0;
    let mut out = format!("# config: {}\n", config.header_line());
    out.push_str(&format!("# tube_point_distance={z0:.10e} cap_lambda={lambda}\n"));
    out.push_str("epsilon,flap2d,leading_1d,curvature_term,residual,leading_sup\n");
    for &eps in &config.ladder {
        let field = RecoveryField::new(sd, profile.clone(), eps)?;
        let parts = fermi_expansion_parts(&field, x0, lambda)?;
        let mut sup = 0.0f64;
        for i in 0..400 {
            let z = -4.0 * sd.delta + 8.0 * sd.delta * i as f64 / 399.0;
            let v = eps.powf(-2.0 * config.s) * flap_profile_any(&profile, z / eps)?;
            sup = sup.max(v.abs());
        }
        out.push_str(&format!(
            "{eps},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e}\n",
            parts.full,
            parts.leading_1d,
            parts.curvature_term,
            parts.residual(),
            sup
        ));
    }
    Ok(out)
}

fn run_gamma(config: &RunConfig) -> Result<(String, usize)> {
    let profile = solve(config)?;
    let sd = SmoothedDistance::default_for(config.curve)?;
    let energy =
        EnergyConfig::default_for(&config.curve, sd.delta, config.ladder.clone())?;
    let report =
        run_limsup_experiment(config.curve, profile, &config.potential, &energy)?;
    let failed = report
        .rows
        .iter()
        .filter(|r| matches!(r, RowOutcome::Failed { .. }))
        .count();
    Ok((report.to_csv(&config.header_line()), failed))
}

/// Executes the subcommand and writes its report; returns the output path.
pub fn execute(config: &RunConfig) -> Result<String> {
    let (text, failed_rows) = match config.subcommand {
        Subcommand::Profile => (run_profile(config)?, 0),
        Subcommand::Kernel => (run_kernel(config)?, 0),
        Subcommand::Constants => (run_constants(config)?, 0),
        Subcommand::Expansion => (run_expansion(config)?, 0),
        Subcommand::Gamma => run_gamma(config)?,
    };
    std::fs::write(&config.output, text)
        .map_err(|e| Error::Config(format!("cannot write {}: {e}", config.output)))?;
    if failed_rows > 0 {
        return Err(Error::Accuracy(format!(
            "{failed_rows} report row(s) failed; see {}",
            config.output
        )));
    }
    Ok(config.output.clone())
}
